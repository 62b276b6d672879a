"""Separation sweeps and phase-diagram scans written as CSV.

A run is described by a flat TOML file whose keys may be overridden on the
command line::

    lattice = "infinite"        # or "100", "500x500", "open:100"
    j1 = 1.0
    kz = 1e-4
    kx = 1e-6
    d = 0.5e-4
    spin = 1.0
    l_min = 0.05
    l_max = 5.0
    l_count = 201
    l_spacing = "log"           # or "linear"; alternatively l_values = [...]
    d_grid = [0.1, 0.5, 1.0]    # D/Kz values for the phase diagram
    outputs = ["energies", "entanglement"]
    out_dir = "out"
    rel_tol = 1e-10

Exit codes: 0 success, 2 bad configuration, 3 convergence or other numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bogoliubov import analytic_bogoliubov, eigenenergies
from .classical import determine_phase, phase_boundary_distance
from .core import LatticeSpec, ModelParams, Phase, validate
from .entanglement import eta_minus_analytic, log_negativity
from .errors import (
    BoundaryError,
    ConfigError,
    ConvergenceError,
    DipmagError,
    DomainError,
    GaplessError,
    InstabilityError,
    NoBoundaryError,
)
from .spinwave import bdg_block, isolated_block
from .squeezing import extract

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "SweepConfig",
    "SweepRecord",
    "Status",
    "OUTPUTS",
    "OUTPUT_COLUMNS",
    "load_config",
    "default_l_grid",
    "compute_point",
    "run_sweep",
    "run_phase_diagram",
    "write_csv",
    "format_value",
    "main",
]

SWEEP_OUTPUTS = ("energies", "bogoliubov_elements", "squeezing_params", "entanglement")
OUTPUTS = ("phase_diagram",) + SWEEP_OUTPUTS
MAX_COUNT = 100_000
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

_PARAM_KEYS = ("j1", "kz", "kx", "d", "spin")
_KNOWN_KEYS = set(_PARAM_KEYS) | {
    "lattice", "l_min", "l_max", "l_count", "l_spacing", "l_values",
    "d_grid", "outputs", "out_dir", "rel_tol",
}


class Status:
    OK = "Ok"
    GAPLESS = "Gapless"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class SweepConfig:
    """Validated description of one run.  ``params.separation`` is ignored."""

    params: ModelParams = field(default_factory=ModelParams)
    l_grid: Optional[tuple[float, ...]] = None
    d_grid: Optional[tuple[float, ...]] = None
    outputs: frozenset = frozenset(SWEEP_OUTPUTS)
    out_dir: Path = Path("out")
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.l_grid is None:
            object.__setattr__(self, "l_grid", default_l_grid(self.params.lattice))
        object.__setattr__(self, "l_grid", _check_grid(self.l_grid, "l_grid"))
        if self.d_grid is not None:
            object.__setattr__(self, "d_grid", _check_grid(self.d_grid, "d_grid", allow_zero=True))
        unknown = set(self.outputs) - set(OUTPUTS)
        if unknown:
            raise ConfigError(f"unknown outputs {sorted(unknown)}; choose from {OUTPUTS}")
        if not self.outputs:
            raise ConfigError("no outputs requested")
        if "phase_diagram" in self.outputs and self.d_grid is None:
            raise ConfigError("phase_diagram output needs d_grid")
        if not (0 < self.rel_tol <= 1e-2):
            raise ConfigError(f"rel_tol must lie in (0, 1e-2] (got {self.rel_tol})")
        try:
            validate(self.params.with_separation(self.l_grid[0]))
        except DomainError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class SweepRecord:
    l: float
    phase: Optional[Phase]
    eps_alpha: float = math.nan
    eps_beta: float = math.nan
    eps_tilde: float = math.nan
    u1: float = math.nan
    u2: float = math.nan
    u3: float = math.nan
    u4: float = math.nan
    v1: float = math.nan
    v2: float = math.nan
    v3: float = math.nan
    v4: float = math.nan
    theta1: float = math.nan
    theta2: float = math.nan
    theta3: float = math.nan
    theta4: float = math.nan
    theta_sq: float = math.nan
    eta_minus: float = math.nan
    e_n: float = math.nan
    status: str = Status.OK

    @property
    def eps_alpha_norm(self) -> float:
        return self.eps_alpha / self.eps_tilde

    @property
    def eps_beta_norm(self) -> float:
        return self.eps_beta / self.eps_tilde


_RECORD_FIELDS = [f.name for f in fields(SweepRecord)]


def _pick(*names):
    # keep SweepRecord order for the selected columns
    return ["l", "phase"] + [n for n in _RECORD_FIELDS if n in names] + ["status"]


OUTPUT_COLUMNS = {
    "energies": _pick("eps_alpha", "eps_beta", "eps_tilde")[:-1] + ["eps_alpha_norm", "eps_beta_norm", "status"],
    "bogoliubov_elements": _pick(*(f"u{k}" for k in range(1, 5)), *(f"v{k}" for k in range(1, 5))),
    "squeezing_params": _pick("theta1", "theta2", "theta3", "theta4", "theta_sq"),
    "entanglement": _pick("eta_minus", "e_n"),
}
PHASE_DIAGRAM_COLUMNS = ["d_over_kz", "d", "l_star", "trajectory"]


def _check_grid(values, name, allow_zero=False) -> tuple[float, ...]:
    try:
        arr = np.asarray(values, dtype=float).ravel()
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a list of numbers") from None
    if arr.size == 0:
        raise ConfigError(f"{name} is empty")
    if arr.size > MAX_COUNT:
        raise ConfigError(f"{name} has {arr.size} points (max {MAX_COUNT})")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} contains non-finite values")
    if np.any(np.diff(arr) <= 0):
        raise ConfigError(f"{name} must be strictly increasing")
    if arr[0] < 0 or (arr[0] == 0 and not allow_zero):
        raise ConfigError(f"{name} values must be positive")
    return tuple(float(x) for x in arr)


def default_l_grid(lattice: LatticeSpec) -> tuple[float, ...]:
    """201 log-spaced separations, up to 5 (infinite) or 600 (finite lattices)."""
    hi = 600.0 if lattice.is_finite else 5.0
    return tuple(float(x) for x in np.geomspace(0.05, hi, 201))


def _make_grid(lo, hi, count, spacing) -> tuple[float, ...]:
    try:
        lo, hi, count = float(lo), float(hi), int(count)
    except (TypeError, ValueError):
        raise ConfigError("l_min, l_max and l_count must be numbers") from None
    if count < 1 or count > MAX_COUNT:
        raise ConfigError(f"l_count must lie in [1, {MAX_COUNT}] (got {count})")
    if not (0 < lo <= hi):
        raise ConfigError(f"need 0 < l_min <= l_max (got {lo}, {hi})")
    if count == 1:
        return (lo,)
    if spacing == "log":
        grid = np.geomspace(lo, hi, count)
    elif spacing == "linear":
        grid = np.linspace(lo, hi, count)
    else:
        raise ConfigError(f"l_spacing must be 'log' or 'linear' (got {spacing!r})")
    return tuple(float(x) for x in grid)


def load_config(path: Optional[os.PathLike] = None, **overrides) -> SweepConfig:
    """Build a :class:`SweepConfig` from a TOML file plus keyword overrides.

    Overrides use the same key names as the file; ``None`` values are ignored.

    Raises
    ------
    ConfigError
        For unreadable files, unknown keys or invalid values.
    """
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {path}: {exc}") from None
    raw.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")

    try:
        lattice = LatticeSpec.parse(raw.get("lattice", "infinite"))
        kwargs = {k: float(raw[k]) for k in _PARAM_KEYS if k in raw}
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    params = replace(ModelParams(), lattice=lattice, **kwargs)

    range_keys = {"l_min", "l_max", "l_count", "l_spacing"} & set(raw)
    if "l_values" in raw and range_keys:
        raise ConfigError("give either l_values or l_min/l_max/l_count, not both")
    if "l_values" in raw:
        l_grid = raw["l_values"]
    elif range_keys:
        default = default_l_grid(lattice)
        l_grid = _make_grid(
            raw.get("l_min", default[0]),
            raw.get("l_max", default[-1]),
            raw.get("l_count", len(default)),
            raw.get("l_spacing", "log"),
        )
    else:
        l_grid = None

    outputs = raw.get("outputs")
    if outputs is None:
        outputs = SWEEP_OUTPUTS + (("phase_diagram",) if "d_grid" in raw else ())
    elif isinstance(outputs, str):
        outputs = [s.strip() for s in outputs.split(",") if s.strip()]

    try:
        rel_tol = float(raw.get("rel_tol", 1e-10))
    except (TypeError, ValueError):
        raise ConfigError("rel_tol must be a number") from None
    return SweepConfig(
        params=params,
        l_grid=None if l_grid is None else tuple(l_grid),
        d_grid=tuple(raw["d_grid"]) if "d_grid" in raw else None,
        outputs=frozenset(outputs),
        out_dir=Path(raw.get("out_dir", "out")),
        rel_tol=rel_tol,
    )


def compute_point(params: ModelParams, l: float, rel_tol: float = 1e-10) -> SweepRecord:
    """Chain phase, k = 0 block, Bogoliubov matrix, squeezing and entanglement at ``l``.

    Gapless and unstable points are flagged, never fabricated: fields that
    cannot be computed stay NaN.
    """
    q = params.with_separation(l)
    eps_tilde = eigenenergies(isolated_block(q, rel_tol))[0]
    try:
        phase = determine_phase(q, rel_tol=rel_tol)
    except BoundaryError:
        phase = None
    block = bdg_block(q, phase or Phase.OOP_FM, rel_tol=rel_tol)
    try:
        ea, eb = eigenenergies(block)
    except InstabilityError:
        return SweepRecord(l=l, phase=phase, eps_tilde=eps_tilde, status=Status.UNSTABLE)
    base = dict(l=l, phase=phase, eps_alpha=ea, eps_beta=eb, eps_tilde=eps_tilde)
    try:
        decomp = analytic_bogoliubov(block)
    except GaplessError:
        return SweepRecord(**base, status=Status.GAPLESS)
    sq = extract(decomp)
    eta = eta_minus_analytic(sq)
    return SweepRecord(
        **base,
        **decomp.elements(),
        theta1=sq.theta1,
        theta2=sq.theta2,
        theta3=sq.theta3,
        theta4=sq.theta4,
        theta_sq=sq.theta_sq,
        eta_minus=eta,
        e_n=log_negativity(eta),
        status=Status.OK,
    )


def _workers() -> int:
    env = os.environ.get("MAGNON_THREADS")
    if env is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"MAGNON_THREADS must be a positive integer (got {env!r})") from None
    if n < 1:
        raise ConfigError(f"MAGNON_THREADS must be a positive integer (got {env!r})")
    return n


def format_value(x) -> str:
    """CSV token: floats with 17 significant digits, NaN as ``nan``."""
    if isinstance(x, Phase):
        return x.value
    if x is None:
        return "boundary"
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(v) for v in row])
    return path


def _record_row(rec: SweepRecord, columns):
    return [getattr(rec, c) for c in columns]


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    """Evaluate every separation of ``config.l_grid`` and write the sweep CSVs.

    Rows come out in grid order whatever order the workers finish in.
    """
    params = config.params

    def task(l):
        return compute_point(params, l, config.rel_tol)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        records = list(pool.map(task, config.l_grid))
    for name in SWEEP_OUTPUTS:
        if name in config.outputs:
            cols = OUTPUT_COLUMNS[name]
            write_csv(config.out_dir / f"{name}.csv", cols, [_record_row(r, cols) for r in records])
    return records


def run_phase_diagram(config: SweepConfig) -> list[tuple]:
    """Critical separation for each ``D/Kz`` in ``config.d_grid``.

    ``l_star`` is ``None`` (written ``none``) when no phase change lies in the
    search bracket, e.g. for ``D = 0``.  ``trajectory`` marks the row whose
    ``D/Kz`` equals that of ``config.params``.
    """
    if config.d_grid is None:
        raise ConfigError("phase diagram needs d_grid")
    p = config.params
    ratio0 = p.d / p.kz

    def task(r):
        q = replace(p, d=r * p.kz)
        try:
            ls = phase_boundary_distance(q, rel_tol=config.rel_tol)
        except NoBoundaryError:
            ls = None
        return r, r * p.kz, ls, math.isclose(r, ratio0, rel_tol=1e-12)

    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rows = list(pool.map(task, config.d_grid))
    out = [(r, d, "none" if ls is None else ls, traj) for r, d, ls, traj in rows]
    write_csv(config.out_dir / "phase_diagram.csv", PHASE_DIAGRAM_COLUMNS, out)
    return rows


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dipmag",
        description="Sweep the layer separation and write k = 0 magnon data as CSV.",
    )
    ap.add_argument("--config", type=Path, help="TOML file with run settings")
    ap.add_argument("--out-dir", dest="out_dir", help="directory for the CSV files")
    ap.add_argument("--lattice", help="'infinite', 'N', 'NxN' or 'open:N'")
    ap.add_argument("--l-min", dest="l_min", type=float)
    ap.add_argument("--l-max", dest="l_max", type=float)
    ap.add_argument("--l-count", dest="l_count", type=int)
    ap.add_argument("--tol", dest="rel_tol", type=float, help="relative tolerance of the lattice sums")
    ap.add_argument("--outputs", help="comma-separated subset of " + ",".join(OUTPUTS))
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    overrides = {k: v for k, v in vars(args).items() if k != "config"}
    try:
        config = load_config(args.config, **overrides)
        if "phase_diagram" in config.outputs:
            run_phase_diagram(config)
        if set(SWEEP_OUTPUTS) & config.outputs:
            records = run_sweep(config)
            bad = sum(r.status != Status.OK for r in records)
            print(f"{len(records)} points, {bad} flagged, written to {config.out_dir}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DipmagError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
