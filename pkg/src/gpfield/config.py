"""Run configuration: INI sections parsed into validated dataclasses.

Required keys: ``grid.dim``, ``grid.N``, ``grid.L``, ``background.type``,
``background.rho0``, ``nonlinearity.kind``, ``solver.dt``, ``solver.T``.
Everything else has a default, listed on the dataclasses below.
"""
from __future__ import annotations

import configparser
import dataclasses
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .spectral import is_admissible


class ConfigError(ValueError):
    """Parse or validation failure; ``problems`` holds ``(section.key, message)`` pairs."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{where}: {msg}" for where, msg in self.problems))


@dataclass
class RunSection:
    seed: int = 0


@dataclass
class GridSection:
    dim: int
    N: int
    L: float


@dataclass
class BackgroundSection:
    type: str
    rho0: float
    amplitude: float = 0.0
    width: float = 1.0
    separation: Optional[float] = None


@dataclass
class NonlinearitySection:
    kind: str
    a: Optional[float] = None
    coefficients: Optional[list] = None
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    r_max: float = 1e4
    samples: int = 400


@dataclass
class InitialSection:
    type: str = "zero"
    h1_norm: float = 0.1
    width: float = 2.0
    spectrum: str = "sobolev-decay"


@dataclass
class SolverSection:
    dt: float
    T: float
    scheme: str = "strang"
    picard_max_iter: int = 50
    picard_tol: float = 1e-11
    snapshot_stride: int = 1


@dataclass
class NormsSection:
    p: Optional[float] = None
    q: Optional[float] = None


@dataclass
class StrichartzSection:
    T: float = 1.0
    steps: int = 20
    num_fields: int = 100
    spectrum: str = "flat"


@dataclass
class ConvergenceSection:
    dt_list: list = field(default_factory=lambda: [0.004, 0.002, 0.001])
    order_min: float = 1.8
    order_max: float = 2.2


@dataclass
class DecomposeSection:
    cases: int = 100
    tol: float = 1e-12
    cutoff_scale: float = 1.0
    perturbation_h1: float = 0.5


@dataclass
class OutputSection:
    directory: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "snapshots", "json"])


@dataclass
class RunConfig:
    grid: GridSection
    background: BackgroundSection
    nonlinearity: NonlinearitySection
    solver: SolverSection
    run: RunSection = field(default_factory=RunSection)
    initial: InitialSection = field(default_factory=InitialSection)
    norms: NormsSection = field(default_factory=NormsSection)
    strichartz: StrichartzSection = field(default_factory=StrichartzSection)
    convergence: ConvergenceSection = field(default_factory=ConvergenceSection)
    decompose: DecomposeSection = field(default_factory=DecomposeSection)
    output: OutputSection = field(default_factory=OutputSection)

    @property
    def seed(self) -> int:
        return self.run.seed

    def to_ini(self) -> str:
        return serialize_config(self)


SECTIONS = {
    "run": RunSection,
    "grid": GridSection,
    "background": BackgroundSection,
    "nonlinearity": NonlinearitySection,
    "initial": InitialSection,
    "solver": SolverSection,
    "norms": NormsSection,
    "strichartz": StrichartzSection,
    "convergence": ConvergenceSection,
    "decompose": DecomposeSection,
    "output": OutputSection,
}
REQUIRED_SECTIONS = ("grid", "background", "nonlinearity", "solver")

BACKGROUND_TYPES = ("constant", "kink-pair", "bump-modulated")
INITIAL_TYPES = ("zero", "gaussian", "random")
NONLINEARITY_KINDS = ("gross-pitaevskii", "cubic-quintic", "user-polynomial")
FORMATS = ("csv", "snapshots", "json")

_LIST_FLOAT = {("nonlinearity", "coefficients"), ("convergence", "dt_list")}
_LIST_STR = {("output", "formats")}


def _convert(section: str, key: str, raw: str, ftype):
    raw = raw.strip()
    if (section, key) in _LIST_FLOAT:
        return [float(x) for x in raw.replace(",", " ").split()]
    if (section, key) in _LIST_STR:
        return [x.strip() for x in raw.split(",") if x.strip()]
    base = ftype.replace("Optional[", "").rstrip("]")
    if raw.lower() in ("", "none") and ftype.startswith("Optional"):
        return None
    if base == "int":
        return int(raw)
    if base == "float":
        return float(raw)
    return raw


def _parse_sections(cp: configparser.ConfigParser) -> RunConfig:
    problems = []
    built = {}
    for name in cp.sections():
        if name not in SECTIONS:
            problems.append((name, "unknown section"))
    for name, cls in SECTIONS.items():
        fields = {f.name: f for f in dataclasses.fields(cls)}
        if not cp.has_section(name):
            if name in REQUIRED_SECTIONS:
                problems.append((name, "missing section"))
            else:
                built[name] = cls()
            continue
        kwargs = {}
        for key, raw in cp.items(name):
            if key not in fields:
                problems.append((f"{name}.{key}", "unknown key"))
                continue
            try:
                kwargs[key] = _convert(name, key, raw, str(fields[key].type))
            except ValueError as exc:
                problems.append((f"{name}.{key}", f"cannot parse {raw!r}: {exc}"))
        missing = [k for k, f in fields.items()
                   if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING
                   and k not in kwargs]
        for k in missing:
            problems.append((f"{name}.{k}", "missing key"))
        if not missing:
            built[name] = cls(**kwargs)
    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(**built)
    validate_config(cfg)
    return cfg


def _new_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str  # keys are case sensitive (N, T, L)
    return cp


def parse_config_string(text: str) -> RunConfig:
    cp = _new_parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([("file", str(exc))]) from None
    return _parse_sections(cp)


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([("file", f"cannot read {path}: {exc.strerror}")]) from None
    return parse_config_string(text)


def validate_config(cfg: RunConfig) -> None:
    problems = []
    g = cfg.grid
    if g.dim not in (1, 2, 3):
        problems.append(("grid.dim", f"simulation dimensions are 1, 2, 3; got {g.dim}"))
    if g.N < 2 or g.N % 2:
        problems.append(("grid.N", f"must be a positive even integer, got {g.N}"))
    if not g.L > 0:
        problems.append(("grid.L", "must be positive"))

    b = cfg.background
    if b.type not in BACKGROUND_TYPES:
        problems.append(("background.type", f"expected one of {BACKGROUND_TYPES}"))
    if not b.rho0 > 0:
        problems.append(("background.rho0", "must be positive"))
    if b.type == "kink-pair":
        if g.dim != 1:
            problems.append(("background.type", "kink-pair needs grid.dim = 1"))
        if b.separation is None:
            problems.append(("background.separation", "missing key"))
    if b.type == "bump-modulated" and not 0 < b.width < g.L / 4:
        problems.append(("background.width", "must lie in (0, L/4)"))

    n = cfg.nonlinearity
    if n.kind not in NONLINEARITY_KINDS:
        problems.append(("nonlinearity.kind", f"expected one of {NONLINEARITY_KINDS}"))
    if n.kind == "cubic-quintic" and (n.a is None or not 0 < n.a < b.rho0):
        problems.append(("nonlinearity.a", "cubic-quintic needs 0 < a < rho0"))
    if n.kind == "user-polynomial" and not n.coefficients:
        problems.append(("nonlinearity.coefficients", "missing key"))
    if n.alpha1 is not None and n.alpha1 < 1:
        problems.append(("nonlinearity.alpha1", "must be >= 1"))
    if n.alpha1 is not None and n.alpha2 is not None and n.alpha1 - n.alpha2 > 0.5:
        problems.append(("nonlinearity.alpha2", "need alpha1 - alpha2 <= 1/2"))

    i = cfg.initial
    if i.type not in INITIAL_TYPES:
        problems.append(("initial.type", f"expected one of {INITIAL_TYPES}"))

    s = cfg.solver
    if s.scheme not in ("strang", "picard"):
        problems.append(("solver.scheme", "expected strang or picard"))
    if not s.dt > 0:
        problems.append(("solver.dt", "must be positive"))
    elif not s.T > 0:
        problems.append(("solver.T", "must be positive"))
    else:
        ratio = s.T / s.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            problems.append(("solver.T", "T/dt not integral"))
    if s.snapshot_stride < 1:
        problems.append(("solver.snapshot_stride", "must be >= 1"))

    nm = cfg.norms
    if (nm.p is None) != (nm.q is None):
        problems.append(("norms", "declare both p and q or neither"))
    elif nm.p is not None and not is_admissible(nm.p, nm.q, g.dim):
        problems.append(("norms.p", f"({nm.p}, {nm.q}) is not admissible for n={g.dim}"))

    c = cfg.convergence
    if len(c.dt_list) < 3:
        problems.append(("convergence.dt_list", "need at least three entries"))

    for fmt in cfg.output.formats:
        if fmt not in FORMATS:
            problems.append(("output.formats", f"unknown format {fmt!r}"))
    if problems:
        raise ConfigError(problems)


def _render(v) -> str:
    if isinstance(v, list):
        return ", ".join(repr(x) if isinstance(x, float) else str(x) for x in v)
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def serialize_config(cfg: RunConfig) -> str:
    cp = _new_parser()
    for name in SECTIONS:
        section = getattr(cfg, name)
        cp.add_section(name)
        for f in dataclasses.fields(section):
            v = getattr(section, f.name)
            if v is not None:
                cp.set(name, f.name, _render(v))
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()
