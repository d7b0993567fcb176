"""Defocusing nonlinearities f(r), their potential V and hypothesis certifiers.

Every nonlinearity is a polynomial in ``r = |u|^2``.  V is stored as a
polynomial in ``s = r - rho0`` so that ``V(rho0) == 0`` exactly and there is
no cancellation near the background intensity.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate

KINDS = ("gross-pitaevskii", "cubic-quintic", "user-polynomial")
HYPOTHESES = ("Hf", "Halpha1", "Halpha1prime", "Halpha2", "ff01")

# stability factor for grid certifications
GROWTH_FACTOR = 1.05


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    rho0: float
    coefficients: tuple[float, ...]
    kind: str = "user-polynomial"
    alpha1_hint: Optional[float] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.rho0 > 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        p = Polynomial(self.coefficients)
        shifted = p(Polynomial([self.rho0, 1.0]))
        object.__setattr__(self, "_f", p)
        object.__setattr__(self, "_f1", p.deriv(1))
        object.__setattr__(self, "_f2", p.deriv(2))
        object.__setattr__(self, "_f3", p.deriv(3))
        object.__setattr__(self, "_V_shifted", -shifted.integ())

    def eval_f(self, r):
        return self._f(r)

    def eval_fprime(self, r):
        return self._f1(r)

    def eval_fsecond(self, r):
        return self._f2(r)

    def eval_fthird(self, r):
        return self._f3(r)

    def derivative(self, k: int, r):
        return (self._f, self._f1, self._f2, self._f3)[k](r)

    def eval_V(self, r):
        """``V(r) = int_r^rho0 f(s) ds``."""
        return self._V_shifted(np.asarray(r) - self.rho0)

    def eval_V_quadrature(self, r: float) -> float:
        """Adaptive Gauss-Kronrod evaluation of V, independent of the closed form."""
        val, _ = integrate.quad(self._f, r, self.rho0, epsabs=1e-12, epsrel=1e-12, limit=200)
        return val

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "rho0": self.rho0, "coefficients": list(self.coefficients)}
        d.update(self.params)
        if self.alpha1_hint is not None:
            d["alpha1_hint"] = self.alpha1_hint
        return d


def make_gross_pitaevskii(rho0: float = 1.0) -> Nonlinearity:
    """``f(r) = rho0 - r``; V(r) = (rho0 - r)^2 / 2."""
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    return Nonlinearity(rho0, (rho0, -1.0), "gross-pitaevskii", alpha1_hint=2.0)


def make_cubic_quintic(rho0: float, a: float) -> Nonlinearity:
    """``f(r) = (r - rho0)(2a + rho0 - 3r)`` with ``0 < a < rho0``."""
    if not rho0 > 0:
        raise ValueError(f"rho0 must be positive, got {rho0}")
    if not 0 < a < rho0:
        raise ValueError(f"cubic-quintic needs 0 < a < rho0, got a={a}, rho0={rho0}")
    p = Polynomial([-rho0, 1.0]) * Polynomial([2 * a + rho0, -3.0])
    return Nonlinearity(rho0, tuple(p.coef), "cubic-quintic", alpha1_hint=3.0, params={"a": a})


def make_polynomial(rho0: float, coefficients: Sequence[float]) -> Nonlinearity:
    """User nonlinearity ``f(r) = sum c_k r^k`` (ascending coefficients)."""
    coefficients = tuple(float(c) for c in coefficients)
    if not coefficients:
        raise ValueError("coefficient list is empty")
    deg = len(np.trim_zeros(np.array(coefficients), "b")) - 1
    hint = float(max(deg + 1, 1)) if deg >= 1 else 1.0
    return Nonlinearity(rho0, coefficients, "user-polynomial", alpha1_hint=hint)


@dataclass
class HypothesisReport:
    hypothesis: str
    passed: bool
    fitted_C0: float
    alpha1: float
    alpha2: Optional[float] = None
    A: Optional[float] = None
    samples: int = 0
    max_violation: float = 0.0
    r_max: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, float) and not math.isfinite(v):
                d[k] = str(v)
        return d


def _log_grid(r_max: float, samples: int) -> np.ndarray:
    if not r_max > 1:
        raise ValueError(f"r_max must exceed 1, got {r_max}")
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    return np.logspace(0.0, math.log10(r_max), samples)


def _split_point(r_max: float) -> float:
    # start of the "top decade"; for short ranges fall back to the log-midpoint
    return r_max / 10 if r_max >= 100 else math.sqrt(r_max)


def _certify(r: np.ndarray, ratio: np.ndarray, r_max: float):
    """Fit the minimal constant and test that it is not still growing."""
    full = float(np.max(ratio))
    lower = ratio[r < _split_point(r_max)]
    lower_fit = float(np.max(lower)) if lower.size else 0.0
    if not math.isfinite(full):
        return full, math.inf, False
    excess = full - GROWTH_FACTOR * lower_fit
    return full, excess, excess <= 0


def check_Hf(nl: Nonlinearity, tol: float = 1e-12) -> HypothesisReport:
    if not tol > 0:
        raise ValueError("tol must be positive")
    f0 = float(nl.eval_f(nl.rho0))
    fp = float(nl.eval_fprime(nl.rho0))
    violation = max(abs(f0) - tol * (1 + abs(fp)), fp)
    passed = abs(f0) <= tol * (1 + abs(fp)) and fp < 0
    return HypothesisReport("Hf", passed, abs(fp), float(nl.alpha1_hint or math.nan),
                            samples=1, max_violation=violation)


def _derivative_ratios(nl, r, alpha1, ks, exponent):
    return np.max([np.abs(nl.derivative(k, r)) * r ** exponent(k) for k in ks], axis=0)


def check_Halpha1prime(nl: Nonlinearity, alpha1: float, r_max: float = 1e4,
                       samples: int = 400) -> HypothesisReport:
    """Certify ``|f^(k)(r)| <= C0 r^(alpha1-1-k)`` for k=1,2 on a log grid over [1, r_max]."""
    if alpha1 < 1:
        raise ValueError(f"alpha1 must be >= 1, got {alpha1}")
    r = _log_grid(r_max, samples)
    ratio = _derivative_ratios(nl, r, alpha1, (1, 2), lambda k: k + 1 - alpha1)
    c0, excess, passed = _certify(r, ratio, r_max)
    return HypothesisReport("Halpha1prime", passed, c0, alpha1, samples=samples,
                            max_violation=excess, r_max=r_max)


def check_Halpha1(nl: Nonlinearity, alpha1: float, n: int = 3, r_max: float = 1e4,
                  samples: int = 400) -> HypothesisReport:
    """Higher-derivative bound: ``|f''| <= C0 r^(alpha1-3)`` (n<=3) or ``|f'''| <= C0 r^(alpha1-4)`` (n=4)."""
    if alpha1 < 1:
        raise ValueError(f"alpha1 must be >= 1, got {alpha1}")
    k = 3 if n == 4 else 2
    r = _log_grid(r_max, samples)
    ratio = _derivative_ratios(nl, r, alpha1, (k,), lambda k: k + 1 - alpha1)
    c0, excess, passed = _certify(r, ratio, r_max)
    return HypothesisReport("Halpha1", passed, c0, alpha1, samples=samples,
                            max_violation=excess, r_max=r_max)


def _ff01_grid(r_max: float, samples: int) -> np.ndarray:
    low = np.linspace(0.0, 1.0, samples // 2, endpoint=False)
    return np.concatenate([low, _log_grid(r_max, samples - low.size)])


def _ff01_ratio(nl, r, alpha1):
    parts = []
    for k in (1, 2):
        e = max(0.0, alpha1 - (2 * k + 1) / 2)
        parts.append(np.sqrt(r) * np.abs(nl.derivative(k, r)) / (1 + r**e))
    return np.max(parts, axis=0)


def check_ff01(nl: Nonlinearity, alpha1: float, samples: int = 400,
               r_max: float = 1e4) -> HypothesisReport:
    """Certify ``r^(1/2)|f^(k)(r)| <= C (1 + r^max(0, alpha1-(2k+1)/2))`` on [0, r_max]."""
    if alpha1 < 1:
        raise ValueError(f"alpha1 must be >= 1, got {alpha1}")
    r = _ff01_grid(r_max, samples)
    ratio = _ff01_ratio(nl, r, alpha1)
    c0, excess, passed = _certify(r, ratio, r_max)
    return HypothesisReport("ff01", passed, c0, alpha1, samples=samples,
                            max_violation=excess, r_max=r_max)


def check_Halpha2(nl: Nonlinearity, alpha1: float, alpha2: float, r_max: float = 1e4,
                  samples: int = 400) -> HypothesisReport:
    """Certify the lower bound on V.

    For ``alpha1 <= 3/2`` this reports the infimum of V over [0, r_max].
    Otherwise it fits ``C0`` from the top decade (with the usual 1.05 margin)
    and the smallest grid threshold ``A > rho0`` above which
    ``r^alpha2 <= C0 V(r)`` holds at every grid point.
    """
    if alpha1 - alpha2 > 0.5:
        raise ValueError(f"need alpha1 - alpha2 <= 1/2, got {alpha1} - {alpha2}")
    if alpha1 <= 1.5:
        r = np.concatenate([np.linspace(0.0, 1.0, samples // 2, endpoint=False),
                            _log_grid(r_max, samples - samples // 2)])
        V = nl.eval_V(r)
        vmin = float(np.min(V))
        lower = V[r < _split_point(r_max)]
        lower_min = float(np.min(lower))
        excess = (lower_min - 0.05 * max(1.0, abs(lower_min))) - vmin
        passed = math.isfinite(vmin) and excess <= 0
        return HypothesisReport("Halpha2", passed, max(0.0, -vmin), alpha1, alpha2,
                                samples=samples, max_violation=excess, r_max=r_max)

    r = _log_grid(r_max, samples)
    r = r[r > nl.rho0]
    V = nl.eval_V(r)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(V > 0, r**alpha2 / V, np.inf)
    split = _split_point(r_max)
    top = ratio[r >= split]
    prev = ratio[(r >= split / 10) & (r < split)]
    top_max = float(np.max(top))
    growing = prev.size == 0 or top_max > GROWTH_FACTOR * float(np.max(prev))
    c0 = GROWTH_FACTOR * top_max
    ok = ratio <= c0
    # smallest A such that every grid point r >= A satisfies the bound
    bad = np.nonzero(~ok)[0]
    first = 0 if bad.size == 0 else bad[-1] + 1
    A = float(r[first]) if first < r.size else math.inf
    passed = math.isfinite(c0) and not growing and A <= split
    with np.errstate(invalid="ignore"):
        excess = float(np.max(ratio[first:] - c0)) if first < r.size else math.inf
    if math.isnan(excess):  # V <= 0 on the whole tail
        excess = math.inf
    if growing:
        excess = max(excess, top_max - GROWTH_FACTOR * float(np.max(prev)) if prev.size else math.inf)
    return HypothesisReport("Halpha2", passed, c0, alpha1, alpha2, A=A, samples=samples,
                            max_violation=excess, r_max=r_max)


def rescan_violation(nl: Nonlinearity, report: HypothesisReport) -> float:
    """Re-evaluate a report's grid against its own constant; ``<= 0`` means certified."""
    h = report.hypothesis
    if h == "Halpha1prime":
        r = _log_grid(report.r_max, report.samples)
        ratio = _derivative_ratios(nl, r, report.alpha1, (1, 2), lambda k: k + 1 - report.alpha1)
    elif h == "ff01":
        r = _ff01_grid(report.r_max, report.samples)
        ratio = _ff01_ratio(nl, r, report.alpha1)
    elif h == "Halpha2" and report.A is not None:
        r = _log_grid(report.r_max, report.samples)
        r = r[(r > nl.rho0) & (r >= report.A)]
        ratio = r**report.alpha2 / nl.eval_V(r)
    else:
        raise ValueError(f"no grid rescan defined for {h}")
    return float(np.max(ratio - report.fitted_C0))


def max_admissible_dimension(alpha1: float) -> set[int]:
    """Dimensions n in {2,3,4} where ``alpha1 < alpha1*`` (3 for n=3, 2 for n=4) holds."""
    if alpha1 < 1:
        raise ValueError(f"alpha1 must be >= 1, got {alpha1}")
    dims = {2}
    if alpha1 < 3:
        dims.add(3)
    if alpha1 < 2:
        dims.add(4)
    return dims
