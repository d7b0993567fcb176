"""Time integrators for ``i w_t + Delta w = F(w)``.

``evolve`` runs a Strang split-step scheme on the full state ``u = phi + w``;
``picard_solve`` iterates the Duhamel map on a fixed time grid.  The two share
no stepping code and are used to cross-check each other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .background import Background
from .conservation import renormalized_mass, xt_norm
from .decomposition import forcing
from .nonlinearity import Nonlinearity, check_Hf
from .propagator import duhamel_cumulative
from .spectral import Field, admissible_pair_for, fft, ifft, lp_norm

log = logging.getLogger(__name__)


class BlowUpError(FloatingPointError):
    def __init__(self, step: int):
        super().__init__(f"non-finite values produced at step {step}")
        self.step = step


class NonContractionError(RuntimeError):
    pass


class ConvergenceDiagnosticsError(RuntimeError):
    pass


def _step_count(T: float, dt: float) -> int:
    n = T / dt
    steps = int(round(n))
    if steps < 1 or abs(n - steps) > 1e-9 * max(1.0, n):
        raise ValueError(f"T/dt not integral (T={T}, dt={dt})")
    return steps


@dataclass
class SolverConfig:
    dt: float
    T: float
    scheme: str = "strang"
    picard_max_iter: int = 50
    picard_tol: float = 1e-11
    snapshot_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0 or not self.T > 0:
            raise ValueError("dt and T must be positive")
        if self.scheme not in ("strang", "picard"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        _step_count(self.T, self.dt)

    @property
    def steps(self) -> int:
        return _step_count(self.T, self.dt)


@dataclass
class Trajectory:
    times: list
    w_fields: list
    energy_series: np.ndarray
    mass_series: np.ndarray
    dt: float
    snapshot_steps: list
    xt_norm: float = math.nan
    h1_series: Optional[np.ndarray] = None
    picard_history: Optional[list] = None
    iterations: int = 0

    @property
    def final(self) -> Field:
        return self.w_fields[-1]


def _energy_from_hat(u_hat: np.ndarray, u: np.ndarray, grid, nl: Nonlinearity) -> float:
    # Fourier-side gradient term; drift_report recomputes it in physical space
    kinetic = np.sum(grid.ksq_deriv * (u_hat.real**2 + u_hat.imag**2)) / grid.N**grid.dim
    potential = np.sum(nl.eval_V(u.real**2 + u.imag**2))
    return float((kinetic + potential) * grid.cell_volume)


def _h1_from_hat(w_hat: np.ndarray, grid) -> float:
    weight = 1.0 + grid.ksq_deriv
    return math.sqrt(float(np.sum(weight * (w_hat.real**2 + w_hat.imag**2)))
                     * grid.cell_volume / grid.N**grid.dim)


def _nonlinear_flow(u: np.ndarray, nl: Nonlinearity, h: float) -> np.ndarray:
    """Exact flow of ``i u_t + f(|u|^2) u = 0`` over time h (a pointwise phase)."""
    return u * np.exp(1j * h * nl.eval_f(u.real**2 + u.imag**2))


def strang_step(u: Field, bg: Background, nl: Nonlinearity, dt: float) -> Field:
    """One Strang step ``N(dt/2) L(dt) N(dt/2)`` on the full state u.

    A negative dt runs the step backwards (both sub-flows are reversible).
    """
    g = u.grid
    v = _nonlinear_flow(u.values, nl, dt / 2)
    v = ifft(np.exp(-1j * g.ksq * dt) * fft(v))
    v = _nonlinear_flow(v, nl, dt / 2)
    if not np.all(np.isfinite(v)):
        raise BlowUpError(1)
    return Field(g, v)


def _run_strang(u0: np.ndarray, bg: Background, nl: Nonlinearity, dt: float, steps: int, stride: int):
    g = bg.grid
    lin = np.exp(-1j * g.ksq * dt)
    half = dt / 2
    u = u0.copy()
    phi_hat = fft(bg.phi.values)
    energies = np.empty(steps + 1)
    masses = np.empty(steps + 1)
    h1 = np.empty(steps + 1)
    u_hat = fft(u)
    energies[0] = _energy_from_hat(u_hat, u, g, nl)
    masses[0] = renormalized_mass(Field(g, u), bg.rho0)
    h1[0] = _h1_from_hat(u_hat - phi_hat, g)
    snaps = [(0, None)]
    for n in range(1, steps + 1):
        u = _nonlinear_flow(u, nl, half)
        u = ifft(lin * fft(u))
        u = _nonlinear_flow(u, nl, half)
        if not np.all(np.isfinite(u)):
            raise BlowUpError(n)
        u_hat = fft(u)
        energies[n] = _energy_from_hat(u_hat, u, g, nl)
        masses[n] = float(np.sum(u.real**2 + u.imag**2 - bg.rho0) * g.cell_volume)
        h1[n] = _h1_from_hat(u_hat - phi_hat, g)
        if n % stride == 0 or n == steps:
            snaps.append((n, u.copy()))
    return energies, masses, h1, snaps


def evolve(w0: Field, bg: Background, nl: Nonlinearity, cfg: SolverConfig,
           require_hf: bool = True) -> Trajectory:
    """Strang integration of the perturbation w; returns the trajectory of ``w = u - phi``."""
    if cfg.scheme != "strang":
        raise ValueError("evolve runs the strang scheme; use picard_solve for picard")
    if w0.grid != bg.grid:
        raise ValueError("w0 and background live on different grids")
    if require_hf and not check_Hf(nl).passed:
        raise ValueError("nonlinearity fails (H_f): not defocusing at rho0")
    steps = cfg.steps
    energies, masses, h1, snaps = _run_strang(bg.phi.values + w0.values, bg, nl, cfg.dt, steps,
                                          cfg.snapshot_stride)
    g = bg.grid
    fields = [w0.copy()] + [Field(g, u - bg.phi.values) for _, u in snaps[1:]]
    steps_idx = [n for n, _ in snaps]
    traj = Trajectory(
        times=[n * cfg.dt for n in steps_idx],
        w_fields=fields,
        energy_series=energies,
        mass_series=masses,
        dt=cfg.dt,
        snapshot_steps=steps_idx,
        h1_series=h1,
    )
    if g.dim in (1, 2, 3):
        traj.xt_norm = xt_norm(traj, admissible_pair_for(g.dim))
    return traj


def _h1_sq_from_hat(d_hat: np.ndarray, grid) -> np.ndarray:
    """Per-time H^1 norms squared of stacked Fourier coefficients."""
    axes = tuple(range(1, d_hat.ndim))
    weight = 1.0 + grid.ksq_deriv
    return np.sum(weight * np.abs(d_hat) ** 2, axis=axes) * grid.cell_volume / grid.N**grid.dim


def picard_map(w_hats: np.ndarray, w0: Field, bg: Background, nl: Nonlinearity, dt: float) -> np.ndarray:
    """Apply the Duhamel map to a trajectory given by its Fourier coefficients.

    ``w_hats[j]`` holds ``fft(w(j*dt))``; the result is ``Phi(w)`` sampled on
    the same grid, with the time integral done by the trapezoid rule.
    """
    g = bg.grid
    M = w_hats.shape[0]
    F_hats = np.empty_like(w_hats)
    for j in range(M):
        F_hats[j] = fft(forcing(Field(g, ifft(w_hats[j])), bg, nl).values)
    free = _free_part(w0, M, dt)
    return free + duhamel_cumulative(F_hats, g, dt)


def _free_part(w0: Field, M: int, dt: float) -> np.ndarray:
    g = w0.grid
    w0_hat = fft(w0.values)
    return np.stack([np.exp(-1j * g.ksq * (j * dt)) * w0_hat for j in range(M)])


def picard_solve(w0: Field, bg: Background, nl: Nonlinearity, cfg: SolverConfig) -> Trajectory:
    """Fixed-point iteration of the Duhamel map on the whole time grid.

    Starts from the free evolution of w0 and stops once successive iterates
    differ by at most ``picard_tol`` in ``max_j ||.||_{H^1}``.  Raises
    :class:`NonContractionError` after three consecutive non-decreasing
    differences or when ``picard_max_iter`` is exhausted.
    """
    if cfg.scheme != "picard":
        raise ValueError("picard_solve needs scheme='picard'")
    if w0.grid != bg.grid:
        raise ValueError("w0 and background live on different grids")
    g = bg.grid
    steps = cfg.steps
    M = steps + 1
    current = _free_part(w0, M, cfg.dt)
    diffs: list[float] = []
    factors: list[float] = []
    rising = 0
    converged = False
    for it in range(1, cfg.picard_max_iter + 1):
        nxt = picard_map(current, w0, bg, nl, cfg.dt)
        diff = float(np.sqrt(np.max(_h1_sq_from_hat(nxt - current, g))))
        current = nxt
        if diffs:
            factors.append(diff / diffs[-1] if diffs[-1] > 0 else 0.0)
            rising = rising + 1 if factors[-1] >= 1 else 0
        diffs.append(diff)
        log.debug("picard iteration %d: diff %.3e", it, diff)
        if diff <= cfg.picard_tol:
            converged = True
            break
        if rising >= 3:
            raise NonContractionError(
                f"Duhamel map not contracting after {it} iterations (factors {factors[-3:]}); "
                "try a smaller T")
    if not converged:
        raise NonContractionError(
            f"no convergence within {cfg.picard_max_iter} iterations (last diff {diffs[-1]:.3e}); "
            "try a smaller T")

    fields = [w0.copy()] + [Field(g, ifft(current[j])) for j in range(1, M)]
    energies = np.empty(M)
    masses = np.empty(M)
    h1 = np.empty(M)
    for j, w in enumerate(fields):
        u = bg.phi + w
        energies[j] = _energy_from_hat(fft(u.values), u.values, g, nl)
        masses[j] = renormalized_mass(u, bg.rho0)
        h1[j] = _h1_from_hat(fft(w.values), g)
    stride = cfg.snapshot_stride
    keep = [j for j in range(M) if j % stride == 0 or j == steps]
    traj = Trajectory(
        times=[j * cfg.dt for j in keep],
        w_fields=[fields[j] for j in keep],
        energy_series=energies,
        mass_series=masses,
        dt=cfg.dt,
        snapshot_steps=keep,
        h1_series=h1,
        picard_history=factors,
        iterations=len(diffs),
    )
    traj.xt_norm = xt_norm(traj, admissible_pair_for(g.dim))
    return traj


def picard_residual(traj: Trajectory, w0: Field, bg: Background, nl: Nonlinearity) -> float:
    """``max_j ||Phi(w)(t_j) - w(t_j)||_{H^1}`` for a trajectory stored at every step."""
    if traj.snapshot_steps != list(range(len(traj.snapshot_steps))):
        raise ValueError("trajectory must hold every time step")
    w_hats = np.stack([fft(w.values) for w in traj.w_fields])
    again = picard_map(w_hats, w0, bg, nl, traj.dt)
    return float(np.sqrt(np.max(_h1_sq_from_hat(again - w_hats, bg.grid))))


@dataclass
class ConvergenceResult:
    order: float
    dts: list
    errors: list
    exact: bool = False
    pairwise: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"order": "exact" if self.exact else self.order, "dts": self.dts,
                "errors": self.errors, "exact": self.exact, "pairwise_orders": self.pairwise}


EXACT_THRESHOLD = 1e-12


def convergence_order(w0: Field, bg: Background, nl: Nonlinearity, T: float,
                      dt_list: Sequence[float], require_hf: bool = True) -> ConvergenceResult:
    """Observed temporal order of the Strang scheme.

    The finest dt is the reference. For errors ``e_i = C (dt_i^p - dt_ref^p)``
    consecutive pairs give ``p`` by root finding; the mean is returned.
    """
    dts = [float(d) for d in dt_list]
    if len(dts) < 3:
        raise ValueError("need at least three time steps")
    if len(set(dts)) != len(dts) or any(b >= a for a, b in zip(dts, dts[1:])):
        raise ValueError("dt_list must be strictly decreasing without repeats")
    finals = []
    for dt in dts:
        steps = _step_count(T, dt)
        cfg = SolverConfig(dt=dt, T=T, snapshot_stride=steps)
        finals.append(evolve(w0, bg, nl, cfg, require_hf=require_hf).final)
    ref = finals[-1]
    errors = [lp_norm(f - ref, 2) for f in finals[:-1]]
    if max(errors) < EXACT_THRESHOLD:
        return ConvergenceResult(math.inf, dts, errors, exact=True)
    if any(b >= a for a, b in zip(errors, errors[1:])):
        raise ConvergenceDiagnosticsError(f"errors not decreasing with dt: {errors}; under-resolved?")
    d_ref = dts[-1]
    orders = []
    for i in range(len(errors) - 1):
        a, b = dts[i] / d_ref, dts[i + 1] / d_ref
        target = errors[i] / errors[i + 1]
        g = lambda p: math.log((a**p - 1) / (b**p - 1)) - math.log(target)  # noqa: E731
        lo, hi = 1e-3, 12.0
        if g(lo) > 0 or g(hi) < 0:
            raise ConvergenceDiagnosticsError(f"error ratio {target:.3g} admits no order in ({lo}, {hi})")
        orders.append(brentq(g, lo, hi, xtol=1e-12))
    return ConvergenceResult(float(np.mean(orders)), dts, errors, pairwise=orders)
