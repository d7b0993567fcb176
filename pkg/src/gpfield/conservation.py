"""Ginzburg-Landau energy, renormalised mass and drift diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .background import Background
from .nonlinearity import Nonlinearity
from .spectral import AdmissiblePair, Field, gradient, mixed_norm

if TYPE_CHECKING:
    from .solver import Trajectory

DRIFT_FLOOR = 1e-10


def state_energy(u: Field, nl: Nonlinearity) -> float:
    """``int |grad u|^2 + int V(|u|^2)`` with gradients taken in physical space."""
    g = u.grid
    grad_sq = sum(np.abs(c.values) ** 2 for c in gradient(u))
    potential = nl.eval_V(np.abs(u.values) ** 2)
    return float((np.sum(grad_sq) + np.sum(potential)) * g.cell_volume)


def energy(w: Field, bg: Background, nl: Nonlinearity) -> float:
    """Energy of the perturbation w about the background phi (state ``u = phi + w``)."""
    if w.grid != bg.grid:
        raise ValueError(f"grid mismatch: w on {w.grid}, background on {bg.grid}")
    return state_energy(bg.phi + w, nl)


def renormalized_mass(u: Field, rho0: float) -> float:
    """``sum (|u|^2 - rho0) dV``."""
    return float(np.sum(np.abs(u.values) ** 2 - rho0) * u.grid.cell_volume)


@dataclass
class EnergyReport:
    e0: float
    series: list
    max_rel_drift: float
    floor: float = DRIFT_FLOOR
    mass_series: list = field(default_factory=list)
    times: list = field(default_factory=list)
    max_abs_drift: float = 0.0
    max_mass_drift: float = 0.0

    def rel_drift(self) -> np.ndarray:
        s = np.asarray(self.series)
        return np.abs(s - self.e0) / max(abs(self.e0), self.floor)

    def to_dict(self) -> dict:
        return {
            "e0": self.e0,
            "max_rel_drift": self.max_rel_drift,
            "max_abs_drift": self.max_abs_drift,
            "max_mass_drift": self.max_mass_drift,
            "floor": self.floor,
            "num_snapshots": len(self.series),
        }


def relative_drift(series, floor: float = DRIFT_FLOOR) -> float:
    s = np.asarray(series, dtype=float)
    return float(np.max(np.abs(s - s[0])) / max(abs(s[0]), floor))


def drift_report(traj: "Trajectory", bg: Background, nl: Nonlinearity,
                 floor: float = DRIFT_FLOOR) -> EnergyReport:
    """Energy and mass recomputed from the stored snapshots (not the solver's bookkeeping)."""
    if not traj.w_fields:
        raise ValueError("empty trajectory")
    series = [energy(w, bg, nl) for w in traj.w_fields]
    mass = [renormalized_mass(bg.phi + w, bg.rho0) for w in traj.w_fields]
    e0 = series[0]
    abs_drift = float(np.max(np.abs(np.asarray(series) - e0)))
    return EnergyReport(
        e0=e0,
        series=series,
        max_rel_drift=abs_drift / max(abs(e0), floor),
        floor=floor,
        mass_series=mass,
        times=list(traj.times),
        max_abs_drift=abs_drift,
        max_mass_drift=float(np.max(np.abs(np.asarray(mass) - mass[0]))),
    )


def xt_norm(traj: "Trajectory", pair: AdmissiblePair) -> float:
    """``||w||_{L^inf_T H^1} + ||w||_{L^p_T W^{1,q}}`` over the snapshot times.

    The ``L^p_T`` factor uses the left-rectangle rule on the snapshot spacing,
    so a constant-in-time w over [0, T] contributes exactly ``T^{1/p}``.
    """
    if pair.n != traj.w_fields[0].grid.dim:
        raise ValueError(f"pair dimension {pair.n} differs from run dimension")
    fields = traj.w_fields
    sup_part = mixed_norm(fields, math.inf, "h1", 1.0)
    if math.isinf(pair.p):
        return sup_part + mixed_norm(fields, math.inf, pair.spatial_tag, 1.0)
    if len(fields) < 2:
        return sup_part
    dt_snap = traj.times[1] - traj.times[0]
    return sup_part + mixed_norm(fields[:-1], pair.p, pair.spatial_tag, dt_snap)
