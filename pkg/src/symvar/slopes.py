"""Numerical bracketing of the weak slope and the second-order quotient.

The weak slope |df|(u) is never computed from its deformation definition
(non-constructive); it is bracketed by the gradient norm from below (exact
for C¹ functionals) and a sampled strong-slope maximum from above:

    ‖df(u)‖  =  |df|(u)  ≤  |∇f|(u)   (C¹ case),

both sides being one-sided estimates.  The quadratic form Q_u(w) is the
limsup of second differences (f(z+tζ)+f(z−tζ)−2f(z))/t² over (z, ζ, t)
near (u, w, 0); the estimator reports the sampled maximum at the finest
level of a logged, decreasing δ-schedule.

Probe directions come from a seeded scrambled Sobol sequence, so estimates
are reproducible and max-reductions are order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import OutsideDomain
from .funcspace import Functional, GridFunction, norm_X

__all__ = ["SlopeEstimate", "QEstimate", "strong_slope", "q_form",
           "unit_directions"]


@dataclass(frozen=True)
class SlopeEstimate:
    """Bracket [lower, upper] for |df|(u).

    ``lower`` is ‖derivative(u)‖_X when the oracle exists (0 otherwise);
    ``upper`` the sampled strong-slope maximum.  ``tol`` absorbs the
    O(radius · curvature) gap of the finite-radius quotients.
    """

    lower: float
    upper: float
    radii: tuple
    samples_per_radius: int
    tol: float

    def bracket_ok(self) -> bool:
        return 0.0 <= self.lower <= self.upper + self.tol


@dataclass(frozen=True)
class QEstimate:
    """Sampled second-difference quotient maximum at the finest δ."""

    value: float
    probe_count: int
    t_min: float
    schedule: tuple = field(default=())   # ((delta, value), ...) logged


def unit_directions(space, n, seed, norm=norm_X):
    """n quasi-random directions of unit ``norm``, deterministic given seed."""
    dim = space.n_cells
    eng = qmc.Sobol(d=dim, scramble=True, seed=seed)
    raw = eng.random_base2(max(1, math.ceil(math.log2(max(2, n)))))[:n]
    # map to gaussian directions; clip away the cube corners
    from scipy.stats import norm as _gauss
    z = _gauss.ppf(np.clip(raw, 1e-12, 1 - 1e-12))
    out = []
    for row in z:
        v = GridFunction(space, row)
        nv = norm(v)
        if nv > 0:
            out.append((1.0 / nv) * v)
    return out


def strong_slope(f: Functional, u: GridFunction, radii=(1e-3, 1e-4, 1e-5),
                 n_samples=64, seed=0) -> SlopeEstimate:
    """Sample max(0, (f(u)−f(ξ))/‖u−ξ‖_X) at the given probe radii.

    Zero at (sampled) local minima.  When the derivative oracle exists its
    ±directions are added to the probe set (the estimate stays a one-sided
    underestimate of the strong slope) and ‖derivative(u)‖_X is the lower
    bracket end.
    """
    radii = tuple(float(r) for r in radii)
    if any(r <= 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    fu = f(u)
    if math.isinf(fu):
        raise OutsideDomain("f(u) is not finite")

    dirs = unit_directions(u.space, n_samples, seed)
    lower = 0.0
    if f.derivative is not None:
        g = f.derivative(u)
        lower = norm_X(g)
        if lower > 0:
            gdir = (1.0 / lower) * g
            dirs = dirs + [gdir, -gdir]

    upper = 0.0
    for r in radii:
        for d in dirs:
            fx = f(u + r * d)
            if math.isinf(fx):
                continue
            upper = max(upper, (fu - fx) / r)
    upper = max(0.0, upper)
    tol = 1e-5 * (1.0 + lower)
    return SlopeEstimate(lower=lower, upper=upper, radii=radii,
                         samples_per_radius=len(dirs), tol=tol)


def q_form(f: Functional, u: GridFunction, w: GridFunction, delta=1e-4,
           n_samples=32, seed=0) -> QEstimate:
    """Estimate Q_u(w) = limsup (f(z+tζ)+f(z−tζ)−2f(z))/t² near (u, w, 0).

    Probes couple ‖z−u‖_X ≤ δ, ‖ζ−w‖_X ≤ δ and 0 < t ≤ δ through one δ per
    schedule level; the schedule (100δ, 10δ, δ) is logged and the finest
    level's sampled maximum is the reported value.  Probes where f is
    infinite are skipped; if every probe is infinite the point is outside
    the domain.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    schedule_deltas = (100.0 * delta, 10.0 * delta, delta)
    dirs = unit_directions(u.space, n_samples, seed)
    zero = u.space.zeros()

    probe_count = 0
    t_min = math.inf
    log = []
    for dl in schedule_deltas:
        best = -math.inf
        pairs = [(zero, zero)] + [(dirs[i], dirs[(i + 1) % len(dirs)])
                                  for i in range(len(dirs))]
        for dz, dzeta in pairs:
            for rz, rzeta, t in ((0.0, 0.0, dl), (0.0, 0.0, dl / 2),
                                 (dl, dl, dl), (dl, 0.0, dl),
                                 (0.0, dl, dl), (dl / 2, dl / 2, dl / 2)):
                z = u + rz * dz
                zeta = w + rzeta * dzeta
                fz = f(z)
                fp = f(z + t * zeta)
                fm = f(z - t * zeta)
                probe_count += 1
                if math.isinf(fz) or math.isinf(fp) or math.isinf(fm):
                    continue
                t_min = min(t_min, t)
                best = max(best, (fp + fm - 2.0 * fz) / t ** 2)
        log.append((dl, best))
    if not math.isfinite(log[-1][1]):
        raise OutsideDomain("all second-difference probes hit +inf")
    return QEstimate(value=log[-1][1], probe_count=probe_count,
                     t_min=t_min, schedule=tuple(log))
