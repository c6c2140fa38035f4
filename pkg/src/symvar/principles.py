"""Constructive engines for the symmetric variational principles.

Every engine returns a :class:`Certificate`: the output point, each
theorem conclusion as a (measured value, theoretical bound) pair, and a
sampled-verification report of the variational inequality.  A certificate
PASSes only if every measured value sits under its bound (within
``tol_cert``) and the sampled inequality deficit stays under the declared
slack.

The true infimum is never available; every "f(v) < inf f + ..." bound is
certified against ``inf_est`` from a documented multi-start probe whose
log ships inside the certificate.  Engines are deterministic given
(inputs, seed): one numpy SeedSequence drives inf probes, chain restarts
and verification sampling in a fixed spawn order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import lsq_linear

from . import _descent
from .errors import (AssumptionViolated, BadStart, ConstraintDegeneracy,
                     ConvergenceFailure, DivergenceAssumptionViolated,
                     NoMountainPass, NotSymmetricInput, OutsideDomain,
                     SymmetryViolation)
from .funcspace import (Functional, GridFunction, GridSpace, gram_matrix,
                        norm_V, norm_X, theta, function_to_json,
                        _norm_V_raw, _norm_X_raw)
from .rearrange import (approx_symmetrize, is_family_fixed, polarize,
                        polarizer_sequence_json, schwarz)
from .slopes import strong_slope

__all__ = [
    "SetOracle", "whole_space", "nonneg_cone", "box_set",
    "ViolationReport", "Certificate", "QBoundReport",
    "estimate_inf", "ekeland_point", "symmetric_ekeland",
    "symmetric_borwein_preiss", "zhong_radius", "symmetric_zhong",
    "dgz_check", "bump_perturbation", "constrained_symmetric_ekeland",
    "path_minimax", "sqps_sequence", "verify_certificate",
    "XMetric", "VMetric", "CallableMetric",
]

DEFAULT_TOL_CERT = 1e-7
DEFAULT_TOL_SYM = 1e-9


# ---------------------------------------------------------------------------
# domains

@dataclass
class SetOracle:
    """Membership + feasibility projection for a closed set of grid values.

    ``project`` must land inside the set (a feasibility oracle, not
    necessarily the metric projection).  Stability flags declare closure
    under polarization / symmetrization for the symmetric principles."""

    contains: Callable[[np.ndarray], bool]
    project: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    lo: Optional[np.ndarray] = None
    hi: Optional[np.ndarray] = None
    polarization_stable: bool = True
    symmetrization_stable: bool = True
    description: str = ""


def whole_space(space: GridSpace) -> SetOracle:
    return SetOracle(contains=lambda v: True, project=lambda v: v,
                     kind="space", description="X")


def nonneg_cone(space: GridSpace) -> SetOracle:
    """The cone S of nonnegative functions; projection is pointwise clip."""
    return SetOracle(contains=lambda v: bool(np.all(v >= 0.0)),
                     project=lambda v: np.maximum(v, 0.0),
                     kind="cone", description="S")


def box_set(space: GridSpace, lo, hi) -> SetOracle:
    lo = np.broadcast_to(np.asarray(lo, float), (space.n_cells,)).copy()
    hi = np.broadcast_to(np.asarray(hi, float), (space.n_cells,)).copy()
    return SetOracle(contains=lambda v: bool(np.all(v >= lo - 1e-12) and np.all(v <= hi + 1e-12)),
                     project=lambda v: np.clip(v, lo, hi),
                     kind="box", lo=lo, hi=hi,
                     description=f"box[{lo.min():g},{hi.max():g}]")


# ---------------------------------------------------------------------------
# metrics

class XMetric:
    name = "X"

    def __init__(self, space: GridSpace):
        self.space = space

    def norm(self, values) -> float:
        s = self.space
        return _norm_X_raw(values, s.dimension, s.n, s.spacing, s.cell_measure, s.p)

    def dist(self, a, b) -> float:
        return self.norm(a - b)

    def penalty_grad(self, w, center):
        """Euclidean gradient of w ↦ ‖w−center‖_X for p = 2 grids."""
        if self.space.p != 2.0:
            return None
        d = self.norm(w - center)
        if d < 1e-14:
            return np.zeros_like(w)
        return gram_matrix(self.space) @ (w - center) / d


class VMetric:
    name = "V"

    def __init__(self, space: GridSpace):
        self.space = space

    def norm(self, values) -> float:
        s = self.space
        return _norm_V_raw(values, s.cell_measure, s.p, s.q_V)

    def dist(self, a, b) -> float:
        return self.norm(a - b)

    def penalty_grad(self, w, center):
        return None


class CallableMetric:
    def __init__(self, fn, name="custom"):
        self._fn = fn
        self.name = name

    def norm(self, values) -> float:
        return float(self._fn(values))

    def dist(self, a, b) -> float:
        return self.norm(a - b)

    def penalty_grad(self, w, center):
        return None


# ---------------------------------------------------------------------------
# reports

@dataclass
class ViolationReport:
    """Largest observed deficit of a sampled variational inequality."""

    n_samples: int
    max_violation: float
    argmax_w: Optional[GridFunction] = None
    seed: int = 0

    def to_json_dict(self):
        return {
            "n_samples": self.n_samples,
            "max_violation": self.max_violation,
            "argmax_w": (None if self.argmax_w is None
                         else [float(x) for x in self.argmax_w.values]),
            "seed": self.seed,
        }


@dataclass
class QBoundReport:
    """Sampled minimum of quotient + 2ε‖ζ‖² for the SQPS second-order bound."""

    eps_h: float
    min_margin: float
    n_probes: int
    worst_t: float
    tol_q: float = 1e-6

    def ok(self) -> bool:
        return self.min_margin >= -self.tol_q

    def to_json_dict(self):
        return {"eps_h": float(self.eps_h), "min_margin": float(self.min_margin),
                "n_probes": int(self.n_probes), "worst_t": float(self.worst_t),
                "tol_q": float(self.tol_q), "ok": bool(self.ok())}


@dataclass
class Certificate:
    """Measured record of one theorem instance.

    ``measured`` maps conclusion names to (value, theoretical_bound);
    sealing marks the certificate PASS only when every value is under its
    bound within ``tol_cert`` and the sampled deficit is under ``slack``.
    """

    variant: str
    v: GridFunction
    sigma: float
    rho: float
    p_exp: float = 1.0
    eta: Optional[GridFunction] = None
    measured: dict = field(default_factory=dict)
    violation: Optional[ViolationReport] = None
    t_rho_sequence: list = field(default_factory=list)
    status: str = "UNSEALED"
    seed: int = 0
    slack: float = 0.0
    inf_est: Optional[float] = None
    inf_probe_log: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    tol_cert: float = DEFAULT_TOL_CERT

    def add_measured(self, name, value, bound):
        self.measured[name] = (float(value), float(bound))

    def seal(self) -> "Certificate":
        ok = all(v <= b + self.tol_cert for v, b in self.measured.values())
        if self.violation is not None:
            ok = ok and self.violation.max_violation <= self.slack
        self.status = "PASS" if ok else "FAILED"
        return self

    def failed_bounds(self):
        return {k: vb for k, vb in self.measured.items()
                if vb[0] > vb[1] + self.tol_cert}

    def to_json_dict(self):
        return {
            "schema": "symvar-certificate/1",
            "variant": self.variant,
            "status": self.status,
            "sigma": self.sigma,
            "rho": self.rho,
            "p_exp": self.p_exp,
            "seed": self.seed,
            "slack": self.slack,
            "inf_est": self.inf_est,
            "measured": {k: {"value": v, "bound": b}
                         for k, (v, b) in self.measured.items()},
            "violation": (None if self.violation is None
                          else self.violation.to_json_dict()),
            "t_rho_sequence": self.t_rho_sequence,
            "inf_probe_log": self.inf_probe_log,
            "extras": self.extras,
            "v": function_to_json(self.v),
            "eta": (None if self.eta is None else function_to_json(self.eta)),
        }

    def to_json_bytes(self) -> bytes:
        return json.dumps(self.to_json_dict(), indent=1).encode("utf-8")


# ---------------------------------------------------------------------------
# shared machinery

def _f_arr(f: Functional, space: GridSpace):
    return lambda vals: f(GridFunction(space, vals))


def _grad_arr(f: Functional, space: GridSpace):
    if f.derivative is None or space.p != 2.0:
        return None
    g = gram_matrix(space)

    def grad(vals):
        rep = f.derivative(GridFunction(space, vals))
        return g @ rep.values

    return grad


def default_slack(fv: float) -> float:
    return 1e-6 * (1.0 + abs(fv))


def estimate_inf(f: Functional, space: GridSpace, domain: SetOracle, seed,
                 extra_starts=(), n_random=6):
    """Documented multi-start minimization probe.

    Returns (inf_est, log, argmin_values).  The estimate is an upper bound
    on inf f over the domain; engines record it and certify against it."""
    rng = np.random.default_rng(seed)
    fun_raw = _f_arr(f, space)
    grad = _grad_arr(f, space)
    box = (domain.lo, domain.hi) if domain.kind == "box" else None
    project = domain.project if domain.kind != "space" else None

    if project is None:
        fun = fun_raw
    else:
        # guard against feasibility restorations that fail to land in the
        # set: such probes must not contribute a bogus infimum
        def fun(vals):
            if not domain.contains(vals):
                return math.inf
            return fun_raw(vals)

    starts = [domain.project(np.zeros(space.n_cells))]
    tags = ["origin"]
    for j, s0 in enumerate(extra_starts):
        starts.append(domain.project(np.asarray(s0, float)))
        tags.append(f"given{j}")
    scale = max(1.0, max(float(np.max(np.abs(s))) for s in starts))
    for j in range(n_random):
        starts.append(domain.project(rng.standard_normal(space.n_cells) * scale))
        tags.append(f"random{j}")

    log = []
    best_x, best_f = None, math.inf
    for tag, x0 in zip(tags, starts):
        x, fx = _descent.minimize_multistart(fun, grad, [x0], project=project,
                                             box=box)
        log.append([tag, float(fx)])
        if fx < best_f:
            best_x, best_f = x, fx
    if f.lower_bound is not None and best_f < f.lower_bound - 1e-9:
        raise AssumptionViolated(
            f"probe found f = {best_f} below the declared lower bound {f.lower_bound}")
    return best_f, log, best_x


def sample_inequality(deficit, space: GridSpace, v_vals, *, n_samples, seed,
                      radii, metric_norm, domain: SetOracle = None,
                      width=None, extra_points=()):
    """Max deficit of an inequality over ball-radii + global probes.

    Draws come sequentially from one seeded stream, so a run with more
    samples extends a run with fewer (the max can only grow)."""
    rng = np.random.default_rng(seed)
    n_dim = space.n_cells
    if width is None:
        width = max(1.0, 2.0 * float(np.max(np.abs(v_vals))))
    maxv, arg = 0.0, None

    def consider(w):
        nonlocal maxv, arg
        if domain is not None:
            w = domain.project(w)
            if not domain.contains(w):
                return
        d = deficit(w)
        if d > maxv:
            maxv, arg = d, np.array(w)

    for w in extra_points:
        consider(np.asarray(w, float))
    for i in range(n_samples):
        z = rng.standard_normal(n_dim)
        k = i % (len(radii) + 1)
        if k < len(radii):
            nz = metric_norm(z)
            if nz == 0.0:
                continue
            consider(v_vals + radii[k] * z / nz)
        else:
            consider(v_vals + width * (2.0 * (z % 1.0) - 1.0))
    gf = None if arg is None else GridFunction(space, arg)
    return ViolationReport(n_samples=n_samples, max_violation=maxv,
                           argmax_w=gf, seed=int(seed))


def check_symmetry(f: Functional, space: GridSpace, seed, n_samples=24,
                   tol_sym=DEFAULT_TOL_SYM):
    """Sample f(u^H) ≤ f(u) + tol over u ∈ S, H in the registered family."""
    rng = np.random.default_rng(seed)
    fam = space.polarizers
    if not fam:
        return
    for _ in range(n_samples):
        u = GridFunction(space, np.abs(rng.standard_normal(space.n_cells)))
        fu = f(u)
        if math.isinf(fu):
            continue
        H = fam[rng.integers(len(fam))]
        fh = f(polarize(u, H))
        if fh > fu + tol_sym * (1.0 + abs(fu)):
            raise SymmetryViolation(
                f"f({H}) increased by {fh - fu:.3e} on a sampled u in S")


def _dominating_point(f: Functional, u: GridFunction, tol=1e-9) -> GridFunction:
    """ξ ∈ S with f(ξ) ≤ f(u); default candidate is Θ(u)."""
    if f.dominating_point is not None:
        xi = f.dominating_point(u)
    else:
        xi = theta(u)
    fu, fxi = f(u), f(xi)
    if np.any(xi.values < 0) or fxi > fu + tol * (1.0 + abs(fu)):
        raise AssumptionViolated(
            "no dominating point in S: f(xi) > f(u)", witness=u)
    return xi


def _t_rho(u: GridFunction, rho: float):
    """T_ρ u with the polarizer word; identity word for family-fixed u."""
    if is_family_fixed(theta(u)):
        return theta(u), []
    return approx_symmetrize(u, rho)


def _ekeland_chain(f: Functional, space: GridSpace, domain: SetOracle,
                   u0_vals, sigma, metric, rng, *, weight_fn=None,
                   anchor_vals=None, trust=1.0, max_outer=60, tol_step=None):
    """Greedy Ekeland chain: v_{k+1} minimizes f(w) + σ_w(w)‖w−v_k‖ and is
    accepted only when the penalized value drops by tol_step; telescoping
    gives σ·Σ weights·steps ≤ f(u0) − f(v).  Returns (v, log)."""
    fun_raw = _f_arr(f, space)
    grad_f = _grad_arr(f, space)
    box = (domain.lo, domain.hi) if domain.kind == "box" else None
    project = domain.project if domain.kind != "space" else None

    if project is None:
        fun = fun_raw
    else:
        def fun(vals):
            if not domain.contains(vals):
                return math.inf
            return fun_raw(vals)

    v = domain.project(np.asarray(u0_vals, float))
    fv = fun(v)
    if math.isinf(fv):
        raise OutsideDomain("f(u0) is not finite on the domain")
    log = [[float(fv), 0.0]]

    for _ in range(max_outer):
        ts = tol_step if tol_step is not None else 1e-12 * (1.0 + abs(fv))
        vk = v

        def wfac(w):
            return weight_fn(w) if weight_fn is not None else 1.0

        def phi(w):
            return fun(w) + sigma * wfac(w) * metric.dist(w, vk)

        grad_phi = None
        if grad_f is not None and weight_fn is None:
            pgrad = metric.penalty_grad(vk, vk)  # probe capability
            if pgrad is not None:
                def grad_phi(w):
                    g = grad_f(w)
                    pg = metric.penalty_grad(w, vk)
                    return g + sigma * pg

        starts = [vk]
        if anchor_vals is not None:
            starts += [np.asarray(anchor_vals, float),
                       0.5 * (vk + np.asarray(anchor_vals, float))]
        starts.append(np.zeros_like(vk))
        for _ in range(2):
            d = rng.standard_normal(len(vk))
            nd = metric.norm(d)
            if nd > 0:
                starts.append(vk + trust * d / nd)
        if grad_phi is not None:
            w_best, phi_best = _descent.minimize_multistart(
                phi, grad_phi, [s for s in starts], project=project, box=box)
        else:
            w_best, phi_best = _descent.minimize_multistart(
                phi, None, starts, project=project, box=box,
                compass_scale=max(0.25 * trust, 1e-3), f_atol=0.25 * ts)
        # the current point is always an admissible candidate
        if phi_best <= fv - ts and metric.dist(w_best, vk) > 0.0:
            v = w_best
            fv = fun(v)
            log.append([float(fv), float(metric.dist(w_best, vk))])
            if len(log) >= 2 and log[-1][0] > log[-2][0] + 1e-12:
                raise AssertionError("engine energy increased along the chain")
        else:
            break
    return v, log


def _measure_symmetry(v: GridFunction) -> float:
    return norm_V(v - schwarz(v))


def _bound_a(space: GridSpace, r: float, variant: str) -> float:
    K, C = space.K, space.C_theta
    if variant == "I":
        return (2.0 * K + 1.0) * r
    return (K * (C + 1.0) + 1.0) * r


def _symmetry_pair(space, v: GridFunction, metric, r: float, variant: str):
    """(measured symmetry defect, theoretical bound) for conclusion (a).

    For runs whose Ekeland metric is the X-norm the defect is measured in
    the V-norm with the stored embedding constant K.  When the engine
    metric *is* the symmetry-measurement norm (V-metric or a caller norm
    playing the role X = V), the embedding constant is 1 and the defect is
    measured in that same norm."""
    if isinstance(metric, XMetric):
        return _measure_symmetry(v), _bound_a(space, r, variant)
    val = metric.dist(v.values, schwarz(v).values)
    C = space.C_theta
    kfac = 3.0 if variant == "I" else (C + 1.0) + 1.0
    return val, kfac * r


# ---------------------------------------------------------------------------
# core principle: Ekeland point on a domain

def ekeland_point(f: Functional, domain_oracle: SetOracle, u0: GridFunction,
                  sigma, rho, *, seed=0, n_samples=2000, slack=None,
                  metric=None, max_outer=60) -> Certificate:
    """Ekeland point from u0: f(v) ≤ f(u0), ‖v−u0‖ ≤ ρ + slack, and the
    sampled inequality f(w) ≥ f(v) − σ‖w−v‖ over the domain.

    Requires f(u0) ≤ inf_est + σρ (BadStart otherwise), inf_est coming from
    the multi-start probe recorded in the certificate."""
    space = u0.space
    metric = metric or XMetric(space)
    ss = np.random.SeedSequence(seed)
    s_inf, s_chain, s_ver = [np.random.default_rng(c) for c in ss.spawn(3)]

    inf_est, log, argmin = estimate_inf(f, space, domain_oracle, s_inf,
                                        extra_starts=[u0.values])
    fu0 = f(u0)
    if fu0 > inf_est + sigma * rho + 1e-12 * (1.0 + abs(inf_est)):
        raise BadStart(
            f"f(u0) = {fu0:.6g} exceeds inf_est + sigma*rho = {inf_est + sigma * rho:.6g}")

    v_vals, chain_log = _ekeland_chain(f, space, domain_oracle, u0.values,
                                       sigma, metric, s_chain,
                                       anchor_vals=argmin, trust=rho,
                                       max_outer=max_outer)
    v = GridFunction(space, v_vals)
    fv = f(v)
    if slack is None:
        slack = default_slack(fv)

    cert = Certificate(variant="EkelandCore", v=v, sigma=sigma, rho=rho,
                       seed=seed, slack=slack, inf_est=inf_est,
                       inf_probe_log=log)
    cert.extras["metric"] = metric.name
    cert.extras["chain"] = chain_log
    cert.add_measured("f(v)-f(u0)", fv - fu0, 0.0)
    loc_slack = max(0.0, (inf_est - fv) / sigma)
    cert.add_measured("‖v-u0‖", metric.dist(v_vals, u0.values), rho + loc_slack)

    def deficit(w):
        return fv - sigma * metric.dist(w, v_vals) - f(GridFunction(space, w))

    cert.violation = sample_inequality(
        deficit, space, v_vals, n_samples=n_samples,
        seed=int(s_ver.integers(2 ** 31)), radii=(4 * rho, rho, rho / 4),
        metric_norm=metric.norm, domain=domain_oracle,
        extra_points=[argmin, u0.values])
    return cert.seal()


# ---------------------------------------------------------------------------
# symmetric Ekeland, variants I..V

def symmetric_ekeland(f: Functional, space: GridSpace, u0: GridFunction,
                      sigma, rho, variant="II", *, domain=None, rho2=None,
                      Y=None, gamma_sequence=None, h0=1, seed=0,
                      n_samples=2000, slack=None, metric=None,
                      max_outer=60, tol_sym=DEFAULT_TOL_SYM) -> Certificate:
    """Symmetric Ekeland point: almost-minimal, almost-critical and almost
    symmetric, certificate per variant.

    I   set-restricted on a polarization-stable closed S' (``domain``);
        symmetry bound (2K+1)ρ.
    II  whole space with a dominating point ξ ∈ S; bound (K(C_Θ+1)+1)ρ.
    III Γ-limit form: either ``gamma_sequence`` = (list of Functionals,
        recovery oracle) with the approximating conditions, or f_h ≡ f with
        ``Y`` a point list inside the fully symmetric class.
    IV  strong form: extra stability modulus over a δ-schedule; bounds use
        ρ1 + ρ2 (``rho`` is ρ1, ``rho2`` defaults to ρ1).
    V   altered form: no energy precondition; records the exact comparison
        f(v) ≤ f(u0) − σ‖v − T_ρ u0‖ and the strict sampled inequality;
        when the start also satisfies the energy precondition, the
        ``location_recovery`` extras recover the ρ-location bound.
    """
    if variant not in ("I", "II", "III", "IV", "V"):
        raise ValueError(f"unknown variant {variant!r}")
    if np.any(u0.values < 0):
        raise AssumptionViolated("u0 must lie in the cone S (values >= 0)")
    metric = metric or XMetric(space)
    ss = np.random.SeedSequence(seed)
    c_sym, c_inf, c_chain, c_ver, c_extra = ss.spawn(5)
    check_symmetry(f, space, c_sym, tol_sym=tol_sym)

    u_start = u0
    dom = domain
    extras = {"metric": metric.name, "variant_detail": {}}
    if variant == "I":
        dom = dom or nonneg_cone(space)
        if not (dom.polarization_stable and dom.symmetrization_stable):
            raise AssumptionViolated("variant I needs a polarization/"
                                     "symmetrization-stable S'")
    elif variant == "II":
        u_start = _dominating_point(f, u0)
        dom = dom or whole_space(space)
    elif variant == "III":
        return _symmetric_ekeland_gamma(
            f, space, u0, sigma, rho, Y=Y, gamma_sequence=gamma_sequence,
            h0=h0, seed=seed, n_samples=n_samples, slack=slack,
            metric=metric, max_outer=max_outer, tol_sym=tol_sym)
    elif variant == "IV":
        dom = dom or whole_space(space)
    elif variant == "V":
        dom = dom or whole_space(space)

    rho_T = rho + (rho2 if (variant == "IV" and rho2 is not None) else
                   (rho if variant == "IV" else 0.0))
    u_tilde, seq = _t_rho(u_start, rho_T if variant == "IV" else rho)
    f_start, f_tilde = f(u_start), f(u_tilde)
    if f_tilde > f_start + 1e-9 * (1.0 + abs(f_start)):
        raise SymmetryViolation("f increased along the T_rho polarization word")

    rng_inf = np.random.default_rng(c_inf)
    inf_est, log, argmin = estimate_inf(f, space, dom, rng_inf,
                                        extra_starts=[u_start.values,
                                                      u_tilde.values])
    if variant != "V":
        if f_start > inf_est + sigma * rho + 1e-12 * (1.0 + abs(inf_est)):
            raise BadStart(
                f"f(u0) = {f_start:.6g} exceeds inf_est + sigma*rho = "
                f"{inf_est + sigma * rho:.6g}")

    rng_chain = np.random.default_rng(c_chain)
    v_vals, chain_log = _ekeland_chain(
        f, space, dom, u_tilde.values, sigma, metric, rng_chain,
        anchor_vals=argmin, trust=rho, max_outer=max_outer)
    v = GridFunction(space, v_vals)
    fv = f(v)
    if slack is None:
        slack = default_slack(fv)

    cert = Certificate(variant=f"SymEkeland{variant}", v=v, sigma=sigma,
                       rho=rho, seed=seed, slack=slack, inf_est=inf_est,
                       inf_probe_log=log,
                       t_rho_sequence=polarizer_sequence_json(seq))
    cert.extras.update(extras)
    cert.extras["chain"] = chain_log

    r_bound = rho_T if variant == "IV" else rho
    sym_val, sym_bound = _symmetry_pair(space, v, metric, r_bound, variant)
    cert.add_measured("‖v-v*‖_V", sym_val, sym_bound)
    if variant == "V":
        # Theorem conclusion (b), an exact recorded comparison
        dvT = metric.dist(v_vals, u_tilde.values)
        cert.add_measured("f(v)+σ‖v-T_ρu0‖-f(u0)",
                          fv + sigma * dvT - f_start, 0.0)
        if f_start <= inf_est + sigma * rho:
            cert.extras["location_recovery"] = {
                "‖v-T_ρu0‖": dvT,
                "(f(u0)-f(v))/σ": (f_start - fv) / sigma,
                "rho": rho,
                "ok": bool(dvT <= (f_start - fv) / sigma + 1e-12
                           and (f_start - fv) / sigma <= rho + 1e-12),
            }
    else:
        cert.add_measured("f(v)-f(u0)", fv - f_start, 0.0)
    drift = metric.dist(u_tilde.values, u_start.values)
    if variant == "V":
        # no energy precondition: the only location control is the chain
        # telescoping σ‖v−T_ρu0‖ ≤ f(u0) − f(v)
        loc_bound = max(0.0, (f_start - fv)) / sigma + drift
    else:
        loc_bound = r_bound + drift + max(0.0, (inf_est - fv) / sigma)
    cert.add_measured("‖v-u0‖", metric.dist(v_vals, u_start.values), loc_bound)

    def deficit(w):
        return fv - sigma * metric.dist(w, v_vals) - f(GridFunction(space, w))

    rng_ver = np.random.default_rng(c_ver)
    cert.violation = sample_inequality(
        deficit, space, v_vals, n_samples=n_samples,
        seed=int(rng_ver.integers(2 ** 31)),
        radii=(4 * rho, rho, rho / 4), metric_norm=metric.norm, domain=dom,
        extra_points=[argmin, u_start.values, u_tilde.values])

    if variant == "IV":
        rng_x = np.random.default_rng(c_extra)
        cert.extras["stability_modulus"] = _stability_modulus(
            f, space, v_vals, fv, sigma, metric, rng_x, rho=r_bound)
    return cert.seal()


def _stability_modulus(f, space, v_vals, fv, sigma, metric, rng, *, rho,
                       n_per_delta=400):
    """max ‖w−v‖ over sampled w with f(w)+σ‖w−v‖ ≤ f(v)+δ, per δ.

    Theorem conclusion (c) says minimizing sequences of w ↦ f(w)+σ‖w−v‖
    converge to v; the moduli should shrink with δ."""
    table = []
    deltas = [sigma * rho, sigma * rho / 4, sigma * rho / 16, sigma * rho / 64]
    samples = []
    for _ in range(n_per_delta):
        z = rng.standard_normal(space.n_cells)
        nz = metric.norm(z)
        if nz == 0:
            continue
        r = rng.uniform(0, 4 * rho)
        samples.append(v_vals + r * z / nz)
    for d in deltas:
        worst = 0.0
        for w in samples:
            val = f(GridFunction(space, w)) + sigma * metric.dist(w, v_vals)
            if val <= fv + d:
                worst = max(worst, metric.dist(w, v_vals))
        table.append([float(d), float(worst)])
    return table


def _symmetric_ekeland_gamma(f, space, u0, sigma, rho, *, Y, gamma_sequence,
                             h0, seed, n_samples, slack, metric, max_outer,
                             tol_sym):
    """Γ-limit variant.  With gamma_sequence=(f_list, recovery) the engine
    follows the approximating construction; with f_h ≡ f (default) it runs
    the specialization on a point list Y in the fully symmetric class."""
    m = 5
    sig_hat, sig_til = 0.2 * sigma, 0.4 * sigma
    sig_eff = m * sig_til / (m - 1)            # = sigma/2 < sigma
    rho_eff = (m - 1) * rho / m
    ss = np.random.SeedSequence(seed)
    c_inf, c_rest = ss.spawn(2)

    if gamma_sequence is None:
        f_list = None
        if Y is None or len(Y) == 0:
            raise AssumptionViolated("variant III needs Y or a gamma_sequence")
        for y in Y:
            if not is_family_fixed(theta(y)) or np.any(y.values < 0):
                raise NotSymmetricInput("Y must lie inside the fully "
                                        "symmetric class X_{H*}")
        f_h, h_used = f, h0
        u_h = min(Y, key=f)
    else:
        f_list, recovery = gamma_sequence
        h_used = max(h0, 0)
        f_h = f_list(h_used) if callable(f_list) else f_list[h_used]
        base = min(Y, key=f) if Y else u0
        u_h = recovery(base, h_used)
        if np.any(u_h.values < 0):
            raise AssumptionViolated("recovery sequence must stay in S")

    dom = whole_space(space)
    inf_est, log, argmin = estimate_inf(f_h, space, dom,
                                        np.random.default_rng(c_inf),
                                        extra_starts=[u_h.values])
    if f_h(u_h) > inf_est + sig_til * rho + 1e-12 * (1.0 + abs(inf_est)):
        raise BadStart("inf_Y f must undercut inf f + sigma*rho")

    sub = symmetric_ekeland(f_h, space, u_h, sig_eff, rho_eff, variant="II",
                            seed=int(np.random.default_rng(c_rest).integers(2 ** 31)),
                            n_samples=n_samples, slack=slack, metric=metric,
                            max_outer=max_outer, tol_sym=tol_sym)
    v = sub.v
    fv = f_h(v)
    cert = Certificate(variant="SymEkelandIII", v=v, sigma=sigma, rho=rho,
                       seed=seed, slack=sub.slack, inf_est=inf_est,
                       inf_probe_log=log, t_rho_sequence=sub.t_rho_sequence)
    cert.extras["metric"] = metric.name
    cert.extras["constants"] = {"m": m, "sigma_hat": sig_hat,
                                "sigma_tilde": sig_til,
                                "sigma_effective": sig_eff,
                                "rho_effective": rho_eff, "h": h_used}
    cert.add_measured("‖v-v*‖_V", _measure_symmetry(v),
                      _bound_a(space, rho, "II"))
    cert.add_measured("|f(v)-inf_est|", abs(fv - inf_est), sigma * rho)
    if Y:
        xm = XMetric(space)
        dY = min(xm.dist(v.values, y.values) for y in Y)
        if gamma_sequence is None:
            # Y ⊂ X_{H*}: T_ρ is the identity on Y, bound is plain ρ
            cert.add_measured("d(v,Y)", dY, rho)
        else:
            u_h_tilde, _ = _t_rho(u_h, rho_eff)
            drift = xm.dist(u_h_tilde.values, u_h.values) \
                + min(xm.dist(u_h.values, y.values) for y in Y)
            cert.add_measured("d(v,Y)", dY, rho + drift)
    cert.violation = sub.violation
    return cert.seal()


# ---------------------------------------------------------------------------
# symmetric Borwein-Preiss

def symmetric_borwein_preiss(f: Functional, space: GridSpace,
                             u0: GridFunction, sigma, rho, p_exp=2, *,
                             domain=None, seed=0, n_samples=2000, slack=None,
                             max_bp_iters=200,
                             tol_sym=DEFAULT_TOL_SYM) -> Certificate:
    """Smooth symmetric principle: produces (v, η) with the p-th power
    penalty inequality (e) f(w) ≥ f(v) + σ(‖v−η‖^p − ‖w−η‖^p).

    The proof's countable convex combination is replaced by one moving
    center: η starts at T_ρu0, v is the penalized global minimizer, and η
    bisects toward v until ‖v−η‖ ≤ ρ/2."""
    if np.any(u0.values < 0):
        raise AssumptionViolated("u0 must lie in the cone S")
    metric = XMetric(space)
    dom = domain or whole_space(space)
    ss = np.random.SeedSequence(seed)
    c_sym, c_inf, c_ver = ss.spawn(3)
    check_symmetry(f, space, c_sym, tol_sym=tol_sym)

    u_tilde, seq = _t_rho(u0, rho)
    fu0 = f(u0)
    inf_est, log, argmin = estimate_inf(
        f, space, dom, np.random.default_rng(c_inf),
        extra_starts=[u0.values, u_tilde.values])
    gap = sigma * rho ** p_exp
    if fu0 > inf_est + gap + 1e-12 * (1.0 + abs(inf_est)):
        raise BadStart(f"f(u0) = {fu0:.6g} exceeds inf_est + sigma*rho^p = "
                       f"{inf_est + gap:.6g}")

    fun = _f_arr(f, space)
    grad_f = _grad_arr(f, space)
    gram = gram_matrix(space) if space.p == 2.0 else None
    box = (dom.lo, dom.hi) if dom.kind == "box" else None
    project = dom.project if dom.kind != "space" else None

    eta = np.array(u_tilde.values)
    v_vals = None
    for _ in range(max_bp_iters):
        def phi(w):
            return fun(w) + sigma * metric.dist(w, eta) ** p_exp

        grad_phi = None
        if grad_f is not None and p_exp == 2 and gram is not None:
            def grad_phi(w):
                return grad_f(w) + 2.0 * sigma * (gram @ (w - eta))

        starts = [eta, argmin, 0.5 * (eta + argmin), np.zeros_like(eta)]
        v_vals, _ = _descent.minimize_multistart(
            phi, grad_phi, starts, project=project, box=box)
        if metric.dist(v_vals, eta) <= rho / 2.0:
            break
        eta = 0.5 * (eta + v_vals)
    else:
        raise ConvergenceFailure("Borwein-Preiss center loop did not settle",
                                 best=GridFunction(space, v_vals))

    v = GridFunction(space, v_vals)
    fv = f(v)
    if fv > inf_est + gap + 1e-9 * (1.0 + abs(inf_est)):
        raise ConvergenceFailure(
            "inner minimizer stalled above inf_est + sigma*rho^p",
            residual=fv - inf_est - gap, best=v)
    if slack is None:
        slack = default_slack(fv)

    eta_gf = GridFunction(space, eta)
    cert = Certificate(variant="SymBP", v=v, sigma=sigma, rho=rho,
                       p_exp=float(p_exp), eta=eta_gf, seed=seed, slack=slack,
                       inf_est=inf_est, inf_probe_log=log,
                       t_rho_sequence=polarizer_sequence_json(seq))
    cert.extras["metric"] = metric.name
    drift = metric.dist(u_tilde.values, u0.values)
    cert.add_measured("‖v-v*‖_V", _measure_symmetry(v), _bound_a(space, rho, "BP"))
    cert.add_measured("‖v-u‖", metric.dist(v_vals, u0.values), rho + drift)
    cert.add_measured("‖η-u‖", metric.dist(eta, u0.values), rho + drift)
    cert.add_measured("f(v)-inf_est", fv - inf_est, gap)

    dve = metric.dist(v_vals, eta) ** p_exp

    def deficit(w):
        return (fv + sigma * (dve - metric.dist(w, eta) ** p_exp)
                - f(GridFunction(space, w)))

    cert.violation = sample_inequality(
        deficit, space, v_vals, n_samples=n_samples,
        seed=int(np.random.default_rng(c_ver).integers(2 ** 31)),
        radii=(4 * rho, rho, rho / 4), metric_norm=metric.norm, domain=dom,
        extra_points=[argmin, u0.values, eta])
    return cert.seal()


# ---------------------------------------------------------------------------
# Zhong weights

def zhong_radius(h: Callable[[float], float], rho: float, *, r_cap=1e8,
                 quad_tol=1e-12, bisect_tol=1e-10) -> float:
    """Minimal r with ∫_0^r ds/(1+h(s)) = ρ, by bisection over quadrature.

    h must be nondecreasing, continuous and nonnegative with divergent
    ∫ ds/(1+h) (declared by the caller; spot-checked on a probe grid)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    probes = np.linspace(0.0, 10.0, 21)
    vals = [h(s) for s in probes]
    if any(v < -1e-12 for v in vals) or any(b < a - 1e-9 for a, b in
                                            zip(vals, vals[1:])):
        raise AssumptionViolated("h must be nonnegative and nondecreasing")

    def integral(r):
        import warnings
        from scipy.integrate import IntegrationWarning
        with warnings.catch_warnings():
            # the doubling cap probes integrals that may be slowly
            # convergent on purpose (divergence detection)
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(lambda s: 1.0 / (1.0 + h(s)), 0.0, r,
                          epsabs=quad_tol, epsrel=quad_tol, limit=200)
        return val

    hi = max(rho, 1.0)
    while integral(hi) < rho:
        hi *= 2.0
        if hi > r_cap:
            raise DivergenceAssumptionViolated(
                f"∫ ds/(1+h) did not reach rho={rho} below r={r_cap:g}")
    lo = 0.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if integral(mid) >= rho:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def symmetric_zhong(f: Functional, space: GridSpace, u0: GridFunction,
                    sigma, rho, h: Callable[[float], float], *, domain=None,
                    seed=0, n_samples=2000, slack=None, max_outer=60,
                    tol_sym=DEFAULT_TOL_SYM) -> Certificate:
    """Weighted symmetric Ekeland point: the inequality carries the factor
    1/(1+h(‖v−T_{r(ρ)}u0‖)) and all location bounds use r(ρ)."""
    if np.any(u0.values < 0):
        raise AssumptionViolated("u0 must lie in the cone S")
    metric = XMetric(space)
    dom = domain or whole_space(space)
    ss = np.random.SeedSequence(seed)
    c_sym, c_inf, c_chain, c_ver = ss.spawn(4)
    check_symmetry(f, space, c_sym, tol_sym=tol_sym)

    r = zhong_radius(h, rho)
    u_tilde, seq = _t_rho(u0, r)
    fu0 = f(u0)
    inf_est, log, argmin = estimate_inf(
        f, space, dom, np.random.default_rng(c_inf),
        extra_starts=[u0.values, u_tilde.values])
    if fu0 > inf_est + sigma * rho + 1e-12 * (1.0 + abs(inf_est)):
        raise BadStart("f(u0) exceeds inf_est + sigma*rho")

    anchor = np.array(u_tilde.values)

    def weight(w):
        return 1.0 / (1.0 + h(metric.dist(w, anchor)))

    v_vals, chain_log = _ekeland_chain(
        f, space, dom, anchor, sigma, metric,
        np.random.default_rng(c_chain), weight_fn=weight,
        anchor_vals=argmin, trust=r, max_outer=max_outer)
    v = GridFunction(space, v_vals)
    fv = f(v)
    if slack is None:
        slack = default_slack(fv)

    w_final = weight(v_vals)
    cert = Certificate(variant="SymZhong", v=v, sigma=sigma, rho=rho,
                       seed=seed, slack=slack, inf_est=inf_est,
                       inf_probe_log=log,
                       t_rho_sequence=polarizer_sequence_json(seq))
    cert.extras["metric"] = metric.name
    cert.extras["chain"] = chain_log
    cert.extras["r_of_rho"] = r
    cert.extras["weight_at_v"] = w_final
    cert.add_measured("‖v-v*‖_V", _measure_symmetry(v), _bound_a(space, r, "Z"))
    cert.add_measured("f(v)-f(u0)", fv - fu0, 0.0)
    drift = metric.dist(u_tilde.values, u0.values)
    cert.add_measured("‖v-u0‖", metric.dist(v_vals, u0.values),
                      r + drift + max(0.0, (inf_est - fv) / sigma))

    def deficit(w):
        return (fv - sigma * w_final * metric.dist(w, v_vals)
                - f(GridFunction(space, w)))

    cert.violation = sample_inequality(
        deficit, space, v_vals, n_samples=n_samples,
        seed=int(np.random.default_rng(c_ver).integers(2 ** 31)),
        radii=(4 * r, r, r / 4), metric_norm=metric.norm, domain=dom,
        extra_points=[argmin, u0.values, u_tilde.values])
    return cert.seal()


# ---------------------------------------------------------------------------
# Deville-Godefroy-Zizler: candidate generation + certificate checking

def bump_perturbation(space: GridSpace, v: GridFunction, eps: float,
                      delta: float) -> Functional:
    """C¹ compactly supported bump g(w) = −A·(1−s²)², s = ‖w−v‖_X/δ,
    scaled so that sup|g| ≤ ε and sup‖g'‖ ≤ ε (A = ε·min(1, δ/M) with
    M = max|bump'| = 8/(3√3))."""
    M = 8.0 / (3.0 * math.sqrt(3.0))
    A = eps * min(1.0, delta / M)
    metric = XMetric(space)

    def g_eval(w):
        s = metric.dist(w.values, v.values) / delta
        if s >= 1.0:
            return 0.0
        return -A * (1.0 - s * s) ** 2

    def g_deriv(w):
        d = metric.dist(w.values, v.values)
        s = d / delta
        if s >= 1.0 or d < 1e-15:
            return space.zeros()
        # d/dw of -A·bump(s): X-Riesz representative
        coeff = -A * (-4.0 * s * (1.0 - s * s)) / (delta * d)
        return GridFunction(space, coeff * (w.values - v.values))

    return Functional(eval=g_eval, derivative=g_deriv, name="dgz-bump",
                      symmetry_class="unverified")


def dgz_check(f: Functional, g: Functional, v: GridFunction, eps, *,
              u0: GridFunction = None, seed=0, n_samples=2000,
              slack=None) -> Certificate:
    """Report-only verification of a smooth-perturbation certificate:
    sup|g| ≤ ε, sup‖g'‖ ≤ ε on probes, and global minimality of f+g at v.
    Never raises; failures surface as a FAILED certificate with witness."""
    space = v.space
    metric = XMetric(space)
    ss = np.random.SeedSequence(seed)
    c_probe, c_ver = ss.spawn(2)
    rng = np.random.default_rng(c_probe)

    sup_g, sup_gp = 0.0, 0.0
    width = max(1.0, 2.0 * float(np.max(np.abs(v.values))))
    for i in range(max(200, n_samples // 10)):
        z = rng.standard_normal(space.n_cells)
        if i % 2 == 0:
            nz = metric.norm(z)
            w = v.values + (rng.uniform(0, 4) * z / nz if nz > 0 else z)
        else:
            w = v.values + width * (2.0 * (z % 1.0) - 1.0)
        wgf = GridFunction(space, w)
        sup_g = max(sup_g, abs(g(wgf)))
        if g.derivative is not None:
            sup_gp = max(sup_gp, norm_X(g.derivative(wgf)))
        else:
            d = rng.standard_normal(space.n_cells)
            nd = metric.norm(d)
            if nd > 0:
                t = 1e-6
                sup_gp = max(sup_gp, abs(g(GridFunction(space, w + t * d / nd))
                                         - g(wgf)) / t)

    fgv = f(v) + g(v)
    if slack is None:
        slack = default_slack(fgv)
    cert = Certificate(variant="DGZCheck", v=v, sigma=eps, rho=eps, seed=seed,
                       slack=slack)
    cert.extras["metric"] = metric.name
    cert.extras["inequality"] = "f(w)+g(w) >= f(v)+g(v)"
    cert.add_measured("‖v-v*‖_V", _measure_symmetry(v), _bound_a(space, eps, "D"))
    cert.add_measured("sup|g|", sup_g, eps)
    cert.add_measured("sup‖g'‖", sup_gp, eps)
    if u0 is not None:
        u_tilde, _ = _t_rho(u0, eps)
        cert.add_measured("‖v-u‖", metric.dist(v.values, u0.values),
                          eps + metric.dist(u_tilde.values, u0.values))

    def deficit(w):
        wgf = GridFunction(space, w)
        return fgv - f(wgf) - g(wgf)

    cert.violation = sample_inequality(
        deficit, space, v.values, n_samples=n_samples,
        seed=int(np.random.default_rng(c_ver).integers(2 ** 31)),
        radii=(4 * eps, eps, eps / 4), metric_norm=metric.norm)
    return cert.seal()


# ---------------------------------------------------------------------------
# constrained principle

def _constraint_set(space, G, n_eq, tol_con):
    gram = gram_matrix(space)

    def residuals(vals):
        u = GridFunction(space, vals)
        out = np.array([Gj(u) for Gj in G])
        return out

    def contains(vals):
        r = residuals(vals)
        eq_ok = np.all(np.abs(r[:n_eq]) <= tol_con)
        in_ok = np.all(r[n_eq:] >= -tol_con)
        return bool(eq_ok and in_ok)

    def project(vals):
        x = np.array(vals, float)
        for _ in range(60):
            u = GridFunction(space, x)
            r = np.array([Gj(u) for Gj in G])
            viol_eq = list(range(n_eq))
            viol_in = [j for j in range(n_eq, len(G)) if r[j] < -tol_con]
            act = [j for j in viol_eq if abs(r[j]) > tol_con] + viol_in
            if not act:
                return x
            J = np.stack([gram @ G[j].derivative(u).values for j in act])
            c = r[act]
            try:
                dx = -J.T @ np.linalg.solve(J @ J.T + 1e-12 * np.eye(len(act)), c)
            except np.linalg.LinAlgError:
                return x
            x = x + dx
        return x

    return SetOracle(contains=contains, project=project, kind="custom",
                     description="constraint set")


def constrained_symmetric_ekeland(f: Functional, G, n_eq, u0: GridFunction,
                                  eps, *, seed=0, n_samples=2000, slack=None,
                                  tol_con=1e-9,
                                  tol_sym=DEFAULT_TOL_SYM) -> Certificate:
    """Ekeland on the constraint set {G_j = 0 (j ≤ n_eq), G_j ≥ 0 (j > n_eq)},
    with Lagrange multipliers from sign-constrained least squares on the
    saturated constraints.

    With no constraints this reduces to the symmetric Ekeland principle II.
    """
    space = u0.space
    if len(G) == 0:
        return symmetric_ekeland(f, space, u0, eps, eps, variant="II",
                                 seed=seed, n_samples=n_samples, slack=slack)
    if f.derivative is None or any(Gj.derivative is None for Gj in G):
        raise AssumptionViolated("constrained principle needs derivative "
                                 "oracles for f and every G_j")
    metric = XMetric(space)
    dom = _constraint_set(space, G, n_eq, tol_con)
    ss = np.random.SeedSequence(seed)
    c_sym, c_inf, c_chain, c_ver = ss.spawn(4)

    # symmetry of the constrained problem: u^H stays feasible, f does not grow
    rng = np.random.default_rng(c_sym)
    fam = space.polarizers
    for _ in range(16):
        u = dom.project(np.abs(rng.standard_normal(space.n_cells)))
        if not dom.contains(u):
            continue
        H = fam[rng.integers(len(fam))]
        uh = polarize(GridFunction(space, u), H)
        if not dom.contains(uh.values):
            raise AssumptionViolated("constraint set is not polarization "
                                     "stable", witness=GridFunction(space, u))
        if f(uh) > f(GridFunction(space, u)) + tol_sym * (1 + abs(f(GridFunction(space, u)))):
            raise SymmetryViolation("f increased under polarization on C")

    u_start_vals = dom.project(np.abs(u0.values))
    u_start = GridFunction(space, u_start_vals)
    u_tilde_cand, seq = _t_rho(u_start, eps)
    # polarization keeps C by assumption; fall back if restoration drifted
    if dom.contains(u_tilde_cand.values):
        u_tilde = u_tilde_cand
    else:
        u_tilde, seq = u_start, []

    inf_est, log, argmin = estimate_inf(
        f, space, dom, np.random.default_rng(c_inf),
        extra_starts=[u_start.values, u_tilde.values])
    if f(u_start) > inf_est + eps * eps + 1e-12 * (1.0 + abs(inf_est)):
        raise BadStart("f(u0) exceeds inf_C_est + eps^2")

    v_vals, chain_log = _ekeland_chain(
        f, space, dom, u_tilde.values, eps, metric,
        np.random.default_rng(c_chain), anchor_vals=argmin, trust=eps)
    v = GridFunction(space, v_vals)
    fv = f(v)
    if slack is None:
        slack = default_slack(fv)

    # multipliers on the saturated constraints
    rvals = np.array([Gj(v) for Gj in G])
    saturated = [j for j in range(len(G)) if abs(rvals[j]) <= 10 * tol_con]
    lam = np.zeros(len(G))
    rep_f = f.derivative(v).values
    if saturated:
        reps = np.stack([G[j].derivative(v).values for j in saturated]).T
        gram = gram_matrix(space)
        L = np.linalg.cholesky(gram)
        A = L.T @ reps
        y = L.T @ rep_f
        sv = np.linalg.svd(A, compute_uv=False)
        if sv.size and sv.min() < 1e-10 * max(1.0, sv.max()):
            raise ConstraintDegeneracy("saturated constraint gradients are "
                                       "numerically dependent")
        lo = [-np.inf if j < n_eq else 0.0 for j in saturated]
        sol = lsq_linear(A, y, bounds=(lo, [np.inf] * len(saturated)))
        for k, j in enumerate(saturated):
            lam[j] = sol.x[k]
        resid_vec = rep_f - reps @ sol.x
    else:
        resid_vec = rep_f
    resid = float(np.sqrt(resid_vec @ gram_matrix(space) @ resid_vec))

    cert = Certificate(variant="Constrained", v=v, sigma=eps, rho=eps,
                       seed=seed, slack=slack, inf_est=inf_est,
                       inf_probe_log=log,
                       t_rho_sequence=polarizer_sequence_json(seq))
    cert.extras["metric"] = metric.name
    cert.extras["chain"] = chain_log
    cert.extras["multipliers"] = [float(x) for x in lam]
    cert.extras["saturated"] = saturated
    cert.add_measured("‖df-Σλ·dG‖_X'", resid, eps)
    cert.add_measured("f(v)-inf_est", fv - inf_est, eps * eps)
    cert.add_measured("‖v-v*‖_V", _measure_symmetry(v), _bound_a(space, eps, "C"))

    def deficit(w):
        return fv - eps * metric.dist(w, v_vals) - f(GridFunction(space, w))

    cert.violation = sample_inequality(
        deficit, space, v_vals, n_samples=n_samples,
        seed=int(np.random.default_rng(c_ver).integers(2 ** 31)),
        radii=(4 * eps, eps, eps / 4), metric_norm=metric.norm, domain=dom,
        extra_points=[argmin, u_start.values])
    return cert.seal()


# ---------------------------------------------------------------------------
# path-space symmetric minimax

def path_minimax(f: Functional, psi: GridFunction, m_nodes: int, eps, *,
                 seed=0, n_samples=600, slack=None,
                 tol_sym=DEFAULT_TOL_SYM) -> Certificate:
    """Symmetric mountain-pass point from discrete paths 0 → ψ.

    Paths are node lists (γ_0, ..., γ_m) with γ_0 = 0, γ_m = ψ; the path
    functional is f̂(γ) = max_t f(γ_t) with the sup-of-X-norms metric.  The
    engine checks the mountain-pass geometry, polarizes nodewise, runs the
    set-restricted Ekeland chain in path space and returns the argmax node
    with the three measured bounds."""
    space = psi.space
    if f.derivative is None:
        raise AssumptionViolated("path minimax needs a C1 derivative oracle")
    if np.any(psi.values < 0) or not is_family_fixed(psi):
        raise NotSymmetricInput("psi must be fixed by every registered "
                                "polarizer")
    ss = np.random.SeedSequence(seed)
    c_sym, c_opt, c_chain, c_ver = ss.spawn(4)
    check_symmetry(f, space, c_sym, tol_sym=tol_sym)

    zero = space.zeros()
    barrier = max(f(zero), f(psi))
    m = int(m_nodes)
    n_cells = space.n_cells
    metric = XMetric(space)

    def unpack(flat):
        inner = flat.reshape(max(m - 1, 0), n_cells)
        return [zero.values] + [inner[i] for i in range(m - 1)] + [psi.values]

    def fhat_nodes(nodes):
        return max(f(GridFunction(space, nd)) for nd in nodes)

    def fhat(flat):
        return fhat_nodes(unpack(flat))

    if m < 2:
        raise NoMountainPass("a two-node path cannot exceed its endpoints: "
                             "f̂ = max(f(0), f(ψ))")

    # initial straight path, then descend f̂ to estimate the minimax level
    ts = np.linspace(0.0, 1.0, m + 1)
    flat0 = np.concatenate([t * psi.values for t in ts[1:-1]])

    def node_gradient_moves(flat, step):
        nodes = unpack(flat)
        fv = [f(GridFunction(space, nd)) for nd in nodes]
        top = max(fv)
        cands = []
        for near in (0.0, 0.1 * (abs(top) + 1.0) * 1e-6, 0.05 * (top - min(fv) + 1e-12)):
            cand = np.array(flat)
            for i in range(1, m):
                if fv[i] >= top - near:
                    g = f.derivative(GridFunction(space, nodes[i])).values
                    ng = metric.norm(g)
                    if ng > 0:
                        cand[(i - 1) * n_cells:i * n_cells] -= step * g / ng
            if not np.array_equal(cand, flat):
                cands.append(cand)
        return cands

    def descend_fhat(flat, sweeps=200):
        cur = np.array(flat)
        val = fhat(cur)
        step = 0.25 * max(1.0, metric.norm(psi.values))
        for _ in range(sweeps):
            best, best_val = None, val
            for cand in node_gradient_moves(cur, step):
                cv = fhat(cand)
                if cv < best_val - 1e-14:
                    best, best_val = cand, cv
            if best is None:
                step *= 0.5
                if step < 1e-9:
                    break
            else:
                cur, val = best, best_val
        return cur, val

    flat_opt, c_est = descend_fhat(flat0)
    tol_geom = 1e-9 * (1.0 + abs(barrier))
    if c_est <= barrier + tol_geom:
        raise NoMountainPass(
            f"estimated minimax level {c_est:.6g} does not exceed "
            f"max(f(0), f(psi)) = {barrier:.6g}")

    # nodewise T_eps (identity on already-symmetric nodes)
    nodes = unpack(flat_opt)
    tilde_nodes, seq_all = [zero.values], []
    for nd in nodes[1:-1]:
        tnd, sq = _t_rho(GridFunction(space, nd), eps)
        tilde_nodes.append(tnd.values)
        seq_all.extend(sq)
    tilde_nodes.append(psi.values)
    flat_tilde = np.concatenate(tilde_nodes[1:-1]) if m > 1 else np.empty(0)
    if fhat(flat_tilde) > fhat(flat_opt) + 1e-9 * (1.0 + abs(c_est)):
        raise SymmetryViolation("nodewise polarization increased f̂")

    # path-space Ekeland chain with sigma = eps on the sup metric
    def path_dist(a, b):
        da = a.reshape(m - 1, n_cells)
        db = b.reshape(m - 1, n_cells)
        return max(metric.norm(da[i] - db[i]) for i in range(m - 1))

    rng_chain = np.random.default_rng(c_chain)
    cur = np.array(flat_tilde)
    f_cur = fhat(cur)
    for _ in range(40):
        vk = np.array(cur)
        fvk = f_cur

        def phi(flat):
            return fhat(flat) + eps * path_dist(flat, vk)

        improved = False
        step = max(eps, 0.05 * metric.norm(psi.values))
        for _ in range(60):
            cands = node_gradient_moves(cur, step)
            for _ in range(2):
                z = rng_chain.standard_normal(cur.shape)
                cands.append(cur + step * z / max(1e-12, path_dist(z + vk, vk)))
            best, best_val = None, phi(cur)
            for cand in cands:
                cv = phi(cand)
                if cv < best_val - 1e-13 * (1.0 + abs(best_val)):
                    best, best_val = cand, cv
            if best is None:
                step *= 0.5
                if step < 1e-10:
                    break
            else:
                cur = best
                improved = True
        f_cur = fhat(cur)
        if not improved or fvk - f_cur < 1e-12 * (1.0 + abs(fvk)):
            break

    nodes_final = unpack(cur)
    f_vals = [f(GridFunction(space, nd)) for nd in nodes_final]
    t_idx = int(np.argmax(f_vals))
    u_eps = GridFunction(space, nodes_final[t_idx])
    fu = f_vals[t_idx]
    if slack is None:
        slack = default_slack(fu)

    cert = Certificate(variant="PathMinimax", v=u_eps, sigma=eps, rho=eps,
                       seed=seed, slack=slack, inf_est=c_est,
                       t_rho_sequence=polarizer_sequence_json(seq_all))
    cert.extras["metric"] = "X-path-sup"
    cert.extras["argmax_node"] = t_idx
    cert.extras["m_nodes"] = m
    cert.extras["barrier"] = barrier
    cert.extras["path"] = [[float(x) for x in nd] for nd in nodes_final]
    cert.add_measured("‖u_ε-u_ε*‖_V", _measure_symmetry(u_eps), eps)
    cert.add_measured("‖df(u_ε)‖", norm_X(f.derivative(u_eps)),
                      eps + 1e-6)
    cert.add_measured("f(u_ε)-c_est", fu - c_est, eps)
    cert.add_measured("c_est-f(u_ε)", c_est - fu, 0.0)  # c ≤ f̂(γ_ε) = f(u_ε)

    rng_ver = np.random.default_rng(c_ver)
    maxv, arg = 0.0, None
    fhat_eps = fhat(cur)
    for i in range(n_samples):
        z = rng_ver.standard_normal(cur.shape)
        r = (4 * eps, eps, eps / 4)[i % 3]
        nz = path_dist(cur + z, cur)
        if nz == 0:
            continue
        cand = cur + r * z / nz
        d = fhat_eps - eps * path_dist(cand, cur) - fhat(cand)
        if d > maxv:
            maxv, arg = d, cand
    cert.violation = ViolationReport(
        n_samples=n_samples, max_violation=maxv,
        argmax_w=None if arg is None else GridFunction(
            space, unpack(arg)[int(np.argmax([f(GridFunction(space, nd))
                                              for nd in unpack(arg)]))]),
        seed=int(rng_ver.integers(2 ** 31)))
    return cert.seal()


# ---------------------------------------------------------------------------
# SQPS sequences (symmetric quasi-convex Palais-Smale)

def sqps_sequence(f: Functional, space: GridSpace, eps_schedule, *,
                  domain=None, minimizing_sequence=None, seed=0,
                  n_samples=2000, q_probes=48, slack=None, tol_q=1e-6,
                  tol_sym=DEFAULT_TOL_SYM):
    """Palais-Smale sequence with vanishing symmetry defect and
    asymptotically nonnegative second-order quotients.

    For each ε_h in the decreasing schedule the smooth principle runs with
    p = 2 and σ = ρ = ε_h from a dominating point of the bounded minimizing
    sequence; each step reports the slope bound, the symmetry residual, and
    the sampled minimum of quotient + 2ε_h‖ζ‖² (which the penalized-
    minimizer construction keeps ≥ 0 up to solver slack)."""
    if space.p != 2.0:
        raise AssumptionViolated("the SQPS pipeline requires the Hilbert "
                                 "case p = 2")
    eps_schedule = [float(e) for e in eps_schedule]
    if any(b >= a for a, b in zip(eps_schedule, eps_schedule[1:])):
        raise ValueError("eps_schedule must decrease strictly")
    dom = domain or whole_space(space)
    ss = np.random.SeedSequence(seed)
    c_sym, c_norm, *c_h = ss.spawn(2 + 2 * len(eps_schedule))
    check_symmetry(f, space, c_sym, tol_sym=tol_sym)

    # assumption (norm does not grow under polarization), sampled
    rng = np.random.default_rng(c_norm)
    fam = space.polarizers
    for _ in range(16):
        u = GridFunction(space, np.abs(rng.standard_normal(space.n_cells)))
        H = fam[rng.integers(len(fam))]
        if norm_X(polarize(u, H)) > norm_X(u) + 1e-9 * (1.0 + norm_X(u)):
            raise AssumptionViolated("‖u^H‖ ≤ ‖u‖ failed on a sample")

    if minimizing_sequence is None:
        inf0, _, argmin0 = estimate_inf(
            f, space, dom, np.random.default_rng(c_h[0]), extra_starts=[])

        def minimizing_sequence(h):
            return GridFunction(space, argmin0)

    out = []
    metric = XMetric(space)
    for h, eps_h in enumerate(eps_schedule):
        try:
            xi_h = _dominating_point(f, minimizing_sequence(h))
            if not dom.contains(xi_h.values):
                xi_h = GridFunction(space, dom.project(xi_h.values))
            cert = symmetric_borwein_preiss(
                f, space, xi_h, eps_h, eps_h, p_exp=2, domain=dom,
                seed=int(np.random.default_rng(c_h[2 * h]).integers(2 ** 31)),
                n_samples=n_samples, slack=slack, tol_sym=tol_sym)
        except (BadStart, ConvergenceFailure) as exc:
            exc.args = (f"schedule step h={h} (eps={eps_h}): {exc}",)
            raise
        v_h, eta_h = cert.v, cert.eta
        dve = metric.dist(v_h.values, eta_h.values)

        slope = strong_slope(f, v_h, radii=(1e-3, 1e-4, 1e-5),
                             n_samples=48,
                             seed=int(np.random.default_rng(
                                 c_h[2 * h + 1]).integers(2 ** 31)))
        slope_bound = eps_h * (2.0 * dve + 1e-3) + 1e-6 \
            + (cert.violation.max_violation / 1e-5 if cert.violation else 0.0)
        cert.add_measured("slope_upper", slope.upper, slope_bound)
        cert.extras["slope"] = {"lower": slope.lower, "upper": slope.upper,
                                "bound": slope_bound,
                                "C": slope_bound / eps_h}

        # second-order report: quotient + 2 eps ‖ζ‖² over (ζ, t) probes
        rng_q = np.random.default_rng(c_h[2 * h + 1])
        fv = f(v_h)
        min_margin, worst_t, n_done = math.inf, eps_h, 0
        for _ in range(q_probes):
            z = rng_q.standard_normal(space.n_cells)
            nz = norm_X(GridFunction(space, z))
            if nz == 0:
                continue
            zeta = GridFunction(space, rng_q.uniform(0.25, 2.0) * z / nz)
            nz2 = norm_X(zeta) ** 2
            for t in (eps_h, eps_h / 2, eps_h / 4):
                fp = f(v_h + t * zeta)
                fm = f(v_h - t * zeta)
                n_done += 1
                if math.isinf(fp) or math.isinf(fm):
                    continue
                margin = (fp + fm - 2.0 * fv) / t ** 2 + 2.0 * eps_h * nz2
                if margin < min_margin:
                    min_margin, worst_t = margin, t
        qrep = QBoundReport(eps_h=eps_h, min_margin=min_margin,
                            n_probes=n_done, worst_t=worst_t, tol_q=tol_q)
        cert.extras["q_bound"] = qrep.to_json_dict()
        out.append((cert, qrep))
    return out


# ---------------------------------------------------------------------------
# certificate re-verification

def verify_certificate(f: Functional, cert: Certificate, n_samples, *,
                       sampler_spec=None, domain=None, g=None,
                       seed=104729) -> ViolationReport:
    """Re-sample a certificate's variational inequality with an independent
    seed and a documented sampler (ball radii around v plus global probes).

    ``domain`` restores set-restricted quantifiers (variant I, constrained);
    ``g`` supplies the perturbation for DGZ certificates.  Pure and
    idempotent; a larger n_samples extends the smaller run's sample stream.
    """
    space = cert.v.space
    if cert.variant == "PathMinimax":
        raise AssumptionViolated(
            "path certificates carry a path-space inequality that cannot be "
            "reconstructed from the argmax node (the node is a near-saddle, "
            "not an Ekeland point); they are verified at emission")
    metric_name = cert.extras.get("metric", "X")
    if metric_name == "V":
        metric = VMetric(space)
    else:
        metric = XMetric(space)
    v_vals = cert.v.values
    fv = f(cert.v)
    sigma, rho = cert.sigma, cert.rho

    if cert.variant == "SymBP":
        eta = cert.eta.values
        dve = metric.dist(v_vals, eta) ** cert.p_exp

        def deficit(w):
            return (fv + sigma * (dve - metric.dist(w, eta) ** cert.p_exp)
                    - f(GridFunction(space, w)))
    elif cert.variant == "SymZhong":
        w_final = cert.extras["weight_at_v"]

        def deficit(w):
            return (fv - sigma * w_final * metric.dist(w, v_vals)
                    - f(GridFunction(space, w)))
    elif cert.variant == "DGZCheck":
        if g is None:
            raise AssumptionViolated("DGZ verification needs the g oracle")
        gv = g(cert.v)

        def deficit(w):
            wgf = GridFunction(space, w)
            return fv + gv - f(wgf) - g(wgf)
    else:

        def deficit(w):
            return (fv - sigma * metric.dist(w, v_vals)
                    - f(GridFunction(space, w)))

    spec = sampler_spec or {}
    radii = tuple(spec.get("radii", (4 * rho, rho, rho / 4)))
    width = spec.get("global_width")
    return sample_inequality(deficit, space, v_vals, n_samples=n_samples,
                             seed=seed, radii=radii, metric_norm=metric.norm,
                             domain=domain, width=width)
