import math

import numpy as np
import pytest

from symvar import (AssumptionViolated, Ball, Drop, Functional, GridFunction,
                    InvalidEpsilon, NotBoundedBelow, Petal,
                    SemilinearNonlinearity, SeparationViolated, SetOracle,
                    caristi_fixed_point, clarke_fixed_point,
                    dirichlet_integrand, drop_membership, dual_norm,
                    forced_dirichlet_integrand, lower_derivative, make_grid,
                    norm_V, norm_X, petal_inclusions, petal_membership,
                    polarize, quasilinear_energy, quasilinear_experiment,
                    quasilinear_functional, quasilinear_residual, schwarz,
                    semilinear_experiment, symmetric_drop_point,
                    symmetric_petal_point, theta)
from symvar.applications import (euler_lagrange_residual, h_minus1_norm,
                                 quasilinear_residual_vector,
                                 semilinear_functional)
from symvar.funcspace import gram_matrix, laplacian_matrix
from symvar.principles import box_set

from conftest import random_S


# ---------------------------------------------------------------------------
# quasilinear energy and residual

def test_quasilinear_zero_function(g1d4):
    I = dirichlet_integrand()
    assert quasilinear_energy(I, g1d4.zeros()) == 0.0
    v = g1d4.function([1.0, -2.0, 0.5, 0.0])
    assert quasilinear_residual(I, g1d4.zeros(), v) == 0.0


def test_quasilinear_two_cell_stencil():
    # hand-expanded: E(u) = m/2·[u0² + (u1−u0)² + u1²]/h², residual = u·A·v
    g = make_grid(1, 2, 1.0, 2, 4)
    I = dirichlet_integrand()
    u = g.function([0.7, -0.3])
    A = laplacian_matrix(g)
    assert quasilinear_energy(I, u) == pytest.approx(
        0.5 * float(u.values @ A @ u.values), abs=1e-14)
    v = g.function([0.2, 0.9])
    assert quasilinear_residual(I, u, v) == pytest.approx(
        float(u.values @ A @ v.values), abs=1e-14)


def test_quasilinear_energy_equals_gradient_part(g1d8, g2d4):
    I = dirichlet_integrand()
    rng = np.random.default_rng(0)
    for g in (g1d8, g2d4):
        A = laplacian_matrix(g)
        for _ in range(20):
            u = g.function(rng.standard_normal(g.n_cells))
            assert quasilinear_energy(I, u) == pytest.approx(
                0.5 * float(u.values @ A @ u.values), rel=1e-12)


def test_quasilinear_theta_invariance_on_S(g1d8):
    # for u in the cone, Θ(u) = u: radial-structure equality is exact
    I = forced_dirichlet_integrand(0.5)
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = random_S(g1d8, rng)
        assert quasilinear_energy(I, theta(u)) == quasilinear_energy(I, u)


def test_quasilinear_polarization_monotone_and_mirror_exact(g1d8):
    I = forced_dirichlet_integrand(0.5)
    rng = np.random.default_rng(2)
    for _ in range(30):
        u = random_S(g1d8, rng)
        E = quasilinear_energy(I, u)
        for H in g1d8.polarizers:
            assert quasilinear_energy(I, polarize(u, H)) <= E + 1e-9
        # full mirror swap: the edge multiset is reflected, energy exact
        flipped = g1d8.function(u.values[::-1])
        assert quasilinear_energy(I, flipped) == pytest.approx(E, rel=1e-12)


def test_quasilinear_growth_validation():
    I = dirichlet_integrand()
    assert I.validate()
    bad = dirichlet_integrand()
    bad.L = lambda s, t: -1.0
    with pytest.raises(AssumptionViolated):
        bad.validate()


def test_dual_norm_two_routes_agree(g1d8):
    rng = np.random.default_rng(3)
    for _ in range(4):
        r = rng.standard_normal(8)
        a = dual_norm(g1d8, r, method="solve")
        b = dual_norm(g1d8, r, method="ascent", seed=5)
        assert abs(a - b) <= 1e-8 * (1.0 + max(a, b))


def test_quasilinear_experiment_torsion_oracle(g1d8):
    I = forced_dirichlet_integrand(1.0)
    eps = 0.01
    cert = quasilinear_experiment(I, g1d8, eps, seed=3, n_samples=1500)
    assert cert.status == "PASS"
    assert cert.measured["‖w_ε‖_dual"][0] <= eps
    assert cert.measured["‖u_ε-u_ε*‖_V"][0] <= eps
    # independent oracle: the discrete torsion function A u = c·m·1
    A = laplacian_matrix(g1d8)
    ustar = np.linalg.solve(A, g1d8.cell_measure * np.ones(8))
    assert np.max(np.abs(cert.v.values - ustar)) < 1e-6
    assert abs(cert.extras["dual_norm_solve"]
               - cert.extras["dual_norm_ascent"]) <= 1e-8


# ---------------------------------------------------------------------------
# lower derivative

def test_lower_derivative_identity():
    for s in (-1.0, 0.0, 2.5):
        assert lower_derivative(lambda x: x, s, 1e-3) == pytest.approx(1.0, abs=1e-9)


def test_lower_derivative_cubic_at_zero():
    val = lower_derivative(lambda x: x ** 3, 0.0, 1e-3)
    assert 0.0 <= val <= 1e-6        # min(t²+tτ+τ²) ≥ 0, shrinking with δ


def test_lower_derivative_abs_at_zero():
    val = lower_derivative(lambda x: abs(x), 0.0, 1e-3)
    assert -1.0 <= val <= -0.99      # sign-pattern infimum is −1


def test_lower_derivative_logged_schedule():
    val, log = lower_derivative(lambda x: x ** 3, 0.0, 1e-2, return_log=True)
    assert len(log) == 3
    assert log[-1][1] == val
    deltas = [d for d, _ in log]
    assert deltas == sorted(deltas, reverse=True)


# ---------------------------------------------------------------------------
# semilinear experiment

def _lin_damping():
    return SemilinearNonlinearity(g=lambda s: -s, G=lambda s: -0.5 * s * s,
                                  a1=1.0, a2=2.0, b=1.0, p=3.0,
                                  name="linear_damping")


def _cubic():
    return SemilinearNonlinearity(g=lambda s: s ** 3,
                                  G=lambda s: 0.25 * s ** 4,
                                  a1=0.0, a2=0.0, b=3.0, p=4.0, name="cubic")


def test_semilinear_zero_nonlinearity(g1d8):
    N = SemilinearNonlinearity(g=lambda s: 0.0, G=lambda s: 0.0, a1=1.0,
                               a2=1.0, b=1.0, p=3.0, name="zero")
    certs = semilinear_experiment(N, g1d8, [0.1, 0.05], seed=0, n_samples=300,
                                  q_probes=8, second_order_samples=8)
    for c in certs:
        assert c.status == "PASS"
        assert c.extras["psi_Hminus1"] <= 1e-8
        assert norm_X(c.v) <= 0.2


def test_semilinear_linear_closed_form(g1d8):
    # g(s) = −s: f strictly convex with unique minimizer from (A + M)u = 0
    N = _lin_damping()
    certs = semilinear_experiment(N, g1d8, [0.1, 0.05], seed=1, n_samples=300,
                                  q_probes=8, second_order_samples=16)
    A = laplacian_matrix(g1d8)
    m = g1d8.cell_measure
    for c in certs:
        assert c.status == "PASS"
        ustar = np.linalg.solve(A + m * np.eye(8), np.zeros(8))
        assert np.max(np.abs(c.v.values - ustar)) <= 1e-6
        assert c.extras["psi_Hminus1"] <= 1e-6
        assert c.measured["‖v-v*‖_V"][0] <= 1e-6
        # second-order form is wAw + m‖w‖² ≥ 0 for every direction
        assert c.extras["second_order_min"] >= 0.0


def test_semilinear_oddness_enforced():
    bad = SemilinearNonlinearity(g=lambda s: s + 1.0, G=lambda s: 0.5 * s * s + s,
                                 a1=2.0, a2=1.0, b=1.0, p=3.0)
    with pytest.raises(AssumptionViolated):
        bad.validate()


def test_semilinear_cubic_box(g1d8):
    certs = semilinear_experiment(_cubic(), g1d8, [0.1, 0.05, 0.01],
                                  box=box_set(g1d8, 0.0, 0.5), seed=2,
                                  n_samples=300, q_probes=12,
                                  second_order_samples=16)
    for c, eps_h in zip(certs, (0.1, 0.05, 0.01)):
        assert c.status == "PASS"
        assert c.extras["second_order_min"] >= -1e-6 - 2.0 * eps_h
        assert c.extras["q_bound"]["ok"]


def test_semilinear_unbounded_detection(g1d8):
    with pytest.raises(NotBoundedBelow):
        semilinear_experiment(_cubic(), g1d8, [0.1], seed=0, n_samples=50)


def test_semilinear_h_minus1_solve(g1d8):
    rng = np.random.default_rng(4)
    psi = rng.standard_normal(8)
    A = laplacian_matrix(g1d8)
    direct = math.sqrt(psi @ np.linalg.solve(A, psi))
    assert h_minus1_norm(g1d8, psi) == pytest.approx(direct, rel=1e-12)


def test_semilinear_equivariance_invariants(g1d8):
    # f(Θu) = f(u) and gradient-energy invariance under the full mirror
    N = _lin_damping()
    f = semilinear_functional(N, g1d8)
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = random_S(g1d8, rng)
        assert f(theta(u)) == f(u)
        assert norm_X(g1d8.function(u.values[::-1])) == pytest.approx(
            norm_X(u), rel=1e-13)


def test_gradient_norm_exhaustive_small_grids():
    # β=0 full-swap mirrors preserve norm_X exactly; every polarization is
    # nonexpansive (exhaustion over grids with ≤ 6 cells)
    rng = np.random.default_rng(6)
    for n in (2, 4, 6):
        g = make_grid(1, n, 1.0, 2, 4)
        for _ in range(50):
            u = random_S(g, rng)
            nu = norm_X(u)
            assert norm_X(g.function(u.values[::-1])) == pytest.approx(
                nu, rel=1e-12)
            for H in g.polarizers:
                assert norm_X(polarize(u, H)) <= nu + 1e-12


# ---------------------------------------------------------------------------
# fixed points

def _caristi_pair(space, rate=2.0, lam=0.5):
    def F(u):
        return GridFunction(space, lam * u.values)

    f = Functional(eval=lambda u: rate * norm_X(u),
                   symmetry_class="polarization-nonincreasing",
                   lower_bound=0.0, name="caristi-potential")
    return F, f


def test_caristi_contraction(g1d4):
    F, f = _caristi_pair(g1d4)
    xi, resid, cert = caristi_fixed_point(F, f, 0.25, g1d4, seed=0,
                                          n_samples=2000,
                                          return_certificate=True)
    info = cert.extras["caristi"]
    assert info["slack"] <= 1e-6
    assert resid <= info["slack"] / (1 - 0.25) + 1e-12
    assert norm_X(xi) <= 1e-6


def test_caristi_identity_map(g1d4):
    def F(u):
        return u

    f = Functional(eval=lambda u: norm_X(u),
                   symmetry_class="polarization-nonincreasing",
                   lower_bound=0.0, name="pot")
    xi, resid = caristi_fixed_point(F, f, 0.3, g1d4, seed=1, n_samples=500)
    assert resid == 0.0


def test_caristi_epsilon_scaling(g1d4):
    F, f = _caristi_pair(g1d4)
    for eps in (0.1, 0.5):
        xi, resid, cert = caristi_fixed_point(F, f, eps, g1d4, seed=2,
                                              n_samples=800,
                                              return_certificate=True)
        info = cert.extras["caristi"]
        # the recorded bound is exactly slack/(1−ε)
        assert info["bound"] == pytest.approx(info["slack"] / (1 - eps))
        assert resid <= info["bound"] + 1e-12


def test_caristi_epsilon_range(g1d4):
    F, f = _caristi_pair(g1d4)
    with pytest.raises(InvalidEpsilon):
        caristi_fixed_point(F, f, 1.0, g1d4)


def test_caristi_condition_violated(g1d4):
    def F(u):                       # moves far: violates the descent bound
        return GridFunction(g1d4, u.values + 5.0)

    f = Functional(eval=lambda u: norm_X(u),
                   symmetry_class="polarization-nonincreasing",
                   lower_bound=0.0, name="pot")
    with pytest.raises(AssumptionViolated):
        caristi_fixed_point(F, f, 0.2, g1d4, seed=0)


def test_clarke_linear_contraction(g1d4):
    sig = 0.4

    def F(u):
        return GridFunction(g1d4, sig * u.values)

    xi, resid, cert = clarke_fixed_point(F, sig, 0.3, g1d4, seed=0,
                                         n_samples=1200,
                                         return_certificate=True)
    info = cert.extras["clarke"]
    assert resid <= info["slack"] / (1 - sig - 0.3) + 1e-12
    assert norm_V(xi) <= 1e-6


def test_clarke_affine_to_symmetric_target(g1d4):
    # the target must be constant on polarizer orbits for the equivariance
    # F(u^H) = F(u)^H to hold exactly: affine contraction toward c·1
    sig = 0.5
    a = g1d4.function(0.7 * np.ones(4))

    def F(u):
        return GridFunction(g1d4, a.values + sig * (u.values - a.values))

    xi, resid, cert = clarke_fixed_point(F, sig, 0.2, g1d4, seed=1,
                                         n_samples=1200,
                                         return_certificate=True)
    assert norm_V(xi - a) <= 0.05
    assert cert.measured["‖v-v*‖_V"][0] <= cert.measured["‖v-v*‖_V"][1]


def test_clarke_equivariance_violation(g1d4):
    bias = np.array([1.0, 0.0, 0.0, 0.0])

    def F(u):                        # translation breaks F(u^H) = F(u)^H
        return GridFunction(g1d4, 0.3 * u.values + bias)

    with pytest.raises(AssumptionViolated):
        clarke_fixed_point(F, 0.3, 0.2, g1d4, seed=0)


def test_clarke_epsilon_range(g1d4):
    def F(u):
        return GridFunction(g1d4, 0.5 * u.values)

    with pytest.raises(InvalidEpsilon):
        clarke_fixed_point(F, 0.5, 0.6, g1d4)


# ---------------------------------------------------------------------------
# drops and petals

def test_petal_membership_examples(g1d2):
    x0 = g1d2.function([2.0, 1.0])
    x1 = g1d2.function([0.2, 0.1])
    P = Petal(0.5, x0, x1)
    assert petal_membership(x1, P)          # y = x1 always belongs
    far = g1d2.function([50.0, 50.0])
    assert not petal_membership(far, P)


def test_drop_membership_examples(g1d2):
    center = g1d2.function([3.0, 3.0])
    B = Ball(center, 1.0)
    x = g1d2.function([0.0, 0.0])
    D = Drop(x, B)
    assert drop_membership(x, D)            # t = 0
    assert drop_membership(center, D)       # t = 1, b = center
    mid = g1d2.function([1.5, 1.5])
    assert drop_membership(mid, D)
    assert not drop_membership(g1d2.function([3.0, -3.0]), D)


def test_membership_agrees_with_parameter_scan(g1d2):
    rng = np.random.default_rng(8)
    center = g1d2.function([2.0, 1.0])
    B = Ball(center, 0.8)
    x = g1d2.function([0.3, 0.0])
    D = Drop(x, B)
    # brute-force parameterization scan oracle over (t, b)
    ts = np.linspace(0.0, 1.0, 101)
    thetas = np.linspace(0, 2 * np.pi, 101)
    pts = []
    for t in ts:
        for th in thetas:
            b = center.values + 0.8 * np.array([np.cos(th), np.sin(th)])
            pts.append(x.values + t * (b - x.values))
    pts = np.array(pts)
    for _ in range(60):
        y = rng.uniform(-1, 4, 2)
        scan_inside = np.min(np.linalg.norm(pts - y, axis=1)) < 5e-3
        pred = drop_membership(g1d2.function(y), D, tol=1e-10)
        if pred != scan_inside:
            # disagreement only allowed within the scan resolution band
            assert np.min(np.linalg.norm(pts - y, axis=1)) < 2e-2


def test_petal_inclusions_sampled(g1d2):
    x0 = g1d2.function([2.0, 1.0])
    x1 = g1d2.function([0.2, 0.1])
    for eps in (0.25, 0.5, 0.75):
        rep = petal_inclusions(Petal(eps, x0, x1), n_samples=1000, seed=0)
        assert rep["ball_violations"] == 0
        assert rep["drop_violations"] == 0


def _halfplane_C():
    def contains(v):
        return bool(np.all(v >= -1e-12) and v[0] + v[1] <= 1.0 + 1e-12)

    def project(v):
        w = np.maximum(v, 0.0)
        ex = w[0] + w[1] - 1.0
        if ex > 0:
            w = w - ex / 2
        return np.maximum(w, 0.0)

    return SetOracle(contains=contains, project=project, kind="custom",
                     description="{u >= 0, u0+u1 <= 1}")


def test_symmetric_drop_point_hand_geometry(g1d2):
    # B: symmetric segment on the diagonal at L² distance 3 from C;
    # the drop from the origin meets C in the segment to (0.5, 0.5)
    a_min = 0.5 + 3.0 / np.sqrt(2.0)
    B = Ball(g1d2.function([a_min + 1 / np.sqrt(2)] * 2), 1.0, symmetric=True)
    C = _halfplane_C()
    x = g1d2.function([0.0, 0.0])
    cert = symmetric_drop_point(x, B, C, 0.05, seed=2, n_samples=600,
                                minimality_samples=10000)
    assert cert.status == "PASS"
    assert np.max(np.abs(cert.v.values - 0.5)) < 1e-6
    assert cert.extras["drop_minimality"]["second_points"] == 0
    assert cert.extras["drop_minimality"]["d_est"] >= 2.9


def test_symmetric_drop_point_singleton(g1d2):
    a_min = 0.5 + 3.0 / np.sqrt(2.0)
    B = Ball(g1d2.function([a_min + 1 / np.sqrt(2)] * 2), 1.0, symmetric=True)
    x = g1d2.function([0.4, 0.4])

    def contains(v):
        return bool(np.max(np.abs(v - x.values)) <= 1e-9)

    C = SetOracle(contains=contains, project=lambda v: np.array(x.values),
                  kind="custom", description="singleton")
    cert = symmetric_drop_point(x, B, C, 0.05, seed=0, n_samples=200,
                                minimality_samples=2000)
    assert cert.status == "PASS"
    assert np.array_equal(cert.v.values, x.values)


def test_symmetric_drop_point_separation_guard(g1d2):
    a_min = 0.5 + 3.0 / np.sqrt(2.0)
    B = Ball(g1d2.function([a_min + 1 / np.sqrt(2)] * 2), 1.0, symmetric=True)
    with pytest.raises(SeparationViolated):
        symmetric_drop_point(g1d2.function([0.0, 0.0]), B, _halfplane_C(),
                             0.9, seed=0)


def _diag_ray_C():
    def contains(v):
        return bool(abs(v[0] - v[1]) <= 1e-9 and v[0] >= 1.0 - 1e-12)

    def project(v):
        a = max(1.0, 0.5 * (v[0] + v[1]))
        return np.array([a, a])

    return SetOracle(contains=contains, project=project, kind="custom",
                     description="{(a,a): a >= 1}")


def test_symmetric_petal_point_l1_geometry(g1d2):
    # 2-cell ℓ¹: C the diagonal ray, y = 0, x = (1,1): d(y,C) = 2 = ‖x−y‖₁
    def l1(vals):
        return float(np.sum(np.abs(vals)))

    x = g1d2.function([1.0, 1.0])
    y = g1d2.function([0.0, 0.0])
    cert = symmetric_petal_point(x, y, _diag_ray_C(), 0.3, norm=l1, seed=1,
                                 n_samples=500, minimality_samples=10000)
    assert cert.status == "PASS"
    assert np.max(np.abs(cert.v.values - 1.0)) < 1e-6
    assert cert.extras["petal_member"]
    assert cert.extras["petal_minimality"]["second_points"] == 0
    assert cert.extras["petal_minimality"]["d_est"] == pytest.approx(2.0)
    # membership follows from the recorded exact comparison (T_ε x = x)
    assert cert.measured["ε‖ξ-x‖+‖ξ-y‖-‖x-y‖"][0] <= 1e-12


def test_symmetric_petal_point_singleton(g1d2):
    x = g1d2.function([1.0, 1.0])
    y = g1d2.function([0.0, 0.0])

    def contains(v):
        return bool(np.max(np.abs(v - x.values)) <= 1e-9)

    C = SetOracle(contains=contains, project=lambda v: np.array(x.values),
                  kind="custom", description="singleton")
    cert = symmetric_petal_point(x, y, C, 0.2, seed=0, n_samples=200,
                                 minimality_samples=1000)
    assert cert.status == "PASS"
    assert np.array_equal(cert.v.values, x.values)


def test_symmetric_petal_point_requires_symmetric_inputs(g1d2):
    x = g1d2.function([1.0, 2.0])      # not fixed by the mirror polarizer
    y = g1d2.function([0.0, 0.0])
    with pytest.raises(Exception) as exc:
        symmetric_petal_point(x, y, _diag_ray_C(), 0.2, seed=0)
    from symvar import NotSymmetricInput
    assert isinstance(exc.value, (NotSymmetricInput, AssumptionViolated))
