"""Fixed points and the drop / flower-petal geometry.

Both fixed-point results ride on the symmetric principle: the descent-map
residual is bounded by the verified inequality deficit divided by (1-eps)
(or (1-sigma-eps) for the directional contraction).  The geometric results
produce a point whose drop (or petal) meets the closed set only in itself,
checked by dense sampling.
"""

import numpy as np

from symvar import (Ball, Petal, SetOracle, caristi_fixed_point,
                    clarke_fixed_point, make_grid, norm_X,
                    petal_inclusions, symmetric_drop_point,
                    symmetric_petal_point)
from symvar.funcspace import Functional, GridFunction

g4 = make_grid(1, 4, 1.0, 2, 4)

print("== Caristi-style fixed point of a contraction ==")
F = lambda u: 0.5 * u
pot = Functional(eval=lambda u: 2.0 * norm_X(u),
                 symmetry_class="polarization-nonincreasing",
                 lower_bound=0.0, name="potential")
xi, resid, cert = caristi_fixed_point(F, pot, eps=0.25, space=g4, seed=0,
                                      n_samples=2000, return_certificate=True)
info = cert.extras["caristi"]
print("residual ||F(xi)-xi|| =", resid, " bound slack/(1-eps) =",
      info["bound"])

print("\n== directional-contraction fixed point (V metric) ==")
Fc = lambda u: GridFunction(g4, 0.4 * u.values)
xi2, resid2, cert2 = clarke_fixed_point(Fc, 0.4, eps=0.3, space=g4, seed=1,
                                        n_samples=2000,
                                        return_certificate=True)
print("residual:", resid2, " bound:", cert2.extras["clarke"]["bound"])

g2 = make_grid(1, 2, 1.0, 2, 4)

print("\n== petal inclusions (ball-in-petal and drop-in-petal) ==")
rep = petal_inclusions(Petal(0.5, g2.function([2.0, 1.0]),
                             g2.function([0.2, 0.1])),
                       n_samples=1000, seed=2)
print("violations over 1000 boundary samples:",
      rep["ball_violations"], rep["drop_violations"],
      " worst margin:", rep["worst_margin"])

print("\n== drop point: segment ball at distance 3 from a half-plane ==")
a_min = 0.5 + 3.0 / np.sqrt(2.0)
B = Ball(g2.function([a_min + 1 / np.sqrt(2)] * 2), 1.0, symmetric=True)


def _contains(v):
    return bool(np.all(v >= -1e-12) and v[0] + v[1] <= 1.0 + 1e-12)


def _project(v):
    w = np.maximum(v, 0.0)
    ex = w[0] + w[1] - 1.0
    if ex > 0:
        w = w - ex / 2
    return np.maximum(w, 0.0)


C = SetOracle(contains=_contains, project=_project, kind="custom",
              description="{u >= 0, u0+u1 <= 1}")
cert3 = symmetric_drop_point(g2.function([0.0, 0.0]), B, C, 0.05, seed=3,
                             n_samples=600, minimality_samples=4000)
print("xi =", cert3.v.values, " (hand geometry: (0.5, 0.5))")
print("second intersection points found:",
      cert3.extras["drop_minimality"]["second_points"])

print("\n== petal point in the 2-cell l1 geometry ==")


def _ray_contains(v):
    return bool(abs(v[0] - v[1]) <= 1e-9 and v[0] >= 1.0 - 1e-12)


Cray = SetOracle(contains=_ray_contains,
                 project=lambda v: np.full(2, max(1.0, 0.5 * (v[0] + v[1]))),
                 kind="custom", description="{(a,a): a >= 1}")
cert4 = symmetric_petal_point(g2.function([1.0, 1.0]),
                              g2.function([0.0, 0.0]), Cray, 0.3,
                              norm=lambda v: float(np.sum(np.abs(v))),
                              seed=4, n_samples=500, minimality_samples=4000)
print("xi =", cert4.v.values, " (hand geometry: (1, 1)); petal member:",
      cert4.extras["petal_member"])
