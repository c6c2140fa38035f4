"""Deterministic local minimizers shared by the principle engines.

Everything here works on flat numpy arrays and plain callables; the engines
adapt GridFunction-valued functionals.  All routines are pure and seedless:
randomized multi-start decisions are made by the callers, which thread one
seeded generator through the whole run.
"""

from __future__ import annotations

import math

import numpy as np


def _finite(x):
    return math.isfinite(x)


def armijo_bb_minimize(fun, grad, x0, *, project=None, max_iter=400,
                       gtol=1e-12, c1=1e-4):
    """Projected gradient descent with Barzilai-Borwein steps and Armijo
    backtracking.  Returns (x, f(x)).  ``project`` must be idempotent."""
    x = np.array(x0, float)
    if project is not None:
        x = project(x)
    fx = fun(x)
    if not _finite(fx):
        return x, fx
    g = grad(x)
    step = 1.0 / max(1.0, float(np.linalg.norm(g)))
    for _ in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if project is not None:
            # projected stationarity: x - P(x - g) small
            crit = float(np.linalg.norm(x - project(x - g)))
        else:
            crit = gnorm
        if crit < gtol:
            break
        t = step
        accepted = False
        while t > 1e-18:
            xn = x - t * g
            if project is not None:
                xn = project(xn)
            fn = fun(xn)
            if _finite(fn) and fn <= fx - c1 * (g @ (x - xn)) and fn < fx:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break
        gn = grad(xn)
        s = xn - x
        y = gn - g
        sy = float(s @ y)
        step = float(s @ s) / sy if sy > 1e-18 else min(step * 2.0, 1e6)
        x, fx, g = xn, fn, gn
    return x, fx


def newton_polish(fun, grad, x, fx, *, iters=6, fd=1e-5):
    """Unconstrained Newton refinement with a finite-difference Hessian.

    Exact (to rounding) in one step for quadratics; steps are only accepted
    when they do not increase f, so nonconvex objectives stay safe."""
    n = len(x)
    for _ in range(iters):
        g = grad(x)
        gn = float(np.linalg.norm(g))
        if gn < 1e-14 * (1.0 + abs(fx)):
            break
        h = fd * (1.0 + float(np.max(np.abs(x))))
        H = np.empty((n, n))
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            H[:, j] = (grad(x + e) - grad(x - e)) / (2.0 * h)
        H = 0.5 * (H + H.T)
        try:
            d = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(H + 1e-10 * np.eye(n), -g, rcond=None)[0]
        improved = False
        for t in (1.0, 0.5, 0.25):
            xn = x + t * d
            fn = fun(xn)
            if _finite(fn) and fn <= fx:
                x, fx = xn, fn
                improved = True
                break
        if not improved:
            break
    return x, fx


def active_set_newton(fun, grad, x, fx, lo, hi, *, iters=6, fd=1e-5, tol=1e-12):
    """Newton refinement on the free coordinates of a box-constrained point."""
    n = len(x)
    for _ in range(iters):
        g = grad(x)
        at_lo = (x <= lo + tol) & (g > 0)
        at_hi = (x >= hi - tol) & (g < 0)
        free = ~(at_lo | at_hi)
        if not np.any(free):
            break
        gf = g[free]
        if float(np.linalg.norm(gf)) < 1e-14 * (1.0 + abs(fx)):
            break
        idx = np.flatnonzero(free)
        h = fd * (1.0 + float(np.max(np.abs(x))))
        H = np.empty((len(idx), len(idx)))
        for c, j in enumerate(idx):
            e = np.zeros(n)
            e[j] = h
            H[:, c] = ((grad(x + e) - grad(x - e)) / (2.0 * h))[idx]
        H = 0.5 * (H + H.T)
        try:
            d = np.linalg.solve(H, -gf)
        except np.linalg.LinAlgError:
            break
        improved = False
        for t in (1.0, 0.5, 0.25):
            xn = x.copy()
            xn[idx] += t * d
            xn = np.clip(xn, lo, hi)
            fn = fun(xn)
            if _finite(fn) and fn <= fx:
                x, fx = xn, fn
                improved = True
                break
        if not improved:
            break
    return x, fx


def compass_minimize(fun, x0, *, scale, project=None, min_step=1e-12,
                     max_sweeps=400, f_atol=0.0):
    """Coordinate pattern search; derivative-free, deterministic.

    Full ±e_i sweep per iteration, move to the best improving point, halve
    the step when none improves.  ``f_atol`` ends the search once a sweep's
    best improvement drops below it (callers pass their acceptance
    threshold so the search does not chase sub-threshold gains)."""
    x = np.array(x0, float)
    if project is not None:
        x = project(x)
    fx = fun(x)
    if not _finite(fx):
        return x, fx
    step = float(scale)
    n = len(x)
    for _ in range(max_sweeps):
        best_f, best_x = fx, None
        for j in range(n):
            for s in (step, -step):
                xn = x.copy()
                xn[j] += s
                if project is not None:
                    xn = project(xn)
                fn = fun(xn)
                if _finite(fn) and fn < best_f:
                    best_f, best_x = fn, xn
        if best_x is None:
            step *= 0.5
            if step < min_step:
                break
        else:
            if fx - best_f < f_atol and step < float(scale) / 8.0:
                x, fx = best_x, best_f
                break
            x, fx = best_x, best_f
    return x, fx


def minimize_multistart(fun, grad, starts, *, project=None, box=None,
                        compass_scale=0.25, gtol=1e-12, max_iter=400,
                        f_atol=0.0):
    """Best local minimum over the given starts.

    Smooth path (grad given): BB descent, then Newton polish (active-set
    Newton for box domains, plain Newton when unconstrained).  Derivative
    free path: compass search.  Returns (x, f(x))."""
    best_x, best_f = None, math.inf
    for x0 in starts:
        x0 = np.asarray(x0, float)
        if grad is not None:
            x, fx = armijo_bb_minimize(fun, grad, x0, project=project,
                                       gtol=gtol, max_iter=max_iter)
            if box is not None:
                x, fx = active_set_newton(fun, grad, x, fx, box[0], box[1])
            elif project is None:
                x, fx = newton_polish(fun, grad, x, fx)
        else:
            x, fx = compass_minimize(fun, x0, scale=compass_scale,
                                     project=project, f_atol=f_atol)
        if _finite(fx) and fx < best_f:
            best_x, best_f = x, fx
    if best_x is None:
        x0 = np.asarray(starts[0], float)
        return (project(x0) if project is not None else x0), fun(x0)
    return best_x, best_f
