"""Slow, direct reference computations used to cross-check the fast paths.

None of these call into the FFT-based code; they work from the defining
sums so they can serve as independent oracles in tests and ``selftest``.
"""
import math

import numpy as np


def direct_dft2(p):
    p = np.asarray(p, dtype=float)
    D0, D1 = p.shape
    out = np.zeros((D0, D1), dtype=complex)
    for k0 in range(D0):
        for k1 in range(D1):
            acc = 0j
            for n0 in range(D0):
                for n1 in range(D1):
                    acc += p[n0, n1] * complex(math.cos(-2 * math.pi * (k0 * n0 / D0 + k1 * n1 / D1)),
                                               math.sin(-2 * math.pi * (k0 * n0 / D0 + k1 * n1 / D1)))
            out[k0, k1] = acc
    return out


def direct_correlate(theta, x):
    """out[d] = sum_u theta[u] x[u - d] (mod D), by explicit summation."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    D0, D1 = theta.shape
    out = np.zeros((D0, D1))
    for d0 in range(D0):
        for d1 in range(D1):
            acc = 0.0
            for u0 in range(D0):
                for u1 in range(D1):
                    acc += theta[u0, u1] * x[(u0 - d0) % D0, (u1 - d1) % D1]
            out[d0, d1] = acc
    return out


def shift_matrix(x):
    """Matrix C with (C @ theta.ravel())[d] = sum_u theta[u] x[u + d].

    This is the response of filter theta to every circular shift of x, the
    data term used by the learning objective.
    """
    x = np.asarray(x, dtype=float)
    D0, D1 = x.shape
    C = np.zeros((D0 * D1, D0 * D1))
    for d0 in range(D0):
        for d1 in range(D1):
            row = np.roll(np.roll(x, -d0, axis=0), -d1, axis=1)
            C[d0 * D1 + d1] = row.ravel()
    return C


def direct_objective(theta, X, y, theta_model, lambda1, lambda2):
    L = X.shape[0]
    total = 0.0
    for i in range(L):
        C = shift_matrix(X[i])
        total += np.sum((C @ theta[i].ravel() - y.ravel()) ** 2)
    norms = np.sqrt(np.sum(theta.reshape(L, -1) ** 2, axis=0))
    total += lambda1 * norms.sum()
    total += lambda2 * np.sum((theta - theta_model) ** 2)
    return float(total)


def golden_section(f, a, b, tol=1e-12, max_iter=500):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2


def prox_by_line_search(g, lambda1, mu):
    """Minimize lambda1 ||v|| + mu/2 ||v - g||^2 along the ray through g."""
    g = np.asarray(g, dtype=float)
    ng = float(np.sqrt(np.sum(g * g)))
    if ng == 0.0:
        return np.zeros_like(g)

    def phi(t):
        return lambda1 * t + 0.5 * mu * (t - ng) ** 2

    t = golden_section(phi, 0.0, ng)
    # the optimum may sit on the boundary t = 0
    if phi(0.0) <= phi(t):
        t = 0.0
    return g * (t / ng)


def prox_objective(v, g, lambda1, mu):
    return lambda1 * float(np.linalg.norm(v)) + 0.5 * mu * float(np.sum((v - g) ** 2))


def proximal_gradient_oracle(X, y, theta_model, lambda1, lambda2, iters=20000, tol=1e-15):
    """Accelerated proximal gradient on the multi-channel objective.

    Works with explicit shift matrices, so it shares nothing with the ADMM
    path.  Returns (theta, best objective value).
    """
    X = np.asarray(X, dtype=float)
    L = X.shape[0]
    shape = X.shape
    Cs = [shift_matrix(X[i]) for i in range(L)]
    yv = np.asarray(y, dtype=float).ravel()
    m = np.asarray(theta_model, dtype=float).reshape(L, -1)
    lip = max(2 * (np.linalg.norm(C, 2) ** 2 + lambda2) for C in Cs)
    step = 1.0 / lip

    def smooth_grad(t):
        g = np.empty_like(t)
        for i, C in enumerate(Cs):
            g[i] = 2 * C.T @ (C @ t[i] - yv)
        return g + 2 * lambda2 * (t - m)

    def prox(v, s):
        n = np.sqrt(np.sum(v * v, axis=0))
        scale = np.where(n > 0, np.maximum(0.0, 1 - s * lambda1 / np.where(n > 0, n, 1)), 0.0)
        return v * scale

    def value(t):
        return direct_objective(t.reshape(shape), X, y, theta_model, lambda1, lambda2)

    theta = m.copy()
    z = theta.copy()
    tk = 1.0
    best = value(theta)
    best_theta = theta.copy()
    prev = best
    for it in range(iters):
        new = prox(z - step * smooth_grad(z), step)
        t_next = (1 + math.sqrt(1 + 4 * tk * tk)) / 2
        z = new + ((tk - 1) / t_next) * (new - theta)
        theta, tk = new, t_next
        if it % 50 == 0 or it == iters - 1:
            val = value(theta)
            if val > prev:
                # adaptive restart of the momentum
                z = theta.copy()
                tk = 1.0
            if val < best:
                best, best_theta = val, theta.copy()
            if abs(prev - val) <= tol * max(1.0, abs(val)):
                break
            prev = val
    return best_theta.reshape(shape), best
