"""Quick oracle cross-checks, runnable without a dataset."""
import time

import numpy as np

from . import checks, solver, spectral


def _spectral_roundtrip(rng):
    p = rng.standard_normal((16, 16))
    back = spectral.idft2(spectral.dft2(p))
    return np.max(np.abs(back - p)) <= 1e-10 * max(1.0, np.max(np.abs(p)))


def _dft_direct(rng):
    p = rng.standard_normal((6, 6))
    return np.max(np.abs(spectral.dft2(p) - checks.direct_dft2(p))) <= 1e-10


def _correlation_direct(rng):
    ok = True
    for D in (4, 8):
        a, b = rng.standard_normal((2, D, D))
        ok &= np.max(np.abs(spectral.circular_correlate(a, b) - checks.direct_correlate(a, b))) <= 1e-10
    return ok


def _group_prox(rng):
    out = solver.update_theta_prime(np.array([3.0, 4.0]).reshape(2, 1, 1), np.zeros((2, 1, 1)), 1.0, 1.0)
    ok = np.allclose(out.ravel(), [2.4, 3.2], rtol=0, atol=1e-15)
    for _ in range(20):
        g = rng.standard_normal((3, 1, 1))
        mu = rng.uniform(0.5, 20)
        lam = rng.uniform(0, 2)
        fast = solver.update_theta_prime(g, np.zeros_like(g), mu, lam).ravel()
        slow = checks.prox_by_line_search(g.ravel(), lam, mu)
        ok &= np.max(np.abs(fast - slow)) <= 1e-6
    return ok


def _admm_oracle(rng):
    ok = True
    for _ in range(3):
        X = rng.standard_normal((2, 8, 8))
        y = rng.standard_normal((8, 8))
        m = 0.1 * rng.standard_normal((2, 8, 8))
        info = solver.LearnInfo()
        solver.learn(X, y, solver.SpectralFilter.from_spatial(m), solver.SolverConfig(K=50, r=1.0), info)
        got = checks.direct_objective(info.theta_prime, X, y, m, 1.0, 15.0)
        _, best = checks.proximal_gradient_oracle(X, y, m, 1.0, 15.0)
        ok &= abs(got - best) <= 1e-3 * abs(best)
    return ok


def _penalty_schedule(rng):
    info = solver.LearnInfo()
    X = rng.standard_normal((1, 8, 8))
    solver.learn(X, spectral.gaussian_label(8, 1.0), solver.SpectralFilter.from_spatial(np.zeros((1, 8, 8))),
                 solver.SolverConfig(K=5), info)
    return info.mus == [1.0, 5.0, 20.0, 20.0, 20.0]


SUITES = [
    ("spectral round trip", _spectral_roundtrip),
    ("dft2 vs direct sum", _dft_direct),
    ("correlation vs direct sum", _correlation_direct),
    ("group prox vs line search", _group_prox),
    ("penalty schedule", _penalty_schedule),
    ("ADMM vs proximal-gradient oracle", _admm_oracle),
]


def run(seed=0, out=print):
    rng = np.random.default_rng(seed)
    all_ok = True
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            ok = bool(fn(rng))
            detail = ""
        except Exception as exc:
            ok, detail = False, f" ({type(exc).__name__}: {exc})"
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}  [{time.perf_counter() - t0:.2f}s]{detail}")
    return all_ok
