"""Benchmark the compiled shooting kernel against the pure-Python fallback.

Times single boundary-residual evaluations and a full ball eigenvalue
solve through each backend. Run from the repository root:

    python3 benchmarks/bench_shoot.py
"""

import time

from hyprobin._kernels import _shoot_py

try:
    from hyprobin._kernels import _shoot_cy
except ImportError:
    _shoot_cy = None


def _start(n, lam, r0=1e-4):
    a = -lam / (2.0 * n)
    c4 = lam * (lam + 2.0 * (n - 1) / 3.0) / (8.0 * n * (n + 2))
    return 1.0 + a * r0**2 + c4 * r0**4, 2.0 * a * r0 + 4.0 * c4 * r0**3


def time_integrations(kernel, n, lam, R, rtol, repeats):
    psi0, dpsi0 = _start(n, lam)
    t0 = time.perf_counter()
    for _ in range(repeats):
        kernel.integrate_radial(n, lam, 1e-4, R, psi0, dpsi0, rtol)
    return (time.perf_counter() - t0) / repeats


def time_eigenvalue_solve(kernel, repeats=5):
    """Full shooting solve with the residual wired to a chosen backend."""
    from scipy.optimize import brentq

    n, R, beta = 2, 1.0, -1.0

    def residual(lam):
        psi0, dpsi0 = _start(n, lam)
        psi, dpsi, _ = kernel.integrate_radial(n, lam, 1e-4, R, psi0, dpsi0,
                                               1e-10)
        return dpsi + beta * psi

    t0 = time.perf_counter()
    for _ in range(repeats):
        lam = brentq(residual, -6.0, -1e-3, xtol=1e-13)
    return (time.perf_counter() - t0) / repeats, lam


def main():
    cases = [(2, -3.0, 1.0), (3, 8.0, 0.7), (4, -6.0, 2.0)]
    print(f"{'case':<24} {'rtol':>7} {'python':>12} {'cython':>12} "
          f"{'speedup':>8}")
    for n, lam, R in cases:
        for rtol in (1e-8, 1e-10):
            t_py = time_integrations(_shoot_py, n, lam, R, rtol, 200)
            if _shoot_cy is None:
                print(f"n={n} lam={lam:+.1f} R={R:<4} {rtol:>7.0e} "
                      f"{t_py * 1e6:>10.1f}us {'n/a':>12} {'n/a':>8}")
                continue
            t_cy = time_integrations(_shoot_cy, n, lam, R, rtol, 200)
            print(f"n={n} lam={lam:+.1f} R={R:<4} {rtol:>7.0e} "
                  f"{t_py * 1e6:>10.1f}us {t_cy * 1e6:>10.1f}us "
                  f"{t_py / t_cy:>7.1f}x")

    t_py, lam_py = time_eigenvalue_solve(_shoot_py)
    line = (f"\nfull eigenvalue solve (n=2, R=1, beta=-1): "
            f"python {t_py * 1e3:.2f} ms")
    if _shoot_cy is not None:
        t_cy, lam_cy = time_eigenvalue_solve(_shoot_cy)
        line += (f", cython {t_cy * 1e3:.2f} ms "
                 f"({t_py / t_cy:.1f}x), |dlam| = {abs(lam_py - lam_cy):.2e}")
    print(line)


if __name__ == "__main__":
    main()
