"""Pure-Python fallback for the radial shooting kernel.

Integrates the radial eigenfunction equation

    psi'' + (n-1) coth(r) psi' + lam * psi = 0

with an embedded Dormand-Prince 5(4) pair and proportional step control.
Scalar floats throughout; the compiled kernel in ``_shoot_cy`` runs the
identical algorithm.
"""

import math

from ..errors import IntegrationError

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 0.2, 0.3, 0.8, 8.0 / 9.0
_A21 = 0.2
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
# b - bhat, for the embedded error estimate (k7 enters with weight -1/40).
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0,
                                71.0 / 1920.0, -17253.0 / 339200.0,
                                22.0 / 525.0, -1.0 / 40.0)


def integrate_radial(n, lam, r0, rb, psi0, dpsi0, rtol, atol=1e-14,
                     max_steps=1_000_000):
    """Advance (psi, psi') from r0 to rb; returns (psi, psi', steps)."""
    if not rb > r0 > 0.0:
        raise IntegrationError(f"need 0 < r0 < rb, got r0={r0}, rb={rb}")
    nu = float(n - 1)
    r = r0
    y0 = float(psi0)
    y1 = float(dpsi0)

    # derivative at the left endpoint
    coth = math.cosh(r) / math.sinh(r)
    f0 = y1
    f1 = -nu * coth * y1 - lam * y0

    h = min(1e-3, (rb - r0) * 0.01)
    steps = 0
    while r < rb:
        if steps >= max_steps:
            raise IntegrationError(
                f"step budget exhausted at r={r} (lam={lam}, n={n})")
        if h < 1e-15 * max(1.0, r):
            raise IntegrationError(
                f"step underflow at r={r} (lam={lam}, n={n})")
        last = r + h >= rb
        if last:
            h = rb - r

        k10, k11 = f0, f1

        t = r + _C2 * h
        u0 = y0 + h * _A21 * k10
        u1 = y1 + h * _A21 * k11
        coth = math.cosh(t) / math.sinh(t)
        k20, k21 = u1, -nu * coth * u1 - lam * u0

        t = r + _C3 * h
        u0 = y0 + h * (_A31 * k10 + _A32 * k20)
        u1 = y1 + h * (_A31 * k11 + _A32 * k21)
        coth = math.cosh(t) / math.sinh(t)
        k30, k31 = u1, -nu * coth * u1 - lam * u0

        t = r + _C4 * h
        u0 = y0 + h * (_A41 * k10 + _A42 * k20 + _A43 * k30)
        u1 = y1 + h * (_A41 * k11 + _A42 * k21 + _A43 * k31)
        coth = math.cosh(t) / math.sinh(t)
        k40, k41 = u1, -nu * coth * u1 - lam * u0

        t = r + _C5 * h
        u0 = y0 + h * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40)
        u1 = y1 + h * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41)
        coth = math.cosh(t) / math.sinh(t)
        k50, k51 = u1, -nu * coth * u1 - lam * u0

        t = r + h
        u0 = y0 + h * (_A61 * k10 + _A62 * k20 + _A63 * k30 + _A64 * k40
                       + _A65 * k50)
        u1 = y1 + h * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41
                       + _A65 * k51)
        coth = math.cosh(t) / math.sinh(t)
        k60, k61 = u1, -nu * coth * u1 - lam * u0

        z0 = y0 + h * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50
                       + _B6 * k60)
        z1 = y1 + h * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51
                       + _B6 * k61)
        coth = math.cosh(t) / math.sinh(t)
        k70, k71 = z1, -nu * coth * z1 - lam * z0

        e0 = h * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60
                  + _E7 * k70)
        e1 = h * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61
                  + _E7 * k71)
        s0 = atol + rtol * max(abs(y0), abs(z0))
        s1 = atol + rtol * max(abs(y1), abs(z1))
        err = math.sqrt(0.5 * ((e0 / s0) ** 2 + (e1 / s1) ** 2))

        steps += 1
        if err <= 1.0:
            r = rb if last else r + h
            y0, y1 = z0, z1
            f0, f1 = k70, k71  # FSAL
            if err == 0.0:
                fac = 5.0
            else:
                fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
            h *= fac
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return y0, y1, steps
