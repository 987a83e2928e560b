# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled radial shooting kernel (Dormand-Prince 5(4)).

Same algorithm as ``_shoot_py.integrate_radial``; kept in lockstep so the
two backends are interchangeable.
"""

from libc.math cimport cosh, sinh, fabs, sqrt, pow

from ..errors import IntegrationError

cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0
cdef double A21 = 0.2
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0, A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


def integrate_radial(int n, double lam, double r0, double rb, double psi0,
                     double dpsi0, double rtol, double atol=1e-14,
                     long max_steps=1000000):
    """Advance (psi, psi') from r0 to rb; returns (psi, psi', steps)."""
    if not rb > r0 > 0.0:
        raise IntegrationError(f"need 0 < r0 < rb, got r0={r0}, rb={rb}")

    cdef double nu = n - 1.0
    cdef double r = r0, y0 = psi0, y1 = dpsi0
    cdef double coth = cosh(r) / sinh(r)
    cdef double f0 = y1
    cdef double f1 = -nu * coth * y1 - lam * y0
    cdef double h = (rb - r0) * 0.01
    if h > 1e-3:
        h = 1e-3
    cdef long steps = 0
    cdef bint last
    cdef double t, u0, u1, z0, z1, e0, e1, s0, s1, err, fac
    cdef double k10, k11, k20, k21, k30, k31, k40, k41
    cdef double k50, k51, k60, k61, k70, k71

    while r < rb:
        if steps >= max_steps:
            raise IntegrationError(
                f"step budget exhausted at r={r} (lam={lam}, n={n})")
        if h < 1e-15 * (1.0 if r < 1.0 else r):
            raise IntegrationError(
                f"step underflow at r={r} (lam={lam}, n={n})")
        last = r + h >= rb
        if last:
            h = rb - r

        k10 = f0
        k11 = f1

        t = r + C2 * h
        u0 = y0 + h * A21 * k10
        u1 = y1 + h * A21 * k11
        coth = cosh(t) / sinh(t)
        k20 = u1
        k21 = -nu * coth * u1 - lam * u0

        t = r + C3 * h
        u0 = y0 + h * (A31 * k10 + A32 * k20)
        u1 = y1 + h * (A31 * k11 + A32 * k21)
        coth = cosh(t) / sinh(t)
        k30 = u1
        k31 = -nu * coth * u1 - lam * u0

        t = r + C4 * h
        u0 = y0 + h * (A41 * k10 + A42 * k20 + A43 * k30)
        u1 = y1 + h * (A41 * k11 + A42 * k21 + A43 * k31)
        coth = cosh(t) / sinh(t)
        k40 = u1
        k41 = -nu * coth * u1 - lam * u0

        t = r + C5 * h
        u0 = y0 + h * (A51 * k10 + A52 * k20 + A53 * k30 + A54 * k40)
        u1 = y1 + h * (A51 * k11 + A52 * k21 + A53 * k31 + A54 * k41)
        coth = cosh(t) / sinh(t)
        k50 = u1
        k51 = -nu * coth * u1 - lam * u0

        t = r + h
        u0 = y0 + h * (A61 * k10 + A62 * k20 + A63 * k30 + A64 * k40
                       + A65 * k50)
        u1 = y1 + h * (A61 * k11 + A62 * k21 + A63 * k31 + A64 * k41
                       + A65 * k51)
        coth = cosh(t) / sinh(t)
        k60 = u1
        k61 = -nu * coth * u1 - lam * u0

        z0 = y0 + h * (B1 * k10 + B3 * k30 + B4 * k40 + B5 * k50 + B6 * k60)
        z1 = y1 + h * (B1 * k11 + B3 * k31 + B4 * k41 + B5 * k51 + B6 * k61)
        coth = cosh(t) / sinh(t)
        k70 = z1
        k71 = -nu * coth * z1 - lam * z0

        e0 = h * (E1 * k10 + E3 * k30 + E4 * k40 + E5 * k50 + E6 * k60
                  + E7 * k70)
        e1 = h * (E1 * k11 + E3 * k31 + E4 * k41 + E5 * k51 + E6 * k61
                  + E7 * k71)
        s0 = atol + rtol * (fabs(y0) if fabs(y0) > fabs(z0) else fabs(z0))
        s1 = atol + rtol * (fabs(y1) if fabs(y1) > fabs(z1) else fabs(z1))
        err = sqrt(0.5 * ((e0 / s0) * (e0 / s0) + (e1 / s1) * (e1 / s1)))

        steps += 1
        if err <= 1.0:
            r = rb if last else r + h
            y0 = z0
            y1 = z1
            f0 = k70
            f1 = k71
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            h *= fac
        else:
            fac = 0.9 * pow(err, -0.2)
            if fac < 0.2:
                fac = 0.2
            h *= fac
    return y0, y1, steps
