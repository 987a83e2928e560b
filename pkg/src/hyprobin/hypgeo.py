"""Closed-form geometry of geodesic balls in hyperbolic space.

All lengths and measures are dimensionless, normalized to constant
curvature -1. Dimensional constants enter through the area ``omega`` of
the unit (n-1)-sphere; everything else is elementary functions of the
geodesic radius.

The ball formulas double as oracles for the 2D domain machinery: parallel
perimeters, curvature integrals and the lower bound ``af_rhs`` for the
perimeter decay rate are all exact on balls.
"""

import math
from dataclasses import dataclass, field

from scipy.integrate import quad

__all__ = [
    "SpaceParams",
    "BallGeometry",
    "unit_sphere_area",
    "ball_geometry",
    "ball_perimeter",
    "ball_volume",
    "radius_from_perimeter",
    "ball_parallel_perimeter",
    "ball_curvature_integral",
    "af_rhs",
    "steiner_outer_perimeter",
]


def unit_sphere_area(n):
    """Area of the unit (n-1)-sphere, ``2 pi^(n/2) / Gamma(n/2)``.

    Parameters
    ----------
    n : int
        Ambient dimension, at least 2.

    Returns
    -------
    float
    """
    if n != int(n) or n < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@dataclass(frozen=True)
class SpaceParams:
    """Ambient dimension together with its unit-sphere area."""

    n: int
    omega: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "omega", unit_sphere_area(self.n))
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class BallGeometry:
    """Radius, perimeter and volume of one geodesic ball."""

    R: float
    perimeter: float
    volume: float


def _check_radius(R):
    if not R > 0.0:
        raise ValueError(f"ball radius must be positive, got {R}")


def ball_perimeter(sp, R):
    """Boundary measure ``omega * sinh(R)^(n-1)`` of the ball of radius R."""
    _check_radius(R)
    return sp.omega * math.sinh(R) ** (sp.n - 1)


def ball_volume(sp, R):
    """Bulk measure ``omega * integral_0^R sinh(s)^(n-1) ds``.

    Closed form in dimension 2; adaptive quadrature (absolute tolerance
    1e-10, in practice much better) for n >= 3 to keep a single code
    path across dimensions.
    """
    _check_radius(R)
    if sp.n == 2:
        return sp.omega * (math.cosh(R) - 1.0)
    m = sp.n - 1
    integral, _ = quad(lambda s: math.sinh(s) ** m, 0.0, R,
                       epsabs=1e-13, epsrel=1e-13, limit=200)
    return sp.omega * integral


def ball_geometry(sp, R):
    """Bundle radius, perimeter and volume for the ball of radius R."""
    return BallGeometry(R=R, perimeter=ball_perimeter(sp, R),
                        volume=ball_volume(sp, R))


def radius_from_perimeter(sp, P):
    """Radius of the geodesic ball with boundary measure P.

    Inverse of :func:`ball_perimeter`; reproduces P to relative 1e-12.
    """
    if not P > 0.0:
        raise ValueError(f"perimeter must be positive, got {P}")
    return math.asinh((P / sp.omega) ** (1.0 / (sp.n - 1)))


def ball_parallel_perimeter(sp, R, t):
    """Perimeter ``omega * sinh(R-t)^(n-1)`` of the inner parallel ball.

    Valid for offsets 0 <= t < R; the ball is exhausted at t = R.
    """
    _check_radius(R)
    if t < 0.0 or t >= R:
        raise ValueError(f"offset must satisfy 0 <= t < R, got t={t}, R={R}")
    return sp.omega * math.sinh(R - t) ** (sp.n - 1)


def ball_curvature_integral(sp, R, i):
    """i-th curvature integral of the ball: boundary integral of the
    (n-1-i)-th normalized symmetric curvature function.

    All principal curvatures of a geodesic sphere equal coth(R), so the
    value is ``omega * sinh(R)^(n-1) * coth(R)^(n-1-i)``. The index
    i = n-1 recovers the perimeter.
    """
    _check_radius(R)
    if i != int(i) or i < 0 or i > sp.n - 1:
        raise ValueError(f"curvature index must lie in [0, {sp.n - 1}], got {i}")
    coth = math.cosh(R) / math.sinh(R)
    return sp.omega * math.sinh(R) ** (sp.n - 1) * coth ** (sp.n - 1 - int(i))


def af_rhs(sp, P):
    """Sharp lower bound for the inner-parallel perimeter decay rate.

    Evaluates ``(n-1) omega sqrt((P/omega)^2 + (P/omega)^(2(n-2)/(n-1)))``.
    Equality holds exactly on geodesic balls, where it reproduces
    ``-d/dt ball_parallel_perimeter`` at t = 0.
    """
    if not P > 0.0:
        raise ValueError(f"perimeter must be positive, got {P}")
    x = P / sp.omega
    expo = 2.0 * (sp.n - 2) / (sp.n - 1)
    return (sp.n - 1) * sp.omega * math.sqrt(x * x + x ** expo)


def steiner_outer_perimeter(sp, V, s):
    """Outer parallel perimeter from the curvature integrals.

    Expands ``sum_i C(n-1,i) cosh(s)^i sinh(s)^(n-1-i) V[i]`` for an
    outward offset s >= 0. On balls this collapses to
    ``ball_perimeter(R + s)`` by the sinh addition formula; in dimension
    2 it reads ``V[1] cosh(s) + V[0] sinh(s)``.

    Parameters
    ----------
    V : sequence of float
        Curvature integrals V_0 .. V_{n-1}; exactly n entries.
    s : float
        Outward offset, s >= 0.
    """
    if s < 0.0:
        raise ValueError(f"outer offset must be nonnegative, got {s}")
    if len(V) != sp.n:
        raise ValueError(
            f"curvature-integral vector must have {sp.n} entries, got {len(V)}")
    m = sp.n - 1
    ch, sh = math.cosh(s), math.sinh(s)
    return sum(math.comb(m, i) * ch**i * sh**(m - i) * V[i]
               for i in range(sp.n))
