"""Robin eigenvalues and parallel-set geometry in hyperbolic space.

Subpackages compute closed-form ball geometry (hypgeo), the radial
eigenproblem on balls (radial), plane-domain geometry and parallel flows
(domain2d), finite-element eigenvalues in the Poincare disk (fem2d), and
the inequality verification harness (verify). The cli module exposes all
of it behind the ``hyprobin`` command.
"""

from ._kernels import BACKEND as kernel_backend
from .domain2d import (
    CurveGeometry,
    HyperboloidPoint,
    ParallelProfile,
    RadialCurve,
    check_hconvex,
    curve_geometry,
    hyperboloid_distance,
    inner_parallel_profile,
    inradius,
    make_family,
    outer_parallel_perimeter,
    parallel_curvature,
)
from .fem2d import (
    DiskMesh,
    RobinEigenResult,
    assemble,
    mesh_domain,
    solve_domain,
    solve_pencil,
)
from .hypgeo import (
    BallGeometry,
    SpaceParams,
    af_rhs,
    ball_curvature_integral,
    ball_geometry,
    ball_parallel_perimeter,
    ball_perimeter,
    ball_volume,
    radius_from_perimeter,
    steiner_outer_perimeter,
    unit_sphere_area,
)
from .radial import (
    RadialEigenpair,
    RadialProblem,
    bracket_lambda1,
    eigen_quantities,
    rayleigh_constant_bound,
    solve_radial_shooting,
    solve_radial_weak,
)
from .verify import (
    DeficitReport,
    Resolution,
    generate_family,
    sweep,
    verify_cor1,
    verify_lemma_diffP,
    verify_perimeter_comparison,
    verify_thm1,
    verify_thm4,
    write_csv,
    write_json,
)

__version__ = "0.1.0"
