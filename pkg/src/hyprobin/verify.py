"""Assemble both sides of the deficit inequalities and certify margins.

Every verifier evaluates one documented inequality between a plane domain
and the geodesic disk of equal perimeter, orienting its margin so that
``margin >= 0`` means the inequality holds as stated. Reports are plain
records, written as CSV (RFC-4180, round-trip float formatting) or JSON
under the ``hyprobin-report/1`` schema.

Margin orientations:

* ``verify_thm1`` (beta < 0): margin = lhs - rhs with
  lhs = (lam* - lam) / |lam|, rhs = v_min^2 (|B*| - |Omega|) / ||v||^2.
* ``verify_thm4`` (beta > 0): margin = rhs - lhs with
  lhs = (lam - lam*) / lam, rhs = v_max^2 (|B*| - |Omega|) / ||v||^2.
* ``verify_lemma_diffP``: margin = -dP/dt - af_rhs(P(t)).
* ``verify_perimeter_comparison``: margin = P(ball_t) - P(Omega_t).
"""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .domain2d import (
    check_hconvex,
    curve_geometry,
    focal_horizon,
    inner_parallel_profile,
    inradius,
    make_family,
)
from .errors import HconvexityError, SolverError
from .fem2d import solve_domain
from .hypgeo import (
    SpaceParams,
    af_rhs,
    ball_parallel_perimeter,
    ball_volume,
    radius_from_perimeter,
)
from .radial import (
    RadialProblem,
    eigen_quantities,
    solve_radial_shooting,
    solve_radial_weak,
)

__all__ = [
    "Resolution",
    "DeficitReport",
    "RateTable",
    "ComparisonTable",
    "verify_thm1",
    "verify_thm4",
    "verify_cor1",
    "verify_lemma_diffP",
    "verify_perimeter_comparison",
    "generate_family",
    "sweep",
    "write_csv",
    "write_json",
]

SCHEMA = "hyprobin-report/1"
_SP2 = SpaceParams(2)


@dataclass(frozen=True)
class Resolution:
    """Discretization sizes shared by the verifiers."""

    angles: int = 512
    radial_elements: int = 512
    mesh_n_r: int = 48
    mesh_n_theta: int = 192
    refinements: int = 2


@dataclass
class DeficitReport:
    """All quantities entering one eigenvalue-deficit inequality."""

    domain_id: str
    beta: float
    lambda_omega: float
    lambda_star: float
    P: float
    vol_omega: float
    vol_star: float
    v_extreme: float
    l2_sq: float
    lhs: float
    rhs: float
    margin: float
    status: str = "ok"


@dataclass(frozen=True)
class RateTable:
    """Perimeter decay rate against its certified lower bound, per offset."""

    t: np.ndarray
    rate: np.ndarray
    bound: np.ndarray
    margin: np.ndarray
    inconclusive: bool


@dataclass(frozen=True)
class ComparisonTable:
    """Inner parallel perimeter against the equal-perimeter ball's."""

    t: np.ndarray
    P_inner: np.ndarray
    P_ball: np.ndarray
    margin: np.ndarray


def _require_hconvex(c):
    g = curve_geometry(c)
    ok, margin = check_hconvex(g)
    if not ok:
        raise HconvexityError(
            f"hypothesis violated: domain is not h-convex "
            f"(kappa_min - 1 = {margin:.3e})")
    return g


def _ball_side(P, beta, resolution):
    """Eigenvalue and eigenfunction quantities on the matched ball."""
    R_star = radius_from_perimeter(_SP2, P)
    vol_star = ball_volume(_SP2, R_star)
    prob = RadialProblem(_SP2, R_star, beta)
    lam_star = solve_radial_shooting(prob)
    pair = solve_radial_weak(prob, resolution.radial_elements)
    if abs(pair.lambda1 - lam_star) > 1e-4 * max(1.0, abs(lam_star)):
        raise SolverError(
            f"radial solvers disagree: weak {pair.lambda1} vs shooting "
            f"{lam_star} at R*={R_star}, beta={beta}")
    v_min, v_max, l2 = eigen_quantities(pair, _SP2)
    return R_star, vol_star, lam_star, v_min, v_max, l2


def _deficit_report(c, beta, resolution, domain_id):
    g = _require_hconvex(c)
    P, vol_omega = g.perimeter, g.area
    _, vol_star, lam_star, v_min, v_max, l2 = _ball_side(P, beta, resolution)
    if vol_star < vol_omega - 1e-8:
        raise SolverError(
            f"isoperimetric violation: |B*| = {vol_star} < |Omega| = "
            f"{vol_omega}; geometry pipeline is broken")
    dres = solve_domain(c, beta, refinements=resolution.refinements,
                        base_n_r=resolution.mesh_n_r,
                        base_n_theta=resolution.mesh_n_theta)
    lam_omega = dres.lambda1
    if beta < 0.0:
        if not (lam_omega < 0.0 and lam_star < 0.0):
            raise SolverError(
                f"negative-beta eigenvalues must be negative, got "
                f"lam(Omega)={lam_omega}, lam(ball)={lam_star}")
        lhs = (lam_star - lam_omega) / abs(lam_omega)
        rhs = v_min**2 * (vol_star - vol_omega) / l2
        margin = lhs - rhs
        v_extreme = v_min
    else:
        lhs = (lam_omega - lam_star) / lam_omega
        rhs = v_max**2 * (vol_star - vol_omega) / l2
        margin = rhs - lhs
        v_extreme = v_max
    return DeficitReport(domain_id=domain_id, beta=float(beta),
                         lambda_omega=float(lam_omega),
                         lambda_star=float(lam_star), P=float(P),
                         vol_omega=float(vol_omega), vol_star=float(vol_star),
                         v_extreme=float(v_extreme), l2_sq=float(l2),
                         lhs=float(lhs), rhs=float(rhs), margin=float(margin))


def verify_thm1(c, beta, resolution=Resolution(), domain_id="domain"):
    """Deficit lower bound for beta < 0; margin = lhs - rhs >= 0 expected."""
    if not beta < 0.0:
        raise ValueError(f"this verifier requires beta < 0, got {beta}")
    return _deficit_report(c, beta, resolution, domain_id)


def verify_thm4(c, beta, resolution=Resolution(), domain_id="domain"):
    """Deficit upper bound for beta > 0; margin = rhs - lhs >= 0 expected."""
    if not beta > 0.0:
        raise ValueError(f"this verifier requires beta > 0, got {beta}")
    return _deficit_report(c, beta, resolution, domain_id)


def verify_cor1(report):
    """Eigenvalue comparison lam(Omega) <= lam(ball) for beta < 0."""
    if not report.beta < 0.0:
        raise ValueError("corollary applies to beta < 0 reports")
    return report.lambda_omega <= report.lambda_star + 1e-6 * abs(
        report.lambda_star)


def verify_lemma_diffP(c, t_step=1e-3):
    """Tabulate -dP(Omega_t)/dt against af_rhs(P(Omega_t)).

    The t = 0 row uses the exact derivative (the total curvature); the
    interior rows use centered differences of the inner parallel profile
    on a uniform grid with step ``t_step``. Fewer than three valid rows
    set the inconclusive flag instead of failing.
    """
    g = _require_hconvex(c)
    t_max = 0.9 * focal_horizon(g)
    count = int(t_max / t_step)
    if count < 3:
        return RateTable(t=np.zeros(0), rate=np.zeros(0), bound=np.zeros(0),
                         margin=np.zeros(0), inconclusive=True)
    grid = t_step * np.arange(count + 1)
    prof = inner_parallel_profile(c, grid)
    p = prof.P_inner
    rate = np.empty(count - 1)
    rate[0] = g.total_curvature
    rate[1:] = -(p[2:count] - p[:count - 2]) / (2.0 * t_step)
    t = np.concatenate(([0.0], grid[1:count - 1]))
    bound = np.array([af_rhs(_SP2, pv) for pv in
                      np.concatenate(([p[0]], p[1:count - 1]))])
    return RateTable(t=t, rate=rate, bound=bound, margin=rate - bound,
                     inconclusive=False)


def verify_perimeter_comparison(c, t_grid=None):
    """Tabulate P(ball_t) - P(Omega_t) on the valid offset range."""
    g = _require_hconvex(c)
    r_star = radius_from_perimeter(_SP2, g.perimeter)
    if t_grid is None:
        t_max = 0.9 * min(focal_horizon(g), inradius(c), r_star)
        t_grid = np.linspace(0.0, t_max, 64)
    prof = inner_parallel_profile(c, t_grid)
    p_ball = np.array([ball_parallel_perimeter(_SP2, r_star, t)
                       for t in prof.t])
    return ComparisonTable(t=prof.t, P_inner=prof.P_inner, P_ball=p_ball,
                           margin=p_ball - prof.P_inner)


def generate_family(count, seed, m=512, hconvex_margin=1e-3):
    """Deterministic family of h-convex test domains.

    Every fifth domain is a circle; the rest carry one or two cosine
    modes whose amplitudes are shrunk (deterministically) until the
    curvature clears ``kappa >= 1 + hconvex_margin``.

    Returns a list of (domain_id, RadialCurve) pairs.
    """
    rng = np.random.default_rng(seed)
    family = []
    for i in range(count):
        r0 = float(rng.uniform(0.7, 1.4))
        n_modes = int(rng.integers(1, 3))
        drawn = [(int(rng.integers(2, 5)), float(rng.uniform(0.02, 0.10)),
                  float(rng.uniform(0.0, 2.0 * np.pi)))
                 for _ in range(n_modes)]
        if i % 5 == 0:
            family.append((f"d{i:02d}-circle", make_family(r0, [], m)))
            continue
        modes = drawn
        for _ in range(60):
            try:
                c = make_family(r0, modes, m)
                ok, margin = check_hconvex(curve_geometry(c))
            except ValueError:
                ok, margin = False, -math.inf
            if ok and margin >= hconvex_margin:
                break
            modes = [(k, 0.7 * eps, phi) for k, eps, phi in modes]
        else:
            raise SolverError(f"could not shrink domain {i} to h-convexity")
        tag = "+".join(f"k{k}" for k, _, _ in modes)
        family.append((f"d{i:02d}-{tag}", c))
    return family


def _sweep_row(domain_id, curve, beta, resolution):
    try:
        if beta < 0.0:
            return verify_thm1(curve, beta, resolution, domain_id)
        return verify_thm4(curve, beta, resolution, domain_id)
    except Exception as exc:
        return DeficitReport(domain_id=domain_id, beta=beta,
                             lambda_omega=math.nan, lambda_star=math.nan,
                             P=math.nan, vol_omega=math.nan,
                             vol_star=math.nan, v_extreme=math.nan,
                             l2_sq=math.nan, lhs=math.nan, rhs=math.nan,
                             margin=math.nan,
                             status=f"{type(exc).__name__}: {exc}")


def _worker_count(n_tasks):
    env = os.environ.get("HYPROBIN_THREADS")
    limit = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(limit, n_tasks))


def sweep(domains, betas, resolution=Resolution()):
    """Verify the matching theorem for every (domain, beta) pair.

    Rows are computed independently (thread pool capped by
    HYPROBIN_THREADS) and returned sorted by domain_id then beta;
    per-row failures land in the row's status field and do not stop
    the sweep.
    """
    tasks = [(did, c, float(b)) for did, c in domains for b in betas]
    if not tasks:
        return []
    with ThreadPoolExecutor(max_workers=_worker_count(len(tasks))) as pool:
        rows = list(pool.map(
            lambda args: _sweep_row(args[0], args[1], args[2], resolution),
            tasks))
    rows.sort(key=lambda rep: (rep.domain_id, rep.beta))
    return rows


def _format_cell(value):
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_csv(reports, path):
    """CSV with one row per report; floats use round-trip repr."""
    names = [f.name for f in fields(DeficitReport)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for rep in reports:
            row = asdict(rep)
            writer.writerow([_format_cell(row[k]) for k in names])


def write_json(reports, path):
    """JSON document: {"schema": "hyprobin-report/1", "rows": [...]}."""
    doc = {"schema": SCHEMA, "rows": [asdict(r) for r in reports]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
