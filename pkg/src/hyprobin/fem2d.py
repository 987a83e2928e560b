"""Robin eigenvalues on plane hyperbolic domains via P1 finite elements.

Works in the Poincare disk model, where two facts make the discretization
cheap: the hyperbolic Dirichlet energy of dimension 2 is conformally
invariant (the stiffness matrix is the plain Euclidean one), and the
metric enters only through two scalar weights, ``(2/(1-|x|^2))^2`` for
the area measure and ``2/(1-|x|^2)`` for the boundary measure.

Meshes are structured polar triangulations of star-shaped domains with a
single fan vertex at the center; the map from geodesic polar coordinates
to the disk is ``d -> tanh(d/2)`` along each ray.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from .domain2d import curve_eval
from .errors import MeshError, SolverError

__all__ = [
    "DiskMesh",
    "RobinEigenResult",
    "DomainEigenResult",
    "mesh_domain",
    "assemble",
    "solve_pencil",
    "solve_domain",
    "dump_mesh",
]

#: switch from dense symmetric-definite reduction to sparse shift-invert
_DENSE_DOF_LIMIT = 1200

# degree-2 interior rule: barycentric points and weights
_TRI_BARY = np.array([[2 / 3, 1 / 6, 1 / 6],
                      [1 / 6, 2 / 3, 1 / 6],
                      [1 / 6, 1 / 6, 2 / 3]])
_TRI_W = np.array([1 / 3, 1 / 3, 1 / 3])

# 2-point Gauss on [-1, 1] for boundary edges
_EDGE_XI = np.array([-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0)])


@dataclass(frozen=True)
class DiskMesh:
    """Triangulation of a star-shaped domain inside the unit disk."""

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray

    def __post_init__(self):
        if np.any(np.linalg.norm(self.vertices, axis=1) >= 1.0):
            raise MeshError("vertices must lie strictly inside the unit disk")

    @property
    def dof(self):
        return self.vertices.shape[0]


@dataclass(frozen=True)
class RobinEigenResult:
    """Smallest pencil eigenvalue with its positive nodal eigenvector."""

    lambda1: float
    u: np.ndarray
    dof: int
    residual: float


@dataclass(frozen=True)
class DomainEigenResult:
    """Richardson-extrapolated eigenvalue from a refinement ladder."""

    lambda1: float
    error_estimate: float
    level_values: tuple
    observed_order: float
    warning: str


def mesh_domain(c, n_r, n_theta):
    """Structured polar triangulation of the domain bounded by ``c``.

    Ring ``i`` sits at geodesic radius ``(i/n_r) * r(theta_j)``, mapped to
    Euclidean radius ``tanh(. / 2)``; a fan of triangles closes the center.
    """
    if n_r < 8 or n_theta < 64:
        raise ValueError(
            f"mesh resolution too coarse: n_r={n_r} (>=8), "
            f"n_theta={n_theta} (>=64)")
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    r_b = curve_eval(c, theta)
    rho = np.arange(1, n_r + 1) / n_r

    verts = np.empty((1 + n_r * n_theta, 2))
    verts[0] = 0.0
    rad = np.tanh(0.5 * rho[:, None] * r_b[None, :])
    verts[1:, 0] = (rad * np.cos(theta)[None, :]).ravel()
    verts[1:, 1] = (rad * np.sin(theta)[None, :]).ravel()

    def v(i, j):
        return 1 + (i - 1) * n_theta + (j % n_theta)

    tris = []
    j = np.arange(n_theta)
    tris.append(np.column_stack([np.zeros(n_theta, dtype=int),
                                 v(1, j), v(1, j + 1)]))
    for i in range(1, n_r):
        tris.append(np.column_stack([v(i, j), v(i + 1, j), v(i + 1, j + 1)]))
        tris.append(np.column_stack([v(i, j), v(i + 1, j + 1), v(i, j + 1)]))
    triangles = np.concatenate(tris)

    p1 = verts[triangles[:, 0]]
    e21 = verts[triangles[:, 1]] - p1
    e31 = verts[triangles[:, 2]] - p1
    areas = 0.5 * (e21[:, 0] * e31[:, 1] - e21[:, 1] * e31[:, 0])
    if np.any(areas < 1e-14):
        raise MeshError(
            f"degenerate or inverted triangle (min area {areas.min():.3e})")

    boundary = np.column_stack([v(n_r, j), v(n_r, j + 1)])
    return DiskMesh(vertices=verts, triangles=triangles,
                    boundary_edges=boundary)


def assemble(mesh):
    """Stiffness, boundary-mass and mass matrices of the Robin form.

    Returns
    -------
    (K, B, M) : csr_matrix
        ``K`` is the Euclidean P1 stiffness matrix (conformal invariance),
        ``M`` the mass matrix with the squared disk weight by a 3-point
        degree-2 rule, ``B`` the boundary mass with the linear weight by
        2-point Gauss per edge. The Robin pencil is ``K + beta B`` vs M.
    """
    verts, tris = mesh.vertices, mesh.triangles
    n = mesh.dof
    p = verts[tris]  # (T, 3, 2)

    if np.any(1.0 - np.sum(verts**2, axis=1) < 1e-3):
        raise MeshError("mesh extends too close to the ideal boundary; "
                        "the conformal weight overflows")

    # opposite-edge vectors e_i = p_{i+2} - p_{i+1}
    e = p[:, [2, 0, 1], :] - p[:, [1, 2, 0], :]
    area = 0.5 * (e[:, 2, 0] * (-e[:, 1, 1]) - e[:, 2, 1] * (-e[:, 1, 0]))

    # K_ij = (e_i . e_j) / (4 A)
    k_local = np.einsum("tix,tjx->tij", e, e) / (4.0 * area)[:, None, None]

    # weighted mass by the 3-point rule
    xq = np.einsum("qi,tix->tqx", _TRI_BARY, p)
    wq = (2.0 / (1.0 - np.sum(xq**2, axis=2))) ** 2
    lam = _TRI_BARY  # P1 shape functions equal barycentric coordinates
    m_local = np.einsum("q,tq,qi,qj->tij", _TRI_W, wq, lam, lam)
    m_local *= area[:, None, None]

    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    K = sparse.coo_matrix((k_local.ravel(), (rows, cols)),
                          shape=(n, n)).tocsr()
    M = sparse.coo_matrix((m_local.ravel(), (rows, cols)),
                          shape=(n, n)).tocsr()

    # boundary mass
    be = mesh.boundary_edges
    a, b = verts[be[:, 0]], verts[be[:, 1]]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    elen = np.linalg.norm(b - a, axis=1)
    b_local = np.zeros((be.shape[0], 2, 2))
    for xi in _EDGE_XI:
        x = mid + xi * half
        w = 2.0 / (1.0 - np.sum(x**2, axis=1))
        phi = np.array([0.5 * (1.0 - xi), 0.5 * (1.0 + xi)])
        b_local += (0.5 * elen * w)[:, None, None] * np.einsum(
            "i,j->ij", phi, phi)[None, :, :]
    rows_b = np.repeat(be, 2, axis=1).ravel()
    cols_b = np.tile(be, (1, 2)).ravel()
    B = sparse.coo_matrix((b_local.ravel(), (rows_b, cols_b)),
                          shape=(n, n)).tocsr()
    return K, B, M


def _ground_state_sparse(A, M, sigma_candidates):
    n = A.shape[0]
    v0 = np.full(n, 1.0 / math.sqrt(n))
    last_exc = None
    for sigma in sigma_candidates:
        try:
            vals, vecs = eigsh(A, k=2, M=M, sigma=sigma, which="LM", v0=v0)
        except Exception as exc:  # factorization hit an eigenvalue, retry
            last_exc = exc
            continue
        i = int(np.argmin(vals))
        u = vecs[:, i]
        if u.sum() < 0:
            u = -u
        if np.all(u > 0):
            return vals[i], u
    raise SolverError(
        f"shift-invert failed to isolate a positive ground state "
        f"(tried sigmas {list(sigma_candidates)}): {last_exc}")


def solve_pencil(K, B, M, beta):
    """Smallest eigenvalue of ``(K + beta B) u = lambda M u``.

    Dense symmetric-definite reduction at small sizes; sparse
    shift-invert with ground-state positivity verification above. The
    final eigenvalue is the Rayleigh quotient of the computed vector.
    """
    A = (K + beta * B).tocsr()
    n = A.shape[0]
    ones = np.ones(n)
    upper = float(ones @ (A @ ones)) / float(ones @ (M @ ones))
    scale = max(1.0, abs(upper))

    if n <= _DENSE_DOF_LIMIT:
        vals, vecs = eigh(A.toarray(), M.toarray(), subset_by_index=(0, 0))
        u = vecs[:, 0]
        if u.sum() < 0:
            u = -u
        if not np.all(u > 0):
            raise SolverError("dense ground state not positive")
    else:
        if beta >= 0.0:
            sigmas = [min(0.0, upper) - 0.05 * scale]
        else:
            sigmas = [upper - f * scale for f in (0.6, 1.5, 3.0, 6.0)]
        _, u = _ground_state_sparse(A, M, sigmas)

    au = A @ u
    mu = M @ u
    lam = float(u @ au) / float(u @ mu)
    resid = float(np.abs(au - lam * mu).max())
    u = u / u.max()
    return RobinEigenResult(lambda1=lam, u=u, dof=n, residual=resid)


def solve_domain(c, beta, refinements=2, base_n_r=48, base_n_theta=192):
    """Eigenvalue on a refinement ladder with Richardson extrapolation.

    Levels are ``(base_n_r, base_n_theta) * 2^k`` for k = 0..refinements,
    refining upward from the configured base mesh. The extrapolation
    assumes second-order convergence; ``observed_order`` reports the rate
    actually seen on the last level triple.
    """
    from .domain2d import check_hconvex, curve_geometry

    ok, margin = check_hconvex(curve_geometry(c))
    if not ok:
        warnings.warn(
            f"domain is not h-convex (margin {margin:.3e}); the eigenvalue "
            f"is still well-defined", stacklevel=2)

    lams = []
    for k in range(refinements + 1):
        mesh = mesh_domain(c, base_n_r * 2**k, base_n_theta * 2**k)
        K, B, M = assemble(mesh)
        lams.append(solve_pencil(K, B, M, beta).lambda1)

    warning = ""
    if len(lams) == 1:
        return DomainEigenResult(lambda1=lams[0], error_estimate=math.inf,
                                 level_values=tuple(lams),
                                 observed_order=math.nan, warning="")
    deltas = np.abs(np.diff(lams))
    order = math.nan
    if len(lams) >= 3 and deltas[-1] > 0 and deltas[-2] > 0:
        order = math.log2(deltas[-2] / deltas[-1])
        if deltas[-1] >= deltas[-2]:
            warning = (f"non-monotone refinement sequence: deltas "
                       f"{deltas.tolist()}")
    lam_ext = lams[-1] + (lams[-1] - lams[-2]) / 3.0
    return DomainEigenResult(lambda1=float(lam_ext),
                             error_estimate=float(deltas[-1] / 3.0),
                             level_values=tuple(lams),
                             observed_order=order, warning=warning)


def dump_mesh(mesh, path):
    """Plain-text mesh dump: vertex lines ``x y``, triangle lines ``i j k``."""
    with open(path, "w", encoding="ascii") as fh:
        for x, y in mesh.vertices:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"{int(i)} {int(j)} {int(k)}\n")
