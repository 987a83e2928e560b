import numpy as np
import pytest

from hyprobin.domain2d import make_family
from hyprobin.fem2d import (
    assemble,
    dump_mesh,
    mesh_domain,
    solve_domain,
    solve_pencil,
)
from hyprobin.hypgeo import SpaceParams, ball_perimeter, ball_volume
from hyprobin.radial import RadialProblem, solve_radial_shooting

SP2 = SpaceParams(2)
CIRCLE = make_family(1.0, [])
FIXTURE = make_family(1.0, [(2, 0.05, 0.0)])


def _edge_count(mesh):
    edges = set()
    for a, b, c in mesh.triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return len(edges)


class TestMesh:
    def test_circle_boundary_radius(self):
        mesh = mesh_domain(CIRCLE, 12, 64)
        rads = np.linalg.norm(
            mesh.vertices[np.unique(mesh.boundary_edges)], axis=1)
        assert np.allclose(rads, 0.46211715726000974, atol=1e-14)

    def test_fixture_boundary_follows_curve(self):
        mesh = mesh_domain(FIXTURE, 8, 128)
        theta = 2 * np.pi * np.arange(128) / 128
        want = np.tanh(0.5 * (1.0 + 0.05 * np.cos(2 * theta)))
        ring = mesh.vertices[1 + 7 * 128:]
        assert np.allclose(np.linalg.norm(ring, axis=1), want, atol=1e-12)

    @pytest.mark.parametrize("n_r,n_theta", [(8, 64), (12, 96), (16, 128)])
    def test_euler_characteristic(self, n_r, n_theta):
        mesh = mesh_domain(CIRCLE, n_r, n_theta)
        v = mesh.vertices.shape[0]
        f = mesh.triangles.shape[0]
        assert v - _edge_count(mesh) + f == 1

    def test_boundary_is_single_closed_loop(self):
        mesh = mesh_domain(FIXTURE, 8, 64)
        heads = mesh.boundary_edges[:, 0]
        tails = mesh.boundary_edges[:, 1]
        assert np.array_equal(np.sort(heads), np.sort(tails))
        assert np.unique(heads).size == heads.size == 64

    def test_positive_orientation(self):
        mesh = mesh_domain(FIXTURE, 8, 64)
        p = mesh.vertices[mesh.triangles]
        area = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
        assert np.all(area > 1e-14)

    def test_boundary_loop_length_converges(self):
        # Euclidean polygon length of the boundary loop approaches the
        # hyperbolic perimeter rescaled by the inverse conformal factor
        from hyprobin.domain2d import curve_geometry, resample

        def loop_length(n_theta):
            mesh = mesh_domain(FIXTURE, 8, n_theta)
            a = mesh.vertices[mesh.boundary_edges[:, 0]]
            b = mesh.vertices[mesh.boundary_edges[:, 1]]
            return np.linalg.norm(b - a, axis=1).sum()

        def rescaled_perimeter(n_theta):
            c = resample(FIXTURE, n_theta)
            g = curve_geometry(c)
            rad = np.tanh(0.5 * c.r)
            return float(np.sum(g.speed * (1.0 - rad**2) / 2.0)
                         * 2.0 * np.pi / n_theta)

        want = rescaled_perimeter(4096)
        err_coarse = abs(loop_length(64) - want)
        err_fine = abs(loop_length(256) - want)
        assert err_coarse <= 0.05 * want
        assert err_fine <= 0.1 * err_coarse

    @pytest.mark.parametrize("n_r,n_theta", [(4, 64), (8, 32)])
    def test_rejects_coarse_resolution(self, n_r, n_theta):
        with pytest.raises(ValueError):
            mesh_domain(CIRCLE, n_r, n_theta)

    def test_dump_round_trip(self, tmp_path):
        mesh = mesh_domain(CIRCLE, 8, 64)
        path = tmp_path / "mesh.txt"
        dump_mesh(mesh, path)
        verts, tris = [], []
        for line in path.read_text().splitlines():
            parts = line.split()
            if len(parts) == 2:
                verts.append([float(v) for v in parts])
            else:
                tris.append([int(v) for v in parts])
        assert np.allclose(np.array(verts), mesh.vertices)
        assert np.array_equal(np.array(tris), mesh.triangles)


class TestAssembly:
    def test_constants_have_zero_energy(self):
        mesh = mesh_domain(CIRCLE, 12, 64)
        K, _, _ = assemble(mesh)
        ones = np.ones(mesh.dof)
        scale = np.abs(K.data).max()
        assert abs(ones @ (K @ ones)) <= 1e-10 * scale

    def test_mass_converges_to_hyperbolic_area(self):
        want = ball_volume(SP2, 1.0)
        errs = []
        for n_r, n_theta in ((12, 64), (24, 128)):
            mesh = mesh_domain(CIRCLE, n_r, n_theta)
            _, _, M = assemble(mesh)
            ones = np.ones(mesh.dof)
            errs.append(abs(ones @ (M @ ones) - want))
        assert errs[0] <= 0.01 * want
        assert errs[1] <= 0.3 * errs[0]

    def test_boundary_mass_converges_to_perimeter(self):
        want = ball_perimeter(SP2, 1.0)
        errs = []
        for n_r, n_theta in ((12, 64), (24, 128)):
            mesh = mesh_domain(CIRCLE, n_r, n_theta)
            _, B, _ = assemble(mesh)
            ones = np.ones(mesh.dof)
            errs.append(abs(ones @ (B @ ones) - want))
        assert errs[0] <= 0.01 * want
        assert errs[1] <= 0.3 * errs[0]

    def test_matrices_symmetric(self):
        mesh = mesh_domain(FIXTURE, 8, 64)
        for mat in assemble(mesh):
            assert abs(mat - mat.T).max() <= 1e-12


class TestPencil:
    def test_beta_zero_trivial(self):
        mesh = mesh_domain(CIRCLE, 12, 64)
        res = solve_pencil(*assemble(mesh), 0.0)
        assert abs(res.lambda1) <= 1e-7
        assert res.u.max() - res.u.min() <= 1e-6

    @pytest.mark.parametrize("beta", [-1.0, 1.0])
    def test_circle_matches_radial_solver(self, beta):
        lam_ref = solve_radial_shooting(RadialProblem(SP2, 1.0, beta))
        mesh = mesh_domain(CIRCLE, 24, 96)
        res = solve_pencil(*assemble(mesh), beta)
        assert abs(res.lambda1 - lam_ref) <= 0.01 * abs(lam_ref)
        fine = mesh_domain(CIRCLE, 48, 192)
        res_fine = solve_pencil(*assemble(fine), beta)
        assert abs(res_fine.lambda1 - lam_ref) <= 0.001 * abs(lam_ref)

    def test_eigenvector_positive_and_residual_small(self):
        mesh = mesh_domain(FIXTURE, 24, 96)
        K, B, M = assemble(mesh)
        res = solve_pencil(K, B, M, -1.0)
        assert np.all(res.u > 0)
        A = K + (-1.0) * B
        rowscale = np.abs(A).sum(axis=1).max()
        assert res.residual <= 1e-8 * rowscale

    def test_discrete_rayleigh_bound(self):
        mesh = mesh_domain(FIXTURE, 12, 64)
        K, B, M = assemble(mesh)
        ones = np.ones(mesh.dof)
        for beta in (-2.0, -0.5, 0.5, 2.0):
            res = solve_pencil(K, B, M, beta)
            bound = (ones @ ((K + beta * B) @ ones)) / (ones @ (M @ ones))
            assert res.lambda1 <= bound + 1e-10 * max(1.0, abs(bound))

    def test_monotone_in_beta(self):
        mesh = mesh_domain(CIRCLE, 12, 64)
        K, B, M = assemble(mesh)
        lams = [solve_pencil(K, B, M, b).lambda1
                for b in (-2.0, -1.0, 0.0, 1.0, 2.0)]
        assert all(a < b for a, b in zip(lams, lams[1:]))


class TestSolveDomain:
    @pytest.mark.parametrize("beta", [-1.0, 1.0])
    def test_circle_extrapolation(self, beta):
        lam_ref = solve_radial_shooting(RadialProblem(SP2, 1.0, beta))
        res = solve_domain(CIRCLE, beta, refinements=2,
                           base_n_r=12, base_n_theta=64)
        assert abs(res.lambda1 - lam_ref) <= 1e-4 * abs(lam_ref)
        assert res.observed_order >= 1.8
        assert res.error_estimate < 1e-3

    def test_beta_zero(self):
        res = solve_domain(CIRCLE, 0.0, refinements=1,
                           base_n_r=12, base_n_theta=64)
        assert abs(res.lambda1) <= 1e-7

    def test_levels_respect_variational_bound(self):
        beta = -1.0
        from hyprobin.domain2d import curve_geometry
        g = curve_geometry(FIXTURE)
        bound = beta * g.perimeter / g.area
        res = solve_domain(FIXTURE, beta, refinements=1,
                           base_n_r=12, base_n_theta=64)
        for lam in res.level_values:
            assert lam <= bound + 1e-10

    def test_warns_on_non_hconvex(self):
        bad = make_family(1.0, [(2, 0.5, 0.0)])
        with pytest.warns(UserWarning, match="not h-convex"):
            solve_domain(bad, -1.0, refinements=0,
                         base_n_r=8, base_n_theta=64)

    def test_fixture_regression(self):
        # frozen from the first verified run of this solver ladder
        res = solve_domain(FIXTURE, -1.0, refinements=2,
                           base_n_r=24, base_n_theta=96)
        assert res.lambda1 == pytest.approx(-2.7936703, abs=2e-6)
