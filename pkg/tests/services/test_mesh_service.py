import math

import numpy as np
import pytest

from hardygap.core.exceptions import CollarTooThinError, ParameterError
from hardygap.models.mesh import Grading, GridFn
from hardygap.models.run_config import MeshOptions
from hardygap.services.mesh_service import (
    bisect,
    build_mesh,
    collar_submesh,
    cutoff_family,
    cutoff_pairs,
    dilate,
    interpolate,
    tail_submesh,
)


class TestBuildMesh:

    def test_annulus_mesh(self, annulus_profile, small_mesh_options):
        mesh = build_mesh(annulus_profile, small_mesh_options, 1e-3)
        assert mesh.dirichlet == (True, True)
        assert 1e-3 / mesh.ratio < mesh.t_min <= 1e-3
        assert mesh.nodes[0] == pytest.approx(1.0 + mesh.t_min)
        assert mesh.nodes[-1] == pytest.approx(2.0 - mesh.t_min)
        assert np.any(np.isclose(mesh.nodes, 1.5, rtol=0.0, atol=1e-14))
        assert mesh.kink_radii == (1.5,)
        assert mesh.ratio <= small_mesh_options.ratio

    def test_geometric_grading_toward_the_boundary(self, annulus_profile, small_mesh_options):
        mesh = build_mesh(annulus_profile, small_mesh_options, 1e-3)
        inner = mesh.nodes[mesh.nodes <= 1.5] - 1.0
        ratios = inner[1:] / inner[:-1]
        assert np.allclose(ratios, mesh.ratio)

    def test_ball_has_a_free_centre(self, ball_profile, small_mesh_options):
        mesh = build_mesh(ball_profile, small_mesh_options, 1e-2)
        assert mesh.nodes[0] == 0.0
        assert mesh.dirichlet == (False, True)
        assert mesh.n_free == mesh.nodes.size - 1
        assert 1.0 - mesh.nodes[-1] == pytest.approx(mesh.t_min)

    def test_exterior_needs_an_outer_cutoff(self, exterior_profile, small_mesh_options):
        with pytest.raises(ParameterError):
            build_mesh(exterior_profile, small_mesh_options, 1e-2)

    def test_exterior_mesh(self, exterior_profile, small_mesh_options):
        mesh = build_mesh(exterior_profile, small_mesh_options, 1e-2, r_max=100.0)
        assert mesh.grading == Grading.LOG_TOWARD_INFINITY
        assert mesh.dirichlet == (True, True)
        assert mesh.nodes[0] - 1.0 <= 1e-2
        assert mesh.r_max == mesh.nodes[-1] and mesh.r_max >= 100.0

    def test_uniform_grading(self, annulus_profile):
        options = MeshOptions(elements=40, grading=Grading.UNIFORM, t_min=[1e-2])
        mesh = build_mesh(annulus_profile, options, 1e-2)
        assert mesh.n_elements == 40
        assert mesh.t_min == pytest.approx(1e-2)

    def test_t_min_beyond_the_depth(self, annulus_profile, small_mesh_options):
        with pytest.raises(ParameterError):
            build_mesh(annulus_profile, small_mesh_options, 0.6)


class TestFamilies:

    def test_cutoff_pairs(self, annulus_profile, exterior_profile, small_mesh_options):
        assert cutoff_pairs(annulus_profile, small_mesh_options) == [(1e-2, None), (1e-3, None)]
        options = MeshOptions(elements=64, t_min=[1e-2, 1e-3], r_max=[50.0, 500.0])
        assert cutoff_pairs(exterior_profile, options) == [(1e-2, 50.0), (1e-3, 500.0)]

    def test_family_is_nested(self, annulus_profile, small_mesh_options):
        coarse, fine = cutoff_family(annulus_profile, small_mesh_options)
        assert coarse.ratio == fine.ratio
        assert coarse.t_min > fine.t_min
        assert np.all(np.isin(coarse.nodes, fine.nodes))

    def test_bisection(self, annulus_profile, small_mesh_options):
        mesh = build_mesh(annulus_profile, small_mesh_options, 1e-2)
        fine = bisect(mesh, annulus_profile)
        assert fine.nodes.size == 2 * mesh.nodes.size - 1
        assert np.array_equal(fine.nodes[0::2], mesh.nodes)
        assert fine.ratio == pytest.approx(math.sqrt(mesh.ratio))
        assert fine.level == mesh.level + 1
        # Midpoints of the inner collar sit at geometric means of the distance.
        d = fine.nodes[:3] - 1.0
        assert d[1] == pytest.approx(math.sqrt(d[0] * d[2]))


class TestRestriction:

    def test_collar_submesh(self, annulus_profile, small_mesh_options):
        mesh = build_mesh(annulus_profile, small_mesh_options, 1e-3)
        inner, outer = annulus_profile.branches
        collar = collar_submesh(mesh, annulus_profile, inner, 0.1)
        assert collar.nodes[0] == mesh.nodes[0]
        assert collar.nodes[-1] - 1.0 >= 0.1
        assert collar.nodes[-2] - 1.0 < 0.1
        assert collar.dirichlet == (True, True)
        mirror = collar_submesh(mesh, annulus_profile, outer, 0.1)
        assert mirror.nodes[-1] == mesh.nodes[-1]
        assert 2.0 - mirror.nodes[0] >= 0.1

    def test_thin_collar(self, annulus_profile, small_mesh_options):
        mesh = build_mesh(annulus_profile, small_mesh_options, 1e-3)
        with pytest.raises(CollarTooThinError):
            collar_submesh(mesh, annulus_profile, annulus_profile.branches[0], 1.5e-3)

    def test_tail_submesh(self, exterior_profile, small_mesh_options):
        mesh = build_mesh(exterior_profile, small_mesh_options, 1e-2, r_max=100.0)
        tail = tail_submesh(mesh, exterior_profile, 10.0)
        assert tail.nodes[0] - 1.0 <= 10.0 < tail.nodes[1] - 1.0
        assert tail.nodes[-1] == mesh.nodes[-1]
        assert tail.dirichlet == (True, True)


def test_interpolation_and_dilation(annulus_profile, small_mesh_options):
    mesh = build_mesh(annulus_profile, small_mesh_options, 1e-2)
    fn = GridFn(mesh, annulus_profile.delta(mesh.nodes))
    fine = interpolate(fn, bisect(mesh, annulus_profile))
    assert np.allclose(fine.values[0::2], fn.values)

    wide = dilate(fn, 3.0)
    assert np.allclose(wide.mesh.nodes, 3.0 * mesh.nodes)
    assert np.array_equal(wide.values, fn.values)
    assert wide.mesh.t_min == pytest.approx(3.0 * mesh.t_min)
    assert wide.mesh.kink_radii == (4.5,)
    assert wide(4.5) == pytest.approx(fn(1.5))
