import numpy as np
import pytest

from hardygap.core.exceptions import ParameterError, QuadratureOverflowError
from hardygap.models.mesh import GradedMesh, Grading, GridFn
from hardygap.models.params import Params
from hardygap.services.energies import EnergyForms, assemble_energies, scale_quotient
from hardygap.services.geometry import DistanceProfile
from hardygap.services.mesh_service import build_mesh, tail_submesh


@pytest.fixture
def annulus_mesh(annulus_profile, small_mesh_options):
    return build_mesh(annulus_profile, small_mesh_options, 1e-2)


def random_fn(mesh, seed=0):
    rng = np.random.default_rng(seed)
    return GridFn(mesh, rng.uniform(0.1, 1.0, mesh.nodes.size))


def test_quadratic_matrices_reproduce_the_forms(annulus_mesh, annulus_profile, laplacian_params):
    forms = assemble_energies(annulus_mesh, annulus_profile, laplacian_params)
    stiffness, mass = forms.quadratic_matrices()
    assert stiffness.shape == (annulus_mesh.n_free, annulus_mesh.n_free)
    for seed in range(3):
        fn = random_fn(annulus_mesh, seed)
        u = fn.free_values
        assert u @ (stiffness @ u) == pytest.approx(forms.gradient_form(fn), rel=1e-12)
        assert u @ (mass @ u) == pytest.approx(forms.potential_form(fn), rel=1e-12)


def test_gradients_match_finite_differences(annulus_mesh, annulus_profile):
    forms = EnergyForms(annulus_mesh, annulus_profile, Params(alpha=0.5, p=3.0, dim=2))
    u = random_fn(annulus_mesh).values.copy()
    grad_g = forms.gradient_form_grad(u)
    grad_p = forms.potential_form_grad(u)
    for i in (1, 10, 40, u.size - 2):
        step = 1e-6 * max(1.0, abs(u[i]))
        up, down = u.copy(), u.copy()
        up[i] += step
        down[i] -= step
        fd_g = (forms.gradient_form(up) - forms.gradient_form(down)) / (2.0 * step)
        fd_p = (forms.potential_form(up) - forms.potential_form(down)) / (2.0 * step)
        assert grad_g[i] == pytest.approx(fd_g, rel=1e-5, abs=1e-8 * np.abs(grad_g).max())
        assert grad_p[i] == pytest.approx(fd_p, rel=1e-5, abs=1e-8 * np.abs(grad_p).max())


def test_forms_are_p_homogeneous(annulus_mesh, annulus_profile):
    forms = EnergyForms(annulus_mesh, annulus_profile, Params(alpha=0.5, p=3.0, dim=2))
    fn = random_fn(annulus_mesh)
    g, pot = forms.forms(fn)
    assert forms.gradient_form(fn.scaled(-2.0)) == pytest.approx(8.0 * g, rel=1e-12)
    assert forms.potential_form(fn.scaled(-2.0)) == pytest.approx(8.0 * pot, rel=1e-12)
    assert forms.quotient(fn.scaled(0.3)) == pytest.approx(forms.quotient(fn), rel=1e-12)


def test_unweighted_gradient_coefficients_are_element_sizes(half_line, small_mesh_options):
    profile = DistanceProfile(half_line, 2)
    mesh = build_mesh(profile, small_mesh_options, 1e-3)
    forms = EnergyForms(mesh, profile, Params(alpha=0.0, p=2.0))
    assert np.allclose(forms.g, mesh.sizes, rtol=1e-12)


def test_mesh_touching_the_boundary_overflows(annulus_profile, laplacian_params):
    mesh = GradedMesh(nodes=np.linspace(1.0, 2.0, 5), grading=Grading.UNIFORM, ratio=1.0, t_min=0.0)
    with pytest.raises(QuadratureOverflowError):
        EnergyForms(mesh, annulus_profile, laplacian_params)


class TestScaleInvariance:

    @pytest.mark.parametrize("alpha, p, dim", [(0.0, 2.0, 2), (0.5, 3.0, 3), (-1.0, 1.5, 2)])
    @pytest.mark.parametrize("scale", [0.5, 3.0, 40.0])
    def test_dilated_quotient(self, annulus, small_mesh_options, alpha, p, dim, scale):
        params = Params(alpha=alpha, p=p, dim=dim)
        profile = DistanceProfile(annulus, dim)
        mesh = build_mesh(profile, small_mesh_options, 1e-2)
        fn = random_fn(mesh, seed=3)
        base = EnergyForms(mesh, profile, params).quotient(fn)
        assert scale_quotient(fn, scale, annulus, params) == pytest.approx(base, rel=1e-9)

    @pytest.mark.parametrize("alpha, p", [(0.0, 2.0), (0.5, 3.0), (-0.5, 1.5)])
    @pytest.mark.parametrize("scale", [0.5, 3.0, 40.0])
    def test_dilated_half_line(self, half_line, small_mesh_options, alpha, p, scale):
        params = Params(alpha=alpha, p=p, dim=2)
        profile = DistanceProfile(half_line, params.dim)
        mesh = build_mesh(profile, small_mesh_options, 1e-2)
        fn = random_fn(mesh, seed=5)
        base = EnergyForms(mesh, profile, params).quotient(fn)
        assert scale_quotient(fn, scale, half_line, params) == pytest.approx(base, rel=1e-9)

    @pytest.mark.parametrize("alpha, p", [(0.0, 2.0), (0.5, 3.0), (2.0, 2.0)])
    @pytest.mark.parametrize("scale", [0.5, 3.0, 40.0])
    def test_dilated_exterior(self, exterior, small_mesh_options, alpha, p, scale):
        params = Params(alpha=alpha, p=p, dim=3)
        profile = DistanceProfile(exterior, params.dim)
        mesh = build_mesh(profile, small_mesh_options, 1e-2, r_max=100.0)
        for region in (mesh, tail_submesh(mesh, profile, 10.0)):
            fn = random_fn(region, seed=7)
            base = EnergyForms(region, profile, params).quotient(fn)
            assert scale_quotient(fn, scale, exterior, params) == pytest.approx(base, rel=1e-9)

    def test_scale_must_be_positive(self, annulus, annulus_mesh, laplacian_params):
        with pytest.raises(ParameterError):
            scale_quotient(random_fn(annulus_mesh), 0.0, annulus, laplacian_params)
