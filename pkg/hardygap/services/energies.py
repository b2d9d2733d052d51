"""
Weighted p-energies of piecewise-linear functions on graded meshes
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.special import roots_legendre

from hardygap.core.config import settings
from hardygap.core.exceptions import ParameterError, QuadratureOverflowError
from hardygap.models.mesh import GradedMesh, GridFn
from hardygap.models.params import DomainSpec, Params
from hardygap.services import mesh_service
from hardygap.services.geometry import DistanceProfile

logger = logging.getLogger(__name__)

OVERFLOW_LIMIT = 1e300


class EnergyForms:
    """Gradient form G and potential form P of one mesh

    G(u) = sum_e g_e |u'_e|^p with g_e = int_e delta^-alpha w dr, and
    P(u) = sum_{e,q} W_eq |u(x_eq)|^p with the Gauss weights W_eq already
    carrying delta^-(alpha+p) w. Element integrals use Gauss-Legendre in the
    variable log(delta), which is smooth for power weights on graded meshes.
    """

    def __init__(self, mesh: GradedMesh, profile: DistanceProfile, params: Params,
                 gauss_points: Optional[int] = None):
        self.mesh = mesh
        self.profile = profile
        self.params = params
        self.p = params.p
        self.h = mesh.sizes
        self._build(gauss_points or settings.GAUSS_POINTS)

    def _build(self, n_points: int):
        mesh, profile, alpha, p = self.mesh, self.profile, self.params.alpha, self.p
        x, wq = roots_legendre(n_points)
        left, right = mesh.nodes[:-1], mesh.nodes[1:]
        mids = 0.5 * (left + right)
        d_left = np.abs(profile.delta(left))
        d_right = np.abs(profile.delta(right))
        d_near = np.minimum(d_left, d_right)
        d_far = np.maximum(d_left, d_right)
        if np.any(d_near <= 0.0):
            bad = int(np.flatnonzero(d_near <= 0.0)[0])
            raise QuadratureOverflowError("mesh touches the boundary (delta = 0)", element=bad)

        s_near, s_far = np.log(d_near), np.log(d_far)
        half = 0.5 * (s_far - s_near)
        s = 0.5 * (s_far + s_near)[:, None] + half[:, None] * x[None, :]
        delta_q = np.exp(s)
        # Radius of each Gauss point on the element's own branch.
        near_radius = np.where(d_left <= d_right, left, right)
        r_q = near_radius[:, None] + np.sign(mids - near_radius)[:, None] * (delta_q - d_near[:, None])
        jac = half[:, None] * delta_q * wq[None, :]
        w_r = profile.weight(r_q)

        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            grad_density = delta_q ** (-alpha) * w_r * jac
            pot_density = delta_q ** (-(alpha + p)) * w_r * jac
        self._check_finite(grad_density)
        self._check_finite(pot_density)

        self.g = grad_density.sum(axis=1)
        self.W = pot_density
        h = self.h[:, None]
        self.N0 = (right[:, None] - r_q) / h
        self.N1 = (r_q - left[:, None]) / h

    @staticmethod
    def _check_finite(density: np.ndarray):
        bad = ~np.isfinite(density) | (np.abs(density) > OVERFLOW_LIMIT)
        if np.any(bad):
            element = int(np.flatnonzero(bad.any(axis=1))[0])
            logger.error(f"quadrature overflow on element {element}")
            raise QuadratureOverflowError("non-finite weighted quadrature near a singular end", element=element)

    # Values on all nodes ------------------------------------------------

    def slopes(self, u: np.ndarray) -> np.ndarray:
        return np.diff(u) / self.h

    def point_values(self, u: np.ndarray) -> np.ndarray:
        return self.N0 * u[:-1, None] + self.N1 * u[1:, None]

    def gradient_form(self, u) -> float:
        u = u.values if isinstance(u, GridFn) else np.asarray(u, dtype=float)
        return float(np.sum(self.g * np.abs(self.slopes(u)) ** self.p))

    def potential_form(self, u) -> float:
        u = u.values if isinstance(u, GridFn) else np.asarray(u, dtype=float)
        return float(np.sum(self.W * np.abs(self.point_values(u)) ** self.p))

    def quotient(self, u) -> float:
        return self.gradient_form(u) / self.potential_form(u)

    def forms(self, u) -> Tuple[float, float]:
        return self.gradient_form(u), self.potential_form(u)

    # Derivatives ---------------------------------------------------------

    def gradient_form_grad(self, u: np.ndarray) -> np.ndarray:
        s = self.slopes(u)
        t = self.p * self.g * np.sign(s) * np.abs(s) ** (self.p - 1.0) / self.h
        grad = np.zeros_like(u)
        grad[1:] += t
        grad[:-1] -= t
        return grad

    def gradient_form_hessian_coeffs(self, u: np.ndarray, floor_rel: float = 1e-6) -> np.ndarray:
        """Element stiffness k_e of the tridiagonal Hessian of G, slopes floored"""
        s = np.abs(self.slopes(u))
        floor = floor_rel * max(float(s.max()), 1e-300)
        s = np.maximum(s, floor)
        return self.p * (self.p - 1.0) * self.g * s ** (self.p - 2.0) / self.h ** 2

    def potential_form_grad(self, u: np.ndarray) -> np.ndarray:
        v = self.point_values(u)
        t = self.p * self.W * np.sign(v) * np.abs(v) ** (self.p - 1.0)
        grad = np.zeros_like(u)
        grad[:-1] += np.sum(t * self.N0, axis=1)
        grad[1:] += np.sum(t * self.N1, axis=1)
        return grad

    # Quadratic case -------------------------------------------------------

    def quadratic_matrices(self) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
        """K and M with G(u) = u^T K u and P(u) = u^T M u for p = 2, on free nodes"""
        n = self.mesh.nodes.size
        k = self.g / self.h ** 2
        k_diag = np.zeros(n)
        k_diag[:-1] += k
        k_diag[1:] += k
        stiffness = sparse.diags([-k, k_diag, -k], [-1, 0, 1], format="csr")

        m00 = np.sum(self.W * self.N0 ** 2, axis=1)
        m11 = np.sum(self.W * self.N1 ** 2, axis=1)
        m01 = np.sum(self.W * self.N0 * self.N1, axis=1)
        m_diag = np.zeros(n)
        m_diag[:-1] += m00
        m_diag[1:] += m11
        mass = sparse.diags([m01, m_diag, m01], [-1, 0, 1], format="csr")

        free = np.flatnonzero(self.mesh.free_mask)
        return stiffness[free][:, free], mass[free][:, free]


def assemble_energies(mesh: GradedMesh, profile: DistanceProfile, params: Params) -> EnergyForms:
    """Gradient and potential forms of the weighted Rayleigh quotient on ``mesh``"""
    return EnergyForms(mesh, profile, params)


def scale_quotient(fn: GridFn, scale: float, spec: DomainSpec, params: Params) -> float:
    """Quotient of phi(r / scale) on the dilated domain; equals the quotient of phi"""
    if scale <= 0.0:
        raise ParameterError(f"dilation factor must be positive, got {scale!r}")
    dilated = mesh_service.dilate(fn, scale)
    profile = DistanceProfile(spec.dilated(scale), params.dim)
    return EnergyForms(dilated.mesh, profile, params).quotient(dilated)
