"""
Discrete minimization of the weighted p-Rayleigh quotient on radial meshes
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh
from scipy.stats import linregress

from hardygap.core.exceptions import CollarTooThinError, ParameterError, SolverConvergenceError
from hardygap.models.mesh import GradedMesh, GridFn
from hardygap.models.params import Location, Params
from hardygap.models.results import DecayFit, Extrapolation
from hardygap.models.run_config import HardyProblem, SolverOptions
from hardygap.services import mesh_service
from hardygap.services.constants import c_const
from hardygap.services.energies import EnergyForms, assemble_energies
from hardygap.services.extrapolation import cutoff_extrapolation, richardson
from hardygap.services.geometry import Branch, DistanceProfile

logger = logging.getLogger(__name__)

DENSE_LIMIT = 64
ARMIJO = 1e-4
MAX_HALVINGS = 40
NEWTON_REL_TOL = 1e-13


@dataclass(frozen=True)
class RayleighResult:
    """Discrete quotient minimum and its minimizer (potential form = 1)"""
    value: float
    minimizer: GridFn
    iterations: int
    final_decrement: float
    converged: bool = True
    mesh_summary: Dict = field(default_factory=dict)
    spectrum: Tuple[float, ...] = ()
    el_residual: Optional[float] = None

    def summary(self) -> dict:
        return {
            "value": self.value,
            "iterations": self.iterations,
            "final_decrement": self.final_decrement,
            "converged": self.converged,
            "el_residual": self.el_residual,
            "spectrum": list(self.spectrum),
            "mesh": self.mesh_summary,
        }


@dataclass(frozen=True)
class RefinementStudy:
    results: List[RayleighResult]
    extrapolation: Extrapolation

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.results]

    @property
    def monotone(self) -> bool:
        v = self.values
        return all(b <= a * (1 + 1e-12) + 1e-15 for a, b in zip(v, v[1:]))


@dataclass(frozen=True)
class CutoffStudy:
    results: List[RayleighResult]
    extrapolation: Extrapolation
    cutoffs: List[Tuple[float, Optional[float]]]
    binding_end: str

    @property
    def values(self) -> List[float]:
        return [r.value for r in self.results]

    @property
    def best(self) -> RayleighResult:
        return self.results[-1]


@dataclass(frozen=True)
class CollarResult:
    """Constant at infinity estimated on collars, one entry per singular end"""
    components: Dict[str, Extrapolation]
    raw_minima: Dict[str, List[float]]

    @property
    def value(self) -> float:
        return min(e.limit for e in self.components.values())

    @property
    def binding_component(self) -> str:
        return min(self.components, key=lambda k: self.components[k].limit)

    @property
    def error_estimate(self) -> float:
        return self.components[self.binding_component].error_estimate


def _initial_guess(mesh: GradedMesh) -> np.ndarray:
    """Index tent measured from the Dirichlet ends"""
    n = mesh.nodes.size
    idx = np.arange(n, dtype=float)
    left = idx if mesh.dirichlet[0] else np.full(n, np.inf)
    right = (n - 1 - idx) if mesh.dirichlet[1] else np.full(n, np.inf)
    tent = np.minimum(left, right)
    return np.where(np.isfinite(tent), tent, 1.0)


def _normalize(forms: EnergyForms, u: np.ndarray) -> np.ndarray:
    """Flip to positive mass, clip roundoff negatives, scale to P(u) = 1"""
    if u.sum() < 0:
        u = -u
    u = np.maximum(u, 0.0)
    potential = forms.potential_form(u)
    if potential <= 0.0 or not math.isfinite(potential):
        raise ParameterError("iterate vanished on the mesh")
    return u / potential ** (1.0 / forms.p)


def _el_residual(forms: EnergyForms, u: np.ndarray, value: float) -> float:
    free = forms.mesh.free_mask
    grad_g = forms.gradient_form_grad(u)[free]
    grad_p = forms.potential_form_grad(u)[free]
    scale = np.linalg.norm(grad_g)
    return float(np.linalg.norm(grad_g - value * grad_p) / scale) if scale > 0 else 0.0


class InversePowerSolver:
    """Inverse power iteration for the p-Rayleigh quotient, p != 2

    Each step minimizes the convex functional G(v) - <grad P(u), v> by a
    damped Newton method on the nodal values and renormalizes the result.
    The quotient is non-increasing along the iteration.
    """

    def __init__(self, forms: EnergyForms, options: SolverOptions):
        self.forms = forms
        self.options = options
        self.p = forms.p
        self.free = np.flatnonzero(forms.mesh.free_mask)
        self.n = forms.mesh.nodes.size

    def _full(self, free_values: np.ndarray) -> np.ndarray:
        u = np.zeros(self.n)
        u[self.free] = free_values
        return u

    def _banded_hessian(self, u: np.ndarray) -> np.ndarray:
        k = self.forms.gradient_form_hessian_coeffs(u)
        diag = np.zeros(self.n)
        diag[:-1] += k
        diag[1:] += k
        first, last = self.free[0], self.free[-1]
        off = -k[first:last]
        ab = np.zeros((3, self.free.size))
        ab[0, 1:] = off
        ab[1, :] = diag[self.free]
        ab[2, :-1] = off
        return ab

    def _objective(self, v: np.ndarray, target: np.ndarray) -> float:
        return self.forms.gradient_form(self._full(v)) - float(target @ v)

    def _newton(self, v: np.ndarray, target: np.ndarray) -> np.ndarray:
        value = self._objective(v, target)
        for _ in range(self.options.newton_max_steps):
            full = self._full(v)
            grad = self.forms.gradient_form_grad(full)[self.free] - target
            step = linalg.solve_banded((1, 1), self._banded_hessian(full), -grad)
            slope = float(grad @ step)
            if slope >= 0.0:
                step, slope = -grad, -float(grad @ grad)
            scale = max(abs(value), self.forms.gradient_form(full), 1e-300)
            if -slope <= NEWTON_REL_TOL * scale:
                break
            t = 1.0
            for _ in range(MAX_HALVINGS):
                trial = v + t * step
                trial_value = self._objective(trial, target)
                if trial_value <= value + ARMIJO * t * slope:
                    break
                t *= 0.5
            else:
                break
            v, value = trial, trial_value
        return v

    def solve(self, initial: np.ndarray) -> Tuple[np.ndarray, float, int, float, bool]:
        forms, tol = self.forms, self.options.tol
        u = _normalize(forms, initial)
        q = forms.gradient_form(u)
        best_u, best_q = u, q
        decrement = math.inf
        converged = False
        iteration = 0
        for iteration in range(1, self.options.max_iter + 1):
            target = forms.potential_form_grad(u)[self.free]
            v0 = q ** (-1.0 / (self.p - 1.0)) * u[self.free] if q > 0 else u[self.free]
            v = self._newton(v0, target)
            potential = forms.potential_form(self._full(v))
            if potential <= 0.0 or not math.isfinite(potential):
                logger.warning(f"inverse power iterate degenerated at iteration {iteration}")
                break
            u_new = self._full(v) / potential ** (1.0 / self.p)
            q_new = forms.gradient_form(u_new)
            decrement = q - q_new
            u, q = u_new, q_new
            if q < best_q:
                best_u, best_q = u, q
            logger.debug(f"iteration {iteration}: quotient {q:.15g}, decrement {decrement:.3e}")
            if abs(decrement) <= tol * max(q, 1e-300):
                converged = True
                break
        return best_u, best_q, iteration, decrement, converged


def _solve_quadratic(forms: EnergyForms, options: SolverOptions) -> Tuple[np.ndarray, Tuple[float, ...]]:
    stiffness, mass = forms.quadratic_matrices()
    n = stiffness.shape[0]
    k = min(options.n_eigs, n)
    # Jacobi scaling keeps graded-mesh matrices well conditioned.
    scaling = sparse.diags(1.0 / np.sqrt(mass.diagonal()))
    ks = (scaling @ stiffness @ scaling).tocsc()
    ms = (scaling @ mass @ scaling).tocsc()
    if n <= DENSE_LIMIT or k >= n - 1:
        values, vectors = linalg.eigh(ks.toarray(), ms.toarray(), subset_by_index=[0, k - 1])
    else:
        try:
            values, vectors = eigsh(ks, k=k, M=ms, sigma=0.0, which="LM", tol=options.eigen_tol)
        except ArpackNoConvergence as exc:
            logger.error(f"eigensolver did not converge on {n} unknowns")
            raise SolverConvergenceError("p = 2 eigensolver did not converge", best=exc) from exc
    order = np.argsort(values)
    values, vectors = values[order], vectors[:, order]
    u_free = scaling @ vectors[:, 0]
    u = np.zeros(forms.mesh.nodes.size)
    u[forms.mesh.free_mask] = u_free
    return u, tuple(float(v) for v in values)


def minimize_quotient(mesh: GradedMesh, profile: DistanceProfile, params: Params,
                      options: Optional[SolverOptions] = None, initial: Optional[GridFn] = None,
                      raise_on_failure: bool = False) -> RayleighResult:
    """Minimize G(u)/P(u) over piecewise-linear functions on ``mesh``.

    p = 2 is a generalized symmetric eigenproblem; other p use the inverse
    power iteration. Non-convergence returns the best iterate flagged
    unconverged, or raises SolverConvergenceError with it when asked to.
    """
    options = options or SolverOptions()
    if mesh.n_free == 0:
        raise ParameterError("empty admissible space: the mesh has no free nodes")
    forms = assemble_energies(mesh, profile, params)

    if params.p == 2.0:
        u, spectrum = _solve_quadratic(forms, options)
        u = _normalize(forms, u)
        value = forms.gradient_form(u)
        result = RayleighResult(
            value=value, minimizer=GridFn(mesh, u), iterations=1, final_decrement=0.0,
            converged=True, mesh_summary=mesh.summary(), spectrum=spectrum,
            el_residual=_el_residual(forms, u, value),
        )
    else:
        start = initial.values if initial is not None else _initial_guess(mesh)
        if initial is not None and not np.any(start[mesh.free_mask]):
            start = _initial_guess(mesh)
        solver = InversePowerSolver(forms, options)
        u, value, iterations, decrement, converged = solver.solve(np.asarray(start, dtype=float))
        u = _normalize(forms, u)
        value = forms.gradient_form(u)
        result = RayleighResult(
            value=value, minimizer=GridFn(mesh, u), iterations=iterations, final_decrement=decrement,
            converged=converged, mesh_summary=mesh.summary(), spectrum=(value,),
            el_residual=_el_residual(forms, u, value),
        )
        if not converged:
            logger.warning(f"quotient iteration stopped after {iterations} iterations, decrement {decrement:.3e}")
            if raise_on_failure:
                raise SolverConvergenceError(f"no convergence within {options.max_iter} iterations", best=result)

    logger.info(f"minimized quotient on {mesh.n_elements} elements: {result.value:.12g} "
                f"({result.iterations} iterations)")
    return result


def _warm_start(previous: Optional[RayleighResult], mesh: GradedMesh) -> Optional[GridFn]:
    if previous is None:
        return None
    return mesh_service.interpolate(previous.minimizer, mesh)


def refinement_study(problem: HardyProblem, levels: int, profile: Optional[DistanceProfile] = None,
                     t_min: Optional[float] = None, r_max: Optional[float] = None) -> RefinementStudy:
    """Minimize on ``levels`` nested bisections of one mesh and extrapolate"""
    if levels < 2:
        raise ParameterError("a refinement study needs at least two levels")
    profile = profile or DistanceProfile(problem.domain, problem.params.dim)
    pairs = mesh_service.cutoff_pairs(profile, problem.mesh)
    t_default, r_default = pairs[-1]
    mesh = mesh_service.build_mesh(profile, problem.mesh, t_min or t_default, r_max or r_default)
    results: List[RayleighResult] = []
    previous = None
    for level in range(levels):
        if level:
            mesh = mesh_service.bisect(mesh, profile)
        previous = minimize_quotient(mesh, profile, problem.params, problem.solver,
                                     initial=_warm_start(previous, mesh))
        results.append(previous)
    extrapolation = richardson([r.value for r in results], ratio=2.0)
    extrapolation = extrapolation.model_copy(update={
        "abscissae": [float(r.minimizer.mesh.sizes.max()) for r in results],
    })
    study = RefinementStudy(results=results, extrapolation=extrapolation)
    if not study.monotone:
        logger.warning(f"refinement values are not monotone: {study.values}")
    return study


def _binding_end(profile: DistanceProfile, params: Params) -> str:
    """Singular end that controls the cutoff error"""
    if profile.spec.is_exterior and c_const(params, params.dim) <= c_const(params, 1):
        return "infinity"
    return "boundary"


def _log_depths(profile: DistanceProfile, cutoffs, end: str) -> List[float]:
    if end == "infinity":
        inner = profile.spec.inner
        return [math.log(r_max / inner) for _, r_max in cutoffs]
    depth = profile.spec.inner if profile.spec.is_exterior else profile.branches[0].depth
    return [math.log(depth / t) for t, _ in cutoffs]


def cutoff_study(problem: HardyProblem, profile: Optional[DistanceProfile] = None) -> CutoffStudy:
    """Minimize over the t_min (and R_max) family and extrapolate the cutoff to zero"""
    profile = profile or DistanceProfile(problem.domain, problem.params.dim)
    family = mesh_service.cutoff_family(profile, problem.mesh)
    cutoffs = mesh_service.cutoff_pairs(profile, problem.mesh)
    results: List[RayleighResult] = []
    previous = None
    for mesh in family:
        previous = minimize_quotient(mesh, profile, problem.params, problem.solver,
                                     initial=_warm_start(previous, mesh))
        results.append(previous)
    end = _binding_end(profile, problem.params)
    logs = _log_depths(profile, [(m.t_min, m.r_max) for m in family], end)
    extrapolation = cutoff_extrapolation([r.value for r in results], logs)
    logger.info(f"cutoff study on {problem.domain.label()}: raw {[round(r.value, 10) for r in results]}, "
                f"limit {extrapolation.limit:.10g} +- {extrapolation.error_estimate:.2e} ({extrapolation.model})")
    return CutoffStudy(results=results, extrapolation=extrapolation, cutoffs=cutoffs, binding_end=end)


def _collar_sequence(family: Sequence[GradedMesh], profile: DistanceProfile, params: Params,
                     options: SolverOptions, restrict) -> List[RayleighResult]:
    results: List[RayleighResult] = []
    previous = None
    for mesh in family:
        sub = restrict(mesh)
        previous = minimize_quotient(sub, profile, params, options, initial=_warm_start(previous, sub))
        results.append(previous)
    return results


def collar_constant(family: Sequence[GradedMesh], profile: DistanceProfile, params: Params,
                    width: Optional[float] = None, core: Optional[float] = None,
                    options: Optional[SolverOptions] = None) -> CollarResult:
    """Quotient minimum on functions supported near the singular ends.

    Bounded domains restrict to {delta < width} at every boundary branch;
    exterior domains use the boundary collar {delta < width} and the tail
    {delta > core}. Each component is extrapolated over the cutoff family;
    the estimate of the constant at infinity is the smallest component.
    """
    options = options or SolverOptions()
    spec = profile.spec
    components: Dict[str, Extrapolation] = {}
    raw: Dict[str, List[float]] = {}

    if width is not None:
        if spec.is_half_line:
            branches: List[Branch] = profile.branches[:1]
        else:
            branches = list(profile.branches)
        for branch in branches:
            if width >= branch.depth and not spec.is_exterior:
                raise CollarTooThinError(f"collar width {width} exceeds the branch depth {branch.depth}")
            results = _collar_sequence(
                family, profile, params, options,
                lambda mesh, b=branch: mesh_service.collar_submesh(mesh, profile, b, width),
            )
            logs = [math.log(width / r.minimizer.mesh.t_min) for r in results]
            name = "boundary" if spec.is_exterior else branch.name
            raw[name] = [r.value for r in results]
            components[name] = cutoff_extrapolation(raw[name], logs)

    if core is not None:
        if not spec.is_exterior:
            raise ParameterError("tail collars exist only for exterior domains")
        results = _collar_sequence(
            family, profile, params, options,
            lambda mesh: mesh_service.tail_submesh(mesh, profile, core),
        )
        logs = [math.log(r.minimizer.mesh.nodes[-1] / (spec.inner + core)) for r in results]
        raw["tail"] = [r.value for r in results]
        components["tail"] = cutoff_extrapolation(raw["tail"], logs)

    if not components:
        raise ParameterError("collar_constant needs a collar width or a tail core distance")
    result = CollarResult(components=components, raw_minima=raw)
    logger.info(f"collar constants width={width} core={core}: "
                f"{ {k: round(v.limit, 10) for k, v in components.items()} }")
    return result


def decay_exponent(fn: Union[RayleighResult, GridFn], profile: DistanceProfile,
                   window: Optional[Tuple[float, float]] = None,
                   location: Location = Location.BOUNDARY, branch: Optional[Branch] = None) -> DecayFit:
    """Log-log slope of a minimizer against delta (boundary) or r (infinity)"""
    grid = fn.minimizer if isinstance(fn, RayleighResult) else fn
    nodes, values = grid.mesh.nodes, grid.values
    if location == Location.INFINITY:
        if not profile.spec.is_exterior:
            raise ParameterError("decay at infinity needs an exterior domain")
        x = nodes
        lo, hi = window or (10.0 * profile.spec.inner, nodes[-1] / 10.0)
        mask = (x >= lo) & (x <= hi)
    else:
        branch = branch or profile.branches[0]
        x = branch.distance(nodes)
        lo, hi = window or (1e3 * grid.mesh.t_min, 1e-2 * branch.depth if math.isfinite(branch.depth)
                            else 1e-2 * profile.spec.inner)
        on_branch = np.array([profile.branch_at(r) == branch for r in nodes])
        mask = on_branch & (x >= lo) & (x <= hi)
    if mask.sum() < 3:
        raise ParameterError(f"decay window ({lo:.3e}, {hi:.3e}) holds fewer than 3 nodes")
    u = values[mask]
    if np.any(u <= 0.0):
        raise ParameterError("minimizer is not positive on the decay window")
    fit = linregress(np.log(x[mask]), np.log(u))
    return DecayFit(
        slope=float(fit.slope), r_squared=float(fit.rvalue ** 2), intercept=float(fit.intercept),
        location=location, window=(float(lo), float(hi)), points=int(mask.sum()),
    )
