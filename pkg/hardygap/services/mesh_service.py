"""
Graded mesh construction, nested refinement and collar restriction
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from hardygap.core.config import settings
from hardygap.core.exceptions import CollarTooThinError, ParameterError
from hardygap.models.mesh import GradedMesh, Grading, GridFn
from hardygap.models.params import DomainKind
from hardygap.models.run_config import MeshOptions
from hardygap.services.geometry import Branch, DistanceProfile

logger = logging.getLogger(__name__)


def _geometric_ratio(span: float, elements: int, cap: float) -> float:
    """Ratio giving ``elements`` geometric elements over log-span ``span``, capped"""
    if elements < 1:
        raise ParameterError("elements must be positive")
    return min(cap, math.exp(span / elements))


def _branch_distances(depth: float, t_min: float, ratio: float, grading: Grading, elements: int) -> np.ndarray:
    """Distances from depth down to the truncation, decreasing"""
    if t_min >= depth:
        raise ParameterError(f"t_min={t_min} must be below the branch depth {depth}")
    if grading == Grading.UNIFORM:
        return np.linspace(depth, t_min, elements + 1)
    steps = max(1, math.ceil(math.log(depth / t_min) / math.log(ratio) - 1e-9))
    return depth * ratio ** (-np.arange(steps + 1, dtype=float))


def _assemble_bounded(profile: DistanceProfile, t_min: float, ratio: float, grading: Grading,
                      elements_per_branch: int) -> Tuple[np.ndarray, Tuple[bool, bool]]:
    spec = profile.spec
    branches = profile.branches
    pieces = []
    for branch in branches:
        distances = _branch_distances(branch.depth, t_min, ratio, grading, elements_per_branch)
        pieces.append(np.sort(branch.radius(distances)))
    if len(pieces) == 1:
        nodes = pieces[0]
    else:
        nodes = np.concatenate([pieces[0], pieces[1][1:]])
    # The ball centre is a free end; every truncation node is Dirichlet.
    dirichlet = (spec.kind != DomainKind.BALL, True)
    if spec.kind == DomainKind.BALL:
        nodes[0] = 0.0
    return nodes, dirichlet


def _assemble_exterior(profile: DistanceProfile, t_min: float, r_max: float, ratio: float,
                       grading: Grading, elements: int) -> np.ndarray:
    branch = profile.branches[0]
    anchor = profile.spec.inner
    outer = r_max - anchor
    if outer <= anchor or t_min >= anchor:
        raise ParameterError(f"need t_min < R < R_max - R, got t_min={t_min}, R={anchor}, R_max={r_max}")
    if grading == Grading.UNIFORM:
        distances = np.linspace(t_min, outer, elements + 1)
    else:
        n_in = max(1, math.ceil(math.log(anchor / t_min) / math.log(ratio) - 1e-9))
        n_out = max(1, math.ceil(math.log(outer / anchor) / math.log(ratio) - 1e-9))
        distances = anchor * ratio ** np.arange(-n_in, n_out + 1, dtype=float)
    return branch.radius(distances)


def family_ratio(profile: DistanceProfile, options: MeshOptions, t_min: float, r_max: Optional[float]) -> float:
    """Common grading ratio of a cutoff family, fixed by its finest member"""
    spec = profile.spec
    if spec.is_exterior:
        span = math.log((r_max - spec.inner) / t_min)
        return _geometric_ratio(span, options.elements, options.ratio)
    branches = profile.branches
    span = math.log(branches[0].depth / t_min)
    return _geometric_ratio(span, max(1, options.elements // len(branches)), options.ratio)


def build_mesh(profile: DistanceProfile, options: MeshOptions, t_min: float,
               r_max: Optional[float] = None, ratio: Optional[float] = None) -> GradedMesh:
    """Mesh graded toward the singular ends, truncated at delta = t_min (and r = R_max)"""
    spec = profile.spec
    if spec.is_exterior and r_max is None:
        raise ParameterError("exterior meshes need an outer cutoff R_max")
    q = ratio or family_ratio(profile, options, t_min, r_max)
    grading = options.grading
    if spec.is_exterior:
        if grading == Grading.GEOMETRIC_TOWARD_BOUNDARY:
            grading = Grading.LOG_TOWARD_INFINITY
        nodes = _assemble_exterior(profile, t_min, r_max, q, grading, options.elements)
        dirichlet = (True, True)
    else:
        per_branch = max(1, options.elements // len(profile.branches))
        nodes, dirichlet = _assemble_bounded(profile, t_min, q, grading, per_branch)
    actual_t_min = float(np.min(profile.delta(nodes[dirichlet_nodes(nodes, dirichlet)])))
    mesh = GradedMesh(
        nodes=nodes, grading=grading, ratio=q, t_min=actual_t_min,
        r_max=float(nodes[-1]) if spec.is_exterior else None,
        dirichlet=dirichlet, kink_radii=tuple(profile.kink_radii),
        label=spec.label(),
    )
    logger.debug(f"built mesh {mesh.label}: {mesh.n_elements} elements, ratio {q:.4f}, t_min {actual_t_min:.3e}")
    return mesh


def dirichlet_nodes(nodes: np.ndarray, dirichlet: Tuple[bool, bool]) -> List[int]:
    picked = [i for i, flag in zip((0, nodes.size - 1), dirichlet) if flag]
    return picked or [nodes.size - 1]


def cutoff_pairs(profile: DistanceProfile, options: MeshOptions) -> List[Tuple[float, Optional[float]]]:
    """(t_min, R_max) pairs, coarse to fine"""
    if profile.spec.is_exterior:
        r_max = options.r_max_sequence(profile.spec.inner)
        return list(zip(options.t_min, r_max))
    return [(t, None) for t in options.t_min]


def cutoff_family(profile: DistanceProfile, options: MeshOptions) -> List[GradedMesh]:
    """Nested meshes over the cutoff sequence, sharing one grading ratio"""
    pairs = cutoff_pairs(profile, options)
    t_fine, r_fine = pairs[-1]
    q = family_ratio(profile, options, t_fine, r_fine)
    return [build_mesh(profile, options, t, r, ratio=q) for t, r in pairs]


def bisect(mesh: GradedMesh, profile: DistanceProfile) -> GradedMesh:
    """Split every element; graded meshes split at the geometric mean of delta"""
    left, right = mesh.nodes[:-1], mesh.nodes[1:]
    if mesh.grading == Grading.UNIFORM:
        mids = 0.5 * (left + right)
    else:
        mids = np.empty_like(left)
        for e, (a, b) in enumerate(zip(left, right)):
            branch = profile.branch_at(0.5 * (a + b))
            da, db = float(branch.distance(a)), float(branch.distance(b))
            if da <= 0.0 or db <= 0.0:
                mids[e] = 0.5 * (a + b)
            else:
                mids[e] = float(branch.radius(math.sqrt(da * db)))
    nodes = np.empty(mesh.nodes.size + mids.size)
    nodes[0::2] = mesh.nodes
    nodes[1::2] = mids
    return GradedMesh(
        nodes=nodes, grading=mesh.grading, ratio=math.sqrt(mesh.ratio), t_min=mesh.t_min,
        r_max=mesh.r_max, dirichlet=mesh.dirichlet, kink_radii=mesh.kink_radii,
        level=mesh.level + 1, label=mesh.label,
    )


def submesh(mesh: GradedMesh, first: int, last: int) -> GradedMesh:
    """Nodes first..last, Dirichlet at every cut end"""
    n = mesh.nodes.size
    dirichlet = (
        True if first > 0 else mesh.dirichlet[0],
        True if last < n - 1 else mesh.dirichlet[1],
    )
    nodes = mesh.nodes[first:last + 1]
    sub = GradedMesh(
        nodes=nodes, grading=mesh.grading, ratio=mesh.ratio, t_min=mesh.t_min, r_max=mesh.r_max,
        dirichlet=dirichlet, kink_radii=tuple(k for k in mesh.kink_radii if nodes[0] < k < nodes[-1]),
        level=mesh.level, label=mesh.label,
    )
    if sub.n_free < settings.MIN_COLLAR_NODES:
        raise CollarTooThinError(
            f"collar holds {sub.n_free} interior nodes, need {settings.MIN_COLLAR_NODES}",
            {"first": first, "last": last},
        )
    return sub


def collar_submesh(mesh: GradedMesh, profile: DistanceProfile, branch: Branch, width: float) -> GradedMesh:
    """Restriction to {delta < width} next to the boundary of ``branch``"""
    delta = branch.distance(mesh.nodes)
    on_branch = np.array([profile.branch_at(r) == branch or profile.is_kink(r) for r in mesh.nodes])
    inside = np.flatnonzero(on_branch & (delta >= 0))
    if branch.orientation > 0:
        edge = inside[np.flatnonzero(delta[inside] >= width)]
        last = int(edge[0]) if edge.size else int(inside[-1])
        first = int(inside[0])
    else:
        edge = inside[np.flatnonzero(delta[inside] >= width)]
        first = int(edge[-1]) if edge.size else int(inside[0])
        last = int(inside[-1])
    return submesh(mesh, first, last)


def tail_submesh(mesh: GradedMesh, profile: DistanceProfile, core: float) -> GradedMesh:
    """Restriction of an exterior mesh to {delta > core}"""
    delta = profile.delta(mesh.nodes)
    below = np.flatnonzero(delta <= core)
    first = int(below[-1]) if below.size else 0
    return submesh(mesh, first, mesh.nodes.size - 1)


def interpolate(fn: GridFn, mesh: GradedMesh) -> GridFn:
    """Nodal interpolation onto another mesh"""
    return GridFn(mesh, fn(mesh.nodes))


def dilate(fn: GridFn, scale: float) -> GridFn:
    """phi(r / scale) on the dilated mesh"""
    mesh = fn.mesh
    scaled = GradedMesh(
        nodes=mesh.nodes * scale, grading=mesh.grading, ratio=mesh.ratio, t_min=mesh.t_min * scale,
        r_max=None if mesh.r_max is None else mesh.r_max * scale, dirichlet=mesh.dirichlet,
        kink_radii=tuple(k * scale for k in mesh.kink_radii), level=mesh.level, label=mesh.label,
    )
    return GridFn(scaled, fn.values)
