"""
Graded one-dimensional meshes and piecewise-linear functions on them
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class Grading(str, Enum):
    """Element size law"""
    GEOMETRIC_TOWARD_BOUNDARY = "geometric"
    LOG_TOWARD_INFINITY = "log"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class GradedMesh:
    """Strictly increasing radii r_0 < ... < r_M

    Truncation nodes carry homogeneous Dirichlet conditions; a free end
    (the centre of a ball) carries none. Kink radii of the distance
    function are always nodes.
    """
    nodes: np.ndarray
    grading: Grading
    ratio: float
    t_min: float
    r_max: Optional[float] = None
    dirichlet: Tuple[bool, bool] = (True, True)
    kink_radii: Tuple[float, ...] = ()
    level: int = 0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def free_mask(self) -> np.ndarray:
        mask = np.ones(self.nodes.size, dtype=bool)
        mask[0] = not self.dirichlet[0]
        mask[-1] = not self.dirichlet[1]
        return mask

    @property
    def n_free(self) -> int:
        return int(self.free_mask.sum())

    def summary(self) -> dict:
        return {
            "elements": self.n_elements,
            "grading": self.grading.value,
            "ratio": self.ratio,
            "t_min": self.t_min,
            "r_max": self.r_max,
            "r_first": float(self.nodes[0]),
            "r_last": float(self.nodes[-1]),
            "h_min": float(self.sizes.min()),
            "h_max": float(self.sizes.max()),
            "level": self.level,
        }


@dataclass(frozen=True)
class GridFn:
    """Piecewise-linear function given by nodal values; zero at Dirichlet nodes"""
    mesh: GradedMesh
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.mesh.nodes.shape:
            raise ValueError("values must match the mesh nodes")
        if self.mesh.dirichlet[0]:
            values[0] = 0.0
        if self.mesh.dirichlet[1]:
            values[-1] = 0.0
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_free(cls, mesh: GradedMesh, free_values: np.ndarray) -> "GridFn":
        values = np.zeros(mesh.nodes.size)
        values[mesh.free_mask] = free_values
        return cls(mesh, values)

    @property
    def free_values(self) -> np.ndarray:
        return self.values[self.mesh.free_mask]

    def __call__(self, r) -> np.ndarray:
        return np.interp(r, self.mesh.nodes, self.values, left=0.0, right=0.0)

    def scaled(self, factor: float) -> "GridFn":
        return GridFn(self.mesh, self.values * factor)

    def is_zero(self) -> bool:
        return not np.any(self.values)
