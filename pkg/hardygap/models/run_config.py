"""
Run configuration models
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from hardygap.core.config import settings
from hardygap.models.mesh import Grading
from hardygap.models.params import DomainSpec, Location, Params, Sign


class MeshOptions(BaseModel):
    """Mesh family settings"""
    elements: int = Field(default_factory=lambda: settings.DEFAULT_ELEMENTS, ge=8,
                          description="Element count of the finest mesh in the cutoff family")
    grading: Grading = Field(default=Grading.GEOMETRIC_TOWARD_BOUNDARY, description="Element size law")
    ratio: float = Field(default_factory=lambda: settings.GRADING_RATIO, gt=1.0,
                         description="Largest ratio of neighbouring element sizes")
    t_min: List[float] = Field(default_factory=lambda: list(settings.T_MIN_SEQUENCE),
                               description="Inner cutoff distances, coarse to fine")
    r_max: Optional[List[float]] = Field(default=None,
                                         description="Outer cutoff radii for exterior domains, coarse to fine")

    class Config:
        extra = "forbid"

    @field_validator("t_min")
    @classmethod
    def _positive_decreasing(cls, values: List[float]) -> List[float]:
        if not values:
            raise ValueError("t_min sequence must not be empty")
        if any(v <= 0 for v in values):
            raise ValueError("t_min values must be positive")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ValueError("t_min sequence must decrease")
        return values

    @field_validator("r_max")
    @classmethod
    def _increasing(cls, values: Optional[List[float]]) -> Optional[List[float]]:
        if values is not None and any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("r_max sequence must increase")
        return values

    def r_max_sequence(self, inner_radius: float) -> List[float]:
        if self.r_max is not None:
            return list(self.r_max)
        return [inner_radius * factor for factor in settings.R_MAX_FACTORS]


class SolverOptions(BaseModel):
    """Quotient minimization settings"""
    tol: float = Field(default_factory=lambda: settings.SOLVER_TOL, gt=0, description="Relative decrement tolerance")
    max_iter: int = Field(default_factory=lambda: settings.MAX_ITER, ge=1, description="Iteration cap for p != 2")
    eigen_tol: float = Field(default_factory=lambda: settings.EIGEN_TOL, ge=0, description="Eigensolver tolerance for p = 2")
    n_eigs: int = Field(default=1, ge=1, description="Number of discrete eigenvalues reported for p = 2")
    newton_max_steps: int = Field(default_factory=lambda: settings.NEWTON_MAX_STEPS, ge=1)

    class Config:
        extra = "forbid"


class HardyProblem(BaseModel):
    """Everything one quotient study needs"""
    params: Params
    domain: DomainSpec
    mesh: MeshOptions = Field(default_factory=MeshOptions)
    solver: SolverOptions = Field(default_factory=SolverOptions)


class IndicialOptions(BaseModel):
    mu: List[float] = Field(default_factory=list, description="Target values; empty means a uniform sample of [0, c]")
    samples: int = Field(default=11, ge=2, description="Sample count when mu is empty")
    locations: List[Location] = Field(default_factory=lambda: [Location.BOUNDARY, Location.INFINITY])

    class Config:
        extra = "forbid"


class HardyOptions(BaseModel):
    levels: int = Field(default=3, ge=2, description="Bisection levels of the refinement study")
    decay_window: Optional[Tuple[float, float]] = Field(
        default=None, description="Distance window (boundary) used for the decay fit")

    class Config:
        extra = "forbid"


class GapOptions(BaseModel):
    collar_widths: List[float] = Field(default_factory=lambda: [0.4, 0.2, 0.1, 0.05])
    tail_radii: List[float] = Field(default_factory=lambda: [2.0, 5.0, 10.0],
                                    description="Core distances K of exterior tails {delta > K}")
    h_input: Optional[float] = Field(default=None, description="Externally computed H; skips the quotient study")
    h_error: float = Field(default=0.0, ge=0)

    class Config:
        extra = "forbid"


class SignCase(BaseModel):
    """A sub/supersolution case for the sign suite"""
    name: str
    domain: DomainSpec
    alpha: float
    p: float = Field(..., gt=1.0)
    dim: int = Field(default=2, ge=2)
    location: Location
    nu: float
    beta: float
    sign: Sign
    window: Optional[Tuple[float, float]] = None
    enforce_hypotheses: bool = True
    expect_holds: bool = True

    class Config:
        extra = "forbid"

    @property
    def params(self) -> Params:
        return Params(alpha=self.alpha, p=self.p, dim=self.dim)


class VerifyOptions(BaseModel):
    suites: List[str] = Field(default_factory=lambda: ["all"])
    samples: int = Field(default=100_000, ge=1, description="Random tuples in the cross-term suite")
    seed: int = 0
    sign_cases: List[SignCase] = Field(default_factory=list, description="Extra cases for the sign suite")

    class Config:
        extra = "forbid"


class SweepOptions(BaseModel):
    alpha: List[float] = Field(default_factory=list)
    p: List[float] = Field(default_factory=list)
    compute: bool = Field(default=True, description="Run quotient studies for cells without an exact H")

    class Config:
        extra = "forbid"

    @field_validator("p")
    @classmethod
    def _p_above_one(cls, values: List[float]) -> List[float]:
        if any(not v > 1.0 for v in values):
            raise ValueError("sweep p values must exceed 1")
        return values


class RunConfig(BaseModel):
    """On-disk run configuration"""
    schema_version: str = Field(default_factory=lambda: settings.SCHEMA_VERSION)
    domain: DomainSpec
    alpha: float
    p: float = Field(..., gt=1.0, description="Integrability exponent")
    dim: int = Field(default=2, ge=2, description="Spatial dimension N")
    mesh: MeshOptions = Field(default_factory=MeshOptions)
    solver: SolverOptions = Field(default_factory=SolverOptions)
    indicial: IndicialOptions = Field(default_factory=IndicialOptions)
    hardy: HardyOptions = Field(default_factory=HardyOptions)
    gap: GapOptions = Field(default_factory=GapOptions)
    verify: VerifyOptions = Field(default_factory=VerifyOptions)
    sweep: SweepOptions = Field(default_factory=SweepOptions)

    class Config:
        extra = "forbid"

    @property
    def params(self) -> Params:
        return Params(alpha=self.alpha, p=self.p, dim=self.dim)

    def problem(self, params: Optional[Params] = None) -> HardyProblem:
        return HardyProblem(params=params or self.params, domain=self.domain, mesh=self.mesh, solver=self.solver)
