"""
Result models returned by the radial calculus and solver services
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from hardygap.models.params import Location, Sign


class SignCheckReport(BaseModel):
    """Sampled residual sign of a sub/supersolution candidate"""
    location: Location = Field(..., description="Singular end the candidate is built for")
    sign: Optional[Sign] = Field(default=None, description="Combination sign, None for a single power")
    nu: float = Field(..., description="Leading exponent")
    beta: Optional[float] = Field(default=None, description="Correction exponent")
    lam: float = Field(..., description="lambda used in the residual")
    window: Tuple[float, float] = Field(..., description="Radius window sampled")
    samples: int = Field(..., description="Number of sample radii")
    expected: str = Field(..., description="'nonpositive' (subsolution) or 'nonnegative' (supersolution)")
    min_residual: float
    max_residual: float
    holds: bool = Field(..., description="Sign matches on every sample")
    threshold_radius: Optional[float] = Field(
        default=None,
        description="Window endpoint nearest the regular side up to which the sign holds from the singular end",
    )
    hypotheses_enforced: bool = True


class AgmonQuotient(BaseModel):
    """Energies of delta^(eps/p) and their ratio"""
    epsilon: float
    numerator: float
    denominator: float
    quotient: float
    expected: float = Field(..., description="(eps/p)^p")
    truncated: bool = Field(default=False, description="Integrals taken over delta > t_min")
    t_min: Optional[float] = None


class IntegrabilityVerdict(BaseModel):
    """Convergent(value) or Divergent"""
    convergent: bool
    value: Optional[float] = Field(default=None, description="Integral over the probed region when convergent")
    exponent: Optional[float] = Field(default=None, description="Power a when probing delta^(-a)")
    shell_decay: List[float] = Field(default_factory=list, description="Decay exponents of the deepest shells")

    @property
    def label(self) -> str:
        return "Convergent" if self.convergent else "Divergent"


class DecayFit(BaseModel):
    """Least-squares power law fit"""
    slope: float
    r_squared: float
    intercept: float
    location: Location
    window: Tuple[float, float]
    points: int


class Extrapolation(BaseModel):
    """Limit estimate from a sequence of computed values"""
    limit: float
    error_estimate: float
    model: str = Field(..., description="Fitted model name")
    order: Optional[float] = Field(default=None, description="Observed convergence order where applicable")
    raw: List[float] = Field(default_factory=list, description="Sequence the fit was made from")
    abscissae: List[float] = Field(default_factory=list, description="Cutoffs or mesh sizes of the raw sequence")


class CheckResult(BaseModel):
    """One verification check"""
    suite: str
    name: str
    passed: bool
    basis: str = Field(..., description="Result the check exercises")
    detail: dict = Field(default_factory=dict)
