"""
Parameter, domain and regime models
"""
import math
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class Params(BaseModel):
    """The triple (alpha, p, N) governing every formula"""
    alpha: float = Field(..., description="Weight exponent alpha")
    p: float = Field(..., gt=1.0, description="Integrability exponent p in (1, inf)")
    dim: int = Field(default=2, ge=2, description="Spatial dimension N")

    class Config:
        frozen = True

    @field_validator("alpha", "p")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @property
    def alpha_plus_p(self) -> float:
        return self.alpha + self.p


class DomainKind(str, Enum):
    """Radial model domains"""
    INTERVAL = "interval"
    BALL = "ball"
    ANNULUS = "annulus"
    EXTERIOR_BALL = "exterior_ball"


class IntervalMode(str, Enum):
    """Distance convention on the one-dimensional model (0, b)"""
    HALF_LINE = "half_line"
    TWO_SIDED = "two_sided"


class DomainSpec(BaseModel):
    """Radial model domain descriptor

    Interval(0, b) uses ``outer=b``; Ball(R) uses ``outer=R``; Annulus(r0, r1)
    uses ``inner=r0, outer=r1``; ExteriorBall(R) uses ``inner=R``.
    """
    kind: DomainKind = Field(..., description="Domain kind")
    inner: Optional[float] = Field(default=None, description="Inner radius (annulus, exterior ball)")
    outer: Optional[float] = Field(default=None, description="Outer radius (interval, ball, annulus)")
    interval_mode: IntervalMode = Field(default=IntervalMode.HALF_LINE, description="Interval distance convention")

    class Config:
        frozen = True
        extra = "forbid"

    @model_validator(mode="after")
    def _check_radii(self) -> "DomainSpec":
        needs_inner = self.kind in (DomainKind.ANNULUS, DomainKind.EXTERIOR_BALL)
        needs_outer = self.kind != DomainKind.EXTERIOR_BALL
        if needs_inner and self.inner is None:
            raise ValueError(f"{self.kind.value} requires an inner radius")
        if needs_outer and self.outer is None:
            raise ValueError(f"{self.kind.value} requires an outer radius")
        if not needs_inner and self.inner is not None:
            raise ValueError(f"{self.kind.value} takes no inner radius")
        if not needs_outer and self.outer is not None:
            raise ValueError(f"{self.kind.value} takes no outer radius")
        for radius in (self.inner, self.outer):
            if radius is not None and not (math.isfinite(radius) and radius > 0):
                raise ValueError("radii must be finite and strictly positive")
        if self.kind == DomainKind.ANNULUS and not self.inner < self.outer:
            raise ValueError("annulus requires r0 < r1")
        return self

    @classmethod
    def interval(cls, b: float, mode: IntervalMode = IntervalMode.HALF_LINE) -> "DomainSpec":
        return cls(kind=DomainKind.INTERVAL, outer=b, interval_mode=mode)

    @classmethod
    def ball(cls, radius: float) -> "DomainSpec":
        return cls(kind=DomainKind.BALL, outer=radius)

    @classmethod
    def annulus(cls, r0: float, r1: float) -> "DomainSpec":
        return cls(kind=DomainKind.ANNULUS, inner=r0, outer=r1)

    @classmethod
    def exterior_ball(cls, radius: float) -> "DomainSpec":
        return cls(kind=DomainKind.EXTERIOR_BALL, inner=radius)

    @property
    def is_bounded(self) -> bool:
        """Ball, annulus and the two-sided interval"""
        if self.kind == DomainKind.INTERVAL:
            return self.interval_mode == IntervalMode.TWO_SIDED
        return self.kind in (DomainKind.BALL, DomainKind.ANNULUS)

    @property
    def is_exterior(self) -> bool:
        return self.kind == DomainKind.EXTERIOR_BALL

    @property
    def is_half_line(self) -> bool:
        return self.kind == DomainKind.INTERVAL and self.interval_mode == IntervalMode.HALF_LINE

    @property
    def uses_radial_weight(self) -> bool:
        """Whether measures carry r^(N-1)"""
        return self.kind != DomainKind.INTERVAL

    def ends(self) -> List[str]:
        """Singular ends where test functions may concentrate"""
        if self.kind == DomainKind.INTERVAL:
            return ["lower"] if self.is_half_line else ["lower", "upper"]
        if self.kind == DomainKind.BALL:
            return ["outer"]
        if self.kind == DomainKind.ANNULUS:
            return ["inner", "outer"]
        return ["inner", "infinity"]

    def measure_weight(self, r: float, dim: int) -> float:
        return r ** (dim - 1) if self.uses_radial_weight else 1.0

    def label(self) -> str:
        if self.kind == DomainKind.INTERVAL:
            return f"Interval(0,{self.outer:g};{self.interval_mode.value})"
        if self.kind == DomainKind.BALL:
            return f"Ball({self.outer:g})"
        if self.kind == DomainKind.ANNULUS:
            return f"Annulus({self.inner:g},{self.outer:g})"
        return f"ExteriorBall({self.inner:g})"

    def dilated(self, scale: float) -> "DomainSpec":
        """Same domain under r -> scale * r"""
        return self.model_copy(update={
            "inner": None if self.inner is None else self.inner * scale,
            "outer": None if self.outer is None else self.outer * scale,
        })


class RegimeClass(str, Enum):
    """Position of alpha + p relative to 1 and N"""
    SUB1 = "Sub1"
    EQ1 = "Eq1"
    BETWEEN = "Between"
    EQN = "EqN"
    SUPN = "SupN"


class Regime(BaseModel):
    """Regime of a parameter triple"""
    boundary_class: RegimeClass = Field(..., description="Case of alpha + p")
    eq_tolerance: float = Field(..., description="Threshold for detecting alpha + p in {1, N}")

    class Config:
        frozen = True


class Location(str, Enum):
    """Singular end of a radial problem"""
    BOUNDARY = "boundary"
    INFINITY = "infinity"


class Sign(str, Enum):
    """Candidate U = first power plus or minus second power"""
    PLUS = "plus"
    MINUS = "minus"


class MonotoneDirection(str, Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"


class RootInterval(BaseModel):
    """Interval on which the indicial function is monotone and covers [0, c]"""
    lo: float
    hi: float
    monotone_direction: MonotoneDirection

    class Config:
        frozen = True

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= value <= self.hi + slack


class IndicialProblem(BaseModel):
    """Target value mu for the indicial equation at one end"""
    params: Params
    location: Location
    mu: float = Field(..., description="Target value in [0, c]")

    class Config:
        frozen = True
