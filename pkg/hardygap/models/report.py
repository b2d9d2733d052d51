"""
Gap verdicts and report documents
"""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from hardygap.models.params import DomainSpec, Params, RegimeClass


class SourceTag(str, Enum):
    """Provenance of a reported number"""
    FORMULA = "formula"
    COMPUTED = "computed"
    EXTRAPOLATED = "extrapolated"


class TaggedValue(BaseModel):
    """A number with its provenance and error estimate"""
    value: float
    source: SourceTag
    error: float = Field(default=0.0, ge=0, description="Absolute error estimate, zero for formulas")
    basis: Optional[str] = Field(default=None, description="Result or formula the value comes from")

    class Config:
        frozen = True


class HKind(str, Enum):
    EXACT_ZERO = "ExactZero"
    EXACT_VALUE = "ExactValue"
    NUMERIC_BOUND = "NumericBound"
    POSITIVE_UNKNOWN = "PositiveUnknown"


class HValue(BaseModel):
    """Hardy constant verdict"""
    kind: HKind
    value: Optional[TaggedValue] = None

    class Config:
        frozen = True

    @property
    def number(self) -> Optional[float]:
        if self.kind == HKind.EXACT_ZERO:
            return 0.0
        return None if self.value is None else self.value.value


class GapVerdict(str, Enum):
    POSITIVE = "Positive"
    ZERO = "Zero"
    UNKNOWN = "Unknown"


class MinimizerVerdict(str, Enum):
    YES = "Yes"
    NO = "No"
    IFF_GAP_POSITIVE = "IffGapPositive"


class CriticalityKind(str, Enum):
    POSITIVE_CRITICAL = "PositiveCritical"
    NULL_CRITICAL = "NullCritical"
    SUBCRITICAL = "Subcritical"
    NOT_DETERMINED = "NotDetermined"


class Criticality(BaseModel):
    kind: CriticalityKind
    weight: Optional[str] = Field(default=None, description="Weight the criticality refers to")
    ground_state: Optional[str] = None

    class Config:
        frozen = True


class TableCell(BaseModel):
    """Generic entries of the gap table for one (domain class, regime) pair"""
    domain_class: str = Field(..., description="'bounded' or 'exterior'")
    regime: RegimeClass
    h: str = Field(..., description="'0', '>0' or 'c_N'")
    lambda_inf: str = Field(..., description="'0', 'c_1', 'c' or 'c_N'")
    gap: str = Field(..., description="'>0', '=0', '>=0' or 'both'")
    minimizer: MinimizerVerdict

    class Config:
        frozen = True


class GapReport(BaseModel):
    """Full verdict for one (Params, DomainSpec)"""
    params: Params
    domain: DomainSpec
    regime: RegimeClass
    hardy_inequality_holds: bool
    h: HValue
    lambda_inf: TaggedValue
    gap: GapVerdict
    gap_estimate: Optional[float] = Field(default=None, description="lambda_inf - H when H is numeric")
    minimizer_exists: MinimizerVerdict
    criticality: Criticality
    nu_boundary: Optional[TaggedValue] = None
    nu_infinity: Optional[TaggedValue] = None
    citations: Dict[str, str] = Field(default_factory=dict, description="Result backing each field")
    notes: List[str] = Field(default_factory=list)

    class Config:
        frozen = True


class ReportDocument(BaseModel):
    """Machine-readable command output"""
    schema_version: str
    version: str
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    results: Dict[str, Any] = Field(default_factory=dict)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    caveats: List[str] = Field(default_factory=list)
    artifacts: List[str] = Field(default_factory=list, description="Plot files written next to the report")
    generated_at: Optional[str] = Field(default=None, description="Timestamp, excluded from determinism checks")
