"""
Gap table decision procedure: constants, gap, existence, criticality and decay
"""
import logging
from typing import List, Optional, Tuple

from hardygap.core.config import settings
from hardygap.core.exceptions import InconsistentInputError, ParameterError
from hardygap.models.params import DomainKind, DomainSpec, IndicialProblem, Location, Params, RegimeClass
from hardygap.models.report import (
    Criticality,
    CriticalityKind,
    GapReport,
    GapVerdict,
    HKind,
    HValue,
    MinimizerVerdict,
    SourceTag,
    TableCell,
    TaggedValue,
)
from hardygap.services.constants import c_const, c_min, classify_regime, half_space_constant
from hardygap.services.indicial import indicial_root

logger = logging.getLogger(__name__)

BASIS_VANISHING = "H = 0 on bounded domains when alpha+p <= 1 (quotient of delta^(eps/p) equals (eps/p)^p)"
BASIS_LAMBDA_BOUNDED = "constant at infinity of a bounded domain equals the half-space constant c_{alpha,p,1}"
BASIS_LAMBDA_EXTERIOR = "constant at infinity of an exterior domain equals min(c_{alpha,p,1}, c_{alpha,p,N})"
BASIS_EXISTENCE = "a minimizer exists if and only if the spectral gap is positive"
BASIS_SUPN = "exterior domains with alpha+p > N have H = c_{alpha,p,N} and no minimizer"
BASIS_EXTERIOR_ZERO = "exterior domains with alpha+p in {1, N} have H = lambda_inf = 0"
BASIS_GROUND_STATE = "alpha+p < 1: positive-critical with ground state 1 and weight delta^-(alpha+p)"
BASIS_NULL = "alpha+p = 1: null-critical with respect to the weight delta^-1"
BASIS_CONVEX = "mean-convex domains with alpha+p >= 1 have no spectral gap, H = c_{alpha,p,1}"
BASIS_MEAN_CONCAVE = "exterior domains with mean-concave boundary and alpha+p <= N have no spectral gap"
BASIS_HALF_LINE = "half-line: scale invariance gives H = c_{alpha,p,1}, not attained"
BASIS_DECAY_BOUNDARY = "minimizers behave like delta^nu near the boundary, nu the boundary indicial root at mu = H"
BASIS_DECAY_INFINITY = "minimizers behave like |x|^nu_tilde near infinity, nu_tilde the indicial root at infinity"
BASIS_HARDY_HOLDS = "H > 0 iff alpha+p > 1 (bounded) or alpha+p not in {1, N} (exterior)"

OPEN_C1 = "open problem: the gap phenomenon on domains that are only C^1"
OPEN_EXTERIOR_GAP = ("open problem: positive gap on exterior domains with 1 < alpha+p < N is known only "
                     "for non-radial examples with N >= 7")
OPEN_EXTERIOR_CRITICALITY = "open problem: criticality at alpha+p in {1, N} on exterior domains"


def hardy_inequality_holds(params: Params, spec: DomainSpec) -> bool:
    """Whether H > 0"""
    regime = classify_regime(params).boundary_class
    if spec.is_exterior:
        return regime not in (RegimeClass.EQ1, RegimeClass.EQN)
    if spec.is_half_line:
        return regime != RegimeClass.EQ1
    return regime not in (RegimeClass.SUB1, RegimeClass.EQ1)


def lambda_infinity(params: Params, spec: DomainSpec) -> TaggedValue:
    """Hardy constant at infinity in closed form"""
    if spec.is_exterior:
        return TaggedValue(value=c_min(params), source=SourceTag.FORMULA, basis=BASIS_LAMBDA_EXTERIOR)
    return TaggedValue(value=c_const(params, 1), source=SourceTag.FORMULA, basis=BASIS_LAMBDA_BOUNDED)


def table_cell(params: Params, spec: DomainSpec) -> TableCell:
    """Generic gap-table entries for the domain class and regime of the inputs"""
    regime = classify_regime(params).boundary_class
    if spec.is_exterior:
        cells = {
            RegimeClass.SUB1: (">0", "c_1", ">=0", MinimizerVerdict.IFF_GAP_POSITIVE),
            RegimeClass.EQ1: ("0", "0", "=0", MinimizerVerdict.NO),
            RegimeClass.BETWEEN: (">0", "c", "both", MinimizerVerdict.IFF_GAP_POSITIVE),
            RegimeClass.EQN: ("0", "0", "=0", MinimizerVerdict.NO),
            RegimeClass.SUPN: ("c_N", "c_N", "=0", MinimizerVerdict.NO),
        }
        domain_class = "exterior"
    elif spec.is_bounded:
        above = (">0", "c_1", "both", MinimizerVerdict.IFF_GAP_POSITIVE)
        cells = {
            RegimeClass.SUB1: ("0", "c_1", ">0", MinimizerVerdict.YES),
            RegimeClass.EQ1: ("0", "0", "=0", MinimizerVerdict.NO),
            RegimeClass.BETWEEN: above,
            RegimeClass.EQN: above,
            RegimeClass.SUPN: above,
        }
        domain_class = "bounded"
    else:
        raise ParameterError("the half-line model has no gap-table cell")
    h, lam, gap, minimizer = cells[regime]
    return TableCell(domain_class=domain_class, regime=regime, h=h,
                     lambda_inf=lam, gap=gap, minimizer=minimizer)


def convexity_shortcut(params: Params, spec: DomainSpec) -> Optional[float]:
    """Exact H when boundary convexity rules out a gap, else None"""
    tol = settings.EQ_TOLERANCE
    if spec.kind == DomainKind.BALL and params.alpha_plus_p >= 1.0 - tol:
        return c_const(params, 1)
    if spec.is_exterior and params.alpha_plus_p <= params.dim + tol:
        return c_min(params)
    return None


def predict_decay(params: Params, spec: DomainSpec, h: float) -> Tuple[float, Optional[float]]:
    """Boundary exponent nu and, for exterior domains, the exponent at infinity"""
    if h < 0.0:
        raise ParameterError(f"H must be nonnegative, got {h!r}")
    nu = indicial_root(IndicialProblem(params=params, location=Location.BOUNDARY, mu=h))
    nu_tilde = None
    if spec.is_exterior:
        nu_tilde = indicial_root(IndicialProblem(params=params, location=Location.INFINITY, mu=h))
    return nu, nu_tilde


def _exact(value: float, basis: str) -> HValue:
    if value == 0.0:
        return HValue(kind=HKind.EXACT_ZERO, value=TaggedValue(value=0.0, source=SourceTag.FORMULA, basis=basis))
    return HValue(kind=HKind.EXACT_VALUE, value=TaggedValue(value=value, source=SourceTag.FORMULA, basis=basis))


def _positive_critical(ground_state: str) -> Criticality:
    return Criticality(kind=CriticalityKind.POSITIVE_CRITICAL, weight="delta^-(alpha+p)", ground_state=ground_state)


class _Verdict:
    """Mutable scratch state while a report is assembled"""

    def __init__(self, lam: TaggedValue):
        self.lam = lam
        self.h: HValue = HValue(kind=HKind.POSITIVE_UNKNOWN)
        self.gap = GapVerdict.UNKNOWN
        self.gap_estimate: Optional[float] = None
        self.minimizer = MinimizerVerdict.IFF_GAP_POSITIVE
        self.criticality = Criticality(kind=CriticalityKind.NOT_DETERMINED)
        self.citations = {"lambda_inf": lam.basis}
        self.notes: List[str] = []

    def no_gap(self, h: HValue, basis: str):
        self.h = h
        self.gap = GapVerdict.ZERO
        self.minimizer = MinimizerVerdict.NO
        self.citations.update(h=basis, gap=basis, minimizer_exists=BASIS_EXISTENCE)


def _decide_numeric(verdict: _Verdict, h: float, h_error: float, exact: bool, source: SourceTag):
    lam = verdict.lam.value
    tol = settings.EQ_TOLERANCE * max(1.0, lam)
    margin = settings.GAP_MARGIN_FACTOR * max(h_error, verdict.lam.error)
    if h < -tol:
        raise ParameterError(f"H must be nonnegative, got {h!r}")
    if h > lam + margin + tol:
        logger.error(f"H input {h!r} exceeds lambda_inf {lam!r} beyond the margin {margin!r}")
        raise InconsistentInputError(
            f"H={h!r} exceeds lambda_inf={lam!r} by more than the margin {margin!r}",
            {"h_input": h, "lambda_inf": lam, "margin": margin},
        )
    kind = HKind.EXACT_VALUE if exact else HKind.NUMERIC_BOUND
    if exact and abs(h) <= tol:
        kind = HKind.EXACT_ZERO
    verdict.h = HValue(kind=kind, value=TaggedValue(value=max(h, 0.0), source=source, error=h_error))
    verdict.gap_estimate = lam - h
    verdict.citations["gap"] = f"gap declared positive when lambda_inf - H > {settings.GAP_MARGIN_FACTOR:g} x error"
    if exact and abs(lam - h) <= tol:
        verdict.gap = GapVerdict.ZERO
        verdict.minimizer = MinimizerVerdict.NO
    elif lam - h > margin and lam - h > tol:
        verdict.gap = GapVerdict.POSITIVE
        verdict.minimizer = MinimizerVerdict.YES
        verdict.criticality = _positive_critical("minimizer")
    else:
        verdict.gap = GapVerdict.UNKNOWN
    verdict.citations["minimizer_exists"] = BASIS_EXISTENCE


def classify(params: Params, spec: DomainSpec, h_input: Optional[float] = None, h_error: float = 0.0,
             exact: bool = False, use_shortcuts: bool = True,
             h_source: SourceTag = SourceTag.COMPUTED) -> GapReport:
    """Gap-table verdict for (params, spec), refined by convexity and a numeric H when given"""
    regime = classify_regime(params).boundary_class
    lam = lambda_infinity(params, spec)
    verdict = _Verdict(lam)
    shortcut = convexity_shortcut(params, spec) if use_shortcuts else None

    if spec.is_half_line:
        c1 = half_space_constant(params)
        verdict.no_gap(_exact(c1, BASIS_HALF_LINE), BASIS_HALF_LINE)
        if regime == RegimeClass.EQ1:
            verdict.criticality = Criticality(kind=CriticalityKind.NULL_CRITICAL, weight="delta^-1", ground_state="1")
        else:
            verdict.criticality = Criticality(kind=CriticalityKind.NULL_CRITICAL, weight="delta^-(alpha+p)",
                                              ground_state="delta^((alpha+p-1)/p)")
        verdict.citations["criticality"] = BASIS_HALF_LINE
    elif not spec.is_exterior:
        verdict.notes.append(OPEN_C1)
        if regime == RegimeClass.SUB1:
            verdict.h = _exact(0.0, BASIS_VANISHING)
            verdict.gap = GapVerdict.POSITIVE
            verdict.minimizer = MinimizerVerdict.YES
            verdict.criticality = _positive_critical("1")
            verdict.citations.update(h=BASIS_VANISHING, gap=BASIS_VANISHING, minimizer_exists=BASIS_EXISTENCE,
                                     criticality=BASIS_GROUND_STATE)
        elif regime == RegimeClass.EQ1:
            verdict.no_gap(_exact(0.0, BASIS_VANISHING), BASIS_VANISHING)
            verdict.criticality = Criticality(kind=CriticalityKind.NULL_CRITICAL, weight="delta^-1", ground_state="1")
            verdict.citations["criticality"] = BASIS_NULL
        elif shortcut is not None:
            verdict.no_gap(_exact(shortcut, BASIS_CONVEX), BASIS_CONVEX)
        elif h_input is not None:
            _decide_numeric(verdict, h_input, h_error, exact, h_source)
    else:
        if regime in (RegimeClass.EQ1, RegimeClass.EQN):
            verdict.no_gap(_exact(0.0, BASIS_EXTERIOR_ZERO), BASIS_EXTERIOR_ZERO)
            verdict.notes.append(OPEN_EXTERIOR_CRITICALITY)
        elif regime == RegimeClass.SUPN:
            verdict.no_gap(_exact(c_const(params, params.dim), BASIS_SUPN), BASIS_SUPN)
        else:
            if regime == RegimeClass.BETWEEN:
                verdict.notes.append(OPEN_EXTERIOR_GAP)
            if shortcut is not None:
                verdict.no_gap(_exact(shortcut, BASIS_MEAN_CONCAVE), BASIS_MEAN_CONCAVE)
            elif h_input is not None:
                _decide_numeric(verdict, h_input, h_error, exact, h_source)

    # A numeric H next to an exact one is only checked for consistency.
    if h_input is not None and verdict.h.kind in (HKind.EXACT_ZERO, HKind.EXACT_VALUE) \
            and verdict.h.value is not None and verdict.h.value.source == SourceTag.FORMULA:
        margin = settings.GAP_MARGIN_FACTOR * h_error + settings.EQ_TOLERANCE * max(1.0, lam.value)
        if h_input > lam.value + margin:
            raise InconsistentInputError(
                f"H={h_input!r} exceeds lambda_inf={lam.value!r} by more than the margin {margin!r}",
                {"h_input": h_input, "lambda_inf": lam.value},
            )
        verdict.notes.append(f"numeric H {h_input:.15g} reported alongside the exact value")

    nu_boundary = nu_infinity = None
    h_number = verdict.h.number
    if h_number is not None:
        source = verdict.h.value.source if verdict.h.value is not None else SourceTag.FORMULA
        try:
            nu, nu_tilde = predict_decay(params, spec, h_number)
        except ParameterError as exc:
            verdict.notes.append(f"decay exponents unavailable: {exc.message}")
        else:
            nu_boundary = TaggedValue(value=nu, source=source, basis=BASIS_DECAY_BOUNDARY)
            if nu_tilde is not None:
                nu_infinity = TaggedValue(value=nu_tilde, source=source, basis=BASIS_DECAY_INFINITY)

    holds = hardy_inequality_holds(params, spec)
    verdict.citations["hardy_inequality_holds"] = BASIS_HARDY_HOLDS
    report = GapReport(
        params=params, domain=spec, regime=regime, hardy_inequality_holds=holds,
        h=verdict.h, lambda_inf=lam, gap=verdict.gap, gap_estimate=verdict.gap_estimate,
        minimizer_exists=verdict.minimizer, criticality=verdict.criticality,
        nu_boundary=nu_boundary, nu_infinity=nu_infinity,
        citations=verdict.citations, notes=verdict.notes,
    )
    logger.debug(f"classified {spec.label()} alpha={params.alpha} p={params.p}: H={verdict.h.kind.value}, "
                 f"gap={verdict.gap.value}")
    return report
