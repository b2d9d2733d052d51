"""
Limit estimates for refinement and cutoff sequences
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hardygap.models.results import Extrapolation

logger = logging.getLogger(__name__)

SAFETY_FACTOR = 1.25
ORDER_BOUNDS = (0.5, 4.0)


def richardson(values: Sequence[float], ratio: float = 2.0, order: Optional[float] = None) -> Extrapolation:
    """Richardson extrapolation with a grid convergence index error estimate.

    Args:
        values: Values from coarse to fine mesh
        ratio: Refinement ratio between successive meshes
        order: Order of convergence (observed from the finest three if None)

    Returns:
        Extrapolation with the extrapolated limit, the GCI-style error and the order
    """
    values = [float(v) for v in values]
    if len(values) == 1:
        return Extrapolation(limit=values[0], error_estimate=0.0, model="single", raw=values)
    if len(values) == 2:
        f2, f1 = values
        p = order or 2.0
    else:
        f3, f2, f1 = values[-3:]
        if order is None:
            eps_32, eps_21 = f3 - f2, f2 - f1
            if abs(eps_21) < 1e-14 or eps_32 == 0.0 or eps_32 / eps_21 <= 0:
                p = 2.0
            else:
                p = float(np.log(abs(eps_32 / eps_21)) / np.log(ratio))
            p = max(ORDER_BOUNDS[0], min(p, ORDER_BOUNDS[1]))
        else:
            p = order
    factor = ratio ** p - 1.0
    limit = f1 + (f1 - f2) / factor
    error = SAFETY_FACTOR * abs(f2 - f1) / factor
    return Extrapolation(limit=limit, error_estimate=error, model="richardson", order=p, raw=values)


def _fit_inverse_log(logs: np.ndarray, values: np.ndarray, powers: Tuple[int, ...]) -> float:
    columns = [np.ones_like(logs)] + [logs ** (-k) for k in powers]
    design = np.column_stack(columns)
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    return float(coeffs[0])


def _predict_inverse_log(logs: np.ndarray, values: np.ndarray, powers: Tuple[int, ...], at: float) -> float:
    columns = [np.ones_like(logs)] + [logs ** (-k) for k in powers]
    coeffs, *_ = np.linalg.lstsq(np.column_stack(columns), values, rcond=None)
    return float(coeffs[0] + sum(c * at ** (-k) for c, k in zip(coeffs[1:], powers)))


def aitken(values: Sequence[float]) -> float:
    """Aitken delta-squared limit of the last three values"""
    x0, x1, x2 = (float(v) for v in values[-3:])
    d1, d2 = x1 - x0, x2 - x1
    denom = d2 - d1
    if denom == 0.0 or d1 == 0.0 or d2 / d1 <= 0.0 or abs(d2 / d1) >= 1.0:
        return x2
    return x2 - d2 * d2 / denom


def _aitken_predict(values: np.ndarray) -> float:
    x0, x1, x2 = values[-3:]
    d1, d2 = x1 - x0, x2 - x1
    rho = d2 / d1 if d1 != 0.0 else 0.0
    return float(x2 + rho * d2)


class _Model:
    def __init__(self, name: str, n_params: int, limit: Callable, predict: Callable):
        self.name = name
        self.n_params = n_params
        self.limit = limit
        self.predict = predict


def _models() -> List[_Model]:
    return [
        _Model(
            "inverse_log_square", 2,
            lambda L, v: _fit_inverse_log(L, v, (2,)),
            lambda L, v, at: _predict_inverse_log(L, v, (2,), at),
        ),
        _Model(
            "inverse_log_square_cubic", 3,
            lambda L, v: _fit_inverse_log(L, v, (2, 3)),
            lambda L, v, at: _predict_inverse_log(L, v, (2, 3), at),
        ),
        _Model(
            "aitken", 3,
            lambda L, v: aitken(v),
            lambda L, v, at: _aitken_predict(v),
        ),
    ]


def cutoff_extrapolation(values: Sequence[float], logs: Sequence[float],
                         nonnegative: bool = True) -> Extrapolation:
    """Limit of a cutoff sequence as the log-depth L grows.

    Candidate models are a + b/L^2, a + b/L^2 + c/L^3 and Aitken's
    geometric model. The model that best predicts the last value from the
    others is kept; its error estimate is the change of the limit when the
    last value is dropped.
    """
    v = np.asarray(values, dtype=float)
    L = np.asarray(logs, dtype=float)
    raw, abscissae = v.tolist(), L.tolist()
    if v.size == 1:
        return Extrapolation(limit=float(v[0]), error_estimate=0.0, model="single", raw=raw, abscissae=abscissae)

    scores: Dict[str, float] = {}
    chosen, chosen_score = None, np.inf
    for model in _models():
        if v.size < model.n_params:
            continue
        if v.size - 1 >= model.n_params:
            predicted = model.predict(L[:-1], v[:-1], L[-1])
            score = abs(predicted - v[-1])
        else:
            score = np.inf
        scores[model.name] = score
        if chosen is None or score < chosen_score:
            chosen, chosen_score = model, score

    limit = chosen.limit(L, v)
    if v.size - 1 >= chosen.n_params:
        error = abs(limit - chosen.limit(L[:-1], v[:-1]))
    else:
        error = abs(limit - float(v[-1]))
    if nonnegative and limit < 0.0:
        logger.debug(f"cutoff limit {limit:.3e} clipped at zero")
        error = max(error, -limit)
        limit = 0.0
    logger.debug(f"cutoff extrapolation: model {chosen.name}, limit {limit:.10g}, scores {scores}")
    return Extrapolation(limit=float(limit), error_estimate=float(error), model=chosen.name,
                         raw=raw, abscissae=abscissae)
