"""
Batch classification over (alpha, p) grids
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from hardygap.core.config import settings
from hardygap.core.exceptions import HardyError
from hardygap.models.params import Params
from hardygap.models.report import HKind, SourceTag
from hardygap.models.run_config import RunConfig
from hardygap.services.constants import classify_regime
from hardygap.services.gap_classifier import classify
from hardygap.services.hardy_service import hardy_service
from hardygap.services.plot_service import plot_service
from hardygap.services.report_service import report_service

logger = logging.getLogger(__name__)


class SweepService:
    """Runs one gap classification per grid point on a bounded worker pool"""

    def __init__(self):
        self.executor = ThreadPoolExecutor(max_workers=settings.MAX_WORKERS)

    @staticmethod
    def grid(config: RunConfig) -> List[Tuple[float, float]]:
        return list(itertools.product(config.sweep.alpha, config.sweep.p))

    def point(self, config: RunConfig, alpha: float, p: float) -> Dict[str, Any]:
        """One CSV row; failures leave the numeric columns empty"""
        row: Dict[str, Any] = {"alpha": alpha, "p": p, "N": config.dim, "domain": config.domain.label()}
        try:
            params = Params(alpha=alpha, p=p, dim=config.dim)
            row["regime"] = classify_regime(params).boundary_class.value
            report = classify(params, config.domain)
            if report.h.kind == HKind.POSITIVE_UNKNOWN and config.sweep.compute:
                point_config = config.model_copy(update={"alpha": alpha, "p": p})
                results, diagnostics, _, _ = hardy_service.hardy_results(point_config)
                bound = results["H_bound"]
                report = classify(params, config.domain, h_input=bound["value"], h_error=bound["error"],
                                  h_source=SourceTag.EXTRAPOLATED)
                row["iterations"] = sum(s["iterations"] for s in diagnostics["solver"])
            row.update({
                "H_bound": report.h.number,
                "lambda_inf": report.lambda_inf.value,
                "gap": report.gap.value,
                "nu": report.nu_boundary.value if report.nu_boundary is not None else None,
                "nu_tilde": report.nu_infinity.value if report.nu_infinity is not None else None,
                "error_estimate": report.h.value.error if report.h.value is not None else None,
            })
        except HardyError as exc:
            logger.error(f"sweep point alpha={alpha} p={p} failed: {exc.message}")
            row["error"] = exc.message
        except ValidationError as exc:
            message = "; ".join(e["msg"] for e in exc.errors())
            logger.error(f"sweep point alpha={alpha} p={p} rejected: {message}")
            row["error"] = message
        return row

    def run(self, config: RunConfig, jobs: Optional[int] = None) -> List[Dict[str, Any]]:
        """Rows in grid order regardless of completion order"""
        points = self.grid(config)
        logger.info(f"sweep over {len(points)} grid points on {config.domain.label()}")
        if not points:
            return []
        if jobs:
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                return list(executor.map(lambda ap: self.point(config, *ap), points))
        return list(self.executor.map(lambda ap: self.point(config, *ap), points))

    def write(self, rows: List[Dict[str, Any]], out_dir: Path, plots: bool = False) -> List[Path]:
        out_dir = Path(out_dir)
        paths = [report_service.write_sweep_csv(rows, out_dir / "sweep.csv")]
        if plots and rows:
            paths.append(plot_service.sweep_heatmap(rows, out_dir / "plots" / "sweep_heatmap.svg"))
        return paths


sweep_service = SweepService()
