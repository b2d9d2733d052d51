"""
Command-level studies: constants, indicial tables, Hardy constant bounds and gap reports
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from hardygap.core.config import settings
from hardygap.core.exceptions import HardyError, SolverConvergenceError
from hardygap.models.params import IndicialProblem, Location, Params
from hardygap.models.report import HKind, ReportDocument, SourceTag
from hardygap.models.run_config import RunConfig
from hardygap.services import mesh_service
from hardygap.services.config_loader import run_config_to_dict
from hardygap.services.constants import c_const, c_min, classify_regime
from hardygap.services.gap_classifier import classify, hardy_inequality_holds, lambda_infinity, predict_decay
from hardygap.services.geometry import DistanceProfile
from hardygap.services.indicial import indicial_function, indicial_root, root_interval, target_constant
from hardygap.services.plot_service import plot_service
from hardygap.services.rayleigh_solver import (
    CollarResult,
    collar_constant,
    cutoff_study,
    decay_exponent,
    refinement_study,
)
from hardygap.services.report_service import RADIAL_CAVEAT, report_service

logger = logging.getLogger(__name__)


class HardyService:
    """Runs the studies behind each command and assembles their reports"""

    def __init__(self, max_workers: Optional[int] = None):
        self.executor = ThreadPoolExecutor(max_workers=max_workers or settings.MAX_WORKERS)

    # Constants ------------------------------------------------------------

    def constants_results(self, params: Params, config: Optional[RunConfig] = None) -> Dict[str, Any]:
        regime = classify_regime(params)
        results: Dict[str, Any] = {
            "alpha": params.alpha,
            "p": params.p,
            "N": params.dim,
            "c1": c_const(params, 1),
            "cN": c_const(params, params.dim),
            "cmin": c_min(params),
            "regime": regime.boundary_class.value,
            "source": SourceTag.FORMULA.value,
        }
        if config is not None:
            results["domain"] = config.domain.label()
            results["lambda_inf"] = lambda_infinity(params, config.domain).value
            results["hardy_inequality_holds"] = hardy_inequality_holds(params, config.domain)
        return results

    def constants(self, config: RunConfig) -> ReportDocument:
        return report_service.build("constants", run_config_to_dict(config),
                                    self.constants_results(config.params, config))

    # Indicial -------------------------------------------------------------

    def indicial_rows(self, params: Params, mu: List[float], samples: int,
                      locations: List[Location]) -> Dict[str, Any]:
        tables: Dict[str, Any] = {}
        for location in locations:
            c = target_constant(params, location)
            interval = root_interval(params, location)
            values = list(mu) if mu else (np.linspace(0.0, c, samples).tolist() if c > 0 else [0.0])
            f = indicial_function(params, location)
            rows = []
            for m in values:
                nu = indicial_root(IndicialProblem(params=params, location=location, mu=m))
                rows.append({"mu": m, "nu": nu, "lambda_nu": f(nu), "residual": abs(f(nu) - m)})
            tables[location.value] = {
                "c": c,
                "interval": {"lo": interval.lo, "hi": interval.hi,
                             "monotone": interval.monotone_direction.value},
                "roots": rows,
            }
        return tables

    def indicial(self, config: RunConfig) -> ReportDocument:
        opts = config.indicial
        tables = self.indicial_rows(config.params, opts.mu, opts.samples, opts.locations)
        return report_service.build("indicial", run_config_to_dict(config), tables)

    # Hardy constant ---------------------------------------------------------

    def hardy_results(self, config: RunConfig, plots_dir: Optional[Path] = None
                      ) -> Tuple[Dict[str, Any], Dict[str, Any], List[str], List[str]]:
        problem = config.problem()
        params, spec = problem.params, problem.domain
        profile = DistanceProfile(spec, params.dim)
        logger.info(f"Hardy study on {spec.label()} alpha={params.alpha} p={params.p} N={params.dim}")

        cutoffs = cutoff_study(problem, profile)
        finest = cutoffs.best.minimizer.mesh
        refinement = refinement_study(problem, config.hardy.levels, profile,
                                      t_min=finest.t_min, r_max=finest.r_max)
        # Discretization correction measured at the finest cutoff.
        correction = refinement.extrapolation.limit - refinement.values[0]
        h_value = max(cutoffs.extrapolation.limit + correction, 0.0)
        h_error = cutoffs.extrapolation.error_estimate + refinement.extrapolation.error_estimate

        best = refinement.results[-1]
        results: Dict[str, Any] = {
            "domain": spec.label(),
            "H_bound": {"value": h_value, "source": SourceTag.EXTRAPOLATED.value, "error": h_error},
            "H_discrete_min": {"value": min(refinement.values + cutoffs.values),
                               "source": SourceTag.COMPUTED.value},
            "cutoff": {
                "t_min": [t for t, _ in cutoffs.cutoffs],
                "r_max": [r for _, r in cutoffs.cutoffs],
                "raw": cutoffs.values,
                "binding_end": cutoffs.binding_end,
                "extrapolation": cutoffs.extrapolation,
            },
            "refinement": {
                "raw": refinement.values,
                "monotone": refinement.monotone,
                "extrapolation": refinement.extrapolation,
            },
            "minimizer": {
                "r": best.minimizer.mesh.nodes,
                "u": best.minimizer.values,
            },
        }
        diagnostics: Dict[str, Any] = {
            "solver": [r.summary() for r in cutoffs.results + refinement.results],
            "unconverged": sum(not r.converged for r in cutoffs.results + refinement.results),
        }
        caveats = [RADIAL_CAVEAT]
        artifacts: List[str] = []

        fit = None
        results["decay"] = {}
        try:
            fit = decay_exponent(best, profile, window=config.hardy.decay_window)
            results["decay"]["boundary"] = fit
        except HardyError as exc:
            caveats.append(f"boundary decay fit unavailable: {exc.message}")
        if spec.is_exterior:
            try:
                results["decay"]["infinity"] = decay_exponent(best, profile, location=Location.INFINITY)
            except HardyError as exc:
                caveats.append(f"decay fit at infinity unavailable: {exc.message}")
        try:
            nu, nu_tilde = predict_decay(params, spec, h_value)
            results["predicted_decay"] = {"nu": nu, "nu_tilde": nu_tilde, "source": SourceTag.EXTRAPOLATED.value}
        except HardyError as exc:
            caveats.append(f"decay prediction unavailable: {exc.message}")

        if plots_dir is not None:
            artifacts.append(str(plot_service.minimizer_profile(best, Path(plots_dir) / "minimizer.svg")))
            artifacts.append(str(plot_service.convergence(
                refinement.values, refinement.extrapolation, Path(plots_dir) / "refinement.svg")))
            artifacts.append(str(plot_service.convergence(
                cutoffs.values, cutoffs.extrapolation, Path(plots_dir) / "cutoff.svg",
                xlabel="log depth", abscissae=cutoffs.extrapolation.abscissae)))
            if fit is not None:
                artifacts.append(str(plot_service.decay_fit(best, fit, profile, Path(plots_dir) / "decay.svg")))
        return results, diagnostics, caveats, artifacts

    def hardy(self, config: RunConfig, plots_dir: Optional[Path] = None) -> ReportDocument:
        results, diagnostics, caveats, artifacts = self.hardy_results(config, plots_dir)
        document = report_service.build("hardy", run_config_to_dict(config), results, diagnostics, caveats)
        return document.model_copy(update={"artifacts": artifacts})

    # Gap ------------------------------------------------------------------

    def collar_results(self, config: RunConfig) -> Dict[str, Any]:
        problem = config.problem()
        profile = DistanceProfile(problem.domain, problem.params.dim)
        family = mesh_service.cutoff_family(profile, problem.mesh)

        def run(kwargs) -> CollarResult:
            return collar_constant(family, profile, problem.params, options=problem.solver, **kwargs)

        widths = list(config.gap.collar_widths)
        boundary = list(self.executor.map(run, [{"width": w} for w in widths]))
        out: Dict[str, Any] = {
            "widths": widths,
            "boundary": [r.value for r in boundary],
            "components": [{k: v for k, v in r.components.items()} for r in boundary],
        }
        estimates = [boundary[-1].value]
        errors = [boundary[-1].error_estimate]
        if problem.domain.is_exterior:
            cores = list(config.gap.tail_radii)
            tails = list(self.executor.map(run, [{"core": k} for k in cores]))
            out["tail_cores"] = cores
            out["tail"] = [r.value for r in tails]
            estimates.append(tails[-1].value)
            errors.append(tails[-1].error_estimate)
        binding = int(np.argmin(estimates))
        out["lambda_inf_estimate"] = {"value": estimates[binding], "error": errors[binding],
                                      "source": SourceTag.EXTRAPOLATED.value}
        out["monotone"] = all(b >= a - 1e-12 * max(1.0, abs(a))
                              for a, b in zip(out["boundary"], out["boundary"][1:]))
        return out

    def gap(self, config: RunConfig, plots_dir: Optional[Path] = None) -> ReportDocument:
        params, spec = config.params, config.domain
        preliminary = classify(params, spec)
        results: Dict[str, Any] = {}
        diagnostics: Dict[str, Any] = {}
        caveats: List[str] = []
        artifacts: List[str] = []

        h_input, h_error, source = config.gap.h_input, config.gap.h_error, SourceTag.COMPUTED
        needs_study = preliminary.h.kind == HKind.POSITIVE_UNKNOWN and h_input is None
        if needs_study:
            hardy, hardy_diag, caveats, artifacts = self.hardy_results(config, plots_dir)
            h_input = hardy["H_bound"]["value"]
            h_error = hardy["H_bound"]["error"]
            source = SourceTag.EXTRAPOLATED
            results["hardy"] = {k: v for k, v in hardy.items() if k != "minimizer"}
            diagnostics.update(hardy_diag)

        collars = self.collar_results(config)
        results["collar"] = collars
        report = classify(params, spec, h_input=h_input, h_error=h_error, h_source=source)
        results["report"] = report
        if h_input is not None:
            sandwich = h_input <= collars["lambda_inf_estimate"]["value"] + \
                settings.GAP_MARGIN_FACTOR * (h_error + collars["lambda_inf_estimate"]["error"]) + 1e-12
            diagnostics["sandwich_holds"] = sandwich
            if not sandwich:
                caveats.append("numeric H exceeds the collar estimate of lambda_inf")
        if RADIAL_CAVEAT not in caveats:
            caveats.append(RADIAL_CAVEAT)
        document = report_service.build("gap", run_config_to_dict(config), results, diagnostics,
                                        caveats + list(report.notes))
        return document.model_copy(update={"artifacts": artifacts})


def raise_on_unconverged(document: ReportDocument):
    """Exit status 2 for reports produced from unconverged iterations"""
    unconverged = document.diagnostics.get("unconverged", 0)
    if unconverged:
        raise SolverConvergenceError(f"{unconverged} minimizations stopped at the iteration cap",
                                     best=document.results.get("H_bound"))


hardy_service = HardyService()
