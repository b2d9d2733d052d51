"""
SVG plot artifacts: minimizer profiles, decay fits, convergence and sweep maps
"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from hardygap.models.results import DecayFit, Extrapolation  # noqa: E402
from hardygap.services.geometry import DistanceProfile  # noqa: E402
from hardygap.services.rayleigh_solver import RayleighResult  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "hardygap"


class PlotService:
    """Writes standalone SVG figures"""

    def _save(self, fig, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        logger.info(f"wrote plot {path}")
        return path

    def minimizer_profile(self, result: RayleighResult, path: Path, title: str = "") -> Path:
        fn = result.minimizer
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(fn.mesh.nodes, fn.values, "-", linewidth=1.5)
        ax.set_xlabel("r")
        ax.set_ylabel("u(r)")
        ax.set_title(title or f"Discrete minimizer, quotient {result.value:.8g}")
        if np.all(fn.mesh.nodes > 0) and fn.mesh.nodes[-1] / fn.mesh.nodes[0] > 1e3:
            ax.set_xscale("log")
        ax.grid(True, alpha=0.3)
        return self._save(fig, path)

    def decay_fit(self, result: RayleighResult, fit: DecayFit, profile: DistanceProfile, path: Path) -> Path:
        fn = result.minimizer
        if fit.location.value == "infinity":
            x = fn.mesh.nodes
            xlabel = "r"
        else:
            x = profile.branches[0].distance(fn.mesh.nodes)
            xlabel = "delta"
        mask = (x > 0) & (fn.values > 0)
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.loglog(x[mask], fn.values[mask], ".", markersize=3, label="minimizer")
        lo, hi = fit.window
        xs = np.geomspace(lo, hi, 50)
        ax.loglog(xs, np.exp(fit.intercept) * xs ** fit.slope, "r--",
                  label=f"slope {fit.slope:.4f} (r^2 = {fit.r_squared:.4f})")
        ax.axvspan(lo, hi, color="gray", alpha=0.15)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("u")
        ax.set_title("Log-log decay fit")
        ax.legend()
        ax.grid(True, alpha=0.3, which="both")
        return self._save(fig, path)

    def convergence(self, values: Sequence[float], extrapolation: Extrapolation, path: Path,
                    xlabel: str = "level", abscissae: Optional[Sequence[float]] = None) -> Path:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        x = list(abscissae) if abscissae is not None else list(range(len(values)))
        ax.plot(x, values, "o-", linewidth=2, markersize=6, label="discrete minimum")
        ax.axhline(extrapolation.limit, color="r", linestyle="--",
                   label=f"{extrapolation.model}: {extrapolation.limit:.8g}")
        ax.set_xlabel(xlabel)
        ax.set_ylabel("quotient")
        ax.set_title("Convergence")
        ax.legend()
        ax.grid(True, alpha=0.3)
        return self._save(fig, path)

    def sweep_heatmap(self, rows: List[Dict], path: Path) -> Path:
        alphas = sorted({r["alpha"] for r in rows})
        ps = sorted({r["p"] for r in rows})
        grid = np.full((len(ps), len(alphas)), np.nan)
        for r in rows:
            if r.get("H_bound") is not None:
                grid[ps.index(r["p"]), alphas.index(r["alpha"])] = r["H_bound"]
        fig, ax = plt.subplots(figsize=(7, 5))
        image = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
        ax.set_xticks(range(len(alphas)), [f"{a:g}" for a in alphas])
        ax.set_yticks(range(len(ps)), [f"{p:g}" for p in ps])
        ax.set_xlabel("alpha")
        ax.set_ylabel("p")
        ax.set_title("H bound over the sweep grid")
        fig.colorbar(image, ax=ax)
        return self._save(fig, path)


plot_service = PlotService()
