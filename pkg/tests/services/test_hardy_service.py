import pytest

from hardygap.core.exceptions import SolverConvergenceError
from hardygap.models.params import Location, Params
from hardygap.models.run_config import GapOptions, HardyOptions, MeshOptions, RunConfig
from hardygap.services.hardy_service import hardy_service, raise_on_unconverged
from hardygap.services.report_service import RADIAL_CAVEAT, report_service


@pytest.fixture
def ball_config(ball):
    return RunConfig(
        domain=ball, alpha=0.0, p=2.0, dim=3,
        mesh=MeshOptions(elements=64, t_min=[1e-2, 1e-3, 1e-4]),
        hardy=HardyOptions(levels=2, decay_window=(1e-3, 1e-1)),
        gap=GapOptions(collar_widths=[0.4, 0.2]),
    )


def test_constants_results(ball_config):
    results = hardy_service.constants_results(Params(alpha=0.0, p=2.0, dim=3))
    assert (results["c1"], results["cN"], results["cmin"]) == (0.25, 0.25, 0.25)
    assert results["regime"] == "Between"
    assert results["source"] == "formula"
    document = hardy_service.constants(ball_config)
    assert document.command == "constants"
    assert document.results["domain"] == "Ball(1)"
    assert document.results["lambda_inf"] == 0.25
    assert document.results["hardy_inequality_holds"] is True


def test_indicial_rows():
    params = Params(alpha=0.0, p=2.0, dim=3)
    tables = hardy_service.indicial_rows(params, [], 3, [Location.BOUNDARY, Location.INFINITY])
    boundary = tables["boundary"]
    assert boundary["c"] == 0.25
    assert [row["mu"] for row in boundary["roots"]] == [0.0, 0.125, 0.25]
    assert boundary["roots"][0]["nu"] == 1.0 and boundary["roots"][-1]["nu"] == 0.5
    assert all(row["residual"] <= 1e-10 for row in boundary["roots"])
    assert tables["infinity"]["interval"]["monotone"] == "increasing"
    chosen = hardy_service.indicial_rows(params, [0.1875], 11, [Location.BOUNDARY])
    assert list(chosen) == ["boundary"]
    assert chosen["boundary"]["roots"][0]["nu"] == pytest.approx(0.75)


def test_degenerate_constant_gives_a_single_row():
    tables = hardy_service.indicial_rows(Params(alpha=-1.0, p=2.0, dim=3), [], 11, [Location.BOUNDARY])
    assert [row["mu"] for row in tables["boundary"]["roots"]] == [0.0]


class TestHardyStudy:

    def test_ball_report(self, ball_config, tmp_path):
        document = hardy_service.hardy(ball_config, plots_dir=tmp_path / "plots")
        results = document.results
        assert document.command == "hardy"
        assert results["H_bound"]["source"] == "extrapolated"
        assert 0.15 < results["H_bound"]["value"] < 0.35
        # Discrete minima over truncated radial spaces stay above H = 1/4.
        assert results["H_discrete_min"]["value"] > 0.25
        raw = results["cutoff"]["raw"]
        assert raw == sorted(raw, reverse=True)
        assert results["cutoff"]["binding_end"] == "boundary"
        assert results["refinement"]["monotone"] is True
        assert "boundary" in results["decay"]
        assert RADIAL_CAVEAT in document.caveats
        assert document.diagnostics["unconverged"] == 0
        assert len(document.artifacts) == 4
        assert all((tmp_path / "plots" / name).exists()
                   for name in ("minimizer.svg", "refinement.svg", "cutoff.svg", "decay.svg"))

    def test_report_renders(self, ball_config, tmp_path):
        document = hardy_service.hardy(ball_config)
        path = report_service.write(document, tmp_path, fmt="json")
        assert path.exists() and document.artifacts == []


class TestGap:

    def test_exact_verdict_skips_the_quotient_study(self, ball_config):
        config = ball_config.model_copy(update={"mesh": MeshOptions(elements=64, t_min=[1e-2, 1e-3])})
        document = hardy_service.gap(config)
        report = document.results["report"]
        assert report["gap"] == "Zero"
        assert report["h"]["kind"] == "ExactValue"
        assert "hardy" not in document.results
        collar = document.results["collar"]
        assert collar["widths"] == [0.4, 0.2]
        assert len(collar["boundary"]) == 2
        assert "tail" not in collar
        assert "sandwich_holds" not in document.diagnostics

    def test_numeric_input(self, annulus):
        config = RunConfig(
            domain=annulus, alpha=0.0, p=2.0, dim=2,
            mesh=MeshOptions(elements=64, t_min=[1e-2, 1e-3]),
            gap=GapOptions(collar_widths=[0.4, 0.2], h_input=0.2, h_error=1e-4),
        )
        document = hardy_service.gap(config)
        report = document.results["report"]
        assert report["gap"] == "Positive"
        assert report["h"]["kind"] == "NumericBound"
        assert report["minimizer_exists"] == "Yes"
        assert document.diagnostics["sandwich_holds"] is True
        assert document.results["collar"]["lambda_inf_estimate"]["source"] == "extrapolated"


def test_raise_on_unconverged():
    ok = report_service.build("hardy", {}, {}, diagnostics={"unconverged": 0}, timestamp=False)
    raise_on_unconverged(ok)
    bad = report_service.build("hardy", {}, {"H_bound": {"value": 0.3}}, diagnostics={"unconverged": 2},
                               timestamp=False)
    with pytest.raises(SolverConvergenceError) as info:
        raise_on_unconverged(bad)
    assert info.value.best == {"value": 0.3}
