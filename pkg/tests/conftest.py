import textwrap

import pytest
from click.testing import CliRunner

from hardygap.models.params import DomainSpec, Params
from hardygap.models.run_config import MeshOptions
from hardygap.services.geometry import DistanceProfile


@pytest.fixture
def annulus():
    return DomainSpec.annulus(1.0, 2.0)


@pytest.fixture
def ball():
    return DomainSpec.ball(1.0)


@pytest.fixture
def exterior():
    return DomainSpec.exterior_ball(1.0)


@pytest.fixture
def half_line():
    return DomainSpec.interval(1.0)


@pytest.fixture
def annulus_profile(annulus):
    return DistanceProfile(annulus, 2)


@pytest.fixture
def ball_profile(ball):
    return DistanceProfile(ball, 3)


@pytest.fixture
def exterior_profile(exterior):
    return DistanceProfile(exterior, 3)


@pytest.fixture
def small_mesh_options():
    return MeshOptions(elements=64, t_min=[1e-2, 1e-3])


@pytest.fixture
def laplacian_params():
    return Params(alpha=0.0, p=2.0, dim=2)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    """Write a YAML run configuration and return its path"""
    def write(text: str, name: str = "run.yaml"):
        path = tmp_path / name
        path.write_text(textwrap.dedent(text))
        return path
    return write
