import pytest

from matterwave import quadrature
from matterwave.kinematics import DeviceFrame, ExperimentParams

DESK = dict(m=2.2e-25, g=9.8, T=0.1, kappa=1.6e7)


@pytest.fixture
def desk():
    """Desk-scale atom parameters."""
    return ExperimentParams(**DESK)


@pytest.fixture
def desk_neutron():
    return ExperimentParams(**DESK, v_x0=1e3)


@pytest.fixture(params=DeviceFrame.all(), ids=lambda df: df.label)
def situation(request):
    return request.param


@pytest.fixture(params=quadrature.available_backends())
def backend(request):
    previous = quadrature.BACKEND
    quadrature.use_backend(request.param)
    yield request.param
    quadrature.use_backend(previous)
