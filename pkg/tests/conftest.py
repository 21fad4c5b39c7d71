import pytest

from snaposc import reference_actuator, reference_beam, reference_config


@pytest.fixture
def ref_act():
    return reference_actuator()


@pytest.fixture
def ref_beam():
    return reference_beam()


@pytest.fixture
def ref_config():
    return reference_config()
