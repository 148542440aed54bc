import math
from pathlib import Path

import pytest

from magnodrag import DriveSpec, SphereSpec, SystemParams

TWO_PI = 2.0 * math.pi

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_PATH = REPO_ROOT / "configs" / "yig_sphere.json"


def make_params(Gamma=TWO_PI * 3.2e6, power=0.003, g_mb=TWO_PI * 0.3,
                detuning_convention="effective", **overrides) -> SystemParams:
    """The experiment-derived YIG parameter point used throughout the tests."""
    omega_c = TWO_PI * 10e9
    omega_b = TWO_PI * 15e6
    fields = dict(
        omega_c=omega_c,
        omega_m=omega_c,
        omega_b=omega_b,
        omega_d=omega_c - omega_b,
        kappa_c=TWO_PI * 2.1e6,
        kappa_m=TWO_PI * 0.1e6,
        gamma_b=1e-5 * omega_b,
        Gamma=Gamma,
        g_mb=g_mb,
        drive=DriveSpec.from_power(power),
        sphere=SphereSpec(rho=4.22e27, radius=125e-6,
                          gamma_g=TWO_PI * 28e9),
        medium_length=0.01,
        detuning_convention=detuning_convention,
    )
    fields.update(overrides)
    return SystemParams(**fields)


@pytest.fixture
def params():
    return make_params()


@pytest.fixture
def config_path():
    return CONFIG_PATH
