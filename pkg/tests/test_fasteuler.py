import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from ckfahrs.fasteuler import GateConfig, fast_euler
from ckfahrs.sensors import GRAVITY
from ckfahrs.sim import DEFAULT_MAG


def synth(roll, pitch, yaw, ref=DEFAULT_MAG.direction):
    C = Rotation.from_euler("ZYX", [yaw, pitch, roll]).as_matrix()
    return C.T @ np.array([0.0, 0.0, -GRAVITY]), C.T @ ref


def test_level_north():
    obs = fast_euler(*synth(0.0, 0.0, 0.0))
    assert obs.valid
    np.testing.assert_allclose(obs.angles, 0.0, atol=1e-15)


@pytest.mark.parametrize("yaw_deg", [0, 45, 90, 179, 181, 270, 359.9])
def test_heading_quadrants(yaw_deg):
    obs = fast_euler(*synth(math.radians(5), math.radians(-7), math.radians(yaw_deg)))
    assert obs.angles[2] == pytest.approx(math.radians(yaw_deg), abs=1e-12)


def test_exact_pitch_under_roll():
    roll, pitch = math.radians(40), math.radians(25)
    a, m = synth(roll, pitch, 1.0)
    assert fast_euler(a, m).angles[1] == pytest.approx(pitch, abs=1e-12)
    literal = fast_euler(a, m, GateConfig(exact_pitch=False)).angles[1]
    assert literal == pytest.approx(math.atan2(a[0], -a[2]))
    assert abs(literal - pitch) > 1e-2


def test_literal_pitch_exact_at_zero_roll():
    a, m = synth(0.0, math.radians(25), 1.0)
    assert fast_euler(a, m, GateConfig(exact_pitch=False)).angles[1] == pytest.approx(math.radians(25), abs=1e-12)


def test_accel_gate():
    a, m = synth(0.1, 0.1, 0.1)
    obs = fast_euler(a * (GRAVITY + 0.6) / GRAVITY, m)
    assert not obs.accel_valid and not obs.valid and obs.angles is None
    assert fast_euler(a * (GRAVITY + 0.4) / GRAVITY, m).valid
    assert not fast_euler(np.zeros(3), m).accel_valid


def test_mag_gate_keeps_roll_pitch():
    a, m = synth(0.2, -0.1, 3.0)
    obs = fast_euler(a, 2.0 * m)
    assert obs.accel_valid and not obs.mag_valid and obs.angles is None
    np.testing.assert_allclose(obs.roll_pitch, [0.2, -0.1], atol=1e-12)
    assert not fast_euler(a, 0.4 * m).mag_valid
    assert not fast_euler(a, np.zeros(3)).mag_valid


def test_gate_config_validation():
    with pytest.raises(ValueError):
        GateConfig(alpha=0.0)
    with pytest.raises(ValueError):
        GateConfig(mag_min=1.5, mag_max=0.5)


def test_yaw_never_two_pi():
    a, m = synth(0.0, 0.0, -1e-18)
    yaw = fast_euler(a, m).angles[2]
    assert 0.0 <= yaw < 2 * math.pi
