import math

import numpy as np
import pytest

from ckfahrs.attitude import euler_to_quat
from ckfahrs.sensors import (
    GRAVITY,
    GyroErrorState,
    MagReference,
    NoiseConfig,
    accel_measure,
    drift_decay,
    drift_step,
    gyro_measure,
    mag_measure,
)


def test_level_accel_reads_minus_g():
    np.testing.assert_allclose(accel_measure(euler_to_quat(0, 0, 1.0)), [0, 0, -GRAVITY], atol=1e-14)


def test_nose_up_accel():
    # nose up: the specific force gains a +x component
    f = accel_measure(euler_to_quat(0, math.radians(30), 0))
    np.testing.assert_allclose(f, GRAVITY * np.array([math.sin(math.radians(30)), 0, -math.cos(math.radians(30))]), atol=1e-14)


def test_free_fall_reads_zero():
    np.testing.assert_allclose(accel_measure(euler_to_quat(0.3, 0.2, 0.1), a_lin=[0, 0, GRAVITY]), 0.0, atol=1e-14)


def test_mag_reference_angles():
    ref = MagReference.from_angles(math.radians(60), math.radians(10))
    assert np.linalg.norm(ref.direction) == pytest.approx(1.0)
    assert math.degrees(math.asin(ref.direction[2])) == pytest.approx(60.0)
    assert math.degrees(math.atan2(ref.direction[1], ref.direction[0])) == pytest.approx(10.0)


def test_mag_measure_heading_east():
    ref = MagReference.from_angles(0.0)
    m = mag_measure(euler_to_quat(0, 0, math.pi / 2), ref)
    # facing east, north lies to the left (negative body y)
    np.testing.assert_allclose(m, [0, -1, 0], atol=1e-15)


def test_mag_reference_rejects_zero():
    with pytest.raises(ValueError):
        MagReference(np.zeros(3))


def test_drift_step_decays_without_noise():
    d = drift_step(np.ones(3), tau_g=100.0, dt=10.0, noise=np.zeros(3))
    np.testing.assert_allclose(d, math.exp(-0.1))
    assert drift_decay(100.0, 0.0) == 1.0


def test_drift_step_stationary_variance():
    # stationary variance of the discretized process: sigma^2 dt / (1 - a^2)
    rng = np.random.default_rng(5)
    tau, dt, sigma = 2.0, 0.1, 0.3
    d = np.zeros(3)
    samples = []
    for _ in range(40000):
        d = drift_step(d, tau, dt, rng.standard_normal(3), sigma)
        samples.append(d[0])
    a = math.exp(-dt / tau)
    expected = sigma**2 * dt / (1 - a * a)
    assert np.var(samples[2000:]) == pytest.approx(expected, rel=0.1)


def test_drift_step_rejects_bad_dt():
    with pytest.raises(ValueError):
        drift_step(np.zeros(3), 1.0, 0.0, np.zeros(3))


def test_gyro_measure():
    err = GyroErrorState(drift=[0.1, 0.2, 0.3], sigma_white=0.5)
    np.testing.assert_allclose(gyro_measure([1, 1, 1], err, [2, 0, 0]), [2.1, 1.2, 1.3])


def test_gyro_error_state_validation():
    with pytest.raises(ValueError):
        GyroErrorState(tau_g=0.0)
    with pytest.raises(ValueError):
        GyroErrorState(sigma_white=-1.0)


def test_noiseless_config():
    cfg = NoiseConfig.noiseless()
    assert cfg.gyro_white == cfg.gyro_drift == cfg.accel == cfg.mag == 0.0
    assert cfg.gyro_bias == (0.0, 0.0, 0.0)
