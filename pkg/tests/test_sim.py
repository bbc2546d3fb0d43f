import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from ckfahrs.ahrs import process_fn
from ckfahrs.attitude import canonical, hamilton, quat_to_euler
from ckfahrs.errors import DataError, FormatError
from ckfahrs.sensors import GRAVITY, NoiseConfig
from ckfahrs.sim import (
    Profile,
    Scenario,
    Trajectory,
    gen_trajectory,
    load_csv,
    simulate,
    synthesize,
    write_csv,
)

WAYPOINTS = (
    (0.0, 0.0, 0.0, 0.5),
    (3.0, 0.0, 0.0, 0.5),
    (8.0, math.radians(20), math.radians(-10), 1.5),
    (15.0, math.radians(-15), math.radians(25), 6.0),
    (20.0, 0.0, 0.0, 6.5),
)


def scenario(profile, **kw):
    kw.setdefault("duration", 20.0)
    if profile is Profile.CUSTOM:
        kw.setdefault("waypoints", WAYPOINTS)
    return Scenario(name=profile.value, profile=profile, **kw)


@pytest.mark.parametrize("profile", [Profile.LOW_DYNAMIC, Profile.HIGH_DYNAMIC, Profile.CUSTOM])
def test_body_rates_integrate_to_truth(profile):
    # integrate q' = q * [0, omega] / 2 independently and compare with the sampled truth
    s = scenario(profile)
    truth = gen_trajectory(s)
    traj = Trajectory(s)

    def rhs(t, q):
        return 0.5 * hamilton(q, np.r_[0.0, traj.omega(t)[0]])

    sol = solve_ivp(rhs, (0.0, s.duration), truth.q[0], t_eval=truth.t[::50], rtol=1e-11, atol=1e-12, max_step=0.05)
    Q = sol.y.T / np.linalg.norm(sol.y.T, axis=1)[:, None]
    for q_ivp, q_true in zip(Q, truth.q[::50]):
        np.testing.assert_allclose(canonical(q_ivp), q_true, atol=1e-7)


def test_truth_euler_consistent_with_quaternion():
    truth = gen_trajectory(scenario(Profile.HIGH_DYNAMIC))
    np.testing.assert_allclose(np.array([quat_to_euler(q) for q in truth.q[::37]]), truth.euler[::37], atol=1e-12)
    assert np.all((truth.euler[:, 2] >= 0) & (truth.euler[:, 2] < 2 * math.pi))


def test_noiseless_gyro_integrates_to_truth():
    s = scenario(Profile.HIGH_DYNAMIC, noise=NoiseConfig.noiseless())
    imu, truth = simulate(s)
    x = np.r_[truth.q[0], np.zeros(3)]
    err = 0.0
    for k in range(1, len(imu)):
        x = process_fn(x, imu.gyro[k], s.dt)
        err = max(err, np.linalg.norm(canonical(x[:4]) - truth.q[k]))
    assert err < 1e-4


def test_static_profile_sensors():
    s = scenario(Profile.STATIC, noise=NoiseConfig.noiseless(), initial_yaw=0.0)
    imu, truth = simulate(s)
    np.testing.assert_allclose(imu.accel, np.tile([0, 0, -GRAVITY], (len(imu), 1)), atol=1e-14)
    np.testing.assert_allclose(imu.gyro, 0.0, atol=1e-15)
    np.testing.assert_allclose(imu.mag[0], s.mag_ref.direction, atol=1e-15)
    np.testing.assert_allclose(truth.euler, 0.0, atol=1e-15)


def test_lead_in_is_static():
    _, truth = simulate(scenario(Profile.LOW_DYNAMIC))
    hold = truth.t <= 2.0
    np.testing.assert_allclose(truth.omega[hold], 0.0, atol=1e-15)
    assert np.all(truth.euler[hold] == truth.euler[0])


def test_gyro_error_model():
    s = scenario(Profile.LOW_DYNAMIC, duration=60.0, noise=NoiseConfig(gyro_drift=0.0))
    imu, truth = simulate(s)
    resid = imu.gyro - truth.gyro_rate - np.array(s.noise.gyro_bias)
    assert abs(resid.mean()) < 3e-4
    assert resid.std() == pytest.approx(s.noise.gyro_white, rel=0.05)


def test_seed_determinism():
    a, _ = simulate(scenario(Profile.LOW_DYNAMIC, seed=3))
    b, _ = simulate(scenario(Profile.LOW_DYNAMIC, seed=3))
    c, _ = simulate(scenario(Profile.LOW_DYNAMIC, seed=4))
    assert np.array_equal(a.gyro, b.gyro) and np.array_equal(a.mag, b.mag)
    assert not np.array_equal(a.gyro, c.gyro)


def test_synthesize_without_rates_uses_omega():
    truth = gen_trajectory(scenario(Profile.LOW_DYNAMIC, duration=5.0))
    truth.gyro_rate = None
    imu = synthesize(truth, NoiseConfig.noiseless(), 0)
    np.testing.assert_allclose(imu.gyro, truth.omega)


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(rate=5.0)
    with pytest.raises(ValueError):
        Scenario(duration=0.0)
    with pytest.raises(ValueError):
        Scenario(profile="custom")
    s = Scenario(duration=1.0, rate=200.0)
    assert s.n_samples == 201 and s.dt == 0.005


def test_series_indexing(short_low_dynamic):
    _, imu, _ = short_low_dynamic
    assert len(imu[10:20]) == 10
    sample = imu[5]
    assert sample.t == imu.t[5]
    assert sum(1 for _ in imu[:7]) == 7


# ---------------------------------------------------------------------------
# CSV


def test_csv_round_trip(tmp_path, short_low_dynamic):
    _, imu, truth = short_low_dynamic
    path = tmp_path / "log.csv"
    write_csv(path, imu, truth)
    imu2, truth2 = load_csv(path)
    for a, b in [(imu.t, imu2.t), (imu.gyro, imu2.gyro), (imu.accel, imu2.accel), (imu.mag, imu2.mag),
                 (truth.euler, truth2.euler)]:
        np.testing.assert_allclose(b, a, rtol=1e-14, atol=1e-300)
    np.testing.assert_allclose(truth2.q, truth.q, atol=1e-13)


def test_csv_without_truth(tmp_path, short_low_dynamic):
    _, imu, _ = short_low_dynamic
    path = tmp_path / "imu.csv"
    write_csv(path, imu[:10])
    _, truth = load_csv(path)
    assert truth is None


def test_write_csv_length_mismatch(tmp_path, short_low_dynamic):
    _, imu, truth = short_low_dynamic
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", imu[:5], truth)


HEADER = "t,gx,gy,gz,ax,ay,az,mx,my,mz\n"
ROW = "{t},0,0,0,0,0,-9.8,1,0,0\n"


def write(tmp_path, text):
    p = tmp_path / "in.csv"
    p.write_text(text)
    return p


def test_csv_comments_and_blank_lines(tmp_path):
    imu, _ = load_csv(write(tmp_path, "# recorded on bench\n" + HEADER + ROW.format(t=0) + "\n" + ROW.format(t=0.01)))
    assert len(imu) == 2


def test_csv_bad_header(tmp_path):
    with pytest.raises(FormatError, match="line 1"):
        load_csv(write(tmp_path, "time,a,b\n" + ROW.format(t=0)))


def test_csv_no_header(tmp_path):
    with pytest.raises(FormatError):
        load_csv(write(tmp_path, "# nothing\n"))


def test_csv_no_rows(tmp_path):
    with pytest.raises(FormatError, match="no data"):
        load_csv(write(tmp_path, HEADER))


def test_csv_malformed_rows_listed(tmp_path):
    text = HEADER + ROW.format(t=0) + "0.01,1,2\n" + ROW.format(t=0.02) + "0.03,x,0,0,0,0,0,1,0,0\n"
    with pytest.raises(FormatError, match=r"line\(s\) 3, 5"):
        load_csv(write(tmp_path, text))


def test_csv_time_must_increase(tmp_path):
    with pytest.raises(DataError, match="line 3"):
        load_csv(write(tmp_path, HEADER + ROW.format(t=0.1) + ROW.format(t=0.1)))


def test_csv_non_finite(tmp_path):
    with pytest.raises(DataError):
        load_csv(write(tmp_path, HEADER + ROW.format(t=0) + "0.01,nan,0,0,0,0,-9.8,1,0,0\n"))
