"""Flat ``key = value`` configuration files.

One setting per line, ``#`` starts a comment, vectors are comma separated.
Angles given in degrees carry a ``_deg`` suffix. Unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .ahrs import AhrsConfig
from .fasteuler import GateConfig
from .linalg import Method
from .sensors import MagReference, NoiseConfig
from .sim import Profile, Scenario

DEFAULT_CONFIG = """\
# ckfahrs run configuration. Units: s, Hz, rad/s, m/s^2, degrees where the key says _deg.

# --- scenario ---
name = low_dynamic
profile = low_dynamic          # static | low_dynamic | high_dynamic | custom
duration_s = 120
rate_hz = 100
seed = 42
lead_in_s = 2                  # static hold before motion starts
initial_yaw_deg = 30
# custom profile only: t_s:roll_deg:pitch_deg:yaw_deg entries separated by ';'
waypoints =

# --- sensor noise (simulation) ---
noise.gyro_white = 0.005       # rad/s
noise.gyro_drift = 1e-5        # rad/s/sqrt(s), Gauss-Markov driving noise
noise.tau_g = 300              # s
noise.gyro_bias = 0.002, -0.003, 0.0015   # rad/s, constant turn-on bias
noise.accel = 0.05             # m/s^2
noise.mag = 0.01               # unit field

# --- Earth magnetic field ---
mag.inclination_deg = 60
mag.declination_deg = 0

# --- FastEuler gates ---
gate.alpha = 0.5               # m/s^2, accepted | |a| - g |
gate.mag_min = 0.5             # relative to the reference field norm
gate.mag_max = 1.5
gate.exact_pitch = true        # false: pitch = atan2(ax, -az)

# --- filter ---
filter.method = both           # ckf | svdckf | both
filter.sigma_white = 0.005     # rad/s
filter.sigma_drift = 1e-4      # rad/s/sqrt(s)
filter.tau_g = 300             # s
filter.obs_std_deg = 1, 1, 2   # roll, pitch, yaw
filter.p0_quat = 0.05
filter.p0_drift = 0.02         # rad/s
filter.gimbal_guard_deg = 85
filter.drift_bound = 0.2       # rad/s
filter.update_every = 1
filter.init_samples = 100
"""


def _floats(value: str) -> tuple:
    return tuple(float(v) for v in value.split(",") if v.strip())


def _bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _waypoints(value: str) -> tuple:
    rows = []
    for item in value.split(";"):
        item = item.strip()
        if not item:
            continue
        t, r, p, y = (float(v) for v in item.split(":"))
        rows.append((t, math.radians(r), math.radians(p), math.radians(y)))
    return tuple(rows)


def parse_text(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


KNOWN_KEYS = frozenset(parse_text(DEFAULT_CONFIG))


@dataclass
class RunConfig:
    scenario: Scenario = field(default_factory=Scenario)
    ahrs: AhrsConfig = field(default_factory=AhrsConfig)
    filters: tuple = (Method.CHOLESKY, Method.SVD)


def build(values: dict[str, str]) -> RunConfig:
    unknown = set(values) - KNOWN_KEYS
    if unknown:
        raise ValueError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
    v = dict(parse_text(DEFAULT_CONFIG))
    v.update(values)

    noise = NoiseConfig(
        gyro_white=float(v["noise.gyro_white"]),
        gyro_drift=float(v["noise.gyro_drift"]),
        tau_g=float(v["noise.tau_g"]),
        gyro_bias=_floats(v["noise.gyro_bias"]),
        accel=float(v["noise.accel"]),
        mag=float(v["noise.mag"]),
    )
    if len(noise.gyro_bias) != 3:
        raise ValueError("noise.gyro_bias needs three values")
    scenario = Scenario(
        name=v["name"],
        duration=float(v["duration_s"]),
        rate=float(v["rate_hz"]),
        profile=Profile(v["profile"]),
        noise=noise,
        seed=int(v["seed"]),
        mag_ref=MagReference.from_angles(
            math.radians(float(v["mag.inclination_deg"])), math.radians(float(v["mag.declination_deg"]))
        ),
        lead_in=float(v["lead_in_s"]),
        initial_yaw=math.radians(float(v["initial_yaw_deg"])),
        waypoints=_waypoints(v["waypoints"]),
    )
    gate = GateConfig(
        alpha=float(v["gate.alpha"]),
        mag_min=float(v["gate.mag_min"]),
        mag_max=float(v["gate.mag_max"]),
        exact_pitch=_bool(v["gate.exact_pitch"]),
    )
    obs_std = tuple(math.radians(a) for a in _floats(v["filter.obs_std_deg"]))
    if len(obs_std) != 3:
        raise ValueError("filter.obs_std_deg needs three values")
    ahrs = AhrsConfig(
        sigma_white=float(v["filter.sigma_white"]),
        sigma_drift=float(v["filter.sigma_drift"]),
        tau_g=float(v["filter.tau_g"]),
        obs_std=obs_std,
        gate=gate,
        p0_quat=float(v["filter.p0_quat"]),
        p0_drift=float(v["filter.p0_drift"]),
        gimbal_guard=math.radians(float(v["filter.gimbal_guard_deg"])),
        drift_bound=float(v["filter.drift_bound"]),
        update_every=int(v["filter.update_every"]),
        init_samples=int(v["filter.init_samples"]),
    )
    return RunConfig(scenario, ahrs, parse_filters(v["filter.method"]))


def parse_filters(value: str) -> tuple:
    value = value.strip().lower()
    if value == "both":
        return (Method.CHOLESKY, Method.SVD)
    return (Method.parse(value),)


def load(path) -> RunConfig:
    return build(parse_text(Path(path).read_text(encoding="utf-8")))


def default() -> RunConfig:
    return build({})
