"""Synthetic sample streams for the estimators.

Scenarios
---------
spring
    Hooke's law: output ``k * x`` for a displacement ``x``; theta = [k].
lift
    Wing lift at constant speed, ``L = q S (CL0 + CLa * alpha)`` with
    ``q = rho V^2 / 2``. The regressor is ``[q S, q S alpha]`` so that
    theta = [CL0, CLa].
generic-linear
    Regressor entries drawn uniformly from ``input_range``.
drifting
    As generic-linear, but theta follows a schedule over time: either
    ``theta + amplitude * sin(2 pi t / period)`` or a piecewise-constant
    cycle through ``drift_levels`` switching every ``drift_segment`` steps.

Noise is additive zero-mean Gaussian on the output only.

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64). Draw
order is fixed: all regressor excitation first (as one
``(num_samples, d)`` uniform block), then ``num_samples`` standard normals
for the noise, which are drawn even when ``noise_std == 0``.
"""

from dataclasses import dataclass, field

import numpy as np

from .batch import Dataset
from .errors import ConfigError

__all__ = ["KINDS", "ScenarioSpec", "GeneratedStream", "generate", "lift_dynamic_pressure_area"]

KINDS = ("spring", "lift", "generic-linear", "drifting")

_DEFAULT_THETA = {
    "spring": (2.0,),
    "lift": (0.28, 3.45),
    "drifting": (1.0,),
}
_DEFAULT_RANGE = {"lift": (-0.1, 0.3)}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    true_theta: tuple = None
    num_samples: int = 100
    noise_std: float = 0.0
    seed: int = 0
    input_range: tuple = None
    # lift constants, SI units
    rho: float = 1.225
    velocity: float = 20.0
    area: float = 0.5
    # drifting scenario
    drift: str = "sinusoid"
    drift_amplitude: float = 0.5
    drift_period: float = 200.0
    drift_levels: tuple = ()
    drift_segment: int = 100

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; choose from {', '.join(KINDS)}")
        theta = self.true_theta
        if theta is None:
            if self.kind not in _DEFAULT_THETA:
                raise ConfigError(f"scenario {self.kind!r} needs true_theta")
            theta = _DEFAULT_THETA[self.kind]
        theta = tuple(float(t) for t in np.atleast_1d(theta))
        if not theta or not all(np.isfinite(theta)):
            raise ConfigError("true_theta must be a non-empty finite vector")
        expected = {"spring": 1, "lift": 2}.get(self.kind)
        if expected is not None and len(theta) != expected:
            raise ConfigError(f"{self.kind} scenario has {expected} parameter(s), got {len(theta)}")
        object.__setattr__(self, "true_theta", theta)

        if int(self.num_samples) != self.num_samples or self.num_samples < 1:
            raise ConfigError(f"num_samples must be a positive integer, got {self.num_samples}")
        if not (np.isfinite(self.noise_std) and self.noise_std >= 0):
            raise ConfigError(f"noise_std must be nonnegative, got {self.noise_std}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError(f"seed must be an unsigned integer, got {self.seed}")

        rng = self.input_range if self.input_range is not None else _DEFAULT_RANGE.get(self.kind, (-1.0, 1.0))
        lo, hi = (float(x) for x in rng)
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ConfigError(f"input_range must satisfy lo < hi, got ({lo}, {hi})")
        object.__setattr__(self, "input_range", (lo, hi))

        if self.kind == "lift" and min(self.rho, self.velocity, self.area) <= 0:
            raise ConfigError("rho, velocity and area must be positive")
        if self.kind == "drifting":
            if self.drift == "sinusoid":
                if not self.drift_period > 0:
                    raise ConfigError("drift_period must be positive")
            elif self.drift == "piecewise":
                levels = tuple(tuple(float(x) for x in np.atleast_1d(lv)) for lv in self.drift_levels)
                if not levels or any(len(lv) != len(theta) for lv in levels):
                    raise ConfigError("piecewise drift needs levels matching the parameter dimension")
                if int(self.drift_segment) != self.drift_segment or self.drift_segment < 1:
                    raise ConfigError("drift_segment must be a positive integer")
                object.__setattr__(self, "drift_levels", levels)
            else:
                raise ConfigError(f"unknown drift schedule {self.drift!r}")


@dataclass(frozen=True, eq=False)
class GeneratedStream:
    """A generated dataset with its ground truth.

    ``true_theta_per_step[j]`` is the parameter that produced sample ``j``;
    ``noise[j]`` is the noise added to its output.
    """

    dataset: Dataset
    true_theta_per_step: np.ndarray
    noise: np.ndarray
    spec: ScenarioSpec = field(repr=False)


def lift_dynamic_pressure_area(spec):
    """``q S = rho V^2 S / 2`` for a lift scenario."""
    return 0.5 * spec.rho * spec.velocity**2 * spec.area


def _theta_schedule(spec, k):
    base = np.asarray(spec.true_theta)
    if spec.kind != "drifting":
        return np.tile(base, (k, 1))
    t = np.arange(k, dtype=np.float64)
    if spec.drift == "sinusoid":
        offset = spec.drift_amplitude * np.sin(2.0 * np.pi * t / spec.drift_period)
        return base[None, :] + offset[:, None]
    levels = np.asarray(spec.drift_levels)
    return levels[(np.arange(k) // spec.drift_segment) % len(levels)]


def generate(spec):
    """Produce a deterministic sample stream for `spec`."""
    k = int(spec.num_samples)
    n = len(spec.true_theta)
    lo, hi = spec.input_range
    rng = np.random.default_rng(spec.seed)

    if spec.kind == "lift":
        alpha = rng.uniform(lo, hi, size=(k, 1))
        qs = lift_dynamic_pressure_area(spec)
        regressors = np.hstack([np.full((k, 1), qs), qs * alpha])
    else:
        regressors = rng.uniform(lo, hi, size=(k, n))
    noise = spec.noise_std * rng.standard_normal(k)

    thetas = _theta_schedule(spec, k)
    outputs = np.einsum("ij,ij->i", regressors, thetas) + noise
    return GeneratedStream(
        dataset=Dataset.from_arrays(regressors, outputs),
        true_theta_per_step=thetas,
        noise=noise,
        spec=spec,
    )
