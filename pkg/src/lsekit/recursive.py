"""A-priori recursive least squares with a constant forgetting factor.

One transition function, :func:`step`, covers both the plain recursion
(``lam = 1``) and the exponentially forgetting one (``0 < lam < 1``)::

    y_pred = phi^T theta
    e      = y - y_pred
    F+     = (F - F phi phi^T F / (lam + phi^T F phi)) / lam
    theta+ = theta + F+ phi e

The gain is updated before the parameters, so ``theta(k)`` depends on
``F(k)``; with ``lam = 1`` and a diffuse start (large ``f0_scale``) the
estimate tracks the batch solution on the same samples.

States are immutable; :func:`step` returns a new one.
"""

from dataclasses import dataclass
import logging

import numpy as np

from .batch import Sample, check_lambda
from .errors import (
    ConfigError,
    DegeneracyError,
    EmptyInputError,
    LSEError,
    ShapeError,
    SingularUpdateError,
)
from .linalg import DEFAULT_DENOMINATOR_FLOOR, as_vector, symmetrize

__all__ = [
    "ForgettingConfig",
    "EstimatorState",
    "StepRecord",
    "init",
    "predict",
    "step",
    "gain_trace",
    "iter_run",
    "run",
]

log = logging.getLogger(__name__)


def _frozen(arr):
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ForgettingConfig:
    """Tuning of the recursive estimator.

    Attributes
    ----------
    lam : float
        Forgetting factor in (0, 1]; 1 weights every sample equally.
    f0_scale : float
        Initial gain ``F(0) = f0_scale * I``. Large values express little
        confidence in `theta0`.
    theta0 : array_like or None
        Initial estimate; None means all zeros.
    denominator_floor : float
        Smallest admissible ``|lam + phi^T F phi|``.
    """

    lam: float = 1.0
    f0_scale: float = 1e6
    theta0: object = None
    denominator_floor: float = DEFAULT_DENOMINATOR_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "lam", check_lambda(self.lam))
        if not (np.isfinite(self.f0_scale) and self.f0_scale > 0):
            raise ConfigError(f"f0_scale must be positive, got {self.f0_scale}")
        if not (np.isfinite(self.denominator_floor) and self.denominator_floor > 0):
            raise ConfigError(f"denominator_floor must be positive, got {self.denominator_floor}")
        if self.theta0 is not None:
            try:
                theta0 = as_vector(self.theta0, "theta0")
            except LSEError as exc:
                raise ConfigError(str(exc)) from None
            object.__setattr__(self, "theta0", _frozen(theta0))


@dataclass(frozen=True, eq=False)
class EstimatorState:
    theta_hat: np.ndarray
    gain: np.ndarray
    step: int = 0
    last_innovation: float = 0.0
    last_prediction: float = 0.0

    @property
    def dim(self):
        return self.theta_hat.size


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Per-step output of :func:`run`: ``theta_hat`` is the estimate after the step."""

    step: int
    prediction: float
    innovation: float
    theta_hat: np.ndarray
    gain_trace: float


def init(dim, cfg=None):
    """Initial state: ``F(0) = f0_scale * I`` and ``theta(0) = cfg.theta0``."""
    cfg = cfg or ForgettingConfig()
    if int(dim) != dim or dim < 1:
        raise ConfigError(f"dimension must be a positive integer, got {dim}")
    dim = int(dim)
    if cfg.theta0 is None:
        theta = np.zeros(dim)
    elif cfg.theta0.size != dim:
        raise ConfigError(f"theta0 has dimension {cfg.theta0.size}, expected {dim}")
    else:
        theta = cfg.theta0.copy()
    gain = cfg.f0_scale * np.eye(dim)
    return EstimatorState(theta_hat=_frozen(theta), gain=_frozen(gain))


def _regressor(state, phi):
    phi = as_vector(phi, "regressor")
    if phi.size != state.dim:
        raise ShapeError(f"regressor has dimension {phi.size}, estimator has {state.dim}")
    return phi


def predict(state, phi):
    """A-priori output prediction ``phi^T theta_hat``."""
    return float(_regressor(state, phi) @ state.theta_hat)


def step(state, sample, cfg=None):
    """Consume one sample and return the successor state.

    Raises
    ------
    SingularUpdateError
        ``|lam + phi^T F phi|`` is below ``cfg.denominator_floor``.
    DegeneracyError
        The updated gain is not positive definite (Cholesky fails).
    """
    cfg = cfg or ForgettingConfig()
    phi = _regressor(state, sample.regressor)
    lam = cfg.lam
    f = state.gain

    y_pred = float(phi @ state.theta_hat)
    e = sample.output - y_pred

    f_phi = f @ phi
    denom = lam + float(phi @ f_phi)
    if abs(denom) < cfg.denominator_floor:
        raise SingularUpdateError(f"|lam + phi^T F phi| = {abs(denom):.3e} is below floor")
    gain = symmetrize((f - np.outer(f_phi, f_phi) / denom) / lam)
    try:
        np.linalg.cholesky(gain)
    except np.linalg.LinAlgError:
        raise DegeneracyError("gain matrix is no longer positive definite") from None

    theta = state.theta_hat + gain @ phi * e
    return EstimatorState(
        theta_hat=_frozen(theta),
        gain=_frozen(gain),
        step=state.step + 1,
        last_innovation=e,
        last_prediction=y_pred,
    )


def gain_trace(state):
    return float(np.trace(state.gain))


def iter_run(samples, cfg=None, state=None):
    """Lazily fold :func:`step` over an iterable of samples.

    Yields ``(state, record)`` after each sample. Nothing beyond the current
    sample and state is retained, so arbitrarily long streams run in
    constant memory. If `state` is None the estimator is initialised from
    the first sample's dimension.

    Errors from :func:`step` are re-raised with the 1-based index of the
    failing sample prepended to the message and stored as ``exc.step``.
    """
    cfg = cfg or ForgettingConfig()
    for index, sample in enumerate(samples, start=1):
        if not isinstance(sample, Sample):
            sample = Sample(*sample)
        if state is None:
            state = init(sample.dim, cfg)
        try:
            state = step(state, sample, cfg)
        except LSEError as exc:
            err = type(exc)(f"step {index}: {exc}")
            err.step = index
            raise err from exc
        record = StepRecord(
            step=state.step,
            prediction=state.last_prediction,
            innovation=state.last_innovation,
            theta_hat=state.theta_hat,
            gain_trace=gain_trace(state),
        )
        yield state, record


def run(samples, cfg=None):
    """Run the estimator over a whole dataset.

    Returns
    -------
    state : EstimatorState
        The final state.
    records : list of StepRecord
        One entry per sample, in order.
    """
    state = None
    records = []
    for state, rec in iter_run(samples, cfg):
        records.append(rec)
    if state is None:
        raise EmptyInputError("no samples to run")
    log.debug("ran %d steps, final gain trace %.3e", state.step, records[-1].gain_trace)
    return state, records
