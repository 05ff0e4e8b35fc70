"""Sample containers and the batch least-squares solver.

Index convention: a :class:`Sample` pairs the regressor ``phi(k-1)`` with
the output ``y(k)`` it explains, so a dataset of k samples holds
``phi(0) .. phi(k-1)`` and ``y(1) .. y(k)``. There is no implicit intercept;
put a constant 1 in the regressor to fit one.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ConfigError, DataError, EmptyInputError, ShapeError
from .linalg import as_vector, default_rcond, pinv_with_rank

__all__ = [
    "Sample",
    "Dataset",
    "BatchSolution",
    "assemble",
    "solve_batch",
    "cost",
    "check_lambda",
    "StreamingCost",
]


@dataclass(frozen=True, eq=False)
class Sample:
    """One aligned observation: regressor ``phi(k-1)`` and output ``y(k)``."""

    regressor: np.ndarray
    output: float

    def __post_init__(self):
        phi = as_vector(self.regressor, "regressor")
        phi.setflags(write=False)
        object.__setattr__(self, "regressor", phi)
        y = float(self.output)
        if not math.isfinite(y):
            raise DataError("output must be finite")
        object.__setattr__(self, "output", y)

    @property
    def dim(self):
        return self.regressor.size


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ordered, dimension-homogeneous collection of samples."""

    samples: tuple = ()
    dim: int = field(default=None)

    def __post_init__(self):
        samples = tuple(self.samples)
        dim = self.dim
        if dim is None and samples:
            dim = samples[0].dim
        for j, s in enumerate(samples, start=1):
            if s.dim != dim:
                raise ShapeError(f"sample {j} has dimension {s.dim}, expected {dim}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "dim", dim)

    @classmethod
    def from_arrays(cls, regressors, outputs):
        """Build a dataset from a (k, n) regressor array and k outputs."""
        regressors = np.asarray(regressors, dtype=np.float64)
        outputs = np.asarray(outputs, dtype=np.float64).reshape(-1)
        if regressors.ndim == 1:
            regressors = regressors.reshape(-1, 1)
        if regressors.shape[0] != outputs.size:
            raise ShapeError(f"{regressors.shape[0]} regressor rows but {outputs.size} outputs")
        return cls(tuple(Sample(phi, y) for phi, y in zip(regressors, outputs)))

    def __len__(self):
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)

    def __getitem__(self, idx):
        return self.samples[idx]


@dataclass(frozen=True)
class BatchSolution:
    theta_hat: np.ndarray
    residual_cost: float
    rank: int
    used_pseudo_inverse: bool


def check_lambda(lam):
    """Raise :class:`ConfigError` unless ``0 < lam <= 1``."""
    lam = float(lam)
    if not (0.0 < lam <= 1.0):
        raise ConfigError(f"forgetting factor must lie in (0, 1], got {lam}")
    return lam


def assemble(ds):
    """Stack a dataset into ``Phi`` (n x k, column j is ``phi(j-1)``) and ``Y`` (k,)."""
    if not isinstance(ds, Dataset):
        ds = Dataset(ds)
    if len(ds) == 0:
        raise EmptyInputError("dataset is empty")
    phi = np.column_stack([s.regressor for s in ds.samples])
    y = np.array([s.output for s in ds.samples])
    return phi, y


def solve_batch(ds, rcond=None):
    """Batch least-squares estimate ``(Phi Phi^T)^+ Phi Y``.

    When the information matrix ``Phi Phi^T`` has full numerical rank the
    normal equations are solved directly; otherwise the SVD pseudo-inverse
    gives the minimum-norm solution. Either way :attr:`BatchSolution.rank`
    reports the numerical rank.

    Parameters
    ----------
    ds : Dataset
    rcond : float, optional
        Relative singular-value cutoff for the rank decision; defaults to
        ``eps * n``.
    """
    phi, y = assemble(ds)
    info = phi @ phi.T
    rhs = phi @ y
    if rcond is None:
        rcond = default_rcond(info.shape)
    info_pinv, rank = pinv_with_rank(info, rcond)
    n = info.shape[0]
    if rank == n:
        theta = np.linalg.solve(info, rhs)
    else:
        theta = info_pinv @ rhs
    residual = y - phi.T @ theta
    return BatchSolution(
        theta_hat=theta,
        residual_cost=0.5 * float(residual @ residual),
        rank=rank,
        used_pseudo_inverse=rank < n,
    )


def cost(ds, theta, lam=1.0):
    """Half the λ-weighted residual sum of squares.

    Sample j of k (1-based) carries weight ``lam ** (k - j)``; ``lam = 1``
    gives the ordinary least-squares objective.
    """
    lam = check_lambda(lam)
    phi, y = assemble(ds)
    theta = as_vector(theta, "theta")
    if theta.size != phi.shape[0]:
        raise ShapeError(f"theta has dimension {theta.size}, dataset has {phi.shape[0]}")
    k = y.size
    weights = lam ** np.arange(k - 1, -1, -1, dtype=np.float64)
    r = y - phi.T @ theta
    return 0.5 * float(weights @ (r * r))


class StreamingCost:
    """Evaluate :func:`cost` for a stream without storing it.

    Keeps the λ-discounted sufficient statistics ``sum w y^2``,
    ``sum w phi y`` and ``sum w phi phi^T``, i.e. O(n^2) memory regardless
    of the number of samples.
    """

    def __init__(self, dim, lam=1.0):
        self.lam = check_lambda(lam)
        self.yy = 0.0
        self.phi_y = np.zeros(dim)
        self.phi_phi = np.zeros((dim, dim))
        self.count = 0

    def add(self, sample):
        phi, y = sample.regressor, sample.output
        if phi.size != self.phi_y.size:
            raise ShapeError(f"regressor has dimension {phi.size}, expected {self.phi_y.size}")
        lam = self.lam
        self.yy = lam * self.yy + y * y
        self.phi_y = lam * self.phi_y + phi * y
        self.phi_phi = lam * self.phi_phi + np.outer(phi, phi)
        self.count += 1

    def __call__(self, theta):
        theta = as_vector(theta, "theta")
        if theta.size != self.phi_y.size:
            raise ShapeError(f"theta has dimension {theta.size}, expected {self.phi_y.size}")
        value = 0.5 * (self.yy - 2.0 * theta @ self.phi_y + theta @ self.phi_phi @ theta)
        # cancellation can push an exact fit slightly negative
        return max(float(value), 0.0)
