"""Batch and recursive linear least-squares estimation.

>>> import numpy as np
>>> from lsekit import Dataset, solve_batch, ForgettingConfig, run
>>> ds = Dataset.from_arrays([[1.0], [2.0]], [2.0, 4.0])
>>> solve_batch(ds).theta_hat
array([2.])
"""

from .batch import BatchSolution, Dataset, Sample, StreamingCost, assemble, cost, solve_batch
from .errors import (
    ConfigError,
    DataError,
    DegeneracyError,
    EmptyInputError,
    LSEError,
    NumericalError,
    ShapeError,
    SingularMatrixError,
    SingularUpdateError,
)
from .linalg import pseudo_inverse, sherman_morrison_update, symmetrize, woodbury_inverse
from .recursive import (
    EstimatorState,
    ForgettingConfig,
    StepRecord,
    gain_trace,
    init,
    iter_run,
    predict,
    run,
    step,
)
from .simulate import GeneratedStream, ScenarioSpec, generate

__version__ = "0.1.0"
