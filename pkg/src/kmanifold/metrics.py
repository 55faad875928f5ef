"""Projection-error metrics and training-time capture.

Three relative error metrics over a set of snapshots, each comparing the
truth columns against their encode/decode round trip through a fitted
manifold:

* ``rel_l2_trajectory`` - one relative l2 error over the whole trajectory,
* ``mean_rel_l2`` - mean of per-snapshot relative l2 errors,
* ``rel_l1_max`` - ratio of the worst l1 error to the worst l1 norm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import as_states
from .exceptions import ZeroDenominator


@dataclass(frozen=True)
class ErrorReport:
    """A metric value plus optional per-snapshot relative errors."""

    metric: str
    value: float
    per_snapshot: list[float] | None = None

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < 0:
            raise ValueError(f"metric value must be finite and >= 0, got {self.value}")


def rel_l2_trajectory(truth, manifold) -> float:
    """Relative l2 projection error of the whole snapshot trajectory.

    ``sqrt(sum_j ||q_j - g(h(q_j))||^2 / sum_j ||q_j||^2)``
    """
    states = as_states(truth)
    denom = float(np.sum(states**2))
    if denom == 0.0:
        raise ZeroDenominator("all truth snapshots are zero")
    residual = states - manifold.reconstruct(states)
    return float(np.sqrt(np.sum(residual**2) / denom))


def mean_rel_l2(truth, manifold) -> float:
    """Mean over snapshots of the per-snapshot relative l2 error."""
    return float(np.mean(_per_snapshot_rel_l2(truth, manifold)))


def rel_l1_max(truth, manifold) -> float:
    """Worst-case l1 error over snapshots, relative to the worst l1 norm.

    ``max_j ||q_j - g(h(q_j))||_1 / max_j ||q_j||_1``
    """
    states = as_states(truth)
    norms = np.abs(states).sum(axis=0)
    denom = float(norms.max())
    if denom == 0.0:
        raise ZeroDenominator("all truth snapshots are zero")
    residual = states - manifold.reconstruct(states)
    return float(np.abs(residual).sum(axis=0).max() / denom)


METRICS = {
    "rel_l2_trajectory": rel_l2_trajectory,
    "mean_rel_l2": mean_rel_l2,
    "rel_l1_max": rel_l1_max,
}


def evaluate(metric, truth, manifold, per_snapshot=False) -> ErrorReport:
    """Evaluate a metric by name, optionally retaining per-snapshot errors."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    value = METRICS[metric](truth, manifold)
    per = None
    if per_snapshot:
        per = [float(v) for v in _per_snapshot_rel_l2(truth, manifold)]
    return ErrorReport(metric=metric, value=value, per_snapshot=per)


def timed_fit(manifold, data):
    """Fit a manifold on column-stacked data, returning the wall time.

    The clock covers the entire training call, including the SVD.
    """
    start = time.perf_counter()
    manifold.fit_snapshots(data)
    return manifold, time.perf_counter() - start


def _per_snapshot_rel_l2(truth, manifold):
    states = as_states(truth)
    norms = np.sqrt(np.sum(states**2, axis=0))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroDenominator(f"truth snapshot in column {zero[0]} is zero")
    residual = states - manifold.reconstruct(states)
    return np.sqrt(np.sum(residual**2, axis=0)) / norms
