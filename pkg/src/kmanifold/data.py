"""Snapshot containers.

A snapshot set stores high-dimensional state samples column-stacked in an
``N x M`` matrix, optionally with per-column labels (parameter values, time
indices) and the scalar applied when the raw data was scaled at ingestion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import as_matrix


@dataclass(frozen=True, eq=False)
class SnapshotSet:
    """Column-stacked state samples.

    Parameters
    ----------
    states : array, shape (N, M)
        One snapshot per column, M >= 2, all entries finite.
    labels : list or None
        Optional per-column metadata, length M.
    scaling : float or None
        Scalar divisor applied at ingestion, recorded for provenance.
    """

    states: np.ndarray
    labels: list | None = None
    scaling: float | None = None

    def __post_init__(self):
        states = as_matrix(self.states, "states")
        if states.shape[1] < 2:
            raise ValueError(f"a snapshot set needs at least 2 columns, got {states.shape[1]}")
        if self.labels is not None and len(self.labels) != states.shape[1]:
            raise ValueError(
                f"labels length {len(self.labels)} does not match {states.shape[1]} columns"
            )
        object.__setattr__(self, "states", states)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.states.shape[1]


def as_states(data) -> np.ndarray:
    """Return the ``N x M`` state matrix of a SnapshotSet or a plain array."""
    if isinstance(data, SnapshotSet):
        return data.states
    return as_matrix(data, "states")
