"""Proper orthogonal decomposition of snapshot data.

Builds the affine encoder/decoder pair from the thin SVD of offset-shifted
snapshots: an offset vector, a reduced basis of the leading ``r`` left
singular vectors, and an augmenting basis of the subsequent ``m`` vectors
whose coefficients a nonlinear correction can later predict.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import as_states
from .exceptions import RankDeficientWarning, ShapeMismatch
from .linalg import thin_svd
from .validation import as_columns, as_vector


def shift_snapshots(data, offset="mean"):
    """Shift snapshots by an offset vector.

    Parameters
    ----------
    data : SnapshotSet or array, shape (N, M)
    offset : {"mean", "zero"} or array of length N
        "mean" subtracts the column mean, "zero" leaves the data unchanged,
        an explicit vector is subtracted as given.

    Returns
    -------
    shifted : array, shape (N, M)
    offset_vector : array, shape (N,)
    """
    states = as_states(data)
    n = states.shape[0]
    if isinstance(offset, str):
        if offset == "mean":
            offset_vector = states.mean(axis=1)
        elif offset == "zero":
            return states, np.zeros(n)
        else:
            raise ValueError(f"unknown offset kind {offset!r}")
    else:
        offset_vector = as_vector(offset, "offset", length=n)
    return states - offset_vector[:, None], offset_vector


@dataclass(frozen=True, eq=False)
class PodBasis:
    """Offset plus orthonormal reduced and augmenting bases.

    ``v`` holds the leading ``r`` modes, ``v_bar`` the subsequent ``m``
    modes; the full singular-value list of the training SVD is retained so
    energy criteria and decay reports need no recomputation.
    """

    offset: np.ndarray
    v: np.ndarray
    v_bar: np.ndarray
    singular_values: np.ndarray

    @property
    def n(self) -> int:
        return self.v.shape[0]

    @property
    def r(self) -> int:
        return self.v.shape[1]

    @property
    def m(self) -> int:
        return self.v_bar.shape[1]

    def encode(self, q):
        """Project onto the reduced modes: ``v.T @ (q - offset)``."""
        cols, was_vector = as_columns(q, self.n, "q")
        out = self.v.T @ (cols - self.offset[:, None])
        return out[:, 0] if was_vector else out

    def project_high(self, q):
        """Project onto the augmenting modes: ``v_bar.T @ (q - offset)``."""
        cols, was_vector = as_columns(q, self.n, "q")
        out = self.v_bar.T @ (cols - self.offset[:, None])
        return out[:, 0] if was_vector else out

    def decode_affine(self, q_hat):
        """Affine reconstruction: ``offset + v @ q_hat``."""
        cols, was_vector = as_columns(q_hat, self.r, "q_hat")
        out = self.offset[:, None] + self.v @ cols
        return out[:, 0] if was_vector else out


@dataclass(frozen=True, eq=False)
class PodDecomposition:
    """Full thin SVD of the shifted snapshots, sliceable into bases.

    Keeping the whole left factor around lets sweeps over (r, m) reuse one
    SVD, which dominates training cost on large snapshot sets.
    """

    offset: np.ndarray
    u: np.ndarray
    singular_values: np.ndarray

    @property
    def rank_bound(self) -> int:
        return self.u.shape[1]

    def basis(self, r, m=0) -> PodBasis:
        """Slice out a PodBasis with ``r`` reduced and ``m`` augmenting modes.

        Modes are sign-normalized so the entry of largest magnitude in each
        column is nonnegative. If the (r+m)-th singular value is exactly
        zero, warns and truncates to the numerical rank.
        """
        if r < 1 or m < 0:
            raise ValueError(f"need r >= 1 and m >= 0, got r={r}, m={m}")
        if r + m > self.rank_bound:
            raise ShapeMismatch(
                f"r + m = {r + m} exceeds the rank bound {self.rank_bound}"
            )
        if self.singular_values[r + m - 1] == 0.0:
            rank = int(np.count_nonzero(self.singular_values > 0.0))
            warnings.warn(
                f"requested r + m = {r + m} modes but the data has numerical "
                f"rank {rank}; truncating",
                RankDeficientWarning,
                stacklevel=2,
            )
            r = min(r, rank)
            m = min(m, rank - r)
        modes = _normalize_signs(self.u[:, : r + m])
        return PodBasis(
            offset=self.offset,
            v=modes[:, :r],
            v_bar=modes[:, r : r + m],
            singular_values=self.singular_values,
        )


def compute_pod(data, offset="mean") -> PodDecomposition:
    """Shift the snapshots and take their thin SVD."""
    shifted, offset_vector = shift_snapshots(data, offset)
    svd = thin_svd(shifted)
    return PodDecomposition(offset_vector, svd.u, svd.singular_values)


def build_pod_basis(data, offset="mean", r=1, m=0) -> PodBasis:
    """One-shot basis construction; see :meth:`PodDecomposition.basis`."""
    return compute_pod(data, offset).basis(r, m)


def energy_criterion(singular_values, nu) -> int:
    """Smallest mode count whose tail energy fraction is at most ``nu``.

    Returns the smallest ``k`` with
    ``1 - sum(s[:k]**2) / sum(s**2) <= nu``.
    """
    if nu < 0:
        raise ValueError(f"criterion unreachable for nu={nu} < 0")
    s = as_vector(singular_values, "singular_values")
    energy = s**2
    total = energy.sum()
    if total <= 0:
        raise ValueError("all singular values are zero")
    tail_fraction = 1.0 - np.cumsum(energy) / total
    tail_fraction[-1] = 0.0  # exact by definition; cumsum rounding can leave +-1 ulp
    return int(np.argmax(tail_fraction <= nu)) + 1


def _normalize_signs(modes):
    """Flip columns so each column's largest-magnitude entry is nonnegative."""
    pivot = np.argmax(np.abs(modes), axis=0)
    signs = np.where(modes[pivot, np.arange(modes.shape[1])] < 0, -1.0, 1.0)
    return modes * signs
