"""Dimensionality-reduction estimators with nonlinear decoder corrections.

All three estimators share the same affine encoder (projection onto leading
POD modes) and differ in how the decoder fills in the coefficients of the
augmenting modes:

* :class:`POD` uses the plain affine decoder (no correction),
* :class:`KernelManifold` predicts them with a regularized kernel
  interpolant fitted on the latent training coordinates,
* :class:`FeatureMapManifold` predicts them with a least-squares optimal
  linear map applied to nonlinear features of the latent coordinates.

The estimators follow scikit-learn conventions: hyperparameters in
``__init__``, learned state in trailing-underscore attributes, and
``fit`` / ``transform`` / ``inverse_transform`` operating on
``(n_samples, n_features)`` arrays. Snapshot matrices in this domain are
conventionally column-stacked, so each estimator also exposes
``fit_snapshots`` / ``encode`` / ``decode`` / ``reconstruct`` working on
``N x M`` column layouts directly.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .data import as_states
from .exceptions import ShapeMismatch, SingularSystem
from .kernels import (
    FeatureMapKernel,
    KernelSpec,
    RbfKernel,
    cross_gram,
    fit_normalizer,
    gram,
    quadratic_feature_map,
    resolve_auto_weight,
)
from .linalg import KERNEL_JITTER, solve_spd
from .pod import PodBasis, PodDecomposition, compute_pod
from .validation import as_columns


class _PodEncoderMixin(TransformerMixin, BaseEstimator):
    """Shared affine encoder plus the decode/reconstruct plumbing."""

    # --- scikit-learn surface (samples are rows) ---

    def fit(self, X, y=None):
        """Fit on ``(n_samples, n_features)`` data; rows are snapshots."""
        X = check_array(X, dtype=np.float64)
        return self.fit_snapshots(X.T)

    def transform(self, X):
        """Encode rows of ``X`` into latent coordinates, ``(n_samples, r)``."""
        check_is_fitted(self, "basis_")
        X = check_array(X, dtype=np.float64)
        return self.encode(X.T).T

    def inverse_transform(self, Z):
        """Decode latent rows back to state space, ``(n_samples, N)``."""
        check_is_fitted(self, "basis_")
        Z = check_array(Z, dtype=np.float64)
        return self.decode(Z.T).T

    # --- column-stacked snapshot surface ---

    def fit_snapshots(self, data):
        """Fit on a SnapshotSet or an ``N x M`` column-stacked matrix."""
        states = as_states(data)
        pod = self.pod if self.pod is not None else compute_pod(states, self.offset)
        if not isinstance(pod, PodDecomposition):
            raise TypeError("pod must be a PodDecomposition")
        self._fit_from_pod(pod, states)
        self.n_features_in_ = states.shape[0]
        return self

    def encode(self, q):
        """Latent coordinates of a state vector or ``N x k`` column matrix."""
        check_is_fitted(self, "basis_")
        return self.basis_.encode(q)

    def decode(self, q_hat):
        """Reconstruct states from latent coordinates (vector or columns).

        The decoder is the affine map plus the augmenting basis applied to
        the nonlinear term; the affine part is computed exactly as in
        :meth:`PodBasis.decode_affine`.
        """
        check_is_fitted(self, "basis_")
        cols, was_vector = as_columns(q_hat, self.basis_.r, "q_hat")
        out = self.basis_.decode_affine(cols)
        correction = self._nonlinear_cols(cols)
        if correction.shape[0]:
            out = out + self.basis_.v_bar @ correction
        return out[:, 0] if was_vector else out

    def reconstruct(self, q):
        """``decode(encode(q))`` for a vector or column-stacked matrix."""
        check_is_fitted(self, "basis_")
        return self.decode(self.encode(q))

    def nonlinear_term(self, q_hat):
        """Predicted augmenting-mode coefficients (vector or columns)."""
        check_is_fitted(self, "basis_")
        cols, was_vector = as_columns(q_hat, self.basis_.r, "q_hat")
        out = self._nonlinear_cols(cols)
        return out[:, 0] if was_vector else out

    # --- hooks ---

    def _fit_from_pod(self, pod, states):
        raise NotImplementedError

    def _nonlinear_cols(self, q_hat_cols):
        raise NotImplementedError

    def _latent_training_data(self, pod, states):
        basis = pod.basis(self.r, self.m)
        shifted = states - basis.offset[:, None]
        return basis, basis.v.T @ shifted, basis.v_bar.T @ shifted


class POD(_PodEncoderMixin):
    """Affine encoder/decoder on the leading ``r`` POD modes.

    Parameters
    ----------
    r : int
        Latent dimension (number of retained modes).
    offset : {"mean", "zero"} or array
        Offset vector choice; "mean" subtracts the snapshot mean.
    pod : PodDecomposition or None
        Precomputed decomposition to slice instead of running a fresh SVD.

    Attributes
    ----------
    basis_ : PodBasis
        Fitted offset and mode matrices (no augmenting modes, m = 0).
    """

    method_name = "pod"

    def __init__(self, r=2, offset="mean", pod=None):
        self.r = r
        self.offset = offset
        self.pod = pod

    @property
    def m(self):
        return 0

    @property
    def regularization(self):
        return 0.0

    def _fit_from_pod(self, pod, states):
        self.basis_ = pod.basis(self.r, 0)

    def _nonlinear_cols(self, q_hat_cols):
        return np.zeros((0, q_hat_cols.shape[1]))


class KernelManifold(_PodEncoderMixin):
    """POD decoder augmented with a regularized kernel interpolant.

    The interpolant maps the leading-mode coefficients of a snapshot to the
    coefficients of the next ``m`` modes. Its coefficient matrix solves
    ``(K + regularization * I) C = P.T`` where ``K`` is the kernel matrix
    over the latent training coordinates and ``P`` stacks the augmenting
    coefficients; predictions are ``C.T @ k(X_train, query)``.

    Parameters
    ----------
    r : int
        Latent dimension.
    m : int
        Number of augmenting modes predicted by the correction.
    kernel : RbfKernel, PolynomialKernel, FeatureMapKernel or KernelSpec
        Kernel over latent space. Defaults to a Gaussian with shape 1.
    regularization : float
        Ridge parameter added to the kernel matrix diagonal (not scaled
        by the number of snapshots).
    normalize_inputs : bool
        Fit a componentwise [0, 1] normalizer on the latent training
        coordinates and evaluate the kernel on normalized inputs.
    offset : {"mean", "zero"} or array
    pod : PodDecomposition or None
        Precomputed decomposition to reuse.

    Attributes
    ----------
    basis_ : PodBasis
    kernel_ : KernelSpec
        Kernel actually used, including the fitted normalizer and any
        pinned "auto" feature-map weight.
    coefficients_ : array, shape (M, m)
        Interpolant coefficient matrix.
    train_inputs_ : array, shape (r, M)
        Latent training coordinates, stored already normalized.
    """

    method_name = "kernel"

    def __init__(
        self,
        r=2,
        m=2,
        kernel=None,
        regularization=0.0,
        normalize_inputs=False,
        offset="mean",
        pod=None,
    ):
        self.r = r
        self.m = m
        self.kernel = kernel
        self.regularization = regularization
        self.normalize_inputs = normalize_inputs
        self.offset = offset
        self.pod = pod

    def _fit_from_pod(self, pod, states):
        if self.m < 1:
            raise ValueError(f"need m >= 1 augmenting modes, got {self.m}")
        if self.regularization < 0:
            raise ValueError(f"regularization must be >= 0, got {self.regularization}")
        basis, q_hat, p_hat = self._latent_training_data(pod, states)

        base = self.kernel if self.kernel is not None else RbfKernel("gaussian", 1.0)
        spec = base if isinstance(base, KernelSpec) else KernelSpec(base=base)
        if self.normalize_inputs:
            spec = KernelSpec(base=spec.base, normalizer=fit_normalizer(q_hat))
        spec = resolve_auto_weight(spec)

        train_inputs = spec.map_inputs(q_hat)
        if self.regularization == 0.0 and _has_duplicate_columns(train_inputs):
            raise SingularSystem(
                "duplicate latent training inputs with regularization 0; the "
                "kernel system is singular"
            )
        k = gram(spec.base, train_inputs)
        k[np.diag_indices_from(k)] += self.regularization
        coefficients = solve_spd(k, p_hat.T, jitter=KERNEL_JITTER)

        self.basis_ = basis
        self.kernel_ = spec
        self.train_inputs_ = train_inputs
        self.coefficients_ = coefficients

    def _nonlinear_cols(self, q_hat_cols):
        mapped = self.kernel_.map_inputs(q_hat_cols)
        k = cross_gram(self.kernel_.base, self.train_inputs_, mapped)
        return self.coefficients_.T @ k


class FeatureMapManifold(_PodEncoderMixin):
    """POD decoder augmented with a linear map of quadratic latent features.

    The coefficient matrix solves the ridge normal equations
    ``(F F.T + regularization * I) C.T = F P.T`` with ``F`` the
    column-stacked features of the latent training coordinates. The
    resulting decoder is a quadratic manifold.

    Parameters
    ----------
    r, m, regularization, offset, pod : as in :class:`KernelManifold`.
    feature_map : str
        Only "quadratic" (duplicate-free) is available.

    Attributes
    ----------
    basis_ : PodBasis
    coefficients_ : array, shape (m, n_features)
        Fitted linear map applied to the feature vector.
    """

    method_name = "fm-qm"

    def __init__(self, r=2, m=2, feature_map="quadratic", regularization=0.0, offset="mean", pod=None):
        self.r = r
        self.m = m
        self.feature_map = feature_map
        self.regularization = regularization
        self.offset = offset
        self.pod = pod

    def _fit_from_pod(self, pod, states):
        if self.m < 1:
            raise ValueError(f"need m >= 1 augmenting modes, got {self.m}")
        if self.regularization < 0:
            raise ValueError(f"regularization must be >= 0, got {self.regularization}")
        if self.feature_map != "quadratic":
            raise ValueError(f"unknown feature map {self.feature_map!r}")
        basis, q_hat, p_hat = self._latent_training_data(pod, states)

        features = quadratic_feature_map(q_hat)
        normal_matrix = features @ features.T
        normal_matrix[np.diag_indices_from(normal_matrix)] += self.regularization
        # fail policy: a singular normal system is a configuration error here
        coefficients_t = solve_spd(normal_matrix, features @ p_hat.T, jitter=None)

        self.basis_ = basis
        self.coefficients_ = coefficients_t.T

    def _nonlinear_cols(self, q_hat_cols):
        return self.coefficients_ @ quadratic_feature_map(q_hat_cols)


def _has_duplicate_columns(x) -> bool:
    if x.shape[1] < 2:
        return False
    order = np.lexsort(x[::-1])
    ordered = x[:, order]
    return bool(np.any(np.all(ordered[:, 1:] == ordered[:, :-1], axis=0)))


#: Estimator classes keyed by their CLI method name.
METHODS = {cls.method_name: cls for cls in (POD, KernelManifold, FeatureMapManifold)}
