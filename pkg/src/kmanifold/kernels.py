"""Positive-definite kernels and Gram-matrix assembly.

Three kernel families are provided:

* radial basis functions ``K(x, y) = psi(epsilon * ||x - y||_2)`` for a
  small zoo of profile functions ``psi``,
* the polynomial kernel ``K(x, y) = (c + rho * x.T y)**ell``,
* feature-map kernels ``K(x, y) = phi(x).T G phi(y)`` for a strictly
  positive-definite weight ``G``, including the duplicate-free quadratic
  feature map.

Any kernel can be wrapped in an input normalizer that maps each input
component to [0, 1] on the training data; the wrapped function is again a
positive-definite kernel.

All pairwise assembly goes through one accumulation routine so that a Gram
matrix, a kernel vector, and a single evaluation of the same kernel on the
same points agree bitwise. Accumulation runs in a fixed order over the
small input dimension and every per-pair term commutes bitwise under
argument swap, which makes evaluation exactly symmetric without having to
canonicalize argument order. Radial kernels accumulate squared differences
directly (never the expanded inner-product form), so coincident points give
a squared distance of exactly zero and the Gram diagonal is exactly psi(0).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import ShapeMismatch, UnknownKernel
from .validation import as_matrix, as_vector

# --- RBF profile functions ---------------------------------------------------
# r below is the already-scaled distance epsilon * ||x - x'||.


def _psi_gaussian(r):
    return np.exp(-(r**2))


def _psi_matern_basic(r):
    return np.exp(-r)


def _psi_matern_linear(r):
    return (1.0 + r) * np.exp(-r)


def _psi_matern_quadratic(r):
    return (3.0 + 3.0 * r + r**2) * np.exp(-r)


def _psi_inverse_quadratic(r):
    return 1.0 / (1.0 + r**2)


def _psi_inverse_multiquadric(r):
    return 1.0 / np.sqrt(1.0 + r**2)


def _psi_thin_plate_spline(r):
    # r^2 log(r), with the limit value 0 at r = 0. Only conditionally
    # positive definite: pair with regularization > 0.
    r = np.asarray(r, dtype=np.float64)
    safe = np.where(r > 0.0, r, 1.0)
    return np.where(r > 0.0, r**2 * np.log(safe), 0.0)


RBF_FAMILIES = {
    "gaussian": _psi_gaussian,
    "matern_basic": _psi_matern_basic,
    "matern_linear": _psi_matern_linear,
    "matern_quadratic": _psi_matern_quadratic,
    "inverse_quadratic": _psi_inverse_quadratic,
    "inverse_multiquadric": _psi_inverse_multiquadric,
    "thin_plate_spline": _psi_thin_plate_spline,
}

#: RBF kernels that are strictly positive definite (thin-plate spline is
#: only conditionally PD and needs regularization).
STRICTLY_PD_RBF = tuple(k for k in RBF_FAMILIES if k != "thin_plate_spline")


def rbf_psi(kind, r):
    """Evaluate the profile function of an RBF family at scaled distance r."""
    try:
        psi = RBF_FAMILIES[kind]
    except KeyError:
        raise UnknownKernel(f"unknown RBF family {kind!r}") from None
    return psi(r)


# --- kernel descriptions -----------------------------------------------------


@dataclass(frozen=True)
class RbfKernel:
    """Radial kernel ``psi(epsilon * ||x - y||_2)``."""

    kind: str = "gaussian"
    epsilon: float = 1.0

    def __post_init__(self):
        if self.kind not in RBF_FAMILIES:
            raise UnknownKernel(f"unknown RBF family {self.kind!r}")
        if not self.epsilon > 0:
            raise ValueError(f"shape parameter must be positive, got {self.epsilon}")


@dataclass(frozen=True)
class PolynomialKernel:
    """Polynomial kernel ``(c + rho * x.T y)**ell``.

    ``rho=None`` binds the typical value 1/d from the input dimension at
    evaluation time (training and decoding always see the same latent
    dimension, so the bound value is consistent).
    """

    c: float = 1.0
    rho: float | None = None
    ell: int = 2

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"c must be >= 0, got {self.c}")
        if self.rho is not None and not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not (isinstance(self.ell, (int, np.integer)) and self.ell >= 1):
            raise ValueError(f"ell must be a positive integer, got {self.ell!r}")


@dataclass(frozen=True, eq=False)
class FeatureMapKernel:
    """Kernel induced by a feature map: ``phi(x).T G phi(y)``.

    ``weight`` is "identity", "scaled_identity" (G = I / n_phi), "auto"
    (identity without input normalization, scaled_identity with it), or an
    explicit strictly positive definite matrix.
    """

    feature_map: str = "quadratic"
    weight: object = "auto"

    def __post_init__(self):
        if self.feature_map != "quadratic":
            raise UnknownKernel(f"unknown feature map {self.feature_map!r}")
        if isinstance(self.weight, str):
            if self.weight not in ("identity", "scaled_identity", "auto"):
                raise ValueError(f"unknown weight {self.weight!r}")
        else:
            w = as_matrix(self.weight, "weight")
            if w.shape[0] != w.shape[1]:
                raise ShapeMismatch(f"weight must be square, got {w.shape}")
            object.__setattr__(self, "weight", w)


@dataclass(frozen=True, eq=False)
class Normalizer:
    """Componentwise affine map ``x -> (x - shift) / scale``.

    Fitted on training inputs so every training component lands in [0, 1].
    """

    scale: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        scale = as_vector(self.scale, "scale")
        shift = as_vector(self.shift, "shift", length=scale.shape[0])
        if np.any(scale <= 0):
            raise ValueError("all scale components must be positive")
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "shift", shift)

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            return (x - self.shift) / self.scale
        return (x - self.shift[:, None]) / self.scale[:, None]


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A base kernel optionally composed with an input normalizer."""

    base: object
    normalizer: Normalizer | None = None

    def map_inputs(self, x):
        return x if self.normalizer is None else self.normalizer(x)


def fit_normalizer(inputs) -> Normalizer:
    """Fit per-component range normalization on ``d x M`` training inputs.

    Components with zero range (constant across the data) get scale 1 so
    the map stays well defined.
    """
    x = as_matrix(inputs, "inputs")
    lo = x.min(axis=1)
    span = x.max(axis=1) - lo
    span[span == 0.0] = 1.0
    return Normalizer(scale=span, shift=lo)


# --- feature maps ------------------------------------------------------------


def quadratic_feature_map(q):
    """Duplicate-free quadratic features of a vector or of matrix columns.

    Ordering: [q1^2, q2*q1, q2^2, q3*q1, q3*q2, q3^2, ...]; output length is
    n(n+1)/2 for input length n.
    """
    q = np.asarray(q, dtype=np.float64)
    vector = q.ndim == 1
    cols = q[:, None] if vector else q
    i_idx, j_idx = _quadratic_index_pairs(cols.shape[0])
    features = cols[i_idx, :] * cols[j_idx, :]
    return features[:, 0] if vector else features


def quadratic_feature_count(n: int) -> int:
    return n * (n + 1) // 2


def _quadratic_index_pairs(n):
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    i_idx = np.array([p[0] for p in pairs], dtype=np.intp)
    j_idx = np.array([p[1] for p in pairs], dtype=np.intp)
    return i_idx, j_idx


# --- pairwise assembly -------------------------------------------------------


def kernel_eval(kernel, x, y) -> float:
    """Evaluate ``K(x, y)`` for two points.

    Exactly symmetric: swapping the arguments gives a bitwise-identical
    result.
    """
    spec = _as_spec(kernel)
    x = as_vector(x, "x")
    y = as_vector(y, "y", length=x.shape[0])
    xn = spec.map_inputs(x)[:, None]
    yn = spec.map_inputs(y)[:, None]
    return float(_cross_kernel(_resolved_base(spec), xn, yn)[0, 0])


def gram(kernel, x) -> np.ndarray:
    """Kernel matrix over the columns of ``x`` (shape d x n).

    The upper triangle is mirrored, so the result is exactly symmetric
    regardless of floating-point evaluation order; for radial kernels the
    diagonal is exactly ``psi(0)``.
    """
    spec = _as_spec(kernel)
    xn = spec.map_inputs(as_matrix(x, "x"))
    g = _cross_kernel(_resolved_base(spec), xn, xn)
    upper = np.triu(g)
    return upper + np.triu(g, 1).T


def kernel_vector(kernel, x, query) -> np.ndarray:
    """Vector of kernel values between each column of ``x`` and ``query``."""
    spec = _as_spec(kernel)
    x = as_matrix(x, "x")
    query = as_vector(query, "query", length=x.shape[0])
    xn = spec.map_inputs(x)
    qn = spec.map_inputs(query)[:, None]
    return _cross_kernel(_resolved_base(spec), xn, qn)[:, 0]


def cross_gram(kernel, x, y) -> np.ndarray:
    """Rectangular kernel matrix between columns of ``x`` and of ``y``."""
    spec = _as_spec(kernel)
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if y.shape[0] != x.shape[0]:
        raise ShapeMismatch(f"inputs have dimensions {x.shape[0]} and {y.shape[0]}")
    return _cross_kernel(_resolved_base(spec), spec.map_inputs(x), spec.map_inputs(y))


def resolve_auto_weight(kernel) -> KernelSpec:
    """Pin an "auto" feature-map weight based on whether inputs are normalized.

    "auto" becomes "scaled_identity" when the spec carries a normalizer and
    "identity" otherwise. Other kernels pass through unchanged.
    """
    spec = _as_spec(kernel)
    base = spec.base
    if isinstance(base, FeatureMapKernel) and base.weight == "auto":
        weight = "identity" if spec.normalizer is None else "scaled_identity"
        spec = replace(spec, base=replace(base, weight=weight))
    return spec


def _as_spec(kernel) -> KernelSpec:
    if isinstance(kernel, KernelSpec):
        return kernel
    if isinstance(kernel, (RbfKernel, PolynomialKernel, FeatureMapKernel)):
        return KernelSpec(base=kernel)
    raise UnknownKernel(f"not a kernel description: {kernel!r}")


def _resolved_base(spec: KernelSpec):
    return resolve_auto_weight(spec).base


def _accumulate_products(x, y):
    # sum_k x[k, i] * y[k, j], accumulated in fixed order over k
    acc = np.zeros((x.shape[1], y.shape[1]))
    for k in range(x.shape[0]):
        acc += x[k][:, None] * y[k][None, :]
    return acc


def _accumulate_square_distances(x, y):
    # sum_k (x[k, i] - y[k, j])**2; identical points give exactly zero
    acc = np.zeros((x.shape[1], y.shape[1]))
    for k in range(x.shape[0]):
        acc += (x[k][:, None] - y[k][None, :]) ** 2
    return acc


def _cross_kernel(base, x, y):
    if x.shape[0] != y.shape[0]:
        raise ShapeMismatch(f"inputs have dimensions {x.shape[0]} and {y.shape[0]}")
    if isinstance(base, RbfKernel):
        sq = _accumulate_square_distances(x, y)
        return rbf_psi(base.kind, base.epsilon * np.sqrt(sq))
    if isinstance(base, PolynomialKernel):
        rho = base.rho if base.rho is not None else 1.0 / x.shape[0]
        return (base.c + rho * _accumulate_products(x, y)) ** base.ell
    if isinstance(base, FeatureMapKernel):
        return _accumulate_products(_weighted_features(base, x), _weighted_features(base, y))
    raise UnknownKernel(f"not a kernel description: {base!r}")


def _weighted_features(base, x):
    features = quadratic_feature_map(x)
    weight = base.weight
    if isinstance(weight, str):
        if weight in ("identity", "auto"):
            return features
        return features / np.sqrt(features.shape[0])
    # explicit G: apply a Cholesky factor so the pair term stays a plain
    # product (keeps evaluation exactly symmetric)
    factor = np.linalg.cholesky(weight)
    return factor.T @ features
