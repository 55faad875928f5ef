"""Dense linear-algebra core: thin SVD and symmetric positive-definite solves.

Everything else in the package reduces to these two operations, so they are
kept deliberately small and deterministic: no randomized algorithms, no
iterative refinement, and a fixed jitter-escalation schedule for nearly
singular symmetric systems.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceFailure, ShapeMismatch, SingularSystem
from .validation import as_matrix, check_square, check_symmetric


class ThinSvd(NamedTuple):
    """Economy SVD ``a = u @ diag(singular_values) @ vt``.

    ``u`` is N x k with orthonormal columns, ``vt`` is k x M with orthonormal
    rows, and ``singular_values`` is nonincreasing with k = min(N, M).
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray


def thin_svd(a) -> ThinSvd:
    """Deterministic economy-size singular value decomposition.

    Raises
    ------
    ConvergenceFailure
        If the underlying LAPACK iteration does not converge.
    """
    a = as_matrix(a, "a")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"SVD did not converge: {exc}") from exc
    return ThinSvd(u, s, vt)


#: Default jitter magnitude for kernel systems, where a regularization of
#: zero can leave the Gram matrix numerically singular.
KERNEL_JITTER = 1e-14

_MAX_JITTER_ESCALATIONS = 3


def solve_spd(a, b, jitter=None):
    """Solve ``a @ x = b`` for symmetric positive (semi)definite ``a``.

    Uses a Cholesky factorization. If ``jitter`` is None the solve fails hard
    on a non-factorizable matrix. Otherwise, on failure the solve retries
    with ``a + delta * I`` where ``delta = jitter * trace(a) / n``,
    escalating ``delta`` by 10x at most 3 times.

    Parameters
    ----------
    a : array, shape (n, n)
        Symmetric PSD matrix (symmetry checked to 1e-12 relative).
    b : array, shape (n,) or (n, k)
        Right-hand side(s).
    jitter : float or None
        None for the fail policy, or the relative jitter magnitude.

    Raises
    ------
    SingularSystem
        If factorization fails under the fail policy, or after all
        jitter escalations.
    ShapeMismatch
        If ``a`` is not square or ``b`` has the wrong row count.
    """
    a = as_matrix(a, "a")
    check_square(a, "a")
    check_symmetric(a, "a")
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != a.shape[0]:
        raise ShapeMismatch(f"b has {b.shape[0]} rows, expected {a.shape[0]}")

    try:
        return _cho_solve(a, b)
    except np.linalg.LinAlgError:
        pass
    if jitter is None:
        raise SingularSystem("Cholesky factorization failed and jitter is disabled")

    n = a.shape[0]
    delta = jitter * np.trace(a) / n
    for _ in range(_MAX_JITTER_ESCALATIONS + 1):
        try:
            return _cho_solve(a + delta * np.eye(n), b)
        except np.linalg.LinAlgError:
            delta *= 10.0
    raise SingularSystem(
        f"Cholesky factorization failed after jitter escalation up to {delta / 10.0:g}"
    )


def _cho_solve(a, b):
    # scipy reuses numpy's LinAlgError, so callers catch only that
    c, low = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    return scipy.linalg.cho_solve((c, low), b, check_finite=False)
