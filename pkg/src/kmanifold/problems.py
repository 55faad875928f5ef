"""Desk-scale snapshot generators.

Two parametrized problems produce the benchmark datasets:

* an analytic surface-heating field over a cone-like geometry, evaluated on
  a (z, theta) grid for a grid of two parameters (pitch angle and a
  transition-location parameter), and
* a 2D advection-diffusion-reaction equation on the unit square with a
  sharp boundary layer, discretized by finite differences and integrated
  with implicit Euler over a family of diffusion parameters.

Both generators are deterministic and pure: regenerating with the same
configuration yields bitwise-identical snapshot matrices.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .data import SnapshotSet
from .exceptions import SolverDiverged

# --- analytic surface-heating field ------------------------------------------

#: Parameter domain: pitch angle (degrees) and transition location.
MU1_RANGE_DEG = (-10.0, 10.0)
MU2_RANGE = (0.4, 0.8)


@dataclass(frozen=True)
class SurfaceHeatingConfig:
    """Grid and parameters for one surface-heating snapshot.

    ``mu1`` is the pitch angle in radians (within +-10 degrees), ``mu2`` the
    transition-location parameter in [0.4, 0.8]. The field is evaluated on
    ``nz`` axial points in [0, 2] and ``ntheta`` circumferential points in
    [0, 2*pi], both endpoint-inclusive.
    """

    nz: int = 100
    ntheta: int = 100
    mu1: float = 0.0
    mu2: float = 0.4
    delta: float = 1e-6

    def __post_init__(self):
        if self.nz < 2 or self.ntheta < 2:
            raise ValueError("grids need at least 2 points per direction")
        lo, hi = np.radians(MU1_RANGE_DEG)
        if not (lo <= self.mu1 <= hi):
            raise ValueError(f"mu1 = {self.mu1} rad outside [{lo:.4f}, {hi:.4f}]")
        if not (MU2_RANGE[0] <= self.mu2 <= MU2_RANGE[1]):
            raise ValueError(f"mu2 = {self.mu2} outside {MU2_RANGE}")


def sigmoid_sharp(x):
    """Steep sigmoid ``1 / (1 + exp(-100 x))`` approximating a jump."""
    arg = np.clip(-100.0 * np.asarray(x, dtype=np.float64), -700.0, 700.0)
    return 1.0 / (1.0 + np.exp(arg))


def surface_heating_field(cfg: SurfaceHeatingConfig) -> np.ndarray:
    """Evaluate the heating field on the full grid, flattened z-fastest.

    The field combines a quadratic decay from the nose, a
    parameter-controlled transition front (onset and end), a compression
    jump with reciprocal decay near the aft end, and a constant floor. The
    reciprocal-decay term uses the axial coordinate.
    """
    z = np.linspace(0.0, 2.0, cfg.nz)
    theta = np.linspace(0.0, 2.0 * np.pi, cfg.ntheta)
    zz = z[None, :]
    tt = theta[:, None]

    pitch = 1.0 - 5.0 * np.sin(cfg.mu1) * np.sin(tt)
    field = (
        100.0 * pitch / (1.0 + 20.0 * zz) ** 2
        + 50.0 * sigmoid_sharp(zz - cfg.mu2 * (1.0 + 2.0 * np.sin(cfg.mu1) * np.sin(tt)))
        - 50.0 * sigmoid_sharp(zz - 1.2)
        + 75.0 * sigmoid_sharp(zz - 1.6) * pitch / (cfg.delta + zz)
        + 50.0
    )
    # C-order ravel of the (ntheta, nz) grid: index = i_theta * nz + i_z
    return field.ravel()


def surface_heating_dataset(
    n_mu1=50, n_mu2=50, nz=100, ntheta=100, delta=1e-6
) -> tuple[SnapshotSet, SnapshotSet]:
    """Snapshot matrix over the parameter grid, scaled and split.

    Columns run over the parameter grid with mu2 varying fastest. The raw
    matrix is divided by its global max-min range, then even-indexed
    columns (0-based) become the training set and odd-indexed columns the
    testing set.
    """
    mu1_values = np.radians(np.linspace(*MU1_RANGE_DEG, n_mu1))
    mu2_values = np.linspace(*MU2_RANGE, n_mu2)

    raw = np.empty((nz * ntheta, n_mu1 * n_mu2))
    labels = []
    col = 0
    for mu1 in mu1_values:
        for mu2 in mu2_values:
            cfg = SurfaceHeatingConfig(nz=nz, ntheta=ntheta, mu1=mu1, mu2=mu2, delta=delta)
            raw[:, col] = surface_heating_field(cfg)
            labels.append((float(mu1), float(mu2)))
            col += 1

    span = float(raw.max() - raw.min())
    scaled = raw / span
    train = SnapshotSet(scaled[:, 0::2], labels=labels[0::2], scaling=span)
    test = SnapshotSet(scaled[:, 1::2], labels=labels[1::2], scaling=span)
    return train, test


# --- 2D advection-diffusion-reaction -----------------------------------------


@dataclass(frozen=True)
class AdvDiffConfig:
    """Finite-difference setup for the boundary-layer problem.

    The PDE ``u_t - alpha * Lap(u) + beta . grad(u) + gamma * u = f`` on the
    unit square with homogeneous Dirichlet boundary and zero initial
    condition, discretized on ``n_per_axis`` interior points per axis with
    centered second differences and first-order upwind (backward) first
    differences, then integrated with implicit Euler.
    """

    n_per_axis: int = 64
    alpha: float = 1e-3
    beta: tuple[float, float] = (0.5 * math.cos(math.pi / 3.0), 0.5 * math.sin(math.pi / 3.0))
    gamma: float = 1.0
    forcing: float = 1.0
    t_final: float = 1.0
    dt: float = 0.01

    def __post_init__(self):
        if self.n_per_axis < 2:
            raise ValueError("need at least 2 interior points per axis")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta[0] < 0 or self.beta[1] < 0:
            raise ValueError("the upwind stencil assumes beta >= 0 componentwise")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least one time step")


def advdiff_operator(cfg: AdvDiffConfig) -> scipy.sparse.csr_matrix:
    """System matrix A of the semi-discrete form ``dq/dt = A q + F``.

    Interior unknowns are ordered x-fastest. Centered differences for the
    Laplacian, backward differences for the advection terms (valid for
    nonnegative advection velocities), minus the reaction term on the
    diagonal.
    """
    n = cfg.n_per_axis
    h = 1.0 / (n + 1)
    ones = np.ones(n)
    lap1d = scipy.sparse.diags(
        [ones[:-1], -2.0 * ones, ones[:-1]], offsets=[-1, 0, 1], format="csr"
    ) / h**2
    back1d = scipy.sparse.diags([-ones[:-1], ones], offsets=[-1, 0], format="csr") / h
    eye = scipy.sparse.identity(n, format="csr")

    laplacian = scipy.sparse.kron(eye, lap1d) + scipy.sparse.kron(lap1d, eye)
    d_x = scipy.sparse.kron(eye, back1d)
    d_y = scipy.sparse.kron(back1d, eye)
    reaction = cfg.gamma * scipy.sparse.identity(n * n)
    return (cfg.alpha * laplacian - cfg.beta[0] * d_x - cfg.beta[1] * d_y - reaction).tocsr()


def advdiff_simulate(cfg: AdvDiffConfig) -> SnapshotSet:
    """Integrate from the zero state, returning every step including t=0."""
    n_steps = int(round(cfg.t_final / cfg.dt))
    n_dof = cfg.n_per_axis**2
    a = advdiff_operator(cfg)
    forcing = np.full(n_dof, cfg.forcing)

    stepper = scipy.sparse.linalg.splu(
        (scipy.sparse.identity(n_dof) - cfg.dt * a).tocsc()
    )
    snapshots = np.zeros((n_dof, n_steps + 1))
    state = np.zeros(n_dof)
    labels = [(cfg.alpha, 0)]
    for step in range(1, n_steps + 1):
        state = stepper.solve(state + cfg.dt * forcing)
        if np.linalg.norm(state) > 1e12:
            raise SolverDiverged(f"state norm exceeded 1e12 at step {step}")
        snapshots[:, step] = state
        labels.append((cfg.alpha, step))
    return SnapshotSet(snapshots, labels=labels)


def advdiff_dataset(alphas, cfg: AdvDiffConfig | None = None, workers=None) -> SnapshotSet:
    """Concatenate simulations for each diffusion value, in the given order.

    Column blocks follow the order of ``alphas`` regardless of how the
    independent simulations are scheduled; labels carry (alpha, time index).
    """
    template = cfg if cfg is not None else AdvDiffConfig()
    configs = [replace(template, alpha=float(a)) for a in alphas]
    if workers is not None and workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(advdiff_simulate, configs))
    else:
        blocks = [advdiff_simulate(c) for c in configs]
    states = np.concatenate([b.states for b in blocks], axis=1)
    labels = [label for b in blocks for label in b.labels]
    return SnapshotSet(states, labels=labels)


def logspaced_alphas(count, low=1e-6, high=1e-1):
    """Logarithmically spaced diffusion parameters for the training set."""
    return np.logspace(np.log10(low), np.log10(high), count)
