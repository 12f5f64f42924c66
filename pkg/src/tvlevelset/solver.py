"""Box-constrained TV minimization by FISTA.

Solves ``min 0.5 * ||A z - y||^2 + alpha * TV(Z)`` subject to
``lower <= z_i <= upper``. Each iteration takes a gradient step on the data
term, applies the TV prox with multiplier ``alpha * rho``, then clamps to the
box. The two nonsmooth pieces are handled one after the other, not by a
joint prox.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import LevelSpec, reshape_to_image
from .sensing import estimate_lipschitz
from .tv import TvFlavor, tv_norm, tv_prox

__all__ = [
    "LIPSCHITZ_SAFETY",
    "SolverConfig",
    "SolverState",
    "SolverResult",
    "NumericalFailure",
    "gradient_step",
    "project_box",
    "momentum_update",
    "fixed_point_map",
    "objective",
    "solve",
]

# step size is 1 / (LIPSCHITZ_SAFETY * L); overestimating L is safe, underestimating is not
LIPSCHITZ_SAFETY = 1.001


class NumericalFailure(ArithmeticError):
    """Raised when an iterate stops being finite."""

    def __init__(self, iteration, message):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    alpha: float
    level: LevelSpec
    max_iters: int = 500
    rel_tol: float = 1e-4
    inner_iters: int = 50
    inner_tol: float = 1e-5
    flavor: TvFlavor = TvFlavor.ISOTROPIC

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        object.__setattr__(self, "flavor", TvFlavor.parse(self.flavor))


@dataclass
class SolverState:
    x_current: np.ndarray
    x_previous: np.ndarray
    r: np.ndarray
    t: float
    rho: float
    iter: int = 0


@dataclass
class SolverResult:
    estimate: np.ndarray
    iterations: int
    objective_trace: np.ndarray
    converged: bool
    final_rel_change: float
    rho: float = field(default=float("nan"))


def gradient_step(op, y, r, rho):
    """``r - rho * A^T (A r - y)``."""
    return r - rho * op.adjoint(op.apply(r) - y)


def project_box(v, lower, upper):
    if not lower < upper:
        raise ValueError(f"lower ({lower}) must be < upper ({upper})")
    return np.clip(v, lower, upper)


def momentum_update(t):
    return 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))


def objective(op, y, x, alpha, shape, flavor=TvFlavor.ISOTROPIC):
    """``0.5 * ||A x - y||^2 + alpha * TV(X)``; the box indicator is omitted."""
    resid = op.apply(x) - y
    return 0.5 * float(resid @ resid) + alpha * tv_norm(x.reshape(shape), flavor)


def fixed_point_map(op, y, x, cfg, rho, shape):
    """One FISTA step without momentum: box(prox(x - rho * grad f(x)))."""
    xg = reshape_to_image(gradient_step(op, y, x, rho), *shape)
    xk = tv_prox(xg, cfg.alpha * rho, cfg.flavor, cfg.inner_iters, cfg.inner_tol)
    return project_box(xk.reshape(-1), cfg.level.lower, cfg.level.upper)


def solve(op, meas, cfg, shape=None):
    """Run FISTA from ``x^0 = r^1 = 0``, ``t^1 = 1``.

    Parameters
    ----------
    op : SensingOperator
        Its cached ``lipschitz`` value is used when present, otherwise it is
        estimated here.
    meas : MeasurementSet or array
        Observations ``y``.
    cfg : SolverConfig
    shape : (int, int), optional
        Image shape ``(m, n)`` with ``m * n == op.p``; a square image is
        assumed when omitted.

    Returns
    -------
    SolverResult
        ``estimate`` is the last box-projected iterate as an ``m x n`` image.
        Iteration stops when ``||x^k - x^{k-1}|| / max(1, ||x^{k-1}||)`` drops
        below ``cfg.rel_tol`` or after ``cfg.max_iters`` iterations.
    """
    y = np.asarray(getattr(meas, "y", meas), dtype=np.float64)
    if shape is None:
        side = int(round(np.sqrt(op.p)))
        shape = (side, side)
    m, n = shape
    if m * n != op.p:
        raise ValueError(f"shape {shape} does not match operator dimension p={op.p}")
    if y.shape != (op.k,):
        raise ValueError(f"expected {op.k} observations, got shape {y.shape}")

    lip = op.lipschitz if op.lipschitz is not None else estimate_lipschitz(op)
    if lip <= 0:
        # A == 0: any feasible point is optimal for the data term
        lip = 1.0
    lower, upper = cfg.level.lower, cfg.level.upper
    state = SolverState(
        x_current=np.zeros(op.p),
        x_previous=np.zeros(op.p),
        r=np.zeros(op.p),
        t=1.0,
        rho=1.0 / (LIPSCHITZ_SAFETY * lip),
    )
    weight = cfg.alpha * state.rho
    trace = []
    rel_change = np.inf
    converged = False

    while state.iter < cfg.max_iters:
        state.iter += 1
        xg = reshape_to_image(gradient_step(op, y, state.r, state.rho), m, n)
        xk = tv_prox(xg, weight, cfg.flavor, cfg.inner_iters, cfg.inner_tol)
        x_new = project_box(xk.reshape(-1), lower, upper)
        if not np.all(np.isfinite(x_new)):
            raise NumericalFailure(state.iter, "non-finite iterate")
        assert x_new.min() >= lower and x_new.max() <= upper

        t_next = momentum_update(state.t)
        state.x_previous, state.x_current = state.x_current, x_new
        state.r = x_new + ((state.t - 1.0) / t_next) * (x_new - state.x_previous)
        state.t = t_next

        obj = objective(op, y, x_new, cfg.alpha, shape, cfg.flavor)
        if not np.isfinite(obj):
            raise NumericalFailure(state.iter, "non-finite objective")
        trace.append(obj)

        rel_change = np.linalg.norm(x_new - state.x_previous) / max(
            1.0, np.linalg.norm(state.x_previous)
        )
        if rel_change < cfg.rel_tol:
            converged = True
            break

    return SolverResult(
        estimate=reshape_to_image(state.x_current, m, n),
        iterations=state.iter,
        objective_trace=np.asarray(trace),
        converged=converged,
        final_rel_change=float(rel_change),
        rho=state.rho,
    )
