"""Gaussian compressive sensing: operators, measurements, proxies.

Random draws use ``numpy.random.default_rng`` (PCG64) with the standard
ziggurat normal transform, so a given seed reproduces the same matrix and
noise for a given numpy version.
"""

import struct
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SensingOperator",
    "MeasurementSet",
    "generate_gaussian_operator",
    "measure",
    "proxy_observations",
    "estimate_lipschitz",
    "save_operator",
    "load_operator",
    "save_measurements",
    "load_measurements",
]

OPERATOR_MAGIC = b"TVLSA001"
MEASUREMENT_MAGIC = b"TVLSY001"
_OP_HEADER = struct.Struct("<8sQQq")
_MEAS_HEADER = struct.Struct("<8sQdq")


class SensingOperator:
    """Dense ``k x p`` measurement matrix with a cached Lipschitz constant.

    Solvers only touch ``apply``, ``adjoint`` and ``shape``, so a structured
    operator can replace this class as long as it provides the same three.
    """

    def __init__(self, matrix, seed=None):
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or min(matrix.shape) < 1:
            raise ValueError(f"operator must be a non-empty 2-D matrix, got {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("operator has non-finite entries")
        matrix.flags.writeable = False
        self.matrix = matrix
        self.seed = seed
        self.lipschitz = None
        self.lipschitz_converged = None

    @classmethod
    def identity(cls, p):
        return cls(np.eye(p))

    @property
    def k(self):
        return self.matrix.shape[0]

    @property
    def p(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.p,):
            raise ValueError(f"expected vector of length {self.p}, got shape {x.shape}")
        return self.matrix @ x

    def adjoint(self, y):
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.k,):
            raise ValueError(f"expected vector of length {self.k}, got shape {y.shape}")
        return self.matrix.T @ y

    def __repr__(self):
        return f"SensingOperator(k={self.k}, p={self.p}, seed={self.seed})"


@dataclass(frozen=True)
class MeasurementSet:
    y: np.ndarray
    sigma: float
    seed: int | None = None


def generate_gaussian_operator(k, p, seed):
    """Draw a ``k x p`` matrix with i.i.d. N(0, 1/k) entries."""
    if k < 1 or p < 1:
        raise ValueError(f"k and p must be positive, got k={k}, p={p}")
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((k, p)) / np.sqrt(k)
    return SensingOperator(matrix, seed=seed)


def measure(op, x, sigma, seed):
    """Simulate ``y = A x + n`` with ``n ~ N(0, sigma^2 I)``.

    ``seed`` drives only the noise, so one operator can be reused across
    noise realizations.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    y = op.apply(np.asarray(x, dtype=np.float64).reshape(-1))
    if sigma > 0:
        rng = np.random.default_rng(seed)
        y = y + sigma * rng.standard_normal(op.k)
    return MeasurementSet(y=y, sigma=float(sigma), seed=seed)


def proxy_observations(op, meas):
    """Back-projected data ``z = A^T y``."""
    return op.adjoint(meas.y)


def estimate_lipschitz(op, tol=1e-6, max_iters=1000, seed=0):
    """Largest eigenvalue of ``A^T A`` by power iteration.

    Iterates until the Rayleigh quotient changes by less than ``tol``
    (relative). The value is cached on ``op.lipschitz``; the solver adds its
    own safety margin when turning it into a step size. If ``max_iters`` is
    reached first, the last estimate is returned, ``op.lipschitz_converged``
    is set to False and a ``RuntimeWarning`` is issued.
    """
    if tol <= 0 or max_iters < 1:
        raise ValueError("tol must be > 0 and max_iters >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(op.p)
    v /= np.linalg.norm(v)
    lam = 0.0
    converged = False
    for _ in range(max_iters):
        w = op.adjoint(op.apply(v))
        lam_new = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # a random start only hits the null space when A == 0
            lam, converged = 0.0, True
            break
        v = w / norm_w
        if lam_new > 0 and abs(lam_new - lam) < tol * lam_new:
            lam = lam_new
            converged = True
            break
        lam = lam_new
    if not converged:
        warnings.warn(
            f"power iteration did not converge in {max_iters} iterations",
            RuntimeWarning,
            stacklevel=2,
        )
    op.lipschitz = lam
    op.lipschitz_converged = converged
    return lam


def save_operator(op, path):
    """Binary dump: little-endian header (magic, k, p, seed) + row-major float64."""
    seed = -1 if op.seed is None else int(op.seed)
    with open(path, "wb") as fh:
        fh.write(_OP_HEADER.pack(OPERATOR_MAGIC, op.k, op.p, seed))
        fh.write(np.ascontiguousarray(op.matrix, dtype="<f8").tobytes())


def load_operator(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _OP_HEADER.size:
        raise ValueError(f"{path}: truncated operator header")
    magic, k, p, seed = _OP_HEADER.unpack_from(data)
    if magic != OPERATOR_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    expected = _OP_HEADER.size + 8 * k * p
    if len(data) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(data)}")
    matrix = np.frombuffer(data, dtype="<f8", offset=_OP_HEADER.size).reshape(k, p)
    return SensingOperator(matrix, seed=None if seed == -1 else seed)


def save_measurements(meas, path):
    """Binary dump: header (magic, k, sigma, seed) + float64 observations."""
    seed = -1 if meas.seed is None else int(meas.seed)
    y = np.ascontiguousarray(meas.y, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_MEAS_HEADER.pack(MEASUREMENT_MAGIC, y.size, meas.sigma, seed))
        fh.write(y.tobytes())


def load_measurements(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _MEAS_HEADER.size:
        raise ValueError(f"{path}: truncated measurement header")
    magic, k, sigma, seed = _MEAS_HEADER.unpack_from(data)
    if magic != MEASUREMENT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if len(data) != _MEAS_HEADER.size + 8 * k:
        raise ValueError(f"{path}: payload length does not match k={k}")
    y = np.frombuffer(data, dtype="<f8", offset=_MEAS_HEADER.size).copy()
    return MeasurementSet(y=y, sigma=sigma, seed=None if seed == -1 else seed)
