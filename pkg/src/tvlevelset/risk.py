"""Risk functionals for level-set estimates and the thresholding baselines."""

from dataclasses import dataclass, field

import numpy as np

from .core import extract_level_set, symmetric_difference

__all__ = [
    "RiskReport",
    "excess_risk",
    "empirical_risk",
    "threshold_baseline",
    "evaluate",
]


@dataclass(frozen=True)
class RiskReport:
    excess_risk: float
    empirical_risk: float
    sym_diff_size: int
    method_label: str
    params: dict = field(default_factory=dict)


def _check_shapes(a, b):
    if np.shape(a) != np.shape(b):
        raise ValueError(f"shape mismatch: {np.shape(a)} vs {np.shape(b)}")


def excess_risk(truth, gamma, estimate_mask):
    """Mean of ``|gamma - x_i|`` over pixels misclassified by ``estimate_mask``.

    The sum runs over the symmetric difference with the true level set and
    is divided by the total pixel count.
    """
    truth = np.asarray(truth, dtype=np.float64)
    _check_shapes(truth, estimate_mask)
    wrong = symmetric_difference(extract_level_set(truth, gamma), estimate_mask)
    return float(np.abs(gamma - truth[wrong]).sum() / truth.size)


def empirical_risk(observations, gamma, mask):
    """``(1/p) * sum_i (gamma - y_i) * (+1 if i in S else -1)``."""
    obs = np.asarray(observations, dtype=np.float64)
    mask = np.asarray(mask, dtype=bool)
    if obs.size != mask.size:
        raise ValueError(f"size mismatch: {obs.size} observations, {mask.size} mask entries")
    sign = np.where(mask.reshape(-1), 1.0, -1.0)
    return float(((gamma - obs.reshape(-1)) * sign).sum() / obs.size)


def threshold_baseline(observations, gamma):
    """Coordinate-wise ``observations >= gamma``.

    Applied to the proxy ``A^T y`` this is the proxy-thresholding baseline;
    it also minimizes :func:`empirical_risk` over all masks.
    """
    return np.asarray(observations) >= gamma


def evaluate(truth, gamma, estimate_mask, label, params=None, observations=None):
    """Bundle excess and empirical risk of one estimate.

    Empirical risk is computed against ``observations`` when given and
    against ``truth`` otherwise.
    """
    truth = np.asarray(truth, dtype=np.float64)
    estimate_mask = np.asarray(estimate_mask, dtype=bool).reshape(truth.shape)
    obs = truth if observations is None else observations
    wrong = symmetric_difference(extract_level_set(truth, gamma), estimate_mask)
    return RiskReport(
        excess_risk=excess_risk(truth, gamma, estimate_mask),
        empirical_risk=empirical_risk(obs, gamma, estimate_mask),
        sym_diff_size=int(wrong.sum()),
        method_label=label,
        params=dict(params or {}),
    )
