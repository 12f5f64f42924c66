"""Discrete total variation and its proximal operator.

Differences are taken "forward" in the sense ``X[i, j] - X[i+1, j]``
(vertical, shape ``(m-1, n)``) and ``X[i, j] - X[i, j+1]`` (horizontal,
shape ``(m, n-1)``). The isotropic seminorm couples the two differences
at every pixel that has both; the last column of vertical differences and
the last row of horizontal differences enter as plain absolute values.

The prox is computed on the dual with the accelerated gradient projection
scheme of Beck & Teboulle (2009), without any box constraint folded in.
"""

import enum
from typing import NamedTuple

import numpy as np

__all__ = [
    "TvFlavor",
    "DualField",
    "forward_differences",
    "divergence_adjoint",
    "tv_norm",
    "project_dual",
    "tv_prox",
]


class TvFlavor(enum.Enum):
    ISOTROPIC = "iso"
    ANISOTROPIC = "aniso"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower()
        aliases = {"iso": cls.ISOTROPIC, "isotropic": cls.ISOTROPIC,
                   "aniso": cls.ANISOTROPIC, "anisotropic": cls.ANISOTROPIC, "l1": cls.ANISOTROPIC}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown TV flavor {value!r}") from None


class DualField(NamedTuple):
    """Dual variables: ``p`` pairs with vertical, ``q`` with horizontal differences."""

    p: np.ndarray
    q: np.ndarray


def forward_differences(img):
    img = np.asarray(img, dtype=np.float64)
    return DualField(img[:-1, :] - img[1:, :], img[:, :-1] - img[:, 1:])


def divergence_adjoint(field, shape=None):
    """Adjoint of :func:`forward_differences` applied to ``(p, q)``.

    ``shape`` is inferred from the fields when omitted; it must be given
    explicitly only for degenerate ``1 x 1`` images.
    """
    p, q = (np.asarray(a, dtype=np.float64) for a in field)
    if shape is None:
        shape = (p.shape[0] + 1, p.shape[1])
    m, n = shape
    if p.shape != (m - 1, n) or q.shape != (m, n - 1):
        raise ValueError(
            f"dual fields of shapes {p.shape}, {q.shape} do not match image shape {shape}"
        )
    out = np.zeros((m, n))
    out[:-1, :] += p
    out[1:, :] -= p
    out[:, :-1] += q
    out[:, 1:] -= q
    return out


def tv_norm(img, flavor=TvFlavor.ISOTROPIC):
    flavor = TvFlavor.parse(flavor)
    dv, dh = forward_differences(img)
    if flavor is TvFlavor.ANISOTROPIC:
        return float(np.abs(dv).sum() + np.abs(dh).sum())
    paired = np.sqrt(dv[:, :-1] ** 2 + dh[:-1, :] ** 2).sum()
    return float(paired + np.abs(dv[:, -1]).sum() + np.abs(dh[-1, :]).sum())


def project_dual(field, flavor=TvFlavor.ISOTROPIC):
    """Project ``(p, q)`` onto the unit dual ball of the chosen seminorm."""
    flavor = TvFlavor.parse(flavor)
    p, q = field
    if flavor is TvFlavor.ANISOTROPIC:
        return DualField(np.clip(p, -1.0, 1.0), np.clip(q, -1.0, 1.0))
    p = p.copy()
    q = q.copy()
    pi = p[:, :-1]
    qi = q[:-1, :]
    scale = np.maximum(1.0, np.sqrt(pi**2 + qi**2))
    pi /= scale
    qi /= scale
    np.clip(p[:, -1], -1.0, 1.0, out=p[:, -1])
    np.clip(q[-1, :], -1.0, 1.0, out=q[-1, :])
    return DualField(p, q)


def tv_prox(b, weight, flavor=TvFlavor.ISOTROPIC, inner_iters=50, inner_tol=1e-5,
            return_dual=False):
    """Approximately solve ``min_u weight * TV(u) + 0.5 * ||u - b||^2``.

    Parameters
    ----------
    b : (m, n) array
        Point at which the prox is evaluated.
    weight : float
        Multiplier of the TV term, ``>= 0``.
    flavor : TvFlavor or str
        ``"iso"`` or ``"aniso"``.
    inner_iters : int
        Maximum number of accelerated dual iterations.
    inner_tol : float
        Stop once ``||d_k - d_{k-1}|| / ||d_k||`` falls below this, where
        ``d`` stacks both dual fields.
    return_dual : bool
        Also return the final (feasible) :class:`DualField`.

    Returns
    -------
    u : (m, n) array
    dual : DualField, only if ``return_dual``
    """
    if weight < 0:
        raise ValueError(f"weight must be nonnegative, got {weight}")
    flavor = TvFlavor.parse(flavor)
    b = np.asarray(b, dtype=np.float64)
    m, n = b.shape
    zeros = DualField(np.zeros((m - 1, n)), np.zeros((m, n - 1)))
    if weight == 0:
        return (b.copy(), zeros) if return_dual else b.copy()

    step = 1.0 / (8.0 * weight)
    cur = zeros
    ext = zeros
    t = 1.0
    for _ in range(inner_iters):
        u = b - weight * divergence_adjoint(ext, (m, n))
        dv, dh = forward_differences(u)
        new = project_dual(DualField(ext.p + step * dv, ext.q + step * dh), flavor)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        beta = (t - 1.0) / t_next
        ext = DualField(new.p + beta * (new.p - cur.p), new.q + beta * (new.q - cur.q))
        change = np.sqrt(np.sum((new.p - cur.p) ** 2) + np.sum((new.q - cur.q) ** 2))
        size = np.sqrt(np.sum(new.p**2) + np.sum(new.q**2))
        cur, t = new, t_next
        if change <= inner_tol * size:
            break
    u = b - weight * divergence_adjoint(cur, (m, n))
    return (u, cur) if return_dual else u
