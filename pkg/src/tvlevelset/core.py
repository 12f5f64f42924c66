"""Images, level-set masks and the elementary operations between them.

Images are plain 2-D ``float64`` arrays and masks are 2-D ``bool`` arrays.
Every vectorization in the package is row-major (C order), so
``flatten(reshape_to_image(v, m, n))`` returns ``v`` unchanged.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LevelSpec",
    "as_image",
    "as_mask",
    "flatten",
    "reshape_to_image",
    "extract_level_set",
    "symmetric_difference",
]


@dataclass(frozen=True)
class LevelSpec:
    """Target level ``gamma`` together with the box ``[lower, upper]``."""

    gamma: float
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"lower ({self.lower}) must be < upper ({self.upper})")
        if not self.lower <= self.gamma <= self.upper:
            raise ValueError(
                f"gamma ({self.gamma}) must lie in [{self.lower}, {self.upper}]"
            )

    @classmethod
    def for_level(cls, gamma, lower=None, upper=255.0, margin=5.0):
        """Box with ``lower = gamma - margin`` unless given explicitly."""
        if lower is None:
            lower = gamma - margin
        return cls(float(gamma), float(lower), float(upper))


def as_image(arr):
    """Validate ``arr`` as an image and return a read-only float64 copy."""
    img = np.array(arr, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"image must be a non-empty 2-D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains non-finite pixels")
    img.flags.writeable = False
    return img


def as_mask(arr):
    mask = np.array(arr, dtype=bool)
    if mask.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {mask.shape}")
    mask.flags.writeable = False
    return mask


def flatten(img):
    return np.asarray(img).reshape(-1)


def reshape_to_image(v, m, n):
    """Reshape a length ``m*n`` vector into an ``m x n`` image (row-major)."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.size != m * n:
        raise ValueError(f"cannot reshape vector of shape {v.shape} to ({m}, {n})")
    return v.reshape(m, n)


def extract_level_set(img, gamma):
    """Mask of pixels with value ``>= gamma``."""
    return np.asarray(img) >= gamma


def symmetric_difference(a, b):
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return a ^ b
