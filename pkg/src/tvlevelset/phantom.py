"""Piecewise-constant test images with exactly known level sets.

Shapes are painted in list order onto a constant background, later shapes
overwriting earlier ones. Geometry is in pixel units with pixel ``(i, j)``
centred at integer coordinates; anything falling outside the canvas is
silently clipped.

Rectangle geometry: ``(top, left, height, width)``.
Disk geometry: ``(center_row, center_col, radius)``; a pixel belongs to the
disk when ``(i - ci)^2 + (j - cj)^2 <= r^2``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .pgm import load_image, save_image, save_mask  # noqa: F401  re-exported

__all__ = [
    "Shape",
    "PhantomSpec",
    "default_phantom_spec",
    "render_phantom",
    "shape_mask",
    "load_phantom_spec",
    "load_image",
    "save_image",
    "save_mask",
]


@dataclass(frozen=True)
class Shape:
    kind: str
    geometry: tuple
    intensity: float

    def __post_init__(self):
        expected = {"rectangle": 4, "disk": 3}
        if self.kind not in expected:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if len(self.geometry) != expected[self.kind]:
            raise ValueError(
                f"{self.kind} needs {expected[self.kind]} geometry values, got {len(self.geometry)}"
            )
        if not 0 <= self.intensity <= 255:
            raise ValueError(f"intensity {self.intensity} outside [0, 255]")


@dataclass(frozen=True)
class PhantomSpec:
    rows: int
    cols: int
    background: float
    shapes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("phantom dimensions must be positive")
        if not 0 <= self.background <= 255:
            raise ValueError(f"background {self.background} outside [0, 255]")
        object.__setattr__(self, "shapes", tuple(self.shapes))

    def to_dict(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "background": self.background,
            "shapes": [
                {"kind": s.kind, "geometry": list(s.geometry), "intensity": s.intensity}
                for s in self.shapes
            ],
        }

    @classmethod
    def from_dict(cls, d):
        shapes = [Shape(s["kind"], tuple(s["geometry"]), float(s["intensity"]))
                  for s in d.get("shapes", [])]
        return cls(int(d["rows"]), int(d["cols"]), float(d["background"]), tuple(shapes))


def default_phantom_spec():
    """32x32 benchmark: background 40, a 12x20 rectangle at 120, a radius-6 disk at 90."""
    return PhantomSpec(
        rows=32,
        cols=32,
        background=40.0,
        shapes=(
            Shape("rectangle", (4, 4, 12, 20), 120.0),
            Shape("disk", (23, 22, 6), 90.0),
        ),
    )


def shape_mask(shape, rows, cols):
    ii, jj = np.indices((rows, cols))
    if shape.kind == "rectangle":
        top, left, height, width = shape.geometry
        return (ii >= top) & (ii < top + height) & (jj >= left) & (jj < left + width)
    ci, cj, r = shape.geometry
    return (ii - ci) ** 2 + (jj - cj) ** 2 <= r**2


def render_phantom(spec):
    img = np.full((spec.rows, spec.cols), float(spec.background))
    for s in spec.shapes:
        img[shape_mask(s, spec.rows, spec.cols)] = s.intensity
    return img


def load_phantom_spec(path):
    with open(path) as fh:
        return PhantomSpec.from_dict(json.load(fh))
