"""Measurement sweeps with clairvoyant regularization choice.

A grid cell is one ``(k, sigma)`` pair. Each cell draws its sensing matrix
and noise from seeds hashed out of ``(base_seed, k, sigma, stream)``. The
stream label names the draw ("operator/0", "noise/0", ...), not the
method, so every method in a cell sees the same measurements. For the TV
method every alpha of the grid is solved and the one with the smallest
excess risk against the known truth is reported.

Output directory layout written by :func:`run_grid`::

    results.csv      one row per (k, sigma, method), fixed column order
    timings.csv      wall-clock time per row
    manifest.json    full configuration, seeds and artifact names
    true_mask.pgm    level set of the input image
    mask_<method>_k<k>_sigma<sigma>.pgm
"""

import csv
import hashlib
import json
import logging
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import LevelSpec, extract_level_set
from .phantom import PhantomSpec, default_phantom_spec, load_image, render_phantom, save_mask
from .risk import excess_risk, threshold_baseline
from .sensing import estimate_lipschitz, generate_gaussian_operator, measure, proxy_observations
from .solver import NumericalFailure, SolverConfig, solve
from .tv import TvFlavor

__all__ = [
    "METHODS",
    "CSV_COLUMNS",
    "ExperimentGrid",
    "GridCellResult",
    "default_alpha_grid",
    "default_grid",
    "derive_seed",
    "cell_seeds",
    "run_cell",
    "run_grid",
    "grid_from_manifest",
]

log = logging.getLogger(__name__)

METHODS = ("tv", "proxy-threshold")
CSV_COLUMNS = (
    "k", "sigma", "method", "alpha", "excess_risk", "sym_diff_size",
    "iterations", "converged", "wall_time_ms", "seed",
)
MANIFEST_VERSION = 1


def default_alpha_grid():
    return [float(a) for a in np.logspace(-3, 2, 12)]


def _fmt(value):
    return format(float(value), ".9g")


@dataclass
class ExperimentGrid:
    """Everything needed to reproduce a sweep.

    ``image_source`` is either a :class:`PhantomSpec` or a path to a PGM
    file. ``k_values`` may be given directly or, via :meth:`from_fractions`,
    as fractions of the pixel count.
    """

    image_source: object
    gamma: float
    k_values: list
    sigma_values: list
    alpha_grid: list = field(default_factory=default_alpha_grid)
    base_seed: int = 0
    methods: list = field(default_factory=lambda: list(METHODS))
    lower: float | None = None
    upper: float = 255.0
    replicates: int = 1
    flavor: str = "iso"
    max_iters: int = 500
    rel_tol: float = 1e-4
    inner_iters: int = 50
    inner_tol: float = 1e-5
    record_wall_time: bool = False

    def __post_init__(self):
        if isinstance(self.image_source, dict):
            self.image_source = PhantomSpec.from_dict(self.image_source)
        self._image = None
        self.validate()

    @classmethod
    def from_fractions(cls, image_source, gamma, k_fracs, sigma_values, **kwargs):
        grid = cls(image_source, gamma, [1], sigma_values, **kwargs)
        p = grid.image.size
        grid.k_values = [max(1, int(round(f * p))) for f in k_fracs]
        grid.validate()
        return grid

    @property
    def image(self):
        if self._image is None:
            if isinstance(self.image_source, PhantomSpec):
                self._image = render_phantom(self.image_source)
            else:
                self._image = load_image(self.image_source)
        return self._image

    @property
    def level(self):
        return LevelSpec.for_level(self.gamma, lower=self.lower, upper=self.upper)

    def validate(self):
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if not self.alpha_grid:
            raise ValueError("alpha_grid must be nonempty")
        if any(a <= 0 for a in self.alpha_grid):
            raise ValueError("alpha_grid values must be positive")
        if list(self.alpha_grid) != sorted(self.alpha_grid):
            raise ValueError("alpha_grid must be sorted ascending")
        if not self.k_values or not self.sigma_values:
            raise ValueError("k_values and sigma_values must be nonempty")
        p = self.image.size
        if any(k < 1 or k > p for k in self.k_values):
            raise ValueError(f"every k must lie in [1, {p}], got {self.k_values}")
        if any(s < 0 for s in self.sigma_values):
            raise ValueError("sigma values must be nonnegative")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        TvFlavor.parse(self.flavor)
        self.level  # noqa: B018  raises on an invalid box

    def solver_config(self, alpha):
        return SolverConfig(
            alpha=alpha,
            level=self.level,
            max_iters=self.max_iters,
            rel_tol=self.rel_tol,
            inner_iters=self.inner_iters,
            inner_tol=self.inner_tol,
            flavor=self.flavor,
        )

    def to_dict(self):
        d = asdict(self)
        if isinstance(self.image_source, PhantomSpec):
            d["image_source"] = {"phantom": self.image_source.to_dict()}
        else:
            d["image_source"] = {"path": os.fspath(self.image_source)}
        d["k_values"] = [int(k) for k in self.k_values]
        d["sigma_values"] = [float(s) for s in self.sigma_values]
        d["alpha_grid"] = [float(a) for a in self.alpha_grid]
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        src = d.pop("image_source")
        source = PhantomSpec.from_dict(src["phantom"]) if "phantom" in src else src["path"]
        return cls(image_source=source, **d)


@dataclass
class GridCellResult:
    k: int
    sigma: float
    method: str
    best_alpha: float | None
    excess_risk: float
    sym_diff_size: int
    iterations: int
    converged: bool
    wall_time: float
    seed: int
    failed: bool = False
    error: str = ""
    mask: np.ndarray | None = field(default=None, repr=False)
    risk_by_alpha: list = field(default_factory=list, repr=False)

    def csv_row(self, record_wall_time=True):
        blank = self.failed
        return [
            str(self.k),
            _fmt(self.sigma),
            self.method,
            "" if self.best_alpha is None else _fmt(self.best_alpha),
            "nan" if blank else _fmt(self.excess_risk),
            "" if blank else str(self.sym_diff_size),
            str(self.iterations),
            "true" if self.converged else "false",
            _fmt(self.wall_time * 1e3) if record_wall_time else "0",
            str(self.seed),
        ]


def derive_seed(base_seed, k, sigma, method):
    """64-bit seed from BLAKE2b of ``"{base_seed}|{k}|{round(sigma*1e6)}|{method}"``.

    ``sigma`` is encoded in fixed point (micro-units) so that float formatting
    never changes the seed. The first 8 digest bytes are read little-endian.
    """
    key = f"{int(base_seed)}|{int(k)}|{int(round(float(sigma) * 1e6))}|{method}"
    digest = hashlib.blake2b(key.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def cell_seeds(grid, k, sigma, replicate=0):
    """``(operator_seed, noise_seed)`` for one measurement draw of a cell."""
    return (
        derive_seed(grid.base_seed, k, sigma, f"operator/{replicate}"),
        derive_seed(grid.base_seed, k, sigma, f"noise/{replicate}"),
    )


def _draw(grid, k, sigma, replicate):
    op_seed, noise_seed = cell_seeds(grid, k, sigma, replicate)
    x = grid.image.reshape(-1)
    op = generate_gaussian_operator(k, x.size, op_seed)
    meas = measure(op, x, sigma, noise_seed)
    return op, meas


def _tv_cell(grid, k, sigma):
    truth = grid.image
    gamma = grid.gamma
    risks = np.full((grid.replicates, len(grid.alpha_grid)), np.nan)
    masks, iters, conv = {}, {}, {}
    errors = []
    for rep in range(grid.replicates):
        op, meas = _draw(grid, k, sigma, rep)
        estimate_lipschitz(op)
        for j, alpha in enumerate(grid.alpha_grid):
            try:
                res = solve(op, meas, grid.solver_config(alpha), truth.shape)
            except NumericalFailure as exc:
                errors.append(f"alpha={alpha:g} replicate={rep}: {exc}")
                log.warning("k=%d sigma=%g alpha=%g failed: %s", k, sigma, alpha, exc)
                continue
            mask = extract_level_set(res.estimate, gamma)
            risks[rep, j] = excess_risk(truth, gamma, mask)
            masks[rep, j] = mask
            iters[rep, j] = res.iterations
            conv[rep, j] = res.converged
    usable = ~np.isnan(risks).any(axis=0)
    if not usable.any():
        return None, "; ".join(errors)
    mean_risk = np.full(len(grid.alpha_grid), np.inf)
    mean_risk[usable] = risks[:, usable].mean(axis=0)
    best = int(np.argmin(mean_risk))  # first (smallest) alpha wins ties
    wrong = [
        int((extract_level_set(truth, gamma) ^ masks[rep, best]).sum())
        for rep in range(grid.replicates)
    ]
    return dict(
        best_alpha=float(grid.alpha_grid[best]),
        excess_risk=float(mean_risk[best]),
        sym_diff_size=int(round(np.mean(wrong))),
        iterations=max(iters[rep, best] for rep in range(grid.replicates)),
        converged=all(conv[rep, best] for rep in range(grid.replicates)),
        mask=masks[0, best],
        risk_by_alpha=[float(r) for r in mean_risk],
    ), "; ".join(errors)


def _proxy_cell(grid, k, sigma):
    truth = grid.image
    gamma = grid.gamma
    risks, wrong = [], []
    first_mask = None
    for rep in range(grid.replicates):
        op, meas = _draw(grid, k, sigma, rep)
        z = proxy_observations(op, meas).reshape(truth.shape)
        mask = threshold_baseline(z, gamma)
        risks.append(excess_risk(truth, gamma, mask))
        wrong.append(int((extract_level_set(truth, gamma) ^ mask).sum()))
        if first_mask is None:
            first_mask = mask
    return dict(
        best_alpha=None,
        excess_risk=float(np.mean(risks)),
        sym_diff_size=int(round(np.mean(wrong))),
        iterations=0,
        converged=True,
        mask=first_mask,
    ), ""


def run_cell(grid, k, sigma, method):
    """Evaluate one method on one ``(k, sigma)`` cell.

    Excess risk is averaged over ``grid.replicates`` independent draws; for
    the TV method the reported alpha minimizes that average. A cell whose
    every solve fails numerically is returned with ``failed=True``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    start = time.perf_counter()
    if method == "tv":
        out, error = _tv_cell(grid, k, sigma)
    else:
        out, error = _proxy_cell(grid, k, sigma)
    elapsed = time.perf_counter() - start
    seed = cell_seeds(grid, k, sigma, 0)[0]
    if out is None:
        return GridCellResult(k, float(sigma), method, None, float("nan"), 0, 0, False,
                              elapsed, seed, failed=True, error=error)
    return GridCellResult(k=k, sigma=float(sigma), method=method, wall_time=elapsed,
                          seed=seed, error=error, **out)


def _mask_name(method, k, sigma):
    return f"mask_{method}_k{k}_sigma{_fmt(sigma)}.pgm"


def run_grid(grid, output_dir):
    """Run every cell of ``grid`` and write results into ``output_dir``.

    Cells are executed and written in grid order (k outer, sigma, then
    method), so ``results.csv`` is byte-identical across reruns unless
    ``grid.record_wall_time`` puts measured times into it. Returns the list
    of :class:`GridCellResult`; check ``failed`` on each for partial failure.
    """
    grid.validate()
    os.makedirs(output_dir, exist_ok=True)
    truth = grid.image
    save_mask(extract_level_set(truth, grid.gamma), os.path.join(output_dir, "true_mask.pgm"))

    results, cells = [], []
    for k in grid.k_values:
        for sigma in grid.sigma_values:
            for method in grid.methods:
                log.info("cell k=%d sigma=%g method=%s", k, sigma, method)
                res = run_cell(grid, k, sigma, method)
                results.append(res)
                entry = {
                    "k": int(k),
                    "sigma": float(sigma),
                    "method": method,
                    "seeds": [list(cell_seeds(grid, k, sigma, r)) for r in range(grid.replicates)],
                    "failed": res.failed,
                }
                if res.error:
                    entry["error"] = res.error
                if res.mask is not None:
                    name = _mask_name(method, k, sigma)
                    save_mask(res.mask, os.path.join(output_dir, name))
                    entry["mask"] = name
                cells.append(entry)

    with open(os.path.join(output_dir, "results.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for res in results:
            writer.writerow(res.csv_row(grid.record_wall_time))

    with open(os.path.join(output_dir, "timings.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("k", "sigma", "method", "wall_time_ms"))
        for res in results:
            writer.writerow((res.k, _fmt(res.sigma), res.method, _fmt(res.wall_time * 1e3)))

    manifest = {
        "version": MANIFEST_VERSION,
        "grid": grid.to_dict(),
        "seed_scheme": "blake2b-64(base_seed|k|round(sigma*1e6)|stream), little-endian",
        "artifacts": {
            "results": "results.csv",
            "timings": "timings.csv",
            "true_mask": "true_mask.pgm",
        },
        "cells": cells,
    }
    with open(os.path.join(output_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return results


def grid_from_manifest(path):
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("version") != MANIFEST_VERSION:
        raise ValueError(f"{path}: unsupported manifest version {manifest.get('version')!r}")
    return ExperimentGrid.from_dict(manifest["grid"])


def default_grid(**overrides):
    """Default sweep: the benchmark phantom, gamma 70, k in {p, p/2, p/4}, sigma in {0, 10}."""
    kwargs = dict(
        image_source=default_phantom_spec(),
        gamma=70.0,
        k_fracs=[1.0, 0.5, 0.25],
        sigma_values=[0.0, 10.0],
        base_seed=0,
    )
    kwargs.update(overrides)
    return ExperimentGrid.from_fractions(**kwargs)
