"""Level set estimation from compressive measurements via box-constrained TV."""

from .core import (
    LevelSpec,
    as_image,
    as_mask,
    extract_level_set,
    flatten,
    reshape_to_image,
    symmetric_difference,
)
from .harness import (
    ExperimentGrid,
    GridCellResult,
    default_grid,
    derive_seed,
    grid_from_manifest,
    run_cell,
    run_grid,
)
from .phantom import PhantomSpec, Shape, default_phantom_spec, render_phantom
from .pgm import load_image, save_image, save_mask
from .risk import RiskReport, empirical_risk, evaluate, excess_risk, threshold_baseline
from .sensing import (
    MeasurementSet,
    SensingOperator,
    estimate_lipschitz,
    generate_gaussian_operator,
    measure,
    proxy_observations,
)
from .solver import SolverConfig, SolverResult, project_box, solve
from .tv import DualField, TvFlavor, divergence_adjoint, forward_differences, tv_norm, tv_prox

__version__ = "0.1.0"
