"""Jump and variation functionals for families of rough-kernel operators."""

from ._backend import NAME as backend
from .grid import Grid, SampledFunction, ScaleGrid, band_limited, lp_norm, rotate
from .sphere import SphereKernel, parse_kernel, omega_decomposition, enforce_cancellation, split_odd_even
from .variation import (SeriesSample, ScaleFamily, vq_norm, jump_count, short_variation_block,
                        pointwise_control_ratio, jsw_comparison_ratio, v2_interpolation_ratio)
from .operators import OperatorSpec, AnnulusMeasure, LittlewoodPaleySmoother, family_apply
from .decay import nu_hat, decay_profile
from .martingale import VectorField, cond_expectation, martingale_diff, cz_decompose
from .config import ExperimentConfig, ConfigError, parse_config
from .experiments import ExperimentReport, run_experiment
from .report import emit_report

__version__ = "0.1.0"
