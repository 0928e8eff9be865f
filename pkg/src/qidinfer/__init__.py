"""Fourier-based inference for quasi-infinitely divisible distributions.

Spectral calibration of the characteristic triplet (drift, normal variance,
signed jump mass), regularized recovery of the signed jump density, and
semiparametric decontamination of Gaussian mixtures, with seeded samplers,
analytic oracles, an EM baseline and a Monte-Carlo study harness.
"""

from ._kernels import backend_name as kernel_backend
from .charfn import (ComplexSeries, LogCfSeries, distinguished_log, ecf_on_grid,
                     event_diagnostics, exact_cf, exact_log_cf, h_validity_check)
from .core import (DensityCurve, KernelSpec, Sample, UniformGrid, bandwidth_rule,
                   epanechnikov, l2_distance, trapezoid_integrate)
from .em import EmConfig, EmResult, em_fit
from .mixture import decompose, decontaminate, kde, positive_part
from .models import (BartSimpsonModified, ModelSpec, NuTildeSeriesConfig,
                     PureNormal, StudentPlusNormalMixture, TwoNormalMixture,
                     exact_density, exact_g_circ, exact_triplet, nu_tilde_density,
                     sample_model)
from .spectral import (InversionConfig, PipelineConfig, TripletEstimate,
                       estimate_jump_density, estimate_triplet, full_pipeline,
                       invert_log_cf)
from .study import StudyConfig, StudyReport, run_study
from .weights import (BaseWeight, build_base_weight, derived_weight_identities,
                      gamma_normal_equation, sigma_lambda_normal_equations)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "ComplexSeries", "LogCfSeries", "distinguished_log", "ecf_on_grid",
    "event_diagnostics", "exact_cf", "exact_log_cf", "h_validity_check",
    "DensityCurve", "KernelSpec", "Sample", "UniformGrid", "bandwidth_rule",
    "epanechnikov", "l2_distance", "trapezoid_integrate",
    "EmConfig", "EmResult", "em_fit",
    "decompose", "decontaminate", "kde", "positive_part",
    "BartSimpsonModified", "ModelSpec", "NuTildeSeriesConfig", "PureNormal",
    "StudentPlusNormalMixture", "TwoNormalMixture", "exact_density",
    "exact_g_circ", "exact_triplet", "nu_tilde_density", "sample_model",
    "InversionConfig", "PipelineConfig", "TripletEstimate",
    "estimate_jump_density", "estimate_triplet", "full_pipeline", "invert_log_cf",
    "StudyConfig", "StudyReport", "run_study",
    "BaseWeight", "build_base_weight", "derived_weight_identities",
    "gamma_normal_equation", "sigma_lambda_normal_equations",
    "__version__",
]
