"""Brownian motion in random scenery: simulation, oracles, verification.

The package simulates rescaled occupation functionals of a Brownian path
moving through a frozen random potential (a Gaussian field or a Poisson
shot-noise field), computes the matching limit-law constants and exact
finite-horizon moments by quadrature, and verifies the distributional
claims with seeded Monte Carlo test suites.
"""

from .brownian import (BrownianPath, LocalTimeProfile, bounding_box,
                       heat_kernel, local_time, sample_path)
from .functional import (MODES, FunctionalTrajectory, conditional_variance,
                         cross_window_sum, evaluate_functional,
                         scaling_factor)
from .gaussian_field import (FeatureField, GaussianField, field_diagnostics,
                             field_value, sample_feature_field,
                             sample_grid_field)
from .harness import (ConfigError, ExperimentConfig, RunResult,
                      config_from_dict, load_config, report, run_experiment,
                      run_suites, step_for)
from .oracles import (LOCAL_TIME_ENERGY_1, OracleError, finite_n_variance,
                      finite_n_variance_discrete, limit_cf_d1,
                      local_time_energy, local_time_energy_moments,
                      probe_energy_moments, sample_limit_d1, variance_table,
                      window_covariance)
from .poisson_field import (PoissonField, poisson_diagnostics, poisson_value,
                            sample_poisson_field, sample_poisson_field_near)
from .seeds import derive_seed, generator, splitmix64
from .spectra import (BochnerError, BochnerReport, CovarianceModel,
                      DualFormulaMismatch, ModelError, ShapeFunction,
                      SigmaError, build_gaussian_model, build_shape,
                      check_bochner, power_spectrum, shot_noise_model,
                      sigma_limit, sigma_routes, tabulated_from_csv)
from .stats import (FiniteDimProbe, TestReport, concentration_test,
                    cross_term_test, ecf_test, kurtosis_test,
                    moment_scaling_test, normality_test, variance_test)

__version__ = "1.0.0"

__all__ = [
    "BrownianPath", "LocalTimeProfile", "bounding_box", "heat_kernel",
    "local_time", "sample_path",
    "MODES", "FunctionalTrajectory", "conditional_variance",
    "cross_window_sum", "evaluate_functional", "scaling_factor",
    "FeatureField", "GaussianField", "field_diagnostics", "field_value",
    "sample_feature_field", "sample_grid_field",
    "ConfigError", "ExperimentConfig", "RunResult", "config_from_dict",
    "load_config", "report", "run_experiment", "run_suites", "step_for",
    "LOCAL_TIME_ENERGY_1", "OracleError", "finite_n_variance",
    "finite_n_variance_discrete", "limit_cf_d1", "local_time_energy",
    "local_time_energy_moments", "probe_energy_moments", "sample_limit_d1",
    "variance_table", "window_covariance",
    "PoissonField", "poisson_diagnostics", "poisson_value",
    "sample_poisson_field", "sample_poisson_field_near",
    "derive_seed", "generator", "splitmix64",
    "BochnerError", "BochnerReport", "CovarianceModel",
    "DualFormulaMismatch", "ModelError", "ShapeFunction", "SigmaError",
    "build_gaussian_model", "build_shape", "check_bochner", "power_spectrum",
    "shot_noise_model", "sigma_limit", "sigma_routes", "tabulated_from_csv",
    "FiniteDimProbe", "TestReport", "concentration_test", "cross_term_test",
    "ecf_test", "kurtosis_test", "moment_scaling_test", "normality_test",
    "variance_test",
]
