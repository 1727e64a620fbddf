"""Periodic 1-D nonlocal Fokker-Planck solver and its chemotaxis-system
approximation: kernels, cosh-basis expansion, finite-volume solvers,
linear stability analysis, and a figure-reproduction CLI."""

from .errors import BlowUpError, ConfigError
from .kernels import (Attract, AttractRepel, BesselFund, ConstantLimit,
                      Kernel, KernelNorms, LinearSum, MexicanHat,
                      SampledKernel, eval_k, eval_k_deriv, kernel_eval,
                      kernel_norms, verify_fundamental, wrap_periodic)
from .chebfit import (CoshExpansion, KSParams, cheb_mono_coeffs, cheb_nodes,
                      cosh_expansion, expansion_error, expansion_error_bound,
                      expansion_to_ks, lagrange_poly_coeffs, mono_to_cheb,
                      shifted_cheb_coeffs)
from .pde_core import (PeriodicField, PeriodicGrid, constant_field, convolve,
                       diffusion_step_implicit, field_from_function,
                       flux_divergence, read_snapshot, sample_kernel,
                       solve_elliptic, spectral_reference_step,
                       write_field_csv, write_snapshot)
from .solvers import (CosineMode, KellerSegel, NonlocalFP, PerturbedConstant,
                      SampledInit, SimConfig, Trajectory, build_initial,
                      paired_run, solve_ks, solve_nonlocal_fp,
                      v_relaxation_step)
from .analysis import (ConvergenceResult, DispersionCurve, ErrorReport,
                       alpha_zero, convergence_study, critical_mu,
                       dispersion_curve, dispersion_lambda, error_norms,
                       fourier_coefficient, growth_rate_measure, h1_norm,
                       ks_params_for_kernel, l2_norm, three_component_lambda,
                       three_component_residual, two_component_eigs,
                       two_component_residual, v_error_norms)
from .config import (build_grid, build_init, build_kernel, build_model,
                     build_sim_config, load_config, resolve_config)
from .presets import PRESET_NOTES, preset, preset_names
from .svgplot import line_plot

__version__ = "0.1.0"

__all__ = [
    "BlowUpError", "ConfigError",
    "Attract", "AttractRepel", "BesselFund", "ConstantLimit", "Kernel",
    "KernelNorms", "LinearSum", "MexicanHat", "SampledKernel", "eval_k",
    "eval_k_deriv", "kernel_eval", "kernel_norms", "verify_fundamental",
    "wrap_periodic",
    "CoshExpansion", "KSParams", "cheb_mono_coeffs", "cheb_nodes",
    "cosh_expansion", "expansion_error", "expansion_error_bound",
    "expansion_to_ks", "lagrange_poly_coeffs", "mono_to_cheb",
    "shifted_cheb_coeffs",
    "PeriodicField", "PeriodicGrid", "constant_field", "convolve",
    "diffusion_step_implicit", "field_from_function", "flux_divergence",
    "read_snapshot", "sample_kernel", "solve_elliptic",
    "spectral_reference_step", "write_field_csv", "write_snapshot",
    "CosineMode", "KellerSegel", "NonlocalFP", "PerturbedConstant",
    "SampledInit", "SimConfig", "Trajectory", "build_initial", "paired_run",
    "solve_ks", "solve_nonlocal_fp", "v_relaxation_step",
    "ConvergenceResult", "DispersionCurve", "ErrorReport", "alpha_zero",
    "convergence_study", "critical_mu", "dispersion_curve",
    "dispersion_lambda", "error_norms", "fourier_coefficient",
    "growth_rate_measure", "h1_norm", "ks_params_for_kernel", "l2_norm",
    "three_component_lambda", "three_component_residual",
    "two_component_eigs", "two_component_residual", "v_error_norms",
    "build_grid", "build_init", "build_kernel", "build_model",
    "build_sim_config", "load_config", "resolve_config",
    "PRESET_NOTES", "preset", "preset_names",
    "line_plot",
    "__version__",
]
