"""Built-in oracle battery for the `validate` subcommand.

Each check recomputes a quantity with an independent method (composite
Simpson quadrature, dense-grid evaluation, a second convolution path,
numpy's Chebyshev evaluator) and compares it against the package's
closed forms.  A fresh checkout passes every check; the `corrupt` flag
deliberately perturbs one basis-coefficient table so the reporting
path for failures can be exercised end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.integrate import simpson

from .chebfit import cheb_nodes, lagrange_poly_coeffs, mono_to_cheb
from .kernels import MexicanHat, eval_k, eval_k_deriv, kernel_norms, verify_fundamental
from .pde_core import PeriodicField, PeriodicGrid, convolve

__all__ = ["CheckResult", "run_battery"]

_D_VALUES = (0.1, 1.0, 3.0)
_L_VALUES = (1.0, 5.0)
_QUAD_POINTS = 8193  # odd count = 8192 Simpson intervals


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _simpson_half_period(fn, L):
    """2 * Simpson integral over [0, L] (even integrand, smooth there)."""
    x = np.linspace(0.0, L, _QUAD_POINTS)
    return 2.0 * simpson(fn(x), x=x)


def _check_kernel_mass():
    worst = (0.0, None, None, 1.0)
    for d, L in product(_D_VALUES, _L_VALUES):
        integral = _simpson_half_period(lambda x: eval_k(x, d, L), L)
        dev = abs(integral - 1.0)
        if dev > worst[0]:
            worst = (dev, d, L, integral)
    ok = worst[0] <= 1e-8
    detail = (f"unit-mass identity: worst measured integral = {worst[3]:.15f} "
              f"at d = {worst[1]}, L = {worst[2]} (|dev| = {worst[0]:.2e}, "
              "tol 1e-08)")
    return CheckResult("kernel_unit_mass", ok, detail)


def _check_kernel_derivative_norms():
    worst = 0.0
    for d, L in product(_D_VALUES, _L_VALUES):
        norms = kernel_norms(d, L)
        x = np.linspace(0.0, L, _QUAD_POINTS)
        vals = np.empty_like(x)
        vals[0] = 1.0 / (2.0 * d)  # one-sided limit of |k'| at the kink
        vals[1:] = np.abs(eval_k_deriv(x[1:], d, L, order=1))
        l1_measured = 2.0 * simpson(vals, x=x)
        sup_measured = abs(eval_k_deriv(1e-12, d, L, order=1))
        worst = max(worst,
                    abs(l1_measured - norms.l1_dx),
                    abs(sup_measured - norms.sup_dx))
    ok = worst <= 1e-8
    return CheckResult(
        "kernel_derivative_norms", ok,
        f"L1 and sup of the derivative vs closed forms: max deviation = "
        f"{worst:.2e} (tol 1e-08)")


def _check_fundamental_residual():
    sizes = (512, 1024, 2048, 4096)
    residuals = [verify_fundamental(1.0, 1.0, N) for N in sizes]
    ratios = [residuals[i] / residuals[i + 1] for i in range(len(sizes) - 1)]
    ok = all(1.7 <= r <= 2.3 for r in ratios)
    return CheckResult(
        "fundamental_residual", ok,
        "elliptic-identity residual halves per grid doubling: ratios = "
        + ", ".join(f"{r:.3f}" for r in ratios) + " (expected in [1.7, 2.3])")


def _check_interpolation():
    a, b = 1.0, math.cosh(2.0)
    n = 12
    rng = np.random.default_rng(20240601)
    c = rng.normal(size=3)

    def t(x):
        return (2.0 * x - (a + b)) / (b - a)

    def F(x):
        return np.exp(0.4 * c[0] * np.sin(2.0 * t(x))) + c[1] * np.cos(3.0 * t(x)) + c[2]

    nodes = cheb_nodes(n + 1, a, b)
    coeffs = lagrange_poly_coeffs(F(nodes), n, a, b)
    recon = np.polyval(coeffs[::-1], nodes)
    rel = np.max(np.abs(recon - F(nodes)) / np.max(np.abs(F(nodes))))
    ok = rel <= 1e-9
    return CheckResult(
        "interpolation_exactness", ok,
        f"degree-{n} interpolant at its own nodes: relative error = "
        f"{rel:.2e} (tol 1e-09)")


def _check_convolution_paths():
    grid = PeriodicGrid(L=1.0, N=512)
    kernel = MexicanHat(d1=0.1, d2=3.0, L=1.0)
    rng = np.random.default_rng(20240602)
    u = PeriodicField(grid, 1.0 + 0.5 * rng.standard_normal(grid.N))
    fft_vals = convolve(kernel, u, method="fft").values
    direct_vals = convolve(kernel, u, method="direct").values
    dev = float(np.max(np.abs(fft_vals - direct_vals)))
    scale = max(1.0, float(np.max(np.abs(fft_vals))))
    ok = dev <= 1e-12 * scale
    return CheckResult(
        "convolution_paths", ok,
        f"transform vs direct circular convolution: max deviation = "
        f"{dev:.2e} (tol {1e-12 * scale:.0e})")


def _check_basis_identities(corrupt):
    x = np.linspace(-1.0, 1.0, 100)
    worst = 0.0
    for n in range(11):
        delta = np.array(mono_to_cheb(n), dtype=float)
        if corrupt and n == 10:
            delta[0] += 1e-6  # deliberate corruption: exercises failure path
        recon = np.polynomial.chebyshev.chebval(x, delta)
        worst = max(worst, float(np.max(np.abs(recon - x ** n))))
    ok = worst <= 1e-10
    suffix = " [corrupted table requested]" if corrupt else ""
    return CheckResult(
        "basis_identities", ok,
        f"monomial-to-Chebyshev identity x^n = sum delta_j T_j for n <= 10: "
        f"max deviation = {worst:.2e} (tol 1e-10){suffix}")


def run_battery(corrupt=False):
    """Run every check; returns the list of CheckResult in fixed order."""
    return [
        _check_kernel_mass(),
        _check_kernel_derivative_norms(),
        _check_fundamental_residual(),
        _check_interpolation(),
        _check_convolution_paths(),
        _check_basis_identities(corrupt),
    ]
