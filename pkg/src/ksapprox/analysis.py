"""Error functionals, Fourier coefficients, dispersion relations, and the
2-/3-component eigenvalue analyses around the constant steady state.

Conventions.  Mode n has wavenumber sigma_n = pi n / L.  The Fourier
coefficient of a kernel is

    omega_n = (1/sqrt(2L)) int_{-L}^{L} W(x) e^{-i sigma_n x} dx,

real for the even kernels handled here.  Linearizing around rho* = 1
(the "replace mu rho* by mu" convention; pass rho_star to restore the
general factor) gives the scalar dispersion relation

    lambda(n) = -sigma_n^2 (1 - sqrt(2L) mu omega_n),

with lambda(0) = 0, and the instability threshold for mode n1 at
mu_* = 1/(sqrt(2L) omega_{n1}).

For the chemotaxis approximations the linearization couples rho with
the v components.  With W = k_1 (one component) the characteristic
polynomial is

    P1(lambda) = lambda^2 + (C30/eps + C31) lambda + C32/eps,
    C30 = d1 s + 1,  C31 = s,  C32 = d1 s^2 + s - mu s   (s = sigma_n^2);

its bounded root alpha_eps is evaluated by the cancellation-free
quotient  -2 C32 / ((C30 + eps C31) + sqrt((C30 - eps C31)^2
+ 4 eps mu s))  and converges to alpha_0 = -s (1 - mu/(d1 s + 1)) at
rate O(eps).  With W = k_1 - k_2 (attraction-repulsion) the cubic

    P2(lambda) = -lambda^3 - (C31 + C33/eps) lambda^2
                 - (C34/eps^2 + C35/eps) lambda - C36/eps^2,
    C33 = 2 + (d1 + d2) s,          C34 = (1 + d1 s)(1 + d2 s),
    C35 = s C33,                    C36 = s C34 + mu (d1 - d2) s^2,

has exactly one root bounded as eps -> 0, converging to
lambda_0 = -s + mu (d2 - d1) s^2 / C34, which equals the scalar
dispersion relation with the two-kernel difference -- the same
formula reached two ways.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .chebfit import KSParams
from .errors import ConfigError
from .kernels import (
    Attract,
    AttractRepel,
    BesselFund,
    ConstantLimit,
    LinearSum,
    MexicanHat,
    SampledKernel,
    kernel_eval,
)
from .pde_core import PeriodicGrid, solve_elliptic
from .solvers import KellerSegel, NonlocalFP, paired_run

QUADRATURE_N = 8192


# --------------------------------------------------------------------- norms


def l2_norm(grid, values):
    """Discrete L2 norm sqrt(dx sum v_i^2)."""
    return math.sqrt(grid.dx * float(np.sum(np.asarray(values) ** 2)))


def h1_norm(grid, values):
    """l2_norm plus the centered-difference derivative seminorm."""
    v = np.asarray(values)
    dv = (np.roll(v, -1) - np.roll(v, 1)) / (2.0 * grid.dx)
    return math.sqrt(grid.dx * float(np.sum(v**2) + np.sum(dv**2)))


@dataclass(frozen=True)
class ErrorReport:
    """Trajectory-difference norms: max-in-time and trapezoid-in-time."""

    sup_t_l2: float
    l2_t_h1: float
    times: np.ndarray
    l2_series: np.ndarray
    h1_series: np.ndarray


def error_norms(traj_a, traj_b):
    """Difference norms for two trajectories on aligned snapshot times."""
    if traj_a.grid != traj_b.grid:
        raise ConfigError("trajectories live on different grids")
    ta, tb = np.asarray(traj_a.times), np.asarray(traj_b.times)
    if ta.shape != tb.shape or not np.array_equal(ta, tb):
        raise ConfigError("trajectories have misaligned snapshot times")
    grid = traj_a.grid
    l2s, h1s = [], []
    for a, b in zip(traj_a.snapshots, traj_b.snapshots):
        diff = a.values - b.values
        l2s.append(l2_norm(grid, diff))
        h1s.append(h1_norm(grid, diff))
    l2s, h1s = np.array(l2s), np.array(h1s)
    h1sq = h1s**2
    l2_t_h1 = math.sqrt(float(np.sum(0.5 * (h1sq[1:] + h1sq[:-1]) * np.diff(ta))))
    return ErrorReport(
        sup_t_l2=float(np.max(l2s)),
        l2_t_h1=l2_t_h1,
        times=ta,
        l2_series=l2s,
        h1_series=h1s,
    )


def v_error_norms(traj_ks, traj_fp, d):
    """sup_t L2 distance of each v_j from k_j * rho along the reference run.

    The reference k_j * rho(t) is the elliptic filter applied to the
    nonlocal-FP snapshot, i.e. the exact steady state the v equation
    relaxes toward; d is the sequence of diffusivities (inf allowed).
    """
    if traj_ks.v_snapshots is None:
        raise ConfigError("first trajectory has no v components")
    if not np.array_equal(np.asarray(traj_ks.times), np.asarray(traj_fp.times)):
        raise ConfigError("trajectories have misaligned snapshot times")
    grid = traj_fp.grid
    sups = [0.0] * len(d)
    for vs, rho in zip(traj_ks.v_snapshots, traj_fp.snapshots):
        for j, dj in enumerate(d):
            target = solve_elliptic(rho, dj)
            sups[j] = max(sups[j], l2_norm(grid, vs[j].values - target.values))
    return tuple(sups)


# --------------------------------------------------------- Fourier / lambda


def _quadrature_omega(kernel, n, L):
    grid_n = QUADRATURE_N
    if isinstance(kernel, SampledKernel):
        grid_n = len(kernel.values)
        if abs(n) > grid_n // 2:
            raise ConfigError(f"mode {n} exceeds Nyquist for {grid_n} samples")
    dx = 2.0 * L / grid_n
    x = np.mod(np.arange(grid_n) * dx + L, 2.0 * L) - L
    w = kernel_eval(kernel, x)
    sig = np.pi * n / L
    val = dx * np.sum(w * np.exp(-1j * sig * x)) / math.sqrt(2.0 * L)
    return float(val.real)


def fourier_coefficient(kernel, n, L=None):
    """omega_n of an even kernel (real); closed forms where available.

    BesselFund, MexicanHat, ConstantLimit, LinearSum, and Attract use
    exact formulas; AttractRepel and SampledKernel fall back to the
    trapezoid rule on the sampling lattice (spectrally accurate up to
    the kink penalty, mitigated by the 8192-point default).
    """
    kL = getattr(kernel, "L", None)
    if L is None:
        L = kL
    elif kL is not None and kL != L:
        raise ConfigError(f"kernel has L={kL}, asked for L={L}")
    sig = np.pi * n / L
    root = math.sqrt(2.0 * L)
    if isinstance(kernel, BesselFund):
        return 1.0 / (root * (kernel.d * sig**2 + 1.0))
    if isinstance(kernel, MexicanHat):
        return (1.0 / (kernel.d1 * sig**2 + 1.0) - 1.0 / (kernel.d2 * sig**2 + 1.0)) / root
    if isinstance(kernel, ConstantLimit):
        return 1.0 / root if n == 0 else 0.0
    if isinstance(kernel, LinearSum):
        total = 0.0
        for a, d in kernel.terms:
            if math.isinf(d):
                total += a / root if n == 0 else 0.0
            else:
                total += a / (root * (d * sig**2 + 1.0))
        return total
    if isinstance(kernel, Attract):
        if n == 0:
            return kernel.R0**2 / root   # removable singularity
        return math.sqrt(2.0 / L) * (1.0 - math.cos(kernel.R0 * sig)) / sig**2
    return _quadrature_omega(kernel, n, L)


def dispersion_lambda(kernel, n, mu, L=None, rho_star=None):
    """lambda(n) = -sigma_n^2 (1 - sqrt(2L) mu omega_n); lambda(0) = 0.

    rho_star=None uses mu directly (the replaced-mu convention);
    passing a value multiplies mu by it, restoring the general
    linearization factor.
    """
    if mu < 0:
        raise ConfigError(f"mu must be >= 0, got {mu}")
    if n == 0:
        return 0.0
    kL = getattr(kernel, "L", None)
    eff_mu = mu if rho_star is None else mu * rho_star
    Lv = kL if L is None else L
    sig = np.pi * n / Lv
    omega = fourier_coefficient(kernel, n, L)
    return float(-(sig**2) * (1.0 - math.sqrt(2.0 * Lv) * eff_mu * omega))


@dataclass(frozen=True)
class DispersionCurve:
    modes: np.ndarray
    omega: np.ndarray
    lam: np.ndarray
    n_star: int

    @property
    def unstable_band(self):
        """Modes n >= 1 with lambda(n) > 0 (reported as computed)."""
        return self.modes[(self.lam > 0) & (self.modes > 0)]


def dispersion_curve(kernel, mu, L=None, n_max=64, rho_star=None):
    modes = np.arange(n_max + 1)
    omega = np.array([fourier_coefficient(kernel, int(n), L) for n in modes])
    lam = np.array(
        [dispersion_lambda(kernel, int(n), mu, L, rho_star=rho_star) for n in modes]
    )
    n_star = int(modes[1:][np.argmax(lam[1:])])
    return DispersionCurve(modes=modes, omega=omega, lam=lam, n_star=n_star)


def critical_mu(kernel, n1, L=None):
    """Smallest mu destabilizing mode n1: mu_* = 1/(sqrt(2L) omega_{n1})."""
    kL = getattr(kernel, "L", None)
    Lv = kL if L is None else L
    omega = fourier_coefficient(kernel, n1, L)
    if omega <= 0:
        raise ConfigError(
            f"mode {n1} is not destabilizable (omega_n = {omega:.3e} <= 0)"
        )
    return 1.0 / (math.sqrt(2.0 * Lv) * omega)


# ----------------------------------------------- component eigen-analyses


def alpha_zero(n, mu, d1, L):
    """eps -> 0 limit of the bounded two-component eigenvalue."""
    s = (np.pi * n / L) ** 2
    return -s * (1.0 - mu / (d1 * s + 1.0))


def two_component_eigs(n, eps, mu, d1, L):
    """Both eigenvalues of the (rho, v1) linearization at mode n.

    Returns (alpha_eps, beta_eps): alpha_eps bounded as eps -> 0 and
    computed by the cancellation-free quotient; beta_eps ~ -C30/eps.
    """
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    s = (np.pi * n / L) ** 2
    c30 = d1 * s + 1.0
    c31 = s
    c32 = d1 * s**2 + s - mu * s
    disc = (c30 - eps * c31) ** 2 + 4.0 * eps * mu * s
    if disc < 0:
        raise ConfigError("complex eigenvalues (negative discriminant)")
    root = math.sqrt(disc)
    alpha = -2.0 * c32 / ((c30 + eps * c31) + root)
    beta = -0.5 * ((c30 / eps + c31) + root / eps)
    return alpha, beta


def two_component_residual(lam, n, eps, mu, d1, L):
    """|P1(lam)| relative to the magnitude of its largest term."""
    s = (np.pi * n / L) ** 2
    b = (d1 * s + 1.0) / eps + s
    c = (d1 * s**2 + s - mu * s) / eps
    val = lam * lam + b * lam + c
    scale = max(abs(lam * lam), abs(b * lam), abs(c), 1e-300)
    return abs(val) / scale


def three_component_lambda(n, eps, mu, d1, d2, L):
    """Roots of the cubic (rho, v1, v2) characteristic polynomial.

    Returns (roots, lambda_0): roots sorted by descending real part
    (the first is the bounded one for small eps), and the eps -> 0
    limit lambda_0 = -s + mu (d2 - d1) s^2 / ((1 + d1 s)(1 + d2 s)).
    d1 = d2 degenerates gracefully to lambda_0 = -s.
    """
    if eps <= 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    s = (np.pi * n / L) ** 2
    c31 = s
    c33 = 2.0 + (d1 + d2) * s
    c34 = (1.0 + d1 * s) * (1.0 + d2 * s)
    c35 = s * c33
    c36 = s * c34 + mu * (d1 - d2) * s**2
    coeffs = [1.0, c31 + c33 / eps, c34 / eps**2 + c35 / eps, c36 / eps**2]
    if not np.all(np.isfinite(coeffs)):
        raise ConfigError("non-finite characteristic-polynomial coefficients")
    roots = np.roots(coeffs)
    roots = roots[np.argsort(-roots.real)]
    lam0 = -s + mu * (d2 - d1) * s**2 / c34
    return roots, lam0


def three_component_residual(lam, n, eps, mu, d1, d2, L):
    """|P2(lam)| relative to the magnitude of its largest term."""
    s = (np.pi * n / L) ** 2
    c31 = s
    c33 = 2.0 + (d1 + d2) * s
    c34 = (1.0 + d1 * s) * (1.0 + d2 * s)
    c35 = s * c33
    c36 = s * c34 + mu * (d1 - d2) * s**2
    terms = [
        -(lam**3),
        -(c31 + c33 / eps) * lam**2,
        -(c34 / eps**2 + c35 / eps) * lam,
        -c36 / eps**2,
    ]
    scale = max(max(abs(t) for t in terms), 1e-300)
    return abs(sum(terms)) / scale


# ---------------------------------------------------------- empirical rates


def growth_rate_measure(traj, n, window):
    """OLS slope of log |mode-n amplitude| over snapshots in the window.

    Guards: at least 8 snapshots in the window, amplitude above 1e-14
    (mode present), and every windowed snapshot inside the linear
    regime (perturbation sup below 1e-2 of the mean level).
    """
    t0, t1 = window
    times = np.asarray(traj.times)
    sel = (times >= t0) & (times <= t1)
    if int(np.sum(sel)) < 8:
        raise ConfigError(
            f"window [{t0}, {t1}] holds {int(np.sum(sel))} snapshots; need >= 8"
        )
    grid = traj.grid
    amps, ts = [], []
    for t, snap in zip(times, traj.snapshots):
        if not (t0 <= t <= t1):
            continue
        mean = snap.mass / (2.0 * grid.L)
        pert = float(np.max(np.abs(snap.values - mean)))
        if pert > 1e-2 * abs(mean):
            raise ConfigError(
                f"snapshot at t={t:.6g} is outside the linear regime "
                f"(perturbation {pert:.2e} > 1e-2 * mean {mean:.2e})"
            )
        amp = 2.0 * abs(np.fft.rfft(snap.values)[n]) / grid.N
        if amp < 1e-14:
            raise ConfigError(f"mode {n} amplitude {amp:.2e} below 1e-14 at t={t:.6g}")
        amps.append(amp)
        ts.append(t)
    slope = np.polyfit(np.asarray(ts), np.log(np.asarray(amps)), 1)[0]
    return float(slope)


# ------------------------------------------------------- eps convergence


def ks_params_for_kernel(kernel, eps, mu):
    """Exact KS coefficients for kernels already of the form sum a_j k_{d_j}."""
    if isinstance(kernel, BesselFund):
        return KSParams(M=1, a=(1.0,), d=(kernel.d,), eps=eps, mu=mu)
    if isinstance(kernel, MexicanHat):
        return KSParams(M=2, a=(1.0, -1.0), d=(kernel.d1, kernel.d2), eps=eps, mu=mu)
    if isinstance(kernel, ConstantLimit):
        return KSParams(M=1, a=(1.0,), d=(math.inf,), eps=eps, mu=mu)
    if isinstance(kernel, LinearSum):
        a = tuple(float(t[0]) for t in kernel.terms)
        d = tuple(float(t[1]) for t in kernel.terms)
        return KSParams(M=len(a), a=a, d=d, eps=eps, mu=mu)
    raise ConfigError(
        f"{type(kernel).__name__} has no exact component form; expand it first"
    )


@dataclass(frozen=True)
class ConvergenceResult:
    eps: np.ndarray
    errors: np.ndarray          # sup_t L2(rho_eps - rho) per eps
    h1_errors: np.ndarray       # L2-in-time H1 error per eps
    v_errors: tuple             # per eps: tuple of sup_t L2(v_j - k_j*rho)
    slope: float
    fit_residual: float


def _paired_error(args):
    config_fp, eps = args
    params = ks_params_for_kernel(config_fp.model.kernel, eps, config_fp.model.mu)
    config_ks = replace(config_fp, model=KellerSegel(params))
    traj_fp, traj_ks = paired_run(config_fp, config_ks)
    report = error_norms(traj_fp, traj_ks)
    v_errs = v_error_norms(traj_ks, traj_fp, params.d)
    return report.sup_t_l2, report.l2_t_h1, v_errs


def convergence_study(base_config, eps_ladder, workers=1):
    """Paired FP/KS error against eps, with a log-log slope fit.

    base_config is a NonlocalFP SimConfig with a fixed numeric dt; its
    kernel must have an exact component form (see ks_params_for_kernel).
    The ladder needs >= 3 distinct eps spanning >= 1.5 decades.  Runs
    fan out over processes when workers > 1; results are ordered by
    descending eps regardless.
    """
    if not isinstance(base_config.model, NonlocalFP):
        raise ConfigError("convergence_study needs a NonlocalFP base config")
    if base_config.dt == "auto":
        raise ConfigError("convergence_study needs a fixed numeric dt", field="time.dt")
    eps = np.asarray(sorted(set(float(e) for e in eps_ladder), reverse=True))
    if eps.size < 3 or eps.size != len(eps_ladder):
        raise ConfigError(
            f"need >= 3 distinct eps values, got {list(eps_ladder)}", field="converge.eps"
        )
    if np.log10(eps[0] / eps[-1]) < 1.5:
        raise ConfigError(
            f"ladder must span >= 1.5 decades, got {np.log10(eps[0] / eps[-1]):.2f}",
            field="converge.eps",
        )
    jobs = [(base_config, float(e)) for e in eps]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_paired_error, jobs))
    else:
        results = [_paired_error(j) for j in jobs]
    errors = np.array([r[0] for r in results])
    h1_errors = np.array([r[1] for r in results])
    v_errors = tuple(r[2] for r in results)
    fit = np.polyfit(np.log(eps), np.log(errors), 1)
    slope = float(fit[0])
    resid = float(
        np.sqrt(np.mean((np.polyval(fit, np.log(eps)) - np.log(errors)) ** 2))
    )
    return ConvergenceResult(
        eps=eps,
        errors=errors,
        h1_errors=h1_errors,
        v_errors=v_errors,
        slope=slope,
        fit_residual=resid,
    )
