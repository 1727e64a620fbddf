"""Time marching for the nonlocal Fokker-Planck equation

    rho_t = rho_xx - mu (rho (W * rho)_x)_x

and its (M+1)-component Keller-Segel approximation

    rho_t = rho_xx - mu (rho (sum_j a_j v_j)_x)_x,
    eps (v_j)_t = d_j (v_j)_xx - v_j + rho.

One step applies, in order: the v-relaxation substep (KS only), the
explicit conservative upwind advection with the freshly updated
potential, and the implicit diffusion solve.  First-order splitting;
paired comparisons run both models at the same fixed dt so the
splitting bias largely cancels in differences.

The v substep treats rho as frozen and advances each Fourier mode of
v_j exactly: mode n relaxes toward rho_n/(d_j sigma_n^2 + 1) with
factor exp(-(d_j sigma_n^2 + 1) dt / eps).  This is unconditionally
stable, so dt is governed by the advection CFL alone and the eps
ladder stays affordable.  d_j = inf is the exact constant-kernel
limit: every nonzero mode of v_j is annihilated and the mean tracks
mass/(2L) at rate 1/eps.

dt "auto" re-evaluates dt = min(0.4 dx / max|u_face|, 10 dx^2) every
step from the current face velocities (mu included), clipped to land
on t_end exactly.  Runs abort with BlowUpError once max|rho| exceeds
1e6 times its initial value (aggregation-dominated regimes can
concentrate in finite time).
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .chebfit import KSParams
from .errors import BlowUpError, ConfigError
from .pde_core import (
    PeriodicField,
    PeriodicGrid,
    convolve,
    diffusion_step_implicit,
    flux_divergence,
    sample_kernel,
    solve_elliptic,
)

CFL_NUMBER = 0.4
DT_CAP_CELLS = 10.0          # auto dt never exceeds 10 dx^2
BLOWUP_FACTOR = 1e6


@dataclass(frozen=True)
class NonlocalFP:
    """Aggregation model rho_t = rho_xx - mu (rho (W*rho)_x)_x."""

    kernel: object
    mu: float

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu >= 0):
            raise ConfigError(f"mu must be >= 0, got {self.mu}", field="model.mu")


@dataclass(frozen=True)
class KellerSegel:
    """Chemotaxis approximation with weights/diffusivities from KSParams."""

    params: KSParams


@dataclass(frozen=True)
class PerturbedConstant:
    """base + seeded multi-mode perturbation, normalized to `amplitude`.

    The perturbation is sum_{n=1}^{N/8} c_n cos(sigma_n x + phi_n) with
    seeded Gaussian c_n and uniform phases, rescaled so its sup equals
    `amplitude`.  Deterministic for a given seed and grid.
    """

    base: float = 1.0
    amplitude: float = 1e-3
    seed: int = 0


@dataclass(frozen=True)
class CosineMode:
    """base + amplitude * cos(sigma_mode x)."""

    base: float
    amplitude: float
    mode: int


@dataclass(frozen=True)
class SampledInit:
    """Explicit cell values (tuple, one per cell)."""

    values: tuple


def build_initial(descriptor, grid):
    if isinstance(descriptor, PeriodicField):
        if descriptor.grid != grid:
            raise ConfigError("initial field lives on a different grid")
        return descriptor
    if isinstance(descriptor, PerturbedConstant):
        rng = np.random.default_rng(descriptor.seed)
        nmax = grid.N // 8
        c = rng.normal(size=nmax)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=nmax)
        x = grid.centers
        xi = np.zeros(grid.N)
        for n in range(1, nmax + 1):
            xi += c[n - 1] * np.cos(grid.sigma(n) * x + phases[n - 1])
        peak = np.max(np.abs(xi))
        if peak > 0:
            xi *= descriptor.amplitude / peak
        return PeriodicField(grid, descriptor.base + xi)
    if isinstance(descriptor, CosineMode):
        vals = descriptor.base + descriptor.amplitude * np.cos(
            grid.sigma(descriptor.mode) * grid.centers
        )
        return PeriodicField(grid, vals)
    if isinstance(descriptor, SampledInit):
        return PeriodicField(grid, np.asarray(descriptor.values, dtype=float))
    raise ConfigError(f"unknown initial-datum descriptor {type(descriptor).__name__}")


@dataclass(frozen=True)
class SimConfig:
    grid: PeriodicGrid
    model: object
    rho0: object
    t_end: float
    dt: object = "auto"
    save_every: int = 1
    v0: tuple = None

    def __post_init__(self):
        if not (np.isfinite(self.t_end) and self.t_end > 0):
            raise ConfigError(f"t_end must be positive, got {self.t_end}", field="time.t_end")
        if self.dt != "auto":
            if not (isinstance(self.dt, (int, float)) and np.isfinite(self.dt) and self.dt > 0):
                raise ConfigError(f"dt must be positive or 'auto', got {self.dt!r}", field="time.dt")
        if not (isinstance(self.save_every, int) and self.save_every >= 1):
            raise ConfigError(
                f"save_every must be a positive integer, got {self.save_every}",
                field="time.save_every",
            )
        if not isinstance(self.model, (NonlocalFP, KellerSegel)):
            raise ConfigError(f"unknown model {type(self.model).__name__}", field="model.type")
        if self.v0 is not None:
            if not isinstance(self.model, KellerSegel):
                raise ConfigError("v0 given but the model has no v components", field="init")
            if len(self.v0) != self.model.params.M:
                raise ConfigError(
                    f"v0 needs {self.model.params.M} fields, got {len(self.v0)}", field="init"
                )


@dataclass(frozen=True)
class Trajectory:
    """Snapshots plus per-step conservation/step-size logs.

    times/snapshots (and v_snapshots for KS runs) are aligned; mass_log
    and dt_log are per step (lengths n_steps+1 and n_steps).
    """

    times: np.ndarray
    snapshots: tuple
    v_snapshots: tuple
    mass_log: np.ndarray
    dt_log: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ConfigError("snapshot times must be strictly increasing")
        m = np.asarray(self.mass_log, dtype=float)
        if np.max(np.abs(m - m[0])) > 1e-11 * max(abs(m[0]), 1e-12):
            raise ConfigError("mass log drifted beyond 1e-11 relative")

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def final(self):
        return self.snapshots[-1]


def v_relaxation_step(v, rho, d, eps, dt):
    """Exact frozen-rho relaxation of one chemical component.

    Mode n moves toward rho_n/(d sigma_n^2 + 1) with factor
    exp(-(d sigma_n^2 + 1) dt / eps).  d = inf annihilates every
    nonzero mode and relaxes the mean toward mass/(2L) at rate 1/eps.
    """
    grid = rho.grid
    sig = grid.rfft_sigma
    if math.isinf(d):
        lam = np.full(sig.size, np.inf)
        lam[0] = 1.0
    else:
        lam = d * sig**2 + 1.0
    rho_hat = np.fft.rfft(rho.values)
    v_hat = np.fft.rfft(v.values)
    target = np.where(np.isinf(lam), 0.0, rho_hat / lam)
    decay = np.exp(-lam * dt / eps)
    new_hat = target + (v_hat - target) * decay
    return PeriodicField(grid, np.fft.irfft(new_hat, n=grid.N))


def _max_face_speed(potential):
    phi = potential.values
    return float(np.max(np.abs((np.roll(phi, -1) - phi) / potential.grid.dx)))


def _march(config):
    grid = config.grid
    rho = build_initial(config.rho0, grid)
    model = config.model
    is_ks = isinstance(model, KellerSegel)

    if is_ks:
        p = model.params
        mu = p.mu
        if config.v0 is not None:
            v = list(config.v0)
            for vj in v:
                if vj.grid != grid:
                    raise ConfigError("v0 fields live on a different grid")
        else:
            v = [solve_elliptic(rho, dj) for dj in p.d]

        def potential_of():
            acc = np.zeros(grid.N)
            for aj, vj in zip(p.a, v):
                acc += aj * vj.values
            return PeriodicField(grid, mu * acc)

    else:
        mu = model.mu
        table = sample_kernel(model.kernel, grid)

        def potential_of():
            return PeriodicField(grid, mu * convolve(table, rho).values)

    t = 0.0
    step = 0
    times = [0.0]
    snapshots = [rho]
    v_snapshots = [tuple(v)] if is_ks else None
    mass_log = [rho.mass]
    dt_log = []
    ceiling = BLOWUP_FACTOR * max(np.max(np.abs(rho.values)), 1e-30)
    dt_cap = DT_CAP_CELLS * grid.dx**2

    while t < config.t_end * (1.0 - 1e-13):
        pot = potential_of()
        if config.dt == "auto":
            speed = _max_face_speed(pot)
            dt = min(CFL_NUMBER * grid.dx / speed, dt_cap) if speed > 0 else dt_cap
        else:
            dt = float(config.dt)
        dt = min(dt, config.t_end - t)

        if is_ks:
            v = [v_relaxation_step(vj, rho, dj, p.eps, dt) for vj, dj in zip(v, p.d)]
            pot = potential_of()

        advected = rho.values - dt * flux_divergence(rho, pot).values
        rho = diffusion_step_implicit(PeriodicField(grid, advected), dt)

        t += dt
        step += 1
        peak = float(np.max(np.abs(rho.values)))
        if peak > ceiling:
            raise BlowUpError(
                f"solution reached max|rho| = {peak:.3e} at t = {t:.6g} "
                f"(step {step}); aborting (blow-up guard)",
                t=t,
                step=step,
                max_value=peak,
            )
        mass_log.append(rho.mass)
        dt_log.append(dt)
        if step % config.save_every == 0 or t >= config.t_end * (1.0 - 1e-13):
            if t > times[-1]:
                times.append(t)
                snapshots.append(rho)
                if is_ks:
                    v_snapshots.append(tuple(v))

    return Trajectory(
        times=np.asarray(times),
        snapshots=tuple(snapshots),
        v_snapshots=tuple(v_snapshots) if is_ks else None,
        mass_log=np.asarray(mass_log),
        dt_log=np.asarray(dt_log),
    )


def solve_nonlocal_fp(config):
    if not isinstance(config.model, NonlocalFP):
        raise ConfigError("solve_nonlocal_fp needs a NonlocalFP model", field="model.type")
    return _march(config)


def solve_ks(config):
    if not isinstance(config.model, KellerSegel):
        raise ConfigError("solve_ks needs a KellerSegel model", field="model.type")
    return _march(config)


def paired_run(config_a, config_b, rho0=None):
    """Run two configs with identical grids, spans, and snapshot times.

    Both configs must share the grid, t_end, save_every, and the same
    fixed numeric dt (snapshot alignment is by construction, so "auto"
    stepping is rejected).  An optional shared rho0 overrides both.
    """
    if config_a.grid != config_b.grid:
        raise ConfigError("paired runs need identical grids")
    if config_a.t_end != config_b.t_end:
        raise ConfigError("paired runs need identical t_end")
    if config_a.save_every != config_b.save_every:
        raise ConfigError("paired runs need identical snapshot strides")
    if config_a.dt == "auto" or config_a.dt != config_b.dt:
        raise ConfigError("paired runs need the same fixed numeric dt")
    if rho0 is not None:
        config_a = replace(config_a, rho0=rho0)
        config_b = replace(config_b, rho0=rho0)
    return _march(config_a), _march(config_b)
