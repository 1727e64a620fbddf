"""Uniform periodic grid/field substrate and discrete operators.

The domain is [-L, L) with period 2L, split into N cells of width
dx = 2L/N with centers x_i = -L + (i + 1/2) dx.  x = 0 is a cell
*boundary*, so data sampled at centers never sits on the derivative
kink of the fundamental kernels.

Convolution kernel tables are indexed by lattice separation:
table[k] = W(k dx) wrapped periodically, so index 0 means zero
separation (table[0] = W(0) is well-defined -- the kernels are
continuous, only their derivative jumps).  The discrete convolution

    (W * u)_i = dx * sum_m table[(i - m) mod N] * u_m

is then the midpoint quadrature of the periodic integral
int W(x_i - y) u(y) dy.

Fourier conventions: mode n has wavenumber sigma_n = pi n / L.  The
implicit diffusion step uses the circulant second-difference symbol
(2/dx^2)(1 - cos(2 pi k / N)); the spectral reference step and the
elliptic filter use the exact symbol sigma_n^2.
"""

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .kernels import kernel_eval

SNAPSHOT_MAGIC = b"KSSNAP01"


@dataclass(frozen=True)
class PeriodicGrid:
    """N cells of width 2L/N on [-L, L); N a power of two, N >= 16."""

    L: float
    N: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ConfigError("half-length L must be positive and finite", field="grid.L")
        if self.N < 16 or (self.N & (self.N - 1)) != 0:
            raise ConfigError(
                f"cell count must be a power of two >= 16, got {self.N}", field="grid.N"
            )

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def centers(self):
        return -self.L + (np.arange(self.N) + 0.5) * self.dx

    @property
    def offsets(self):
        """Separation lattice {k dx} wrapped into [-L, L); offsets[0] = 0."""
        s = np.arange(self.N) * self.dx
        return np.mod(s + self.L, 2.0 * self.L) - self.L

    def sigma(self, n):
        """Wavenumber of Fourier mode n on the 2L-periodic domain."""
        return np.pi * np.asarray(n, dtype=float) / self.L

    @property
    def rfft_sigma(self):
        """sigma_n for the rfft bins n = 0 .. N/2."""
        return np.pi * np.arange(self.N // 2 + 1) / self.L


@dataclass(frozen=True, eq=False)
class PeriodicField:
    """Immutable vector of N cell values bound to a grid."""

    grid: PeriodicGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.shape != (self.grid.N,):
            raise ConfigError(
                f"field needs {self.grid.N} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ConfigError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def mass(self):
        return float(self.grid.dx * np.sum(self.values))

    def with_values(self, values):
        return PeriodicField(self.grid, values)


def field_from_function(grid, f):
    return PeriodicField(grid, np.asarray(f(grid.centers), dtype=float))


def constant_field(grid, value):
    return PeriodicField(grid, np.full(grid.N, float(value)))


def sample_kernel(spec, grid):
    """Kernel table on the separation lattice, as a PeriodicField."""
    if getattr(spec, "L", None) != grid.L:
        raise ConfigError(
            f"kernel half-length {getattr(spec, 'L', None)} does not match grid L={grid.L}"
        )
    return PeriodicField(grid, kernel_eval(spec, grid.offsets))


def _kernel_table(kernel, grid):
    if isinstance(kernel, PeriodicField):
        if kernel.grid != grid:
            raise ConfigError("kernel field and input field live on different grids")
        return kernel.values
    return sample_kernel(kernel, grid).values


def convolve(kernel, u, method="fft"):
    """Discrete periodic convolution (W * u)_i = dx sum_m W[(i-m) % N] u_m.

    kernel: a KernelSpec (sampled on the separation lattice) or a
    PeriodicField already holding a separation table.  method: "fft"
    (circulant diagonalization) or "direct" (O(N^2) roll accumulation;
    exactly shift-equivariant).
    """
    table = _kernel_table(kernel, u.grid)
    vals = u.values
    if method == "fft":
        out = np.fft.irfft(np.fft.rfft(table) * np.fft.rfft(vals), n=u.grid.N)
    elif method == "direct":
        out = np.zeros_like(vals)
        for k in range(u.grid.N):
            if table[k] != 0.0:
                out += table[k] * np.roll(vals, k)
    else:
        raise ConfigError(f"unknown convolution method {method!r}")
    return PeriodicField(u.grid, u.grid.dx * out)


def flux_divergence(rho, potential):
    """Conservative upwind discretization of d/dx(rho d(potential)/dx).

    Face velocities are central differences of the potential; the face
    density is upwinded.  The result telescopes: sum(output) = 0 to
    rounding, so the advection substep conserves mass exactly.
    """
    if rho.grid != potential.grid:
        raise ConfigError("rho and potential live on different grids")
    dx = rho.grid.dx
    phi = potential.values
    r = rho.values
    u_face = (np.roll(phi, -1) - phi) / dx          # velocity at x_{i+1/2}
    rho_face = np.where(u_face >= 0.0, r, np.roll(r, -1))
    F = u_face * rho_face
    return PeriodicField(rho.grid, (F - np.roll(F, 1)) / dx)


def diffusion_step_implicit(u, coeff):
    """Solve (I - coeff D^2) u_new = u with periodic second differences.

    coeff is diffusivity*dt (>= 0).  Mass-preserving: the zero mode has
    symbol 0.  A contraction on the zero-mean subspace.
    """
    if coeff < 0:
        raise ConfigError(f"diffusion coefficient must be >= 0, got {coeff}")
    if coeff == 0:
        return u
    N, dx = u.grid.N, u.grid.dx
    lam = (2.0 / dx**2) * (1.0 - np.cos(2.0 * np.pi * np.arange(N // 2 + 1) / N))
    uhat = np.fft.rfft(u.values) / (1.0 + coeff * lam)
    return PeriodicField(u.grid, np.fft.irfft(uhat, n=N))


def spectral_reference_step(u, t):
    """Exact heat semigroup: mode n multiplied by exp(-sigma_n^2 t).

    Cross-validation oracle for the marching solvers, not a production
    path (it has no advection term).
    """
    if t < 0:
        raise ConfigError(f"duration must be >= 0, got {t}")
    if t == 0:
        return u
    uhat = np.fft.rfft(u.values) * np.exp(-u.grid.rfft_sigma**2 * t)
    return PeriodicField(u.grid, np.fft.irfft(uhat, n=u.grid.N))


def solve_elliptic(u, d):
    """Solve -d v'' + v = u on the periodic domain via the exact symbol.

    Mode n of the solution is u_n / (d sigma_n^2 + 1) -- the spectral
    counterpart of convolving with the fundamental kernel k_d.  d = inf
    returns the constant field mass(u)/(2L) (only the mean survives).
    """
    if not d > 0:
        raise ConfigError(f"diffusivity must be positive, got {d}")
    if np.isinf(d):
        return constant_field(u.grid, u.mass / (2.0 * u.grid.L))
    uhat = np.fft.rfft(u.values) / (d * u.grid.rfft_sigma**2 + 1.0)
    return PeriodicField(u.grid, np.fft.irfft(uhat, n=u.grid.N))


def write_field_csv(path, field):
    """Two-column CSV (x, value), 17-significant-digit round-trip floats."""
    with open(path, "w", newline="\n") as fh:
        fh.write("x,value\n")
        for x, v in zip(field.grid.centers, field.values):
            fh.write(f"{x:.17g},{v:.17g}\n")


def write_snapshot(path, field, t):
    """Binary snapshot: magic, N (u64), L (f64), t (f64), N f64 values; little-endian."""
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Qdd", field.grid.N, field.grid.L, float(t)))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_snapshot(path):
    """Inverse of write_snapshot; returns (PeriodicField, t)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    head = len(SNAPSHOT_MAGIC) + struct.calcsize("<Qdd")
    if raw[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise ConfigError(f"{path}: not a snapshot file (bad magic)")
    N, L, t = struct.unpack("<Qdd", raw[len(SNAPSHOT_MAGIC) : head])
    payload = np.frombuffer(raw[head:], dtype="<f8")
    if payload.size != N:
        raise ConfigError(f"{path}: expected {N} values, found {payload.size}")
    return PeriodicField(PeriodicGrid(L=L, N=int(N)), payload.astype(float)), t
