"""Periodic interaction kernels on the interval [-L, L].

The basic building block is the fundamental solution of the periodic
elliptic problem

    -d * v'' + v = delta_0      on [-L, L], periodic,

which has the closed form

    k_d(x) = cosh((L - |x|)/sqrt(d)) / (2 sqrt(d) sinh(L/sqrt(d))).

k_d is even, positive, has unit mass over one period and a derivative
jump of -1/d at x = 0 (the kink).  Useful exact norms:

    ||k_d||_L1      = 1
    ||k_d'||_L1     = 2 c_d (cosh(L/sqrt(d)) - 1),  c_d = 1/(2 sqrt(d) sinh(L/sqrt(d)))
    ||k_d''||_L1    = 1/d        (k_d'' = k_d / d away from the kink)
    sup |k_d'|      = 1/(2d)     (attained in the limit x -> 0)

As d -> infinity, k_d -> 1/(2L) uniformly; the ``ConstantLimit`` variant
represents that limit exactly.

The remaining families are differences of fundamental solutions
(``MexicanHat``), compactly supported tent potentials (``Attract``,
``AttractRepel``), weighted sums of fundamental solutions (``LinearSum``)
and tabulated kernels (``SampledKernel``).  All evaluations wrap their
argument into [-L, L) first, so kernels may be queried anywhere on the
real line.

Sampled kernels store values on the offset lattice x_k = k * dx,
k = 0..N-1 (dx = 2L/N), wrapped periodically; index 0 sits at x = 0, so
an even kernel satisfies v[i] == v[(N - i) % N].  This is the lattice of
pairwise differences of the solver's cell centers, which is what
discrete convolution consumes.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# cosh overflows near 710; keep a documented safety floor on d relative to L.
COSH_ARG_MAX = 700.0


def wrap_periodic(x, L):
    """Map x (scalar or array) into the fundamental period [-L, L)."""
    return np.mod(np.asarray(x, dtype=float) + L, 2.0 * L) - L


def _check_dL(d, L):
    if not (L > 0):
        raise ConfigError(f"half-length L must be positive, got {L}")
    if not (d > 0):
        raise ConfigError(f"diffusivity d must be positive, got {d}")
    if math.isfinite(d) and L / math.sqrt(d) > COSH_ARG_MAX:
        raise ConfigError(
            f"L/sqrt(d) = {L / math.sqrt(d):.3g} exceeds {COSH_ARG_MAX}; "
            f"cosh would overflow (require d >= (L/{COSH_ARG_MAX})^2)"
        )


def eval_k(x, d, L):
    """Fundamental solution k_d at x (periodically wrapped).

    k_d(x) = c_d * cosh((L - |x|)/sqrt(d)) with
    c_d = 1 / (2 sqrt(d) sinh(L/sqrt(d))).
    """
    _check_dL(d, L)
    xw = wrap_periodic(x, L)
    s = math.sqrt(d)
    c = 1.0 / (2.0 * s * math.sinh(L / s))
    out = c * np.cosh((L - np.abs(xw)) / s)
    if np.ndim(x) == 0:
        return float(out)
    return out


def eval_k_deriv(x, d, L, order):
    """Derivative of the fundamental solution, order in {1, 2, 3}.

    Away from the kink

        k_d'(x)   = -sign(x) * (c_d/sqrt(d)) * sinh((L - |x|)/sqrt(d))
        k_d''(x)  = k_d(x) / d
        k_d'''(x) = k_d'(x) / d

    Odd orders are weak derivatives with a jump at x = 0: requesting them
    exactly at the (wrapped) kink raises ValueError, since no pointwise
    value is defined there.
    """
    _check_dL(d, L)
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    xw = wrap_periodic(x, L)
    if order == 2:
        return eval_k(x, d, L) / d
    if np.any(np.asarray(xw) == 0.0):
        raise ValueError(
            "odd-order derivative requested at the kink x = 0 "
            "(only one-sided limits exist there)"
        )
    s = math.sqrt(d)
    c = 1.0 / (2.0 * s * math.sinh(L / s))
    out = -np.sign(xw) * (c / s) * np.sinh((L - np.abs(xw)) / s)
    if order == 3:
        out = out / d
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class KernelNorms:
    """Exact norms of k_d over one period (see module docstring)."""

    l1: float
    l1_dx: float
    l1_dxx: float
    sup_dx: float


def kernel_norms(d, L):
    """Closed-form norms of the fundamental solution k_d."""
    _check_dL(d, L)
    s = math.sqrt(d)
    c = 1.0 / (2.0 * s * math.sinh(L / s))
    return KernelNorms(
        l1=1.0,
        l1_dx=2.0 * c * (math.cosh(L / s) - 1.0),
        l1_dxx=1.0 / d,
        sup_dx=1.0 / (2.0 * d),
    )


# --------------------------------------------------------------------------
# kernel variants


@dataclass(frozen=True)
class BesselFund:
    """Fundamental solution k_d itself, used as interaction kernel."""

    d: float
    L: float

    def __post_init__(self):
        _check_dL(self.d, self.L)

    def evaluate(self, x):
        return eval_k(x, self.d, self.L)


@dataclass(frozen=True)
class ConstantLimit:
    """d -> infinity limit of k_d: the constant 1/(2L)."""

    L: float

    def __post_init__(self):
        if not (self.L > 0):
            raise ConfigError(f"half-length L must be positive, got {self.L}")

    def evaluate(self, x):
        out = np.full_like(np.asarray(x, dtype=float), 1.0 / (2.0 * self.L))
        if np.ndim(x) == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class MexicanHat:
    """Short-range attraction minus long-range attraction: k_{d1} - k_{d2}."""

    d1: float
    d2: float
    L: float

    def __post_init__(self):
        _check_dL(self.d1, self.L)
        _check_dL(self.d2, self.L)
        if not (self.d1 < self.d2):
            raise ConfigError(
                f"MexicanHat requires d1 < d2, got d1={self.d1}, d2={self.d2}"
            )

    def evaluate(self, x):
        return eval_k(x, self.d1, self.L) - eval_k(x, self.d2, self.L)


@dataclass(frozen=True)
class Attract:
    """Attractive tent potential (R0 - |x|) supported on |x| <= R0."""

    R0: float
    L: float

    def __post_init__(self):
        if not (0 < self.R0 <= self.L):
            raise ConfigError(f"Attract requires 0 < R0 <= L, got R0={self.R0}, L={self.L}")

    def evaluate(self, x):
        xw = np.abs(wrap_periodic(x, self.L))
        out = np.where(xw <= self.R0, self.R0 - xw, 0.0)
        if np.ndim(x) == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class AttractRepel:
    """Attraction inside |x| < R0, repulsion in the ring R0 < |x| < R1.

    W(x) = ((a1 + a2) R0 - a2 R1 - a1 |x|)   on |x| <= R0
         = -a2 (R1 - |x|)                    on R0 < |x| <= R1
         = 0                                 outside.

    Continuous: both branches equal a2 (R0 - R1) at |x| = R0 and the outer
    branch vanishes at |x| = R1.  The weights (a1, a2) are local to this
    kernel and unrelated to any solver channel weights.
    """

    a1: float
    a2: float
    R0: float
    R1: float
    L: float

    def __post_init__(self):
        if not (self.a1 > 0 and self.a2 > 0):
            raise ConfigError(
                f"AttractRepel requires a1, a2 > 0, got a1={self.a1}, a2={self.a2}"
            )
        if not (0 < self.R0 < self.R1 <= self.L):
            raise ConfigError(
                f"AttractRepel requires 0 < R0 < R1 <= L, "
                f"got R0={self.R0}, R1={self.R1}, L={self.L}"
            )

    def evaluate(self, x):
        xw = np.abs(wrap_periodic(x, self.L))
        inner = (self.a1 + self.a2) * self.R0 - self.a2 * self.R1 - self.a1 * xw
        ring = -self.a2 * (self.R1 - xw)
        out = np.where(xw <= self.R0, inner, np.where(xw <= self.R1, ring, 0.0))
        if np.ndim(x) == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class LinearSum:
    """Weighted sum of fundamental solutions: sum_j a_j * k_{d_j}.

    A term with d = inf contributes a_j / (2L) (the constant limit).
    ``terms`` is a tuple of (a_j, d_j) pairs.
    """

    terms: tuple
    L: float

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(a), float(d)) for a, d in self.terms))
        if len(self.terms) == 0:
            raise ConfigError("LinearSum needs at least one (a, d) term")
        for _, d in self.terms:
            if not math.isinf(d):
                _check_dL(d, self.L)

    def evaluate(self, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        for a, d in self.terms:
            if math.isinf(d):
                out = out + a / (2.0 * self.L)
            else:
                out = out + a * eval_k(x, d, self.L)
        if np.ndim(x) == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class SampledKernel:
    """Kernel tabulated on the offset lattice x_k = k * (2L/N), k = 0..N-1.

    Index 0 is x = 0; an even kernel must satisfy v[i] == v[(N-i) % N]
    (checked to 1e-12 relative).  Evaluation between lattice points uses
    periodic linear interpolation.
    """

    values: np.ndarray
    L: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if not (self.L > 0):
            raise ConfigError(f"half-length L must be positive, got {self.L}")
        if vals.ndim != 1 or len(vals) < 4:
            raise ConfigError("SampledKernel needs a 1-D table with at least 4 values")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("SampledKernel values must be finite")
        scale = max(1.0, float(np.max(np.abs(vals))))
        mirror = vals[(-np.arange(len(vals))) % len(vals)]
        if np.max(np.abs(vals - mirror)) > 1e-12 * scale:
            raise ConfigError(
                "SampledKernel values are not even: require v[i] == v[(N-i) % N]"
            )

    def evaluate(self, x):
        n = len(self.values)
        dx = 2.0 * self.L / n
        pos = np.mod(np.asarray(x, dtype=float), 2.0 * self.L) / dx
        idx = np.floor(pos).astype(int) % n
        frac = pos - np.floor(pos)
        nxt = (idx + 1) % n
        out = (1.0 - frac) * self.values[idx] + frac * self.values[nxt]
        if np.ndim(x) == 0:
            return float(out)
        return out


Kernel = (BesselFund, ConstantLimit, MexicanHat, Attract, AttractRepel,
          LinearSum, SampledKernel)


def kernel_eval(spec, x):
    """Evaluate any kernel variant at x (scalar or array), wrapped periodically."""
    if not isinstance(spec, Kernel):
        raise TypeError(f"not a kernel spec: {type(spec).__name__}")
    return spec.evaluate(x)


# --------------------------------------------------------------------------
# discrete check that k_d really solves the elliptic problem


def verify_fundamental(d, L, N):
    """Residual of the discrete elliptic equation at grid size N.

    Samples k_d on the offset lattice x_k = k * dx (the kink sits on node
    0, where the kernel value is still well defined), applies the periodic
    operator -d * D2 + I with the standard second difference D2, and
    returns the 1-norm distance sum_i |r_i - delta_i| to the discrete
    delta (1/dx at node 0).  The kink limits the order: the distance
    decays like O(dx), halving per grid doubling.

    Rejects the constant-limit kernel (d = inf): the limit solves no
    elliptic problem, since -d * D2 diverges.
    """
    if math.isinf(d):
        raise ConfigError("verify_fundamental needs finite d; the d = inf limit "
                          "kernel is not a fundamental solution")
    _check_dL(d, L)
    if N < 16 or N % 2:
        raise ConfigError(f"N must be even and >= 16, got {N}")
    dx = 2.0 * L / N
    x = wrap_periodic(np.arange(N) * dx, L)
    k = eval_k(x, d, L)
    d2 = (np.roll(k, -1) - 2.0 * k + np.roll(k, 1)) / dx**2
    resid = -d * d2 + k
    delta = np.zeros(N)
    delta[0] = 1.0 / dx
    return float(np.sum(np.abs(resid - delta)))
