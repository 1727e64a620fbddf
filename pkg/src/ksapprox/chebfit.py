"""Explicit Chebyshev-Lagrange interpolation and cosh re-expansion.

Every coefficient here is produced by explicit formulas (no linear-system
solves), following the classical monomial representation

    T_n(x) = sum_{k=0}^{floor(n/2)} C(n,k) x^(n-2k),
    C(n,k) = (n/2) (-1)^k ((n-k-1)! / (k! (n-2k)!)) 2^(n-2k),

its shifted version on [a, b], Chebyshev-node Lagrange interpolation in
power form via synthetic division of the node polynomial

    prod_j (x - r_j) = 2^(-n) ((b-a)/2)^(n+1) T_{n+1}((2x - (b+a))/(b-a)),

and the inverse change of basis

    x^n = sum_{j = n mod 2, step 2} delta(n,j) T_j(x),
    delta(n,j) = 2^(1-n) binom(n, (n-j)/2)   (j > 0; halved at j = 0).

The payoff is the cosh re-expansion of an even periodic potential W:
substituting y = cosh(L - x) turns a degree-n interpolant of
f(y) = W(L - arccosh(y)) on [1, cosh L] into

    W(x) ~= sum_{j=0}^{n} alpha_j cosh(j (L - |x|)),

because T_j(cosh(u)) = cosh(j u).  Each cosh term is (up to an explicit
weight) a fundamental kernel k_{d_j} with d_j = 1/(j-1)^2, so the alphas
convert directly into the channel weights of a chemotaxis-type system
with M = n+1 components.

Degrees are capped at DEGREE_CAP = 30, where the monomial pipeline is
still well conditioned on the intervals of interest.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .kernels import Kernel, kernel_eval

DEGREE_CAP = 30
COSH_L_MAX = 700.0


def _check_degree(n, smallest=1):
    if not isinstance(n, (int, np.integer)):
        raise ConfigError(f"degree must be an integer, got {n!r}")
    if n < smallest or n > DEGREE_CAP:
        raise ConfigError(f"degree must be in [{smallest}, {DEGREE_CAP}], got {n}")


def _check_interval(a, b):
    if not (b > a):
        raise ConfigError(f"need b > a, got [{a}, {b}]")


def cheb_mono_coeffs(n):
    """Monomial coefficients C(n,k) of T_n, k = 0..floor(n/2).

    C(n,k) multiplies x^(n-2k); all values are integers, computed exactly.
    cheb_mono_coeffs(2) -> [2, -1] encodes T_2 = 2x^2 - 1.
    """
    _check_degree(n)
    out = []
    for k in range(n // 2 + 1):
        num = n * math.factorial(n - k - 1) * 2 ** (n - 2 * k)
        den = 2 * math.factorial(k) * math.factorial(n - 2 * k)
        out.append(float((-1) ** k * (num // den)))
    return np.array(out)


def _shifted_cheb_exact(n, a, b):
    """xi of T_n((2x - (b+a))/(b-a)) as exact rationals (a, b are floats,
    hence exact rationals).

    The binomial terms alternate and cancel violently on intervals away
    from the origin (by n ~ 13 on [1, 3.8] naive float accumulation has
    lost ten digits), so the whole sum runs in Fraction arithmetic and is
    rounded only on conversion.
    """
    scale = Fraction(2) / (Fraction(b) - Fraction(a))
    shift = -(Fraction(a) + Fraction(b)) / 2
    xi = [Fraction(0)] * (n + 1)
    for k in range(n // 2 + 1):
        num = n * math.factorial(n - k - 1) * 2 ** (n - 2 * k)
        den = 2 * math.factorial(k) * math.factorial(n - 2 * k)
        c = (-1) ** k * (num // den)
        m = n - 2 * k
        base = c * scale**m
        for j in range(m + 1):
            xi[m - j] += base * math.comb(m, j) * shift**j
    return xi


def shifted_cheb_coeffs(n, a, b):
    """Ascending power coefficients xi of T_n((2x - (b+a))/(b-a)).

    Accumulated by binomial expansion of each
    C(n,k) ((2/(b-a)) (x - (b+a)/2))^(n-2k) term in exact rational
    arithmetic (see _shifted_cheb_exact); returns the correctly rounded
    array of length n+1 (index = power of x).

    Note the coefficients themselves are exact, but *evaluating* the
    monomial form on [a, b] still cancels: expect roughly
    eps * sum_l |xi_l| max(|a|,|b|)^l of evaluation noise.
    """
    _check_degree(n)
    _check_interval(a, b)
    return np.array([float(v) for v in _shifted_cheb_exact(n, a, b)])


def cheb_nodes(m, a, b):
    """The m Chebyshev nodes of [a, b], ascending.

    r_j = (a+b)/2 + ((b-a)/2) cos((2j+1) pi / (2m)); these are the roots
    of the shifted T_m.
    """
    if m < 1:
        raise ConfigError(f"need at least one node, got m={m}")
    _check_interval(a, b)
    j = np.arange(m)
    raw = 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * j + 1) * np.pi / (2 * m))
    return raw[::-1].copy()


def _lagrange_exact(samples, n, a, b):
    """b_l of the Chebyshev-node interpolant as exact rationals."""
    r = cheb_nodes(n + 1, a, b)
    rq = [Fraction(float(v)) for v in r]
    zeta = []
    for j in range(n + 1):
        prod = Fraction(1)
        for k in range(n + 1):
            if k != j:
                prod *= rq[j] - rq[k]
        zeta.append(Fraction(float(samples[j])) / prod)
    xi = _shifted_cheb_exact(n + 1, a, b)
    lead = Fraction(1, 2**n) * ((Fraction(b) - Fraction(a)) / 2) ** (n + 1)
    # Horner form of the synthetic division: beta_l = xi_{l+1} + r * beta_{l+1}
    beta = [xi[n + 1]] * (n + 1)
    coeffs = [None] * (n + 1)
    coeffs[n] = lead * sum(z * c for z, c in zip(zeta, beta))
    for l in range(n - 1, -1, -1):
        beta = [xi[l + 1] + rq[j] * beta[j] for j in range(n + 1)]
        coeffs[l] = lead * sum(z * c for z, c in zip(zeta, beta))
    return coeffs


def lagrange_poly_coeffs(samples, n, a, b):
    """Power coefficients b_l of the degree-n interpolant at Chebyshev nodes.

    ``samples`` are the values F(r_j) at cheb_nodes(n+1, a, b) (ascending
    order).  Uses the explicit route: node-difference weights

        zeta_j = F(r_j) / prod_{k != j} (r_j - r_k),

    synthetic division of the shifted T_{n+1} by (x - r_j),

        beta(l, j) = sum_{k=l}^{n} r_j^(k-l) xi_{k+1},

    and b_l = 2^(-n) ((b-a)/2)^(n+1) sum_j zeta_j beta(l, j), so that
    sum_l b_l r_j^l = F(r_j) at every node.  Like the shifted
    coefficients, the zeta/beta sums cancel badly in floating point on
    shifted intervals, so they are carried out exactly and rounded once.
    """
    _check_degree(n + 1)
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (n + 1,):
        raise ConfigError(f"need n+1 = {n + 1} samples, got shape {samples.shape}")
    _check_interval(a, b)
    return np.array([float(v) for v in _lagrange_exact(samples, n, a, b)])


def mono_to_cheb(n):
    """Chebyshev coefficients delta(n, j) of the monomial x^n.

    Returns an array of length n+1 indexed by j; entries with j not
    congruent to n (mod 2) are zero.  delta(n,j) = 2^(1-n) binom(n,(n-j)/2)
    for j > 0 and half that at j = 0.
    """
    if n < 0 or n > DEGREE_CAP + 1:
        raise ConfigError(f"monomial degree must be in [0, {DEGREE_CAP + 1}], got {n}")
    delta = np.zeros(n + 1)
    for j in range(n % 2, n + 1, 2):
        c = 2.0 ** (1 - n) * math.comb(n, (n - j) // 2)
        delta[j] = 0.5 * c if j == 0 else c
    return delta


def _arccosh_stable(y):
    """arccosh(y) for y >= 1, accurate near 1 (plain log(y + sqrt(y^2-1))
    loses half the digits there)."""
    t = np.maximum(np.asarray(y, dtype=float) - 1.0, 0.0)
    return np.log1p(t + np.sqrt(t * (t + 2.0)))


@dataclass(frozen=True)
class CoshExpansion:
    """W(x) ~= sum_j alphas[j] * cosh(j * (L - |x|)), x wrapped into [-L, L)."""

    L: float
    n: int
    alphas: np.ndarray

    def reconstruct(self, x):
        xw = np.mod(np.asarray(x, dtype=float) + self.L, 2.0 * self.L) - self.L
        u = self.L - np.abs(xw)
        j = np.arange(self.n + 1)
        out = np.cosh(np.multiply.outer(u, j)) @ self.alphas
        if np.ndim(x) == 0:
            return float(out)
        return out


def _as_potential(W, L):
    if isinstance(W, Kernel):
        if not math.isclose(W.L, L):
            raise ConfigError(f"kernel has L={W.L}, expansion requested L={L}")
        return lambda x: kernel_eval(W, x)
    if callable(W):
        return W
    raise TypeError("W must be a kernel spec or a callable on [0, L]")


def cosh_expansion(W, n, L):
    """Degree-n cosh expansion of the even potential W on [-L, L].

    Interpolates f(y) = W(L - arccosh(y)) at the n+1 Chebyshev nodes of
    [1, cosh L], converts the power coefficients to the Chebyshev basis
    through mono_to_cheb, and reads the result back through
    T_j(cosh u) = cosh(j u).
    """
    _check_degree(n + 1)  # the pipeline needs the shifted T_{n+1}
    if not (0 < L <= COSH_L_MAX):
        raise ConfigError(f"need 0 < L <= {COSH_L_MAX} (cosh overflow), got L={L}")
    f = _as_potential(W, L)
    y_top = math.cosh(L)
    nodes = cheb_nodes(n + 1, 1.0, y_top)
    samples = np.asarray(f(L - _arccosh_stable(nodes)), dtype=float)
    coeffs = _lagrange_exact(samples, n, 1.0, y_top)
    # alpha_j = sum_{k >= j, same parity} b_k delta(k, j), exactly
    alphas = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        for j in range(k % 2, k + 1, 2):
            dkj = Fraction(2 * math.comb(k, (k - j) // 2), 2**k)
            if j == 0:
                dkj /= 2
            alphas[j] += coeffs[k] * dkj
    return CoshExpansion(L=L, n=n, alphas=np.array([float(v) for v in alphas]))


def expansion_error(W, expansion, grid_size=4001):
    """Sup-norm distance between W and the reconstruction on [0, L]
    (dense uniform grid; both sides are even, so [0, L] suffices)."""
    if grid_size < 16:
        raise ConfigError(f"grid_size too small: {grid_size}")
    f = _as_potential(W, expansion.L)
    xs = np.linspace(0.0, expansion.L, grid_size)
    return float(np.max(np.abs(np.asarray(f(xs)) - expansion.reconstruct(xs))))


def expansion_error_bound(W, n, L, safety=1.0, est_degree=None):
    """A-priori sup-norm bound for the degree-n expansion:

        (1/(2^n (n+1)!)) ((cosh L - 1)/2)^(n+1) max |f^(n+1)|

    over [1, cosh L], with f(y) = W(L - arccosh(y)).  The derivative max
    is *estimated* by spectral differentiation of a high-degree Chebyshev
    fit of f (so this is a numerical estimate of the analytic bound);
    ``safety`` scales the derivative estimate.
    """
    _check_degree(n + 1)
    f = _as_potential(W, L)
    y_top = math.cosh(L)
    # Differentiating n+1 times amplifies coefficient rounding by roughly
    # (deg^2)^(n+1), so the fit degree must stay barely above n: a few
    # extra degrees capture the smooth bulk of f^(n+1) without drowning
    # it in differentiation noise.
    deg = est_degree if est_degree is not None else n + 7
    fit = np.polynomial.chebyshev.Chebyshev.interpolate(
        lambda y: np.asarray(f(L - _arccosh_stable(y)), dtype=float),
        deg,
        domain=[1.0, y_top],
    )
    dfit = fit.deriv(n + 1)
    ys = np.linspace(1.0, y_top, 2001)
    deriv_max = float(np.max(np.abs(dfit(ys))))
    lead = ((y_top - 1.0) / 2.0) ** (n + 1) / (2.0**n * math.factorial(n + 1))
    return lead * safety * deriv_max


@dataclass(frozen=True)
class KSParams:
    """Channel weights of the M-component chemotaxis system.

    a[j] multiplies channel j's concentration in the drift; d[j] is its
    diffusivity.  d[0] == inf marks the exact constant-limit channel
    (paired with weight a[0] = 2 L alpha_0 when built from an expansion).
    eps is the relaxation time scale, mu the drift strength.
    """

    M: int
    a: tuple
    d: tuple
    eps: float
    mu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if self.M < 1 or len(self.a) != self.M or len(self.d) != self.M:
            raise ConfigError(
                f"need len(a) == len(d) == M, got M={self.M}, "
                f"{len(self.a)} weights, {len(self.d)} diffusivities"
            )
        if not (self.eps > 0):
            raise ConfigError(f"eps must be positive, got {self.eps}")
        for j, dj in enumerate(self.d):
            if j == 0 and math.isinf(dj):
                continue
            if not (dj > 0 and math.isfinite(dj)):
                raise ConfigError(
                    f"d[{j}] must be positive and finite (inf allowed only "
                    f"in slot 0), got {dj}"
                )


def expansion_to_ks(expansion, eps, mu=1.0, d1=math.inf):
    """Convert a cosh expansion into the M = n+1 channel parameters.

    Channel j >= 2 carries d_j = 1/(j-1)^2 and a_j = 2 alpha_{j-1}
    sinh((j-1) L)/(j-1), so that a_j k_{d_j}(x) = alpha_{j-1} cosh((j-1)(L-|x|))
    exactly.  Channel 1 is the constant term: a_1 = 2 L alpha_0 with
    d_1 = inf by default (``d1`` may pin a large finite diffusivity
    instead; the reconstruction is then approximate to O(1/d1)).
    """
    if not (eps > 0):
        raise ConfigError(f"eps must be positive, got {eps}")
    if not (d1 > 0):
        raise ConfigError(f"d1 must be positive or inf, got {d1}")
    L = expansion.L
    al = expansion.alphas
    a = [2.0 * L * al[0]]
    d = [float(d1)]
    for j in range(2, expansion.n + 2):
        a.append(2.0 * al[j - 1] * math.sinh((j - 1) * L) / (j - 1))
        d.append(1.0 / (j - 1) ** 2)
    return KSParams(M=expansion.n + 1, a=tuple(a), d=tuple(d), eps=eps, mu=mu)
