"""Numeric mu-deformed special functions.

Implements the deformed factorial, the deformed exponential (power series
and, for mu > 0, its probability-measure integral representation on [-1,1]
with Jacobi weight (1-t)^(mu-1) (1+t)^mu), and the squared modulus of the
deformed exponential on the imaginary axis by three mutually independent
methods.

Series evaluations track truncation and cancellation; when cancellation
exceeds the escalation threshold the sum is repeated with arbitrary-
precision floats at four times working precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln, gammaln

from . import exact
from .errors import EvaluationError

MU_MIN = -0.5 + 1e-6
LOG_SPACE_THRESHOLD = 150      # gamma_mu switches to log-space beyond this n
CANCELLATION_ESCALATION = 1e8  # re-evaluate in extended precision past this
ESCALATED_PREC_BITS = 4 * 53   # "4x working precision"
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class MuContext:
    """Deformation parameter mu and the normalization constant of m_mu.

    The measure density is norm_const * |x|^(2 mu) with
    norm_const = [2^(mu+1/2) Gamma(mu+1/2)]^(-1).
    """

    mu: float
    norm_const: float = field(init=False)

    def __post_init__(self):
        if not self.mu > MU_MIN:
            raise ValueError(f"mu must exceed -1/2 + 1e-6, got {self.mu}")
        log_nc = -(self.mu + 0.5) * math.log(2.0) - gammaln(self.mu + 0.5)
        object.__setattr__(self, "norm_const", math.exp(log_nc))

    @property
    def mu_fraction(self) -> Fraction:
        """mu as an exact binary rational, for the exact-algebra oracle."""
        return Fraction(self.mu)


@dataclass
class SeriesResult:
    """A truncated power-series value with its error diagnostics.

    cancellation is the largest intermediate partial-sum magnitude divided
    by the result magnitude (>= 1); values much above 1 mean the final
    digits were produced by cancellation of large terms.
    """

    value: complex
    terms_used: int
    trunc_error: float
    cancellation: float
    escalated: bool = False


@dataclass(frozen=True)
class JacobiRule:
    """Gauss rule for the probability measure eta_mu on (-1, 1).

    weights are normalized to sum to one; raw_mass is the unnormalized
    total mass of the Jacobi weight (1-t)^(mu-1) (1+t)^mu, which equals the
    beta value B(1/2, mu).
    """

    nodes: np.ndarray
    weights: np.ndarray
    raw_mass: float
    mu: float


def _odd(n: int) -> int:
    return n & 1


def gamma_mu(n: int, ctx: MuContext) -> float:
    """Deformed factorial gamma_mu(n) = (n + 2 mu [n odd]) gamma_mu(n-1).

    Computed by direct recursion up to n=150 and in log-space beyond;
    raises OverflowError when the value exceeds float range.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n <= LOG_SPACE_THRESHOLD:
        acc = 1.0
        for m in range(1, n + 1):
            acc *= m + 2.0 * ctx.mu * _odd(m)
        if math.isinf(acc):
            raise OverflowError(f"gamma_mu({n}) overflows float range")
        return acc
    lg = log_gamma_mu(n, ctx)
    if lg > _LOG_FLOAT_MAX:
        raise OverflowError(
            f"gamma_mu({n}) overflows float range; use log_gamma_mu instead")
    return math.exp(lg)


def log_gamma_mu(n: int, ctx: MuContext) -> float:
    """log gamma_mu(n); every recursion step is strictly positive."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(math.log(m + 2.0 * ctx.mu * _odd(m)) for m in range(1, n + 1))


def deformed_binomial(k: int, j: int, ctx: MuContext) -> float:
    """gamma_mu(k) / (gamma_mu(k-j) gamma_mu(j)); strictly positive."""
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got k={k}, j={j}")
    if k <= LOG_SPACE_THRESHOLD:
        return gamma_mu(k, ctx) / (gamma_mu(j, ctx) * gamma_mu(k - j, ctx))
    return math.exp(
        log_gamma_mu(k, ctx) - log_gamma_mu(j, ctx) - log_gamma_mu(k - j, ctx))


def binomial_poly(k: int, x: complex, y: complex, ctx: MuContext) -> complex:
    """The k-th deformed binomial polynomial sum_j binom_mu(k,j) x^j y^(k-j)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    total = 0.0 + 0.0j
    for j in range(k + 1):
        total += deformed_binomial(k, j, ctx) * (x ** j) * (y ** (k - j))
    return total


# --- deformed exponential: power series --------------------------------------

def _series_sum_float(z: complex, mu: float, tol: float, max_terms: int):
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    peak = 1.0
    consecutive = 0
    az = abs(z)
    n = 0
    for n in range(1, max_terms + 1):
        term *= z / (n + 2.0 * mu * _odd(n))
        total += term
        peak = max(peak, abs(total))
        if abs(term) <= tol * abs(total) and n > az:
            consecutive += 1
            if consecutive >= 3:
                break
        else:
            consecutive = 0
    else:
        raise EvaluationError(
            f"exp_mu series did not converge in {max_terms} terms for |z|={az:.3g}")
    return total, term, n, peak


def _series_sum_mp(z: complex, mu: float, tol: float, max_terms: int, prec_bits: int):
    with mpmath.workprec(prec_bits):
        zz = mpmath.mpc(z)
        mu_mp = mpmath.mpf(mu)
        total = mpmath.mpc(1)
        term = mpmath.mpc(1)
        peak = mpmath.mpf(1)
        consecutive = 0
        az = abs(z)
        stop_tol = mpmath.mpf(tol)
        for n in range(1, max_terms + 1):
            term *= zz / (n + 2 * mu_mp * _odd(n))
            total += term
            peak = max(peak, abs(total))
            if abs(term) <= stop_tol * abs(total) and n > az:
                consecutive += 1
                if consecutive >= 3:
                    break
            else:
                consecutive = 0
        else:
            raise EvaluationError(
                f"escalated exp_mu series did not converge in {max_terms} terms")
        return complex(total), float(abs(term)), n, float(peak / abs(total))


def _geometric_tail(last_term: float, az: float, n: int, mu: float) -> float:
    # Later denominators are at least n+1+min(0, 2 mu); the stopping rule
    # guarantees n > |z| so the ratio is below one.
    r = az / (n + 1 + min(0.0, 2.0 * mu))
    if r >= 1.0:
        return math.inf
    return last_term * r / (1.0 - r)


def exp_mu_series(z: complex, ctx: MuContext, tol: float = 1e-15,
                  max_terms: int = 4000,
                  prec_bits: int = ESCALATED_PREC_BITS) -> SeriesResult:
    """exp_mu(z) = sum_n z^n / gamma_mu(n), truncated by the stopping rule.

    Stops once three consecutive terms are below tol relative to the
    partial sum and the index exceeds |z|; the discarded tail is bounded by
    geometric comparison.  Re-evaluates in extended precision when the
    cancellation diagnostic crosses the escalation threshold.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    z = complex(z)
    total, term, n, peak = _series_sum_float(z, ctx.mu, tol, max_terms)
    cancellation = peak / abs(total) if total != 0 else math.inf
    escalated = False
    if cancellation > CANCELLATION_ESCALATION:
        value, last, n, cancellation = _series_sum_mp(
            z, ctx.mu, tol, max_terms, prec_bits)
        total = value
        term = last
        escalated = True
        budget = 2.0 ** (prec_bits * 0.5)
        if cancellation > budget:
            raise EvaluationError(
                "cancellation exceeds the escalated precision budget; "
                "raise prec_bits", best=total)
    trunc = _geometric_tail(abs(term), abs(z), n, ctx.mu)
    return SeriesResult(value=total, terms_used=n + 1, trunc_error=trunc,
                        cancellation=max(1.0, cancellation), escalated=escalated)


def exp_mu_on_array(z: np.ndarray, ctx: MuContext, tol: float = 1e-16,
                    max_terms: int = 6000) -> np.ndarray:
    """Vectorized exp_mu over an array of complex arguments (no diagnostics)."""
    z = np.asarray(z, dtype=complex)
    total = np.ones_like(z)
    term = np.ones_like(z)
    az = float(np.max(np.abs(z))) if z.size else 0.0
    if az > 600.0:  # partial sums reach e^|z|: past float range
        raise EvaluationError(
            f"exp_mu series overflows double precision for |z|={az:.3g}")
    consecutive = 0
    for n in range(1, max_terms + 1):
        term = term * (z / (n + 2.0 * ctx.mu * _odd(n)))
        total += term
        if n > az and float(np.max(np.abs(term))) <= tol * max(
                1.0, float(np.max(np.abs(total)))):
            consecutive += 1
            if consecutive >= 3:
                return total
        else:
            consecutive = 0
    raise EvaluationError(
        f"vectorized exp_mu series did not converge in {max_terms} terms")


# --- eta_mu: Gauss-Jacobi rule ------------------------------------------------

def gauss_jacobi(n: int, alpha: float, beta: float):
    """n-point Gauss rule for the weight (1-t)^alpha (1+t)^beta on [-1,1].

    Golub-Welsch: eigen-decompose the symmetric tridiagonal matrix built
    from the three-term recurrence of the (monic) Jacobi polynomials; the
    weights come from the first eigenvector components scaled by the total
    weight mass 2^(alpha+beta+1) B(alpha+1, beta+1).
    """
    if n < 1:
        raise ValueError("need at least one node")
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi parameters must exceed -1")
    ab = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    i = np.arange(1, n, dtype=float)
    diag[1:] = (beta ** 2 - alpha ** 2) / ((2 * i + ab) * (2 * i + ab + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        # first off-diagonal entry in its non-degenerate form (the generic
        # formula is 0/0 at alpha + beta = -1)
        off[0] = math.sqrt(
            4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0)))
        i = i[1:]
        num = 4.0 * i * (i + alpha) * (i + beta) * (i + ab)
        s = 2.0 * i + ab
        off[1:] = np.sqrt(num / (s ** 2 * (s ** 2 - 1.0)))
    if n == 1:
        nodes, vecs = np.array([diag[0]]), np.array([[1.0]])
    else:
        nodes, vecs = eigh_tridiagonal(diag, off)
    mass = math.exp((ab + 1.0) * math.log(2.0) + betaln(alpha + 1.0, beta + 1.0))
    weights = mass * vecs[0, :] ** 2
    return nodes, weights


def eta_rule(ctx: MuContext, n_nodes: int) -> JacobiRule:
    """Gauss rule for the probability measure eta_mu, mu > 0 only.

    d eta_mu(t) = B(1/2, mu)^(-1) (1-t)^(mu-1) (1+t)^mu dt on [-1, 1].
    The raw (unnormalized) mass is computed from the Jacobi-weight side as
    2^(2 mu) B(mu, mu+1); that it equals B(1/2, mu) is a checked identity,
    not an input.
    """
    if ctx.mu <= 0:
        raise ValueError(
            "the integral representation of exp_mu requires mu > 0")
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    nodes, raw = gauss_jacobi(n_nodes, ctx.mu - 1.0, ctx.mu)
    mass = float(np.sum(raw))
    return JacobiRule(nodes=nodes, weights=raw / mass, raw_mass=mass, mu=ctx.mu)


@lru_cache(maxsize=64)
def _cached_eta_rule(mu: float, n_nodes: int) -> JacobiRule:
    return eta_rule(MuContext(mu), n_nodes)


ETA_NODES_CAP = 1200


def default_eta_nodes(s_max: float) -> int:
    """Node count comfortably resolving e^{ist} on [-1,1] for |s| <= s_max.

    Capped; past the cap the rule is under-resolved and the error bound
    reported by abs2_grid_error_bound becomes O(1).
    """
    return max(48, min(int(2.2 * abs(s_max)) + 40, ETA_NODES_CAP))


def eta_rule_resolves(s_max: float) -> bool:
    return 2.2 * abs(s_max) + 40 <= ETA_NODES_CAP


def exp_mu_integral(z: complex, ctx: MuContext, rule: JacobiRule | None = None) -> complex:
    """exp_mu(z) via the integral representation against eta_mu (mu > 0)."""
    if ctx.mu <= 0:
        raise ValueError(
            "the integral representation of exp_mu requires mu > 0")
    if rule is None:
        rule = _cached_eta_rule(ctx.mu, default_eta_nodes(abs(z)))
    return complex(np.sum(rule.weights * np.exp(complex(z) * rule.nodes)))


# --- |exp_mu(i s)|^2 by three routes ------------------------------------------

@lru_cache(maxsize=4096)
def _even_coeff_exact(j: int, mu_frac: Fraction) -> Fraction:
    """Exact p_{2j,mu}(-1,1) / gamma_mu(2j) at rational mu."""
    num = exact.p_at_exact(2 * j).evaluate(mu_frac)
    den = exact.gamma_mu_exact(2 * j).evaluate(mu_frac)
    return num / den


def _abs2_product(s: float, ctx: MuContext, tol: float, prec_bits: int) -> float:
    r = exp_mu_series(1j * s, ctx, tol=tol, prec_bits=prec_bits)
    return abs(r.value) ** 2


def even_series_result(s: float, ctx: MuContext, tol: float = 1e-15,
                       prec_bits: int = ESCALATED_PREC_BITS) -> SeriesResult:
    """|exp_mu(i s)|^2 as sum_j (-1)^j p_{2j,mu}(-1,1) s^{2j} / gamma_mu(2j),
    with diagnostics.

    Coefficients come from the exact-algebra layer, so the only float error
    is in the alternating outer sum; it is monitored and escalated.  Note
    this sum cancels like e^(2|s|), twice as hard as the complex series.
    """
    muf = ctx.mu_fraction
    s2 = s * s

    def run_float():
        total = 1.0
        power = 1.0
        peak = 1.0
        last = 0.0
        consecutive = 0
        for j in range(1, 400):
            power *= s2
            term = (-1.0) ** j * float(_even_coeff_exact(j, muf)) * power
            total += term
            last = abs(term)
            peak = max(peak, abs(total))
            if last <= tol * max(abs(total), 1e-300) and 2 * j > abs(s):
                consecutive += 1
                if consecutive >= 3:
                    return total, peak, last, j
            else:
                consecutive = 0
        raise EvaluationError("even series for |exp_mu(is)|^2 did not converge")

    total, peak, last, j = run_float()
    cancellation = peak / abs(total) if total != 0 else math.inf
    escalated = False
    if cancellation > CANCELLATION_ESCALATION:
        escalated = True
        with mpmath.workprec(prec_bits):
            s2_mp = mpmath.mpf(s) ** 2
            total_mp = mpmath.mpf(1)
            power = mpmath.mpf(1)
            peak_mp = mpmath.mpf(1)
            consecutive = 0
            for j in range(1, 2000):
                power *= s2_mp
                c = _even_coeff_exact(j, muf)
                term = (-1) ** j * mpmath.mpf(c.numerator) / c.denominator * power
                total_mp += term
                peak_mp = max(peak_mp, abs(total_mp))
                if abs(term) <= tol * abs(total_mp) and 2 * j > abs(s):
                    consecutive += 1
                    if consecutive >= 3:
                        break
                else:
                    consecutive = 0
            else:
                raise EvaluationError("escalated even series did not converge")
            cancellation = float(peak_mp / abs(total_mp))
            if cancellation > 2.0 ** (prec_bits * 0.5):
                raise EvaluationError(
                    "cancellation exceeds the escalated precision budget")
            total = float(total_mp)
            last = float(abs(term))
    return SeriesResult(value=complex(total), terms_used=j + 1,
                        trunc_error=last, cancellation=max(1.0, cancellation),
                        escalated=escalated)


def _abs2_integral(s: float, ctx: MuContext, rule: JacobiRule | None) -> float:
    if ctx.mu <= 0:
        raise ValueError("method 'integral' requires mu > 0")
    if rule is None:
        rule = _cached_eta_rule(ctx.mu, default_eta_nodes(s))
    c = float(np.sum(rule.weights * np.cos(s * rule.nodes)))
    sn = float(np.sum(rule.weights * np.sin(s * rule.nodes)))
    return c * c + sn * sn


def abs2_exp_mu_imag(s: float, ctx: MuContext, method: str | None = None,
                     tol: float = 1e-15, rule: JacobiRule | None = None,
                     prec_bits: int = ESCALATED_PREC_BITS) -> float:
    """|exp_mu(i s)|^2 by the requested method.

    method 'product' squares the power-series value; 'even_series' sums the
    rearranged even-power series with exact rational coefficients;
    'integral' uses cos/sin moments of eta_mu (mu > 0 only).  With
    method=None the best-conditioned route for the sign of mu is chosen.
    """
    if method is None:
        method = "integral" if ctx.mu > 0 else "product"
    if method == "product":
        return _abs2_product(s, ctx, tol, prec_bits)
    if method == "even_series":
        return even_series_result(s, ctx, tol, prec_bits).value.real
    if method == "integral":
        return _abs2_integral(s, ctx, rule)
    raise ValueError(f"unknown method {method!r}")


def exp_mu_imag_on_grid(svals: np.ndarray, ctx: MuContext,
                        rule: JacobiRule | None = None) -> np.ndarray:
    """Vectorized exp_mu(i s) over an array of real s.

    mu > 0 uses the eta_mu cos/sin moments (uniformly bounded, no
    cancellation); mu <= 0 falls back to the vectorized power series,
    whose float error grows like eps * e^max|s|.
    """
    svals = np.asarray(svals, dtype=float)
    if ctx.mu > 0:
        if rule is None:
            s_max = float(np.max(np.abs(svals))) if svals.size else 1.0
            rule = _cached_eta_rule(ctx.mu, default_eta_nodes(s_max))
        c = np.zeros_like(svals)
        sn = np.zeros_like(svals)
        for t, w in zip(rule.nodes, rule.weights):
            c += w * np.cos(t * svals)
            sn += w * np.sin(t * svals)
        return c + 1j * sn
    return exp_mu_on_array(1j * svals, ctx)


def abs2_on_grid(svals: np.ndarray, ctx: MuContext,
                 rule: JacobiRule | None = None) -> np.ndarray:
    """Vectorized |exp_mu(i s)|^2 over an array of real s."""
    vals = exp_mu_imag_on_grid(svals, ctx, rule)
    return vals.real ** 2 + vals.imag ** 2


def abs2_grid_error_bound(s_max: float, ctx: MuContext) -> float:
    """Per-point absolute error bound for abs2_on_grid."""
    if ctx.mu > 0:
        if not eta_rule_resolves(s_max):
            return 1.0  # under-resolved oscillation: no accuracy claim
        return 1e-14 * (1.0 + abs(s_max))
    # cancellation floor of the complex series: partial sums peak near
    # e^|s| while the result stays O(1)
    return 30.0 * np.finfo(float).eps * math.exp(min(abs(s_max), 500.0))
