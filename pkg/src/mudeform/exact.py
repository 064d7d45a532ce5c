"""Exact algebra over the deformation parameter.

Polynomials and rational functions in mu with arbitrary-precision rational
coefficients.  This layer settles the deformed-binomial identities exactly
(coefficient-wise, after cross-multiplication) and serves as the exact
oracle behind every floating-point combinatorial quantity in the numeric
layer.

Key facts used throughout: the deformed factorial gamma_mu(n) obeys

    gamma_mu(0) = 1,   gamma_mu(n) = (n + 2*mu*[n odd]) * gamma_mu(n-1),

so each odd step contributes the monic linear factor 2*(mu + n/2) and each
even step a constant.  Every gamma_mu(n) is therefore a rational constant
times a product of distinct factors (mu + i + 1/2), i = 0, 1, ..., which is
what makes exact summation of deformed binomials cheap: common denominators
are short products of known linear factors, and reduction is trial division
by those factors instead of a general polynomial gcd.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

HALF = Fraction(1, 2)


class MuPolynomial:
    """Dense polynomial in mu with Fraction coefficients (index = power)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c) -> "MuPolynomial":
        return cls((Fraction(c),))

    @classmethod
    def mu_plus(cls, c) -> "MuPolynomial":
        """The monic linear factor mu + c."""
        return cls((Fraction(c), Fraction(1)))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other):
        return isinstance(other, MuPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "MuPolynomial") -> "MuPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return MuPolynomial(out)

    def __sub__(self, other: "MuPolynomial") -> "MuPolynomial":
        return self + (-other)

    def __neg__(self) -> "MuPolynomial":
        return MuPolynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "MuPolynomial") -> "MuPolynomial":
        if self.is_zero or other.is_zero:
            return MuPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return MuPolynomial(out)

    def scale(self, q) -> "MuPolynomial":
        q = Fraction(q)
        return MuPolynomial(tuple(q * c for c in self.coeffs))

    def times_mu(self) -> "MuPolynomial":
        """Multiply by the variable mu itself."""
        if self.is_zero:
            return self
        return MuPolynomial((Fraction(0),) + self.coeffs)

    def evaluate(self, mu):
        """Horner evaluation; exact when mu is a Fraction."""
        acc = Fraction(0) if isinstance(mu, Fraction) else type(mu)(0)
        for c in reversed(self.coeffs):
            acc = acc * mu + c
        return acc

    def divide_linear(self, c: Fraction):
        """Synthetic division by the monic factor (mu + c).

        Returns (quotient, remainder); the division is exact iff the
        remainder is zero, i.e. iff -c is a root.
        """
        if self.is_zero:
            return MuPolynomial(), Fraction(0)
        r = -Fraction(c)
        q = [Fraction(0)] * self.degree
        acc = self.coeffs[-1]
        for i in range(self.degree - 1, -1, -1):
            q[i] = acc
            acc = self.coeffs[i] + r * acc
        return MuPolynomial(q), acc

    def coeff_strings(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    def __repr__(self):
        if self.is_zero:
            return "MuPolynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*mu")
            else:
                terms.append(f"{c}*mu^{i}")
        return "MuPolynomial(" + " + ".join(terms) + ")"


ONE = MuPolynomial.const(1)
MU = MuPolynomial((0, 1))


def _prod(factors) -> MuPolynomial:
    acc = ONE
    for f in factors:
        acc = acc * f
    return acc


class MuRationalFunction:
    """Quotient of MuPolynomials, normalized to a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: MuPolynomial, den: MuPolynomial = ONE):
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        lead = den.lead
        if lead != 1:
            num = num.scale(Fraction(1) / lead)
            den = den.scale(Fraction(1) / lead)
        self.num = num
        self.den = den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def cross_equal(self, other: "MuRationalFunction") -> bool:
        """Exact equality decided by cross-multiplication of numerators."""
        return self.num * other.den == other.num * self.den

    def __eq__(self, other):
        return isinstance(other, MuRationalFunction) and self.cross_equal(other)

    def __hash__(self):
        return hash((self.num, self.den))

    def __mul__(self, other: "MuRationalFunction") -> "MuRationalFunction":
        return MuRationalFunction(self.num * other.num, self.den * other.den)

    def __add__(self, other: "MuRationalFunction") -> "MuRationalFunction":
        return MuRationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    def __sub__(self, other: "MuRationalFunction") -> "MuRationalFunction":
        return self + MuRationalFunction(-other.num, other.den)

    def evaluate(self, mu):
        den = self.den.evaluate(mu)
        if den == 0:
            raise ZeroDivisionError(f"pole of rational function at mu={mu}")
        return self.num.evaluate(mu) / den

    def to_dict(self) -> dict:
        return {"num": self.num.coeff_strings(), "den": self.den.coeff_strings()}

    def __repr__(self):
        return f"MuRationalFunction({self.num!r} / {self.den!r})"


_GAMMA_POLYS: list[MuPolynomial] = [ONE]


def gamma_mu_exact(n: int) -> MuPolynomial:
    """gamma_mu(n) as an exact polynomial in mu, via the defining recursion."""
    if n < 0:
        raise ValueError("n must be >= 0")
    while len(_GAMMA_POLYS) <= n:
        m = len(_GAMMA_POLYS)
        prev = _GAMMA_POLYS[m - 1]
        if m % 2:
            step = MuPolynomial((Fraction(m), Fraction(2)))  # m + 2*mu
            _GAMMA_POLYS.append(prev * step)
        else:
            _GAMMA_POLYS.append(prev.scale(m))
    return _GAMMA_POLYS[n]


_GAMMA_FACTORED: list[tuple[Fraction, int]] = [(Fraction(1), 0)]


def _gamma_factored(n: int) -> tuple[Fraction, int]:
    """gamma_mu(n) = scalar * prod_{i=0}^{e-1} (mu + i + 1/2), as (scalar, e).

    Follows the recursion: an odd step n contributes 2*(mu + n/2), i.e. the
    factor index (n-1)/2, so the factor indices stay contiguous.
    """
    while len(_GAMMA_FACTORED) <= n:
        m = len(_GAMMA_FACTORED)
        s, e = _GAMMA_FACTORED[m - 1]
        if m % 2:
            _GAMMA_FACTORED.append((2 * s, e + 1))
        else:
            _GAMMA_FACTORED.append((m * s, e))
    return _GAMMA_FACTORED[n]


def _half_factor(i: int) -> MuPolynomial:
    return MuPolynomial.mu_plus(i + HALF)


def _binom_factored(k: int, j: int):
    """Deformed binomial gamma(k)/(gamma(j)gamma(k-j)) in factored form.

    Returns (scalar, num_range, den_range) where the ranges are half-open
    index ranges of (mu + i + 1/2) factors.  The prefix structure of the
    gamma factors makes numerator and denominator ranges disjoint, so the
    result is automatically in lowest terms.
    """
    sk, ek = _gamma_factored(k)
    sj, ej = _gamma_factored(j)
    si, ei = _gamma_factored(k - j)
    lo, hi = min(ej, ei), max(ej, ei)
    return sk / (sj * si), (hi, ek), (0, lo)


def _factored_sum(terms) -> MuRationalFunction:
    """Exact sum of (scalar, num_range, den_range) triples.

    The common denominator is the longest factor prefix among the terms;
    each numerator is expanded, summed, and the result reduced by trial
    division against the known linear factors.
    """
    d_max = max((t[2][1] for t in terms), default=0)
    total = MuPolynomial()
    for scalar, (n_lo, n_hi), (d_lo, d_hi) in terms:
        factors = [_half_factor(i) for i in range(n_lo, n_hi)]
        factors += [_half_factor(i) for i in range(d_hi, d_max)]
        total = total + _prod(factors).scale(scalar)
    remaining = []
    for i in range(d_max):
        c = i + HALF
        quot, rem = total.divide_linear(c)
        if rem == 0 and not total.is_zero:
            total = quot
        elif total.is_zero:
            pass  # zero numerator: every factor cancels
        else:
            remaining.append(i)
    den = _prod(_half_factor(i) for i in remaining)
    return MuRationalFunction(total, den)


def binom_mu_exact(k: int, j: int) -> MuRationalFunction:
    """The mu-deformed binomial coefficient, exactly in lowest terms."""
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got k={k}, j={j}")
    scalar, num_range, den_range = _binom_factored(k, j)
    num = _prod(_half_factor(i) for i in range(*num_range)).scale(scalar)
    den = _prod(_half_factor(i) for i in range(*den_range))
    return MuRationalFunction(num, den)


@lru_cache(maxsize=None)
def p_at_exact(k: int) -> MuRationalFunction:
    """The k-th deformed binomial polynomial at (-1, 1), exactly.

    This is the alternating sum over deformed binomial coefficients; it is
    identically zero for odd k and a reduced rational function of mu for
    even k.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    terms = []
    for j in range(k + 1):
        scalar, num_range, den_range = _binom_factored(k, j)
        if j % 2:
            scalar = -scalar
        terms.append((scalar, num_range, den_range))
    return _factored_sum(terms)


def eval_rational(f: MuRationalFunction, mu: Fraction) -> Fraction:
    """Exact evaluation of a rational function at rational mu."""
    return f.evaluate(Fraction(mu))


# --- the closed-form families stated for p_{k,mu}(-1,1) ---------------------

def p_4n_minus_2_closed(n: int) -> MuRationalFunction:
    """mu * 2^(2n-1) * prod_{k=n+1}^{2n-1}(mu+k-1) / prod_{k=1}^{n}(mu+k-1/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    num = _prod(MuPolynomial.mu_plus(k - 1) for k in range(n + 1, 2 * n))
    num = num.times_mu().scale(Fraction(2) ** (2 * n - 1))
    den = _prod(MuPolynomial.mu_plus(k - HALF) for k in range(1, n + 1))
    return MuRationalFunction(num, den)


def p_4n_closed(n: int) -> MuRationalFunction:
    """mu * 2^(2n) * prod_{k=n+1}^{2n-1}(mu+k) / prod_{k=1}^{n}(mu+k-1/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    num = _prod(MuPolynomial.mu_plus(k) for k in range(n + 1, 2 * n))
    num = num.times_mu().scale(Fraction(2) ** (2 * n))
    den = _prod(MuPolynomial.mu_plus(k - HALF) for k in range(1, n + 1))
    return MuRationalFunction(num, den)


def p_2n_sum_closed(n: int) -> MuRationalFunction:
    """(2 mu / n) * sum_{k=0}^{n-1} of the deformed binomial (2n over 2k+1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    terms = [_binom_factored(2 * n, 2 * k + 1) for k in range(n)]
    s = _factored_sum(terms)
    return MuRationalFunction(s.num.times_mu().scale(Fraction(2, n)), s.den)


# --- verification reports ----------------------------------------------------

@dataclass
class IdentityCheck:
    """One exactly-decided identity: a single index k, labelled per family."""

    family: str
    index: int
    passed: bool
    n: int | None = None
    lhs: dict | None = None
    rhs: dict | None = None
    sampled_equal: bool | None = None

    def to_dict(self) -> dict:
        out = {"family": self.family, "index": self.index, "passed": self.passed}
        if self.n is not None:
            out["n"] = self.n
        if self.lhs is not None:
            out["lhs"] = self.lhs
        if self.rhs is not None:
            out["rhs"] = self.rhs
        if self.sampled_equal is not None:
            out["sampled_equal"] = self.sampled_equal
        return out


@dataclass
class IdentityReport:
    checks: list[IdentityCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self, **kwargs) -> str:
        payload = {
            "schema_version": 1,
            "all_passed": self.all_passed,
            "checks": [c.to_dict() for c in self.checks],
        }
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("indent", 2)
        return json.dumps(payload, **kwargs)


def verify_odd_vanishing(k_max: int) -> IdentityReport:
    """Check p_{k,mu}(-1,1) == 0 exactly for every odd k <= k_max."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    report = IdentityReport()
    for k in range(1, k_max + 1, 2):
        p = p_at_exact(k)
        report.checks.append(
            IdentityCheck(
                family="odd_vanishing", index=k, passed=p.is_zero, lhs=p.to_dict()
            )
        )
    return report


def _sample_points(deg: int):
    # deg+1 distinct rational points; positive integers avoid every pole,
    # since all denominators vanish only at negative half-integers.
    return [Fraction(t) for t in range(1, deg + 2)]


def _closed_form_check(family: str, n: int, index: int, lhs: MuRationalFunction,
                       rhs: MuRationalFunction) -> IdentityCheck:
    symbolic = lhs.cross_equal(rhs)
    deg = max(lhs.num.degree, lhs.den.degree, rhs.num.degree, rhs.den.degree)
    sampled = all(lhs.evaluate(pt) == rhs.evaluate(pt) for pt in _sample_points(deg))
    return IdentityCheck(
        family=family,
        index=index,
        n=n,
        passed=symbolic and sampled,
        lhs=lhs.to_dict(),
        rhs=rhs.to_dict(),
        sampled_equal=sampled,
    )


def verify_closed_forms(n_max: int = 12) -> IdentityReport:
    """Compare direct expansion of p_{k,mu}(-1,1) against the three stated
    closed-form families, per n, by exact cross-multiplication.

    Each check is per-n evidence only; a pass here does not prove the
    families for all n.  Point sampling at degree+1 rational points is kept
    as an independent secondary check on the symbolic comparison.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    report = IdentityReport()
    for n in range(1, n_max + 1):
        report.checks.append(_closed_form_check(
            "p_4n_minus_2", n, 4 * n - 2, p_at_exact(4 * n - 2), p_4n_minus_2_closed(n)))
        report.checks.append(_closed_form_check(
            "p_4n", n, 4 * n, p_at_exact(4 * n), p_4n_closed(n)))
        report.checks.append(_closed_form_check(
            "p_2n_sum", n, 2 * n, p_at_exact(2 * n), p_2n_sum_closed(n)))
    return report
