"""The measure m_mu on interval sets: closed-form moments and panel rules.

dm_mu(x) = norm_const |x|^(2 mu) dx.  All moments reduce to the
antiderivative x^(2 mu + n + 1)/(2 mu + n + 1) on panels that avoid 0, with
sign (-1)^n on reflected negative panels; the exponent is always positive
for mu > -1/2, so no panel ever needs a principal value.

Panel quadrature rules are weight-aware at the origin: a panel touching 0
uses Gauss-Jacobi nodes exact against the x^(2 mu) factor, which matters
for -1/2 < mu < 0 where the density is integrable but unbounded.
"""

from __future__ import annotations

import math
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_legendre

from .core import MuContext, gauss_jacobi
from .intervals import IntervalSet


def _positive_panels(A: IntervalSet):
    """Split A at the origin into panels on [0, inf) plus a reflection flag.

    Yields (a, b, reflected); each panel satisfies 0 <= a < b and
    integrates f(x) for reflected=False, f(-x) for reflected=True.
    """
    for lo, hi in A.intervals:
        if hi <= 0.0:
            yield -hi, -lo, True
        elif lo >= 0.0:
            yield lo, hi, False
        else:
            yield 0.0, -lo, True
            yield 0.0, hi, False


def moment(A: IntervalSet, ctx: MuContext, n: int = 0) -> float:
    """The n-th moment of m_mu over A, by closed-form antiderivative."""
    if n < 0:
        raise ValueError("n must be >= 0")
    p = 2.0 * ctx.mu + n + 1.0
    total = 0.0
    for a, b, reflected in _positive_panels(A):
        part = (b ** p - a ** p) / p
        total += -part if (reflected and n % 2) else part
    return ctx.norm_const * total


def measure(A: IntervalSet, ctx: MuContext) -> float:
    """m_mu(A) >= 0."""
    return moment(A, ctx, 0)


def moment_mp(A: IntervalSet, mu, n: int):
    """The n-th moment in the current mpmath working precision."""
    mu = mpmath.mpf(mu)
    norm = 1 / (mpmath.power(2, mu + mpmath.mpf("0.5"))
                * mpmath.gamma(mu + mpmath.mpf("0.5")))
    p = 2 * mu + n + 1
    total = mpmath.mpf(0)
    for a, b, reflected in _positive_panels(A):
        part = (mpmath.power(b, p) - mpmath.power(a, p)) / p
        total += -part if (reflected and n % 2) else part
    return norm * total


@lru_cache(maxsize=256)
def _legendre(n: int):
    x, w = roots_legendre(n)
    return x, w


@lru_cache(maxsize=256)
def _origin_rule(mu: float, n: int):
    # Gauss-Jacobi for weight (1+t)^(2 mu) on [-1,1]; mapped onto [0,h]
    # this is exact against the x^(2 mu) density factor.
    return gauss_jacobi(n, 0.0, 2.0 * mu)


def weighted_panel_rule(A: IntervalSet, ctx: MuContext, panels_per_interval: int,
                        nodes_per_panel: int):
    """Nodes and weights integrating f against dm_mu over A.

    Each interval is split into equal panels; panels touching the origin
    get the Jacobi rule exact for the |x|^(2 mu) factor, all others plain
    Gauss-Legendre with the density evaluated at the nodes.
    """
    xs, ws = [], []
    for a, b, reflected in _positive_panels(A):
        edges = np.linspace(a, b, panels_per_interval + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            if lo == 0.0:
                t, w = _origin_rule(ctx.mu, nodes_per_panel)
                half = 0.5 * hi
                x = half * (1.0 + t)
                wt = w * half ** (2.0 * ctx.mu + 1.0) * ctx.norm_const
            else:
                t, w = _legendre(nodes_per_panel)
                half = 0.5 * (hi - lo)
                x = 0.5 * (lo + hi) + half * t
                wt = w * half * np.abs(x) ** (2.0 * ctx.mu) * ctx.norm_const
            xs.append(-x if reflected else x)
            ws.append(wt)
    if not xs:
        return np.empty(0), np.empty(0)
    return np.concatenate(xs), np.concatenate(ws)
