"""Closed-form stationary laws and their large-population limits.

Two exchange dynamics, two stationary families:

* the oriented-edge dynamics is uniform over all ways to split ``m`` dollars
  among ``n`` agents, so a tagged agent's dollar count follows the
  hypergeometric-style ratio implemented in ``model1_marginal``, converging
  to a geometric law with mean ``T = m/n`` and, for large ``T``, to an
  exponential density;
* the uniform-dollar dynamics makes each bill an independent walker with
  degree-proportional stationary position, so a vertex's count is binomial
  (``model2_marginal``), converging to Poisson(``T``) on regular graphs.

Everything here is a pure function.  Exact results are ``fractions.Fraction``
over Python big integers; the ``*_vector`` helpers switch to log-gamma
floating evaluation when the state-space size exceeds a digit budget.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .graphs import Graph
from .states import check_config, count_states

EXACT_DIGIT_BUDGET = 200


def comb0(a: int, b: int) -> int:
    """Binomial coefficient extended by 0 outside the triangle."""
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def model1_stationary_prob(n: int, m: int,
                           config: Sequence[int] | None = None) -> Fraction:
    """Stationary probability of any single configuration: the flat law.

    The oriented-edge dynamics is doubly stochastic on the configuration
    space, so every configuration carries weight 1/count_states(n, m)
    regardless of ``config``.
    """
    if config is not None:
        check_config(config, n=n, total=m)
    return Fraction(1, count_states(n, m))


def model1_marginal(n: int, m: int, d: int) -> Fraction:
    """Probability a tagged agent holds exactly ``d`` under the flat law.

    Counts configurations with a fixed coordinate equal to ``d`` (the rest
    is a smaller splitting problem) against all configurations:
    ``count_states(n-1, m-d) / count_states(n, m)``.  Zero outside
    ``0 <= d <= m``.
    """
    if n < 2:
        raise ValueError(f"marginal needs n >= 2, got {n}")
    if d < 0 or d > m:
        return Fraction(0)
    num = comb0(m + n - d - 2, n - 2)
    return Fraction(num, count_states(n, m))


def model1_marginal_vector(n: int, m: int, dmax: int | None = None,
                           digit_budget: int = EXACT_DIGIT_BUDGET) -> np.ndarray:
    """Float vector of ``model1_marginal(n, m, d)`` for ``d = 0..dmax``.

    Uses exact rationals when the state-space size has at most
    ``digit_budget`` digits, otherwise the stable multiplicative recurrence
    p(0) = (n-1)/(m+n-1),  p(d+1) = p(d) * (m-d)/(m+n-d-2),
    which follows from cancelling consecutive binomials.
    """
    if dmax is None:
        dmax = m
    if digit_budget > 0 and len(str(count_states(n, m))) <= digit_budget:
        return np.array([float(model1_marginal(n, m, d))
                         for d in range(dmax + 1)])
    out = np.zeros(dmax + 1)
    p = (n - 1) / (m + n - 1)
    for d in range(min(dmax, m) + 1):
        out[d] = p
        p *= (m - d) / (m + n - d - 2)
    return out


def model1_marginal_limit(T: float, d: int | np.ndarray) -> float | np.ndarray:
    """Large-population limit of the tagged-agent law: geometric with mean T.

    Mass ``(1/(T+1)) * (T/(T+1))**d`` at each ``d >= 0``.
    """
    if T <= 0:
        raise ValueError(f"mean dollars per agent must be positive, got {T}")
    d = np.asarray(d)
    vals = (1.0 / (T + 1.0)) * (T / (T + 1.0)) ** d
    return float(vals) if vals.ndim == 0 else vals


def exponential_density(T: float, d: float | np.ndarray) -> float | np.ndarray:
    """High-mean continuum approximation ``exp(-d/T)/T`` of the geometric."""
    if T <= 0:
        raise ValueError(f"mean dollars per agent must be positive, got {T}")
    d = np.asarray(d, dtype=float)
    vals = np.exp(-d / T) / T
    return float(vals) if vals.ndim == 0 else vals


def bill_marginal(g: Graph, w: int) -> Fraction:
    """Stationary position law of one bill: proportional to vertex degree."""
    if not 0 <= w < g.n:
        raise ValueError(f"vertex {w} outside [0, {g.n})")
    return Fraction(g.degree(w), int(g.degrees.sum()))


def model2_stationary_prob(g: Graph, config: Sequence[int]) -> Fraction:
    """Stationary probability of a configuration under uniform-dollar moves.

    Bills settle independently with the degree-proportional single-bill law,
    so a configuration's weight is the multinomial probability of its counts.
    Exact; for large totals prefer ``model2_stationary_logprob``.
    """
    cfg = check_config(config, n=g.n)
    total_deg = int(g.degrees.sum())
    m = sum(cfg)
    coef = 1
    rem = m
    for c in cfg:
        coef *= math.comb(rem, c)
        rem -= c
    prob = Fraction(coef, 1)
    for w, c in enumerate(cfg):
        if c:
            prob *= Fraction(g.degree(w), total_deg) ** c
    return prob


def model2_stationary_logprob(g: Graph, config: Sequence[int]) -> float:
    """Natural log of ``model2_stationary_prob`` via log-gamma."""
    cfg = check_config(config, n=g.n)
    m = sum(cfg)
    log_total_deg = math.log(int(g.degrees.sum()))
    out = math.lgamma(m + 1)
    for w, c in enumerate(cfg):
        out -= math.lgamma(c + 1)
        if c:
            out += c * (math.log(g.degree(w)) - log_total_deg)
    return out


def model2_marginal(g: Graph, x: int, m: int, d: int) -> Fraction:
    """Probability vertex ``x`` holds ``d`` of ``m`` dollars at stationarity.

    Binomial: each of the ``m`` bills sits at ``x`` independently with
    probability ``bill_marginal(g, x)``.  Zero outside ``0 <= d <= m``.
    """
    if m < 0:
        raise ValueError(f"total money must be non-negative, got {m}")
    if d < 0 or d > m:
        return Fraction(0)
    p = bill_marginal(g, x)
    return math.comb(m, d) * p ** d * (1 - p) ** (m - d)


def model2_marginal_vector(g: Graph, x: int, m: int,
                           dmax: int | None = None,
                           digit_budget: int = EXACT_DIGIT_BUDGET) -> np.ndarray:
    """Float vector of ``model2_marginal(g, x, m, d)`` for ``d = 0..dmax``."""
    if dmax is None:
        dmax = m
    p = bill_marginal(g, x)
    if digit_budget > 0 and len(str(p.denominator ** m)) <= digit_budget:
        return np.array([float(model2_marginal(g, x, m, d))
                         for d in range(dmax + 1)])
    return binomial_pmf_vector(m, float(p), dmax)


def binomial_pmf_vector(n_trials: int, p: float, dmax: int) -> np.ndarray:
    """Binomial(n_trials, p) masses at ``0..dmax``, log-gamma evaluated."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"success probability outside [0, 1]: {p}")
    ds = np.arange(dmax + 1)
    out = np.zeros(dmax + 1)
    top = min(dmax, n_trials)
    if p == 0.0:
        out[0] = 1.0
        return out
    if p == 1.0:
        if n_trials <= dmax:
            out[n_trials] = 1.0
        return out
    dd = ds[:top + 1]
    logs = (gammaln(n_trials + 1) - gammaln(dd + 1) - gammaln(n_trials - dd + 1)
            + dd * math.log(p) + (n_trials - dd) * math.log1p(-p))
    out[:top + 1] = np.exp(logs)
    return out


def poisson_pmf(T: float, d: int) -> float:
    """Poisson(T) mass at ``d``: ``T**d / d! * exp(-T)``."""
    if T <= 0:
        raise ValueError(f"Poisson mean must be positive, got {T}")
    if d < 0:
        return 0.0
    return math.exp(d * math.log(T) - T - math.lgamma(d + 1))


def poisson_pmf_vector(T: float, dmax: int) -> np.ndarray:
    if T <= 0:
        raise ValueError(f"Poisson mean must be positive, got {T}")
    ds = np.arange(dmax + 1)
    return np.exp(ds * math.log(T) - T - gammaln(ds + 1))
