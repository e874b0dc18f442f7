"""Closed-form success probabilities and the listing-threshold solver.

These are the sizing tools: given a hash count k, how many cells per
stored pair guarantee that peeling recovers everything (the 2-core
threshold c_k), and what lookup success rate a given load implies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_GRID_POINTS = 10_000
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SizingSpec:
    """Inputs for choosing a table size.

    ``t`` is the design threshold: the largest number of live pairs for
    which full listing must succeed. ``epsilon`` is extra headroom above
    the peeling threshold. ``target_get_success`` additionally sizes for
    single-lookup success probability, which usually dominates.
    """

    t: int
    k: int
    epsilon: float = 0.0
    target_get_success: float | None = None

    def __post_init__(self) -> None:
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.target_get_success is not None and not (
            0.0 < self.target_get_success < 1.0
        ):
            raise ValueError("target_get_success must lie in (0, 1)")


@dataclass(frozen=True)
class PoisonModel:
    """Invalid-key load: ``gamma`` is the fraction of keys carrying multiple
    values; ``beta`` optionally describes the shrinking-count regime where
    the invalid population is n**(1-beta)."""

    gamma: float
    beta: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.beta is not None and not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")


def _min_shortfall(alpha: float, k: int) -> float:
    """min over x in (0,1) of f(x) = x - (1 - exp(-k*alpha*x**(k-1))).

    The peeling recursion escapes to zero iff f stays positive on (0,1).
    f is smooth with a single interior dip near the threshold, so a coarse
    grid plus golden-section refinement around the grid minimum is exact
    to far better than the bisection tolerance.
    """
    xs = np.linspace(0.0, 1.0, _GRID_POINTS + 2)[1:-1]
    fs = xs - 1.0 + np.exp(-k * alpha * xs ** (k - 1))
    j = int(np.argmin(fs))
    lo = xs[j - 1] if j > 0 else xs[0] / 2
    hi = xs[j + 1] if j < len(xs) - 1 else (1.0 + xs[-1]) / 2

    def f(x: float) -> float:
        return x - 1.0 + math.exp(-k * alpha * x ** (k - 1))

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(64):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return min(fc, fd, float(fs[j]))


def core_threshold(k: int, tol: float = 1e-4) -> float:
    """Space-per-pair threshold c_k above which peeling completes w.h.p.

    Solved by bisecting the load alpha = 1/c over the feasibility predicate
    "the decoding recursion dies out for every starting point", and
    returning 1/alpha to absolute tolerance ``tol``.
    """
    if k < 3:
        raise ValueError("core_threshold requires k >= 3")
    if not 0.0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    lo = 1.0 / k  # always feasible: 1 - exp(-x**(k-1)) < x on (0,1)
    hi = 1.0  # never feasible for k >= 3: thresholds exceed one
    while (1.0 / lo - 1.0 / hi) > tol:
        mid = (lo + hi) / 2.0
        if _min_shortfall(mid, k) > 0.0:
            lo = mid
        else:
            hi = mid
    return (1.0 / lo + 1.0 / hi) / 2.0


def get_success_prob(k: int, n: int, m: int) -> float:
    """Probability a lookup of a stored key returns its value (Poisson model)."""
    if n < 0 or m < k:
        raise ValueError("need n >= 0 and m >= k")
    if n == 0:
        return 1.0
    return 1.0 - (1.0 - math.exp(-k * n / m)) ** k


def absent_null_fail_prob(k: int, n: int, m: int) -> float:
    """Probability a lookup of an absent key fails to give a definitive null.

    Every probed cell must hold two or more other keys, since an empty cell
    or a singleton both settle the question.
    """
    if n < 0 or m < k:
        raise ValueError("need n >= 0 and m >= k")
    lam = k * n / m
    return max(0.0, 1.0 - math.exp(-lam) - lam * math.exp(-lam)) ** k


def empty_cell_prob(k: int, n: int, m: int) -> tuple[float, float]:
    """P(one of a stored key's cells holds no other key): (exact, approximation).

    Exact form counts the other n-1 keys missing the cell independently;
    the approximation is the Poisson limit exp(-kn/m).
    """
    if m <= k:
        raise ValueError("need m > k")
    if n < 0:
        raise ValueError("need n >= 0")
    exact = (1.0 - k / m) ** (n - 1) if n >= 1 else 1.0
    return exact, math.exp(-k * n / m)


def all_poisoned_prob(k: int, n: int, m: int, gamma: float) -> float:
    """P(a valid key lands only on cells touched by invalid keys) when a
    ``gamma`` fraction of the n keys carry multiple values."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    if n < 0 or m < k:
        raise ValueError("need n >= 0 and m >= k")
    return (1.0 - math.exp(-k * gamma * n / m)) ** k


def size_table(spec: SizingSpec) -> int:
    """Smallest workable cell count for the spec, rounded up to a k-multiple.

    Takes the max of the listing-driven size ceil((c_k + eps) * t) and, when
    a lookup target is given, the smallest m whose predicted lookup success
    meets it.
    """
    k, t = spec.k, spec.t
    c = core_threshold(k)
    m = math.ceil((c + spec.epsilon) * t)
    if spec.target_get_success is not None:
        s = spec.target_get_success
        denom = -math.log(1.0 - (1.0 - s) ** (1.0 / k))
        m_get = max(k, math.ceil(k * t / denom))
        while get_success_prob(k, t, m_get) < s:
            m_get += 1
        while m_get > k and get_success_prob(k, t, m_get - 1) >= s:
            m_get -= 1
        m = max(m, m_get)
    return ((m + k - 1) // k) * k


def invalid_tolerant_hash_count(beta: float) -> int:
    """Hash count that keeps listing reliable with n**(1-beta) invalid keys."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    return math.ceil(1.0 / beta) + 4
