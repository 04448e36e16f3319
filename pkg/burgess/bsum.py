"""Stratification ceilings ``B_{n,r}(j;k)`` and the B-sum inequality.

For sorted sides ``k_1 <= ... <= k_n`` and ``Theta = (r-1) // (n-1)``::

    B(0)     = 1
    B(j)     = k_1^(j*Theta)                     for 1 <= j <= n-2
    B(n-1)   = k_1^(r-1)
    B(n)     = (k_1 ... k_{n/2})^(2r)             n even
             = (k_1 ... k_{(n-1)/2})^(2r) k_{(n+1)/2}^r   n odd

Whenever ``q^(1/2) K_1^(-Theta) <= 1`` the weighted sum
``sum_j q^(j/2) / B(j; K)`` is at most ``n q^(1/2) K_1^(-Theta)``.
:func:`check_b_sum` verifies that numerically; the terms are compared in
log space because ``B`` gets astronomically large.

>>> b_function(2, 3, 1, (2, 3)), b_function(2, 3, 2, (2, 3))
(4, 64)
"""

import logging
import math
import typing as t

from fractions import Fraction

import numpy as np

__all__ = ('AuditError', 'InequalityViolation', 'UnsortedSides',
           'b_function', 'stratum_ceiling', 'BSumCheck', 'check_b_sum',
           'BSumReport', 'verify_b_sum_lemma', 'sample_b_sum_cases')

log = logging.getLogger(__name__)

#: Slack for comparisons made in log space.
LOG_TOLERANCE = 1e-9


class AuditError(Exception):
    """Base class for failed numerical audits."""


class InequalityViolation(AuditError):
    """A sample that breaks the B-sum inequality."""

    def __init__(self, message: str, sample: t.Any) -> None:
        super().__init__(message)
        self.sample = sample


class UnsortedSides(ValueError):
    pass


def _theta(n: int, r: int) -> int:
    return (r - 1) // (n - 1)


def b_function(n: int, r: int, j: int, k: t.Sequence[int]) -> int:
    """``B_{n,r}(j; k)`` for sorted sides ``k``."""
    if not r >= n >= 2:
        raise ValueError("Need r >= n >= 2, got n = {}, r = {}".format(n, r))
    if not 0 <= j <= n:
        raise ValueError("j = {} is outside 0..{}".format(j, n))
    if len(k) != n:
        raise ValueError("Expected {} sides, got {}".format(n, len(k)))
    if any(a > b for a, b in zip(k, k[1:])):
        raise UnsortedSides("Sides {} are not sorted".format(tuple(k)))
    if j == 0:
        return 1
    if j <= n - 2:
        return k[0] ** (j * _theta(n, r))
    if j == n - 1:
        return k[0] ** (r - 1)
    if n % 2 == 0:
        return math.prod(k[:n // 2]) ** (2 * r)
    half = (n - 1) // 2
    return math.prod(k[:half]) ** (2 * r) * k[half] ** r


def stratum_ceiling(
    n: int, r: int, j: int, k: t.Sequence[int], C2: t.Any = 1
) -> Fraction:
    """``C2 * (k_1 ... k_n)^(2r) / B_{n,r}(j; k)``."""
    return (Fraction(C2) * math.prod(k) ** (2 * r)
            / b_function(n, r, j, k))


def _log_sum_exp(values: t.Sequence[float]) -> float:
    top = max(values)
    return top + math.log(math.fsum(math.exp(v - top) for v in values))


class BSumCheck(t.NamedTuple):
    """One evaluation of the B-sum inequality, all sides as natural logs.

    ``status`` is ``'pass'`` or ``'skipped'`` (when ``q^(1/2) K_1^(-Theta)``
    exceeds 1 and the inequality makes no claim).
    """
    status: str
    log_lhs: float
    log_rhs: float
    log_ratio: float


def check_b_sum(n: int, r: int, q: int, K: t.Sequence[int]) -> BSumCheck:
    """Check one sample; raise :class:`InequalityViolation` if it fails.

    Both the full inequality and the geometric bound on the terms with
    ``j <= n - 1`` are checked.
    """
    theta = _theta(n, r)
    log_ratio = 0.5 * math.log(q) - theta * math.log(K[0])
    terms = [
        0.5 * j * math.log(q) - math.log(b_function(n, r, j, K))
        for j in range(1, n + 1)
    ]
    lhs = _log_sum_exp(terms)
    rhs = math.log(n) + log_ratio
    if log_ratio > LOG_TOLERANCE:
        return BSumCheck('skipped', lhs, rhs, log_ratio)
    sample = (n, r, q, tuple(K))
    if lhs > rhs + LOG_TOLERANCE:
        raise InequalityViolation(
            "B-sum {:.6g} exceeds {:.6g}".format(lhs, rhs), sample
        )
    if n > 1:
        head = _log_sum_exp(terms[:n - 1])
        geometric = _log_sum_exp([j * log_ratio for j in range(1, n)])
        if head > geometric + LOG_TOLERANCE:
            raise InequalityViolation(
                "Partial B-sum {:.6g} exceeds geometric bound {:.6g}"
                .format(head, geometric), sample
            )
    return BSumCheck('pass', lhs, rhs, log_ratio)


class BSumReport(t.NamedTuple):
    checked: int
    passed: int
    skipped: t.List[t.Tuple[int, int, int, t.Tuple[int, ...]]]
    seed: int

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'checked': self.checked,
            'passed': self.passed,
            'skipped': [[n, r, q, list(K)] for n, r, q, K in self.skipped],
            'seed': self.seed,
        }


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _sorted_sides(
    rng: np.random.Generator, n: int, K1: int, spread: int
) -> t.Tuple[int, ...]:
    rest = sorted(int(v) for v in rng.integers(K1, spread * K1 + 1,
                                               size=n - 1))
    return (K1,) + tuple(rest)


def verify_b_sum_lemma(
    n: int,
    r: int,
    q: int,
    K1: int,
    trials: int,
    seed: int = 0,
    spread: int = 4,
) -> BSumReport:
    """Check ``trials`` side vectors starting at ``K1``.

    The remaining sides are drawn from ``[K1, spread * K1]`` and sorted.
    """
    rng = _generator(seed)
    passed = 0
    skipped = []
    for _ in range(trials):
        K = _sorted_sides(rng, n, K1, spread)
        result = check_b_sum(n, r, q, K)
        if result.status == 'pass':
            passed += 1
        else:
            skipped.append((n, r, q, K))
    log.info("B-sum: %d passed, %d skipped", passed, len(skipped))
    return BSumReport(trials, passed, skipped, seed)


def _random_prime(rng: np.random.Generator, limit: int) -> int:
    from burgess.ff_core import is_prime

    candidate = int(rng.integers(2, limit + 1))
    while not is_prime(candidate):
        candidate = candidate + 1 if candidate < limit else 2
    return candidate


def _min_side(q: int, theta: int) -> int:
    """The least ``K`` with ``K^(2 theta) >= q``."""
    side = max(1, math.floor(q ** (1 / (2 * theta))))
    while side ** (2 * theta) < q:
        side += 1
    while side > 1 and (side - 1) ** (2 * theta) >= q:
        side -= 1
    return side


def sample_b_sum_cases(
    trials: int,
    seed: int = 0,
    max_n: int = 4,
    max_r: int = 20,
    max_q: int = 10 ** 4,
) -> BSumReport:
    """Check random ``(n, r, q, K)`` that all satisfy the side relation.

    ``2 <= n <= max_n``, ``n <= r <= max_r``, ``q`` a prime up to ``max_q``
    and ``K_1`` the smallest side with ``q^(1/2) K_1^(-Theta) <= 1`` up to
    four times that.
    """
    rng = _generator(seed)
    passed = 0
    skipped = []
    for _ in range(trials):
        n = int(rng.integers(2, max_n + 1))
        r = int(rng.integers(n, max_r + 1))
        q = _random_prime(rng, max_q)
        low = _min_side(q, _theta(n, r))
        K1 = int(rng.integers(low, 4 * low + 1))
        K = _sorted_sides(rng, n, K1, 4)
        if check_b_sum(n, r, q, K).status == 'pass':
            passed += 1
        else:
            skipped.append((n, r, q, K))
    return BSumReport(trials, passed, skipped, seed)
