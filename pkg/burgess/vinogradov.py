"""Counting solutions of Vinogradov systems.

``J_r(G, X)`` is the number of ``2r``-tuples of points of ``[1, X]^n`` whose
first ``r`` points have the same moments ``sum x^beta`` as the last ``r``
points, for every ``beta`` of the system ``G``. Writing ``N(v)`` for the
number of ``r``-tuples with moment vector ``v``, ``J = sum N(v)^2``, which
is what :func:`jr_mitm` computes.

>>> from burgess.systems import standard_system
>>> jr_mitm(standard_system(2, 1), 2, 2).J
36
"""

import itertools
import logging
import math
import time
import typing as t

from fractions import Fraction

import numpy as np

import burgess

from burgess.systems import MonomialSystem, is_tdi, ppw_regime
from burgess.util import box_points, check_budget, partitioned_map

__all__ = ('UnsupportedSystem', 'MomentVector', 'CountResult', 'Prediction',
           'SlopeReport', 'jr_bruteforce', 'jr_mitm', 'vr_count',
           'moment_counts', 'predicted_exponent', 'slope_check',
           'standard_linear_count')

log = logging.getLogger(__name__)

#: One entry per monomial of the system.
MomentVector = t.Tuple[int, ...]

_INT64_SAFE = 2 ** 62


class UnsupportedSystem(ValueError):
    """No mean value exponent is known for this system and ``r``."""


class CountResult(t.NamedTuple):
    J: int
    X: int
    r: int
    system: str
    method: str
    wall_time: float

    def row(self, timing: bool = True) -> t.Tuple[t.Any, ...]:
        """``(system, r, X, J, method[, seconds])``."""
        row = (self.system, self.r, self.X, self.J, self.method)
        return row + (round(self.wall_time, 6),) if timing else row

    def as_dict(self, timing: bool = True) -> t.Dict[str, t.Any]:
        data = {
            'system': self.system,
            'r': self.r,
            'X': self.X,
            'J': self.J,
            'method': self.method,
        }  # type: t.Dict[str, t.Any]
        if timing:
            data['seconds'] = round(self.wall_time, 6)
        return data


def _cube(n: int, X: int) -> t.List[t.Tuple[int, ...]]:
    return list(box_points((0,) * n, (X,) * n))


def jr_bruteforce(G: MonomialSystem, r: int, X: int) -> CountResult:
    """Count by visiting every ``2r``-tuple."""
    if r < 1 or X < 1:
        raise ValueError("Need r >= 1 and X >= 1")
    check_budget("brute force J_r", X ** (2 * r * G.n),
                 burgess.config.enumeration_budget)
    start = time.monotonic()
    moments = [G.moments(p) for p in _cube(G.n, X)]

    def half_sum(indices: t.Tuple[int, ...]) -> MomentVector:
        return tuple(map(sum, zip(*(moments[i] for i in indices))))

    sums = [half_sum(h)
            for h in itertools.product(range(len(moments)), repeat=r)]
    count = 0
    for left in sums:
        for right in sums:
            if left == right:
                count += 1
    return CountResult(count, X, r, G.descriptor(), 'bruteforce',
                       time.monotonic() - start)


def moment_counts(
    G: MonomialSystem,
    r: int,
    points: t.Sequence[t.Sequence[int]],
    threads: t.Optional[int] = None,
) -> t.List[int]:
    """``N(v)`` for every moment vector ``v`` reached by an ``r``-tuple.

    The ``r``-tuples are split by their first point, one block per
    thread, and the per-block tallies merged by key. Only the multiset of
    counts is returned.
    """
    if threads is None:
        threads = burgess.config.threads
    size = len(points)
    check_budget("r-tuple moments", size ** r, burgess.config.mitm_budget)
    if not points:
        return []
    peak = r * max(abs(v) for p in points for v in G.moments(p))
    if peak >= _INT64_SAFE:
        return _moment_counts_exact(G, r, points)
    table = np.array([G.moments(p) for p in points], dtype=np.int64)
    tail = np.zeros((1, G.R), dtype=np.int64)
    for _ in range(r - 1):
        tail = (tail[:, None, :] + table[None, :, :]).reshape(-1, G.R)

    def block(indices: "np.ndarray[t.Any, np.dtype[np.int64]]") -> t.Any:
        sums = (table[indices][:, None, :] + tail[None, :, :]).reshape(
            -1, G.R
        )
        return np.unique(sums, axis=0, return_counts=True)

    blocks = [b for b in np.array_split(np.arange(size), max(1, threads))
              if len(b)]
    parts = partitioned_map(block, blocks, threads)
    if len(parts) == 1:
        counts = parts[0][1]
    else:
        keys = np.concatenate([p[0] for p in parts])
        weights = np.concatenate([p[1] for p in parts])
        _, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        counts = np.zeros(int(inverse.max()) + 1, dtype=np.int64)
        np.add.at(counts, inverse, weights)
    log.debug("%d r-tuples give %d moment vectors", size ** r, len(counts))
    return [int(c) for c in counts.tolist()]


def _moment_counts_exact(
    G: MonomialSystem, r: int, points: t.Sequence[t.Sequence[int]]
) -> t.List[int]:
    """Arbitrary precision fallback when moments overflow 64 bits."""
    log.info("Moments exceed 64 bits, counting with Python integers")
    moments = [G.moments(p) for p in points]
    tally = {}  # type: t.Dict[MomentVector, int]
    for combo in itertools.product(moments, repeat=r):
        key = tuple(map(sum, zip(*combo)))
        tally[key] = tally.get(key, 0) + 1
    return list(tally.values())


def jr_mitm(G: MonomialSystem, r: int, X: int) -> CountResult:
    """Count as ``sum N(v)^2`` over the moment vectors of ``r``-tuples."""
    if r < 1 or X < 1:
        raise ValueError("Need r >= 1 and X >= 1")
    start = time.monotonic()
    counts = moment_counts(G, r, _cube(G.n, X))
    return CountResult(sum(c * c for c in counts), X, r, G.descriptor(),
                       'mitm', time.monotonic() - start)


def vr_count(G: MonomialSystem, r: int, k: t.Sequence[int]) -> int:
    """Collections of ``(0, k]^(2r)`` with all signed moments zero."""
    if len(k) != G.n:
        raise ValueError("Expected {} sides".format(G.n))
    points = list(box_points((0,) * G.n, k))
    return sum(c * c for c in moment_counts(G, r, points))


def standard_linear_count(n: int, r: int, X: int) -> int:
    """``J_r`` of the linear system in ``n`` variables.

    The coordinates decouple, so this is the one-variable count of
    ``a_1 + ... + a_r = b_1 + ... + b_r`` raised to the ``n``.
    """
    ways = {0: 1}  # type: t.Dict[int, int]
    for _ in range(r):
        step = {}  # type: t.Dict[int, int]
        for total, count in ways.items():
            for a in range(1, X + 1):
                step[total + a] = step.get(total + a, 0) + count
        ways = step
    return sum(c * c for c in ways.values()) ** n


class Prediction(t.NamedTuple):
    """The largest term of the mean value upper bound.

    ``terms[0]`` is the diagonal exponent ``rn`` and ``terms[j]`` the
    exponent ``2rj + (n - j) - K_j``; ties go to the smallest index.
    """
    exponent: Fraction
    j_star: int
    terms: t.Tuple[Fraction, ...]
    regime: str


def predicted_exponent(
    G: MonomialSystem,
    r: int,
    K: t.Optional[t.Sequence[t.Any]] = None,
) -> Prediction:
    """The exponent of ``X`` in the sharp upper bound for ``J_r(G, X)``.

    Standard systems use ``K_j = jd/(j+1) * C(j+d, j)``. ACK systems need
    ``K = (K_1, ..., K_n)``. Any other system is only covered for
    translation-dilation invariant ``G`` with ``r > R(d + 1)``, where the
    exponent is ``2rn - M``.

    >>> from burgess.systems import standard_system
    >>> predicted_exponent(standard_system(2, 1), 2)[:2]
    (Fraction(6, 1), 2)
    """
    n = G.n
    if K is None and G.kind == 'standard':
        K = [G.K(j) for j in range(1, n + 1)]
    if K is None:
        if G.kind == 'ack':
            raise UnsupportedSystem("ACK systems need K_1, ..., K_n")
        if is_tdi(G) and ppw_regime(G, r):
            exponent = Fraction(2 * r * n - G.M)
            return Prediction(exponent, n, (exponent,), 'ppw')
        raise UnsupportedSystem(
            "No exponent known for {} at r = {}".format(G.descriptor(), r)
        )
    if len(K) != n:
        raise ValueError("Expected {} values of K_j".format(n))
    terms = (Fraction(r * n),) + tuple(
        Fraction(2 * r * j + (n - j)) - Fraction(K[j - 1])
        for j in range(1, n + 1)
    )
    exponent = max(terms)
    return Prediction(exponent, terms.index(exponent), terms, G.kind)


class SlopeReport(t.NamedTuple):
    slope: float
    predicted: t.Optional[Fraction]
    counts: t.List[CountResult]

    def as_dict(self, timing: bool = False) -> t.Dict[str, t.Any]:
        return {
            'slope': self.slope,
            'predicted': (None if self.predicted is None
                          else str(self.predicted)),
            'counts': [c.as_dict(timing) for c in self.counts],
        }


def slope_check(
    G: MonomialSystem,
    r: int,
    X_list: t.Sequence[int],
    method: str = 'mitm',
) -> SlopeReport:
    """Least squares slope of ``log J`` against ``log X``."""
    if len(set(X_list)) < 3:
        raise ValueError("A slope needs at least three distinct X")
    count = {'mitm': jr_mitm, 'bruteforce': jr_bruteforce}[method]
    results = [count(G, r, X) for X in X_list]
    slope = np.polyfit(
        [math.log(c.X) for c in results],
        [math.log(c.J) for c in results],
        1,
    )[0]
    predicted = None  # type: t.Optional[Fraction]
    try:
        predicted = predicted_exponent(G, r).exponent
    except UnsupportedSystem:
        pass
    return SlopeReport(float(slope), predicted, results)
