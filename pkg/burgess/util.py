"""Utility definitions for internal use. Not part of the public API."""

import concurrent.futures
import functools
import itertools
import logging
import math
import typing as t

from fractions import Fraction

from burgess import BudgetExceeded

log = logging.getLogger(__name__)

T = t.TypeVar("T")
U = t.TypeVar("U")

#: A multi-index, e.g. ``(2, 1)`` for ``x1^2*x2``.
Exponents = t.Tuple[int, ...]
#: A point in ``Z^n``.
Point = t.Tuple[int, ...]
#: Anything :class:`fractions.Fraction` accepts.
Rational = t.Union[int, Fraction, str, float]

memoize = t.cast(t.Callable[[T], T], functools.lru_cache(maxsize=None))


def check_budget(what: str, needed: int, budget: int) -> None:
    """Raise :class:`burgess.BudgetExceeded` if ``needed > budget``."""
    if needed > budget:
        raise BudgetExceeded(what, needed, budget)
    log.debug("%s: %d terms (budget %d)", what, needed, budget)


def box_points(
    low: t.Sequence[int], sides: t.Sequence[int]
) -> t.Iterator[Point]:
    """Points of ``(low, low + sides]`` in lexicographic order."""
    return itertools.product(
        *(range(lo + 1, lo + side + 1) for lo, side in zip(low, sides))
    )


def partitioned_map(
    func: t.Callable[[T], U], parts: t.Iterable[T], threads: int
) -> t.List[U]:
    """Apply ``func`` to every partition, preserving partition order.

    The caller reduces the returned list in order, so the result does not
    depend on ``threads``.
    """
    parts = list(parts)
    if threads <= 1 or len(parts) <= 1:
        return [func(part) for part in parts]
    log.debug("Mapping %d partitions over %d threads", len(parts), threads)
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, parts))


def to_fraction(value: Rational) -> Fraction:
    """Convert exactly; floats go through their shortest repr.

    >>> to_fraction(0.02)
    Fraction(1, 50)
    """
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def round_half_up(value: Fraction) -> int:
    return math.floor(value + Fraction(1, 2))


def fraction_text(value: Fraction) -> str:
    """Render a rational as ``p/q`` (or ``p`` for integers)."""
    if value.denominator == 1:
        return str(value.numerator)
    return "{}/{}".format(value.numerator, value.denominator)
