"""Prime fields, primitive roots, discrete logarithms and Dirichlet characters.

Characters are stored as dense exponent tables, so evaluating one inside a
``q^n``-sized loop is a single array lookup.

>>> chi = build_character(5, 2)
>>> [char_eval(chi, a) for a in range(5)]
[0j, (1+0j), (-1+0j), (-1+0j), (1+0j)]
"""

import cmath
import logging
import math
import typing as t
import warnings

from fractions import Fraction

import numpy as np

from burgess.util import memoize

__all__ = ('FieldError', 'NotPrime', 'OrderNotDividing', 'OrderOne',
           'PrimeField', 'DirichletCharacter', 'ComplexAcc',
           'is_prime', 'find_primitive_root', 'prime_field',
           'build_character', 'char_eval', 'e', 'root_of_unity')

log = logging.getLogger(__name__)

#: Above this modulus the dense tables get expensive; we warn but go on.
SOFT_LIMIT = 10 ** 7

# Deterministic Miller-Rabin witnesses for every q < 3.3 * 10**24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class FieldError(ValueError):
    """Base class for errors about moduli and character orders."""


class NotPrime(FieldError):
    pass


class OrderNotDividing(FieldError):
    pass


class OrderOne(FieldError):
    pass


def is_prime(q: int) -> bool:
    """Deterministic primality test, exact for every ``q < 2**64``.

    >>> [p for p in range(20) if is_prime(p)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if q < 2:
        return False
    for p in _WITNESSES:
        if q % p == 0:
            return q == p
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _WITNESSES:
        x = pow(a, d, q)
        if x == 1 or x == q - 1:
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def prime_factors(m: int) -> t.List[int]:
    """The distinct prime factors of ``m >= 1``, by trial division."""
    factors = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            factors.append(p)
            while m % p == 0:
                m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append(m)
    return factors


def find_primitive_root(q: int) -> int:
    """The smallest generator of ``(Z/q)^x``.

    For ``q = 2`` the group is trivial and ``1`` is returned.

    >>> find_primitive_root(7)
    3
    """
    if not is_prime(q):
        raise NotPrime("{} is not prime".format(q))
    if q == 2:
        return 1
    cofactors = [(q - 1) // p for p in prime_factors(q - 1)]
    for g in range(2, q):
        if all(pow(g, c, q) != 1 for c in cofactors):
            return g
    raise AssertionError("prime {} without primitive root".format(q))


def _power_table(g: int, q: int) -> "np.ndarray[t.Any, np.dtype[np.int64]]":
    """``g^k mod q`` for ``0 <= k < q - 1``, built in sqrt-sized blocks."""
    size = q - 1
    step = math.isqrt(size) + 1
    base = np.empty(step, dtype=np.int64)
    acc = 1
    for i in range(step):
        base[i] = acc
        acc = acc * g % q
    blocks = []
    factor = 1
    for _ in range(0, size, step):
        blocks.append(base * factor % q)
        factor = factor * acc % q
    return np.concatenate(blocks)[:size]


class PrimeField:
    """The field ``Z/qZ`` with a fixed primitive root and a dlog table.

    ``dlog_table[a]`` is the discrete logarithm of ``a`` base
    ``primitive_root``; ``dlog_table[0]`` is ``-1``.
    """

    __slots__ = {
        "q": "The prime modulus.",
        "primitive_root": "The smallest generator of the unit group.",
        "dlog_table": "Read-only int64 array of discrete logarithms.",
    }

    q: int
    primitive_root: int
    dlog_table: "np.ndarray[t.Any, np.dtype[np.int64]]"

    def __init__(self, q: int) -> None:
        g = find_primitive_root(q)
        if q > SOFT_LIMIT:
            warnings.warn(
                "Building dense tables for q = {}; this needs {} MB".format(
                    q, 8 * q // 10 ** 6
                )
            )
        log.debug("Building dlog table for q = %d, g = %d", q, g)
        table = np.full(q, -1, dtype=np.int64)
        table[_power_table(g, q)] = np.arange(q - 1, dtype=np.int64)
        table.setflags(write=False)
        object.__setattr__(self, 'q', q)
        object.__setattr__(self, 'primitive_root', g)
        object.__setattr__(self, 'dlog_table', table)

    def dlog(self, a: int) -> t.Optional[int]:
        """Discrete logarithm of ``a``, or ``None`` when ``q | a``."""
        value = int(self.dlog_table[a % self.q])
        return None if value < 0 else value

    def inverse(self, a: int) -> int:
        return pow(a, -1, self.q)

    def __eq__(self, other: t.Any) -> t.Any:
        if self.__class__ is other.__class__:
            return self.q == other.q
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.__class__, self.q))

    def __repr__(self) -> str:
        return "{}({})".format(self.__class__.__name__, self.q)

    def __reduce__(self) -> t.Tuple[t.Any, ...]:
        return prime_field, (self.q,)

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))

    def __delattr__(self, name: str) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


@memoize
def prime_field(q: int) -> PrimeField:
    """Shared :class:`PrimeField` instance for ``q``."""
    return PrimeField(q)


def root_of_unity(k: int, m: int) -> complex:
    """``exp(2*pi*i*k/m)``, exact at multiples of a quarter turn."""
    k %= m
    if (4 * k) % m == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // m]
    return cmath.exp(2j * math.pi * k / m)


def e(value: t.Union[Fraction, float, int]) -> complex:
    """``exp(2*pi*i*value)``, with ``value`` reduced mod 1 first."""
    if isinstance(value, Fraction):
        frac = value - math.floor(value)
        return root_of_unity(frac.numerator, frac.denominator)
    return cmath.exp(2j * math.pi * (value % 1))


class DirichletCharacter:
    """A character of exact order ``order`` modulo a prime.

    ``exponents[a]`` is the ``e(a)`` with ``chi(a) = exp(2*pi*i*e(a)/order)``,
    or ``-1`` at ``a = 0`` where ``chi`` vanishes.
    """

    __slots__ = ('field', 'order', 'exponents', 'roots')

    field: PrimeField
    order: int
    exponents: "np.ndarray[t.Any, np.dtype[np.int64]]"
    roots: t.Tuple[complex, ...]

    def __init__(self, field: PrimeField, order: int) -> None:
        if order < 2:
            raise OrderOne("Character order must be at least 2")
        if (field.q - 1) % order:
            raise OrderNotDividing(
                "{} does not divide {}".format(order, field.q - 1)
            )
        exponents = np.where(
            field.dlog_table < 0, -1, field.dlog_table % order
        ).astype(np.int64)
        exponents.setflags(write=False)
        object.__setattr__(self, 'field', field)
        object.__setattr__(self, 'order', order)
        object.__setattr__(self, 'exponents', exponents)
        object.__setattr__(
            self, 'roots',
            tuple(root_of_unity(k, order) for k in range(order))
        )

    @property
    def q(self) -> int:
        return self.field.q

    def exponent(self, a: int) -> t.Optional[int]:
        value = int(self.exponents[a % self.field.q])
        return None if value < 0 else value

    def __call__(self, a: int) -> complex:
        value = int(self.exponents[a % self.field.q])
        return 0j if value < 0 else self.roots[value]

    def combine(self, counts: t.Sequence[int]) -> complex:
        """``sum(counts[k] * chi^k)``: a sum from its exponent histogram.

        Exact integer counts make the result independent of the order in
        which the terms were produced.
        """
        re = math.fsum(int(c) * z.real for c, z in zip(counts, self.roots))
        im = math.fsum(int(c) * z.imag for c, z in zip(counts, self.roots))
        return complex(re, im)

    def __eq__(self, other: t.Any) -> t.Any:
        if self.__class__ is other.__class__:
            return (self.field, self.order) == (other.field, other.order)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.__class__, self.field, self.order))

    def __repr__(self) -> str:
        return "build_character({}, {})".format(self.field.q, self.order)

    def __reduce__(self) -> t.Tuple[t.Any, ...]:
        return build_character, (self.field.q, self.order)

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))

    def __delattr__(self, name: str) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


def build_character(q: int, order: int) -> DirichletCharacter:
    """The canonical character of order ``order`` mod ``q``.

    It sends the smallest primitive root to ``exp(2*pi*i/order)``.
    """
    if order < 2:
        raise OrderOne("Character order must be at least 2")
    return DirichletCharacter(prime_field(q), order)


def char_eval(chi: DirichletCharacter, a: int) -> complex:
    """``chi(a mod q)``; zero when ``q`` divides ``a``."""
    return chi(a)


class ComplexAcc:
    """Compensated (Neumaier) accumulator for sums of unit complex terms.

    Terms must be added in a fixed order for reproducible results;
    :meth:`merge` folds in a partial sum as a single step.
    """

    __slots__ = ('re', 'im', 'term_count', '_re_err', '_im_err')

    def __init__(self) -> None:
        self.re = 0.0
        self.im = 0.0
        self.term_count = 0
        self._re_err = 0.0
        self._im_err = 0.0

    @staticmethod
    def _step(total: float, err: float, x: float) -> t.Tuple[float, float]:
        new = total + x
        if abs(total) >= abs(x):
            err += (total - new) + x
        else:
            err += (x - new) + total
        return new, err

    def add(self, z: complex, count: int = 1) -> None:
        self.re, self._re_err = self._step(self.re, self._re_err, z.real)
        self.im, self._im_err = self._step(self.im, self._im_err, z.imag)
        self.term_count += count

    def merge(self, other: "ComplexAcc") -> None:
        self.add(other.value, other.term_count)

    @property
    def value(self) -> complex:
        return complex(self.re + self._re_err, self.im + self._im_err)

    def tolerance(self) -> float:
        """Roundoff bound for ``term_count`` unit-magnitude terms."""
        return self.term_count * 2.0 ** -48

    def __repr__(self) -> str:
        return "ComplexAcc({!r}, terms={})".format(self.value, self.term_count)
