"""Monomial systems: exponent sets with weight, rank and degree.

A system ``G`` in ``n`` variables is a set ``Lambda`` of nonzero
multi-indices. Its rank ``R`` is ``len(Lambda)``, its degree ``d`` the largest
total degree and its weight ``M`` the sum of all total degrees.

>>> G = standard_system(2, 2)
>>> G.exponents
((0, 1), (0, 2), (1, 0), (1, 1), (2, 0))
>>> G.R, G.M, G.d
(5, 8, 2)
"""

import itertools
import math
import re
import typing as t

from fractions import Fraction

from burgess.polyalg import DegenerateSystem, MultiPoly, ZZ
from burgess.util import Exponents

__all__ = ('MonomialSystem', 'TDIResult', 'standard_system', 'ack_system',
           'custom_system', 'standard_closed_forms', 'is_tdi',
           'parse_descriptor', 'ppw_regime')


class MonomialSystem:
    """An immutable exponent set.

    ``kind`` is ``'standard'``, ``'ack'`` or ``'custom'``; ``params`` holds
    the arguments that built it (``(n, d)`` or ``(k_vec, k)``).
    """

    __slots__ = ('n', 'exponents', 'kind', 'params')

    n: int
    exponents: t.Tuple[Exponents, ...]
    kind: str
    params: t.Tuple[t.Any, ...]

    def __init__(
        self,
        n: int,
        exponents: t.Iterable[t.Sequence[int]],
        kind: str = 'custom',
        params: t.Tuple[t.Any, ...] = (),
        require_linear: bool = True,
    ) -> None:
        exps = sorted({tuple(int(b) for b in beta) for beta in exponents})
        for beta in exps:
            if len(beta) != n or any(b < 0 for b in beta):
                raise ValueError("Bad multi-index {} for n = {}"
                                 .format(beta, n))
            if not any(beta):
                raise ValueError("The constant monomial is implicit")
        present = set(exps)
        for i in range(n if require_linear else 0):
            unit = tuple(int(j == i) for j in range(n))
            if unit not in present:
                raise DegenerateSystem(
                    "No linear monomial in x{}".format(i + 1)
                )
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'exponents', tuple(exps))
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'params', params)

    @property
    def R(self) -> int:
        """Rank: the number of monomials."""
        return len(self.exponents)

    @property
    def M(self) -> int:
        """Weight: the sum of the total degrees."""
        return sum(sum(beta) for beta in self.exponents)

    @property
    def d(self) -> int:
        """Degree: the largest total degree."""
        return max(sum(beta) for beta in self.exponents)

    def moments(self, point: t.Sequence[int]) -> t.Tuple[int, ...]:
        """``point ** beta`` for every ``beta``, in system order."""
        return tuple(
            math.prod(x ** b for x, b in zip(point, beta))
            for beta in self.exponents
        )

    def K(self, j: int) -> int:
        """Weight of the standard system in ``j`` variables of degree ``d``.

        Only defined for standard systems.
        """
        if self.kind != 'standard':
            raise ValueError("K_j is only known for standard systems")
        d = self.d
        value = Fraction(j * d, j + 1) * math.comb(j + d, j)
        assert value.denominator == 1
        return value.numerator

    def descriptor(self) -> str:
        """Short text naming the system, as used in CSV output."""
        if self.kind == 'standard':
            return "standard({},{})".format(*self.params)
        if self.kind == 'ack':
            k_vec, k = self.params
            return "ack({};{})".format(",".join(map(str, k_vec)), k)
        return "custom{{{}}}".format(
            ";".join(",".join(map(str, beta)) for beta in self.exponents)
        )

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'descriptor': self.descriptor(),
            'n': self.n,
            'exponents': [list(beta) for beta in self.exponents],
            'R': self.R,
            'M': self.M,
            'd': self.d,
            'kind': self.kind,
        }

    def __eq__(self, other: t.Any) -> t.Any:
        if isinstance(other, MonomialSystem):
            return (self.n, self.exponents) == (other.n, other.exponents)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, self.exponents))

    def __repr__(self) -> str:
        return "<MonomialSystem {} R={} M={}>".format(
            self.descriptor(), self.R, self.M
        )

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))

    def __delattr__(self, name: str) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


def standard_system(n: int, d: int) -> MonomialSystem:
    """All monomials with total degree between 1 and ``d``."""
    if n < 1 or d < 1:
        raise ValueError("Need n >= 1 and d >= 1")
    exps = (
        beta for beta in itertools.product(range(d + 1), repeat=n)
        if 1 <= sum(beta) <= d
    )
    return MonomialSystem(n, exps, 'standard', (n, d))


def standard_closed_forms(n: int, d: int) -> t.Tuple[int, int]:
    """``(R, M)`` of :func:`standard_system` without enumerating it."""
    total = math.comb(n + d, n)
    weight = Fraction(d * total * n, n + 1)
    assert weight.denominator == 1
    return total - 1, weight.numerator


def ack_system(k_vec: t.Sequence[int], k: int) -> MonomialSystem:
    """Monomials with ``beta_i <= k_vec[i]`` and ``1 <= |beta| <= k``."""
    k_vec = tuple(k_vec)
    if k < 1 or any(c < 1 for c in k_vec):
        raise DegenerateSystem("All caps must be at least 1")
    exps = (
        beta for beta in itertools.product(*(range(c + 1) for c in k_vec))
        if 1 <= sum(beta) <= k
    )
    return MonomialSystem(len(k_vec), exps, 'ack', (k_vec, k))


def custom_system(
    n: int,
    exponents: t.Iterable[t.Sequence[int]],
    require_linear: bool = True,
) -> MonomialSystem:
    """An arbitrary exponent set.

    Systems used for mean values need every linear monomial; pass
    ``require_linear=False`` to inspect other sets, e.g. with :func:`is_tdi`.
    """
    return MonomialSystem(n, exponents, 'custom', (), require_linear)


class TDIResult(t.NamedTuple):
    """Outcome of :func:`is_tdi`.

    On failure ``certificate`` is ``(beta, gamma, coefficient)``: shifting
    ``x^beta`` produces ``coefficient * x^gamma`` with ``gamma`` outside the
    system. ``coefficient`` is a polynomial in the shift variables.
    """
    tdi: bool
    certificate: t.Optional[t.Tuple[Exponents, Exponents, MultiPoly]]

    def __bool__(self) -> bool:
        return self.tdi


def is_tdi(G: MonomialSystem) -> TDIResult:
    """Check translation-dilation invariance by expanding ``(x + xi)^beta``.

    The shift variables ``xi`` are appended after ``x``, and the expansion
    must only involve monomials ``x^gamma`` with ``gamma`` in the system or
    ``gamma = 0``.
    """
    n = G.n
    present = set(G.exponents)
    xs = MultiPoly.gens(2 * n, ZZ)
    shifted = [xs[i] + xs[n + i] for i in range(n)]
    for beta in G.exponents:
        expansion = MultiPoly.monomial(beta, 1, ZZ).compose(shifted)
        offending = {}  # type: t.Dict[Exponents, t.Dict[Exponents, t.Any]]
        for exps, coeff in expansion.terms.items():
            gamma, rest = exps[:n], exps[n:]
            if any(gamma) and gamma not in present:
                offending.setdefault(gamma, {})[rest] = coeff
        if offending:
            gamma = min(offending)
            return TDIResult(False, (beta, gamma,
                                     MultiPoly(n, offending[gamma], ZZ)))
    return TDIResult(True, None)


def ppw_regime(G: MonomialSystem, r: int) -> bool:
    """Whether ``r > R(d + 1)``, where sharp mean values hold for any TDI
    system."""
    return r > G.R * (G.d + 1)


_STANDARD = re.compile(r"^\s*standard\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*$")
_ACK = re.compile(r"^\s*ack\s*\(\s*([\d,\s]+);\s*(\d+)\s*\)\s*$")
_CUSTOM = re.compile(r"^\s*(?:custom)?\s*\{?([\d,;\s]+)\}?\s*$")


def parse_descriptor(text: str) -> MonomialSystem:
    """Inverse of :meth:`MonomialSystem.descriptor`.

    >>> parse_descriptor("ack(1,1;2)").M
    4
    >>> parse_descriptor("1,0;0,1;1,1").R
    3
    """
    match = _STANDARD.match(text)
    if match:
        return standard_system(int(match.group(1)), int(match.group(2)))
    match = _ACK.match(text)
    if match:
        caps = [int(c) for c in match.group(1).split(",")]
        return ack_system(caps, int(match.group(2)))
    match = _CUSTOM.match(text)
    if match:
        rows = [
            tuple(int(b) for b in row.split(","))
            for row in match.group(1).split(";") if row.strip()
        ]
        if rows and len({len(row) for row in rows}) == 1:
            return custom_system(len(rows[0]), rows)
    raise ValueError("Can't parse system descriptor {!r}".format(text))
