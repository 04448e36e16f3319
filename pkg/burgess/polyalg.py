"""Sparse multivariate polynomials over Z, F_q and R.

A :class:`MultiPoly` maps exponent vectors to coefficients. Coefficients
live in one of three domains: integers (:data:`ZZ`), residues mod a prime
(:func:`GF`) or reals (:data:`RR`, stored as exact
:class:`fractions.Fraction`). Polynomials are immutable.

>>> x1, x2 = MultiPoly.gens(2)
>>> f = (x1 + x2) ** 2
>>> sorted(f.terms.items())
[((0, 2), 1), ((1, 1), 2), ((2, 0), 1)]
>>> str(f.reduce(2))
'1*x1^2 + 1*x2^2'

Greatest common divisors over ``F_q`` recurse on one variable at a time:
the polynomial is viewed as univariate in its last variable with
coefficients in the remaining ones, split into content and primitive part,
and the primitive parts are run through a primitive remainder sequence.
"""

import logging
import operator
import typing as t

from fractions import Fraction

import numpy as np

from burgess.util import Exponents, Point, Rational, to_fraction

__all__ = ('PolyError', 'ZeroPolynomial', 'DegreeTooLarge', 'ZeroModQ',
           'DegenerateSystem', 'DomainMismatch', 'NotDivisible',
           'Domain', 'ZZ', 'RR', 'GF', 'MultiPoly', 'gcd', 'divide',
           'product_polynomial', 'delta_pattern', 'epsilon_pattern')

log = logging.getLogger(__name__)


class PolyError(ValueError):
    """Base class for polynomial errors."""


class ZeroPolynomial(PolyError):
    pass


class DegreeTooLarge(PolyError):
    """The degree is at least the characteristic; results would be wrong."""


class ZeroModQ(PolyError):
    pass


class DegenerateSystem(PolyError):
    pass


class DomainMismatch(PolyError):
    pass


class NotDivisible(PolyError, ArithmeticError):
    pass


class Domain(t.NamedTuple):
    """A coefficient domain: ``integer``, ``field`` (with modulus) or ``real``.
    """
    kind: str
    modulus: t.Optional[int] = None

    def convert(self, value: Rational) -> t.Any:
        """Bring ``value`` into this domain."""
        if self.kind == 'real':
            return to_fraction(value)
        frac = to_fraction(value)
        if self.kind == 'integer':
            if frac.denominator != 1:
                raise DomainMismatch(
                    "{} is not an integer".format(value)
                )
            return frac.numerator
        assert self.modulus is not None
        q = self.modulus
        if frac.denominator % q == 0:
            raise DomainMismatch("{} has no value mod {}".format(value, q))
        return frac.numerator * pow(frac.denominator, -1, q) % q

    def __str__(self) -> str:
        if self.kind == 'field':
            return "GF({})".format(self.modulus)
        return {'integer': "ZZ", 'real': "RR"}[self.kind]


#: Integer coefficients.
ZZ = Domain('integer')
#: Real coefficients, held as exact rationals.
RR = Domain('real')


def GF(q: int) -> Domain:
    """Residues modulo the prime ``q``."""
    return Domain('field', q)


_Terms = t.Union[t.Mapping[Exponents, t.Any],
                 t.Iterable[t.Tuple[Exponents, t.Any]]]


class MultiPoly:
    """A polynomial in ``x1, ..., xn``.

    ``terms`` never holds zero coefficients. Do not mutate it.
    """

    __slots__ = {
        "n": "The number of variables.",
        "terms": "Mapping from exponent tuples to nonzero coefficients.",
        "domain": "The coefficient :class:`Domain`.",
    }

    n: int
    terms: t.Dict[Exponents, t.Any]
    domain: Domain

    def __init__(
        self, n: int, terms: _Terms = (), domain: Domain = ZZ
    ) -> None:
        items = terms.items() if isinstance(terms, t.Mapping) else terms
        collected = {}  # type: t.Dict[Exponents, t.Any]
        for exps, coeff in items:
            exps = tuple(int(b) for b in exps)
            if len(exps) != n or any(b < 0 for b in exps):
                raise ValueError(
                    "Bad exponent vector {} for n = {}".format(exps, n)
                )
            collected[exps] = collected.get(exps, 0) + domain.convert(coeff)
        if domain.kind == 'field':
            assert domain.modulus is not None
            for exps in collected:
                collected[exps] %= domain.modulus
        object.__setattr__(self, 'n', n)
        object.__setattr__(
            self, 'terms', {k: v for k, v in collected.items() if v != 0}
        )
        object.__setattr__(self, 'domain', domain)

    @classmethod
    def _raw(
        cls, n: int, terms: t.Dict[Exponents, t.Any], domain: Domain
    ) -> "MultiPoly":
        # terms already normalized
        new = cls.__new__(cls)
        object.__setattr__(new, 'n', n)
        object.__setattr__(new, 'terms', terms)
        object.__setattr__(new, 'domain', domain)
        return new

    @classmethod
    def constant(
        cls, n: int, value: Rational, domain: Domain = ZZ
    ) -> "MultiPoly":
        return cls(n, {(0,) * n: value}, domain)

    @classmethod
    def monomial(
        cls, exps: t.Sequence[int], value: Rational = 1, domain: Domain = ZZ
    ) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): value}, domain)

    @classmethod
    def gen(cls, n: int, index: int, domain: Domain = ZZ) -> "MultiPoly":
        """The variable ``x{index + 1}``."""
        exps = [0] * n
        exps[index] = 1
        return cls(n, {tuple(exps): 1}, domain)

    @classmethod
    def gens(cls, n: int, domain: Domain = ZZ) -> t.List["MultiPoly"]:
        return [cls.gen(n, i, domain) for i in range(n)]

    def zero(self) -> "MultiPoly":
        return MultiPoly._raw(self.n, {}, self.domain)

    def one(self) -> "MultiPoly":
        return MultiPoly(self.n, {(0,) * self.n: 1}, self.domain)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(exps) for exps in self.terms)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(exps) for exps in self.terms), default=-1)

    def degree_in(self, index: int) -> int:
        return max((exps[index] for exps in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(exps) for exps in self.terms}) <= 1

    def variables(self) -> t.Tuple[int, ...]:
        """Indices of the variables that occur."""
        return tuple(
            i for i in range(self.n) if any(exps[i] for exps in self.terms)
        )

    def leading(self) -> t.Tuple[Exponents, t.Any]:
        """The lexicographically largest term."""
        if not self.terms:
            raise ZeroPolynomial("The zero polynomial has no leading term")
        exps = max(self.terms)
        return exps, self.terms[exps]

    def coefficient(self, exps: t.Sequence[int]) -> t.Any:
        return self.terms.get(tuple(exps), 0)

    def _coerce(self, other: t.Any) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise ValueError(
                    "Dimension mismatch: {} and {}".format(self.n, other.n)
                )
            if other.domain != self.domain:
                raise DomainMismatch(
                    "Can't mix {} and {}".format(self.domain, other.domain)
                )
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.n, other, self.domain)
        return NotImplemented  # type: ignore

    def _normalize(self, value: t.Any) -> t.Any:
        if self.domain.kind == 'field':
            assert self.domain.modulus is not None
            return value % self.domain.modulus
        return value

    def __add__(self, other: t.Any) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            value = self._normalize(terms.get(exps, 0) + coeff)
            if value:
                terms[exps] = value
            else:
                terms.pop(exps, None)
        return MultiPoly._raw(self.n, terms, self.domain)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(
            self.n,
            {k: self._normalize(-v) for k, v in self.terms.items()},
            self.domain,
        )

    def __sub__(self, other: t.Any) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: t.Any) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other: t.Any) -> "MultiPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}  # type: t.Dict[Exponents, t.Any]
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(map(operator.add, e1, e2))
                terms[exps] = terms.get(exps, 0) + c1 * c2
        return MultiPoly._raw(
            self.n,
            {k: v for k, v in
             ((k, self._normalize(v)) for k, v in terms.items()) if v},
            self.domain,
        )

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "MultiPoly":
        if power < 0:
            raise ValueError("Negative powers are not polynomials")
        result = self.one()
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def scale(self, value: Rational) -> "MultiPoly":
        return self * MultiPoly.constant(self.n, value, self.domain)

    def reduce(self, q: int) -> "MultiPoly":
        """Reduce integer (or rational) coefficients modulo ``q``."""
        if self.domain == GF(q):
            return self
        if self.domain.kind == 'field':
            raise DomainMismatch(
                "Can't reduce {} modulo {}".format(self.domain, q)
            )
        return MultiPoly(self.n, self.terms, GF(q))

    def lift(self) -> "MultiPoly":
        """Integer representatives in ``[0, q)`` of field coefficients."""
        if self.domain.kind != 'field':
            return self
        return MultiPoly._raw(self.n, dict(self.terms), ZZ)

    def monic(self) -> "MultiPoly":
        """Scale a field polynomial to leading coefficient one."""
        if self.domain.kind != 'field':
            raise DomainMismatch("monic() needs field coefficients")
        if not self.terms:
            return self
        assert self.domain.modulus is not None
        inv = pow(self.leading()[1], -1, self.domain.modulus)
        if inv == 1:
            return self
        return self.scale(inv)

    def evaluate(self, point: t.Sequence[t.Any]) -> t.Any:
        """Exact value at ``point`` (a residue in the field domain)."""
        if len(point) != self.n:
            raise ValueError("Expected a point with {} coordinates"
                             .format(self.n))
        total = 0  # type: t.Any
        for exps, coeff in self.terms.items():
            term = coeff
            for x, b in zip(point, exps):
                if b:
                    term *= x ** b
            total += term
        return self._normalize(total)

    __call__ = evaluate

    def evaluate_mod(
        self,
        columns: t.Sequence["np.ndarray[t.Any, np.dtype[np.int64]]"],
        q: int,
    ) -> "np.ndarray[t.Any, np.dtype[np.int64]]":
        """Values mod ``q`` at many points at once.

        ``columns[i]`` holds the ``i``-th coordinates, already reduced mod
        ``q``. Intermediate products stay below ``q**2``, so ``q`` must be
        below ``3 * 10**9``.
        """
        if self.domain.kind == 'real':
            raise DomainMismatch("Can't reduce real coefficients mod q")
        shape = columns[0].shape
        out = np.zeros(shape, dtype=np.int64)
        powers = {}  # type: t.Dict[t.Tuple[int, int], t.Any]

        def power(i: int, b: int) -> t.Any:
            if (i, b) not in powers:
                if b == 1:
                    powers[i, b] = columns[i] % q
                else:
                    powers[i, b] = power(i, b - 1) * columns[i] % q
            return powers[i, b]

        for exps, coeff in self.terms.items():
            term = np.full(shape, coeff % q, dtype=np.int64)
            for i, b in enumerate(exps):
                if b:
                    term = term * power(i, b) % q
            out = (out + term) % q
        return out

    def partial(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to ``x{index + 1}``."""
        terms = {}  # type: t.Dict[Exponents, t.Any]
        for exps, coeff in self.terms.items():
            b = exps[index]
            if b:
                new = exps[:index] + (b - 1,) + exps[index + 1:]
                terms[new] = coeff * b
        return MultiPoly(self.n, terms, self.domain)

    def compose(self, polys: t.Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute ``polys[i]`` for ``x{i + 1}``."""
        if len(polys) != self.n:
            raise ValueError("Need {} substitutions".format(self.n))
        if not polys:
            return self
        target = polys[0]
        powers = {}  # type: t.Dict[t.Tuple[int, int], MultiPoly]

        def power(i: int, b: int) -> MultiPoly:
            if (i, b) not in powers:
                powers[i, b] = (polys[i] if b == 1
                                else power(i, b - 1) * polys[i])
            return powers[i, b]

        result = target.zero()
        for exps, coeff in self.terms.items():
            term = MultiPoly.constant(target.n, coeff, target.domain)
            for i, b in enumerate(exps):
                if b:
                    term = term * power(i, b)
            result = result + term
        return result

    def shift(self, vector: t.Sequence[int]) -> "MultiPoly":
        """``F(X + vector)``, expanded binomially."""
        gens = MultiPoly.gens(self.n, self.domain)
        return self.compose([x + v for x, v in zip(gens, vector)])

    def embed(self, n: int, offset: int = 0) -> "MultiPoly":
        """The same polynomial in ``n`` variables, shifted by ``offset``."""
        pad = n - self.n - offset
        if pad < 0:
            raise ValueError("Can't embed {} variables into {}"
                             .format(self.n, n))
        return MultiPoly._raw(
            n,
            {(0,) * offset + k + (0,) * pad: v for k, v in self.terms.items()},
            self.domain,
        )

    def permute(self, order: t.Sequence[int]) -> "MultiPoly":
        """Rename ``x{order[i] + 1}`` to ``x{i + 1}``."""
        return MultiPoly._raw(
            self.n,
            {tuple(k[j] for j in order): v for k, v in self.terms.items()},
            self.domain,
        )

    def __eq__(self, other: t.Any) -> t.Any:
        if self.__class__ is other.__class__:
            return (self.n, self.domain, self.terms) == (
                other.n, other.domain, other.terms
            )
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, self.domain, frozenset(self.terms.items())))

    def __str__(self) -> str:
        from burgess import polytext

        return polytext.dumps(self)

    def __repr__(self) -> str:
        return "MultiPoly({}, {!r}, {})".format(
            self.n, dict(sorted(self.terms.items(), reverse=True)),
            self.domain,
        )

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))

    def __delattr__(self, name: str) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


def _check_field(*polys: MultiPoly) -> int:
    domains = {p.domain for p in polys}
    if len(domains) != 1:
        raise DomainMismatch("Mixed domains: {}".format(domains))
    (domain,) = domains
    if domain.kind != 'field' or domain.modulus is None:
        raise DomainMismatch("Expected field coefficients, got {}"
                             .format(domain))
    return domain.modulus


def divide(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """The exact quotient ``f / g`` over ``F_q``.

    Raises :class:`NotDivisible` if ``g`` does not divide ``f``.
    """
    q = _check_field(f, g)
    if g.is_zero():
        raise ZeroDivisionError("Division by the zero polynomial")
    g_exps, g_coeff = g.leading()
    inverse = pow(g_coeff, -1, q)
    quotient = {}  # type: t.Dict[Exponents, int]
    rest = f
    while rest:
        exps, coeff = rest.leading()
        diff = tuple(a - b for a, b in zip(exps, g_exps))
        if any(b < 0 for b in diff):
            raise NotDivisible("{} does not divide {}".format(g, f))
        value = coeff * inverse % q
        quotient[diff] = value
        rest = rest - g * MultiPoly._raw(f.n, {diff: value}, f.domain)
    return MultiPoly._raw(f.n, quotient, f.domain)


def _coefficients_in(f: MultiPoly, index: int) -> t.Dict[int, MultiPoly]:
    """View ``f`` as a polynomial in ``x{index + 1}`` over the others."""
    split = {}  # type: t.Dict[int, t.Dict[Exponents, t.Any]]
    for exps, coeff in f.terms.items():
        rest = exps[:index] + (0,) + exps[index + 1:]
        split.setdefault(exps[index], {})[rest] = coeff
    return {k: MultiPoly._raw(f.n, v, f.domain) for k, v in split.items()}


def _primitive(
    f: MultiPoly, index: int
) -> t.Tuple[MultiPoly, MultiPoly]:
    """Content (monic, free of the variable) and primitive part of ``f``."""
    content = f.zero()
    for coeff in _coefficients_in(f, index).values():
        content = gcd(content, coeff)
        if content.is_constant():
            break
    return content, divide(f, content)


def _shifted(f: MultiPoly, index: int, power: int) -> MultiPoly:
    exps = [0] * f.n
    exps[index] = power
    return f * MultiPoly._raw(f.n, {tuple(exps): 1}, f.domain)


def _pseudo_remainder(f: MultiPoly, g: MultiPoly, index: int) -> MultiPoly:
    dg = g.degree_in(index)
    lead = _coefficients_in(g, index)[dg]
    rest = f
    while rest and rest.degree_in(index) >= dg:
        dr = rest.degree_in(index)
        top = _coefficients_in(rest, index)[dr]
        rest = lead * rest - _shifted(top * g, index, dr - dg)
    return rest


def gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Monic greatest common divisor over ``F_q``.

    ``gcd(0, 0)`` is ``0``.
    """
    _check_field(f, g)
    if not f:
        return g.monic()
    if not g:
        return f.monic()
    used = set(f.variables()) | set(g.variables())
    if not used:
        return f.one()
    index = max(used)
    f_content, a = _primitive(f, index)
    g_content, b = _primitive(g, index)
    content = gcd(f_content, g_content)
    if a.degree_in(index) < b.degree_in(index):
        a, b = b, a
    while True:
        if b.degree_in(index) <= 0:
            part = f.one()
            break
        rem = _pseudo_remainder(a, b, index)
        if not rem:
            part = b
            break
        a, b = b, _primitive(rem, index)[1]
    return (content * part).monic()


def epsilon_pattern(j: int) -> int:
    """Sign of the ``j``-th point of a collection (1-based)."""
    return 1 if j % 2 == 1 else -1


def delta_pattern(j: int, order: int) -> int:
    """Character exponent of the ``j``-th point of a collection (1-based)."""
    return 1 if j % 2 == 1 else order - 1


def product_polynomial(
    F: MultiPoly, points: t.Sequence[Point], order: int, q: int
) -> MultiPoly:
    """``prod_j F(X + x_j) ** delta(j)`` with coefficients reduced mod ``q``.

    ``delta(j)`` is ``1`` at odd and ``order - 1`` at even positions.
    """
    if len(points) % 2:
        raise ValueError("Collections have an even number of points")
    base = F.reduce(q)
    result = base.one()
    for j, point in enumerate(points, start=1):
        result = result * base.shift(point) ** delta_pattern(j, order)
    log.debug("Product polynomial of degree %d with %d terms",
              result.degree(), len(result.terms))
    return result
