"""Power-free parts and the admissibility test for forms mod ``q``.

A form ``F`` is admissible for a character of order ``order`` when, after
writing ``F = g^order * h`` mod ``q`` with ``h`` free of ``order``-th powers,
no invertible linear change of variables makes ``h`` independent of a
variable. For polynomials this is the same as asking whether some nonzero
direction ``v`` satisfies ``h(x + s*v) = h(x)`` identically:

- if ``h(xA)`` does not involve ``x1``, the first row of ``A`` is such a
  direction;
- if ``v`` is such a direction, any invertible ``A`` with first row ``v``
  makes ``h(xA)`` free of ``x1``.

So instead of all of ``GL_n(F_q)`` only the ``(q^n - 1)/(q - 1)`` projective
directions need to be tried. The matrix search is kept as
``method="gl-bruteforce"`` to cross-check the shortcut.

>>> from burgess.polytext import loads
>>> is_admissible(loads("x1*x2", 2), 5, 2).admissible
'yes'
>>> report = is_admissible(loads("x1^2", 2), 5, 3)
>>> report.admissible, report.witness
('no', (0, 1))
"""

import itertools
import logging
import typing as t

import burgess

from burgess.polyalg import (
    DegreeTooLarge,
    DomainMismatch,
    MultiPoly,
    ZeroModQ,
    ZeroPolynomial,
    divide,
    gcd,
)
from burgess.util import partitioned_map

__all__ = ('YES', 'NO', 'INDETERMINATE', 'AdmissibilityReport',
           'squarefree_parts', 'power_free_decompose', 'is_admissible',
           'invariant_direction', 'gl_free_variable', 'is_invariant')

log = logging.getLogger(__name__)

YES = 'yes'
NO = 'no'
INDETERMINATE = 'indeterminate'

Direction = t.Tuple[int, ...]
Matrix = t.Tuple[t.Tuple[int, ...], ...]


class AdmissibilityReport(t.NamedTuple):
    """The verdict, the power-free part ``h`` and, for ``no``, a witness.

    ``witness`` is the smallest invariant direction, normalized so its
    first nonzero coordinate is ``1``.
    """
    admissible: str
    power_free_part: t.Optional[MultiPoly]
    witness: t.Optional[Direction]
    method: str

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'admissible': self.admissible,
            'power_free_part': (None if self.power_free_part is None
                                else str(self.power_free_part)),
            'witness': None if self.witness is None else list(self.witness),
            'method': self.method,
        }


def _field_modulus(f: MultiPoly) -> int:
    if f.domain.kind != 'field' or f.domain.modulus is None:
        raise DomainMismatch("Expected a polynomial over F_q")
    return f.domain.modulus


def squarefree_parts(f: MultiPoly) -> t.List[MultiPoly]:
    """Monic ``a_1, a_2, ...`` with ``f = c * prod(a_i ** i)``.

    ``gcd(f, df/dx1, ..., df/dxn)`` strips one copy of every irreducible
    factor as long as ``deg f < q``; repeating that peels off the factors
    one multiplicity at a time.
    """
    q = _field_modulus(f)
    if not f:
        raise ZeroPolynomial("The zero polynomial has no decomposition")
    if f.degree() >= q:
        raise DegreeTooLarge(
            "Degree {} is not below q = {}".format(f.degree(), q)
        )
    repeated = f
    for i in range(f.n):
        repeated = gcd(repeated, f.partial(i))
    rest = divide(f, repeated).monic()
    parts = []
    while not rest.is_constant():
        common = gcd(rest, repeated)
        parts.append(divide(rest, common))
        rest = common
        repeated = divide(repeated, common)
    return parts


def power_free_decompose(
    f: MultiPoly, order: int
) -> t.Tuple[MultiPoly, MultiPoly]:
    """Split ``f = g**order * h`` with ``h`` free of ``order``-th powers.

    ``g`` is monic; the leading coefficient of ``f`` stays in ``h``.
    """
    if order < 1:
        raise ValueError("order must be positive")
    parts = squarefree_parts(f)
    g = f.one()
    h = f.one().scale(f.leading()[1])
    for multiplicity, part in enumerate(parts, start=1):
        g = g * part ** (multiplicity // order)
        h = h * part ** (multiplicity % order)
    return g, h


def is_invariant(h: MultiPoly, direction: t.Sequence[int]) -> bool:
    """Whether ``h(x + s*direction) == h(x)`` as polynomials in ``x, s``."""
    n = h.n
    gens = MultiPoly.gens(n + 1, h.domain)
    s = gens[n]
    moved = h.compose([gens[i] + s.scale(v) for i, v in enumerate(direction)])
    return moved == h.embed(n + 1)


def projective_directions(q: int, n: int) -> t.Iterator[Direction]:
    """Nonzero vectors with first nonzero coordinate 1, lexicographically."""
    for vector in itertools.product(range(q), repeat=n):
        nonzero = [v for v in vector if v]
        if nonzero and nonzero[0] == 1:
            yield vector


def invariant_direction(
    h: MultiPoly, threads: int = 1
) -> t.Optional[Direction]:
    """The smallest direction leaving ``h`` invariant, if there is one."""
    q = _field_modulus(h)
    directions = list(projective_directions(q, h.n))
    log.debug("Searching %d directions for invariance", len(directions))
    if threads <= 1:
        for direction in directions:
            if is_invariant(h, direction):
                return direction
        return None
    chunks = [directions[i::threads] for i in range(threads)]
    found = partitioned_map(
        lambda chunk: [d for d in chunk if is_invariant(h, d)][:1],
        chunks, threads,
    )
    hits = [d for chunk in found for d in chunk]
    return min(hits) if hits else None


def _invertible(rows: Matrix, q: int) -> bool:
    """Gaussian elimination mod ``q``."""
    matrix = [list(row) for row in rows]
    size = len(matrix)
    for col in range(size):
        pivot = next(
            (i for i in range(col, size) if matrix[i][col] % q), None
        )
        if pivot is None:
            return False
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        inverse = pow(matrix[col][col], -1, q)
        for i in range(col + 1, size):
            factor = matrix[i][col] * inverse % q
            matrix[i] = [(a - factor * b) % q
                         for a, b in zip(matrix[i], matrix[col])]
    return True


def general_linear_group(q: int, n: int) -> t.Iterator[Matrix]:
    """All of ``GL_n(F_q)``, row-major lexicographic."""
    rows = list(itertools.product(range(q), repeat=n))
    for matrix in itertools.product(rows, repeat=n):
        if _invertible(matrix, q):
            yield matrix


def gl_free_variable(h: MultiPoly) -> t.Optional[Matrix]:
    """The first ``A`` in ``GL_n(F_q)`` with ``h(xA)`` free of ``x1``."""
    q = _field_modulus(h)
    gens = MultiPoly.gens(h.n, h.domain)
    for matrix in general_linear_group(q, h.n):
        # (xA)_j = sum_i x_i A_ij
        forms = [
            sum((gens[i].scale(matrix[i][j]) for i in range(h.n)),
                h.zero())
            for j in range(h.n)
        ]
        if h.compose(forms).degree_in(0) <= 0:
            return matrix
    return None


def _normalize(vector: t.Sequence[int], q: int) -> Direction:
    lead = next(v for v in vector if v % q)
    inverse = pow(lead, -1, q)
    return tuple(v * inverse % q for v in vector)


def is_admissible(
    F: MultiPoly,
    q: int,
    order: int,
    method: t.Optional[str] = None,
) -> AdmissibilityReport:
    """Decide whether ``F`` is admissible mod ``q`` for order ``order``.

    :param F: A polynomial with integer coefficients (or already mod ``q``).
    :param q: The prime modulus.
    :param order: The character order.
    :param method: ``"direction-search"`` or ``"gl-bruteforce"``; defaults
                   to ``config.admissibility_method``.
    :raises ZeroModQ: If ``q`` divides every coefficient.
    :raises DegreeTooLarge: If ``deg(F mod q) >= q``.
    """
    if method is None:
        method = burgess.config.admissibility_method
    if method not in {"direction-search", "gl-bruteforce"}:
        raise ValueError("Unknown method {!r}".format(method))
    threads = burgess.config.threads
    f = F.reduce(q)
    if not f:
        raise ZeroModQ("{} vanishes mod {}".format(F, q))
    _, h = power_free_decompose(f, order)
    if method == "direction-search":
        witness = invariant_direction(h, threads)
    else:
        matrix = gl_free_variable(h)
        witness = None if matrix is None else _normalize(matrix[0], q)
    if witness is None:
        return AdmissibilityReport(YES, h, None, method)
    return AdmissibilityReport(NO, h, witness, method)
