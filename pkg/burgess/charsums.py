"""Mixed sums, complete multiplicative sums and the additive box identity.

A :class:`Collection` is a list of ``2r`` points ``x_1, ..., x_2r`` in
``Z^n``. Position ``j`` (1-based) carries the sign ``+1`` for odd and ``-1``
for even ``j``, and the character exponent ``1`` for odd and ``order - 1``
for even ``j``. Attached to it are

- the complete sum ``sum_{m mod q} chi(prod_j F(m + x_j) ** delta(j))``,
- the box sum over the ``Q^M`` vertices of the partition of ``[0, 1)^R``,
- the indicator that every signed moment ``sum_j eps(j) x_j^beta``
  vanishes.

The box sum equals ``Q^M`` times the (mod ``Q^|beta|``) indicator, and for
``Q >= 2rK`` the two indicators agree on collections from ``(0, K]^n``.

>>> from burgess.ff_core import build_character
>>> from burgess.polytext import loads
>>> chi = build_character(5, 2)
>>> F = loads("x1*x2", 2)
>>> complete_mult_sum(F, Collection([(1, 1), (1, 1)]), chi)
(16+0j)
"""

import itertools
import logging
import math
import typing as t

from fractions import Fraction

import numpy as np

import burgess

from burgess.bsum import AuditError, stratum_ceiling
from burgess.ff_core import ComplexAcc, DirichletCharacter, e, root_of_unity
from burgess.polyalg import (
    MultiPoly,
    delta_pattern,
    epsilon_pattern,
    product_polynomial,
)
from burgess.systems import MonomialSystem
from burgess.util import Point, box_points, check_budget, partitioned_map

__all__ = ('IdentityViolation', 'BoxRegion', 'Collection', 'BoxPartition',
           'Stratify', 'ProdLemmaReport', 'mixed_sum', 'mult_sum_terms',
           'complete_mult_sum', 'signed_moments', 'additive_box_sum',
           'vertex_box_sum', 'xi_indicator', 'verify_prod_lemma',
           'stratify_audit')

log = logging.getLogger(__name__)

#: Relative tolerance of the box identity.
IDENTITY_TOLERANCE = 1e-6

_Array = "np.ndarray[t.Any, np.dtype[np.int64]]"


class IdentityViolation(AuditError):
    """A collection for which the box identity fails."""

    def __init__(self, message: str, collection: "Collection") -> None:
        super().__init__(message)
        self.collection = collection


class BoxRegion(t.NamedTuple):
    """The box ``(N, N + H]``: ``N_i < x_i <= N_i + H_i``."""
    N: t.Tuple[int, ...]
    H: t.Tuple[int, ...]

    @classmethod
    def make(
        cls, N: t.Sequence[int], H: t.Sequence[int]
    ) -> "BoxRegion":
        if len(N) != len(H):
            raise ValueError("Offset and sides differ in length")
        if any(h < 1 for h in H):
            raise ValueError("Box sides must be positive, got {}"
                             .format(tuple(H)))
        return cls(tuple(int(v) for v in N), tuple(int(v) for v in H))

    @property
    def n(self) -> int:
        return len(self.H)

    def size(self) -> int:
        return math.prod(self.H)

    def points(self) -> t.Iterator[Point]:
        return box_points(self.N, self.H)


class Collection:
    """``2r`` points in ``Z^n``, signed and weighted by position."""

    __slots__ = ('points',)

    points: t.Tuple[Point, ...]

    def __init__(self, points: t.Iterable[t.Sequence[int]]) -> None:
        pts = tuple(tuple(int(c) for c in p) for p in points)
        if not pts or len(pts) % 2:
            raise ValueError("A collection has a positive even number of "
                             "points, got {}".format(len(pts)))
        if len({len(p) for p in pts}) != 1:
            raise ValueError("Points of a collection share a dimension")
        object.__setattr__(self, 'points', pts)

    @classmethod
    def from_halves(
        cls,
        left: t.Sequence[t.Sequence[int]],
        right: t.Sequence[t.Sequence[int]],
    ) -> "Collection":
        """Interleave two ``r``-tuples so the signed moments are
        ``sum(left) - sum(right)``.

        >>> Collection.from_halves([(1, 1), (2, 2)], [(2, 1), (1, 2)]).points
        ((1, 1), (2, 1), (2, 2), (1, 2))
        """
        if len(left) != len(right):
            raise ValueError("Halves must have the same length")
        return cls(p for pair in zip(left, right) for p in pair)

    @property
    def r(self) -> int:
        return len(self.points) // 2

    @property
    def n(self) -> int:
        return len(self.points[0])

    @staticmethod
    def eps(j: int) -> int:
        return epsilon_pattern(j)

    @staticmethod
    def delta(j: int, order: int) -> int:
        return delta_pattern(j, order)

    def signed_moments(self, G: MonomialSystem) -> t.Tuple[int, ...]:
        """``sum_j eps(j) x_j^beta`` for every ``beta`` of ``G``."""
        if G.n != self.n:
            raise ValueError("System and collection differ in dimension")
        totals = [0] * G.R
        for j, point in enumerate(self.points, start=1):
            sign = epsilon_pattern(j)
            for i, value in enumerate(G.moments(point)):
                totals[i] += sign * value
        return tuple(totals)

    def as_list(self) -> t.List[t.List[int]]:
        return [list(p) for p in self.points]

    def __iter__(self) -> t.Iterator[Point]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: t.Any) -> t.Any:
        if self.__class__ is other.__class__:
            return self.points == other.points
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.points)

    def __repr__(self) -> str:
        return "Collection({!r})".format(list(self.points))

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))

    def __delattr__(self, name: str) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


class BoxPartition:
    """The ``Q^M`` distinguished vertices of a partition of ``[0, 1)^R``.

    A vertex is a choice of ``0 <= c_beta < Q^|beta|`` for every ``beta``;
    its coordinates are ``c_beta / Q^|beta|``.
    """

    __slots__ = ('G', 'Q')

    G: MonomialSystem
    Q: int

    def __init__(self, G: MonomialSystem, Q: int) -> None:
        if Q < 1:
            raise ValueError("Q must be positive")
        object.__setattr__(self, 'G', G)
        object.__setattr__(self, 'Q', Q)

    @property
    def vertex_count(self) -> int:
        return self.Q ** self.G.M

    def moduli(self) -> t.Tuple[int, ...]:
        return tuple(self.Q ** sum(beta) for beta in self.G.exponents)

    def vertices(self) -> t.Iterator[t.Tuple[int, ...]]:
        """The numerators ``c_beta``, lexicographically."""
        return itertools.product(*(range(m) for m in self.moduli()))

    def theta(self, vertex: t.Sequence[int]) -> t.Tuple[Fraction, ...]:
        return tuple(Fraction(c, m) for c, m in zip(vertex, self.moduli()))

    def __repr__(self) -> str:
        return "BoxPartition({!r}, {})".format(self.G, self.Q)

    def __setattr__(self, key: str, value: object) -> None:
        raise TypeError("{} objects are immutable"
                        .format(self.__class__.__name__))


def _slab_columns(
    x1: int, box: BoxRegion, q: int
) -> t.List[_Array]:
    """Coordinates mod ``q`` of the box points whose first entry is ``x1``.

    Points come out in lexicographic order.
    """
    shape = box.H[1:]
    size = math.prod(shape)
    columns = [np.full(size, x1 % q, dtype=np.int64)]
    if shape:
        mesh = np.indices(shape, dtype=np.int64).reshape(len(shape), size)
        for i, offset in enumerate(box.N[1:]):
            columns.append((mesh[i] + offset + 1) % q)
    return columns


def mixed_sum(
    F: MultiPoly,
    g: MultiPoly,
    chi: DirichletCharacter,
    box: BoxRegion,
) -> complex:
    """``sum_{x in (N, N+H]} e(g(x)) chi(F(x))``.

    Points are visited lexicographically, one slab per value of ``x1``.
    With ``g = 0`` every slab only tallies character exponents and the
    total is exact. Otherwise the phases are computed exactly as rationals
    mod 1 and summed with a compensated accumulator, slab by slab.
    """
    if not F.n == g.n == box.n:
        raise ValueError("Dimensions of F, g and the box differ")
    check_budget("mixed sum", box.size(), burgess.config.enumeration_budget)
    threads = burgess.config.threads
    q = chi.q
    f = F.reduce(q)
    slabs = range(box.N[0] + 1, box.N[0] + box.H[0] + 1)

    if not g:
        def tally(x1: int) -> _Array:
            values = f.evaluate_mod(_slab_columns(x1, box, q), q)
            exps = chi.exponents[values]
            return np.bincount(exps[exps >= 0], minlength=chi.order)

        counts = sum(partitioned_map(tally, slabs, threads))
        return chi.combine(counts)

    def accumulate(x1: int) -> ComplexAcc:
        acc = ComplexAcc()
        for rest in box_points(box.N[1:], box.H[1:]):
            point = (x1,) + rest
            value = chi(f.evaluate(point))
            acc.add(value * e(Fraction(g.evaluate(point))) if value else 0j)
        return acc

    total = ComplexAcc()
    for part in partitioned_map(accumulate, slabs, threads):
        total.merge(part)
    return total.value


def _exponent_grid(F: MultiPoly, chi: DirichletCharacter) -> _Array:
    """Character exponents of ``F(m)`` on ``(Z/q)^n``, shape ``(q,)*n``."""
    q = chi.q
    mesh = np.indices((q,) * F.n, dtype=np.int64)
    values = F.reduce(q).evaluate_mod(list(mesh), q)
    return chi.exponents[values]


def _shifted_terms(
    grid: _Array, collection: Collection, order: int
) -> _Array:
    q = grid.shape[0]
    axes = tuple(range(grid.ndim))
    total = np.zeros(grid.shape, dtype=np.int64)
    vanishes = np.zeros(grid.shape, dtype=bool)
    for j, point in enumerate(collection, start=1):
        # shifted[m] = grid[m + x_j]
        shifted = np.roll(grid, tuple(-(c % q) for c in point), axis=axes)
        vanishes |= shifted < 0
        total += delta_pattern(j, order) * shifted
    total %= order
    total[vanishes] = -1
    return total.reshape(-1)


def mult_sum_terms(
    F: MultiPoly,
    collection: Collection,
    chi: DirichletCharacter,
    method: str = "pointwise",
) -> _Array:
    """Character exponent of every term of the complete sum, ``-1`` for
    zero terms, ``m`` in lexicographic order.

    ``"pointwise"`` adds the exponents of the ``2r`` shifted values of
    ``F``; ``"product"`` evaluates :func:`product_polynomial` instead.
    """
    if F.n != collection.n:
        raise ValueError("F and the collection differ in dimension")
    q = chi.q
    check_budget("complete sum", q ** F.n,
                 burgess.config.enumeration_budget)
    if method == "pointwise":
        return _shifted_terms(_exponent_grid(F, chi), collection, chi.order)
    if method == "product":
        P = product_polynomial(F, collection.points, chi.order, q)
        return _exponent_grid(P, chi).reshape(-1)
    raise ValueError("Unknown method {!r}".format(method))


def complete_mult_sum(
    F: MultiPoly,
    collection: Collection,
    chi: DirichletCharacter,
    method: str = "pointwise",
) -> complex:
    """``sum_{m mod q} chi(prod_j F(m + x_j) ** delta(j))``."""
    terms = mult_sum_terms(F, collection, chi, method)
    return chi.combine(np.bincount(terms[terms >= 0], minlength=chi.order))


def signed_moments(
    G: MonomialSystem, collection: Collection
) -> t.Tuple[int, ...]:
    return collection.signed_moments(G)


def additive_box_sum(
    G: MonomialSystem, Q: int, collection: Collection
) -> complex:
    """The box sum as a product of one geometric series per ``beta``.

    ``sum_{c < L} e(c S / L)`` is ``L`` when ``L`` divides ``S`` and ``0``
    otherwise, so the result is exact.
    """
    partition = BoxPartition(G, Q)
    check_budget("box sum", partition.vertex_count,
                 burgess.config.enumeration_budget)
    total = 1
    for moment, modulus in zip(collection.signed_moments(G),
                               partition.moduli()):
        if moment % modulus:
            return 0j
        total *= modulus
    return complex(total)


def vertex_box_sum(
    G: MonomialSystem, Q: int, collection: Collection
) -> complex:
    """The box sum by visiting all ``Q^M`` vertices, for cross-checking."""
    partition = BoxPartition(G, Q)
    check_budget("box vertices", partition.vertex_count,
                 burgess.config.enumeration_budget)
    moments = collection.signed_moments(G)
    top = Q ** G.d
    # common denominator Q^d
    weights = [s * top // m for s, m in zip(moments, partition.moduli())]
    acc = ComplexAcc()
    for vertex in partition.vertices():
        phase = sum(c * w for c, w in zip(vertex, weights))
        acc.add(root_of_unity(phase, top))
    return acc.value


def xi_indicator(
    G: MonomialSystem,
    collection: Collection,
    modulus: t.Optional[int] = None,
) -> int:
    """``1`` if every signed moment vanishes (mod ``modulus^|beta|``)."""
    moments = collection.signed_moments(G)
    if modulus is None:
        return int(not any(moments))
    return int(all(
        s % modulus ** sum(beta) == 0
        for s, beta in zip(moments, G.exponents)
    ))


class ProdLemmaReport(t.NamedTuple):
    """Outcome of :func:`verify_prod_lemma`.

    ``wraparound`` lists collections where the mod-``Q`` indicator is set
    but the exact one is not; only possible below ``threshold``.
    """
    checked: int
    passed: int
    Q: int
    threshold: int
    wraparound: t.List[Collection]
    vertex_terms: int

    @property
    def status(self) -> str:
        return "PASS" if self.passed == self.checked else "FAIL"

    def summary(self) -> str:
        text = "{} {}/{}".format(self.status, self.passed, self.checked)
        if self.vertex_terms:
            text += " ({} vertex terms)".format(self.vertex_terms)
        if self.wraparound:
            text += ", {} wraparound".format(len(self.wraparound))
        return text

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'status': self.status,
            'checked': self.checked,
            'passed': self.passed,
            'Q': self.Q,
            'threshold': self.threshold,
            'wraparound': [c.as_list() for c in self.wraparound],
            'vertex_terms': self.vertex_terms,
        }


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _collections(
    sides: t.Sequence[int],
    r: int,
    samples: t.Optional[int],
    seed: t.Optional[int],
) -> t.List[Collection]:
    """Every collection from the box, or ``samples`` seeded draws."""
    if samples is None:
        count = math.prod(sides) ** (2 * r)
        check_budget("collections", count,
                     burgess.config.enumeration_budget)
        points = list(box_points((0,) * len(sides), sides))
        return [Collection(c)
                for c in itertools.product(points, repeat=2 * r)]
    if seed is None:
        raise ValueError("Sampling needs a seed")
    rng = _generator(seed)
    high = np.array(sides, dtype=np.int64) + 1
    return [
        Collection(rng.integers(1, high, size=(2 * r, len(sides))).tolist())
        for _ in range(samples)
    ]


def verify_prod_lemma(
    G: MonomialSystem,
    K: int,
    r: int,
    Q: t.Optional[int] = None,
    exhaustive: bool = False,
    samples: int = 1000,
    seed: int = 0,
    oracle: bool = False,
) -> ProdLemmaReport:
    """Check the box identity on collections from ``(0, K]^n``.

    :param Q: Partition parameter; defaults to ``ceil(2rK)``. Below that
              the two indicators may disagree, which is reported rather
              than raised.
    :param oracle: Also compare against :func:`vertex_box_sum`.
    :raises IdentityViolation: For the first failing collection.
    """
    threshold = 2 * r * K
    if Q is None:
        Q = threshold
    collections = _collections(
        (K,) * G.n, r, None if exhaustive else samples, seed
    )
    scale = Q ** G.M
    passed = 0
    vertex_terms = 0
    wraparound = []
    for collection in collections:
        box = additive_box_sum(G, Q, collection)
        xi = xi_indicator(G, collection)
        xi_mod = xi_indicator(G, collection, Q)
        if abs(box - scale * xi_mod) >= IDENTITY_TOLERANCE * scale:
            raise IdentityViolation(
                "Box sum {} is not {} * {}".format(box, scale, xi_mod),
                collection,
            )
        if oracle:
            direct = vertex_box_sum(G, Q, collection)
            vertex_terms += scale
            if abs(direct - box) >= IDENTITY_TOLERANCE * scale:
                raise IdentityViolation(
                    "Vertex sum {} differs from {}".format(direct, box),
                    collection,
                )
        if xi_mod != xi:
            if Q >= threshold:
                raise IdentityViolation(
                    "Indicators differ although Q = {} >= {}"
                    .format(Q, threshold), collection,
                )
            wraparound.append(collection)
        passed += 1
    log.info("Box identity held for %d collections", passed)
    return ProdLemmaReport(len(collections), passed, Q, threshold,
                           wraparound, vertex_terms)


class Stratify:
    """Exceedance tallies of complete sums over a box of collections.

    ``counts[j]`` is the number of collections whose complete sum exceeds
    ``thresholds[j]`` (``counts[0]`` counts every collection) and
    ``vr_counts[j]`` the same among collections with vanishing signed
    moments. ``ceilings[j]`` is ``C2 * |k|^(2r) / B(j; k)``, or ``None``
throughout when ``B`` is undefined (``r < n`` or ``n < 2``).
    """

    __slots__ = ('n', 'q', 'r', 'k', 'permutation', 'C', 'C2',
                 'thresholds', 'counts', 'vr_counts', 'ceilings',
                 'histogram', 'samples', 'seed')

    def __init__(self, **fields: t.Any) -> None:
        for name in self.__slots__:
            setattr(self, name, fields[name])

    def rows(self) -> t.List[t.Tuple[t.Any, ...]]:
        """CSV rows ``(j, threshold, count, ceiling, ratio)``.

        Without ceilings the last two fields are ``None``.
        """
        if self.ceilings is None:
            return [(j, threshold, count, None, None) for j, (threshold, count)
                    in enumerate(zip(self.thresholds, self.counts))]
        return [
            (j, threshold, count, float(ceiling), count / float(ceiling))
            for j, (threshold, count, ceiling) in enumerate(
                zip(self.thresholds, self.counts, self.ceilings)
            )
        ]

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'n': self.n,
            'q': self.q,
            'r': self.r,
            'k': list(self.k),
            'permutation': list(self.permutation),
            'C': self.C,
            'C2': self.C2,
            'thresholds': list(self.thresholds),
            'counts': list(self.counts),
            'vr_counts': list(self.vr_counts),
            'ceilings': (None if self.ceilings is None
                         else [float(c) for c in self.ceilings]),
            'histogram': {str(k): v for k, v in
                          sorted(self.histogram.items())},
            'samples': self.samples,
            'seed': self.seed,
        }

    def __repr__(self) -> str:
        return "<Stratify n={} q={} r={} counts={}>".format(
            self.n, self.q, self.r, self.counts
        )


def _permuted_system(
    G: MonomialSystem, order: t.Sequence[int]
) -> MonomialSystem:
    return MonomialSystem(
        G.n, (tuple(beta[i] for i in order) for beta in G.exponents)
    )


def stratify_audit(
    F: MultiPoly,
    chi: DirichletCharacter,
    G: MonomialSystem,
    r: int,
    k: t.Sequence[int],
    C: float = 1.0,
    C2: t.Any = 1,
    samples: t.Optional[int] = None,
    seed: t.Optional[int] = None,
) -> Stratify:
    """Tally ``|complete sum| > C q^((n+j-1)/2)`` over ``(0, k]^(2r)``.

    Unsorted sides are sorted first and the variables of ``F`` and ``G``
    permuted to match; ``permutation[i]`` is the original index of the
    ``i``-th sorted side. With ``samples`` the collections are drawn
    uniformly with the given ``seed`` instead of enumerated.
    """
    n = F.n
    if len(k) != n or G.n != n:
        raise ValueError("F, G and the sides differ in dimension")
    order = sorted(range(n), key=lambda i: k[i])
    sides = tuple(k[i] for i in order)
    if order != list(range(n)):
        log.info("Sorting sides %s with permutation %s", tuple(k), order)
        F = F.permute(order)
        G = _permuted_system(G, order)
    ceilings = None  # type: t.Optional[t.List[Fraction]]
    if r >= n >= 2:
        ceilings = [stratum_ceiling(n, r, j, sides, C2)
                    for j in range(n + 1)]
    else:
        log.info("No stratum ceilings for n = %d, r = %d", n, r)
    q = chi.q
    check_budget("stratify", q ** n * (1 if samples is not None
                                       else math.prod(sides) ** (2 * r)),
                 burgess.config.enumeration_budget)
    threads = burgess.config.threads
    collections = _collections(sides, r, samples, seed)
    grid = _exponent_grid(F, chi)

    def measure(part: t.List[Collection]) -> t.List[t.Tuple[float, int]]:
        out = []
        for collection in part:
            terms = _shifted_terms(grid, collection, chi.order)
            total = chi.combine(
                np.bincount(terms[terms >= 0], minlength=chi.order)
            )
            out.append((abs(total), xi_indicator(G, collection)))
        return out

    size = max(1, -(-len(collections) // threads))
    parts = [collections[i:i + size]
             for i in range(0, len(collections), size)]
    results = [m for part in partitioned_map(measure, parts, threads)
               for m in part]

    thresholds = [0.0] + [C * q ** ((n + j - 1) / 2) for j in range(1, n + 1)]
    counts = [len(results)] + [
        sum(1 for size_, _ in results if size_ > level)
        for level in thresholds[1:]
    ]
    vr_counts = [sum(xi for _, xi in results)] + [
        sum(1 for size_, xi in results if xi and size_ > level)
        for level in thresholds[1:]
    ]
    unit = q ** (n / 2)
    histogram = {}  # type: t.Dict[int, int]
    for size_, _ in results:
        bucket = math.floor(size_ / unit)
        histogram[bucket] = histogram.get(bucket, 0) + 1
    return Stratify(
        n=n, q=q, r=r, k=sides, permutation=tuple(order), C=C, C2=C2,
        thresholds=thresholds, counts=counts, vr_counts=vr_counts,
        ceilings=ceilings, histogram=histogram, samples=samples, seed=seed,
    )
