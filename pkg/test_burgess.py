import cmath
import json
import math
import os
import threading

from fractions import Fraction

import pytest

from hypothesis import (assume, given, strategies as st, settings,
                        HealthCheck)

import burgess

from burgess import (admissible, bsum, calc, charsums, cli, config,
                     ff_core, polyalg, polytext, records, sampling, systems,
                     vinogradov)
from burgess.charsums import BoxRegion, Collection
from burgess.ff_core import build_character
from burgess.polyalg import GF, MultiPoly, RR, ZZ
from burgess.polytext import loads
from burgess.systems import ack_system, standard_system

settings.register_profile('patient', deadline=2000,
                          suppress_health_check=(HealthCheck.too_slow,))
settings.load_profile('patient')

x1, x2 = MultiPoly.gens(2)

# Test config default values before the tests start mucking with the state
assert config.threads == 1
assert config.admissibility_method == "direction-search"


@st.composite
def polys(draw, n=2, max_degree=3, max_coeff=6, min_terms=1, max_terms=4):
    """Integer polynomials in ``n`` variables of bounded total degree."""
    exps = st.tuples(*(st.integers(0, max_degree) for _ in range(n))).filter(
        lambda e: sum(e) <= max_degree
    )
    terms = draw(st.dictionaries(exps, st.integers(-max_coeff, max_coeff),
                                 min_size=min_terms, max_size=max_terms))
    return MultiPoly(n, terms, ZZ)


@st.composite
def collections(draw, n=2, r=1, side=2):
    point = st.tuples(*(st.integers(1, side) for _ in range(n)))
    return Collection(draw(st.lists(point, min_size=2 * r,
                                    max_size=2 * r)))


def brute_mixed_sum(F, g, chi, box):
    total = 0j
    for point in box.points():
        total += chi(F.evaluate(point)) * cmath.exp(
            2j * math.pi * float(g.evaluate(point))
        )
    return total


def test_primes():
    assert [q for q in range(30) if ff_core.is_prime(q)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29
    ]
    assert ff_core.is_prime(2 ** 61 - 1)
    assert not ff_core.is_prime(561)
    assert ff_core.prime_factors(360) == [2, 3, 5]
    assert ff_core.find_primitive_root(7) == 3
    assert ff_core.find_primitive_root(5) == 2


def test_character_basics():
    chi = build_character(7, 2)
    assert chi.q == 7
    assert chi(0) == 0
    assert chi(7) == 0
    squares = {a * a % 7 for a in range(1, 7)}
    for a in range(1, 7):
        assert chi(a) == (1 if a in squares else -1)
    assert chi(3) == chi.roots[1]
    # multiplicative
    chi3 = build_character(13, 3)
    for a in range(1, 13):
        for b in range(1, 13):
            assert cmath.isclose(chi3(a * b), chi3(a) * chi3(b))


def test_character_errors():
    with pytest.raises(ff_core.NotPrime):
        build_character(9, 2)
    with pytest.raises(ff_core.OrderNotDividing):
        build_character(7, 4)
    with pytest.raises(ff_core.OrderOne):
        build_character(7, 1)
    with pytest.raises(ff_core.FieldError):
        build_character(8, 2)


def test_character_immutable():
    chi = build_character(5, 2)
    with pytest.raises(TypeError):
        chi.order = 3
    with pytest.raises(ValueError):
        chi.exponents[1] = 0
    assert chi == build_character(5, 2)
    assert hash(chi) == hash(build_character(5, 2))


def test_combine_is_exact():
    chi = build_character(5, 2)
    assert chi.combine([3, 3]) == 0
    assert chi.combine([4, 0]) == 4
    assert ff_core.root_of_unity(1, 4) == 1j
    assert ff_core.e(Fraction(1, 2)) == -1


def test_complex_acc():
    acc = ff_core.ComplexAcc()
    for _ in range(10):
        acc.add(0.1 + 0.1j)
    other = ff_core.ComplexAcc()
    other.add(1j)
    acc.merge(other)
    assert acc.term_count == 11
    assert abs(acc.value - (1 + 2j)) < acc.tolerance()


def test_poly_arithmetic():
    f = (x1 + x2) ** 2
    assert f.terms == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    assert f.degree() == 2
    assert f.is_homogeneous()
    assert f - f == f.zero()
    assert not (f - f)
    assert f.evaluate((1, 2)) == 9
    assert f.partial(0) == 2 * x1 + 2 * x2
    assert f.reduce(2) == MultiPoly(2, {(2, 0): 1, (0, 2): 1}, GF(2))
    assert f.shift((1, 0)) == (x1 + x2 + 1) ** 2
    assert f.permute((1, 0)) == f
    assert f.embed(3).n == 3


def test_poly_immutable():
    with pytest.raises(TypeError):
        x1.n = 3
    with pytest.raises(TypeError):
        del x1.terms


def test_poly_domains():
    with pytest.raises(polyalg.DomainMismatch):
        MultiPoly(1, {(1,): Fraction(1, 2)}, ZZ)
    half = MultiPoly(1, {(1,): "1/2"}, GF(5))
    assert half.terms == {(1,): 3}
    assert MultiPoly(1, {(1,): 0.25}, RR).terms == {(1,): Fraction(1, 4)}
    with pytest.raises(polyalg.DomainMismatch):
        loads("0.5*x1", 1).evaluate_mod([], 5)


def test_divide_and_gcd():
    f = (x1 * x2 + 1).reduce(5)
    g = (x1 + x2).reduce(5)
    product = f * g
    assert polyalg.divide(product, g) == f
    with pytest.raises(polyalg.NotDivisible):
        polyalg.divide(f, g)
    assert polyalg.gcd(product, g * g) == g
    assert polyalg.gcd(f, g) == f.one()
    zero = f.zero()
    assert polyalg.gcd(zero, zero) == zero


@given(polys(max_degree=2), polys(max_degree=2), polys(max_degree=2))
def test_gcd_finds_common_factor(a, b, c):
    a, b, c = a.reduce(5), b.reduce(5), c.reduce(5)
    assume(a and b and c)
    common = polyalg.gcd(a * c, b * c)
    # c divides the gcd, and the gcd divides both
    polyalg.divide(common, c.monic())
    polyalg.divide(a * c, common)
    polyalg.divide(b * c, common)
    assert common.leading()[1] == 1


def test_product_polynomial():
    F = x1 * x2
    P = polyalg.product_polynomial(F, [(1, 1), (0, 0)], 3, 5)
    assert P == (F.shift((1, 1)) * F ** 2).reduce(5)
    with pytest.raises(ValueError):
        polyalg.product_polynomial(F, [(1, 1)], 2, 5)


def test_polytext_examples():
    f = loads("x1^2*x2 + 3*x2^3", 2)
    assert f.terms == {(2, 1): 1, (0, 3): 3}
    assert polytext.dumps(f) == "1*x1^2*x2 + 3*x2^3"
    assert polytext.dumps(loads("-x1 + 2", 1)) == "-1*x1 + 2"
    assert polytext.dumps(loads("0", 3)) == "0"
    g = loads("0.25*x1 - 1/3", 1)
    assert g.domain == RR
    assert polytext.dumps(g) == "0.25*x1 - 1/3"
    assert loads("x1 + x1", 1).terms == {(1,): 2}


def test_polytext_errors():
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1 + + x2", 2)
    assert exc.value.offset == 5
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1 $ x2", 2)
    assert exc.value.offset == 3
    with pytest.raises(polytext.VariableOutOfRange):
        loads("x3", 2)
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1^0.5", 1)
    assert exc.value.offset == 3
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1 + $", 2)
    assert exc.value.offset == 5
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1*x2 - 3*x1 $", 2)
    assert exc.value.offset == 13
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1 + 1/0*x2", 2)
    assert exc.value.offset == 5
    # offsets count bytes: the no-break space takes two
    with pytest.raises(polytext.ParseError) as exc:
        loads("x1\u00a0+ $", 2)
    assert exc.value.offset == 6


@given(polys(n=3, max_degree=4, max_coeff=50))
def test_polytext_round_trip(f):
    text = polytext.dumps(f)
    assert loads(text, 3) == f
    assert polytext.round_trip(f) == f
    assert str(f) == text


def test_systems_standard():
    G = standard_system(2, 2)
    assert G.exponents == ((0, 1), (0, 2), (1, 0), (1, 1), (2, 0))
    assert (G.R, G.M, G.d) == (5, 8, 2)
    for n in range(1, 5):
        for d in range(1, 4):
            H = standard_system(n, d)
            assert systems.standard_closed_forms(n, d) == (H.R, H.M)
    assert standard_system(2, 1).K(1) == 1
    assert standard_system(2, 1).K(2) == 2
    assert G.moments((2, 3)) == (3, 9, 2, 6, 4)


def test_systems_ack_and_custom():
    G = ack_system((1, 1), 2)
    assert G.exponents == ((0, 1), (1, 0), (1, 1))
    assert G.M == 4
    with pytest.raises(polyalg.DegenerateSystem):
        ack_system((0, 1), 1)
    with pytest.raises(polyalg.DegenerateSystem):
        systems.custom_system(2, [(1, 0), (1, 1)])
    H = systems.custom_system(2, [(1, 1)], require_linear=False)
    assert H.R == 1
    with pytest.raises(ValueError):
        systems.custom_system(2, [(0, 0), (1, 0), (0, 1)])
    with pytest.raises(TypeError):
        G.n = 3


@pytest.mark.parametrize(
    'descriptor, R, M',
    [
        ("standard(2,1)", 2, 2),
        ("standard(3,2)", 9, 15),
        ("ack(1,1;2)", 3, 4),
        ("1,0;0,1;1,1", 3, 4),
        ("custom{1,0;0,1;2,0}", 3, 4),
    ]
)
def test_parse_descriptor(descriptor: str, R: int, M: int):
    G = systems.parse_descriptor(descriptor)
    assert (G.R, G.M) == (R, M)
    assert systems.parse_descriptor(G.descriptor()) == G


def test_is_tdi():
    assert systems.is_tdi(standard_system(2, 3))
    assert systems.is_tdi(ack_system((1, 1), 2))
    result = systems.is_tdi(systems.custom_system(2, [(1, 0), (0, 1),
                                                      (1, 2)]))
    assert not result
    beta, gamma, _ = result.certificate
    assert beta == (1, 2)
    assert gamma == (0, 2)
    assert systems.ppw_regime(standard_system(2, 1), 5)
    assert not systems.ppw_regime(standard_system(2, 1), 4)


def test_admissible_examples():
    report = admissible.is_admissible(loads("x1*x2", 2), 5, 2)
    assert report.admissible == admissible.YES
    assert report.witness is None
    report = admissible.is_admissible(loads("x1^2", 2), 5, 3)
    assert report.admissible == admissible.NO
    assert report.witness == (0, 1)
    report = admissible.is_admissible(loads("x1^2*x2", 2), 5, 2)
    assert report.admissible == admissible.NO
    assert report.power_free_part == loads("x2", 2).reduce(5)
    assert report.witness == (1, 0)
    report = admissible.is_admissible(loads("x1 + x2", 2) ** 2, 5, 3)
    assert report.witness == (1, 4)
    assert report.as_dict()['witness'] == [1, 4]


def test_admissible_errors():
    with pytest.raises(polyalg.ZeroModQ):
        admissible.is_admissible(loads("5*x1*x2", 2), 5, 2)
    with pytest.raises(polyalg.DegreeTooLarge):
        admissible.is_admissible(loads("x1^3 + x2", 2), 3, 2)
    with pytest.raises(ValueError):
        admissible.is_admissible(loads("x1*x2", 2), 5, 2, method="magic")


def test_squarefree_parts():
    f = loads("x1^2*x2", 2).reduce(5)
    assert admissible.squarefree_parts(f) == [
        loads("x2", 2).reduce(5), loads("x1", 2).reduce(5)
    ]
    with pytest.raises(polyalg.ZeroPolynomial):
        admissible.squarefree_parts(f.zero())


@given(polys(max_degree=4, min_terms=1), st.integers(2, 4))
def test_power_free_decompose(f, order):
    f = f.reduce(5)
    assume(f)
    g, h = admissible.power_free_decompose(f, order)
    assert g ** order * h == f
    # no factor of h is repeated order times
    for multiplicity, part in enumerate(admissible.squarefree_parts(h), 1):
        assert multiplicity < order or part.degree() == 0


@given(polys(max_degree=2, max_coeff=2))
def test_admissible_methods_agree_mod_3(F):
    assume(F.reduce(3))
    fast = admissible.is_admissible(F, 3, 2, "direction-search")
    slow = admissible.is_admissible(F, 3, 2, "gl-bruteforce")
    assert fast.admissible == slow.admissible
    if fast.witness is not None:
        assert admissible.is_invariant(fast.power_free_part, fast.witness)


@settings(max_examples=30)
@given(polys(max_degree=3, max_coeff=4))
def test_admissible_methods_agree_mod_5(F):
    assume(F.reduce(5))
    fast = admissible.is_admissible(F, 5, 2, "direction-search")
    slow = admissible.is_admissible(F, 5, 2, "gl-bruteforce")
    assert fast.admissible == slow.admissible


def test_admissible_threads():
    F = loads("x1^2 + 2*x1*x2 + x2^2 + x1 + x2", 2)
    single = admissible.is_admissible(F, 7, 2)
    with config(threads=4):
        threaded = admissible.is_admissible(F, 7, 2)
    assert single == threaded
    assert single.witness == (1, 6)


def test_general_linear_group_size():
    assert sum(1 for _ in admissible.general_linear_group(3, 2)) == 48
    assert sum(1 for _ in admissible.projective_directions(3, 2)) == 4


def test_box_region():
    box = BoxRegion.make((0, 1), (2, 2))
    assert box.size() == 4
    assert list(box.points()) == [(1, 2), (1, 3), (2, 2), (2, 3)]
    with pytest.raises(ValueError):
        BoxRegion.make((0,), (0,))
    with pytest.raises(ValueError):
        BoxRegion.make((0, 0), (1,))


def test_mixed_sum_full_box_vanishes():
    chi = build_character(5, 2)
    zero = MultiPoly(2, (), ZZ)
    total = charsums.mixed_sum(x1 * x2, zero, chi, BoxRegion.make((0, 0),
                                                                  (5, 5)))
    assert total == 0


def test_mixed_sum_matches_direct_evaluation():
    chi = build_character(7, 3)
    F = loads("x1^2 + x2 + 1", 2)
    g = loads("0.3*x1 + 1/7*x1*x2", 2)
    box = BoxRegion.make((2, 1), (4, 3))
    expected = brute_mixed_sum(F, g, chi, box)
    assert cmath.isclose(charsums.mixed_sum(F, g, chi, box), expected,
                         abs_tol=1e-9)


@given(polys(max_degree=3), st.integers(1, 6), st.integers(1, 6))
def test_mixed_sum_is_thread_independent(F, h1, h2):
    chi = build_character(11, 2)
    g = loads("0.125*x1 + 0.5*x2", 2)
    box = BoxRegion.make((3, 0), (h1, h2))
    zero = MultiPoly(2, (), ZZ)
    for phase in (zero, g):
        single = charsums.mixed_sum(F, phase, chi, box)
        with config(threads=3):
            threaded = charsums.mixed_sum(F, phase, chi, box)
        assert single == threaded


def test_mixed_sum_budget():
    chi = build_character(5, 2)
    box = BoxRegion.make((0, 0), (100, 100))
    with config(enumeration_budget=1000):
        with pytest.raises(burgess.BudgetExceeded) as exc:
            charsums.mixed_sum(x1, x1.zero(), chi, box)
    assert exc.value.needed == 10000


def test_collection():
    coll = Collection.from_halves([(1, 1), (2, 2)], [(2, 1), (1, 2)])
    assert coll.points == ((1, 1), (2, 1), (2, 2), (1, 2))
    assert coll.r == 2
    assert coll.n == 2
    G = standard_system(2, 1)
    assert coll.signed_moments(G) == (0, 0)
    assert charsums.xi_indicator(G, coll) == 1
    assert [Collection.eps(j) for j in (1, 2, 3)] == [1, -1, 1]
    assert [Collection.delta(j, 3) for j in (1, 2)] == [1, 2]
    with pytest.raises(ValueError):
        Collection([(1, 1)])
    with pytest.raises(ValueError):
        Collection([(1, 1), (1,)])
    with pytest.raises(TypeError):
        coll.points = ()


def test_complete_sum_examples():
    chi = build_character(5, 2)
    assert charsums.complete_mult_sum(
        x1 * x2, Collection([(1, 1), (1, 1)]), chi
    ) == 16
    # a single shift pair of x1 is the classical Jacobi-type sum
    chi7 = build_character(7, 2)
    value = charsums.complete_mult_sum(
        loads("x1", 1), Collection([(0,), (1,)]), chi7
    )
    assert value == -1


@given(collections(r=1, side=4), polys(max_degree=2))
def test_complete_sum_methods_agree(coll, F):
    chi = build_character(5, 2)
    pointwise = charsums.mult_sum_terms(F, coll, chi, "pointwise")
    product = charsums.mult_sum_terms(F, coll, chi, "product")
    assert pointwise.tolist() == product.tolist()


@given(collections(r=2, side=3))
def test_complete_sum_bounded(coll):
    chi = build_character(7, 3)
    value = charsums.complete_mult_sum(x1 * x2 + 1, coll, chi)
    assert abs(value) <= 7 ** 2 + 1e-9


def test_box_partition():
    G = standard_system(2, 1)
    partition = charsums.BoxPartition(G, 3)
    assert partition.vertex_count == 9
    assert partition.moduli() == (3, 3)
    assert len(list(partition.vertices())) == 9
    assert partition.theta((1, 2)) == (Fraction(1, 3), Fraction(2, 3))


@given(collections(n=2, r=1, side=3))
def test_box_sums_agree(coll):
    G = standard_system(2, 2)
    Q = 3
    exact = charsums.additive_box_sum(G, Q, coll)
    direct = charsums.vertex_box_sum(G, Q, coll)
    assert abs(exact - direct) < 1e-6 * Q ** G.M
    assert exact == Q ** G.M * charsums.xi_indicator(G, coll, Q)


def test_prod_lemma_exhaustive():
    report = charsums.verify_prod_lemma(standard_system(2, 1), 2, 1,
                                        exhaustive=True, oracle=True)
    assert report.checked == 16
    assert report.status == "PASS"
    assert report.Q == report.threshold == 4
    assert report.vertex_terms == 256
    assert report.summary() == "PASS 16/16 (256 vertex terms)"
    assert not report.wraparound


def test_prod_lemma_samples():
    report = charsums.verify_prod_lemma(standard_system(2, 2), 2, 2,
                                        samples=1000, seed=0)
    assert report.checked == report.passed == 1000
    again = charsums.verify_prod_lemma(standard_system(2, 2), 2, 2,
                                       samples=1000, seed=0)
    assert again == report


def test_prod_lemma_wraparound():
    report = charsums.verify_prod_lemma(standard_system(2, 1), 2, 1, Q=1,
                                        exhaustive=True)
    # with Q = 1 every indicator is set
    assert report.status == "PASS"
    assert len(report.wraparound) == 16 - 4
    assert report.as_dict()['Q'] == 1


def test_stratify_fixture():
    strata = charsums.stratify_audit(
        x1 * x2, build_character(7, 2), standard_system(2, 1), 2, (2, 2)
    )
    assert strata.counts == [256, 64, 64]
    assert strata.vr_counts == [36, 36, 36]
    assert strata.histogram == {0: 192, 3: 36, 4: 24, 5: 4}
    assert strata.ceilings == [256, 128, 16]
    assert strata.thresholds[0] == 0.0
    assert strata.rows()[2][:3] == (2, 7 ** 1.5, 64)
    assert strata.as_dict()['histogram'] == {'0': 192, '3': 36, '4': 24,
                                             '5': 4}


def test_stratify_sorts_sides():
    strata = charsums.stratify_audit(
        x1 + 2 * x2, build_character(5, 2), standard_system(2, 1), 1, (3, 2)
    )
    assert strata.k == (2, 3)
    assert strata.permutation == (1, 0)
    assert strata.counts[0] == 6 ** 2
    # r < n leaves B undefined: tallies only
    assert strata.ceilings is None
    assert strata.as_dict()['ceilings'] is None
    assert [row[3:] for row in strata.rows()] == [(None, None)] * 3
    assert sum(strata.histogram.values()) == 36


def test_stratify_sampling():
    args = (x1 * x2, build_character(7, 2), standard_system(2, 1), 2,
            (3, 3))
    first = charsums.stratify_audit(*args, samples=200, seed=4)
    second = charsums.stratify_audit(*args, samples=200, seed=4)
    assert first.counts == second.counts
    assert first.counts[0] == 200
    with pytest.raises(ValueError):
        charsums.stratify_audit(*args, samples=10)


def test_b_function():
    assert bsum.b_function(2, 3, 1, (2, 3)) == 4
    assert bsum.b_function(2, 3, 2, (2, 3)) == 64
    assert bsum.b_function(3, 7, 1, (2, 3, 4)) == 2 ** 3
    assert bsum.b_function(3, 7, 2, (2, 3, 4)) == 2 ** 6
    assert bsum.b_function(3, 7, 3, (2, 3, 4)) == 2 ** 14 * 3 ** 7
    assert bsum.b_function(4, 5, 0, (1, 1, 1, 1)) == 1
    with pytest.raises(bsum.UnsortedSides):
        bsum.b_function(2, 3, 1, (3, 2))
    with pytest.raises(ValueError):
        bsum.b_function(3, 2, 1, (1, 2, 3))
    assert bsum.stratum_ceiling(2, 2, 1, (2, 2)) == 128


def test_check_b_sum():
    result = bsum.check_b_sum(2, 5, 101, (2, 3))
    assert result.status == 'pass'
    assert result.log_lhs <= result.log_rhs
    skipped = bsum.check_b_sum(2, 5, 10 ** 6, (2, 3))
    assert skipped.status == 'skipped'


def test_b_sum_lemma():
    report = bsum.verify_b_sum_lemma(2, 5, 101, 2, 100, seed=3)
    assert report.checked == report.passed == 100
    assert not report.skipped
    assert report == bsum.verify_b_sum_lemma(2, 5, 101, 2, 100, seed=3)


def test_b_sum_random_cases():
    report = bsum.sample_b_sum_cases(1000, seed=0)
    assert report.checked == 1000
    assert report.passed == 1000
    assert report.as_dict()['seed'] == 0


@pytest.mark.parametrize(
    'G, r, X, J',
    [
        (standard_system(2, 1), 2, 2, 36),
        (standard_system(1, 1), 2, 4, 44),
        (standard_system(1, 1), 1, 5, 5),
    ]
)
def test_jr_values(G, r, X, J):
    assert vinogradov.jr_mitm(G, r, X).J == J
    assert vinogradov.jr_bruteforce(G, r, X).J == J


@settings(max_examples=30)
@given(st.integers(1, 2), st.integers(1, 2), st.integers(1, 3),
       st.integers(1, 3))
def test_jr_methods_agree(n, d, r, X):
    G = standard_system(n, d)
    assume(X ** (2 * r * n) <= 10 ** 5)
    mitm = vinogradov.jr_mitm(G, r, X)
    brute = vinogradov.jr_bruteforce(G, r, X)
    assert mitm.J == brute.J
    assert X ** (r * n) <= mitm.J <= X ** (2 * r * n)
    if d == 1:
        assert mitm.J == vinogradov.standard_linear_count(n, r, X)


def test_jr_threads_and_monotone():
    G = standard_system(2, 2)
    counts = [vinogradov.jr_mitm(G, 2, X).J for X in range(1, 5)]
    assert counts == sorted(counts)
    with config(threads=4):
        assert [vinogradov.jr_mitm(G, 2, X).J for X in range(1, 5)] == counts


def test_jr_budget():
    with config(mitm_budget=100):
        with pytest.raises(burgess.BudgetExceeded):
            vinogradov.jr_mitm(standard_system(2, 1), 2, 10)
    with config(enumeration_budget=100):
        with pytest.raises(burgess.BudgetExceeded):
            vinogradov.jr_bruteforce(standard_system(2, 1), 1, 10)


def test_vr_count():
    assert vinogradov.vr_count(standard_system(2, 1), 2, (2, 2)) == 36
    with pytest.raises(ValueError):
        vinogradov.vr_count(standard_system(2, 1), 2, (2,))


def test_count_result_rows():
    result = vinogradov.jr_mitm(standard_system(2, 1), 2, 2)
    assert result.row(timing=False) == ("standard(2,1)", 2, 2, 36, "mitm")
    assert len(result.row()) == 6
    assert 'seconds' not in result.as_dict(timing=False)


def test_predicted_exponent():
    prediction = vinogradov.predicted_exponent(standard_system(2, 1), 2)
    assert prediction.exponent == 6
    assert prediction.j_star == 2
    assert prediction.terms == (4, 4, 6)
    # ties go to the diagonal term
    tie = vinogradov.predicted_exponent(standard_system(2, 1), 1)
    assert tie.terms[0] == tie.exponent
    assert tie.j_star == 0
    with pytest.raises(vinogradov.UnsupportedSystem):
        vinogradov.predicted_exponent(ack_system((1, 1), 2), 2)
    assert vinogradov.predicted_exponent(ack_system((1, 1), 2), 2,
                                         K=[1, 3]).exponent == 5
    G = systems.parse_descriptor("1,0;0,1;1,1")
    assert vinogradov.predicted_exponent(G, 10).exponent == 40 - 4
    with pytest.raises(vinogradov.UnsupportedSystem):
        vinogradov.predicted_exponent(G, 3)


def test_slope_check():
    report = vinogradov.slope_check(standard_system(1, 1), 2, [4, 8, 16])
    assert report.predicted == 3
    assert abs(report.slope - 3) < 0.1
    with pytest.raises(ValueError):
        vinogradov.slope_check(standard_system(1, 1), 2, [4, 4, 8])


def test_theta():
    assert calc.theta(3, 7) == 3
    assert calc.theta(2, 5) == 4
    assert calc.theta(1, 5, one_dimensional=True) == 5
    with pytest.raises(calc.DimensionTooSmall):
        calc.theta(1, 5)
    assert calc.beta_n(2) == Fraction(1, 3)


@pytest.mark.parametrize(
    'n, d, r, threshold',
    [
        (2, 1, 5, Fraction(5, 12)),
        (2, 1, 4, Fraction(1, 2)),
        (3, 1, 100, Fraction(1, 2) - Fraction(45, 368)),
    ]
)
def test_nontrivial_threshold(n, d, r, threshold):
    assert calc.nontrivial_threshold(n, d, r) == threshold


def test_exponent_report():
    report = calc.exponent_report(2, 1, 5)
    assert report.valid
    assert report.bound == (Fraction(17, 10), Fraction(1, 8))
    assert report.H_exp_cap == Fraction(5, 8)
    data = report.as_dict()
    assert data['beta_threshold']['exact'] == "5/12"
    assert "Theta" in report.table()
    invalid = calc.exponent_report(2, 2, 9)
    assert not invalid.valid
    assert invalid.beta_threshold is None
    with pytest.raises(calc.InvalidRange):
        calc.nontrivial_threshold(2, 2, 9)
    assert not calc.exponent_report(2, 1, 3).valid
    eps = calc.exponent_report(2, 1, 5, epsilon="1/100")
    assert eps.bound[1] == Fraction(1, 8) + Fraction(1, 100)


def test_exponent_report_conjectural():
    report = calc.exponent_report(3, 1, 10, alpha=1)
    assert report.conjectural
    assert report.theta == 10
    with pytest.raises(ValueError):
        calc.exponent_report(3, 1, 10, alpha=3)


@given(st.integers(2, 4), st.integers(1, 2), st.integers(1, 200))
def test_threshold_identity(n, d, r):
    report = calc.exponent_report(n, d, r)
    assume(report.beta_threshold is not None)
    b = report.bound[1]
    assert report.beta_threshold == 2 * r * b / (n + 1)
    assert report.beta_threshold >= calc.beta_n(n)
    assert report.beta_threshold <= Fraction(1, 2)


def test_threshold_decreases_to_limit():
    values = [calc.nontrivial_threshold(2, 1, r) for r in range(4, 200)]
    assert values == sorted(values, reverse=True)
    assert values[-1] - calc.beta_n(2) < Fraction(1, 100)


def test_tdi_theorem_report():
    G = ack_system((1, 1), 2)
    assert not calc.tdi_theorem_report(G, 2, 5).valid
    assert calc.tdi_theorem_report(G, 2, 6).valid
    assert calc.tdi_theorem_report(standard_system(2, 1), 2, 5).valid
    custom = systems.parse_descriptor("1,0;0,1;1,1")
    assert not calc.tdi_theorem_report(custom, 2, 9).valid
    assert calc.tdi_theorem_report(custom, 2, 10).valid
    with pytest.raises(calc.NotTDI):
        calc.tdi_theorem_report(
            systems.custom_system(2, [(1, 0), (0, 1), (1, 2)]), 2, 50
        )


def test_p_window():
    window = calc.p_window(2, 1, 5, 10 ** 4, beta="9/20")
    assert window.lower == window.upper / 2
    assert window.hp_below_q
    assert window.p_below_cap
    assert window.theta == 4
    assert window.mu == 2
    with pytest.raises(calc.EmptyWindow):
        calc.p_window(2, 1, 3, 10 ** 4, beta="9/20")
    with pytest.raises(calc.EmptyWindow):
        calc.p_window(2, 1, 5, 10 ** 4, beta="5/8")
    with pytest.raises(ValueError):
        calc.p_window(2, 1, 5, 10 ** 4)
    floating = calc.p_window(2, 1, 5, 10 ** 4, H=(10 ** 4) ** 0.45)
    assert math.isclose(floating.upper, window.upper, rel_tol=1e-6)


def test_delta_savings():
    savings = calc.delta_savings(2, 1, 0.02)
    assert savings == calc.Savings(Fraction(17, 23800), 17, 16,
                                   Fraction(1, 50))
    with pytest.raises(calc.KappaTooLarge):
        calc.delta_savings(2, 1, 1)
    with pytest.raises(ValueError):
        calc.delta_savings(2, 1, 0)
    with pytest.raises(calc.InvalidRange):
        calc.delta_savings(2, 1, 0.02, r=3)
    with pytest.raises(ValueError):
        calc.delta_savings(2, 1, 0.02, strategy="guess")


@pytest.mark.parametrize('kappa', ["1/50", "1/100", "1/30"])
def test_optimal_savings(kappa):
    heuristic = calc.delta_savings(2, 1, kappa)
    optimal = calc.delta_savings(2, 1, kappa, strategy="optimal")
    assert optimal.delta >= heuristic.delta
    for r in range(4, 3 * optimal.r):
        assert calc.delta_savings(2, 1, kappa, r=r).delta <= optimal.delta
    profile = calc.savings_profile(2, 1, kappa)
    assert abs(optimal.r - profile.argmax) <= 1


def test_savings_exponent():
    assert calc.savings_exponent(2, 1, 5, 2) == Fraction(1, 8)
    assert calc.savings_exponent(2, 1, 5, 1) == Fraction(2, 15)
    assert calc.savings_exponent(2, 1, 5, 2) == calc.exponent_report(
        2, 1, 5
    ).bound[1]
    with pytest.raises(calc.InvalidRange):
        calc.savings_exponent(2, 1, 5, 4)


def test_prop_bound_decreases_in_p():
    G = standard_system(2, 1)
    q = 10 ** 4
    H = q ** 0.45
    exponent = vinogradov.predicted_exponent(G, 5).exponent
    totals = [
        calc.prop_bound_rhs(2, G, 5, H, P, q,
                            (2 * H / P) ** float(exponent)).log_total
        for P in range(1, 20)
    ]
    assert totals == sorted(totals, reverse=True)
    assert len(set(totals)) == len(totals)


def test_prop_bound_hypotheses():
    G = standard_system(2, 1)
    with pytest.raises(calc.HypothesisViolated) as exc:
        calc.prop_bound_rhs(2, G, 1, 10, 20, 100, 1)
    assert "r >= n" in exc.value.conditions
    assert "P <= H" in exc.value.conditions
    assert "HP < q" in exc.value.conditions


def test_stratified_sum_bound():
    shape = calc.stratified_sum_bound(2, 2, 5, 4, 101, 36)
    assert shape.log_total >= max(shape.log_main, shape.log_secondary)
    assert math.isclose(shape.total, math.exp(shape.log_total))
    with pytest.raises(calc.HypothesisViolated):
        calc.stratified_sum_bound(2, 2, 5, 1, 101, 36)


def test_sample_t():
    F = x1 * x2 + 1
    G = standard_system(2, 1)
    chi = build_character(7, 2)
    box = BoxRegion.make((0, 0), (4, 4))
    estimate = sampling.sample_T(F, G, chi, box, 20, seed=5)
    assert len(estimate.history) == 20
    assert estimate.history == sorted(estimate.history)
    assert estimate.estimate == estimate.history[-1]
    full = abs(charsums.mixed_sum(F, F.zero(), chi, box))
    assert estimate.history[0] == full
    assert estimate.as_dict()['kind'] == 'sampled lower estimate'
    again = sampling.sample_T(F, G, chi, box, 20, seed=5)
    assert again == estimate
    shorter = sampling.sample_T(F, G, chi, box, 10, seed=5)
    assert shorter.history == estimate.history[:10]


def test_sample_t_probes():
    F = x1 * x2 + 1
    G = standard_system(2, 1)
    chi = build_character(7, 2)
    box = BoxRegion.make((0, 0), (4, 4))
    probe = sampling.Probe(loads("0.5*x1", 2), (3, 4))
    estimate = sampling.sample_T(F, G, chi, box, 1, seed=0, probes=[probe])
    direct = abs(charsums.mixed_sum(F, probe.g, chi,
                                    BoxRegion.make((0, 0), (3, 4))))
    assert estimate.probes == [direct]
    assert estimate.estimate >= direct
    with pytest.raises(ValueError):
        sampling.sample_T(F, G, chi, box, 1, seed=0,
                          probes=[sampling.Probe(probe.g, (5, 4))])
    with pytest.raises(ValueError):
        sampling.sample_T(F, G, chi, box, 0, seed=0)


def test_experiment_config():
    merged = records.ExperimentConfig.merge(
        'jr',
        {'r': None, 'X': [2], 'method': 'mitm'},
        {'r': 2, 'method': 'bruteforce', 'unknown': 1},
        {'method': 'both', 'X': None},
    )
    assert merged.params == {'r': 2, 'X': [2], 'method': 'both'}
    assert merged['r'] == 2
    assert records.ExperimentConfig.loads(merged.dumps()) == merged
    assert merged.digest() == records.ExperimentConfig(
        'jr', {'method': 'both', 'X': (2,), 'r': 2}
    ).digest()
    assert merged.digest() != merged.digest(version="0.0.0")
    with pytest.raises(TypeError):
        merged.command = 'delta'


def test_config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({'seed': 3, 'jr': {'r': 2, 'seed': 4},
                                'delta': {'r': 9}}))
    assert records.load_config_file(str(path), 'jr') == {'seed': 4, 'r': 2}
    assert records.load_config_file(str(path), 'window') == {'seed': 3}
    path.write_text("[1, 2]")
    with pytest.raises(records.ConfigError):
        records.load_config_file(str(path), 'jr')
    path.write_text("{")
    with pytest.raises(records.ConfigError):
        records.load_config_file(str(path), 'jr')


def test_result_cache(tmp_path):
    cache = records.ResultCache(str(tmp_path))
    config_ = records.ExperimentConfig('delta', {'kappa': '1/50'})
    assert cache.get(config_) is None
    cache.put(config_, {'exit': 0, 'data': [1, 2]})
    assert cache.get(config_) == {'exit': 0, 'data': [1, 2]}
    assert os.path.exists(cache.path(config_))
    unseeded = records.ExperimentConfig('sample-t',
                                        {'samples': 10, 'seed': None})
    cache.put(unseeded, {'exit': 0})
    assert cache.get(unseeded) is None
    assert not records.ResultCache.from_env(str(tmp_path), True).enabled


def test_result_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(records.CACHE_ENV, str(tmp_path))
    assert records.ResultCache.from_env().root == str(tmp_path)
    monkeypatch.delenv(records.CACHE_ENV)
    assert not records.ResultCache.from_env().enabled


def test_dumps_is_canonical():
    text = records.dumps({'b': Fraction(1, 2), 'a': (1, 2)})
    assert text == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": "1/2"\n}\n'
    assert records.csv_text(['a', 'b'], [(1, 2)]) == "a,b\n1,2\n"


def run_cli(capsys, *argv):
    code = cli.main(['--no-cache', *argv])
    return code, capsys.readouterr().out


def test_cli_exponents(capsys):
    code, out = run_cli(capsys, 'exponents', '-n', '2', '-d', '1', '-r', '5',
                        '--json')
    assert code == 0
    data = json.loads(out)
    assert data['result']['beta_threshold']['exact'] == "5/12"
    assert data['config']['command'] == 'exponents'
    code, out = run_cli(capsys, 'exponents', '-n', '2', '-d', '2', '-r', '9')
    assert code == 1
    code, out = run_cli(capsys, 'exponents', '--ack', '1,1', '2', '-r', '6',
                        '--csv')
    assert code == 0
    assert out.startswith("H_exp_cap,")


def test_cli_jr(capsys):
    code, out = run_cli(capsys, 'jr', '--standard', '2', '1', '-r', '2',
                        '-X', '2', '--csv')
    assert code == 0
    assert out == "system,r,X,J,method\nstandard(2,1),2,2,36,mitm\n"
    code, out = run_cli(capsys, 'jr', '--system', 'standard(1,1)', '-r', '2',
                        '-X', '4', '8', '16', '--method', 'both', '--slope')
    assert code == 0
    assert "slope" in out


def test_cli_admissible(capsys):
    code, out = run_cli(capsys, 'admissible', '-q', '5', '-F', 'x1*x2')
    assert code == 0
    assert out.startswith("admissible")
    code, out = run_cli(capsys, 'admissible', '-q', '5', '-F', 'x1^2',
                        '-n', '2', '-D', '3', '--json')
    assert code == 1
    assert json.loads(out)['result']['witness'] == [0, 1]
    assert json.loads(out)['result']['n'] == 2
    # without -n the form is read in as many variables as it names
    code, out = run_cli(capsys, 'admissible', '-q', '5', '-F', 'x1^2',
                        '-D', '3', '--json')
    assert code == 0
    assert json.loads(out)['result']['n'] == 1
    assert cli.main(['admissible', '-q', '5', '-F', '1/0*x1']) == 2
    capsys.readouterr()
    code, out = run_cli(capsys, 'admissible', '-q', '3', '-F', 'x1^3*x2')
    assert code == 3
    assert "indeterminate" in out


def test_cli_charsum(capsys):
    code, out = run_cli(capsys, 'charsum', '-q', '5', '-F', 'x1*x2',
                        '--collection', '1,1;1,1', '--json')
    assert code == 0
    result = json.loads(out)['result']
    assert result['kind'] == 'complete'
    assert result['real'] == 16
    code, out = run_cli(capsys, 'charsum', '-q', '5', '-F', 'x1*x2',
                        '-H', '5,5', '--csv')
    assert code == 0
    assert out.splitlines()[1].startswith("mixed,0.0,0.0")


def test_cli_verify(capsys):
    code, out = run_cli(capsys, 'verify', 'prod-lemma', '-n', '2', '-d', '1',
                        '-r', '1', '-K', '2', '--exhaustive')
    assert code == 0
    assert out == "PASS 16/16 (256 vertex terms)\n"
    code, out = run_cli(capsys, 'verify', 'b-sum', '--random', '--trials',
                        '50')
    assert code == 0
    assert out.startswith("PASS 50/50")
    code, out = run_cli(capsys, 'verify', 'b-sum', '-n', '2', '-r', '5',
                        '-q', '101', '--K1', '2', '--trials', '10')
    assert code == 0


def test_cli_stratify(capsys):
    code, out = run_cli(capsys, 'stratify', '--standard', '2', '1', '-q', '7',
                        '-F', 'x1*x2', '-r', '2', '-k', '2,2', '--csv')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "j,threshold,count,ceiling,ratio"
    assert [line.split(",")[2] for line in lines[1:]] == ["256", "64", "64"]


def test_cli_delta_and_window(capsys):
    code, out = run_cli(capsys, 'delta', '-n', '2', '-d', '1', '--kappa',
                        '0.02', '--json')
    assert code == 0
    result = json.loads(out)['result']
    assert result['r'] == 17
    assert result['delta']['exact'] == "17/23800"
    code, out = run_cli(capsys, 'delta', '-n', '2', '-d', '1', '--kappa', '1')
    assert code == 2
    code, out = run_cli(capsys, 'window', '-n', '2', '-d', '1', '-r', '5',
                        '-q', '10000', '--beta', '9/20')
    assert code == 0
    code, out = run_cli(capsys, 'window', '-n', '2', '-d', '1', '-r', '3',
                        '-q', '10000', '--beta', '9/20')
    assert code == 1
    assert out.startswith("empty window")


def test_cli_system_and_sample(capsys):
    code, out = run_cli(capsys, 'system', '--system', 'ack(1,1;2)', '--json')
    assert code == 0
    assert json.loads(out)['result']['M'] == 4
    args = ('sample-t', '--standard', '2', '1', '-q', '7', '-F', 'x1*x2',
            '-H', '3,3', '--samples', '5', '--seed', '1', '--probe',
            '0.5*x1', '2,2', '--json')
    code, out = run_cli(capsys, *args)
    assert code == 0
    result = json.loads(out)['result']
    assert result['samples'] == 5
    assert len(result['probes']) == 1
    assert run_cli(capsys, *args) == (code, out)


def test_cli_errors(capsys):
    assert cli.main(['jr', '-r', '2', '-X', '2']) == 2
    assert cli.main(['jr', '--standard', '2', '1', '--system', 'x',
                     '-r', '2', '-X', '2']) == 2
    assert cli.main(['verify']) == 2
    assert cli.main([]) == 2
    assert cli.main(['exponents', '--bogus']) == 2
    assert cli.main(['--no-cache', 'jr', '--standard', '2', '1', '-r', '2',
                     '-X', '30', '--mitm-budget', '100']) == 4
    capsys.readouterr()


def test_cli_config_file(capsys, tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps({'n': 2, 'd': 1,
                                'exponents': {'r': 5}, 'delta': {'r': 30}}))
    code, out = run_cli(capsys, 'exponents', '--config', str(path), '--json')
    assert code == 0
    assert json.loads(out)['config']['params']['r'] == 5
    code, out = run_cli(capsys, 'exponents', '--config', str(path), '-r',
                        '4', '--json')
    assert json.loads(out)['config']['params']['r'] == 4


def test_cli_cache_replays_output(capsys, tmp_path):
    argv = ['--cache-dir', str(tmp_path), 'jr', '--standard', '2', '1', '-r',
            '2', '-X', '2', '3', '--json', '--timing']
    assert cli.main(argv) == 0
    first = capsys.readouterr().out
    assert cli.main(argv) == 0
    second = capsys.readouterr().out
    assert first == second
    assert len(list(tmp_path.glob("*/*.json"))) == 1


def test_cli_threads_do_not_change_output(capsys):
    argv = ('stratify', '--standard', '2', '1', '-q', '7', '-F', 'x1*x2+1',
            '-r', '2', '-k', '2,3', '--json')
    single = run_cli(capsys, *argv)
    threaded = run_cli(capsys, '--threads', '4', *argv)
    assert single[0] == 0
    data = json.loads(single[1])
    assert data['result']['counts'][0] == 6 ** 4
    assert len(data['result']['ceilings']) == 3
    assert single == threaded


def test_cli_stratify_without_ceilings(capsys):
    code, out = run_cli(capsys, 'stratify', '--standard', '2', '1', '-q', '5',
                        '-F', 'x1 + 2*x2', '-r', '1', '-k', '3,2', '--csv')
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "j,threshold,count,ceiling,ratio"
    assert lines[1].endswith(",36,,")


def test_cli_output_file(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code = cli.main(['--no-cache', 'delta', '-n', '2', '-d', '1', '--kappa',
                     '1/50', '--csv', '-o', str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert target.read_text().startswith("n,d,kappa,r,delta,delta_value\n")


def test_config():
    assert config.threads == 1

    config.threads = 2
    assert config.threads == 2

    with config(threads=3):
        assert config.threads == 3
    assert config.threads == 2

    with pytest.raises(ValueError):
        config.threads = 0

    with pytest.raises(ValueError):
        with config(admissibility_method="guess"):
            assert False

    with pytest.raises(AttributeError):
        config.invalid = "somevalue"

    @config(enumeration_budget=5)
    def somefunc():
        assert config.enumeration_budget == 5

    somefunc()
    assert config.enumeration_budget == 10 ** 9

    config.threads = 1


def test_config_multithreading():
    config.threads = 4

    def f():
        assert config.threads == 1
        config.threads = 2
        assert config.threads == 2

    thread = threading.Thread(target=f)
    thread.start()
    thread.join()
    assert config.threads == 4
    config.threads = 1
