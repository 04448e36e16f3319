"""The exponent calculus of the Burgess bound for mixed sums.

Everything here is exact: exponents are :class:`fractions.Fraction` and
only turn into floats for output. For ``n >= 2`` variables, ``r`` and a
system of weight ``M``:

- ``Theta = (r - 1) // (n - 1)``;
- the sum over a box of side ``H`` is ``<< H^a q^(b + eps)`` with
  ``a = n - (n+1)/(2r)`` and ``b = (n(Theta - M) + 1)/(4r(Theta - M))``,
  valid for ``Theta > M`` and ``H < q^(1/2 + 1/(4(Theta - M)))``;
- that beats the trivial ``H^n`` once ``H = q^beta`` with
  ``beta > 1/2 - (Theta - M - 1)/(2(Theta - M)(n + 1))``, always above
  ``beta_n = 1/2 - 1/(2(n + 1))``.

Implied constants are set to one; numeric bounds are shapes, not
certificates.

>>> nontrivial_threshold(2, 1, 5)
Fraction(5, 12)
>>> delta_savings(2, 1, 0.02)
Savings(delta=Fraction(17, 23800), r=17, theta=16, kappa=Fraction(1, 50))
"""

import logging
import math
import typing as t

from fractions import Fraction

from burgess.systems import (
    MonomialSystem,
    is_tdi,
    ppw_regime,
    standard_closed_forms,
)
from burgess.util import Rational, fraction_text, round_half_up, to_fraction

__all__ = ('CalcError', 'DimensionTooSmall', 'InvalidRange', 'EmptyWindow',
           'KappaTooLarge', 'HypothesisViolated', 'NotTDI',
           'ExponentReport', 'PWindow', 'Savings', 'SavingsProfile',
           'BoundShape', 'theta', 'beta_n', 'exponent_report',
           'nontrivial_threshold', 'p_window', 'delta_savings',
           'savings_profile', 'savings_exponent', 'prop_bound_rhs',
           'stratified_sum_bound', 'tdi_theorem_report')

log = logging.getLogger(__name__)


class CalcError(ValueError):
    pass


class DimensionTooSmall(CalcError):
    pass


class InvalidRange(CalcError):
    """``Theta`` does not exceed the weight (or savings parameter)."""


class EmptyWindow(CalcError):
    pass


class KappaTooLarge(InvalidRange):
    pass


class HypothesisViolated(CalcError):
    """Carries the names of the failed conditions in ``conditions``."""

    def __init__(self, conditions: t.List[str]) -> None:
        super().__init__("Failed: {}".format(", ".join(conditions)))
        self.conditions = conditions


class NotTDI(CalcError):
    pass


def theta(n: int, r: int, one_dimensional: bool = False) -> int:
    """``(r - 1) // (n - 1)``.

    With ``one_dimensional`` set, ``n = 1`` gives ``r``.

    >>> theta(3, 7), theta(2, 5), theta(2, 1)
    (3, 4, 0)
    """
    if r < 1:
        raise ValueError("r must be positive")
    if n == 1 and one_dimensional:
        return r
    if n < 2:
        raise DimensionTooSmall("Theta needs n >= 2, got {}".format(n))
    return (r - 1) // (n - 1)


def beta_n(n: int) -> Fraction:
    """``1/2 - 1/(2(n+1))``, the limit of the nontriviality threshold."""
    return Fraction(1, 2) - Fraction(1, 2 * (n + 1))


def _rational(value: t.Optional[Fraction]) -> t.Any:
    if value is None:
        return None
    return {'exact': fraction_text(value), 'value': float(value)}


class ExponentReport(t.NamedTuple):
    """Exponents of the bound for given ``n``, ``r`` and system.

    Fields that need ``Theta > M`` are ``None`` otherwise. ``reasons``
    lists the failed validity conditions.
    """
    n: int
    d: int
    r: int
    theta: int
    M: int
    R: int
    valid: bool
    reasons: t.Tuple[str, ...]
    H_exp_cap: t.Optional[Fraction]
    bound: t.Tuple[Fraction, t.Optional[Fraction]]
    beta_threshold: t.Optional[Fraction]
    beta_n: Fraction
    epsilon: Fraction
    conjectural: bool
    system: str

    def as_dict(self) -> t.Dict[str, t.Any]:
        a, b = self.bound
        return {
            'n': self.n,
            'd': self.d,
            'r': self.r,
            'theta': self.theta,
            'M': self.M,
            'R': self.R,
            'valid': self.valid,
            'reasons': list(self.reasons),
            'H_exp_cap': _rational(self.H_exp_cap),
            'bound_H_exponent': _rational(a),
            'bound_q_exponent': _rational(b),
            'beta_threshold': _rational(self.beta_threshold),
            'beta_n': _rational(self.beta_n),
            'epsilon': _rational(self.epsilon),
            'conjectural': self.conjectural,
            'system': self.system,
            'note': 'implied constants set to 1; shape only',
        }

    def table(self) -> str:
        """A two-column text rendering."""
        def show(value: t.Optional[Fraction]) -> str:
            if value is None:
                return "-"
            return "{} ({:.6g})".format(fraction_text(value), float(value))

        a, b = self.bound
        rows = [
            ("system", self.system),
            ("n, d, r", "{}, {}, {}".format(self.n, self.d, self.r)),
            ("Theta", str(self.theta)),
            ("M, R", "{}, {}".format(self.M, self.R)),
            ("valid", "yes" if self.valid else
             "no ({})".format("; ".join(self.reasons))),
            ("H exponent cap", show(self.H_exp_cap)),
            ("bound H^a", show(a)),
            ("bound q^b", show(b)),
            ("threshold", show(self.beta_threshold)),
            ("beta_n", show(self.beta_n)),
        ]
        if self.conjectural:
            rows.append(("mode", "conjectural Theta"))
        width = max(len(k) for k, _ in rows)
        return "\n".join("{}  {}".format(k.ljust(width), v) for k, v in rows)


def _report(
    n: int,
    d: int,
    r: int,
    M: int,
    R: int,
    big_theta: int,
    range_reasons: t.List[str],
    epsilon: Fraction,
    conjectural: bool,
    system: str,
) -> ExponentReport:
    reasons = list(range_reasons)
    gap = big_theta - M
    a = n - Fraction(n + 1, 2 * r)
    cap = b = threshold = None  # type: t.Optional[Fraction]
    if gap > 0:
        cap = Fraction(1, 2) + Fraction(1, 4 * gap)
        b = Fraction(n * gap + 1, 4 * r * gap) + epsilon
        threshold = (Fraction(1, 2)
                     - Fraction(gap - 1, 2 * gap * (n + 1)))
    else:
        reasons.insert(0, "Theta = {} <= M = {}".format(big_theta, M))
    return ExponentReport(
        n, d, r, big_theta, M, R, not reasons, tuple(reasons), cap, (a, b),
        threshold, beta_n(n), epsilon, conjectural, system,
    )


def _r_range(n: int, r: int, M: int) -> t.List[str]:
    floor = M + 1 if n == 2 else (M + 1) * (n - 1) + 1
    if r > floor:
        return []
    return ["r = {} <= {}".format(r, floor)]


def exponent_report(
    n: int,
    d: int,
    r: int,
    epsilon: Rational = 0,
    alpha: t.Optional[Rational] = None,
) -> ExponentReport:
    """Exponents for the standard system of degree ``d``.

    :param epsilon: Added to the ``q`` exponent of the bound.
    :param alpha: Use the conjectural ``Theta = floor(r / alpha)`` with
                  ``1 <= alpha <= n - 1``; the report is marked as such.
    """
    if d < 1 or r < 1:
        raise ValueError("Need d >= 1 and r >= 1")
    R, M = standard_closed_forms(n, d)
    if alpha is None:
        big_theta = theta(n, r)
    else:
        alpha = to_fraction(alpha)
        if not 1 <= alpha <= n - 1:
            raise ValueError("alpha must lie in [1, n - 1]")
        big_theta = math.floor(r / alpha)
    return _report(n, d, r, M, R, big_theta, _r_range(n, r, M),
                   to_fraction(epsilon), alpha is not None,
                   "standard({},{})".format(n, d))


def nontrivial_threshold(n: int, d: int, r: int) -> Fraction:
    """The least ``beta`` for which the bound improves on ``H^n``.

    >>> float(nontrivial_threshold(3, 1, 100))  # doctest: +ELLIPSIS
    0.3777...
    """
    report = exponent_report(n, d, r)
    if report.beta_threshold is None:
        raise InvalidRange("Theta = {} does not exceed M = {}"
                           .format(report.theta, report.M))
    return report.beta_threshold


def tdi_theorem_report(
    G: MonomialSystem, n: int, r: int
) -> ExponentReport:
    """:func:`exponent_report` with the weight and rank of ``G``.

    Standard systems use the usual range for ``r``; ACK systems only need
    ``Theta > M``; any other system also needs ``r > R(d + 1)``.
    """
    if n != G.n:
        raise ValueError("G has {} variables, not {}".format(G.n, n))
    certificate = is_tdi(G)
    if not certificate:
        raise NotTDI("{} is not translation-dilation invariant: {}"
                     .format(G.descriptor(), certificate.certificate))
    big_theta = theta(n, r)
    if G.kind == 'standard':
        reasons = _r_range(n, r, G.M)
    elif G.kind == 'ack':
        reasons = []
    else:
        reasons = ([] if ppw_regime(G, r) else
                   ["r = {} <= R(d + 1) = {}".format(r, G.R * (G.d + 1))])
    return _report(n, G.d, r, G.M, G.R, big_theta, reasons, Fraction(0),
                   False, G.descriptor())


class PWindow(t.NamedTuple):
    """``lower <= P < upper`` plus the two side conditions at ``upper``."""
    lower: float
    upper: float
    hp_below_q: bool
    p_below_cap: bool
    theta: int
    mu: int

    def as_dict(self) -> t.Dict[str, t.Any]:
        return dict(self._asdict())


def p_window(
    n: int,
    d: int,
    r: int,
    q: int,
    H: t.Optional[float] = None,
    beta: t.Optional[Rational] = None,
    mu: t.Optional[int] = None,
) -> PWindow:
    """The range ``U/2 <= P < U`` with ``U = H q^(-1/(2(Theta - mu)))``.

    Give either ``H`` or ``H = q^beta``; an exact ``beta`` makes the range
    check exact. ``mu`` defaults to the weight ``M``.
    """
    if (H is None) == (beta is None):
        raise ValueError("Give exactly one of H and beta")
    _, M = standard_closed_forms(n, d)
    big_theta = theta(n, r)
    if mu is None:
        mu = M
    gap = big_theta - mu
    if gap <= 0:
        raise EmptyWindow("Theta = {} does not exceed mu = {}"
                          .format(big_theta, mu))
    cap = Fraction(1, 2) + Fraction(1, 4 * gap)
    if beta is not None:
        beta = to_fraction(beta)
        inside = beta < cap
        log_h = float(beta) * math.log(q)
    else:
        assert H is not None
        if H <= 0:
            raise EmptyWindow("H must be positive")
        log_h = math.log(H)
        inside = log_h < float(cap) * math.log(q)
    if not inside:
        raise EmptyWindow("H must stay below q^{}".format(fraction_text(cap)))
    log_upper = log_h - math.log(q) / (2 * gap)
    upper = math.exp(log_upper)
    return PWindow(
        lower=upper / 2,
        upper=upper,
        hp_below_q=log_h + log_upper < math.log(q),
        p_below_cap=log_upper <= log_h - math.log(q) / (2 * big_theta),
        theta=big_theta,
        mu=mu,
    )


class Savings(t.NamedTuple):
    delta: Fraction
    r: int
    theta: int
    kappa: Fraction


def _delta(n: int, M: int, kappa: Fraction, r: int) -> t.Optional[Fraction]:
    gap = theta(n, r) - M
    if gap <= 0:
        return None
    return (2 * kappa * (n + 1) * gap - 1) / (4 * r * gap)


def delta_savings(
    n: int,
    d: int,
    kappa: Rational,
    r: t.Optional[int] = None,
    strategy: str = "heuristic",
) -> Savings:
    """The saving ``delta`` in ``H^n q^-delta`` at ``H = q^(beta_n+kappa)``.

    Without ``r``, the ``"heuristic"`` strategy takes the integer nearest
    ``(n-1)/((n+1) kappa)`` and ``"optimal"`` the smallest ``r`` maximizing
    ``delta`` exactly.
    """
    kappa = to_fraction(kappa)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    _, M = standard_closed_forms(n, d)
    if r is None:
        if strategy == "heuristic":
            r = round_half_up(Fraction(n - 1, n + 1) / kappa)
        elif strategy == "optimal":
            r = _optimal_r(n, M, kappa)
        else:
            raise ValueError("Unknown strategy {!r}".format(strategy))
        if r < 1 or theta(n, r) <= M:
            raise KappaTooLarge(
                "r = {} leaves Theta <= M = {}; kappa {} is too large"
                .format(r, M, fraction_text(kappa))
            )
    value = _delta(n, M, kappa, r)
    if value is None:
        raise InvalidRange("Theta = {} does not exceed M = {}"
                           .format(theta(n, r), M))
    return Savings(value, r, theta(n, r), kappa)


def _optimal_r(n: int, M: int, kappa: Fraction) -> int:
    # delta(r) < kappa (n + 1) / (2r), which bounds the search
    r = (M + 1) * (n - 1) + 1
    best_r, best = r, _delta(n, M, kappa, r)
    assert best is not None
    while best <= 0 or kappa * (n + 1) / (2 * r) > best:
        r += 1
        value = _delta(n, M, kappa, r)
        assert value is not None
        if value > best:
            best_r, best = r, value
    log.debug("Optimal r = %d for kappa = %s", best_r, kappa)
    return best_r


class SavingsProfile(t.NamedTuple):
    """``f(r) = (b r - c) / (r (r - d))`` and its continuous maximizer."""
    b: Fraction
    c: Fraction
    d: int
    argmax: float


def savings_profile(n: int, d: int, kappa: Rational) -> SavingsProfile:
    """The savings as a rational function of ``r``.

    Treating ``Theta - M`` as ``(r - d')/(n - 1)`` with
    ``d' = M(n - 1) + 1`` turns ``delta`` into ``f(r)``; for ``n = 2`` the
    two agree at every integer ``r``.
    """
    kappa = to_fraction(kappa)
    _, M = standard_closed_forms(n, d)
    b = kappa * (n + 1) / 2
    shift = M * (n - 1) + 1
    c = shift * b + Fraction(n - 1, 4)
    argmax = (float(c) + math.sqrt(float(c * c - shift * b * c))) / float(b)
    return SavingsProfile(b, c, shift, argmax)


def savings_exponent(n: int, d: int, r: int, mu: int) -> Fraction:
    """The ``q`` exponent with savings parameter ``mu``.

    At ``mu = M`` it is the ``b`` of :func:`exponent_report`.

    >>> savings_exponent(2, 1, 5, 2), savings_exponent(2, 1, 5, 1)
    (Fraction(1, 8), Fraction(2, 15))
    """
    _, M = standard_closed_forms(n, d)
    gap = theta(n, r) - mu
    if gap <= 0:
        raise InvalidRange("Theta must exceed mu = {}".format(mu))
    return Fraction(n * gap + M + 1 - mu, 4 * r * gap)


class BoundShape(t.NamedTuple):
    """A bound ``main + secondary`` held as natural logarithms."""
    log_main: float
    log_secondary: float

    @property
    def log_total(self) -> float:
        top = max(self.log_main, self.log_secondary)
        return top + math.log(math.exp(self.log_main - top)
                              + math.exp(self.log_secondary - top))

    @property
    def total(self) -> float:
        return math.exp(self.log_total)

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'log_main': self.log_main,
            'log_secondary': self.log_secondary,
            'log_total': self.log_total,
            'note': 'implied constant set to 1; shape only',
        }


def _log(value: t.Any) -> float:
    return math.log(value)


def prop_bound_rhs(
    n: int,
    G: MonomialSystem,
    r: int,
    H: float,
    P: float,
    q: int,
    J_value: t.Any,
) -> BoundShape:
    """The bound on the supremum over phases and sub-boxes.

    ``(H/P)^(M/2r) H^(-n/2r) P^(n - 1/2r) q^(n/4r) (log q)^(n+1)`` times
    ``J^(1/2r)`` (main) plus ``q^(1/4r) (H/P)^(n - Theta/2r)`` (secondary),
    where ``J = J_r(G, 2H/P)``.
    """
    failed = []
    big_theta = theta(n, r)
    if r < n:
        failed.append("r >= n")
    if P > H:
        failed.append("P <= H")
    if H * P >= q:
        failed.append("HP < q")
    if big_theta < 1 or _log(P) > _log(H) - _log(q) / (2 * big_theta):
        failed.append("P <= H q^(-1/(2 Theta))")
    if failed:
        raise HypothesisViolated(failed)
    log_h, log_p, log_q = _log(H), _log(P), _log(q)
    prefactor = ((log_h - log_p) * G.M / (2 * r)
                 - log_h * n / (2 * r)
                 + log_p * (n - 1 / (2 * r))
                 + log_q * n / (4 * r)
                 + (n + 1) * math.log(log_q))
    main = _log(J_value) / (2 * r)
    secondary = log_q / (4 * r) + (log_h - log_p) * (n - big_theta / (2 * r))
    return BoundShape(prefactor + main, prefactor + secondary)


def stratified_sum_bound(
    n: int, M: int, r: int, K: int, q: int, J_value: t.Any
) -> BoundShape:
    """``Q^M J q^(n/2)`` (main) plus ``Q^M K^(2nr - Theta) q^((n+1)/2)``.

    ``Q = ceil(2rK)``; requires ``q^(1/2) K^(-Theta) <= 1``.
    """
    big_theta = theta(n, r)
    failed = []
    if r < n:
        failed.append("r >= n")
    if 0.5 * _log(q) - big_theta * _log(K) > 1e-12:
        failed.append("q^(1/2) K^(-Theta) <= 1")
    if failed:
        raise HypothesisViolated(failed)
    log_scale = M * _log(math.ceil(2 * r * K))
    main = log_scale + _log(J_value) + n / 2 * _log(q)
    secondary = (log_scale + (2 * n * r - big_theta) * _log(K)
                 + (n + 1) / 2 * _log(q))
    return BoundShape(main, secondary)
