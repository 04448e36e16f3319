"""A sampled lower estimate of the supremum of mixed sums.

The quantity of interest is the supremum of ``|S(F, g; N, K)|`` over all
phases ``g`` spanned by a monomial system and all sub-boxes ``K <= H``.
:func:`sample_T` draws phases and sub-boxes from a seeded
``numpy.random.Generator(PCG64(seed))`` and reports the largest value
seen. The first sample is always ``g = 0`` on the full box.
"""

import logging
import math
import typing as t

import numpy as np

import burgess

from burgess.charsums import BoxRegion, mixed_sum
from burgess.ff_core import DirichletCharacter
from burgess.polyalg import MultiPoly, RR
from burgess.systems import MonomialSystem
from burgess.util import check_budget, to_fraction

__all__ = ('Probe', 'TEstimate', 'sample_T')

log = logging.getLogger(__name__)


class Probe(t.NamedTuple):
    """An explicitly supplied phase and sub-box."""
    g: MultiPoly
    K: t.Tuple[int, ...]


class TEstimate(t.NamedTuple):
    """``estimate`` is a lower bound for the supremum, not its value.

    ``history[i]`` is the running maximum after ``i + 1`` samples.
    """
    estimate: float
    samples: int
    seed: int
    history: t.List[float]
    best_g: str
    best_K: t.Tuple[int, ...]
    probes: t.List[float]

    def as_dict(self) -> t.Dict[str, t.Any]:
        return {
            'estimate': self.estimate,
            'samples': self.samples,
            'seed': self.seed,
            'history': list(self.history),
            'best_g': self.best_g,
            'best_K': list(self.best_K),
            'probes': list(self.probes),
            'kind': 'sampled lower estimate',
        }


def _random_phase(
    rng: np.random.Generator, G: MonomialSystem
) -> MultiPoly:
    coeffs = rng.random(G.R + 1)
    terms = [((0,) * G.n, to_fraction(float(coeffs[0])))]
    terms.extend(
        (beta, to_fraction(float(c)))
        for beta, c in zip(G.exponents, coeffs[1:])
    )
    return MultiPoly(G.n, terms, RR)


def sample_T(
    F: MultiPoly,
    G: MonomialSystem,
    chi: DirichletCharacter,
    box: BoxRegion,
    samples: int,
    seed: int,
    probes: t.Sequence[Probe] = (),
) -> TEstimate:
    """Largest ``|mixed_sum|`` over ``samples`` random phases and sub-boxes.

    Every probe is evaluated too and counts towards the estimate.
    """
    if samples < 1:
        raise ValueError("Need at least one sample")
    if not F.n == G.n == box.n:
        raise ValueError("F, G and the box differ in dimension")
    check_budget("T samples", (samples + len(probes)) * box.size(),
                 burgess.config.enumeration_budget)
    rng = np.random.Generator(np.random.PCG64(seed))
    best = -math.inf
    best_g, best_K = MultiPoly(G.n, (), RR), box.H
    history = []
    for i in range(samples):
        if i == 0:
            g, sides = MultiPoly(G.n, (), RR), box.H
        else:
            g = _random_phase(rng, G)
            sides = tuple(int(rng.integers(1, h + 1)) for h in box.H)
        value = abs(mixed_sum(F, g, chi, BoxRegion(box.N, sides)))
        if value > best:
            best, best_g, best_K = value, g, sides
        history.append(best)
    probe_values = []
    for probe in probes:
        if len(probe.K) != box.n or any(
            not 1 <= k <= h for k, h in zip(probe.K, box.H)
        ):
            raise ValueError("Probe box {} is not inside {}"
                             .format(probe.K, box.H))
        value = abs(mixed_sum(F, probe.g, chi, BoxRegion(box.N, probe.K)))
        probe_values.append(value)
        if value > best:
            best, best_g, best_K = value, probe.g, probe.K
    log.info("T estimate %.6g after %d samples", best, samples)
    return TEstimate(best, samples, seed, history, str(best_g), best_K,
                     probe_values)
