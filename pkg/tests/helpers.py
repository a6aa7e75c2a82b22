"""Shared test machinery: a probed run loop and the exact round bound of
the budget algorithm's guarantee."""

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from roundquery.solving import instance_solved


def step_run(alg, instance, oracle, probe=None, max_rounds=None):
    """Run loop mirroring the harness but exposing each round to a probe.

    probe(round_index, knowledge_before, picked_ids) runs before the round
    is answered; returns (rounds, knowledge) at solvedness.
    """
    knowledge = instance.knowledge()
    limit = max_rounds if max_rounds is not None else 4 * instance.n + 8
    rounds = []
    while not instance_solved(instance, knowledge):
        assert len(rounds) < limit, "run does not terminate"
        picked = list(alg.next_round(instance, knowledge))
        assert picked, "empty round while unsolved"
        assert len(picked) <= instance.k
        if probe is not None:
            probe(len(rounds) + 1, knowledge, picked)
        answers = oracle.answer_round(picked)
        for e in picked:
            knowledge.reveal(e, answers[e])
        rounds.append(tuple(picked))
    return rounds, knowledge


@lru_cache(maxsize=None)
def budget_round_bound(opt_k: int, m: int) -> Fraction:
    """Certified lower estimate of the budget algorithm's round guarantee,
    minimized over the epsilon grid 0.1 .. 0.9.

    bound(eps) = (2 + eps) * opt_k + (5/eps) * ceil(log_{r/(r-1)} m) with
    r = (2(1+eps) + sqrt(2 eps^2 + 4 eps + 4)) / eps.  The square root is
    bracketed in exact rationals and the smaller ceil is used, so any run
    satisfying the returned value satisfies the true bound as well.
    """
    best = None
    scale = 10**30
    for num in range(1, 10):
        eps = Fraction(num, 10)
        s = 2 * eps * eps + 4 * eps + 4
        root = isqrt(s.numerator * scale * scale // s.denominator)
        r_lo = (2 * (1 + eps) + Fraction(root, scale)) / eps
        # the log term shrinks as the base grows; the largest admissible
        # base comes from the smallest r
        base_hi = r_lo / (r_lo - 1)
        t = 0
        power = Fraction(1)
        while power < m:
            power *= base_hi
            t += 1
        bound = (2 + eps) * opt_k + Fraction(5) / eps * t
        if best is None or bound < best:
            best = bound
    return best
