"""Adapters between the k-per-round model and the bounded-batch model,
plus the W / W^{-1} helpers used in the analysis.

A batch algorithm may ask arbitrarily many queries per batch but only a
fixed number r of batches; the adapters split batches into rounds of k and
conversely schedule a round algorithm at growing k values.  W^{-1} is the
one deliberately floating-point computation in the package: it feeds
reports, never the control flow of the exact algorithms.
"""

from __future__ import annotations

import math
from dataclasses import replace
from fractions import Fraction
from typing import Callable, List

from .algorithms import AlgorithmError, build_dependency_graph, min_vertex_cover
from .instances import Instance, SORTING
from .intervals import KnowledgeState


class QueryAllBatch:
    """Non-adaptive single batch: everything still uncertain."""

    batches = 1

    def next_batch(self, instance: Instance, knowledge: KnowledgeState) -> List[int]:
        return sorted(knowledge.unqueried_nontrivial(instance.ids()))


class TwoBatchSorting:
    """Matching batch, then the intervals pinned by the revealed points.

    Batch one queries the matched vertices of a greedy maximal matching of
    the dependency graph; batch two queries every remaining interval that
    strictly contains a known co-set point.  No third batch can be needed:
    values revealed in batch two cannot land strictly inside an interval
    that was independent of everything queried before.
    """

    batches = 2

    def __init__(self) -> None:
        self._stage = 0

    def next_batch(self, instance: Instance, knowledge: KnowledgeState) -> List[int]:
        if instance.problem.kind is not SORTING:
            raise AlgorithmError("two-batch algorithm handles sorting instances only")
        self._stage += 1
        if self._stage == 1:
            graph = build_dependency_graph(instance, knowledge)
            return sorted(min_vertex_cover(graph, "matching-2approx"))
        forced = set()
        for members in instance.family:
            points = [
                knowledge.known_value(e) for e in members if knowledge.known_value(e) is not None
            ]
            for e in members:
                if knowledge.known_value(e) is not None:
                    continue
                iv = knowledge.original(e)
                if any(iv.strict_interior(p) for p in points):
                    forced.add(e)
        if self._stage > 2 and forced:
            raise AlgorithmError("two-batch sorting required a third batch")
        return sorted(forced)


class BatchesToRounds:
    """Round algorithm that replays a batch algorithm in chunks of k.

    The wrapped algorithm is consulted only at batch boundaries, so its
    query multiset is preserved exactly; an alpha-competitive r-batch
    algorithm yields at most alpha*opt_k + r - 1 rounds.
    """

    def __init__(self, batch_alg) -> None:
        self.batch_alg = batch_alg
        self.batches_used = 0
        self._queue: List[int] = []

    def next_round(self, instance: Instance, knowledge: KnowledgeState) -> List[int]:
        self._queue = [e for e in self._queue if not knowledge.is_revealed(e)]
        if not self._queue:
            batch = list(self.batch_alg.next_batch(instance, knowledge))
            if not batch:
                return []
            self.batches_used += 1
            self._queue = batch
        chunk = self._queue[: instance.k]
        del self._queue[: instance.k]
        return chunk


def batches_to_rounds(batch_alg) -> BatchesToRounds:
    return BatchesToRounds(batch_alg)


def _ceil_pow(n: int, num: int, den: int) -> int:
    """ceil(n ** (num/den)) in exact integer arithmetic."""
    if num == 0 or n <= 1:
        return 1
    target = n**num
    root = round(target ** (1.0 / den))
    while root**den > target:
        root -= 1
    while (root + 1) ** den <= target:
        root += 1
    return root if root**den == target else root + 1


class RoundsToBatches:
    """Batch algorithm running a round algorithm at geometrically growing k.

    With r = floor(alpha)*x + 1 batches available, sequence i runs the
    wrapped algorithm for floor(alpha) rounds at k = ceil(n^{(i-1)/x});
    one final batch queries everything left.  Non-integer powers round up:
    a larger round only strengthens a batch.
    """

    def __init__(self, make_round_alg: Callable[[Instance], object], alpha: Fraction, r: int, n: int):
        self.floor_alpha = int(alpha)
        if self.floor_alpha < 1:
            raise AlgorithmError("alpha must be at least 1")
        self.x = (r - 1) // self.floor_alpha
        if self.x < 1:
            raise AlgorithmError("need r >= floor(alpha) + 1 batches")
        self.make_round_alg = make_round_alg
        self.n = n
        self.batches = r
        self.batches_used = 0
        self._seq = 1
        self._round_in_seq = 0
        self._alg = None
        self.k_schedule = [_ceil_pow(n, i - 1, self.x) for i in range(1, self.x + 1)]

    def next_batch(self, instance: Instance, knowledge: KnowledgeState) -> List[int]:
        while self._seq <= self.x:
            k_i = self.k_schedule[self._seq - 1]
            sized = replace(instance, k=k_i)
            if self._round_in_seq == 0:
                self._alg = self.make_round_alg(sized)
            batch = list(self._alg.next_round(sized, knowledge))
            self._round_in_seq += 1
            if self._round_in_seq >= self.floor_alpha:
                self._seq += 1
                self._round_in_seq = 0
            if batch:
                self.batches_used += 1
                return batch
        leftover = sorted(knowledge.unqueried_nontrivial(instance.ids()))
        if leftover:
            self.batches_used += 1
        return leftover


def rounds_to_batches(
    make_round_alg: Callable[[Instance], object], alpha: Fraction, r: int, n: int
) -> RoundsToBatches:
    return RoundsToBatches(make_round_alg, alpha, r, n)


# ---------------------------------------------------------------------------
# W and its inverse


def w(x: float) -> float:
    """W(x) = x * lg(x)."""
    if x <= 0:
        raise ValueError("W is used on the positive axis only")
    return x * math.log2(x)


def w_inverse(x: float, tol: float = 1e-9) -> float:
    """Inverse of W on its increasing branch (y >= 1), by bisection."""
    if x < 0:
        raise ValueError("w_inverse needs x >= 0 on the increasing branch")
    if x == 0:
        return 1.0
    lo, hi = 1.0, 2.0
    while w(hi) < x:
        hi *= 2
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if w(mid) < x:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
