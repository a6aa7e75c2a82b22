"""Query-answering oracles: fixed realizations and the adaptive adversaries.

Every oracle answers a whole round at once (it may inspect how the round's
queries are distributed before committing any value) and can finalize into
a realization that agrees with everything it has answered, assigning
admissible values to the elements never queried.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .instances import (
    Instance,
    InstanceError,
    MINIMUM,
    ProblemKind,
    Realization,
    SELECTION_FULL,
    SELECTION_VALUE,
    SORTING,
    make_instance,
)
from .intervals import UncertainInterval


class OracleError(RuntimeError):
    """Oracle asked to behave inconsistently."""


class ValueOracle:
    """Round-batched answering with a committed-value log.

    Subclasses implement `_commit_fresh`, which must store a value for
    every not-yet-committed id of the round; repeated queries always see
    the first committed value.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.round_log: List[Tuple[Tuple[int, ...], Dict[int, Fraction]]] = []
        self.committed: Dict[int, Fraction] = {}

    def answer_round(self, ids: Sequence[int]) -> Dict[int, Fraction]:
        ids = tuple(ids)
        fresh = [e for e in ids if e not in self.committed]
        self._commit_fresh(fresh)
        answers = {}
        for e in ids:
            if e not in self.committed:
                raise OracleError(f"no value committed for element {e}")
            v = self.committed[e]
            if not self.instance.interval(e).contains(v):
                raise OracleError(f"committed value {v} outside interval of element {e}")
            answers[e] = v
        self.round_log.append((ids, answers))
        return answers

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        raise NotImplementedError

    def finalize(self) -> Realization:
        raise NotImplementedError

    def check_finalize(self) -> Realization:
        """Finalize and re-verify agreement with every logged answer."""
        realization = self.finalize()
        realization.validate(self.instance)
        for ids, answers in self.round_log:
            for e in ids:
                if realization.value(e) != answers[e]:
                    raise OracleError(f"finalize contradicts logged answer for element {e}")
        return realization


class FixedOracle(ValueOracle):
    def __init__(self, instance: Instance, realization: Realization):
        super().__init__(instance)
        realization.validate(instance)
        self.realization = realization

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        for e in ids:
            self.committed[e] = self.realization.value(e)

    def finalize(self) -> Realization:
        return self.realization


def fixed_oracle(instance: Instance, realization: Realization) -> FixedOracle:
    return FixedOracle(instance, realization)


# ---------------------------------------------------------------------------
# sorting: pairs of dependent intervals


class SortingPairAdversary(ValueOracle):
    """k*c copies of two dependent intervals within one sorting problem.

    Whichever element of a pair is queried first answers inside the
    overlap, forcing its partner to be queried as well; the partner then
    answers outside the overlap, so a single (second) query per pair would
    have sufficed.  Querying both halves of a pair in the same round earns
    the both-inside configuration instead, which also needs both queries
    from the optimum.
    """

    def __init__(self, c: int, k: int):
        if c < 1 or k < 1:
            raise InstanceError("need c >= 1 and k >= 1")
        elements = []
        for p in range(c * k):
            base = Fraction(4 * p)
            elements.append(UncertainInterval.closed(base, base + 2))
            elements.append(UncertainInterval.closed(base + 1, base + 3))
        instance = make_instance(
            elements, [list(range(1, 2 * c * k + 1))], ProblemKind(SORTING), k
        )
        super().__init__(instance)
        self.pairs = c * k

    @staticmethod
    def _pair(eid: int) -> Tuple[int, int, bool]:
        p = (eid - 1) // 2
        return p, (eid - 1) % 2, eid % 2 == 1  # pair index, side, is_left

    def _inside(self, eid: int) -> Fraction:
        p, side, _ = self._pair(eid)
        return Fraction(4 * p) + Fraction(17, 12) + side * Fraction(2, 12)

    def _outside(self, eid: int) -> Fraction:
        p, _, is_left = self._pair(eid)
        base = Fraction(4 * p)
        return base + Fraction(1, 2) if is_left else base + Fraction(5, 2)

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        fresh = set(ids)
        for e in sorted(fresh):
            partner = e + 1 if e % 2 == 1 else e - 1
            if partner in fresh:
                self.committed[e] = self._inside(e)  # both halves this round
            elif partner in self.committed:
                self.committed[e] = self._outside(e)
            else:
                self.committed[e] = self._inside(e)

    def finalize(self) -> Realization:
        values = dict(self.committed)
        for p in range(self.pairs):
            left, right = 2 * p + 1, 2 * p + 2
            if left not in values and right not in values:
                values[left] = self._outside(left)
                values[right] = self._outside(right)
            elif left not in values:
                values[left] = self._outside(left)
            elif right not in values:
                values[right] = self._outside(right)
        return Realization(values)


def sorting_pair_adversary(c: int, k: int) -> Tuple[Instance, SortingPairAdversary]:
    oracle = SortingPairAdversary(c, k)
    return oracle.instance, oracle


# ---------------------------------------------------------------------------
# minimum: disjoint-set lower bounds


class _PrefixSetAdversary(ValueOracle):
    """Shared machinery for the disjoint-set minimum adversaries.

    Every set carries the same ladder of open intervals (1 + i*eps,
    100 + i*eps); answers are "high" until the adversary decides to solve a
    set, which pins the minimum at the leftmost position queried in the
    current round (one query of that round would have sufficed).
    """

    def __init__(self, instance: Instance, eps: Fraction, per_set: int):
        super().__init__(instance)
        self.eps = eps
        self.per_set = per_set
        self.active = set(range(instance.m))
        self.members: List[List[int]] = [sorted(s) for s in instance.family]
        self.set_of: Dict[int, int] = {}
        for idx, members in enumerate(self.members):
            for e in members:
                self.set_of[e] = idx
        self.rounds_seen = 0
        self.decision_log: List[str] = []

    def _position(self, eid: int) -> int:
        idx = self.set_of[eid]
        return self.members[idx].index(eid) + 1

    def _high(self, eid: int) -> Fraction:
        i = self._position(eid)
        return 100 + (2 * i - 1) * self.eps / 2

    def _min_at(self, position: int) -> Fraction:
        return 1 + (2 * position + 1) * self.eps / 2

    def _queried_positions(self, set_idx: int) -> set:
        members = self.members[set_idx]
        return {i + 1 for i, e in enumerate(members) if e in self.committed}

    def _solve_set(self, set_idx: int, round_positions: Sequence[int]) -> bool:
        """Re-pin the set's minimum at the leftmost this-round position whose
        prefix is fully queried; returns False if the algorithm left holes."""
        queried = self._queried_positions(set_idx)
        for pos in sorted(round_positions):
            if all(p in queried for p in range(1, pos)):
                eid = self.members[set_idx][pos - 1]
                self.committed[eid] = self._min_at(pos)
                self.active.discard(set_idx)
                return True
        return False

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        self.rounds_seen += 1
        by_set: Dict[int, List[int]] = {}
        for e in ids:
            by_set.setdefault(self.set_of[e], []).append(e)
        # high answers first; a chosen minimum overwrites its own entry
        for e in ids:
            self.committed[e] = self._high(e)
        candidates = {
            idx: sorted(self._position(e) for e in eids)
            for idx, eids in by_set.items()
            if idx in self.active
        }
        self._react(candidates)

    def _react(self, candidates: Dict[int, List[int]]) -> None:
        raise NotImplementedError

    def finalize(self) -> Realization:
        values = dict(self.committed)
        for idx in sorted(self.active):
            members = self.members[idx]
            queried = self._queried_positions(idx)
            pos = next(p for p in range(1, self.per_set + 1) if p not in queried)
            values[members[pos - 1]] = self._min_at(pos)
        for idx, members in enumerate(self.members):
            for e in members:
                if e not in values:
                    values[e] = self._high(e)
        return Realization(values)


def _ladder_instance(m: int, k: int, per_set: int) -> Instance:
    eps = Fraction(1, m)
    elements: List[UncertainInterval] = []
    family: List[List[int]] = []
    next_id = 1
    for _ in range(m):
        members = []
        for i in range(1, per_set + 1):
            elements.append(UncertainInterval.open(1 + i * eps, 100 + i * eps))
            members.append(next_id)
            next_id += 1
        family.append(members)
    return make_instance(elements, family, ProblemKind(MINIMUM), k)


class MinimumWlbAdversary(_PrefixSetAdversary):
    """m = M^M sets, k = M^{M+1}: forces M rounds while opt_k = 1.

    Each round the heaviest-queried active sets are solved until they
    account for (M-1)k/M of the round's queries; at least a 1/M fraction of
    the active sets survives.  Round M solves everything that was queried.
    """

    def __init__(self, M: int, per_set_cap: Optional[int] = None):
        if M < 2:
            raise InstanceError("need M >= 2")
        m = M**M
        k = M ** (M + 1)
        # full ladders have M*k rungs, but a round with a active sets puts at
        # most ceil(k/a) queries into one set and at least a/M sets survive,
        # so k/m * (M^M - 1)/(M - 1) rungs per set are ever reachable; capping
        # there keeps M = 3 at desk scale
        reach = M * (M**M - 1) // (M - 1)
        per_set = per_set_cap if per_set_cap is not None else min(M * k, reach + M)
        super().__init__(_ladder_instance(m, k, per_set), Fraction(1, m), per_set)
        self.M = M
        self.k = k

    def _react(self, candidates: Dict[int, List[int]]) -> None:
        if self.rounds_seen >= self.M:
            for idx, positions in sorted(candidates.items()):
                self._solve_set(idx, positions)
            return
        threshold = Fraction((self.M - 1) * self.k, self.M)
        order = sorted(candidates, key=lambda idx: (-len(candidates[idx]), idx))
        covered = 0
        chosen: List[int] = []
        for idx in order:
            if covered >= threshold:
                break
            chosen.append(idx)
            covered += len(candidates[idx])
        for idx in chosen:
            if self._solve_set(idx, candidates[idx]):
                self.decision_log.append(f"round {self.rounds_seen}: solved set {idx + 1}")


def minimum_wlb_adversary(M: int, per_set_cap: Optional[int] = None) -> Tuple[Instance, MinimumWlbAdversary]:
    oracle = MinimumWlbAdversary(M, per_set_cap)
    return oracle.instance, oracle


class MinimumAdditiveLbAdversary(_PrefixSetAdversary):
    """k = m sets: solving only the heaviest-queried set each round wastes
    at least k*(H(m) - 1) queries for any algorithm."""

    def __init__(self, m: int, per_set_cap: Optional[int] = None):
        if m < 2:
            raise InstanceError("need m >= 2")
        per_set = per_set_cap if per_set_cap is not None else m * m
        super().__init__(_ladder_instance(m, m, per_set), Fraction(1, m), per_set)
        self.m = m

    def _react(self, candidates: Dict[int, List[int]]) -> None:
        if not candidates:
            return
        idx = min(candidates, key=lambda i: (-len(candidates[i]), i))
        if self._solve_set(idx, candidates[idx]):
            self.decision_log.append(f"round {self.rounds_seen}: solved set {idx + 1}")


def minimum_additive_lb_adversary(m: int, per_set_cap: Optional[int] = None) -> Tuple[Instance, MinimumAdditiveLbAdversary]:
    oracle = MinimumAdditiveLbAdversary(m, per_set_cap)
    return oracle.instance, oracle


# ---------------------------------------------------------------------------
# selection lower bounds


class SelectionFullLbAdversary(ValueOracle):
    """i-1 copies of [0,3], i-1 copies of [5,8], one middle interval [2,6].

    The middle value depends on the first round: 4 if the middle was not
    queried there; otherwise 11/2 when more left-side than right-side
    intervals were queried, else 5/2.
    """

    def __init__(self, i: int):
        if i < 2:
            raise InstanceError("need i >= 2")
        elements = (
            [UncertainInterval.closed(0, 3) for _ in range(i - 1)]
            + [UncertainInterval.closed(2, 6)]
            + [UncertainInterval.closed(5, 8) for _ in range(i - 1)]
        )
        instance = make_instance(
            elements,
            [list(range(1, 2 * i))],
            ProblemKind(SELECTION_FULL, rank=i),
            i,
        )
        super().__init__(instance)
        self.i = i
        self.middle = i
        self.middle_value: Optional[Fraction] = None

    def _decide_middle(self, first_round: Sequence[int]) -> None:
        if self.middle not in first_round:
            self.middle_value = Fraction(4)
            return
        lefts = sum(1 for e in first_round if e < self.middle)
        rights = sum(1 for e in first_round if e > self.middle)
        self.middle_value = Fraction(11, 2) if lefts > rights else Fraction(5, 2)

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        if self.middle_value is None:
            self._decide_middle(ids)
        for e in ids:
            if e < self.middle:
                self.committed[e] = Fraction(1)
            elif e > self.middle:
                self.committed[e] = Fraction(7)
            else:
                self.committed[e] = self.middle_value

    def finalize(self) -> Realization:
        if self.middle_value is None:
            self.middle_value = Fraction(4)
        values = {}
        for e in self.instance.ids():
            if e < self.middle:
                values[e] = Fraction(1)
            elif e > self.middle:
                values[e] = Fraction(7)
            else:
                values[e] = self.middle_value
        return Realization(values)


def selection_full_lb_adversary(i: int) -> Tuple[Instance, SelectionFullLbAdversary]:
    oracle = SelectionFullLbAdversary(i)
    return oracle.instance, oracle


class SelectionValueLbAdversary(ValueOracle):
    """i copies of (0,5) plus i copies of {3}; rank i.

    The first i-1 wide intervals queried answer 1, the last answers 4, so
    any algorithm needs all i wide queries while a single query (the one
    that answers 4) already pins the i-th smallest value to 3.
    """

    def __init__(self, i: int, k: Optional[int] = None):
        if i < 1:
            raise InstanceError("need i >= 1")
        k = i if k is None else k
        elements = [UncertainInterval.open(0, 5) for _ in range(i)] + [
            UncertainInterval.point(3) for _ in range(i)
        ]
        instance = make_instance(
            elements, [list(range(1, 2 * i + 1))], ProblemKind(SELECTION_VALUE, rank=i), k
        )
        super().__init__(instance)
        self.i = i
        self.wide_answered = 0

    def _commit_fresh(self, ids: Sequence[int]) -> None:
        for e in sorted(ids):
            if e > self.i:
                self.committed[e] = Fraction(3)
                continue
            self.wide_answered += 1
            self.committed[e] = Fraction(4) if self.wide_answered == self.i else Fraction(1)

    def finalize(self) -> Realization:
        values = dict(self.committed)
        unqueried = [e for e in range(1, self.i + 1) if e not in values]
        has_four = any(values.get(e) == 4 for e in range(1, self.i + 1))
        for e in unqueried:
            values[e] = Fraction(1)
        if not has_four and unqueried:
            values[unqueried[-1]] = Fraction(4)
        for e in range(self.i + 1, 2 * self.i + 1):
            values.setdefault(e, Fraction(3))
        return Realization(values)


def selection_value_lb_adversary(i: int, k: Optional[int] = None) -> Tuple[Instance, SelectionValueLbAdversary]:
    oracle = SelectionValueLbAdversary(i, k)
    return oracle.instance, oracle
