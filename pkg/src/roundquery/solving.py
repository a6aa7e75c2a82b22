"""Solvedness checkers, solution certificates, and exact offline optima.

A problem state is solved when the answer is provable from the knowledge
state alone, without peeking at unqueried values.  The optimum query set
is computed in closed form where one exists (minimum per set, the
containing intervals for full selection) and by subset search otherwise;
the closed forms double as oracles for the brute force and vice versa.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .instances import (
    Instance,
    InstanceError,
    MINIMUM,
    ProblemFamily,
    Realization,
    SELECTION_FULL,
    SELECTION_VALUE,
    SORTING,
)
from .intervals import (
    CLOSED,
    Cut,
    KnowledgeState,
    OPEN,
    UncertainInterval,
    dependent,
    left_cut,
    order_provable,
    right_cut,
    state_point,
)


class BruteForceCapError(InstanceError):
    """Subset search refused: instance above the configured cap."""


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


# ---------------------------------------------------------------------------
# solvedness


def minimum_discard(set_ids: Iterable[int], knowledge: KnowledgeState) -> FrozenSet[int]:
    """Non-trivial unqueried elements that are certainly not the set minimum.

    An element can be dropped once some known value in the set is at or
    below its lower endpoint (values in open intervals sit strictly above
    the endpoint, so a weak comparison suffices).
    """
    ids = list(set_ids)
    known = [knowledge.known_value(e) for e in ids]
    floor = min((v for v in known if v is not None), default=None)
    if floor is None:
        return frozenset()
    out = set()
    for eid in ids:
        if knowledge.known_value(eid) is not None:
            continue
        if knowledge.original(eid).lower >= floor:
            out.add(eid)
    return frozenset(out)


def minimum_solved(set_ids: Iterable[int], knowledge: KnowledgeState) -> bool:
    """True iff the set's minimum value is provable from current knowledge."""
    ids = list(set_ids)
    floor = None
    for eid in ids:
        v = knowledge.known_value(eid)
        if v is not None and (floor is None or v < floor):
            floor = v
    if floor is None:
        return False
    for eid in ids:
        if knowledge.known_value(eid) is None and knowledge.original(eid).lower < floor:
            return False
    return True


def minimum_value(set_ids: Iterable[int], knowledge: KnowledgeState) -> Fraction:
    values = [knowledge.known_value(e) for e in set_ids]
    return min(v for v in values if v is not None)


def sorting_solved(set_ids: Iterable[int], knowledge: KnowledgeState) -> bool:
    """True iff no dependent pair remains within the set."""
    states = [knowledge.state(e) for e in set_ids]
    for a, b in itertools.combinations(states, 2):
        if dependent(a, b):
            return False
    return True


def _rank_cut(cuts: List[Cut], rank: int) -> Cut:
    return sorted(cuts)[rank - 1]


def selection_value_pinned(instance: Instance, knowledge: KnowledgeState) -> Optional[Fraction]:
    """The i-th smallest value if it is already forced, else None.

    Pushing every unqueried interval to its lowest (resp. highest)
    admissible end gives the two extremes of the i-th order statistic; the
    statistic is pinned exactly when both extremes are the same attained
    value.  Open endpoints are tracked as one-sided limits, which are never
    attained.
    """
    rank = instance.problem.rank
    low: List[Cut] = []
    high: List[Cut] = []
    for eid in instance.ids():
        st = knowledge.state(eid)
        p = state_point(st)
        if p is not None:
            low.append((p, 0))
            high.append((p, 0))
        else:
            low.append(left_cut(st))
            high.append(right_cut(st))
    lo = _rank_cut(low, rank)
    hi = _rank_cut(high, rank)
    if lo == hi and lo[1] == 0:
        return lo[0]
    return None


def selection_containers(instance: Instance, knowledge: KnowledgeState, v: Fraction) -> List[int]:
    """Non-trivial unqueried intervals whose interval contains v."""
    out = []
    for eid in instance.ids():
        st = knowledge.state(eid)
        if state_point(st) is not None:
            continue
        assert isinstance(st, UncertainInterval)
        if st.contains(v):
            out.append(eid)
    return out


def selection_solved(instance: Instance, knowledge: KnowledgeState) -> bool:
    v = selection_value_pinned(instance, knowledge)
    if v is None:
        return False
    if instance.problem.kind is SELECTION_FULL:
        return not selection_containers(instance, knowledge, v)
    return True


def set_solved(instance: Instance, set_idx: int, knowledge: KnowledgeState) -> bool:
    members = instance.family[set_idx]
    if instance.problem.kind is SORTING:
        return sorting_solved(members, knowledge)
    if instance.problem.kind is MINIMUM:
        return minimum_solved(members, knowledge)
    return selection_solved(instance, knowledge)


def instance_solved(instance: Instance, knowledge: KnowledgeState) -> bool:
    if instance.problem.is_selection:
        return selection_solved(instance, knowledge)
    return all(set_solved(instance, i, knowledge) for i in range(instance.m))


# ---------------------------------------------------------------------------
# target area and categories for selection


def target_area(instance: Instance, knowledge: KnowledgeState, rank: Optional[int] = None) -> UncertainInterval:
    """Interval between the i-th smallest left and right endpoints.

    Computed over the current states (revealed elements are points); the
    i-th smallest value must lie inside.
    """
    rank = instance.problem.rank if rank is None else rank
    states = [knowledge.state(eid) for eid in instance.ids()]
    lo = _rank_cut([left_cut(s) for s in states], rank)
    hi = _rank_cut([right_cut(s) for s in states], rank)
    if lo[0] == hi[0]:
        return UncertainInterval.point(lo[0])
    return UncertainInterval(
        lo[0],
        CLOSED if lo[1] == 0 else OPEN,
        hi[0],
        CLOSED if hi[1] == 0 else OPEN,
    )


@dataclass(frozen=True)
class SelectionRoundView:
    """Target area plus the category split of intersecting elements.

    `containing` holds the non-trivial unqueried intervals that cover the
    whole target area; the other three buckets classify every remaining
    element state that intersects the target area (points included, for
    the category-count invariants).
    """

    target: UncertainInterval
    containing: Tuple[int, ...]
    inside: Tuple[int, ...]
    left_overlap: Tuple[int, ...]
    right_overlap: Tuple[int, ...]

    @property
    def a(self) -> int:
        return len(self.containing)

    @property
    def b(self) -> int:
        return len(self.inside)


def selection_categories(instance: Instance, knowledge: KnowledgeState, rank: Optional[int] = None) -> SelectionRoundView:
    ta = target_area(instance, knowledge, rank)
    ta_lo, ta_hi = left_cut(ta), right_cut(ta)
    containing: List[int] = []
    inside: List[int] = []
    left_overlap: List[int] = []
    right_overlap: List[int] = []
    for eid in instance.ids():
        st = knowledge.state(eid)
        lo, hi = left_cut(st), right_cut(st)
        if max(lo, ta_lo) > min(hi, ta_hi):
            continue  # disjoint from the target area
        covers_left = lo <= ta_lo
        covers_right = hi >= ta_hi
        if covers_left and covers_right:
            if state_point(st) is None:
                containing.append(eid)
            # a pinned point can only "cover" a trivial target area; it is
            # already resolved and belongs to no bucket
        elif covers_left:
            left_overlap.append(eid)
        elif covers_right:
            right_overlap.append(eid)
        else:
            inside.append(eid)
    return SelectionRoundView(
        target=ta,
        containing=tuple(containing),
        inside=tuple(inside),
        left_overlap=tuple(left_overlap),
        right_overlap=tuple(right_overlap),
    )


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class SolutionCertificate:
    """Provable answer, checkable from the knowledge state alone."""

    problem: ProblemFamily
    orders: Optional[Tuple[Tuple[int, ...], ...]] = None  # sorting: one per set
    minima: Optional[Tuple[Tuple[int, Fraction], ...]] = None  # minimum: per set
    value: Optional[Fraction] = None  # selection
    equal_ids: Optional[FrozenSet[int]] = None  # selection-full


def extract_certificate(instance: Instance, knowledge: KnowledgeState) -> SolutionCertificate:
    kind = instance.problem.kind
    if kind is SORTING:
        orders = []
        for members in instance.family:
            order = sorted(
                members,
                key=lambda e: (right_cut(knowledge.state(e)), left_cut(knowledge.state(e)), e),
            )
            orders.append(tuple(order))
        return SolutionCertificate(kind, orders=tuple(orders))
    if kind is MINIMUM:
        minima = []
        for members in instance.family:
            v = minimum_value(members, knowledge)
            holder = min(e for e in members if knowledge.known_value(e) == v)
            minima.append((holder, v))
        return SolutionCertificate(kind, minima=tuple(minima))
    v = selection_value_pinned(instance, knowledge)
    if v is None:
        raise InstanceError("selection value not pinned; nothing to certify")
    if kind is SELECTION_VALUE:
        return SolutionCertificate(kind, value=v)
    equal = frozenset(e for e in instance.ids() if knowledge.known_value(e) == v)
    return SolutionCertificate(kind, value=v, equal_ids=equal)


def verify_certificate(
    instance: Instance,
    knowledge: KnowledgeState,
    cert: SolutionCertificate,
    realization: Optional[Realization] = None,
) -> None:
    """Raise unless the certificate is provable from knowledge (and, when a
    realization is supplied, true under it)."""
    kind = instance.problem.kind
    if cert.problem is not kind:
        raise InstanceError("certificate problem kind mismatch")
    if kind is SORTING:
        assert cert.orders is not None
        for members, order in zip(instance.family, cert.orders):
            if sorted(order) != sorted(members):
                raise InstanceError("sorting certificate is not a permutation of the set")
            for a, b in zip(order, order[1:]):
                if not order_provable(knowledge.state(a), knowledge.state(b)):
                    raise InstanceError(f"order of {a} before {b} is not provable")
                if realization is not None and realization.value(a) > realization.value(b):
                    raise InstanceError(f"order of {a} before {b} contradicts the realization")
        return
    if kind is MINIMUM:
        assert cert.minima is not None
        for members, (holder, v) in zip(instance.family, cert.minima):
            if holder not in members or knowledge.known_value(holder) != v:
                raise InstanceError("claimed minimum is not a known value of the set")
            for e in members:
                known = knowledge.known_value(e)
                if known is not None:
                    if known < v:
                        raise InstanceError("a known value undercuts the claimed minimum")
                elif knowledge.original(e).lower < v:
                    raise InstanceError("an unqueried element could undercut the claimed minimum")
            if realization is not None and min(realization.value(e) for e in members) != v:
                raise InstanceError("claimed minimum contradicts the realization")
        return
    pinned = selection_value_pinned(instance, knowledge)
    if pinned is None or pinned != cert.value:
        raise InstanceError("selection value is not pinned to the claimed value")
    if realization is not None:
        values = sorted(realization.value(e) for e in instance.ids())
        if values[instance.problem.rank - 1] != cert.value:
            raise InstanceError("selection value contradicts the realization")
    if kind is SELECTION_FULL:
        assert cert.equal_ids is not None
        if selection_containers(instance, knowledge, cert.value):
            raise InstanceError("an unqueried interval still contains the selection value")
        expected = frozenset(e for e in instance.ids() if knowledge.known_value(e) == cert.value)
        if cert.equal_ids != expected:
            raise InstanceError("claimed equal-value elements do not match knowledge")
        if realization is not None:
            truth = frozenset(e for e in instance.ids() if realization.value(e) == cert.value)
            if cert.equal_ids != truth:
                raise InstanceError("equal-value elements contradict the realization")


# ---------------------------------------------------------------------------
# exact optima


@dataclass(frozen=True)
class OptReport:
    opt1: int
    opt_set: FrozenSet[int]
    opt_k: int
    method: str  # closed-form | brute-force

    @staticmethod
    def of(opt_set: Iterable[int], k: int, method: str) -> "OptReport":
        chosen = frozenset(opt_set)
        return OptReport(len(chosen), chosen, ceil_div(len(chosen), k), method)


def opt1_minimum(instance: Instance, realization: Realization) -> OptReport:
    """Per set: every non-trivial interval whose lower endpoint is strictly
    below the set's true minimum (this includes the minimum's own interval)."""
    chosen = set()
    for members in instance.family:
        v_star = min(realization.value(e) for e in members)
        for e in members:
            iv = instance.interval(e)
            if not iv.trivial and iv.lower < v_star:
                chosen.add(e)
    return OptReport.of(chosen, instance.k, "closed-form")


def opt1_selection_full(instance: Instance, realization: Realization) -> OptReport:
    values = sorted(realization.value(e) for e in instance.ids())
    v_star = values[instance.problem.rank - 1]
    chosen = [
        e
        for e in instance.ids()
        if not instance.interval(e).trivial and instance.interval(e).contains(v_star)
    ]
    return OptReport.of(chosen, instance.k, "closed-form")


def reveal_all(instance: Instance, realization: Realization, ids: Iterable[int]) -> KnowledgeState:
    k = instance.knowledge()
    for eid in ids:
        if not instance.interval(eid).trivial:
            k.reveal(eid, realization.value(eid))
    return k


def query_set_feasible(instance: Instance, realization: Realization, ids: Iterable[int]) -> bool:
    """True iff revealing the given elements provably solves the instance."""
    return instance_solved(instance, reveal_all(instance, realization, ids))


def _sorting_structure(instance: Instance, realization: Realization):
    """Static dependency edges plus the forced-query implications.

    An edge joins two non-trivial co-set intervals whose order is open;
    `forces[i]` holds the co-set intervals that must be queried once i's
    value is on the table (the value falls strictly inside them).
    """
    nontrivial = [e for e in instance.ids() if not instance.interval(e).trivial]
    co_set: Dict[int, set] = {e: set() for e in instance.ids()}
    for members in instance.family:
        for a, b in itertools.combinations(sorted(members), 2):
            co_set[a].add(b)
            co_set[b].add(a)
    edges = []
    for a in nontrivial:
        for b in co_set[a]:
            if b > a and not instance.interval(b).trivial:
                if dependent(instance.interval(a), instance.interval(b)):
                    edges.append((a, b))
    forces: Dict[int, FrozenSet[int]] = {}
    for a in instance.ids():
        v = realization.value(a)
        out = set()
        for b in co_set[a]:
            iv = instance.interval(b)
            if not iv.trivial and iv.strict_interior(v):
                out.add(b)
        forces[a] = frozenset(out)
    seeds = set()
    for a in instance.ids():
        if instance.interval(a).trivial:
            seeds |= forces[a]
    return edges, forces, seeds


def _closure(base: set, forces: Dict[int, FrozenSet[int]]) -> set:
    out = set(base)
    frontier = list(base)
    while frontier:
        nxt = forces[frontier.pop()]
        for e in nxt:
            if e not in out:
                out.add(e)
                frontier.append(e)
    return out


def _sorting_min_queries(
    edges: Sequence[Tuple[int, int]],
    forces: Dict[int, FrozenSet[int]],
    seeds: set,
    mandatory: set,
    excluded: set,
    best_cap: Optional[int] = None,
) -> Optional[int]:
    """Smallest feasible query set size honoring mandatory/excluded, or None."""
    chosen = _closure(seeds | mandatory, forces)
    if chosen & excluded:
        return None

    def matching_bound(cur: set) -> int:
        used = set()
        extra = 0
        for a, b in edges:
            if a in cur or b in cur or a in used or b in used:
                continue
            used.add(a)
            used.add(b)
            extra += 1
        return extra

    best: Optional[int] = None

    def search(cur: set) -> None:
        nonlocal best
        bound = len(cur) + matching_bound(cur)
        if best is not None and bound >= best:
            return
        if best_cap is not None and bound > best_cap:
            return
        for a, b in edges:
            if a not in cur and b not in cur:
                for pick in (a, b):
                    if pick in excluded:
                        continue
                    nxt = _closure(cur | {pick}, forces)
                    if not nxt & excluded:
                        search(nxt)
                return
        if best is None or len(cur) < best:
            best = len(cur)

    search(chosen)
    return best


def _opt1_sorting_bruteforce(instance: Instance, realization: Realization) -> FrozenSet[int]:
    edges, forces, seeds = _sorting_structure(instance, realization)
    opt = _sorting_min_queries(edges, forces, seeds, set(), set())
    assert opt is not None  # querying everything non-trivial is always feasible
    chosen: set = set()
    excluded: set = set()
    for eid in instance.ids():
        if eid in chosen or eid in excluded or instance.interval(eid).trivial:
            continue
        size = _sorting_min_queries(edges, forces, seeds, chosen | {eid}, excluded, best_cap=opt)
        if size == opt:
            chosen = _closure(chosen | {eid} | seeds, forces)
        else:
            excluded.add(eid)
    assert len(chosen) == opt
    return frozenset(chosen)


def opt1_bruteforce(instance: Instance, realization: Realization, cap: int = 22) -> OptReport:
    """Minimum feasible query set, lexicographically smallest among minima.

    Subset search in cardinality order; sorting instances go through a
    branch-and-bound equivalent that scales past the enumeration cap.
    """
    if instance.n > cap:
        raise BruteForceCapError(f"n = {instance.n} above brute-force cap {cap}")
    if instance.problem.kind is SORTING:
        chosen = _opt1_sorting_bruteforce(instance, realization)
        return OptReport.of(chosen, instance.k, "brute-force")
    candidates = [e for e in instance.ids() if not instance.interval(e).trivial]
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if query_set_feasible(instance, realization, combo):
                return OptReport.of(combo, instance.k, "brute-force")
    raise InstanceError("no feasible query set; instance is inconsistent")


def canonical_opt(instance: Instance, realization: Realization, cap: int = 22) -> OptReport:
    """The fixed optimum used for wasted-query accounting.

    Closed form where one exists, otherwise the lexicographically smallest
    brute-force minimum, so wasted counts are deterministic.
    """
    kind = instance.problem.kind
    if kind is MINIMUM:
        return opt1_minimum(instance, realization)
    if kind is SELECTION_FULL:
        return opt1_selection_full(instance, realization)
    return opt1_bruteforce(instance, realization, cap=cap)
