"""Exact interval primitives: endpoint kinds, membership, dependency, endpoint orders.

Everything here is computed over arbitrary-precision rationals
(`fractions.Fraction`).  Open-endpoint comparisons at equal values are
semantic, so no float ever enters the core: a value sitting exactly on an
open endpoint must compare as strictly outside.

An element's knowledge state is either its original interval or, once
queried, the exact revealed value.  Both shapes are accepted by the
predicates in this module; a revealed value behaves like a trivial
(single-point) interval.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Optional, Tuple, Union

Rational = Fraction

_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class IntervalError(ValueError):
    """Malformed interval, rational, or knowledge update."""


def parse_rational(text: str) -> Fraction:
    """Parse ``num`` or ``num/den`` (den > 0) into an exact rational."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise IntervalError(f"not a rational: {text!r}")
    return Fraction(text)


def format_rational(q: Fraction) -> str:
    """Canonical text form: ``num/den``, with ``/den`` omitted when den = 1."""
    return str(q)


class EndpointKind(Enum):
    OPEN = "open"
    CLOSED = "closed"


OPEN = EndpointKind.OPEN
CLOSED = EndpointKind.CLOSED


@dataclass(frozen=True)
class UncertainInterval:
    """An interval with independently open or closed endpoints.

    Valid shapes: lower < upper with any endpoint kinds, or the trivial
    interval {v} (lower = upper, both endpoints closed).
    """

    lower: Fraction
    lower_kind: EndpointKind
    upper: Fraction
    upper_kind: EndpointKind

    def __post_init__(self) -> None:
        for name in ("lower", "upper"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))
        if self.lower > self.upper:
            raise IntervalError(f"lower {self.lower} above upper {self.upper}")
        if self.lower == self.upper and (
            self.lower_kind is not CLOSED or self.upper_kind is not CLOSED
        ):
            raise IntervalError("degenerate interval must be closed on both sides")

    @staticmethod
    def open(a, b) -> "UncertainInterval":
        return UncertainInterval(Fraction(a), OPEN, Fraction(b), OPEN)

    @staticmethod
    def closed(a, b) -> "UncertainInterval":
        return UncertainInterval(Fraction(a), CLOSED, Fraction(b), CLOSED)

    @staticmethod
    def point(v) -> "UncertainInterval":
        v = Fraction(v)
        return UncertainInterval(v, CLOSED, v, CLOSED)

    @property
    def trivial(self) -> bool:
        return self.lower == self.upper

    @property
    def value(self) -> Fraction:
        if not self.trivial:
            raise IntervalError("value is only defined for trivial intervals")
        return self.lower

    def contains(self, v: Fraction) -> bool:
        """Membership respecting endpoint openness."""
        if v < self.lower or v > self.upper:
            return False
        if v == self.lower and self.lower_kind is OPEN:
            return False
        if v == self.upper and self.upper_kind is OPEN:
            return False
        return True

    def strict_interior(self, v: Fraction) -> bool:
        return self.lower < v < self.upper

    def text(self) -> str:
        if self.trivial:
            return "{%s}" % format_rational(self.lower)
        lb = "[" if self.lower_kind is CLOSED else "("
        ub = "]" if self.upper_kind is CLOSED else ")"
        return f"{lb}{format_rational(self.lower)},{format_rational(self.upper)}{ub}"

    @staticmethod
    def parse(text: str) -> "UncertainInterval":
        text = text.strip()
        if text.startswith("{") and text.endswith("}"):
            return UncertainInterval.point(parse_rational(text[1:-1]))
        if len(text) < 5 or text[0] not in "([" or text[-1] not in ")]":
            raise IntervalError(f"malformed interval: {text!r}")
        body = text[1:-1].split(",")
        if len(body) != 2:
            raise IntervalError(f"malformed interval: {text!r}")
        lo, hi = (parse_rational(part) for part in body)
        return UncertainInterval(
            lo,
            CLOSED if text[0] == "[" else OPEN,
            hi,
            CLOSED if text[-1] == "]" else OPEN,
        )

    def __str__(self) -> str:  # pragma: no cover - debugging aid
        return self.text()


# An element's view: unqueried interval, or the exact revealed value.
ElementState = Union[UncertainInterval, Fraction]

# A cut encodes an endpoint's position on the real line including its
# openness: (v, 0) is the point v itself, (v, +1) sits just above v and
# (v, -1) just below.  Tuple comparison then orders endpoints correctly.
Cut = Tuple[Fraction, int]


def state_point(state: ElementState) -> Optional[Fraction]:
    """Exact value pinned by the state, if any (revealed or trivial)."""
    if isinstance(state, Fraction):
        return state
    if state.trivial:
        return state.value
    return None


def as_interval(state: ElementState) -> UncertainInterval:
    if isinstance(state, Fraction):
        return UncertainInterval.point(state)
    return state


def left_cut(state: ElementState) -> Cut:
    p = state_point(state)
    if p is not None:
        return (p, 0)
    assert isinstance(state, UncertainInterval)
    return (state.lower, 0 if state.lower_kind is CLOSED else 1)


def right_cut(state: ElementState) -> Cut:
    p = state_point(state)
    if p is not None:
        return (p, 0)
    assert isinstance(state, UncertainInterval)
    return (state.upper, 0 if state.upper_kind is CLOSED else -1)


def precedes_l(a: ElementState, b: ElementState) -> bool:
    """Strict precedence in the left-endpoint order.

    Ties at equal values put closed left endpoints before open ones;
    fully equal endpoints compare equal (callers break ties by id).
    """
    return left_cut(a) < left_cut(b)


def precedes_u(a: ElementState, b: ElementState) -> bool:
    """Strict precedence in the right-endpoint order (open before closed)."""
    return right_cut(a) < right_cut(b)


def dependent(a: ElementState, b: ElementState) -> bool:
    """True iff the relative order of the two values cannot be deduced.

    Holds when the two intervals overlap in more than one point, or when
    one state is an exact value strictly interior to the other interval.
    Two exact values are never dependent: ties can be ordered either way.
    """
    pa, pb = state_point(a), state_point(b)
    if pa is not None and pb is not None:
        return False
    if pa is not None:
        ib = as_interval(b)
        return ib.strict_interior(pa)
    if pb is not None:
        ia = as_interval(a)
        return ia.strict_interior(pb)
    ia, ib = as_interval(a), as_interval(b)
    return max(ia.lower, ib.lower) < min(ia.upper, ib.upper)


def order_provable(a: ElementState, b: ElementState) -> bool:
    """True iff v_a <= v_b holds in every admissible realization."""
    ia, ib = as_interval(a), as_interval(b)
    return ia.upper <= ib.lower


class KnowledgeState:
    """Per-element view: unqueried interval or revealed exact value.

    This is the whole of an algorithm's information.  Once revealed, an
    element never reverts, and the value must lie inside the original
    interval (strictly inside open endpoints).  Mutated only by the
    single-threaded run loop of a trial.
    """

    def __init__(self, intervals: Dict[int, UncertainInterval]):
        self._intervals: Dict[int, UncertainInterval] = dict(intervals)
        self._revealed: Dict[int, Fraction] = {}

    def ids(self) -> Iterable[int]:
        return self._intervals.keys()

    def original(self, eid: int) -> UncertainInterval:
        return self._intervals[eid]

    def state(self, eid: int) -> ElementState:
        if eid in self._revealed:
            return self._revealed[eid]
        return self._intervals[eid]

    def is_revealed(self, eid: int) -> bool:
        return eid in self._revealed

    def revealed_ids(self) -> frozenset:
        return frozenset(self._revealed)

    def known_value(self, eid: int) -> Optional[Fraction]:
        """Exact value if pinned (revealed, or trivial from the start)."""
        return state_point(self.state(eid))

    def reveal(self, eid: int, value: Fraction) -> None:
        if eid in self._revealed:
            raise IntervalError(f"element {eid} was already revealed")
        iv = self._intervals[eid]
        if not iv.contains(value):
            raise IntervalError(f"value {value} outside interval {iv.text()} of element {eid}")
        self._revealed[eid] = Fraction(value)

    def unqueried_nontrivial(self, ids: Optional[Iterable[int]] = None) -> list:
        pool = self.ids() if ids is None else ids
        return [
            eid
            for eid in pool
            if eid not in self._revealed and not self._intervals[eid].trivial
        ]

    def copy(self) -> "KnowledgeState":
        dup = KnowledgeState(self._intervals)
        dup._revealed = dict(self._revealed)
        return dup
