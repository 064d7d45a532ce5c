"""Bounded Borel sets modeled as finite unions of disjoint closed intervals."""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class IntervalSet:
    """Ordered, pairwise-disjoint closed intervals with finite endpoints.

    The empty set (no intervals) is allowed and has measure zero.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if not (lo < hi):
                raise ValueError(f"interval [{lo}, {hi}] needs lo < hi")
            if not (abs(lo) < float("inf") and abs(hi) < float("inf")):
                raise ValueError("endpoints must be finite (bounded set)")
        ivs = tuple(sorted(ivs))
        for (_, hi), (lo2, _) in zip(ivs, ivs[1:]):
            if lo2 <= hi:
                raise ValueError(
                    f"intervals must be pairwise disjoint; {hi} >= {lo2}")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def of(cls, *pairs) -> "IntervalSet":
        return cls(tuple(pairs))

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def contains_zero(self) -> bool:
        """True iff 0 lies in the set (endpoints included: closed intervals)."""
        return any(lo <= 0.0 <= hi for lo, hi in self.intervals)

    @property
    def sup_abs(self) -> float:
        """sup |x| over the set; 0 for the empty set."""
        return max((max(abs(lo), abs(hi)) for lo, hi in self.intervals),
                   default=0.0)

    @property
    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def reflected(self) -> "IntervalSet":
        """The set -A."""
        return IntervalSet(tuple((-hi, -lo) for lo, hi in self.intervals))

    def __str__(self):
        return format_interval_set(self)


def _fmt(x: float) -> str:
    return repr(x) if x != int(x) else str(int(x))


def format_interval_set(s: IntervalSet, sep: str = "+") -> str:
    """Textual form "[a,b]+[c,d]"; pass sep="∪" for the union glyph."""
    if s.is_empty:
        return "{}"
    return sep.join(f"[{_fmt(lo)},{_fmt(hi)}]" for lo, hi in s.intervals)


_INTERVAL_RE = re.compile(r"\[\s*([^\[\],]+?)\s*,\s*([^\[\],]+?)\s*\]")


def parse_interval_set(text: str) -> IntervalSet:
    """Parse "[a,b]∪[c,d]" (ASCII alternative "[a,b]+[c,d]")."""
    text = text.strip()
    if text in ("{}", ""):
        return IntervalSet.empty()
    pairs = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        m = _INTERVAL_RE.match(text, pos)
        if m is None:
            raise ValueError(f"cannot parse interval set {text!r}")
        try:
            pairs.append((float(m.group(1)), float(m.group(2))))
        except ValueError as err:
            raise ValueError(f"bad endpoint in {text!r}: {err}") from None
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        if text[pos] not in "+∪uU":
            raise ValueError(
                f"expected '∪' or '+' between intervals in {text!r}")
        pos += 1
    return IntervalSet(tuple(pairs))
