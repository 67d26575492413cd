"""Empirical linear-recurrence profiles for a shift window and its speedup.

A profile records, for each word length n, the largest observed gap between
consecutive occurrence starts of any length-n word, as an exact rational
multiple of n. Speedup profiles measure gaps in S-iterates between
reoccurrences of an S-pattern inside a single orbit class. Nothing here
proves linear recurrence; profiles are desk-scale evidence with the window
size recorded, and all verdict arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .shifts import WindowTooShortError, stabilized_factor_sets
from .speedup import JumpFunction, OrbitColoring, _class_pattern_keys, orbit_coloring
from .words import OrbitSegment


@dataclass(frozen=True)
class RecurrenceProfile:
    """max occurrence gap per word length, over one window."""

    window_length: int
    max_gaps: tuple[int | None, ...]  # index i holds the gap for n = i + 1
    unit: str = "shifts"  # or "s-iterates" for speedup profiles

    @property
    def n_max(self) -> int:
        return len(self.max_gaps)

    def gap(self, n: int) -> int | None:
        return self.max_gaps[n - 1]

    def ratio(self, n: int) -> Fraction | None:
        g = self.max_gaps[n - 1]
        return None if g is None else Fraction(g, n)

    def max_ratio(self) -> Fraction:
        ratios = [self.ratio(n) for n in range(1, self.n_max + 1)]
        ratios = [r for r in ratios if r is not None]
        if not ratios:
            raise ValueError("profile has no observed gaps")
        return max(ratios)

    def as_csv(self) -> str:
        lines = ["n,max_gap,ratio_num,ratio_den"]
        for n in range(1, self.n_max + 1):
            g = self.gap(n)
            if g is None:
                lines.append(f"{n},,,")
            else:
                r = Fraction(g, n)
                lines.append(f"{n},{g},{r.numerator},{r.denominator}")
        return "\n".join(lines) + "\n"


def profile_from_csv(text: str) -> RecurrenceProfile:
    rows = [line for line in text.strip().splitlines() if line]
    if not rows or rows[0] != "n,max_gap,ratio_num,ratio_den":
        raise ValueError("bad profile CSV header")
    gaps: list[int | None] = []
    for row in rows[1:]:
        parts = row.split(",")
        gaps.append(int(parts[1]) if parts[1] else None)
    return RecurrenceProfile(window_length=0, max_gaps=tuple(gaps))


def recurrence_profile(segment: OrbitSegment, n_max: int) -> RecurrenceProfile:
    """Exact max occurrence gaps for every word length up to n_max.

    Requires length-n factor sets to agree between the half and full window;
    gaps truncated by the window boundary are never counted.
    """
    stabilized_factor_sets(segment, n_max)
    data = segment.data
    length = len(data)
    gaps: list[int | None] = []
    for n in range(1, n_max + 1):
        last: dict[bytes, int] = {}
        worst = 0
        for i in range(length - n + 1):
            key = data[i : i + n]
            prev = last.get(key)
            if prev is not None and i - prev > worst:
                worst = i - prev
            last[key] = i
        gaps.append(worst if worst else None)
    return RecurrenceProfile(length, tuple(gaps))


def _class_pattern_streams(
    segment: OrbitSegment, coloring: OrbitColoring, n: int, margin: int
) -> list[list[tuple[bytes, bytes]]]:
    data = segment.data
    streams = []
    all_diffs = coloring.diffs_by_class()
    for landings, diffs in zip(coloring.landings_by_class(), all_diffs):
        streams.append([key for _, key in _class_pattern_keys(data, landings, n, margin, diffs)])
    return streams


def speedup_recurrence_profile(
    segment: OrbitSegment, jump: JumpFunction, n_max: int
) -> RecurrenceProfile:
    """Max S-iterate gaps between reoccurrences of an S-pattern in its class."""
    coloring = orbit_coloring(segment, jump)
    half_coloring = orbit_coloring(
        segment.prefix(max(len(segment) // 2, 2 * jump.radius + 2)), jump
    )
    margin = jump.radius
    half_segment = segment.prefix(max(len(segment) // 2, 2 * jump.radius + 2))
    gaps: list[int | None] = []
    for n in range(1, n_max + 1):
        full_streams = _class_pattern_streams(segment, coloring, n, margin)
        half_streams = _class_pattern_streams(half_segment, half_coloring, n, margin)
        full_set = {k for stream in full_streams for k in stream}
        half_set = {k for stream in half_streams for k in stream}
        if full_set != half_set:
            raise WindowTooShortError(n, f"S-pattern set at n={n} not stabilized")
        worst = 0
        for stream in full_streams:
            last: dict[tuple[bytes, bytes], int] = {}
            for t, key in enumerate(stream):
                prev = last.get(key)
                if prev is not None and t - prev > worst:
                    worst = t - prev
                last[key] = t
        gaps.append(worst if worst else None)
    return RecurrenceProfile(len(segment), tuple(gaps), unit="s-iterates")


@dataclass(frozen=True)
class MinimalityReport:
    """Did every observed n-pattern visit every orbit class with bounded gap?"""

    verdict: bool
    n: int
    window_factor: int
    class_count: int
    witness: str | None  # first failure, if any


def minimality_probe(
    segment: OrbitSegment, jump: JumpFunction, n: int, window_factor: int = 30
) -> MinimalityReport:
    """Transitivity probe: a False verdict is a finding, not an error.

    True iff every length-n pattern observed anywhere occurs in every class
    within each window of window_factor * n consecutive S-steps.
    """
    coloring = orbit_coloring(segment, jump)
    streams = _class_pattern_streams(segment, coloring, n, jump.radius)
    observed = {key for stream in streams for key in stream}
    width = window_factor * n
    for label, stream in enumerate(streams, 1):
        if len(stream) < 2 * width:
            raise WindowTooShortError(
                n, f"class {label} has only {len(stream)} steps, need {2 * width}"
            )
        positions: dict[tuple[bytes, bytes], list[int]] = {key: [] for key in observed}
        for t, key in enumerate(stream):
            positions[key].append(t)
        for key, ts in positions.items():
            if not ts:
                return MinimalityReport(
                    False, n, window_factor, coloring.class_count,
                    f"class {label} never sees one of the {len(observed)} observed patterns",
                )
            fenced = [0] + ts + [len(stream) - 1]
            worst = max(b - a for a, b in zip(fenced, fenced[1:]))
            if worst > width:
                return MinimalityReport(
                    False, n, window_factor, coloring.class_count,
                    f"class {label} has a pattern gap of {worst} steps (> {width})",
                )
    return MinimalityReport(True, n, window_factor, coloring.class_count, None)


@dataclass(frozen=True)
class GapBoundReport:
    """Observed speedup gaps against 2 * L_star * L * p_max * n."""

    l_hat: Fraction
    l_star_hat: Fraction
    p_max: int
    verdicts: tuple[bool, ...]

    @property
    def all_hold(self) -> bool:
        return all(self.verdicts)


def gap_bound_check(
    speedup_profile: RecurrenceProfile,
    l_hat: Fraction,
    l_star_hat: Fraction,
    p_max: int,
) -> GapBoundReport:
    """Check every observed S-gap at length n against 2*L_star*L*p_max*n."""
    verdicts = []
    for n in range(1, speedup_profile.n_max + 1):
        g = speedup_profile.gap(n)
        verdicts.append(g is None or Fraction(g) <= 2 * l_star_hat * l_hat * p_max * n)
    return GapBoundReport(l_hat, l_star_hat, p_max, tuple(verdicts))
