"""Group extension over the derived shift: entry positions, transition
permutations between consecutive occurrences of a base word, cocycle
products, and empirically generated local subgroups.

Conventions. Orbit classes carry the global labels assigned by the orbit
coloring; permutations act on entry *ranks* (the left-to-right order of
entry positions inside an occurrence), so following the class through one
return word sends rank s at one occurrence to rank psi(s) at the next.
Products compose left to right: (p * q)(s) = q(p(s)), matching the order
in which the steps are traversed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .returnwords import ReturnWordSystem, return_words
from .speedup import JumpFunction, MarginError, OrbitColoring, orbit_coloring
from .words import OrbitSegment, Word, occurrences


@dataclass(frozen=True)
class Permutation:
    """Bijection on {1..c}; images[s-1] is the image of s."""

    images: tuple[int, ...]

    def __post_init__(self):
        c = len(self.images)
        if sorted(self.images) != list(range(1, c + 1)):
            raise ValueError(f"not a permutation of 1..{c}: {self.images}")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(tuple(range(1, degree + 1)))

    @classmethod
    def from_cycles(cls, degree: int, *cycles: tuple[int, ...]) -> "Permutation":
        images = list(range(1, degree + 1))
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + (cycle[0],)):
                images[a - 1] = b
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, s: int) -> int:
        return self.images[s - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Apply self first, then other."""
        if other.degree != self.degree:
            raise ValueError("cannot compose permutations of different degrees")
        return Permutation(tuple(other.images[i - 1] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for s, t in enumerate(self.images, 1):
            inv[t - 1] = s
        return Permutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return all(i == s for s, i in enumerate(self.images, 1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out = []
        for s in range(1, self.degree + 1):
            if s in seen:
                continue
            cycle = [s]
            seen.add(s)
            t = self(s)
            while t != s:
                cycle.append(t)
                seen.add(t)
                t = self(t)
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    @property
    def cycle_str(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "e"
        sep = "" if self.degree <= 9 else " "
        return "".join("(" + sep.join(str(s) for s in cycle) + ")" for cycle in cycles)

    def __str__(self) -> str:
        return self.cycle_str


def generate_subgroup(generators: list[Permutation], degree: int) -> frozenset[Permutation]:
    """Closure of the generators under composition (finite, so inverses come free)."""
    elements = {Permutation.identity(degree)}
    frontier = list(elements)
    while frontier:
        nxt = []
        for g in frontier:
            for h in generators:
                product = g * h
                if product not in elements:
                    elements.add(product)
                    nxt.append(product)
        frontier = nxt
    return frozenset(elements)


@dataclass(frozen=True)
class EntryProfile:
    """Entry positions of the S-orbit classes inside one occurrence of a word.

    Positions are 1-based in-word indices; each carries the global orbit
    class label entering there.
    """

    word: Word
    occurrence_start: int
    entries: tuple[tuple[int, int], ...]  # (position, class label), increasing positions

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for _, lab in self.entries)

    def rank_of_label(self, label: int) -> int:
        """1-based left-to-right rank of the entry with this class label."""
        for rank, (_, lab) in enumerate(self.entries, 1):
            if lab == label:
                return rank
        raise ValueError(f"class {label} has no entry in this occurrence")


def _entry_block(
    occ: int, word_len: int, p_max: int, radius: int, mode: str
) -> range:
    if mode == "strict":
        if word_len < p_max + 4 * radius + 2:
            raise ValueError(
                f"strict mode needs |w| >= {p_max + 4 * radius + 2}, got {word_len}"
            )
        start = occ + 2 * radius + 1
    elif mode == "relaxed":
        start = occ
    else:
        raise ValueError(f"unknown entry mode {mode!r}")
    return range(start, start + p_max)


def entry_profile_at(
    segment: OrbitSegment,
    coloring: OrbitColoring,
    w: Word,
    occ: int,
    mode: str = "relaxed",
) -> EntryProfile:
    """Entry positions for the occurrence of w starting at `occ`."""
    block = _entry_block(occ, len(w), coloring.p_max_observed, coloring.jump.radius, mode)
    if block.stop - occ > len(w) and mode == "strict":
        raise ValueError("entry block does not fit inside the word")
    seen: dict[int, int] = {}
    for i in block:
        label = coloring.label_of(i)  # raises MarginError near window edges
        if label not in seen:
            seen[label] = i
    if len(seen) != coloring.class_count:
        raise AssertionError(
            f"only {len(seen)} of {coloring.class_count} classes enter the block; "
            "jump is not bijective on this window"
        )
    entries = tuple(sorted((i - occ + 1, label) for label, i in seen.items()))
    return EntryProfile(w, occ, entries)


def entry_positions(
    segment: OrbitSegment,
    jump: JumpFunction,
    w: Word,
    mode: str = "relaxed",
    occurrence: int | None = None,
    coloring: OrbitColoring | None = None,
) -> EntryProfile:
    """Entry profile at one occurrence of w (the first valid one by default)."""
    if coloring is None:
        coloring = orbit_coloring(segment, jump)
    starts = occurrences(segment, w)
    if not starts:
        raise ValueError(f"{w.text!r} does not occur in the window")
    if occurrence is not None:
        if occurrence not in starts:
            raise ValueError(f"{occurrence} is not an occurrence start of {w.text!r}")
        return entry_profile_at(segment, coloring, w, occurrence, mode)
    for occ in starts:
        try:
            return entry_profile_at(segment, coloring, w, occ, mode)
        except MarginError:
            continue
    raise MarginError(f"no occurrence of {w.text!r} has enough margin")


def transition_permutation(
    segment: OrbitSegment,
    jump: JumpFunction,
    w: Word,
    pair: tuple[int, int],
    mode: str = "relaxed",
    coloring: OrbitColoring | None = None,
) -> Permutation:
    """Rank permutation induced by following S-orbits across one return word.

    `pair` must be consecutive occurrence starts of w.
    """
    if coloring is None:
        coloring = orbit_coloring(segment, jump)
    starts = occurrences(segment, w)
    i, j = pair
    try:
        pos = starts.index(i)
    except ValueError:
        raise ValueError(f"{i} is not an occurrence start of {w.text!r}") from None
    if pos + 1 >= len(starts) or starts[pos + 1] != j:
        raise ValueError(f"occurrences {i} and {j} are not consecutive")
    before = entry_profile_at(segment, coloring, w, i, mode)
    after = entry_profile_at(segment, coloring, w, j, mode)
    images = tuple(after.rank_of_label(label) for label in before.labels)
    return Permutation(images)


@dataclass(frozen=True)
class ExtensionTrace:
    """Per-step permutations along consecutive occurrences of the base word.

    cumulative[0] is the identity and cumulative[i+1] = cumulative[i] * perms[i];
    `origin` names the occurrence treated as time zero by `cocycle`.
    """

    base: Word
    occurrence_starts: tuple[int, ...]
    system: ReturnWordSystem
    perms: tuple[Permutation, ...]
    cumulative: tuple[Permutation, ...]
    origin: int = 0

    def __post_init__(self):
        if len(self.cumulative) != len(self.perms) + 1:
            raise ValueError("need one cumulative product per occurrence")
        if not 0 <= self.origin <= len(self.perms):
            raise ValueError("origin outside trace")

    @property
    def degree(self) -> int:
        return self.cumulative[0].degree

    def shift(self, m: int) -> "ExtensionTrace":
        """The same trace re-anchored m steps later."""
        if not 0 <= self.origin + m <= len(self.perms):
            raise ValueError(f"shift by {m} leaves the trace")
        return ExtensionTrace(
            self.base,
            self.occurrence_starts,
            self.system,
            self.perms,
            self.cumulative,
            self.origin + m,
        )

    def to_csv(self) -> str:
        lines = ["step,occurrence_start,return_word,step_perm,cumulative"]
        for t, perm in enumerate(self.perms):
            ret = self.system.return_word(self.system.derived[t])
            lines.append(
                f"{t},{self.occurrence_starts[t]},{ret.text},"
                f"{perm.cycle_str},{self.cumulative[t + 1].cycle_str}"
            )
        return "\n".join(lines) + "\n"


def build_trace(
    segment: OrbitSegment,
    jump: JumpFunction,
    w: Word,
    mode: str = "relaxed",
    origin: int = 0,
) -> ExtensionTrace:
    """Scan every margin-valid occurrence of w and record the step permutations."""
    coloring = orbit_coloring(segment, jump)
    starts = occurrences(segment, w)
    valid: list[int] = []
    profiles: dict[int, EntryProfile] = {}
    for occ in starts:
        try:
            profiles[occ] = entry_profile_at(segment, coloring, w, occ, mode)
        except MarginError:
            continue
        valid.append(occ)
    if len(valid) < 3:
        raise ValueError(f"window too short: only {len(valid)} usable occurrences of {w.text!r}")
    first, last = starts.index(valid[0]), starts.index(valid[-1])
    if valid != starts[first : last + 1]:
        raise AssertionError("margin-valid occurrences are not contiguous")

    sub = OrbitSegment(segment.window(valid[0], valid[-1] - valid[0] + len(w)))
    system = return_words(sub, w)

    perms: list[Permutation] = []
    cumulative = [Permutation.identity(coloring.class_count)]
    for a, b in zip(valid, valid[1:]):
        images = tuple(profiles[b].rank_of_label(label) for label in profiles[a].labels)
        perm = Permutation(images)
        perms.append(perm)
        cumulative.append(cumulative[-1] * perm)
    return ExtensionTrace(
        w, tuple(valid), system, tuple(perms), tuple(cumulative), origin
    )


def cocycle(trace: ExtensionTrace, n: int) -> Permutation:
    """Ordered product of the step permutations over n steps from the origin.

    Positive n multiplies the next n steps left to right; negative n returns
    the inverse of the product over the n steps before the origin.
    """
    base = trace.origin
    if n == 0:
        return Permutation.identity(trace.degree)
    if n > 0:
        if base + n > len(trace.perms):
            raise ValueError(f"cocycle({n}) runs past the trace")
        product = Permutation.identity(trace.degree)
        for t in range(base, base + n):
            product = product * trace.perms[t]
        return product
    if base + n < 0:
        raise ValueError(f"cocycle({n}) runs before the trace")
    product = Permutation.identity(trace.degree)
    for t in range(base + n, base):
        product = product * trace.perms[t]
    return product.inverse()


@dataclass(frozen=True)
class SubgroupEstimate:
    """Subgroup generated by observed return loops; a lower estimate of the
    true local group, labeled with the window that produced it."""

    degree: int
    generators: tuple[tuple[Permutation, str], ...]
    elements: frozenset[Permutation]
    anchor: Word
    window_length: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> list[Permutation]:
        return sorted(self.elements, key=lambda p: p.images)


def local_group(
    segment: OrbitSegment,
    jump: JumpFunction,
    w: Word,
    anchor: Word,
    mode: str = "relaxed",
    trace: ExtensionTrace | None = None,
) -> SubgroupEstimate:
    """Subgroup generated by cocycle products along loops between anchor visits."""
    if anchor.alphabet != w.alphabet or len(anchor) < len(w):
        raise ValueError("anchor must extend the base word")
    if anchor.letters[: len(w)] != w.letters:
        raise ValueError("anchor must have the base word as a prefix")
    if trace is None:
        trace = build_trace(segment, jump, w, mode)
    rank = {occ: t for t, occ in enumerate(trace.occurrence_starts)}
    anchor_occs = [occ for occ in occurrences(segment, anchor) if occ in rank]
    if len(anchor_occs) < 3:
        raise ValueError(
            f"anchor {anchor.text!r} has only {len(anchor_occs)} usable occurrences, need >= 3"
        )
    generators: list[tuple[Permutation, str]] = []
    for a, b in zip(anchor_occs, anchor_occs[1:]):
        ta, tb = rank[a], rank[b]
        loop = trace.cumulative[ta].inverse() * trace.cumulative[tb]
        generators.append((loop, f"loop steps {ta}->{tb}"))
    elements = generate_subgroup([g for g, _ in generators], trace.degree)
    return SubgroupEstimate(
        degree=trace.degree,
        generators=tuple(generators),
        elements=elements,
        anchor=anchor,
        window_length=len(segment),
    )


def conjugacy_check(h1: SubgroupEstimate, h2: SubgroupEstimate) -> Permutation | None:
    """Search the full symmetric group for g with h2 = g h1 g^(-1)."""
    if h1.degree != h2.degree:
        raise ValueError(f"subgroups of different degrees: {h1.degree} vs {h2.degree}")
    if h1.order != h2.order:
        return None
    set1, set2 = h1.elements, h2.elements
    for images in itertools.permutations(range(1, h1.degree + 1)):
        g = Permutation(images)
        g_inv = g.inverse()
        if {g * h * g_inv for h in set1} == set2:
            return g
    return None


@dataclass(frozen=True)
class ElementGap:
    element: Permutation
    count: int
    max_step_gap: int | None  # in derived-sequence steps
    max_shift_gap: int | None  # in sigma shifts


@dataclass(frozen=True)
class GapScanReport:
    """Reoccurrence gaps of each group element along the cumulative cocycle.

    The L*-proxy normalizes the worst sigma-shift gap by |w|, so that one
    F-step spanning a long return word cannot hide inside the constant.
    """

    base: Word
    window_length: int
    element_stats: tuple[ElementGap, ...]
    unobserved: tuple[str, ...]
    l_star_proxy: Fraction | None  # max sigma-shift gap / |w|

    @property
    def all_observed(self) -> bool:
        return not self.unobserved


def extension_gap_scan(
    segment: OrbitSegment,
    jump: JumpFunction,
    w: Word,
    mode: str = "relaxed",
    trace: ExtensionTrace | None = None,
) -> GapScanReport:
    if trace is None:
        trace = build_trace(segment, jump, w, mode)
    group = generate_subgroup(list(trace.cumulative), trace.degree)
    positions: dict[Permutation, list[int]] = {g: [] for g in group}
    for t, cum in enumerate(trace.cumulative):
        positions[cum].append(t)

    stats: list[ElementGap] = []
    unobserved: list[str] = []
    worst_shift: int | None = None
    for g in sorted(group, key=lambda p: p.images):
        ts = positions[g]
        if not ts:
            unobserved.append(g.cycle_str)
            continue
        step_gap = shift_gap = None
        if len(ts) >= 2:
            step_gap = max(b - a for a, b in zip(ts, ts[1:]))
            occ = trace.occurrence_starts
            shift_gap = max(occ[b] - occ[a] for a, b in zip(ts, ts[1:]))
            worst_shift = shift_gap if worst_shift is None else max(worst_shift, shift_gap)
        stats.append(ElementGap(g, len(ts), step_gap, shift_gap))
    l_star = Fraction(worst_shift, len(w)) if worst_shift is not None else None
    return GapScanReport(
        base=w,
        window_length=len(segment),
        element_stats=tuple(stats),
        unobserved=tuple(unobserved),
        l_star_proxy=l_star,
    )
