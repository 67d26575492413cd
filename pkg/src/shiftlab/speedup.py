"""Jump functions and the induced speedup map S = sigma^p on orbit windows.

A jump function is constant on centered (2K+1)-cylinders, given either as a
lookup table over (2K+1)-words or as the degenerate `constant k` form. All
homeomorphism-style checks (totality, injectivity, surjectivity) are finite
window certificates: they are evaluated on the full window and on its half,
and a jump is accepted only when both agree. Failures are always sound;
passes are desk-scale evidence, not proofs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .shifts import ComplexityProfile, WindowTooShortError, complexity, stabilized_factor_sets
from .words import Alphabet, OrbitSegment, Word, factor_bytes


class JumpTotalityError(ValueError):
    """A centered word observed in the window has no jump value."""

    def __init__(self, word_text: str):
        self.word_text = word_text
        super().__init__(f"no jump value for observed word {word_text!r}")


class MarginError(ValueError):
    """An index lacks the margin needed to evaluate the jump function."""


@dataclass(frozen=True, eq=False)
class JumpFunction:
    """p: X -> {1, 2, ...}, constant on centered (2*radius+1)-cylinders."""

    alphabet: Alphabet
    radius: int
    constant: int | None = None
    table: Mapping[bytes, int] | None = None

    def __post_init__(self):
        if (self.constant is None) == (self.table is None):
            raise ValueError("exactly one of constant/table must be given")
        if self.constant is not None:
            if self.constant < 1:
                raise ValueError("jump values must be >= 1")
            if self.radius != 0:
                raise ValueError("constant jumps have radius 0")
        else:
            if not self.table:
                raise ValueError("empty jump table")
            width = 2 * self.radius + 1
            for key, value in self.table.items():
                if len(key) != width:
                    raise ValueError(f"table key of length {len(key)}, expected {width}")
                if value < 1:
                    raise ValueError("jump values must be >= 1")

    @classmethod
    def constant_jump(cls, alphabet: Alphabet, k: int) -> "JumpFunction":
        return cls(alphabet, 0, constant=k)

    @classmethod
    def from_table(cls, alphabet: Alphabet, mapping: Mapping[Word, int]) -> "JumpFunction":
        if not mapping:
            raise ValueError("empty jump table")
        radius = (len(next(iter(mapping))) - 1) // 2
        table = {}
        for word, value in mapping.items():
            if word.alphabet != alphabet:
                raise ValueError("table word over wrong alphabet")
            table[word.letters] = value
        return cls(alphabet, radius, table=table)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    @property
    def p_max(self) -> int:
        """Largest declared jump value."""
        if self.constant is not None:
            return self.constant
        return max(self.table.values())

    def value_of(self, word: Word) -> int:
        if self.constant is not None:
            return self.constant
        if word.alphabet != self.alphabet:
            raise ValueError("word over wrong alphabet")
        if len(word) != 2 * self.radius + 1:
            raise ValueError(f"need a centered {2 * self.radius + 1}-word")
        value = self.table.get(word.letters)
        if value is None:
            raise JumpTotalityError(word.text)
        return value

    def table_words(self) -> dict[Word, int]:
        if self.constant is not None:
            return {}
        return {Word(self.alphabet, k): v for k, v in self.table.items()}


def parse_jump(text: str, alphabet: Alphabet) -> JumpFunction:
    """Jump file format: `constant <k>` or `K <int>` then `<word> <int>` lines."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty jump file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("first line must be `constant <int>` or `K <int>`")
    kind, arg = head
    if kind == "constant":
        if len(lines) > 1:
            raise ValueError("constant jumps take no table lines")
        return JumpFunction.constant_jump(alphabet, int(arg))
    if kind != "K":
        raise ValueError("first line must be `constant <int>` or `K <int>`")
    radius = int(arg)
    table: dict[bytes, int] = {}
    for line in lines[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad table line {line!r}")
        word = alphabet.word(parts[0])
        if len(word) != 2 * radius + 1:
            raise ValueError(f"table word {parts[0]!r} is not a {2 * radius + 1}-word")
        if word.letters in table:
            raise ValueError(f"duplicate table entry for {parts[0]!r}")
        table[word.letters] = int(parts[1])
    if not table:
        raise ValueError("table jump with no entries")
    return JumpFunction(alphabet, radius, table=table)


def format_jump(jump: JumpFunction) -> str:
    if jump.is_constant:
        return f"constant {jump.constant}\n"
    lines = [f"K {jump.radius}"]
    for key in sorted(jump.table):
        lines.append(f"{Word(jump.alphabet, key).text} {jump.table[key]}")
    return "\n".join(lines) + "\n"


def jump_values(segment: OrbitSegment, jump: JumpFunction) -> list[int | None]:
    """Per-index jump values; None outside the interior or missing from the table."""
    if segment.alphabet != jump.alphabet:
        raise ValueError("segment and jump use different alphabets")
    length = len(segment)
    if jump.constant is not None:
        return [jump.constant] * length
    k = jump.radius
    data, table = segment.data, jump.table
    values: list[int | None] = [None] * length
    width = 2 * k + 1
    for i in range(k, length - k):
        values[i] = table.get(data[i - k : i - k + width])
    return values


def missing_jump_words(segment: OrbitSegment, jump: JumpFunction) -> list[Word]:
    """Observed centered words with no table entry, in first-occurrence order."""
    if jump.constant is not None:
        return []
    k = jump.radius
    data = segment.data
    seen: set[bytes] = set()
    out: list[Word] = []
    width = 2 * k + 1
    for i in range(k, len(segment) - k):
        key = data[i - k : i - k + width]
        if key not in jump.table and key not in seen:
            seen.add(key)
            out.append(Word(segment.alphabet, key))
    return out


@dataclass(frozen=True, eq=False)
class LandingMap:
    """Landing targets i + p(i) for every interior index of a window."""

    segment: OrbitSegment
    jump: JumpFunction
    values: tuple[int | None, ...]

    @property
    def interior(self) -> range:
        k = self.jump.radius
        return range(k, len(self.segment) - k)

    def landing(self, i: int) -> int:
        if i not in self.interior:
            raise MarginError(f"index {i} lacks margin {self.jump.radius}")
        value = self.values[i]
        if value is None:
            raise JumpTotalityError(self.segment.centered(i, self.jump.radius).text)
        return i + value

    def exits(self, i: int) -> bool:
        """Does the landing from i leave the interior (margin exhausted)?"""
        return self.landing(i) not in self.interior


def landing_map(segment: OrbitSegment, jump: JumpFunction) -> LandingMap:
    return LandingMap(segment, jump, tuple(jump_values(segment, jump)))


@dataclass(frozen=True)
class WindowCheck:
    """One window's worth of homeomorphism evidence."""

    window_length: int
    total: bool
    missing: tuple[str, ...]
    p_max_observed: int
    injective: bool
    collisions: tuple[tuple[int, int, int], ...]  # (i, j, shared target)
    surjective: bool
    uncovered: tuple[int, ...]

    @property
    def bijective(self) -> bool:
        return self.total and self.injective and self.surjective


@dataclass(frozen=True)
class JumpValidationReport:
    """Totality / p_max / injectivity / surjectivity on two window sizes.

    `homeomorphic` certifies only the orbit-window shadow of the semantic
    conditions: all four checks passed on both the half and full window.
    """

    p_max_declared: int
    half: WindowCheck
    full: WindowCheck

    @property
    def p_max_observed(self) -> int:
        return self.full.p_max_observed

    @property
    def bijective(self) -> bool:
        return self.full.bijective

    @property
    def homeomorphic(self) -> bool:
        return self.half.bijective and self.full.bijective

    def summary(self) -> str:
        w = self.full
        lines = [
            f"window {w.window_length} (half {self.half.window_length})",
            f"total: {w.total}" + (f" missing={list(w.missing)[:5]}" if w.missing else ""),
            f"p_max: declared {self.p_max_declared}, observed {w.p_max_observed}",
            f"injective: {w.injective}"
            + (f" collisions={list(w.collisions)[:5]}" if w.collisions else ""),
            f"surjective: {w.surjective}"
            + (f" uncovered={list(w.uncovered)[:5]}" if w.uncovered else ""),
            f"homeomorphic (both windows): {self.homeomorphic}",
        ]
        return "\n".join(lines)


def _check_window(segment: OrbitSegment, jump: JumpFunction) -> WindowCheck:
    values = jump_values(segment, jump)
    k = jump.radius
    length = len(segment)
    missing = tuple(w.text for w in missing_jump_words(segment, jump))
    defined = [v for v in values[k : length - k] if v is not None]
    p_obs = max(defined) if defined else 0

    collisions: list[tuple[int, int, int]] = []
    seen: dict[int, int] = {}
    for i in range(k, length - k):
        v = values[i]
        if v is None:
            continue
        t = i + v
        if t in seen:
            collisions.append((seen[t], i, t))
        else:
            seen[t] = i

    uncovered: list[int] = []
    if p_obs:
        core_lo = k + max(jump.p_max, p_obs)
        for t in range(core_lo, length - k):
            if t not in seen:
                uncovered.append(t)

    return WindowCheck(
        window_length=length,
        total=not missing,
        missing=missing,
        p_max_observed=p_obs,
        injective=not collisions,
        collisions=tuple(collisions[:20]),
        surjective=not uncovered,
        uncovered=tuple(uncovered[:20]),
    )


def validate_jump(jump: JumpFunction, segment: OrbitSegment) -> JumpValidationReport:
    """Certify totality, p_max, injectivity and surjectivity on L and L/2.

    Raises WindowTooShortError when the (2K+1)-factor set of the window has
    not stabilized, since totality of the table cannot be judged then.
    """
    if not jump.is_constant:
        stabilized_factor_sets(segment, 2 * jump.radius + 1)
    half = segment.prefix(max(len(segment) // 2, 2 * jump.radius + 1))
    return JumpValidationReport(
        p_max_declared=jump.p_max,
        half=_check_window(half, jump),
        full=_check_window(segment, jump),
    )


def s_orbit(segment: OrbitSegment, jump: JumpFunction, start: int) -> list[int]:
    """Landing indices from `start`, following i -> i + p(i) until the margin runs out."""
    lm = landing_map(segment, jump)
    if start not in lm.interior:
        raise MarginError(f"start {start} lacks margin {jump.radius}")
    out = [start]
    i = start
    while True:
        t = lm.landing(i)
        if t not in lm.interior:
            return out
        out.append(t)
        i = t


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(eq=False)
class OrbitColoring:
    """Partition of interior indices into S-orbit classes.

    Class labels 1..c are assigned by first appearance inside a canonical
    central window of width p_max, so every analysis over one window uses
    one consistent numbering.
    """

    segment: OrbitSegment
    jump: JumpFunction
    labels: tuple[int | None, ...]
    class_count: int
    canonical_window: tuple[int, int]
    p_max_observed: int

    def label_of(self, i: int) -> int:
        label = self.labels[i]
        if label is None:
            raise MarginError(f"index {i} is uncolored (outside interior or boundary fragment)")
        return label

    def landings_by_class(self) -> list[list[int]]:
        """Sorted landing indices per class label (cached; orbit order)."""
        cached = getattr(self, "_by_class", None)
        if cached is None:
            cached = [[] for _ in range(self.class_count)]
            for i, lab in enumerate(self.labels):
                if lab is not None:
                    cached[lab - 1].append(i)
            self._by_class = cached
        return cached

    def landings_of(self, label: int) -> list[int]:
        return self.landings_by_class()[label - 1]

    def diffs_by_class(self) -> list[bytes]:
        """Consecutive landing gaps per class, as bytes (cached)."""
        cached = getattr(self, "_diffs", None)
        if cached is None:
            cached = [
                bytes(b - a for a, b in zip(landings, landings[1:]))
                for landings in self.landings_by_class()
            ]
            self._diffs = cached
        return cached


def orbit_coloring(segment: OrbitSegment, jump: JumpFunction) -> OrbitColoring:
    values = jump_values(segment, jump)
    k = jump.radius
    length = len(segment)
    lo, hi = k, length - k
    if hi <= lo:
        raise WindowTooShortError(2 * k + 1, "window shorter than jump margins")
    dsu = _DSU(length)
    for i in range(lo, hi):
        v = values[i]
        if v is None:
            raise JumpTotalityError(segment.centered(i, k).text)
        t = i + v
        if t < hi:
            dsu.union(i, t)

    p_obs = max(v for v in values[lo:hi] if v is not None)
    mid = max(lo, min((length - p_obs) // 2, hi - p_obs))
    root_to_label: dict[int, int] = {}
    for i in range(mid, min(mid + p_obs, hi)):
        root = dsu.find(i)
        if root not in root_to_label:
            root_to_label[root] = len(root_to_label) + 1

    labels: list[int | None] = [None] * length
    for i in range(lo, hi):
        labels[i] = root_to_label.get(dsu.find(i))
    return OrbitColoring(
        segment,
        jump,
        tuple(labels),
        class_count=len(root_to_label),
        canonical_window=(mid, mid + p_obs),
        p_max_observed=p_obs,
    )


def orbit_number(segment: OrbitSegment, jump: JumpFunction) -> int:
    """Number of S-orbit classes meeting the canonical central window.

    Verified stable under window doubling; requires a jump already known to
    be bijective on the window (run validate_jump first).
    """
    full = orbit_coloring(segment, jump)
    half = orbit_coloring(segment.prefix(max(len(segment) // 2, 2 * jump.radius + 2)), jump)
    if full.class_count != half.class_count:
        raise WindowTooShortError(
            0, f"orbit count differs between windows: {half.class_count} vs {full.class_count}"
        )
    c = full.class_count
    assert c <= jump.p_max, "orbit count exceeded p_max; jump is not bijective"
    return c


@dataclass(frozen=True)
class SPattern:
    """Concrete word of the speedup: spanned sigma-word plus landing offsets.

    The spanned word runs from the first landing to just before the landing
    after the last one, extended by the margin on both sides; offsets are
    landing positions relative to the spanned word, so offsets[0] equals
    the margin. Two patterns are equal iff both components are.
    """

    spanned: Word
    offsets: tuple[int, ...]

    def __post_init__(self):
        if not self.offsets:
            raise ValueError("a pattern needs at least one landing")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise ValueError("offsets must be strictly increasing")
        if self.offsets[0] < 0 or self.offsets[-1] >= len(self.spanned):
            raise ValueError("offsets outside spanned word")

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def margin(self) -> int:
        return self.offsets[0]

    def check_against(self, jump: JumpFunction) -> bool:
        """Do consecutive offset gaps equal the jump values read off the word?"""
        if self.margin < jump.radius:
            return False
        gaps = [b - a for a, b in zip(self.offsets, self.offsets[1:])]
        for t, gap in enumerate(gaps):
            centered = self.spanned.slice(
                self.offsets[t] - jump.radius, self.offsets[t] + jump.radius + 1
            )
            if jump.value_of(centered) != gap:
                return False
        return True


def pattern_at(
    segment: OrbitSegment,
    jump: JumpFunction,
    start: int,
    n: int,
    margin: int | None = None,
) -> SPattern:
    """The length-n pattern whose first landing is `start`."""
    if margin is None:
        margin = jump.radius
    lm = landing_map(segment, jump)
    landings = [start]
    for _ in range(n):
        landings.append(lm.landing(landings[-1]))
    lo, hi = landings[0] - margin, landings[-1] + margin
    if lo < 0 or hi > len(segment):
        raise MarginError(f"pattern at {start} needs window [{lo}, {hi})")
    spanned = segment.window(lo, hi - lo)
    offsets = tuple(l - lo for l in landings[:-1])
    return SPattern(spanned, offsets)


def _class_pattern_keys(
    data: bytes,
    landings: Sequence[int],
    n: int,
    margin: int,
    diffs: bytes | None = None,
) -> Iterable[tuple[int, tuple[bytes, bytes]]]:
    """(step index, hashable pattern key) for every full-margin n-pattern."""
    if len(landings) <= n:
        return
    if diffs is None:
        diffs = bytes(b - a for a, b in zip(landings, landings[1:]))
    top = len(data)
    for t in range(len(landings) - n):
        lo = landings[t] - margin
        hi = landings[t + n] + margin
        if lo < 0 or hi > top:
            continue
        yield t, (data[lo:hi], diffs[t : t + n])


def pattern_set(
    segment: OrbitSegment,
    jump: JumpFunction,
    n: int,
    margin: int | None = None,
    coloring: OrbitColoring | None = None,
) -> set[SPattern]:
    """All distinct length-n patterns observed in the window, over every class."""
    if margin is None:
        margin = jump.radius
    if coloring is None:
        coloring = orbit_coloring(segment, jump)
    alph, data = segment.alphabet, segment.data
    keys: set[tuple[bytes, bytes]] = set()
    all_diffs = coloring.diffs_by_class()
    for label, landings in enumerate(coloring.landings_by_class(), 1):
        for _, key in _class_pattern_keys(data, landings, n, margin, all_diffs[label - 1]):
            keys.add(key)
    out = set()
    for spanned, diffs in keys:
        offsets = [margin]
        for d in diffs[:-1]:
            offsets.append(offsets[-1] + d)
        out.add(SPattern(Word(alph, spanned), tuple(offsets)))
    return out


def _pattern_counts(segment: OrbitSegment, jump: JumpFunction, n_max: int, margin: int) -> list[int]:
    coloring = orbit_coloring(segment, jump)
    data = segment.data
    counts = []
    per_class = coloring.landings_by_class()
    all_diffs = coloring.diffs_by_class()
    for n in range(1, n_max + 1):
        keys: set[tuple[bytes, bytes]] = set()
        for landings, diffs in zip(per_class, all_diffs):
            for _, key in _class_pattern_keys(data, landings, n, margin, diffs):
                keys.add(key)
        counts.append(len(keys))
    return counts


def minimal_radius(jump: JumpFunction, observed: set[bytes]) -> int:
    """Smallest N <= radius such that observed values depend only on the
    centered (2N+1)-subword."""
    if jump.constant is not None:
        return 0
    k = jump.radius
    for n_small in range(k + 1):
        central: dict[bytes, int] = {}
        ok = True
        for key in observed:
            value = jump.table.get(key)
            if value is None:
                raise JumpTotalityError(Word(jump.alphabet, key).text)
            sub = key[k - n_small : k + n_small + 1]
            if central.setdefault(sub, value) != value:
                ok = False
                break
        if ok:
            return n_small
    return k


def reduce_radius(jump: JumpFunction, observed: set[bytes]) -> JumpFunction:
    """Rewrite the table over (2N+1)-words for the minimal N on this language."""
    n_small = minimal_radius(jump, observed)
    if jump.constant is not None or n_small == jump.radius:
        return jump
    k = jump.radius
    table: dict[bytes, int] = {}
    for key in observed:
        table[key[k - n_small : k + n_small + 1]] = jump.table[key]
    return JumpFunction(jump.alphabet, n_small, table=table)


@dataclass(frozen=True)
class SpeedupComplexityReport:
    """Distinct n-pattern counts with the cylinder-counting bound verdicts."""

    profile: ComplexityProfile
    base_profile: ComplexityProfile
    p_max: int
    cylinder_radius: int  # minimal N with p constant on (2N+1)-cylinders
    k_factor: int  # |A|^(2N) * p_max
    verdicts: tuple[bool, ...]

    @property
    def all_hold(self) -> bool:
        return all(self.verdicts)

    def bound_at(self, n: int) -> int:
        return self.k_factor * self.base_profile.count(self.p_max * n)


def speedup_complexity(
    segment: OrbitSegment, jump: JumpFunction, n_max: int
) -> SpeedupComplexityReport:
    """Count distinct S-patterns per length and check them against
    k_factor * base_complexity(p_max * n)."""
    report = validate_jump(jump, segment)
    if not report.bijective:
        raise ValueError("jump is not bijective on the window")
    margin = jump.radius
    full_counts = _pattern_counts(segment, jump, n_max, margin)
    half_counts = _pattern_counts(segment.prefix(len(segment) // 2), jump, n_max, margin)
    for n, (a, b) in enumerate(zip(half_counts, full_counts), 1):
        if a != b:
            raise WindowTooShortError(n, f"pattern count at n={n} not stabilized: {a} vs {b}")

    if jump.is_constant:
        observed: set[bytes] = set()
        n_cyl = 0
    else:
        observed = factor_bytes(segment.data, 2 * jump.radius + 1)
        n_cyl = minimal_radius(jump, observed)
    p_obs = report.p_max_observed
    k_factor = len(segment.alphabet) ** (2 * n_cyl) * p_obs
    base = complexity(segment, p_obs * n_max)
    verdicts = tuple(
        full_counts[n - 1] <= k_factor * base.count(p_obs * n) for n in range(1, n_max + 1)
    )
    return SpeedupComplexityReport(
        profile=ComplexityProfile(tuple(full_counts)),
        base_profile=base,
        p_max=p_obs,
        cylinder_radius=n_cyl,
        k_factor=k_factor,
        verdicts=verdicts,
    )


def first_return_jump(segment: OrbitSegment, max_radius: int = 8) -> JumpFunction:
    """Fit the first-return-time-to-[x_0] rule as a cylinder jump function.

    The value at index i is min{k >= 1 : segment[i+k] == segment[i]}. The
    smallest radius whose centered words determine that value is used.
    """
    data = segment.data
    length = len(segment)
    returns: list[int | None] = [None] * length
    for i in range(length):
        target = data[i]
        found = data.find(bytes([target]), i + 1)
        if found != -1:
            returns[i] = found - i
    for radius in range(max_radius + 1):
        table: dict[bytes, int] = {}
        width = 2 * radius + 1
        ok = True
        for i in range(radius, length - radius):
            r = returns[i]
            if r is None:
                continue
            key = data[i - radius : i - radius + width]
            if table.setdefault(key, r) != r:
                ok = False
                break
        if ok and table:
            return JumpFunction(segment.alphabet, radius, table=table)
    raise ValueError(f"first-return rule is not cylinder-constant within radius {max_radius}")
