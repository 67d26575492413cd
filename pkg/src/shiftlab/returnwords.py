"""Return words of a base word and the derived index sequence.

A return word R of w satisfies: Rw begins and ends with w and contains no
other occurrence of w. Scanning a window for consecutive occurrence starts
of w yields the returns in order; distinct returns are interned by first
occurrence, and the index sequence over {1..N} is the derived sequence.
An incomplete trailing return (window ends mid-return) is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .words import Alphabet, OrbitSegment, Word, occurrences


@dataclass(frozen=True)
class ReturnWordSystem:
    """Base word, its distinct return words, and the derived sequence."""

    base: Word
    returns: tuple[Word, ...]  # indexed 1..N by first occurrence
    derived: tuple[int, ...]  # values in 1..N
    occurrence_starts: tuple[int, ...]  # starts of the base word in the source window

    def __post_init__(self):
        if not self.returns:
            raise ValueError("a return word system needs at least one return word")
        if len(set(r.letters for r in self.returns)) != len(self.returns):
            raise ValueError("return words must be distinct")
        if any(not 1 <= e <= len(self.returns) for e in self.derived):
            raise ValueError("derived indices out of range")

    @property
    def count(self) -> int:
        return len(self.returns)

    def return_word(self, index: int) -> Word:
        return self.returns[index - 1]

    def reconstruction(self) -> Word:
        """Concatenation of returns per the derived sequence."""
        out = b"".join(self.returns[e - 1].letters for e in self.derived)
        return Word(self.base.alphabet, out)


def return_words(segment: OrbitSegment, w: Word) -> ReturnWordSystem:
    """Extract the return words of w and the derived sequence from a window."""
    starts = occurrences(segment, w)
    if len(starts) < 3:
        raise ValueError(
            f"window too short: {w.text!r} occurs only {len(starts)} times, need >= 3"
        )
    interned: dict[bytes, int] = {}
    returns: list[Word] = []
    derived: list[int] = []
    data = segment.data
    for a, b in zip(starts, starts[1:]):
        chunk = data[a:b]
        idx = interned.get(chunk)
        if idx is None:
            idx = len(returns) + 1
            interned[chunk] = idx
            returns.append(Word(segment.alphabet, chunk))
        derived.append(idx)

    system = ReturnWordSystem(w, tuple(returns), tuple(derived), tuple(starts))
    _check_system(segment, system)
    return system


def _check_system(segment: OrbitSegment, system: ReturnWordSystem) -> None:
    w = system.base
    for r in system.returns:
        rw = r.concat(w)
        if rw.letters[: len(w)] != w.letters or rw.letters[-len(w) :] != w.letters:
            raise AssertionError(f"return word {r.text} does not frame {w.text}")
        inner = rw.letters.find(w.letters, 1)
        if inner != len(r):
            raise AssertionError(f"return word {r.text} contains an interior {w.text}")
    first = system.occurrence_starts[0]
    rebuilt = system.reconstruction().letters
    source = segment.data[first : first + len(rebuilt)]
    if rebuilt != source:
        raise AssertionError("derived sequence does not reconstruct the window")


def derived_alphabet(system: ReturnWordSystem) -> Alphabet:
    return Alphabet(tuple(str(i) for i in range(1, system.count + 1)))


def derived_segment(system: ReturnWordSystem) -> OrbitSegment:
    """The derived index sequence as a first-class segment over {1..N}."""
    alph = derived_alphabet(system)
    letters = bytes(e - 1 for e in system.derived)
    return OrbitSegment(Word(alph, letters))


@dataclass(frozen=True)
class ReturnBoundReport:
    """Empirical check of N <= L(L+1)^2 and max |R| <= L |w|."""

    l_hat: Fraction
    return_count: int
    count_bound: Fraction
    count_ok: bool
    max_length: int
    length_bound: Fraction
    length_ok: bool

    @property
    def holds(self) -> bool:
        return self.count_ok and self.length_ok


def return_bound_check(system: ReturnWordSystem, l_hat: Fraction) -> ReturnBoundReport:
    count_bound = l_hat * (l_hat + 1) ** 2
    max_len = max(len(r) for r in system.returns)
    length_bound = l_hat * len(system.base)
    return ReturnBoundReport(
        l_hat=l_hat,
        return_count=system.count,
        count_bound=count_bound,
        count_ok=system.count <= count_bound,
        max_length=max_len,
        length_bound=length_bound,
        length_ok=max_len <= length_bound,
    )


def max_derived_gap(system: ReturnWordSystem) -> dict[int, int]:
    """Largest gap, in derived letters, between reoccurrences of each index."""
    last: dict[int, int] = {}
    gaps: dict[int, int] = {}
    for pos, e in enumerate(system.derived):
        if e in last:
            gaps[e] = max(gaps.get(e, 0), pos - last[e])
        last[e] = pos
    return gaps


def format_system(system: ReturnWordSystem) -> str:
    """Plain text: base word, one return word per line, derived indices."""
    lines = [f"base {system.base.text}"]
    lines += [f"return {i} {r.text}" for i, r in enumerate(system.returns, 1)]
    lines.append("derived " + " ".join(str(e) for e in system.derived))
    return "\n".join(lines) + "\n"
