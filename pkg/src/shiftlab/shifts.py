"""Generators for shift families: primitive substitution shifts and
Sturmian/mechanical words, plus exact word-complexity over windows.

Sturmian rotation numbers are represented by finite continued-fraction
truncations and evaluated with exact rationals; no floating point enters
letter generation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .words import (
    Alphabet,
    OrbitSegment,
    Word,
    binary_alphabet,
    factor_bytes,
)


class WindowTooShortError(ValueError):
    """Factor statistics did not stabilize under window doubling."""

    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"window too short: length-{n} factors not stabilized")


@dataclass(frozen=True)
class Substitution:
    """Morphism symbol -> word over a common alphabet."""

    alphabet: Alphabet
    images: tuple[Word, ...]

    def __post_init__(self):
        if len(self.images) != len(self.alphabet):
            raise ValueError("need exactly one image per symbol")
        for im in self.images:
            if im.alphabet != self.alphabet:
                raise ValueError("image over wrong alphabet")
        if not self.seed_candidates():
            raise ValueError("no self-prolongable seed symbol (no image starts with its own symbol)")

    def image(self, symbol: str) -> Word:
        return self.images[self.alphabet.index(symbol)]

    def seed_candidates(self) -> list[str]:
        """Symbols a with image(a) starting with a."""
        return [
            s
            for i, s in enumerate(self.alphabet.symbols)
            if self.images[i].letters[0] == i
        ]

    def incidence_matrix(self) -> list[list[int]]:
        """M[a][b] = number of occurrences of symbol b in image(a)."""
        k = len(self.alphabet)
        return [[self.images[a].letters.count(b) for b in range(k)] for a in range(k)]

    def apply(self, word: Word) -> Word:
        out = b"".join(self.images[b].letters for b in word.letters)
        return Word(self.alphabet, out)


def substitution(rules: dict[str, str], alphabet: Alphabet | None = None) -> Substitution:
    """Build a substitution from {symbol: image-text} rules."""
    if alphabet is None:
        alphabet = Alphabet(tuple(rules))
    images = tuple(alphabet.word(rules[s]) for s in alphabet.symbols)
    return Substitution(alphabet, images)


def parse_substitution(text: str) -> Substitution:
    """Parse the rule file format: one `symbol -> image` line per symbol."""
    rules: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected `symbol -> image`")
        lhs, rhs = (part.strip() for part in line.split("->", 1))
        if not lhs or not rhs:
            raise ValueError(f"line {lineno}: empty symbol or image")
        if lhs in rules:
            raise ValueError(f"line {lineno}: duplicate rule for {lhs!r}")
        rules[lhs] = rhs
    if not rules:
        raise ValueError("no substitution rules found")
    return substitution(rules)


def format_substitution(sub: Substitution) -> str:
    lines = [f"{s} -> {sub.image(s).text}" for s in sub.alphabet.symbols]
    return "\n".join(lines) + "\n"


def fibonacci() -> Substitution:
    return substitution({"0": "01", "1": "0"})


def thue_morse() -> Substitution:
    return substitution({"0": "01", "1": "10"})


def fixed_point_prefix(sub: Substitution, seed: str, length: int) -> OrbitSegment:
    """First `length` letters of the substitution fixed point grown from seed.

    Prefixes are nested: the result for a shorter length is a prefix of the
    result for any longer one.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    seed_idx = sub.alphabet.index(seed)
    if sub.images[seed_idx].letters[0] != seed_idx:
        raise ValueError(f"seed {seed!r} is not self-prolongable")
    images = [im.letters for im in sub.images]
    cur = bytes([seed_idx])
    while len(cur) < length:
        nxt = b"".join(images[b] for b in cur)
        if len(nxt) <= len(cur):
            raise ValueError(f"fixed point of seed {seed!r} stops growing at length {len(cur)}")
        cur = nxt[: max(length, 1)]
    return OrbitSegment(Word(sub.alphabet, cur[:length]))


@dataclass(frozen=True)
class SturmianSpec:
    """Rotation number as continued-fraction partial quotients, plus intercept.

    The quotients q1, q2, ... encode alpha = 1/(q1 + 1/(q2 + ...)) in (0, 1];
    the golden rotation is quotients (1,)*depth.
    """

    quotients: tuple[int, ...]
    intercept: Fraction = Fraction(0)

    def __post_init__(self):
        if not self.quotients:
            raise ValueError("need at least one partial quotient")
        if any(q < 1 for q in self.quotients):
            raise ValueError("partial quotients must be positive integers")
        if not 0 <= self.intercept < 1:
            raise ValueError("intercept must lie in [0, 1)")

    def alpha(self) -> Fraction:
        x = Fraction(0)
        for q in reversed(self.quotients):
            x = Fraction(1, q + x)
        return x


def mechanical_prefix(spec: SturmianSpec, length: int) -> OrbitSegment:
    """Mechanical 0/1 word: s_n = floor((n+1)a + b) - floor(na + b), exact."""
    if length < 1:
        raise ValueError("length must be >= 1")
    a, b = spec.alpha(), spec.intercept
    prev = _floor(b)
    out = bytearray()
    for n in range(length):
        cur = _floor((n + 1) * a + b)
        out.append(cur - prev)
        prev = cur
    return OrbitSegment(Word(binary_alphabet(), bytes(out)))


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


@dataclass(frozen=True)
class PrimitivityReport:
    primitive: bool
    witness_power: int | None


def primitivity_check(sub: Substitution) -> PrimitivityReport:
    """Is some power of the incidence matrix entrywise positive?

    The search stops at the Wielandt bound (k-1)^2 + 1, which suffices for
    primitive k x k non-negative matrices.
    """
    k = len(sub.alphabet)
    m = [[1 if c > 0 else 0 for c in row] for row in sub.incidence_matrix()]
    bound = (k - 1) ** 2 + 1
    power = [row[:] for row in m]
    for p in range(1, bound + 1):
        if all(all(c for c in row) for row in power):
            return PrimitivityReport(True, p)
        power = _bool_matmul(power, m)
    return PrimitivityReport(False, None)


def _bool_matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    k = len(a)
    return [
        [1 if any(a[i][t] and b[t][j] for t in range(k)) else 0 for j in range(k)]
        for i in range(k)
    ]


@dataclass(frozen=True)
class ComplexityProfile:
    """Exact counts of distinct length-n factors, n = 1..n_max."""

    counts: tuple[int, ...]  # counts[i] is the value at n = i + 1

    def count(self, n: int) -> int:
        if not 1 <= n <= len(self.counts):
            raise ValueError(f"complexity known only for n in [1, {len(self.counts)}]")
        return self.counts[n - 1]

    @property
    def n_max(self) -> int:
        return len(self.counts)

    def as_csv(self) -> str:
        lines = ["n,count"]
        lines += [f"{n},{c}" for n, c in enumerate(self.counts, 1)]
        return "\n".join(lines) + "\n"


def complexity(segment: OrbitSegment, n_max: int) -> ComplexityProfile:
    """Factor counts of the underlying shift, certified by window doubling.

    Counts are accepted only if the half window already shows the same
    numbers; otherwise the first offending n is reported.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    data = segment.data
    half = data[: len(data) // 2]
    if n_max > len(half):
        raise WindowTooShortError(n_max, f"window of length {len(data)} cannot certify n={n_max}")
    counts = []
    for n in range(1, n_max + 1):
        full_n = len(factor_bytes(data, n))
        half_n = len(factor_bytes(half, n))
        if full_n != half_n:
            raise WindowTooShortError(n)
        counts.append(full_n)
    for n in range(1, n_max):
        if counts[n] < counts[n - 1]:
            raise WindowTooShortError(n + 1, f"factor count drops at n={n + 1}; window artifact")
    return ComplexityProfile(tuple(counts))


def stabilized_factor_sets(segment: OrbitSegment, n_max: int) -> None:
    """Raise unless length-n factor *sets* agree on half and full window."""
    data = segment.data
    half = data[: len(data) // 2]
    if n_max > len(half):
        raise WindowTooShortError(n_max, f"window of length {len(data)} cannot certify n={n_max}")
    for n in range(1, n_max + 1):
        if factor_bytes(data, n) != factor_bytes(half, n):
            raise WindowTooShortError(n)
