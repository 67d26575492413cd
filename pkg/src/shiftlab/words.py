"""Alphabets, finite words, and occurrence scanning over long orbit windows.

Symbols are interned to small integer indices at construction time; all
scanning runs on the index sequences (stored as ``bytes``), so comparisons
are independent of symbol length.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class AlphabetMismatchError(ValueError):
    """Two words/segments built over different alphabets were combined."""


class OutOfWindowError(IndexError):
    """A query reached beyond the finite window instead of truncating."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct symbols, each a short text token."""

    symbols: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be distinct")
        if len(self.symbols) > 256:
            raise ValueError("alphabets beyond 256 symbols are not supported")
        for s in self.symbols:
            if not s or any(c in s for c in (",", " ", "\t", "\n")):
                raise ValueError(f"bad symbol {s!r}: must be non-empty, no commas or whitespace")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} not in alphabet {self.symbols}") from None

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def word(self, text: str) -> "Word":
        """Parse a word from plain text.

        Single-character alphabets read one symbol per character;
        otherwise symbols are comma-separated.
        """
        if "," in text or not self.single_char:
            parts = [p for p in text.split(",") if p]
        else:
            parts = list(text)
        return self.word_of(parts)

    def word_of(self, symbols) -> "Word":
        return Word(self, bytes(self.index(s) for s in symbols))


def binary_alphabet() -> Alphabet:
    return Alphabet(("0", "1"))


@dataclass(frozen=True)
class Word:
    """Finite non-empty word, stored as symbol indices into its alphabet."""

    alphabet: Alphabet
    letters: bytes

    def __post_init__(self):
        if len(self.letters) == 0:
            raise ValueError("empty words are excluded")
        n = len(self.alphabet)
        if any(b >= n for b in self.letters):
            raise ValueError("letter index out of range for alphabet")

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, i: int) -> int:
        return self.letters[i]

    def symbol(self, i: int) -> str:
        return self.alphabet.symbols[self.letters[i]]

    @property
    def text(self) -> str:
        syms = [self.alphabet.symbols[b] for b in self.letters]
        if self.alphabet.single_char:
            return "".join(syms)
        return ",".join(syms)

    def concat(self, other: "Word") -> "Word":
        if other.alphabet != self.alphabet:
            raise AlphabetMismatchError("cannot concatenate over different alphabets")
        return Word(self.alphabet, self.letters + other.letters)

    def slice(self, start: int, stop: int) -> "Word":
        if not (0 <= start < stop <= len(self.letters)):
            raise OutOfWindowError(f"slice [{start}:{stop}) out of word of length {len(self)}")
        return Word(self.alphabet, self.letters[start:stop])

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class OrbitSegment:
    """A long finite window of a point, the substrate for all scans.

    ``origin`` records where position 0 of the window sits in the ambient
    bi-infinite sequence; indices passed to accessors are window-local.
    """

    word: Word
    origin: int = 0

    @property
    def alphabet(self) -> Alphabet:
        return self.word.alphabet

    @property
    def data(self) -> bytes:
        return self.word.letters

    def __len__(self) -> int:
        return len(self.word)

    def letter(self, i: int) -> int:
        if not 0 <= i < len(self):
            raise OutOfWindowError(f"index {i} outside window [0, {len(self)})")
        return self.word.letters[i]

    def symbol(self, i: int) -> str:
        return self.alphabet.symbols[self.letter(i)]

    def window(self, start: int, length: int) -> Word:
        """The length-`length` subword starting at `start`; never truncates."""
        if length < 1:
            raise ValueError("window length must be >= 1")
        if start < 0 or start + length > len(self):
            raise OutOfWindowError(
                f"window [{start}, {start + length}) outside segment of length {len(self)}"
            )
        return Word(self.alphabet, self.word.letters[start : start + length])

    def centered(self, i: int, radius: int) -> Word:
        """The (2*radius+1)-word centered at index i."""
        return self.window(i - radius, 2 * radius + 1)

    def prefix(self, length: int) -> "OrbitSegment":
        if not 1 <= length <= len(self):
            raise OutOfWindowError(f"prefix length {length} outside [1, {len(self)}]")
        return OrbitSegment(Word(self.alphabet, self.word.letters[:length]), self.origin)

    @property
    def text(self) -> str:
        return self.word.text


def segment_from_text(alphabet: Alphabet, text: str, origin: int = 0) -> OrbitSegment:
    return OrbitSegment(alphabet.word(text), origin)


def occurrences(segment: OrbitSegment, w: Word) -> list[int]:
    """All start indices of w in the window, increasing, overlaps included."""
    if w.alphabet != segment.alphabet:
        raise AlphabetMismatchError("word and segment use different alphabets")
    if len(w) > len(segment):
        raise ValueError(f"pattern of length {len(w)} longer than window {len(segment)}")
    data, pat = segment.data, w.letters
    out: list[int] = []
    i = data.find(pat)
    while i != -1:
        out.append(i)
        i = data.find(pat, i + 1)
    return out


def subwords(segment: OrbitSegment, n: int) -> set[Word]:
    """The exact set of distinct length-n factors fully inside the window."""
    if not 1 <= n <= len(segment):
        raise ValueError(f"factor length {n} outside [1, {len(segment)}]")
    alph, data = segment.alphabet, segment.data
    return {Word(alph, chunk) for chunk in factor_bytes(data, n)}


def factor_bytes(data: bytes, n: int) -> set[bytes]:
    """Distinct length-n slices of raw index data (internal fast path)."""
    return {data[i : i + n] for i in range(len(data) - n + 1)}
