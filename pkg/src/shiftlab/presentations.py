"""Transition-graph presentations of SFTs and sofic shifts, higher-block
recoding, and the constructive speedup of both.

The speedup of a vertex-labeled (SFT) presentation recodes to M-blocks for
M = 2*max(p_max, N) + 1, where N is the minimal radius on which the jump is
cylinder-constant over the presentation's language, then draws one edge per
admissible path of length p(v) out of each block v. The sofic construction
is the same with edge labels. Languages of the sped-up graphs can be
canonicalized to S-patterns and compared exactly against brute-force
enumeration on long admissible sequences.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .speedup import JumpFunction, JumpTotalityError, SPattern, reduce_radius
from .words import Alphabet, OrbitSegment, Word


@dataclass(frozen=True)
class SftPresentation:
    """Vertex-labeled directed graph; labels are words over a base alphabet."""

    vertices: tuple[Word, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("presentation needs at least one vertex")
        if len({v.letters for v in self.vertices}) != len(self.vertices):
            raise ValueError("vertex labels must be distinct")
        n = len(self.vertices)
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references a missing vertex")

    @property
    def alphabet(self) -> Alphabet:
        return self.vertices[0].alphabet

    def out_map(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {i: [] for i in range(len(self.vertices))}
        for a, b in sorted(self.edges):
            out[a].append(b)
        return out


@dataclass(frozen=True)
class SoficPresentation:
    """Edge-labeled directed graph; vertices are bare names."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[int, int, str]]

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("presentation needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("vertex names must be distinct")
        n = len(self.vertices)
        for a, b, _ in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("edge references a missing vertex")

    def symbols(self) -> tuple[str, ...]:
        return tuple(sorted({sym for _, _, sym in self.edges}))

    def out_map(self) -> dict[int, list[tuple[int, str]]]:
        out: dict[int, list[tuple[int, str]]] = {i: [] for i in range(len(self.vertices))}
        for a, b, sym in sorted(self.edges):
            out[a].append((b, sym))
        return out


Presentation = SftPresentation | SoficPresentation


def golden_mean_sft() -> SftPresentation:
    """Binary SFT forbidding the word 11."""
    alph = Alphabet(("0", "1"))
    v0, v1 = alph.word("0"), alph.word("1")
    return SftPresentation((v0, v1), frozenset({(0, 0), (0, 1), (1, 0)}))

def full_shift_sft(symbols: tuple[str, ...]) -> SftPresentation:
    alph = Alphabet(symbols)
    vertices = tuple(alph.word(s) for s in symbols)
    n = len(symbols)
    return SftPresentation(vertices, frozenset((a, b) for a in range(n) for b in range(n)))


def even_shift_sofic() -> SoficPresentation:
    """Binary sofic shift: blocks of 0s between 1s have even length."""
    return SoficPresentation(
        ("in", "odd"),
        frozenset({(0, 0, "1"), (0, 1, "0"), (1, 0, "0")}),
    )


def sft_to_sofic(sft: SftPresentation) -> SoficPresentation:
    """View a vertex-labeled graph as edge-labeled: each edge reads its target."""
    names = tuple(v.text for v in sft.vertices)
    edges = frozenset((a, b, sft.vertices[b].text) for a, b in sft.edges)
    return SoficPresentation(names, edges)


def is_essential(pres: Presentation) -> bool:
    n = len(pres.vertices)
    has_out, has_in = [False] * n, [False] * n
    for edge in pres.edges:
        has_out[edge[0]] = True
        has_in[edge[1]] = True
    return all(has_out) and all(has_in)


def prune(pres: Presentation):
    """Drop vertices without incoming or outgoing edges until none remain."""
    keep = list(range(len(pres.vertices)))
    edges = set(pres.edges)
    while True:
        has_out = {e[0] for e in edges}
        has_in = {e[1] for e in edges}
        alive = [i for i in keep if i in has_out and i in has_in]
        if alive == keep:
            break
        alive_set = set(alive)
        edges = {e for e in edges if e[0] in alive_set and e[1] in alive_set}
        keep = alive
    if not keep:
        raise ValueError("presentation has no bi-infinite paths")
    index = {old: new for new, old in enumerate(keep)}
    if isinstance(pres, SftPresentation):
        return SftPresentation(
            tuple(pres.vertices[i] for i in keep),
            frozenset((index[a], index[b]) for a, b in edges),
        )
    return SoficPresentation(
        tuple(pres.vertices[i] for i in keep),
        frozenset((index[a], index[b], sym) for a, b, sym in edges),
    )


def language_of_presentation(pres: Presentation, n: int) -> set[Word]:
    """Exact set of length-n label words along paths of an essential graph."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(pres, SftPresentation):
        alph = Alphabet(tuple(sorted(v.text for v in pres.vertices)))
        out = pres.out_map()
        frontier: set[tuple[int, bytes]] = {
            (i, bytes([alph.index(pres.vertices[i].text)])) for i in range(len(pres.vertices))
        }
        for _ in range(n - 1):
            nxt = set()
            for v, word in frontier:
                for u in out[v]:
                    nxt.add((u, word + bytes([alph.index(pres.vertices[u].text)])))
            frontier = nxt
        return {Word(alph, word) for _, word in frontier}
    alph = Alphabet(pres.symbols())
    out = pres.out_map()
    frontier = {(i, b"") for i in range(len(pres.vertices))}
    for _ in range(n):
        nxt = set()
        for v, word in frontier:
            for u, sym in out[v]:
                nxt.add((u, word + bytes([alph.index(sym)])))
        frontier = nxt
    return {Word(alph, word) for _, word in frontier if word}


def block_presentation(sft: SftPresentation, m: int) -> SftPresentation:
    """Higher-block recoding: vertices are admissible M-blocks, edges overlaps."""
    if m < 1:
        raise ValueError("block length must be >= 1")
    if any(len(v) != 1 for v in sft.vertices):
        raise ValueError("block recoding expects a 1-block (letter-labeled) presentation")
    if m == 1:
        return sft
    out = sft.out_map()
    paths: list[tuple[int, ...]] = [(i,) for i in range(len(sft.vertices))]
    for _ in range(m - 1):
        paths = [p + (u,) for p in paths for u in out[p[-1]]]
    if not paths:
        raise ValueError(f"no admissible {m}-block exists")
    paths.sort(key=lambda p: tuple(sft.vertices[i].letters[0] for i in p))
    alph = sft.alphabet
    labels = [
        Word(alph, bytes(sft.vertices[i].letters[0] for i in p)) for p in paths
    ]
    index = {p: i for i, p in enumerate(paths)}
    edge_set = set()
    for p, i in index.items():
        for u in out[p[-1]]:
            q = p[1:] + (u,)
            j = index.get(q)
            if j is not None:
                edge_set.add((i, j))
    return prune(SftPresentation(tuple(labels), frozenset(edge_set)))


def _observed_jump_words(pres: Presentation, jump: JumpFunction) -> set[bytes]:
    if jump.is_constant:
        return set()
    width = 2 * jump.radius + 1
    lang = language_of_presentation(pres, width)
    base = jump.alphabet
    observed = set()
    for w in lang:
        letters = bytes(base.index(w.symbol(i)) for i in range(len(w)))
        observed.add(letters)
    return observed


def minimized_jump_for(pres: Presentation, jump: JumpFunction) -> JumpFunction:
    """The jump rewritten over its minimal cylinder radius on this language."""
    observed = _observed_jump_words(pres, jump)
    if jump.is_constant:
        return jump
    for letters in observed:
        if letters not in jump.table:
            raise JumpTotalityError(Word(jump.alphabet, letters).text)
    return reduce_radius(jump, observed)


def _block_metrics(pres: Presentation, jump: JumpFunction) -> tuple[JumpFunction, int, int]:
    """(minimized jump, observed p_max, block length M)."""
    jmin = minimized_jump_for(pres, jump)
    if jump.is_constant:
        p_obs = jump.constant
    else:
        observed = _observed_jump_words(pres, jump)
        p_obs = max(jump.table[letters] for letters in observed)
    m = 2 * max(p_obs, jmin.radius) + 1
    return jmin, p_obs, m


def _block_jump_value(jmin: JumpFunction, block: Word) -> int:
    center = len(block) // 2
    if jmin.is_constant:
        return jmin.constant
    return jmin.value_of(block.slice(center - jmin.radius, center + jmin.radius + 1))


def speedup_sft(sft: SftPresentation, jump: JumpFunction) -> SftPresentation:
    """Vertex-labeled presentation of the sped-up SFT.

    Vertices are the admissible M-blocks; each block v gets one edge per
    admissible path of length p(v) out of it, landing on the block reached
    after p(v) shifts (parallel edges to the same block collapse).
    """
    pruned = prune(sft)
    jmin, p_obs, m = _block_metrics(pruned, jump)
    blocks = block_presentation(pruned, m)
    out = blocks.out_map()
    edge_set = set()
    for i, label in enumerate(blocks.vertices):
        steps = _block_jump_value(jmin, label)
        frontier = {i}
        for _ in range(steps):
            frontier = {u for v in frontier for u in out[v]}
        for u in frontier:
            edge_set.add((i, u))
    return prune(SftPresentation(blocks.vertices, frozenset(edge_set)))


def speedup_sofic(sofic: SoficPresentation, jump: JumpFunction) -> SoficPresentation:
    """Edge-labeled presentation of the sped-up sofic shift.

    Vertices are admissible M-edge-paths; from each path an edge per label
    path of length p, labeled by the M-block traversed at the landing.
    """
    pruned = prune(sofic)
    jmin, p_obs, m = _block_metrics(pruned, jump)
    out = pruned.out_map()
    base = jump.alphabet

    paths: list[tuple[tuple[int, int, str], ...]] = [
        ((a, b, sym),) for a, b, sym in sorted(pruned.edges)
    ]
    for _ in range(m - 1):
        paths = [
            p + ((p[-1][1], u, sym),)
            for p in paths
            for u, sym in out[p[-1][1]]
        ]
    if not paths:
        raise ValueError(f"no admissible {m}-edge path exists")
    paths.sort()
    index = {p: i for i, p in enumerate(paths)}

    def word_of(path) -> Word:
        return Word(base, bytes(base.index(sym) for _, _, sym in path))

    edge_set = set()
    for p, i in index.items():
        steps = _block_jump_value(jmin, word_of(p))
        frontier = {p}
        for _ in range(steps):
            frontier = {
                q + ((q[-1][1], u, sym),)
                for q in frontier
                for u, sym in out[q[-1][1]]
            }
        for q in frontier:
            target = q[-m:]
            j = index.get(target)
            if j is not None:
                edge_set.add((i, j, word_of(target).text))
    names = tuple(f"b{i}" for i in range(len(paths)))
    return prune(SoficPresentation(names, frozenset(edge_set)))


def speedup_presentation(pres: Presentation, jump: JumpFunction):
    if isinstance(pres, SftPresentation):
        return speedup_sft(pres, jump)
    return speedup_sofic(pres, jump)


def _reconstruct_pattern(
    blocks: list[Word], jmin: JumpFunction, base: Alphabet
) -> SPattern:
    """S-pattern of length n from n+1 consecutive landing blocks."""
    n = len(blocks) - 1
    m_half = len(blocks[0]) // 2
    jumps = [_block_jump_value(jmin, blocks[t]) for t in range(n)]
    landing = [0]
    for p in jumps:
        landing.append(landing[-1] + p)
    letters: dict[int, int] = {}
    for t, block in enumerate(blocks):
        for k in range(len(block)):
            pos = landing[t] - m_half + k
            old = letters.setdefault(pos, block[k])
            if old != block[k]:
                raise AssertionError("inconsistent block overlap along path")
    margin = jmin.radius
    lo, hi = -margin, landing[n] + margin
    spanned = Word(base, bytes(letters[pos] for pos in range(lo, hi)))
    offsets = tuple(landing[t] + margin for t in range(n))
    return SPattern(spanned, offsets)


def speedup_pattern_language(
    sped: Presentation, jmin: JumpFunction, n: int
) -> set[SPattern]:
    """All length-n S-patterns read along paths of a sped-up presentation.

    Each pattern needs n+1 consecutive landing blocks: the extra block
    supplies the letters past the last landing that the margin requires.
    """
    base = jmin.alphabet
    if isinstance(sped, SftPresentation):
        out = sped.out_map()
        frontier: set[tuple[int, tuple[int, ...]]] = {
            (v, (v,)) for v in range(len(sped.vertices))
        }
        for _ in range(n):
            frontier = {(u, path + (u,)) for v, path in frontier for u in out[v]}
        block_words = {path for _, path in frontier}
        return {
            _reconstruct_pattern([sped.vertices[i] for i in path], jmin, base)
            for path in block_words
        }
    out = sped.out_map()
    frontier2: set[tuple[int, tuple[str, ...]]] = {(v, ()) for v in range(len(sped.vertices))}
    for _ in range(n + 1):
        frontier2 = {(u, syms + (sym,)) for v, syms in frontier2 for u, sym in out[v]}
    sym_words = {syms for _, syms in frontier2}
    return {
        _reconstruct_pattern([base.word(sym) for sym in syms], jmin, base)
        for syms in sym_words
    }


def _bfs_path(adjacency: dict[int, list[int]], start: int, goal: int) -> list[int]:
    if start == goal:
        return [start]
    prev = {start: start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in adjacency[v]:
            if u not in prev:
                prev[u] = v
                if u == goal:
                    path = [u]
                    while path[-1] != start:
                        path.append(prev[path[-1]])
                    return path[::-1]
                queue.append(u)
    raise ValueError("presentation is not strongly connected; cannot build a spanning walk")


def spanning_walk(pres: Presentation, length: int) -> OrbitSegment:
    """One admissible sequence containing every length-`length` word.

    Witness chunks for each word are stitched together with connecting paths,
    so the result certifies language coverage up to the requested length.
    """
    if isinstance(pres, SftPresentation):
        if any(len(v) != 1 for v in pres.vertices):
            raise ValueError("spanning walks expect a 1-block presentation")
        out = pres.out_map()
        paths: list[tuple[int, ...]] = [(i,) for i in range(len(pres.vertices))]
        for _ in range(length - 1):
            paths = [p + (u,) for p in paths for u in out[p[-1]]]
        paths.sort(key=lambda p: tuple(pres.vertices[i].letters[0] for i in p))
        walk: list[int] = list(paths[0])
        for p in paths[1:]:
            connector = _bfs_path(out, walk[-1], p[0])
            walk.extend(connector[1:])
            walk.extend(p[1:])
        letters = bytes(pres.vertices[i].letters[0] for i in walk)
        return OrbitSegment(Word(pres.alphabet, letters))

    alph = Alphabet(pres.symbols())
    out = pres.out_map()
    plain = {v: [u for u, _ in targets] for v, targets in out.items()}
    chunks: list[tuple[bytes, int, int]] = []  # (word, start vertex, end vertex)
    seen: set[bytes] = set()
    frontier: list[tuple[int, int, bytes]] = [(v, v, b"") for v in range(len(pres.vertices))]
    for _ in range(length):
        nxt = []
        for start, v, word in frontier:
            for u, sym in out[v]:
                nxt.append((start, u, word + bytes([alph.index(sym)])))
        frontier = nxt
    for start, end, word in sorted(frontier, key=lambda t: (t[2], t[0], t[1])):
        if word not in seen:
            seen.add(word)
            chunks.append((word, start, end))
    first_word, _, cur = chunks[0]
    letters = bytearray(first_word)
    for word, start, end in chunks[1:]:
        connector = _bfs_path(plain, cur, start)
        for a, b in zip(connector, connector[1:]):
            sym = next(s for u, s in out[a] if u == b)
            letters.append(alph.index(sym))
        letters.extend(word)
        cur = end
    return OrbitSegment(Word(alph, bytes(letters)))


def format_presentation(pres: Presentation) -> str:
    """Text format: `vertex <label>` lines then `edge <from> <to> [label]`."""
    if isinstance(pres, SftPresentation):
        lines = [f"vertex {v.text}" for v in pres.vertices]
        lines += [
            f"edge {pres.vertices[a].text} {pres.vertices[b].text}"
            for a, b in sorted(pres.edges)
        ]
    else:
        lines = [f"vertex {name}" for name in pres.vertices]
        lines += [
            f"edge {pres.vertices[a]} {pres.vertices[b]} {sym}"
            for a, b, sym in sorted(pres.edges)
        ]
    return "\n".join(lines) + "\n"


def parse_presentation(text: str) -> Presentation:
    """Inverse of format_presentation; the alphabet is inferred from labels."""
    vertex_names: list[str] = []
    edge_rows: list[list[str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertex_names.append(parts[1])
        elif parts[0] == "edge" and len(parts) in (3, 4):
            edge_rows.append(parts[1:])
        else:
            raise ValueError(f"line {lineno}: expected `vertex <label>` or `edge <from> <to> [label]`")
    if not vertex_names:
        raise ValueError("presentation with no vertices")
    arities = {len(row) for row in edge_rows}
    if arities == {2}:
        symbols: set[str] = set()
        for name in vertex_names:
            if "," in name:
                symbols.update(p for p in name.split(",") if p)
            else:
                symbols.update(name)
        alph = Alphabet(tuple(sorted(symbols)))
        vertices = tuple(alph.word(name) for name in vertex_names)
        index = {name: i for i, name in enumerate(vertex_names)}
        edges = frozenset((index[a], index[b]) for a, b in edge_rows)
        return SftPresentation(vertices, edges)
    if arities == {3}:
        index = {name: i for i, name in enumerate(vertex_names)}
        edges = frozenset((index[a], index[b], sym) for a, b, sym in edge_rows)
        return SoficPresentation(tuple(vertex_names), edges)
    raise ValueError("mixed or missing edge labels: cannot tell SFT from sofic format")


def to_dot(pres: Presentation, name: str = "shift") -> str:
    lines = [f"digraph {name} {{"]
    if isinstance(pres, SftPresentation):
        for v in pres.vertices:
            lines.append(f'  "{v.text}";')
        for a, b in sorted(pres.edges):
            lines.append(f'  "{pres.vertices[a].text}" -> "{pres.vertices[b].text}";')
    else:
        for v in pres.vertices:
            lines.append(f'  "{v}";')
        for a, b, sym in sorted(pres.edges):
            lines.append(f'  "{pres.vertices[a]}" -> "{pres.vertices[b]}" [label="{sym}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
