"""Subshifts of finite type, admissible words, periodic orbits and block graphs.

Words are plain tuples of symbol indices. Tuples are hashable and compare
lexicographically, which is the single canonical order used throughout the
package. Block graphs additionally carry fixed-radix integer codes for their
vertices so height tables can be indexed with numpy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EmptySystem, InadmissibleWord

Word = tuple[int, ...]


@dataclass(frozen=True)
class Sft:
    """Vertex shift on ``{0, ..., n-1}`` given by a 0/1 transition matrix.

    ``labels`` maps each surviving symbol back to its index in the matrix the
    system was validated from; ``deleted`` lists the original indices removed
    by trimming.
    """

    rows: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] = ()
    deleted: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(len(self.rows))))

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.int64).reshape(self.n, self.n)

    def allows(self, a: int, b: int) -> bool:
        return bool(self.rows[a][b])

    def successors(self, a: int) -> list[int]:
        return [b for b, x in enumerate(self.rows[a]) if x]

    def is_admissible(self, word: Sequence[int]) -> bool:
        if len(word) == 0:
            return False
        if any(not (0 <= a < self.n) for a in word):
            return False
        return all(self.rows[a][b] for a, b in zip(word, word[1:]))

    def check_word(self, word: Sequence[int]) -> Word:
        w = tuple(int(a) for a in word)
        if not self.is_admissible(w):
            raise InadmissibleWord(f"word {w} is not admissible")
        return w

    def reversed(self) -> "Sft":
        """Time-reversed system (transposed transition matrix)."""
        t = tuple(tuple(self.rows[b][a] for b in range(self.n)) for a in range(self.n))
        return Sft(t, self.labels, self.deleted)

    def is_irreducible(self) -> bool:
        g = csr_matrix(self.matrix)
        k, _ = connected_components(g, directed=True, connection="strong")
        return k == 1


def full_shift(n: int) -> Sft:
    return Sft(tuple(tuple(1 for _ in range(n)) for _ in range(n)))


def golden_mean_shift() -> Sft:
    return Sft(((1, 1), (1, 0)))


def validate_sft(matrix) -> Sft:
    """Check a square 0/1 matrix and trim it to a bi-infinitely extendable system.

    Symbols without an incoming or outgoing edge are removed repeatedly until
    nothing changes. Surviving symbols are renumbered consecutively.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"transition matrix must be square, got shape {m.shape}")
    if m.shape[0] < 1:
        raise ValueError("transition matrix must have at least one symbol")
    if not np.all((m == 0) | (m == 1)):
        raise ValueError("transition matrix entries must be 0 or 1")
    m = m.astype(np.int64)
    alive = np.ones(m.shape[0], dtype=bool)
    while True:
        sub = m[np.ix_(alive, alive)]
        keep = (sub.sum(axis=1) > 0) & (sub.sum(axis=0) > 0)
        if keep.all():
            break
        idx = np.flatnonzero(alive)
        alive[idx[~keep]] = False
        if not alive.any():
            break
    if not alive.any():
        raise EmptySystem("trimming removed every symbol")
    kept = np.flatnonzero(alive)
    sub = m[np.ix_(kept, kept)]
    rows = tuple(tuple(int(x) for x in r) for r in sub)
    deleted = tuple(int(i) for i in np.flatnonzero(~alive))
    return Sft(rows, tuple(int(i) for i in kept), deleted)


def enumerate_words(sft: Sft, k: int) -> list[Word]:
    """All admissible words of length ``k`` in lexicographic order."""
    if k < 1:
        raise ValueError("word length must be >= 1")
    words: list[Word] = [(a,) for a in range(sft.n)]
    succ = [sft.successors(a) for a in range(sft.n)]
    for _ in range(k - 1):
        words = [w + (b,) for w in words for b in succ[w[-1]]]
    return words


def word_count(sft: Sft, k: int) -> int:
    """Transfer-matrix count ``1^T B^(k-1) 1`` in exact integer arithmetic."""
    b = [[int(x) for x in r] for r in sft.rows]
    v = [1] * sft.n
    for _ in range(k - 1):
        v = [sum(b[a][c] * v[c] for c in range(sft.n)) for a in range(sft.n)]
    return sum(v)


@dataclass(frozen=True, order=True)
class PeriodicOrbit:
    """A primitive cycle stored in its least rotation."""

    cycle: Word

    @property
    def period(self) -> int:
        return len(self.cycle)

    @property
    def primitive(self) -> bool:
        return True

    def unrolled(self, length: int, phase: int = 0) -> Word:
        p = self.period
        return tuple(self.cycle[(phase + i) % p] for i in range(length))


def least_rotation(word: Sequence[int]) -> Word:
    w = tuple(word)
    return min(w[i:] + w[:i] for i in range(len(w)))


def is_primitive(word: Sequence[int]) -> bool:
    w = tuple(word)
    p = len(w)
    return all(w != w[d:] + w[:d] for d in range(1, p) if p % d == 0)


def make_orbit(sft: Sft, cycle: Sequence[int]) -> PeriodicOrbit:
    """Canonical periodic orbit through ``cycle``; raises if not a primitive cycle."""
    w = tuple(int(a) for a in cycle)
    if not w or not sft.is_admissible(w + (w[0],)):
        raise InadmissibleWord(f"{w} is not a cycle of the system")
    if not is_primitive(w):
        raise InadmissibleWord(f"{w} is a proper power")
    return PeriodicOrbit(least_rotation(w))


def _lyndon_words(n: int, max_len: int) -> Iterable[Word]:
    # Duval's algorithm: Lyndon words of length <= max_len in lexicographic order.
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == n - 1:
            w.pop()


def periodic_orbits(sft: Sft, max_period: int) -> list[PeriodicOrbit]:
    """Primitive periodic orbits of period <= ``max_period``, ordered by (period, cycle)."""
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    out = []
    for w in _lyndon_words(sft.n, max_period):
        if sft.is_admissible(w + (w[0],)):
            out.append(PeriodicOrbit(w))
    out.sort(key=lambda o: (o.period, o.cycle))
    return out


@dataclass(frozen=True, eq=False)
class BlockGraph:
    """Higher-block presentation: vertices are admissible words of length ``width``."""

    sft: Sft
    width: int
    vertices: tuple[Word, ...]
    indptr: np.ndarray
    indices: np.ndarray
    codes: np.ndarray
    _index: dict = field(repr=False, default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size)

    def index(self, word: Sequence[int]) -> int:
        return self._index[tuple(word)]

    def successors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self) -> list[tuple[int, int]]:
        return [(u, int(v)) for u in range(self.size) for v in self.successors(u)]

    def adjacency(self, mask: np.ndarray | None = None) -> csr_matrix:
        n = self.size
        a = csr_matrix((np.ones(self.indices.size), self.indices, self.indptr), shape=(n, n))
        if mask is not None:
            d = csr_matrix((mask.astype(float), (np.arange(n), np.arange(n))), shape=(n, n))
            a = d @ a @ d
            a.eliminate_zeros()
        return a

    def mask_of(self, words: Iterable[Sequence[int]]) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        for w in words:
            m[self.index(w)] = True
        return m

    def full_mask(self) -> np.ndarray:
        return np.ones(self.size, dtype=bool)


def word_code(word: Sequence[int], n: int) -> int:
    c = 0
    for a in word:
        c = c * n + int(a)
    return c


def higher_block(sft: Sft, w: int) -> BlockGraph:
    if w < 1:
        raise ValueError("block width must be >= 1")
    verts = enumerate_words(sft, w)
    index = {v: i for i, v in enumerate(verts)}
    indptr = [0]
    indices: list[int] = []
    for v in verts:
        for b in sft.successors(v[-1]):
            indices.append(index[v[1:] + (b,)])
        indptr.append(len(indices))
    codes = np.array([word_code(v, sft.n) for v in verts], dtype=np.int64)
    return BlockGraph(
        sft,
        w,
        tuple(verts),
        np.array(indptr, dtype=np.int64),
        np.array(indices, dtype=np.int64),
        codes,
        index,
    )


def trim_mask(graph: BlockGraph, mask: np.ndarray) -> np.ndarray:
    """Largest sub-mask in which every vertex has a masked predecessor and successor."""
    mask = np.asarray(mask, dtype=bool).copy()
    a = graph.adjacency()
    at = a.T.tocsr()
    while True:
        mf = mask.astype(float)
        has_out = (a @ mf) > 0
        has_in = (at @ mf) > 0
        new = mask & has_out & has_in
        if np.array_equal(new, mask):
            return mask
        mask = new


@dataclass(frozen=True)
class Component:
    vertices: tuple[int, ...]
    nontrivial: bool

    @property
    def least(self) -> int:
        return self.vertices[0]


def scc_decompose(graph: BlockGraph, mask: np.ndarray | None = None) -> list[Component]:
    """Strongly connected components of the masked graph, ordered by least vertex."""
    if mask is None:
        mask = graph.full_mask()
    mask = np.asarray(mask, dtype=bool)
    a = graph.adjacency(mask)
    _, labels = connected_components(a, directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v in np.flatnonzero(mask):
        groups.setdefault(int(labels[v]), []).append(int(v))
    comps = []
    for members in groups.values():
        members.sort()
        if len(members) > 1:
            nontrivial = True
        else:
            v = members[0]
            nontrivial = bool(np.any(graph.successors(v) == v))
        comps.append(Component(tuple(members), nontrivial))
    comps.sort(key=lambda c: c.least)
    return comps


def lift_mask(graph: BlockGraph, mask: np.ndarray, wider: BlockGraph) -> np.ndarray:
    """Mask on ``wider`` keeping words all of whose ``graph.width`` sub-windows are masked."""
    w = graph.width
    if wider.width < w:
        raise ValueError("target graph must be at least as wide")
    allowed = {graph.vertices[i] for i in np.flatnonzero(mask)}
    out = np.zeros(wider.size, dtype=bool)
    for i, v in enumerate(wider.vertices):
        out[i] = all(v[j:j + w] in allowed for j in range(wider.width - w + 1))
    return out
