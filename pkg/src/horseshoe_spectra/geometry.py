"""Geometric realisations of the stable and unstable Cantor sets.

Two model families are supported:

* ``AffineModel``: one contraction ``x -> offset_a + ratio_a * x`` per symbol.
* ``GaussModel``: continued fractions whose partial quotients are restricted
  to a finite digit set; symbol ``i`` stands for ``digits[i]``.

Dimensions are estimated three ways (pressure root, scale-front counting and
box counting) and every estimate carries an explicit error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix

from . import kernels
from .errors import DegenerateSet, DomainError, InadmissibleWord, NoCycle
from .symbolic import (
    BlockGraph,
    Component,
    Sft,
    Word,
    enumerate_words,
    full_shift,
    higher_block,
    lift_mask,
    scc_decompose,
    trim_mask,
)

PRESSURE_TOL = 1e-10
POWER_TOL = 1e-12


@dataclass(frozen=True)
class AffineModel:
    ratios: tuple[float, ...]
    offsets: tuple[float, ...]
    kind: str = field(default="affine", init=False)

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        if len(self.ratios) != len(self.offsets) or not self.ratios:
            raise ValueError("ratios and offsets must be nonempty and of equal length")
        for r, o in zip(self.ratios, self.offsets):
            if not 0.0 < r < 1.0:
                raise ValueError(f"ratio {r} outside (0, 1)")
            if not 0.0 <= o < 1.0 or o + r > 1.0 + 1e-15:
                raise ValueError(f"image [{o}, {o + r}] not inside [0, 1]")
        images = sorted(zip(self.offsets, self.ratios))
        for (o1, r1), (o2, _) in zip(images, images[1:]):
            if o1 + r1 >= o2:
                raise ValueError("affine images must be pairwise disjoint")

    @property
    def n(self) -> int:
        return len(self.ratios)

    def fixed_point(self, a: int = 0) -> float:
        return self.offsets[a] / (1.0 - self.ratios[a])


@dataclass(frozen=True)
class GaussModel:
    digits: tuple[int, ...]
    depth: int = 8
    kind: str = field(default="gauss", init=False)

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if not self.digits:
            raise ValueError("digit set must be nonempty")
        if any(d < 1 for d in self.digits):
            raise ValueError("digits must be >= 1")
        if len(set(self.digits)) != len(self.digits):
            raise ValueError("digits must be distinct")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")

    @property
    def n(self) -> int:
        return len(self.digits)

    def fixed_point(self, a: int = 0) -> float:
        d = self.digits[a]
        return (-d + math.sqrt(d * d + 4)) / 2.0


CantorModel = Union[AffineModel, GaussModel]


@dataclass(frozen=True)
class CylinderInterval:
    word: Word
    left: float
    right: float

    @property
    def length(self) -> float:
        return self.right - self.left

    @property
    def scale(self) -> int:
        return unstable_scale(self.length)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    method: str
    error_bound: float
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.error_bound) or self.error_bound < 0:
            raise ValueError("error bound must be finite and nonnegative")


def _check_word(model: CantorModel, word: Sequence[int], sft: Sft | None) -> Word:
    w = tuple(int(a) for a in word)
    if not w:
        raise InadmissibleWord("empty word has no cylinder")
    if any(not 0 <= a < model.n for a in w):
        raise InadmissibleWord(f"word {w} uses symbols outside the model alphabet")
    if sft is not None and not sft.is_admissible(w):
        raise InadmissibleWord(f"word {w} is not admissible")
    return w


def gauss_endpoints_exact(digits: Sequence[int]) -> tuple[Fraction, Fraction]:
    """Exact endpoints of the continued-fraction cylinder ``[0; a_1, ..., a_k]``."""
    p_prev, p, q_prev, q = 1, 0, 0, 1
    for a in digits:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    x = Fraction(p, q)
    y = Fraction(p + p_prev, q + q_prev)
    return (x, y) if x < y else (y, x)


def cylinder_interval(model: CantorModel, word: Sequence[int], sft: Sft | None = None) -> CylinderInterval:
    w = _check_word(model, word, sft)
    if model.kind == "affine":
        left, length = 0.0, 1.0
        for a in w:
            left += length * model.offsets[a]
            length *= model.ratios[a]
        return CylinderInterval(w, left, left + length)
    p_prev, p, q_prev, q = 1, 0, 0, 1
    for a in w:
        d = model.digits[a]
        p_prev, p = p, d * p + p_prev
        q_prev, q = q, d * q + q_prev
    x = p / q
    y = (p + p_prev) / (q + q_prev)
    return CylinderInterval(w, min(x, y), max(x, y))


def unstable_scale(length: float) -> int:
    """``floor(ln(1/length))`` for a cylinder length in (0, 1]."""
    if not (0.0 < length <= 1.0):
        raise DomainError(f"length {length} outside (0, 1]")
    return int(math.floor(-math.log(length)))


def point_of(model: CantorModel, word: Sequence[int]) -> float:
    """A point of the Cantor set inside the cylinder of ``word``."""
    w = tuple(word)
    if model.kind == "affine":
        x = model.fixed_point(w[-1])
        for a in reversed(w):
            x = model.offsets[a] + model.ratios[a] * x
        return x
    x = model.fixed_point(w[-1])
    for a in reversed(w):
        x = 1.0 / (model.digits[a] + x)
    return x


def cantor_points(model: CantorModel, depth: int, sft: Sft | None = None) -> np.ndarray:
    """One representative point per admissible word of length ``depth``, sorted.

    The representative continues the word by its last symbol forever when that
    symbol has a self-loop (a genuine point of the Cantor set) and falls back
    to the cylinder midpoint otherwise.
    """
    sft = sft or full_shift(model.n)
    pts = []
    for w in enumerate_words(sft, depth):
        if sft.allows(w[-1], w[-1]):
            pts.append(point_of(model, w))
        else:
            pts.append(cylinder_interval(model, w).midpoint)
    return np.sort(np.array(pts))


# ---------------------------------------------------------------------------
# Language automaton of a masked block graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LanguageAutomaton:
    """Prefix automaton of the words of a masked system.

    Node 0 is the empty word. Nodes for words shorter than the block width are
    trie nodes; longer words are tracked by their last full window.
    """

    child_ptr: np.ndarray
    child_node: np.ndarray
    child_sym: np.ndarray


def language_automaton(graph: BlockGraph, mask: np.ndarray | None = None) -> LanguageAutomaton:
    if mask is None:
        mask = graph.full_mask()
    mask = trim_mask(graph, mask)
    width = graph.width
    live = [graph.vertices[i] for i in np.flatnonzero(mask)]
    node_id: dict = {(): 0}
    order: list = [()]
    for v in live:
        for k in range(1, width):
            p = v[:k]
            if p not in node_id:
                node_id[p] = len(order)
                order.append(p)
    vert_node = {}
    for i in np.flatnonzero(mask):
        vert_node[int(i)] = len(order)
        order.append(int(i))
    children: list[list[tuple[int, int]]] = [[] for _ in order]
    trie_next: dict = {}
    for v in live:
        for k in range(width):
            trie_next.setdefault(v[:k], set()).add(v[k])
    for key, nexts in trie_next.items():
        nid = node_id[key]
        for a in sorted(nexts):
            child = key + (a,)
            if len(child) < width:
                children[nid].append((node_id[child], a))
            else:
                children[nid].append((vert_node[graph.index(child)], a))
    for vi, nid in vert_node.items():
        for u in graph.successors(vi):
            u = int(u)
            if mask[u]:
                children[nid].append((vert_node[u], graph.vertices[u][-1]))
    for ch in children:
        ch.sort(key=lambda t: t[1])
    ptr = np.zeros(len(order) + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(c) for c in children])
    nodes = np.array([c[0] for ch in children for c in ch], dtype=np.int64)
    syms = np.array([c[1] for ch in children for c in ch], dtype=np.int64)
    return LanguageAutomaton(ptr, nodes, syms)


def _model_params(model: CantorModel) -> tuple[int, np.ndarray]:
    if model.kind == "affine":
        return kernels.AFFINE, np.array(model.ratios, dtype=np.float64)
    return kernels.GAUSS, np.array(model.digits, dtype=np.float64)


def scale_front(model: CantorModel, graph: BlockGraph, r: int, mask: np.ndarray | None = None) -> list[Word]:
    """Minimal words of the masked system whose unstable scale first reaches ``r``.

    The empty word has scale -1, so ``r = 0`` yields the single-symbol words.
    """
    if r < 0:
        raise ValueError("scale must be >= 0")
    auto = language_automaton(graph, mask)
    out: list[Word] = []
    stack: list[tuple[int, Word, int]] = [(0, (), -1)]
    while stack:
        node, word, ps = stack.pop()
        for e in range(auto.child_ptr[node], auto.child_ptr[node + 1]):
            w = word + (int(auto.child_sym[e]),)
            sc = cylinder_interval(model, w).scale
            if sc >= r and ps < r:
                out.append(w)
            elif sc < r:
                stack.append((int(auto.child_node[e]), w, sc))
    out.sort()
    return out


def front_counts(model: CantorModel, graph: BlockGraph, r_max: int, mask: np.ndarray | None = None) -> np.ndarray:
    """``N(r) = #scale_front(r)`` for ``r = 0..r_max`` in one traversal."""
    auto = language_automaton(graph, mask)
    kind, params = _model_params(model)
    return kernels.front_counts(auto.child_ptr, auto.child_node, auto.child_sym, kind, params, int(r_max))


def _lsq(x: np.ndarray, y: np.ndarray) -> tuple[float, float, np.ndarray]:
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept), y - (slope * x + intercept)


def dimension_counting(
    model: CantorModel,
    graph: BlockGraph,
    r_min: int,
    r_max: int,
    mask: np.ndarray | None = None,
) -> DimensionEstimate:
    """Least-squares slope of ``ln N(r)`` against ``r`` on ``[r_min, r_max]``."""
    if not r_max > r_min >= 1:
        raise ValueError("need r_max > r_min >= 1")
    counts = front_counts(model, graph, r_max, mask)
    r = np.arange(r_min, r_max + 1, dtype=float)
    n = counts[r_min:r_max + 1].astype(float)
    if np.any(n < 1):
        raise NoCycle("masked system has no words at the requested scales")
    slope, _, resid = _lsq(r, np.log(n))
    return DimensionEstimate(
        max(slope, 0.0),
        "counting-slope",
        float(np.abs(resid).max() / r_min),
        {"r_min": r_min, "r_max": r_max, "counts": [int(c) for c in counts[r_min:r_max + 1]]},
    )


# ---------------------------------------------------------------------------
# Pressure root
# ---------------------------------------------------------------------------


def _edge_log_ratios(model: CantorModel, graph: BlockGraph) -> np.ndarray:
    """Log contraction attached to every edge of ``graph`` (CSR order)."""
    n_edges = graph.indices.size
    out = np.empty(n_edges)
    if model.kind == "affine":
        logs = np.log(np.array(model.ratios))
        for u in range(graph.size):
            out[graph.indptr[u]:graph.indptr[u + 1]] = logs[graph.vertices[u][0]]
        return out
    d = model.depth
    cache: dict[Word, float] = {}

    def log_len(w: Word) -> float:
        if w not in cache:
            cache[w] = math.log(cylinder_interval(model, w).length)
        return cache[w]

    for u in range(graph.size):
        vu = graph.vertices[u]
        for e in range(graph.indptr[u], graph.indptr[u + 1]):
            word = (vu + (graph.vertices[graph.indices[e]][-1],))[: d + 1]
            out[e] = log_len(word) - log_len(word[1:])
    return out


def _component_root(indptr: np.ndarray, indices: np.ndarray, log_ratio: np.ndarray, tol: float = PRESSURE_TOL) -> float:
    def rho_above_one(s: float) -> bool:
        lo, hi = kernels.perron_bracket(indptr, indices, np.exp(s * log_ratio), POWER_TOL, 1.0, 100000)
        return lo > 1.0 or (hi >= 1.0 and 0.5 * (lo + hi) > 1.0)

    if indices.size == indptr.size - 1:
        # A component with one out-edge per vertex is a single cycle.
        return 0.0
    lo, hi = 0.0, 2.0
    if rho_above_one(hi):
        raise ValueError("pressure root not bracketed by [0, 2]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rho_above_one(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sub_csr(graph: BlockGraph, nodes: Sequence[int], edge_values: np.ndarray):
    n = graph.size
    a = csr_matrix((np.arange(graph.indices.size, dtype=float) + 1.0, graph.indices, graph.indptr), shape=(n, n))
    sub = a[list(nodes)][:, list(nodes)].tocsr()
    sub.sort_indices()
    edge_ids = sub.data.astype(np.int64) - 1
    return sub.indptr.astype(np.int64), sub.indices.astype(np.int64), edge_values[edge_ids]


def component_dimensions(
    model: CantorModel,
    graph: BlockGraph,
    mask: np.ndarray | None = None,
    tol: float = PRESSURE_TOL,
) -> list[tuple[Component, float, float]]:
    """Pressure dimension of every nontrivial SCC: ``(component, value, error_bound)``.

    ``tol`` is the width of the final bisection bracket.
    """
    if mask is None:
        mask = graph.full_mask()
    mask = trim_mask(graph, mask)
    if model.kind == "affine":
        lr = _edge_log_ratios(model, graph)
        comps = [c for c in scc_decompose(graph, mask) if c.nontrivial]
        return [(c, _component_root(*_sub_csr(graph, c.vertices, lr), tol), tol) for c in comps]
    out = []
    comps = [c for c in scc_decompose(graph, mask) if c.nontrivial]
    values: dict[int, list[float]] = {}
    for depth in (model.depth, model.depth + 2):
        width = max(graph.width, depth)
        wide = graph if width == graph.width else higher_block(graph.sft, width)
        wide_mask = mask if wide is graph else lift_mask(graph, mask, wide)
        dmodel = GaussModel(model.digits, depth)
        lr = _edge_log_ratios(dmodel, wide)
        wide_comps = [c for c in scc_decompose(wide, wide_mask) if c.nontrivial]
        # Each narrow component lifts to exactly one wide component.
        for i, c in enumerate(comps):
            members = {graph.vertices[v] for v in c.vertices}
            match = None
            for wc in wide_comps:
                if wide.vertices[wc.least][: graph.width] in members:
                    match = wc
                    break
            if match is None:
                raise NoCycle("component vanished when refining the block graph")
            values.setdefault(i, []).append(_component_root(*_sub_csr(wide, match.vertices, lr), tol))
    for i, c in enumerate(comps):
        v_d, v_d2 = values[i]
        out.append((c, v_d, abs(v_d - v_d2) + tol))
    return out


def dimension_pressure(
    model: CantorModel,
    graph: BlockGraph,
    mask: np.ndarray | None = None,
    tol: float = PRESSURE_TOL,
) -> DimensionEstimate:
    """Root ``s`` of ``rho(M_s) = 1`` maximised over nontrivial components."""
    dims = component_dimensions(model, graph, mask, tol)
    if not dims:
        raise NoCycle("masked graph has no nontrivial strongly connected component")
    best = max(dims, key=lambda t: (t[1], -t[0].least))
    params = {"components": len(dims)}
    if model.kind == "gauss":
        params["depth"] = model.depth
    return DimensionEstimate(best[1], "pressure-root", best[2], params)


# ---------------------------------------------------------------------------
# Box counting
# ---------------------------------------------------------------------------


def geometric_resolutions(k_min: int, k_max: int, base: float = 2.0) -> list[float]:
    return [base ** -k for k in range(k_min, k_max + 1)]


def _interval_box_count(left: np.ndarray, right: np.ndarray, eps: float) -> int:
    a = np.floor(left / eps).astype(np.int64)
    b = np.floor(right / eps).astype(np.int64)
    order = np.argsort(a, kind="stable")
    a, b = a[order], b[order]
    reach = np.maximum.accumulate(b)
    new = np.r_[True, a[1:] > reach[:-1]]
    starts = a[new]
    ends = np.maximum.reduceat(b, np.flatnonzero(new))
    return int((ends - starts + 1).sum())


def _count_cells(cells: np.ndarray) -> int:
    """Distinct rows of an integer cell array, via a flattened mixed-radix key."""
    cells = cells - cells.min(axis=0)
    spans = cells.max(axis=0) + 1
    if float(np.prod(spans.astype(float))) < 2.0**62:
        key = np.ravel_multi_index(tuple(cells.T), tuple(int(v) for v in spans))
        return int(np.unique(key).size)
    return int(np.unique(cells, axis=0).shape[0])


def box_counts(points=None, resolutions=(), intervals=None) -> list[int]:
    out = []
    for eps in resolutions:
        if intervals is not None:
            iv = np.asarray(intervals, dtype=float)
            out.append(_interval_box_count(iv[:, 0], iv[:, 1], eps))
        else:
            pts = np.asarray(points, dtype=float)
            cells = np.floor(pts / eps).astype(np.int64)
            if cells.ndim == 1:
                out.append(int(np.unique(cells).size))
            else:
                out.append(_count_cells(cells))
    return out


def box_count_dimension(points=None, resolutions: Sequence[float] = (), intervals=None) -> DimensionEstimate:
    """Least-squares slope of ``ln(occupied boxes)`` against ``ln(1/eps)``.

    Boxes form a grid anchored at 0. Pass either ``points`` (shape ``(N,)`` or
    ``(N, d)``) or closed ``intervals`` (shape ``(N, 2)``). A set whose points
    all coincide has dimension 0.
    """
    res = sorted({float(e) for e in resolutions}, reverse=True)
    if len(res) < 2:
        raise DegenerateSet("need at least two distinct resolutions")
    if intervals is None:
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            raise DegenerateSet("empty set")
        if not np.all(np.isfinite(pts)):
            raise DegenerateSet("non-finite coordinates")
        flat = pts.reshape(pts.shape[0], -1)
        if np.all(flat == flat[0]):
            return DimensionEstimate(0.0, "box-count", 0.0, {"resolutions": res, "counts": [1] * len(res)})
    else:
        iv = np.asarray(intervals, dtype=float)
        if iv.size == 0:
            raise DegenerateSet("empty set")
    counts = box_counts(points, res, intervals)
    x = -np.log(np.array(res))
    y = np.log(np.array(counts, dtype=float))
    slope, _, resid = _lsq(x, y)
    n = len(res)
    if n > 2:
        se = math.sqrt(float(resid @ resid) / (n - 2) / float(((x - x.mean()) ** 2).sum()))
    else:
        se = 0.0
    return DimensionEstimate(float(slope), "box-count", se, {"resolutions": res, "counts": counts})


# ---------------------------------------------------------------------------
# Projection experiment
# ---------------------------------------------------------------------------


def _sum_map(x, y):
    return x + y


def _check_partials(h: Callable, grid: int = 9) -> None:
    t = np.linspace(0.05, 0.95, grid)
    xx, yy = np.meshgrid(t, t)
    step = 1e-6
    dx = (h(xx + step, yy) - h(xx - step, yy)) / (2 * step)
    dy = (h(xx, yy + step) - h(xx, yy - step)) / (2 * step)
    if np.min(np.abs(dx)) < 1e-8 or np.min(np.abs(dy)) < 1e-8:
        raise ValueError("height map must have nonvanishing partial derivatives")


def projection_dimension_experiment(
    model_s: CantorModel,
    model_u: CantorModel,
    depth: int,
    resolutions: Sequence[float] | None = None,
    height: Callable | None = None,
    sft_s: Sft | None = None,
    sft_u: Sft | None = None,
) -> DimensionEstimate:
    """Box dimension of ``H(K^s x K^u)`` sampled at cylinder depth ``depth``."""
    if depth < 8:
        raise ValueError("depth must be >= 8")
    h = height or _sum_map
    _check_partials(h)
    xs = cantor_points(model_s, depth, sft_s)
    xu = cantor_points(model_u, depth, sft_u)
    values = h(xs[:, None], xu[None, :]).ravel()
    res = list(resolutions) if resolutions is not None else geometric_resolutions(4, 12)
    est = box_count_dimension(values, res)
    params = dict(est.params)
    params["depth"] = depth
    params["points"] = int(values.size)
    return DimensionEstimate(est.value, est.method, est.error_bound, params)
