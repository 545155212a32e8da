"""Height functions, orbit values, threshold pruning and dimension curves.

Heights are locally constant: ``F`` depends on the window ``x[-m..m]`` of
radius ``m`` around the current position. Orbit values are then exact finite
maxima over the windows of eventually periodic sequences.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from . import kernels
from .errors import DegenerateSet, EmptyPrune, InadmissibleWord
from .geometry import (
    CantorModel,
    DimensionEstimate,
    box_count_dimension,
    component_dimensions,
    cylinder_interval,
    front_counts,
)
from .symbolic import (
    BlockGraph,
    Component,
    PeriodicOrbit,
    Sft,
    Word,
    enumerate_words,
    higher_block,
    periodic_orbits,
    trim_mask,
    word_code,
)

DEDUP_RESOLUTION = 1e-12
MAX_TABLE_SIZE = 1 << 24


@lru_cache(maxsize=32)
def block_graph(sft: Sft, width: int) -> BlockGraph:
    """Cached ``higher_block``; graphs are immutable so sharing is safe."""
    return higher_block(sft, width)


@dataclass(frozen=True, eq=False)
class HeightTable:
    """Locally constant height: one value per admissible window of width ``2*radius+1``.

    ``values`` is indexed by the fixed-radix code of the window; inadmissible
    windows hold NaN.
    """

    sft: Sft
    radius: int
    values: np.ndarray

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    def __getitem__(self, window: Sequence[int]) -> float:
        if len(window) != self.width or not self.sft.is_admissible(window):
            raise InadmissibleWord(f"{tuple(window)} is not an admissible window of width {self.width}")
        return float(self.values[word_code(window, self.sft.n)])

    def windows(self) -> list[Word]:
        return enumerate_words(self.sft, self.width)

    def items(self) -> list[tuple[Word, float]]:
        return [(w, self[w]) for w in self.windows()]

    def distinct_values(self) -> np.ndarray:
        v = self.values[np.isfinite(self.values)]
        return np.unique(v)

    def value_range(self) -> frozenset:
        return frozenset(float(v) for v in self.distinct_values())

    def reversed(self) -> "HeightTable":
        """Table of the time-reversed system: ``F'(w) = F(reverse(w))``."""
        rs = self.sft.reversed()
        out = np.full_like(self.values, np.nan)
        for w in enumerate_words(rs, self.width):
            out[word_code(w, rs.n)] = self.values[word_code(w[::-1], self.sft.n)]
        return HeightTable(rs, self.radius, out)

    def widened(self, radius: int) -> "HeightTable":
        """Same function presented on windows of a larger radius."""
        if radius < self.radius:
            raise ValueError("can only widen a table")
        k = radius - self.radius
        return build_table(self.sft, radius, lambda w: self[w[k:len(w) - k]])


def build_table(sft: Sft, radius: int, func: Callable[[Word], float]) -> HeightTable:
    if radius < 0:
        raise ValueError("radius must be >= 0")
    width = 2 * radius + 1
    size = sft.n ** width
    if size > MAX_TABLE_SIZE:
        raise ValueError(f"table with {size} windows is too large")
    values = np.full(size, np.nan)
    for w in enumerate_words(sft, width):
        v = float(func(w))
        if not math.isfinite(v):
            raise ValueError(f"non-finite height on window {w}")
        values[word_code(w, sft.n)] = v
    return HeightTable(sft, radius, values)


def table_from_mapping(sft: Sft, radius: int, mapping: dict) -> HeightTable:
    """Table from an explicit ``{window: value}`` mapping; must be total."""
    norm = {tuple(int(a) for a in k): float(v) for k, v in mapping.items()}
    width = 2 * radius + 1
    for k in norm:
        if len(k) != width or not sft.is_admissible(k):
            raise InadmissibleWord(f"{k} is not an admissible window of width {width}")

    def lookup(w):
        if w not in norm:
            raise ValueError(f"height table missing window {w}")
        return norm[w]

    return build_table(sft, radius, lookup)


def symbol_table(sft: Sft, values: Sequence[float]) -> HeightTable:
    """Radius-0 table ``F(a) = values[a]``."""
    return build_table(sft, 0, lambda w: values[w[0]])


def window_coordinates(model_u: CantorModel, model_s: CantorModel, window: Sequence[int]) -> tuple[float, float]:
    """``(x_s, x_u)`` cylinder midpoints of a centred window.

    The unstable coordinate reads the window forwards from the centre and the
    stable coordinate reads it backwards from the centre.
    """
    m = len(window) // 2
    w = tuple(window)
    xu = cylinder_interval(model_u, w[m:]).midpoint
    xs = cylinder_interval(model_s, w[m::-1]).midpoint
    return xs, xu


def geometric_table(
    sft: Sft,
    model_u: CantorModel,
    model_s: CantorModel,
    radius: int,
    func: Callable[[float, float], float] | None = None,
) -> HeightTable:
    """Sample ``func(x_s, x_u)`` on window midpoints; the default is ``x_s + x_u``."""
    f = func or (lambda xs, xu: xs + xu)
    return build_table(sft, radius, lambda w: f(*window_coordinates(model_u, model_s, w)))


# ---------------------------------------------------------------------------
# Points and orbit values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoSidedPoint:
    """The sequence ``left^inf . middle . right^inf``; ``origin`` marks position 0."""

    left: PeriodicOrbit
    middle: Word
    right: PeriodicOrbit
    origin: int = 0

    def validate(self, sft: Sft) -> "TwoSidedPoint":
        for o in (self.left, self.right):
            if not sft.is_admissible(o.cycle + (o.cycle[0],)):
                raise InadmissibleWord(f"{o.cycle} is not a cycle")
        seq = (self.left.cycle[-1],) + tuple(self.middle) + (self.right.cycle[0],)
        if not sft.is_admissible(seq):
            raise InadmissibleWord("junctions of the two-sided point are not admissible")
        return self

    def shifted(self, k: int) -> "TwoSidedPoint":
        return TwoSidedPoint(self.left, self.middle, self.right, self.origin + k)

    def symbol(self, i: int) -> int:
        """Symbol at position ``i`` relative to the start of ``middle``."""
        m = len(self.middle)
        if i < 0:
            p = self.left.period
            return self.left.cycle[i % p]
        if i < m:
            return self.middle[i]
        p = self.right.period
        return self.right.cycle[(i - m) % p]

    def junction_segment(self, width: int) -> Word:
        """Last ``width-1`` left-tail symbols, the middle, then ``width-1`` right-tail symbols."""
        k = width - 1
        return tuple(self.symbol(i) for i in range(-k, len(self.middle) + k))


def periodic_point(orbit: PeriodicOrbit) -> TwoSidedPoint:
    return TwoSidedPoint(orbit, (), orbit)


def _tail_segment(orbit: PeriodicOrbit, width: int) -> Word:
    return orbit.unrolled(width + orbit.period - 1)


def _max_windows(table: HeightTable, seqs: Sequence[Word]) -> np.ndarray:
    if not seqs:
        return np.empty(0)
    lengths = np.fromiter((len(s) for s in seqs), dtype=np.int64, count=len(seqs))
    offsets = np.zeros(len(seqs) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    symbols = np.fromiter(itertools.chain.from_iterable(seqs), dtype=np.int64, count=int(offsets[-1]))
    return kernels.window_max(symbols, offsets, table.values, table.sft.n, table.width)


def tail_values(table: HeightTable, orbits: Sequence[PeriodicOrbit]) -> np.ndarray:
    """Maximum of ``F`` over the windows of each periodic orbit."""
    return _max_windows(table, [_tail_segment(o, table.width) for o in orbits])


def lagrange_value(sft: Sft, table: HeightTable, x: TwoSidedPoint) -> float:
    """``limsup F(shift^n x)``: the maximum over windows of the right periodic tail."""
    x.validate(sft)
    return float(tail_values(table, [x.right])[0])


def markov_value(sft: Sft, table: HeightTable, x: TwoSidedPoint) -> float:
    """``sup_n F(shift^n x)`` over the whole bi-infinite sequence."""
    x.validate(sft)
    tails = tail_values(table, [x.left, x.right])
    junction = _max_windows(table, [x.junction_segment(table.width)])[0]
    return float(max(tails.max(), junction))


def markov_values(sft: Sft, table: HeightTable, points: Sequence[TwoSidedPoint]) -> np.ndarray:
    orbits = sorted({p.left for p in points} | {p.right for p in points})
    tv = dict(zip(orbits, tail_values(table, orbits)))
    junction = _max_windows(table, [p.validate(sft).junction_segment(table.width) for p in points])
    tails = np.array([max(tv[p.left], tv[p.right]) for p in points])
    return np.maximum(tails, junction)


def lagrange_values(sft: Sft, table: HeightTable, points: Sequence[TwoSidedPoint]) -> np.ndarray:
    for p in points:
        p.validate(sft)
    orbits = sorted({p.right for p in points})
    tv = dict(zip(orbits, tail_values(table, orbits)))
    return np.array([tv[p.right] for p in points])


def random_points(
    sft: Sft,
    rng: np.random.Generator,
    count: int,
    max_period: int,
    max_middle: int,
) -> list[TwoSidedPoint]:
    """Random eventually periodic points with tails of period <= ``max_period``."""
    orbits = periodic_orbits(sft, max_period)
    succ = [sft.successors(a) for a in range(sft.n)]
    out = []
    while len(out) < count:
        left = orbits[rng.integers(len(orbits))]
        k = int(rng.integers(max_middle + 1))
        middle: list[int] = []
        a = left.cycle[-1]
        for _ in range(k):
            a = succ[a][rng.integers(len(succ[a]))]
            middle.append(a)
        last = middle[-1] if middle else left.cycle[-1]
        cands = [o for o in orbits if sft.allows(last, o.cycle[0])]
        if not cands:
            continue
        right = cands[rng.integers(len(cands))]
        out.append(TwoSidedPoint(left, tuple(middle), right, int(rng.integers(-5, 6))))
    return out


# ---------------------------------------------------------------------------
# Pruning
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrunedSystem:
    """Symbolic ``K_t``: windows with ``F <= t`` trimmed to bi-infinite paths."""

    t: float
    model: CantorModel
    table: HeightTable
    graph: BlockGraph
    mask: np.ndarray
    components: tuple[tuple[Component, float, float], ...]
    selected: Component

    @property
    def dimension(self) -> float:
        return self.selected_entry[1]

    @property
    def error_bound(self) -> float:
        return self.selected_entry[2]

    @property
    def selected_entry(self) -> tuple[Component, float, float]:
        for entry in self.components:
            if entry[0] is self.selected:
                return entry
        raise RuntimeError("selected component missing")

    def counts(self, r_max: int) -> np.ndarray:
        """``N_u(t, r)`` for ``r = 0..r_max``."""
        return front_counts(self.model, self.graph, r_max, self.mask)

    def summary(self) -> dict:
        return {
            "t": self.t,
            "masked_vertices": int(self.mask.sum()),
            "components": [
                {"least_vertex": list(self.graph.vertices[c.least]), "size": len(c.vertices), "dimension": d, "error": e}
                for c, d, e in self.components
            ],
            "selected": list(self.graph.vertices[self.selected.least]),
            "dimension": self.dimension,
        }


def _select(graph: BlockGraph, model: CantorModel, mask: np.ndarray, t: float, table: HeightTable) -> PrunedSystem:
    mask = trim_mask(graph, mask)
    dims = component_dimensions(model, graph, mask)
    if not dims:
        raise EmptyPrune(f"no subhorseshoe survives at t={t}")
    best = max(dims, key=lambda e: (e[1], -e[0].least))
    return PrunedSystem(t, model, table, graph, mask, tuple(dims), best[0])


def threshold_mask(table: HeightTable, graph: BlockGraph, t: float) -> np.ndarray:
    return table.values[graph.codes] <= t


def prune_below(sft: Sft, model: CantorModel, table: HeightTable, t: float) -> PrunedSystem:
    if table.sft != sft:
        raise ValueError("height table belongs to a different system")
    graph = block_graph(sft, table.width)
    return _select(graph, model, threshold_mask(table, graph, t), t, table)


def select_subhorseshoe(pruned: PrunedSystem, forbidden: Iterable[Sequence[int]], r0: int) -> tuple[PrunedSystem, float]:
    """Remove ``forbidden`` windows and reselect; returns the new system and the
    counting loss ``(ln N_before(r0) - ln N_after(r0)) / r0``."""
    graph = pruned.graph
    mask = pruned.mask.copy()
    for w in forbidden:
        i = graph.index(tuple(w))
        if not pruned.mask[i]:
            raise ValueError(f"forbidden window {tuple(w)} is not a vertex of the pruned system")
        mask[i] = False
    new = _select(graph, pruned.model, mask, pruned.t, pruned.table)
    before = pruned.counts(r0)[r0]
    after = new.counts(r0)[r0]
    loss = (math.log(before) - math.log(after)) / r0 if r0 > 0 else 0.0
    return new, loss


@dataclass(frozen=True)
class CurveSample:
    t: float
    d_u: float
    d_s: float
    method: str
    error: float


@dataclass(frozen=True)
class DimensionCurve:
    samples: tuple[CurveSample, ...]

    def is_monotone(self) -> bool:
        return all(a.d_u <= b.d_u and a.d_s <= b.d_s for a, b in zip(self.samples, self.samples[1:]))


def _dimension_or_zero(sft, model, table, t) -> tuple[float, float]:
    try:
        p = prune_below(sft, model, table, t)
    except EmptyPrune:
        return 0.0, 0.0
    return p.dimension, p.error_bound


def du_curve(
    sft: Sft,
    model_u: CantorModel,
    model_s: CantorModel,
    table: HeightTable,
    t_grid: Sequence[float],
) -> DimensionCurve:
    """``t -> (D_u(t), D_s(t))``; the stable side uses the time-reversed system."""
    grid = [float(t) for t in t_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("t_grid must be sorted")
    rsft = sft.reversed()
    rtable = table.reversed()
    out = []
    for t in grid:
        du, eu = _dimension_or_zero(sft, model_u, table, t)
        ds, es = _dimension_or_zero(rsft, model_s, rtable, t)
        out.append(CurveSample(t, du, ds, "pressure-root", max(eu, es)))
    return DimensionCurve(tuple(out))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumSlice:
    kind: str
    t: float
    values: tuple[float, ...]
    max_period: int
    middle_bound: int = 0


def dedup(values: Iterable[float], resolution: float = DEDUP_RESOLUTION) -> tuple[float, ...]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > resolution:
            out.append(float(v))
    return tuple(out)


def _middles(sft: Sft, bound: int) -> list[Word]:
    out: list[Word] = [()]
    for k in range(1, bound + 1):
        out.extend(enumerate_words(sft, k))
    return out


def iter_markov_points(sft: Sft, max_period: int, middle_bound: int) -> Iterator[TwoSidedPoint]:
    """Every point ``L^inf . M . R^inf`` with tails of period <= ``max_period`` and ``|M| <= middle_bound``."""
    orbits = periodic_orbits(sft, max_period)
    middles = _middles(sft, middle_bound)
    for left in orbits:
        for mid in middles:
            if mid and not sft.allows(left.cycle[-1], mid[0]):
                continue
            last = mid[-1] if mid else left.cycle[-1]
            for right in orbits:
                if sft.allows(last, right.cycle[0]):
                    yield TwoSidedPoint(left, mid, right)


def markov_value_set(sft: Sft, table: HeightTable, max_period: int, middle_bound: int) -> np.ndarray:
    """All Markov values of the generated points (not deduplicated)."""
    orbits = periodic_orbits(sft, max_period)
    tv = dict(zip(orbits, tail_values(table, orbits)))
    middles = _middles(sft, middle_bound)
    k = table.width - 1
    chunks = []
    for left in orbits:
        lseg = tuple(left.cycle[i % left.period] for i in range(-k, 0))
        segs = []
        tails = []
        for mid in middles:
            if mid and not sft.allows(left.cycle[-1], mid[0]):
                continue
            last = mid[-1] if mid else left.cycle[-1]
            for right in orbits:
                if sft.allows(last, right.cycle[0]):
                    segs.append(lseg + mid + right.unrolled(k))
                    tails.append(max(tv[left], tv[right]))
        if segs:
            chunks.append(np.maximum(_max_windows(table, segs), np.array(tails)))
    return np.concatenate(chunks) if chunks else np.empty(0)


def spectrum_slice(
    sft: Sft,
    table: HeightTable,
    kind: str,
    t: float,
    max_period: int,
    middle_bound: int = 0,
    resolution: float = DEDUP_RESOLUTION,
) -> SpectrumSlice:
    """Spectrum values ``<= t`` from tails of period ``<= max_period``; values
    closer than ``resolution`` are merged."""
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    if kind == "lagrange":
        values = tail_values(table, periodic_orbits(sft, max_period))
    elif kind == "markov":
        values = markov_value_set(sft, table, max_period, middle_bound)
    else:
        raise ValueError(f"unknown spectrum kind {kind!r}")
    kept = dedup((v for v in values if v <= t), resolution)
    return SpectrumSlice(kind, float(t), kept, max_period, middle_bound)


def slice_dimension(sl: SpectrumSlice, resolutions: Sequence[float]) -> DimensionEstimate:
    if not sl.values:
        raise DegenerateSet("empty spectrum slice")
    try:
        return box_count_dimension(np.array(sl.values), resolutions)
    except DegenerateSet:
        return DimensionEstimate(0.0, "box-count", 0.0, {"resolutions": list(resolutions)})
