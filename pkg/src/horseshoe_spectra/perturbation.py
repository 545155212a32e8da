"""Cubic perturbations of fibre profiles and numerical genericity diagnostics.

``f_abc(s) = f(s) - c s^3/6 - b s^2/2 - a s``. The scans turn the qualitative
conditions (regular values, transversal gradients, unique fibre maximizers)
into quantitative margins that can be checked at a tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import brentq

from .errors import BoundExceeded
from .geometry import CantorModel, cylinder_interval
from .spectra import HeightTable, build_table, window_coordinates
from .suspension import FiberProfile, RoofFunction, fiber_eval, fiber_max
from .symbolic import Sft, enumerate_words

DEFAULT_BOUND = 0.1
REGULAR_TOL = 1e-6
MIN_DENSITY = 64


@dataclass(frozen=True)
class PerturbationParams:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    bound: float = DEFAULT_BOUND

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not math.isfinite(v) or abs(v) > self.bound:
                raise BoundExceeded(f"|{name}| = {abs(v):g} exceeds bound {self.bound:g}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)


def perturb_fiber(profile: FiberProfile, params: PerturbationParams) -> FiberProfile:
    """``c1 -= a``, ``c2 -= b``, ``c3 -= c``; the sinusoid is untouched."""
    a0, b0, c0 = profile.shift
    shift = (a0 + params.a, b0 + params.b, c0 + params.c)
    return FiberProfile(profile.sft, profile.radius, profile.coeffs, shift)


# ---------------------------------------------------------------------------
# Regularity of the fibre derivatives
# ---------------------------------------------------------------------------

CONDITIONS = ("i", "ii", "iii", "iv")


@dataclass(frozen=True)
class ConditionResult:
    margin: float
    passed: bool
    vacuous: bool
    zeros: int


@dataclass(frozen=True)
class RegularityReport:
    conditions: dict
    density: int
    tol: float = REGULAR_TOL

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.conditions.values())

    @property
    def score(self) -> float:
        """Smallest non-vacuous margin (``inf`` when every condition is vacuous)."""
        return min((r.margin for r in self.conditions.values() if not r.vacuous), default=math.inf)

    def to_dict(self) -> dict:
        return {
            "density": self.density,
            "tol": self.tol,
            "passed": self.passed,
            "conditions": {
                k: {"margin": None if r.vacuous else r.margin, "passed": r.passed, "vacuous": r.vacuous, "zeros": r.zeros}
                for k, r in self.conditions.items()
            },
        }


def _zeros(g, tau: float, density: int) -> list[float]:
    """Isolated zeros of ``g`` on ``[0, tau]``: grid zeros plus sign changes, polished by Brent.

    A function vanishing on the whole grid has no isolated zeros.
    """
    s = np.linspace(0.0, tau, density + 1)
    v = g(s)
    if np.all(v == 0.0):
        return []
    out = [float(x) for x in s[v == 0.0]]
    idx = np.flatnonzero(v[:-1] * v[1:] < 0)
    for i in idx:
        out.append(brentq(g, s[i], s[i + 1], xtol=1e-14))
    return sorted(out)


def _fiber_conditions(coef: np.ndarray, tau: float, density: int) -> dict:
    """Margins ``(margin, zeros)`` of the four conditions on one fibre.

    (i)   ``f'`` at the section boundary ``s in {0, tau}``;
    (ii)  ``|f'''|`` at the zeros of ``f''''``;
    (iii) ``|f''|`` at the zeros of ``f'''``;
    (iv)  ``|f'|`` at the zeros of ``f''`` (including common zeros of ``f''`` and ``f'''``).
    A condition with no located zeros holds vacuously and has margin ``None``.
    """

    def d(k):
        return lambda s: fiber_eval(coef, s, k)

    out = {"i": (float(min(abs(fiber_eval(coef, 0.0, 1)), abs(fiber_eval(coef, tau, 1)))), 2)}
    for name, k in (("ii", 3), ("iii", 2), ("iv", 1)):
        z = _zeros(d(k + 1), tau, density)
        if z:
            out[name] = (float(np.min(np.abs(fiber_eval(coef, np.array(z), k)))), len(z))
        else:
            out[name] = (None, 0)
    return out


def _contexts(profile: FiberProfile, roof: RoofFunction) -> list:
    radius = max(profile.radius, roof.radius)
    return enumerate_words(profile.sft, 2 * radius + 1)


def regularity_scan(profile: FiberProfile, roof: RoofFunction, density: int = 128, tol: float = REGULAR_TOL) -> RegularityReport:
    """Minimum margin of each condition over every fibre."""
    if density < MIN_DENSITY:
        raise ValueError(f"grid density must be >= {MIN_DENSITY}")
    margins = {k: math.inf for k in CONDITIONS}
    zeros = {k: 0 for k in CONDITIONS}
    for ctx in _contexts(profile, roof):
        for name, (m, nz) in _fiber_conditions(profile.at(ctx), roof(ctx), density).items():
            zeros[name] += nz
            if m is not None:
                margins[name] = min(margins[name], m)
    results = {}
    for name in CONDITIONS:
        vac = math.isinf(margins[name])
        results[name] = ConditionResult(margins[name], vac or margins[name] >= tol, vac, zeros[name])
    return RegularityReport(results, density, tol)


def find_regular_params(
    profile: FiberProfile,
    roof: RoofFunction,
    trials: int,
    seed: int,
    bound: float = DEFAULT_BOUND,
    density: int = 128,
) -> tuple[PerturbationParams, RegularityReport]:
    """Best of the unperturbed profile and ``trials`` random small triples.

    Each trial draws ``c`` first, then ``b``, then ``a``; the score is the
    smallest non-vacuous condition margin and only strict improvements replace
    the incumbent, so the result is monotone in ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    best = PerturbationParams(bound=bound)
    best_rep = regularity_scan(profile, roof, density)
    for _ in range(trials):
        c = rng.uniform(-bound, bound)
        b = rng.uniform(-bound, bound)
        a = rng.uniform(-bound, bound)
        p = PerturbationParams(a, b, c, bound)
        rep = regularity_scan(perturb_fiber(profile, p), roof, density)
        if rep.score > best_rep.score:
            best, best_rep = p, rep
    return best, best_rep


# ---------------------------------------------------------------------------
# Transversality of the gradient of F
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransversalityReport:
    points: np.ndarray        # (N, 2): x_s, x_u
    partials: np.ndarray      # (N, 2): dF/dx_u, dF/dx_s
    margins: np.ndarray
    eps: float
    verdicts: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "verdicts", self.margins >= self.eps)

    @property
    def pass_fraction(self) -> float:
        return float(self.verdicts.mean()) if self.verdicts.size else 1.0

    @property
    def passed(self) -> bool:
        return bool(self.verdicts.all())

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "points": int(self.margins.size),
            "min_margin": float(self.margins.min()) if self.margins.size else None,
            "pass_fraction": self.pass_fraction,
            "passed": self.passed,
        }


def _side_words(sft: Sft, a0: int, half: int, reverse: bool) -> list:
    """Admissible words of length ``half`` starting at ``a0`` (read backwards if ``reverse``)."""
    system = sft.reversed() if reverse else sft
    return [w for w in enumerate_words(system, half) if w[0] == a0]


def transversality_scan(
    sft: Sft,
    model_u: CantorModel,
    model_s: CantorModel,
    table: HeightTable,
    depth: int,
    eps: float,
) -> TransversalityReport:
    """Finite-difference partials of ``F`` at sampled points of ``K``.

    ``F`` is read at its own resolution: for each centre symbol the window
    values sit on a tensor grid of ``(x_s, x_u)`` midpoints of the backward
    and forward half-windows, which is linearly interpolated. Sample points
    are two-sided words of odd length ``depth``; partials there are central
    differences of the interpolant with step equal to half the local cylinder
    length. Sampling finer than the window therefore refines where the
    gradient is looked at, not the plateaus of the locally constant table.
    """
    m = table.radius
    if depth < 2 * m + 1 or depth % 2 == 0:
        raise ValueError("depth must be odd and >= 2*radius + 1")
    half = (depth + 1) // 2
    pts, parts = [], []
    for a0 in range(sft.n):
        interp = _window_interpolant(sft, model_u, model_s, table, a0)
        if interp is None:
            continue
        cu = sorted((cylinder_interval(model_u, w) for w in _side_words(sft, a0, half, reverse=False)),
                    key=lambda c: c.midpoint)
        cs = sorted((cylinder_interval(model_s, w) for w in _side_words(sft, a0, half, reverse=True)),
                    key=lambda c: c.midpoint)
        for c_s in cs:
            hs = 0.5 * c_s.length
            for c_u in cu:
                hu = 0.5 * c_u.length
                x_s, x_u = c_s.midpoint, c_u.midpoint
                fu = interp([[x_s, x_u + hu], [x_s, x_u - hu]])
                fs = interp([[x_s + hs, x_u], [x_s - hs, x_u]])
                pts.append((x_s, x_u))
                parts.append(((fu[0] - fu[1]) / (2 * hu), (fs[0] - fs[1]) / (2 * hs)))
    points = np.array(pts).reshape(-1, 2)
    partials = np.array(parts).reshape(-1, 2)
    margins = np.min(np.abs(partials), axis=1) if partials.size else np.empty(0)
    return TransversalityReport(points, partials, margins, float(eps))


def _window_interpolant(sft: Sft, model_u: CantorModel, model_s: CantorModel, table: HeightTable, a0: int):
    """Linear interpolant of the windows centred at ``a0`` over their midpoint grid."""
    m = table.radius
    fwd = _side_words(sft, a0, m + 1, reverse=False)
    bwd = _side_words(sft, a0, m + 1, reverse=True)
    if not fwd or not bwd:
        return None
    fwd.sort(key=lambda w: cylinder_interval(model_u, w).midpoint)
    bwd.sort(key=lambda w: cylinder_interval(model_s, w).midpoint)
    xs = np.array([cylinder_interval(model_s, w).midpoint for w in bwd])
    xu = np.array([cylinder_interval(model_u, w).midpoint for w in fwd])
    # Both halves share the centre symbol, so every combination is admissible.
    values = np.array([[table[tuple(reversed(p[1:])) + f] for f in fwd] for p in bwd])
    if len(xs) < 2 or len(xu) < 2:
        # A single row or column carries no slope in that direction.
        xs = np.r_[xs, xs + 1.0] if len(xs) < 2 else xs
        xu = np.r_[xu, xu + 1.0] if len(xu) < 2 else xu
        values = np.pad(values, ((0, len(xs) - values.shape[0]), (0, len(xu) - values.shape[1])), mode="edge")
    return RegularGridInterpolator((xs, xu), values, method="linear", bounds_error=False, fill_value=None)


def tilt_table(table: HeightTable, model_u: CantorModel, model_s: CantorModel, v1: float, v2: float) -> HeightTable:
    """``F - v1 x_s - v2 x_u`` with window-midpoint coordinates."""

    def tilted(w):
        xs, xu = window_coordinates(model_u, model_s, w)
        return table[w] - v1 * xs - v2 * xu

    return build_table(table.sft, table.radius, tilted)


def find_transverse_shift(
    sft: Sft,
    model_u: CantorModel,
    model_s: CantorModel,
    table: HeightTable,
    depth: int,
    eps: float,
    scale: float = 0.05,
    trials: int = 20,
    seed: int = 0,
) -> tuple[tuple[float, float], HeightTable, TransversalityReport]:
    """Search small tilts ``(v1, v2)`` for one whose re-scan passes everywhere.

    Returns the first passing tilt, or the one with the best pass fraction.
    """
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(trials):
        v1, v2 = rng.uniform(-scale, scale, size=2)
        tilted = tilt_table(table, model_u, model_s, float(v1), float(v2))
        rep = transversality_scan(sft, model_u, model_s, tilted, depth, eps)
        if best is None or rep.pass_fraction > best[2].pass_fraction:
            best = ((float(v1), float(v2)), tilted, rep)
        if rep.passed:
            break
    return best


# ---------------------------------------------------------------------------
# Unique fibre maximizers
# ---------------------------------------------------------------------------


def unique_maximizer_fraction(
    profile: FiberProfile,
    roof: RoofFunction,
    sft: Sft | None = None,
    samples: int | None = None,
    seed: int = 0,
) -> float:
    """Fraction of fibre windows whose maximum is attained at a single time.

    All windows are used when ``samples`` covers them; otherwise a seeded
    random subset of size ``samples``.
    """
    sft = sft or profile.sft
    radius = max(profile.radius, roof.radius)
    ctx = enumerate_words(sft, 2 * radius + 1)
    if samples is not None:
        if samples < 1:
            raise ValueError("samples must be >= 1")
        if samples < len(ctx):
            rng = np.random.default_rng(seed)
            pick = np.sort(rng.choice(len(ctx), size=samples, replace=False))
            ctx = [ctx[i] for i in pick]
    hits = sum(fiber_max(profile, roof, w).unique for w in ctx)
    return hits / len(ctx)
