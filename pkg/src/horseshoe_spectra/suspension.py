"""Suspension flows over the symbolic horseshoe.

The flow runs up each fibre ``[0, tau(y))`` and then jumps to the next symbol
of the base sequence. Heights on the section are fibre maxima of the profile
``f(y, s) = c0 + c1 s + c2 s^2/2 + c3 s^3/6 + A sin(omega s + phi0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .geometry import CantorModel, box_count_dimension, cylinder_interval
from .spectra import HeightTable, TwoSidedPoint, build_table
from .symbolic import Sft, Word, enumerate_words, full_shift, word_code

MAX_FREQUENCY = 16 * math.pi
GRID = 256
GOLDEN_TOL = 1e-10
INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True, eq=False)
class RoofFunction:
    """Return time ``tau`` as a locally constant function of a window."""

    table: HeightTable

    def __post_init__(self):
        v = self.table.values[np.isfinite(self.table.values)]
        if v.size == 0 or v.min() <= 0:
            raise ValueError("roof function must be strictly positive")

    @property
    def radius(self) -> int:
        return self.table.radius

    @property
    def minimum(self) -> float:
        return float(np.nanmin(self.table.values))

    def __call__(self, context: Sequence[int]) -> float:
        return _inner(self.table, context)


def constant_roof(sft: Sft, tau: float = 1.0) -> RoofFunction:
    return RoofFunction(build_table(sft, 0, lambda w: tau))


def symbol_roof(sft: Sft, taus: Sequence[float]) -> RoofFunction:
    return RoofFunction(build_table(sft, 0, lambda w: taus[w[0]]))


def _inner(table: HeightTable, context: Sequence[int]) -> float:
    """Value of ``table`` on the centred sub-window of an odd-length context."""
    c = len(context) // 2
    r = table.radius
    if c < r:
        raise ValueError(f"context of radius {c} is narrower than table radius {r}")
    return float(table.values[word_code(context[c - r:c + r + 1], table.sft.n)])


COEFF_NAMES = ("c0", "c1", "c2", "c3", "A", "omega", "phi0")


@dataclass(frozen=True, eq=False)
class FiberProfile:
    """Per-window fibre coefficients ``(c0, c1, c2, c3, A, omega, phi0)``.

    ``shift = (a, b, c)`` is a pending perturbation subtracted from
    ``(c1, c2, c3)``. Keeping it separate makes successive perturbations
    compose exactly.
    """

    sft: Sft
    radius: int
    coeffs: np.ndarray
    shift: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        c = self.coeffs
        if c.ndim != 2 or c.shape[1] != 7:
            raise ValueError("coefficient array must have shape (windows, 7)")
        live = c[~np.isnan(c).any(axis=1)]
        if not np.all(np.isfinite(live)):
            raise ValueError("fibre coefficients must be finite")
        if np.any(np.abs(live[:, 5]) > MAX_FREQUENCY + 1e-12):
            raise ValueError("fibre frequency exceeds 16*pi")

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    def at(self, context: Sequence[int]) -> np.ndarray:
        c = len(context) // 2
        r = self.radius
        if c < r:
            raise ValueError(f"context of radius {c} is narrower than profile radius {r}")
        return self.effective[word_code(context[c - r:c + r + 1], self.sft.n)]

    @cached_property
    def effective(self) -> np.ndarray:
        """Coefficients with the pending shift applied."""
        out = self.coeffs.copy()
        out[:, 1:4] -= np.asarray(self.shift, dtype=float)
        return out


def profile_from_function(sft: Sft, radius: int, func: Callable[[Word], Sequence[float]]) -> FiberProfile:
    width = 2 * radius + 1
    coeffs = np.full((sft.n ** width, 7), np.nan)
    for w in enumerate_words(sft, width):
        coeffs[word_code(w, sft.n)] = np.asarray(func(w), dtype=float)
    return FiberProfile(sft, radius, coeffs)


def uniform_profile(sft: Sft, c0=0.0, c1=0.0, c2=0.0, c3=0.0, A=0.0, omega=0.0, phi0=0.0) -> FiberProfile:
    row = (c0, c1, c2, c3, A, omega, phi0)
    return profile_from_function(sft, 0, lambda w: row)


def fiber_eval(coef: np.ndarray, s, order: int = 0):
    """Fibre function (or its ``order``-th derivative in ``s``) at ``s``."""
    c0, c1, c2, c3, a, om, ph = coef
    s = np.asarray(s, dtype=float)
    arg = om * s + ph
    if order == 0:
        return c0 + c1 * s + c2 * s**2 / 2 + c3 * s**3 / 6 + a * np.sin(arg)
    if order == 1:
        return c1 + c2 * s + c3 * s**2 / 2 + a * om * np.cos(arg)
    if order == 2:
        return c2 + c3 * s - a * om**2 * np.sin(arg)
    if order == 3:
        return c3 - a * om**3 * np.cos(arg) + 0 * s
    if order == 4:
        return a * om**4 * np.sin(arg) + 0 * s
    raise ValueError("derivative order must be 0..4")


def golden_max(f: Callable[[float], float], a: float, b: float, tol: float = GOLDEN_TOL) -> tuple[float, float]:
    """Golden-section search for a maximum of a unimodal ``f`` on ``[a, b]``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    # Endpoints may beat the interior when the maximum sits on the boundary.
    best = max(((f(x), x) for x in (a, 0.5 * (a + b), b)))
    return best[1], best[0]


@dataclass(frozen=True)
class FiberMax:
    value: float
    argmax: float
    unique: bool


def fiber_max_coeffs(coef: np.ndarray, tau: float, grid: int = GRID) -> FiberMax:
    if tau <= 0:
        raise ValueError("roof must be positive")
    if grid < GRID:
        raise ValueError(f"fibre grid must have at least {GRID} samples")
    s = np.linspace(0.0, tau, grid + 1)
    v = fiber_eval(coef, s)
    left = np.r_[-np.inf, v[:-1]]
    right = np.r_[v[1:], -np.inf]
    cand = np.flatnonzero((v >= left) & (v >= right))

    def f(x):
        return float(fiber_eval(coef, x))

    refined = []
    for i in cand:
        a = s[max(i - 1, 0)]
        b = s[min(i + 1, grid)]
        x, fx = golden_max(f, a, b)
        refined.append((fx, x))
    value, arg = max(refined, key=lambda t: (t[0], -t[1]))
    unique = all(abs(x - arg) <= 1e-6 for fx, x in refined if fx >= value - 1e-9)
    return FiberMax(value, arg, unique)


def fiber_max(profile: FiberProfile, roof: RoofFunction, context: Sequence[int], grid: int = GRID) -> FiberMax:
    """Global maximum of the fibre over ``[0, tau(context)]``."""
    tau = roof(context)
    if tau <= 0:
        raise ValueError("roof must be positive")
    return fiber_max_coeffs(profile.at(context), tau, grid)


def height_table_from_suspension(profile: FiberProfile, roof: RoofFunction, sft: Sft, m_out: int) -> HeightTable:
    """Section height ``F = max over the fibre of f`` as a table of radius ``m_out``."""
    if m_out < max(roof.radius, profile.radius):
        raise ValueError("output radius must cover the roof and profile radii")
    return build_table(sft, m_out, lambda w: fiber_max(profile, roof, w).value)


@dataclass(frozen=True)
class SuspensionPoint:
    base: TwoSidedPoint
    s: float

    def validate(self, roof: RoofFunction) -> "SuspensionPoint":
        tau = roof(_context(self.base, self.base.origin, roof.radius))
        if not 0.0 <= self.s < tau:
            raise ValueError(f"fibre time {self.s} outside [0, {tau})")
        return self


def _context(x: TwoSidedPoint, i: int, radius: int) -> Word:
    return tuple(x.symbol(j) for j in range(i - radius, i + radius + 1))


def flow_lagrange(
    profile: FiberProfile,
    roof: RoofFunction,
    x: TwoSidedPoint,
    horizon: int,
    steps_per_fiber: int = 512,
) -> float:
    """limsup of ``f`` along the suspension flow through ``x``, by direct simulation.

    The flow is stepped through ``horizon`` returns starting at the origin of
    the middle word. Local maxima of the sampled trajectory are polished with a
    bounded Brent search. The limsup is the largest fibre maximum over the last
    full period of returns.
    """
    p = x.right.period
    radius = max(profile.radius, roof.radius)
    if horizon < len(x.middle) + radius + p:
        raise ValueError("horizon must reach one full period of the right tail")
    fiber_best = []
    for n in range(horizon):
        ctx = _context(x, n, radius)
        tau = roof(ctx)
        if tau <= 0:
            raise ValueError("roof must be positive")
        coef = profile.at(ctx)
        ts = np.linspace(0.0, tau, steps_per_fiber + 1)
        vals = fiber_eval(coef, ts)
        best = float(vals.max())
        peaks = [i for i in range(len(ts)) if (i == 0 or vals[i] >= vals[i - 1]) and (i == len(ts) - 1 or vals[i] >= vals[i + 1])]
        for i in peaks:
            lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, len(ts) - 1)]
            res = minimize_scalar(lambda u: -float(fiber_eval(coef, u)), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
        fiber_best.append(best)
    return max(fiber_best[-p:])


def suspension_dimension_check(
    model_u: CantorModel,
    roof: RoofFunction,
    depth: int,
    resolutions: Sequence[float],
    model_s: CantorModel | None = None,
    fiber_samples: int = 729,
) -> tuple[float, float, float]:
    """Box dimensions of the section ``K`` and the mapping torus over it.

    Points are midpoints of depth-``depth`` cylinders on each side, with
    ``fiber_samples`` evenly spaced heights on every fibre, so resolutions
    should stay above both sampling scales.

    Returns ``(dim_K, dim_Lambda, |dim_Lambda - dim_K - 1|)``.
    """
    if depth < 6:
        raise ValueError("depth must be >= 6")
    model_s = model_s or model_u
    sft = roof.table.sft
    if sft.n != model_u.n or sft.n != model_s.n:
        raise ValueError("models and roof must share the alphabet")
    d = depth
    words = enumerate_words(sft, 2 * d - 1)
    base = np.empty((len(words), 2))
    taus = np.empty(len(words))
    for i, w in enumerate(words):
        base[i, 0] = cylinder_interval(model_s, w[d - 1::-1]).midpoint
        base[i, 1] = cylinder_interval(model_u, w[d - 1:]).midpoint
        taus[i] = roof(w)
    frac = (np.arange(fiber_samples) + 0.5) / fiber_samples
    cloud = np.empty((len(words) * fiber_samples, 3))
    cloud[:, 0] = np.repeat(base[:, 0], fiber_samples)
    cloud[:, 1] = np.repeat(base[:, 1], fiber_samples)
    cloud[:, 2] = (taus[:, None] * frac[None, :]).ravel()
    dim_k = box_count_dimension(base, resolutions).value
    dim_l = box_count_dimension(cloud, resolutions).value
    return dim_k, dim_l, abs(dim_l - dim_k - 1.0)


def periodic_base_roof(tau: float = 1.0) -> RoofFunction:
    """Roof over the one-symbol system (a single periodic orbit)."""
    return constant_roof(full_shift(1), tau)
