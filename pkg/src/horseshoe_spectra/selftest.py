"""Invariant suite run by ``horseshoe-spectra selftest``.

Closed-form checks run on fixed systems. Structural invariants (nested
pruning masks, spectrum inclusions, shift invariance, ...) run on the system
and height of the supplied config. The command artifacts are written as well,
so two selftest runs can be compared byte for byte.
"""
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable

import numpy as np

from . import kernels
from .config import RunConfig, config_from_text, dump_config
from .errors import HorseshoeError
from .geometry import AffineModel, dimension_pressure
from .perturbation import PerturbationParams, perturb_fiber
from .spectra import (
    block_graph,
    du_curve,
    lagrange_value,
    markov_value,
    periodic_point,
    random_points,
    spectrum_slice,
    threshold_mask,
)
from .suspension import constant_roof, fiber_max, flow_lagrange, height_table_from_suspension, profile_from_function, uniform_profile
from .symbolic import full_shift, golden_mean_shift, periodic_orbits

RANDOM_POINTS = 2000


def _check_closed_forms(cfg, table) -> str:
    g = block_graph(full_shift(2), 1)
    d1 = dimension_pressure(AffineModel((1 / 3, 1 / 3), (0, 2 / 3)), g).value
    d2 = dimension_pressure(AffineModel((1 / 2, 1 / 4), (0, 3 / 4)), g).value
    assert abs(d1 - math.log(2) / math.log(3)) < 1e-6, d1
    assert abs(d2 - 0.6942419136) < 1e-6, d2
    return f"{d1:.9f} {d2:.9f}"


def _grid(cfg, table) -> list:
    return list(cfg.run.t_grid) or [float(v) for v in table.distinct_values()]


def _check_nested_masks(cfg, table) -> str:
    sft = cfg.sft()
    graph = block_graph(sft, table.width)
    prev = None
    for t in _grid(cfg, table):
        m = threshold_mask(table, graph, t)
        if prev is not None:
            assert not np.any(prev & ~m), f"mask at t={t} does not contain the previous one"
        prev = m
    return f"{len(_grid(cfg, table))} thresholds"


def _check_curve_monotone(cfg, table) -> str:
    curve = du_curve(cfg.sft(), cfg.unstable_model(), cfg.stable_model(), table, _grid(cfg, table))
    assert curve.is_monotone(), "dimension curve decreases"
    return f"D_u(max) = {curve.samples[-1].d_u:.6f}"


def _check_inclusions(cfg, table) -> str:
    sft = cfg.sft()
    p = min(cfg.run.max_period, 8)
    t = math.inf
    lag = set(spectrum_slice(sft, table, "lagrange", t, p).values)
    mar = set(spectrum_slice(sft, table, "markov", t, p, cfg.run.middle_bound).values)
    rng = set(float(v) for v in table.distinct_values())
    assert lag <= mar, "Lagrange slice not inside Markov slice"
    assert mar <= rng, "Markov slice not inside range(F)"
    return f"|L|={len(lag)} |M|={len(mar)}"


def _check_l_le_m(cfg, table) -> str:
    sft = cfg.sft()
    rng = np.random.default_rng(cfg.run.seed)
    pts = random_points(sft, rng, RANDOM_POINTS, max_period=6, max_middle=4)
    for x in pts:
        l, m = lagrange_value(sft, table, x), markov_value(sft, table, x)
        assert l <= m, f"l > m at {x}"
        assert markov_value(sft, table, x.shifted(3)) == m
        assert lagrange_value(sft, table, x.shifted(3)) == l
    return f"{len(pts)} points"


def _check_periodic(cfg, table) -> str:
    sft = cfg.sft()
    orbits = periodic_orbits(sft, min(cfg.run.max_period, 6))
    for o in orbits:
        x = periodic_point(o)
        assert lagrange_value(sft, table, x) == markov_value(sft, table, x)
    return f"{len(orbits)} orbits"


def _check_fiber_examples(cfg, table) -> str:
    sft = full_shift(1)
    roof = constant_roof(sft, 1.0)
    r = fiber_max(uniform_profile(sft, A=1.0, omega=2 * math.pi), roof, (0,))
    assert abs(r.value - 1) < 1e-12 and abs(r.argmax - 0.25) < 1e-6 and r.unique
    r = fiber_max(uniform_profile(sft, c2=-2.0, c1=1.0), roof, (0,))
    assert abs(r.value - 0.25) < 1e-12 and abs(r.argmax - 0.5) < 1e-6 and r.unique
    assert not fiber_max(uniform_profile(sft), roof, (0,)).unique
    return "sine, quadratic, constant"


def _check_reduction(cfg, table) -> str:
    sft = golden_mean_shift()
    prof = profile_from_function(sft, 1, lambda w: (0.1 * w[0], 0.2 * w[2], -0.3, 0.0, 0.5, 2 * math.pi * (1 + w[1]), 0.2))
    roof = constant_roof(sft, 1.0)
    tab = height_table_from_suspension(prof, roof, sft, 1)
    worst = 0.0
    for o in periodic_orbits(sft, 6):
        x = periodic_point(o)
        worst = max(worst, abs(flow_lagrange(prof, roof, x, 1 + 2 * o.period) - lagrange_value(sft, tab, x)))
    assert worst <= 1e-9, worst
    return f"max difference {worst:.2e}"


def _check_additivity(cfg, table) -> str:
    sft = full_shift(2)
    prof = uniform_profile(sft, 0.3, 0.1, -0.2, 0.05, 0.4, 3.0, 0.1)
    p, q = PerturbationParams(0.013, -0.07, 0.021), PerturbationParams(-0.04, 0.011, 0.05)
    twice = perturb_fiber(perturb_fiber(prof, p), q)
    once = perturb_fiber(prof, PerturbationParams(p.a + q.a, p.b + q.b, p.c + q.c))
    assert np.array_equal(twice.effective, once.effective)
    return "exact"


def _check_round_trip(cfg, table) -> str:
    assert config_from_text(dump_config(cfg)) == cfg
    assert config_from_text(dump_config(cfg, "json")) == cfg
    return "yaml, json"


def _check_kernels(cfg, table) -> str:
    impls = kernels.backends()
    if len(impls) < 2:
        return "single backend"
    rng = np.random.default_rng(0)
    symbols = rng.integers(0, 2, 400).astype(np.int64)
    offsets = np.array([0, 100, 250, 400], dtype=np.int64)
    tab = rng.random(8)
    a = impls["python"].window_max(symbols, offsets, tab, 2, 3)
    b = impls["cython"].window_max(symbols, offsets, tab, 2, 3)
    assert np.array_equal(a, b)
    return "python == cython"


CHECKS: tuple[tuple[str, Callable], ...] = (
    ("closed_form_dimensions", _check_closed_forms),
    ("nested_pruning_masks", _check_nested_masks),
    ("monotone_dimension_curve", _check_curve_monotone),
    ("spectrum_inclusions", _check_inclusions),
    ("lagrange_below_markov", _check_l_le_m),
    ("periodic_l_equals_m", _check_periodic),
    ("fiber_max_examples", _check_fiber_examples),
    ("flow_reduction", _check_reduction),
    ("perturbation_additivity", _check_additivity),
    ("config_round_trip", _check_round_trip),
    ("kernel_backends_agree", _check_kernels),
)


def run_checks(cfg: RunConfig) -> list[dict]:
    table = cfg.height_table()
    out = []
    for name, fn in CHECKS:
        try:
            detail = fn(cfg, table)
            out.append({"name": name, "passed": True, "detail": detail})
        except (AssertionError, HorseshoeError, ValueError) as exc:
            out.append({"name": name, "passed": False, "detail": f"{type(exc).__name__}: {exc}"})
    return out


def run_selftest(cfg: RunConfig, out: Path, files: list) -> dict:
    from .commands import cmd_curve, cmd_dims, cmd_perturb, cmd_prune, cmd_spectrum, cmd_suspend

    artifacts_summary = {"dims": cmd_dims(cfg, out, files), "curve": cmd_curve(cfg, out, files),
                         "spectrum": cmd_spectrum(cfg, out, files)}
    try:
        artifacts_summary["prune"] = cmd_prune(cfg, out, files)
    except HorseshoeError as exc:
        artifacts_summary["prune"] = {"error": str(exc)}
    if cfg.height.kind == "suspension":
        artifacts_summary["suspend-check"] = cmd_suspend(cfg, out, files)
        artifacts_summary["perturb"] = cmd_perturb(cfg, out, files)
    checks = run_checks(cfg)
    return {"passed": all(c["passed"] for c in checks), "checks": checks, "commands": artifacts_summary}
