"""Command implementations behind the CLI. Each returns a summary dict and
writes its artifacts into the output directory."""
from __future__ import annotations

import math
import time
from pathlib import Path

from . import artifacts
from .artifacts import RunReport
from .config import RunConfig
from .errors import ConfigError
from .geometry import dimension_counting, dimension_pressure, geometric_resolutions
from .perturbation import (
    find_regular_params,
    perturb_fiber,
    regularity_scan,
    transversality_scan,
    unique_maximizer_fraction,
)
from .spectra import (
    block_graph,
    du_curve,
    lagrange_value,
    periodic_point,
    prune_below,
    select_subhorseshoe,
    slice_dimension,
    spectrum_slice,
)
from .suspension import flow_lagrange, suspension_dimension_check
from .symbolic import periodic_orbits

COMMANDS = ("dims", "curve", "spectrum", "prune", "suspend-check", "perturb", "selftest")
DEFAULT_SLICE_RES = (4, 12)
DEFAULT_SUSPENSION_RES = (1, 6, 3.0)


def _estimate(e) -> dict:
    return {"value": e.value, "method": e.method, "error_bound": e.error_bound}


def _side(sft, model, r_min, r_max, eta) -> dict:
    graph = block_graph(sft, 1)
    out = {"pressure": _estimate(dimension_pressure(model, graph, tol=eta))}
    out["counting"] = _estimate(dimension_counting(model, graph, r_min, r_max))
    return out


def cmd_dims(cfg: RunConfig, out: Path, files: list) -> dict:
    sft = cfg.sft()
    r = cfg.run
    return {
        "unstable": _side(sft, cfg.unstable_model(), r.r_min, r.r_max, r.tolerances.eta),
        "stable": _side(sft.reversed(), cfg.stable_model(), r.r_min, r.r_max, r.tolerances.eta),
    }


def _t_grid(cfg: RunConfig, table) -> list[float]:
    if cfg.run.t_grid:
        return list(cfg.run.t_grid)
    return [float(v) for v in table.distinct_values()]


def cmd_curve(cfg: RunConfig, out: Path, files: list) -> dict:
    sft = cfg.sft()
    table = cfg.height_table()
    curve = du_curve(sft, cfg.unstable_model(), cfg.stable_model(), table, _t_grid(cfg, table))
    files.append(artifacts.write_curve_csv(curve, out / "curve.csv").name)
    files.append(artifacts.emit_curve_svg(curve, out / "curve.svg").name)
    return {"samples": len(curve.samples), "monotone": curve.is_monotone(),
            "max_D_u": max(s.d_u for s in curve.samples), "max_D_s": max(s.d_s for s in curve.samples)}


def _threshold(cfg: RunConfig) -> float:
    if cfg.run.t is not None:
        return cfg.run.t
    if cfg.run.t_grid:
        return cfg.run.t_grid[-1]
    return math.inf


def _slice_resolutions(cfg: RunConfig) -> list[float]:
    return cfg.resolutions() or geometric_resolutions(*DEFAULT_SLICE_RES)


def cmd_spectrum(cfg: RunConfig, out: Path, files: list) -> dict:
    sft = cfg.sft()
    table = cfg.height_table()
    r = cfg.run
    t = _threshold(cfg)
    sl = spectrum_slice(sft, table, r.kind, t, r.max_period, r.middle_bound, r.tolerances.delta)
    files.append(artifacts.write_spectrum_csv(sl, out / "spectrum.csv").name)
    res = _slice_resolutions(cfg)
    est = slice_dimension(sl, res) if sl.values else None
    dim = {
        "kind": sl.kind,
        "t": t,
        "max_period": sl.max_period,
        "middle_bound": sl.middle_bound,
        "values": len(sl.values),
        "resolutions": res,
        "dimension": None if est is None else _estimate(est),
    }
    files.append(artifacts.write_json(out / "spectrum_dim.json", dim).name)
    return {"values": len(sl.values), "dimension": None if est is None else est.value}


def cmd_prune(cfg: RunConfig, out: Path, files: list) -> dict:
    sft = cfg.sft()
    table = cfg.height_table()
    t = _threshold(cfg)
    pruned = prune_below(sft, cfg.unstable_model(), table, t)
    doc = {"pruned": pruned.summary()}
    if cfg.run.forbidden:
        sel, loss = select_subhorseshoe(pruned, cfg.run.forbidden, cfg.run.r0)
        bound = cfg.run.tolerances.tau / 6 * pruned.dimension
        doc["selected"] = {"forbidden": [list(w) for w in cfg.run.forbidden], "r0": cfg.run.r0,
                           "counting_loss": loss, "loss_bound": bound, "within_bound": loss <= bound,
                           "summary": sel.summary()}
    files.append(artifacts.write_json(out / "prune.json", doc).name)
    return {"t": t, "dimension": pruned.dimension, "components": len(pruned.components)}


def _require_suspension(cfg: RunConfig):
    if cfg.height.kind != "suspension":
        raise ConfigError("height.kind", "this command needs a suspension height")
    return cfg.profile_and_roof()


def cmd_suspend(cfg: RunConfig, out: Path, files: list) -> dict:
    profile, roof = _require_suspension(cfg)
    sft = cfg.sft()
    table = cfg.height_table()
    radius = max(profile.radius, roof.radius)
    worst = 0.0
    orbits = periodic_orbits(sft, cfg.run.max_period)
    for o in orbits:
        x = periodic_point(o)
        a = lagrange_value(sft, table, x)
        b = flow_lagrange(profile, roof, x, radius + 2 * o.period)
        worst = max(worst, abs(a - b))
    res = cfg.resolutions() or geometric_resolutions(*DEFAULT_SUSPENSION_RES)
    dk, dl, resid = suspension_dimension_check(cfg.unstable_model(), roof, max(cfg.run.depth, 6), res,
                                               model_s=cfg.stable_model())
    doc = {
        "reduction": {"orbits": len(orbits), "max_period": cfg.run.max_period, "max_abs_difference": worst,
                      "passed": worst <= 1e-9},
        "dimension": {"dim_K": dk, "dim_Lambda": dl, "residual": resid, "depth": max(cfg.run.depth, 6),
                      "resolutions": res, "passed": resid <= 0.08},
    }
    files.append(artifacts.write_json(out / "suspend.json", doc).name)
    return {"reduction_error": worst, "residual": resid}


def cmd_perturb(cfg: RunConfig, out: Path, files: list) -> dict:
    profile, roof = _require_suspension(cfg)
    sft = cfg.sft()
    r = cfg.run
    before = regularity_scan(profile, roof)
    params, after = find_regular_params(profile, roof, r.trials, r.seed)
    perturbed = perturb_fiber(profile, params)
    table = cfg.height_table()
    trans = transversality_scan(sft, cfg.unstable_model(), cfg.stable_model(), table, 2 * table.radius + 1,
                                r.tolerances.eps)
    doc = {
        "regularity_before": before.to_dict(),
        "regular_params": {"a": params.a, "b": params.b, "c": params.c, "trials": r.trials, "seed": r.seed},
        "regularity_after": after.to_dict(),
        "unique_fraction_before": unique_maximizer_fraction(profile, roof, sft),
        "unique_fraction_after": unique_maximizer_fraction(perturbed, roof, sft),
        "transversality": trans.to_dict(),
    }
    files.append(artifacts.write_json(out / "perturb.json", doc).name)
    return {"regular_before": before.passed, "regular_after": after.passed,
            "transversal_fraction": trans.pass_fraction}


def cmd_selftest(cfg: RunConfig, out: Path, files: list) -> dict:
    from .selftest import run_selftest

    return run_selftest(cfg, out, files)


HANDLERS = {
    "dims": cmd_dims,
    "curve": cmd_curve,
    "spectrum": cmd_spectrum,
    "prune": cmd_prune,
    "suspend-check": cmd_suspend,
    "perturb": cmd_perturb,
    "selftest": cmd_selftest,
}


def run(command: str, cfg: RunConfig, out: Path | str) -> RunReport:
    """Execute ``command`` and write its artifacts plus ``report.json``."""
    if command not in HANDLERS:
        raise ValueError(f"unknown command {command!r}")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(command, artifacts.digest(cfg.to_dict()))
    start = time.perf_counter()
    files: list = []
    report.summary = HANDLERS[command](cfg, out, files)
    if command == "curve" and not report.summary.get("monotone", True):
        report.warnings.append("dimension curve is not monotone")
    report.elapsed = time.perf_counter() - start
    report.files = files + ["report.json"]
    artifacts.write_json(out / "report.json", report.to_dict())
    return report
