"""Run configuration: parsing, validation and round-trip serialization.

A config is one YAML (or JSON) document::

    schema_version: 1
    system:   {alphabet: 2, transitions: [[1, 1], [1, 1]]}
    model_u:  {kind: affine, ratios: [0.3333, 0.3333], offsets: [0, 0.6667]}
    model_s:  {kind: gauss, digits: [1, 2], depth: 8}      # optional
    height:   {kind: symbol, values: [0, 1]}
    run:      {t_grid: [0.5, 1.0], max_period: 6}

``docs/config.md`` documents every field. Validation failures raise
:class:`ConfigError` with the dotted path of the offending field.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError, EmptySystem
from .geometry import AffineModel, CantorModel, GaussModel, geometric_resolutions
from .spectra import HeightTable, geometric_table, symbol_table, table_from_mapping
from .suspension import FiberProfile, RoofFunction, height_table_from_suspension, profile_from_function, symbol_roof
from .symbolic import Sft, enumerate_words, full_shift, validate_sft

SCHEMA_VERSION = 1
MODEL_KINDS = ("affine", "gauss")
HEIGHT_KINDS = ("symbol", "table", "geometric", "suspension")
SPECTRUM_KINDS = ("markov", "lagrange")
GEOMETRIC_FUNCS = {
    "sum": lambda xs, xu: xs + xu,
    "neg_sum": lambda xs, xu: -(xs + xu),
    "unstable": lambda xs, xu: xu,
    "stable": lambda xs, xu: xs,
}


@dataclass(frozen=True)
class SystemSpec:
    alphabet: int
    transitions: tuple | None = None


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    ratios: tuple | None = None
    offsets: tuple | None = None
    digits: tuple | None = None
    depth: int = 8


@dataclass(frozen=True)
class ProfileSpec:
    """Fibre profile: ``default`` coefficients plus per-window overrides."""

    radius: int = 0
    default: tuple = (0.0,) * 7
    windows: tuple = ()


@dataclass(frozen=True)
class HeightSpec:
    kind: str
    radius: int = 0
    values: tuple | None = None
    table: tuple = ()
    func: str = "sum"
    profile: ProfileSpec | None = None
    roof: tuple | None = None


@dataclass(frozen=True)
class Tolerances:
    """Named tolerances: ``eta`` pressure root, ``tau`` counting loss,
    ``delta`` value deduplication, ``eps`` transversality threshold."""

    eta: float = 1e-10
    tau: float = 0.1
    delta: float = 1e-12
    eps: float = 1e-3


@dataclass(frozen=True)
class RunSpec:
    t_grid: tuple = ()
    t: float | None = None
    kind: str = "markov"
    max_period: int = 6
    middle_bound: int = 0
    depth: int = 7
    r_min: int = 4
    r_max: int = 12
    resolutions: tuple = ()
    seed: int = 0
    trials: int = 100
    forbidden: tuple = ()
    r0: int = 8
    tolerances: Tolerances = field(default_factory=Tolerances)
    output: str | None = None


@dataclass(frozen=True)
class RunConfig:
    system: SystemSpec
    model_u: ModelSpec
    height: HeightSpec
    run: RunSpec = field(default_factory=RunSpec)
    model_s: ModelSpec | None = None
    schema_version: int = SCHEMA_VERSION

    # ---- builders --------------------------------------------------------

    def sft(self) -> Sft:
        if self.system.transitions is None:
            return full_shift(self.system.alphabet)
        return validate_sft(self.system.transitions)

    def unstable_model(self) -> CantorModel:
        return _build_model(self.model_u, "model_u")

    def stable_model(self) -> CantorModel:
        if self.model_s is None:
            return self.unstable_model()
        return _build_model(self.model_s, "model_s")

    def height_table(self) -> HeightTable:
        return _build_height(self, self.sft())

    def profile_and_roof(self) -> tuple[FiberProfile, RoofFunction]:
        if self.height.kind != "suspension":
            raise ConfigError("height.kind", "a suspension height is required")
        return _build_profile(self.height, self.sft())

    def resolutions(self) -> list[float]:
        return list(self.run.resolutions)

    def to_dict(self) -> dict:
        """The document form accepted by :func:`parse_config`."""
        d = _prune_none(asdict(self))
        h = d["height"]
        h["table"] = [{"window": list(w), "value": v} for w, v in self.height.table]
        if self.height.profile is not None:
            h["profile"]["windows"] = [{"window": list(w), "coeffs": list(c)} for w, c in self.height.profile.windows]
        return d


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _prune_none(obj):
    if isinstance(obj, dict):
        return {k: _prune_none(v) for k, v in obj.items() if v is not None}
    if isinstance(obj, (list, tuple)):
        return [_prune_none(v) for v in obj]
    return obj


def _get(d: dict, key: str, path: str, kind, required: bool = False, default=None):
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    v = d[key]
    p = f"{path}.{key}"
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(p, f"expected an integer, got {v!r}")
        return v
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(p, f"expected a finite number, got {v!r}")
        return float(v)
    if kind is str:
        if not isinstance(v, str):
            raise ConfigError(p, f"expected a string, got {v!r}")
        return v
    if kind is dict:
        if not isinstance(v, dict):
            raise ConfigError(p, "expected a mapping")
        return v
    if kind is list:
        if not isinstance(v, (list, tuple)):
            raise ConfigError(p, "expected a list")
        return list(v)
    raise TypeError(kind)


def _floats(values, path: str) -> tuple:
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ConfigError(f"{path}[{i}]", f"expected a finite number, got {v!r}")
        out.append(float(v))
    return tuple(out)


def _ints(values, path: str) -> tuple:
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{path}[{i}]", f"expected an integer, got {v!r}")
        out.append(v)
    return tuple(out)


def _check_keys(d: dict, allowed: set, path: str) -> None:
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", "unknown field")


def _parse_system(d: dict) -> SystemSpec:
    path = "system"
    _check_keys(d, {"alphabet", "transitions"}, path)
    n = _get(d, "alphabet", path, int, required=True)
    if n < 1:
        raise ConfigError(f"{path}.alphabet", "must be >= 1")
    rows = _get(d, "transitions", path, list)
    if rows is None:
        return SystemSpec(n)
    if len(rows) != n:
        raise ConfigError(f"{path}.transitions", f"expected {n} rows, got {len(rows)}")
    out = []
    for i, r in enumerate(rows):
        p = f"{path}.transitions[{i}]"
        if not isinstance(r, (list, tuple)):
            raise ConfigError(p, "expected a list")
        if len(r) != n:
            raise ConfigError(p, f"expected {n} entries, got {len(r)}")
        r = _ints(r, p)
        if any(x not in (0, 1) for x in r):
            raise ConfigError(p, "entries must be 0 or 1")
        out.append(r)
    return SystemSpec(n, tuple(out))


def _parse_model(d: dict, path: str, n: int) -> ModelSpec:
    _check_keys(d, {"kind", "ratios", "offsets", "digits", "depth"}, path)
    kind = _get(d, "kind", path, str, required=True)
    if kind not in MODEL_KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {MODEL_KINDS}")
    depth = _get(d, "depth", path, int, default=8)
    if kind == "affine":
        ratios = _floats(_get(d, "ratios", path, list, required=True), f"{path}.ratios")
        offsets = _get(d, "offsets", path, list)
        if len(ratios) != n:
            raise ConfigError(f"{path}.ratios", f"expected {n} ratios (alphabet size), got {len(ratios)}")
        if offsets is None:
            offsets = _spread_offsets(ratios)
        offsets = _floats(offsets, f"{path}.offsets")
        if len(offsets) != n:
            raise ConfigError(f"{path}.offsets", f"expected {n} offsets, got {len(offsets)}")
        spec = ModelSpec(kind, ratios=ratios, offsets=offsets, depth=depth)
    else:
        digits = _ints(_get(d, "digits", path, list, required=True), f"{path}.digits")
        if len(digits) != n:
            raise ConfigError(f"{path}.digits", f"expected {n} digits (alphabet size), got {len(digits)}")
        spec = ModelSpec(kind, digits=digits, depth=depth)
    _build_model(spec, path)
    return spec


def _spread_offsets(ratios) -> list:
    """Images spread evenly with equal gaps, first at 0 and last ending at 1."""
    n = len(ratios)
    if n == 1:
        return [0.0]
    gap = (1.0 - sum(ratios)) / (n - 1)
    out, x = [], 0.0
    for r in ratios:
        out.append(x)
        x += r + gap
    return out


def _build_model(spec: ModelSpec, path: str) -> CantorModel:
    try:
        if spec.kind == "affine":
            return AffineModel(spec.ratios, spec.offsets)
        return GaussModel(spec.digits, spec.depth)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None


def _window(v, path: str, width: int) -> tuple:
    if not isinstance(v, (list, tuple)):
        raise ConfigError(path, "expected a list of symbols")
    w = _ints(v, path)
    if len(w) != width:
        raise ConfigError(path, f"expected a window of width {width}, got {len(w)}")
    return w


def _parse_profile(d: dict, path: str) -> ProfileSpec:
    _check_keys(d, {"radius", "default", "windows"}, path)
    radius = _get(d, "radius", path, int, default=0)
    default = _floats(_get(d, "default", path, list, default=[0.0] * 7), f"{path}.default")
    if len(default) != 7:
        raise ConfigError(f"{path}.default", "expected 7 coefficients (c0, c1, c2, c3, A, omega, phi0)")
    wins = []
    for i, item in enumerate(_get(d, "windows", path, list, default=[])):
        p = f"{path}.windows[{i}]"
        if not isinstance(item, dict):
            raise ConfigError(p, "expected {window: [...], coeffs: [...]}")
        w = _window(item.get("window"), f"{p}.window", 2 * radius + 1)
        c = _floats(_get(item, "coeffs", p, list, required=True), f"{p}.coeffs")
        if len(c) != 7:
            raise ConfigError(f"{p}.coeffs", "expected 7 coefficients")
        wins.append((w, c))
    return ProfileSpec(radius, default, tuple(wins))


def _parse_height(d: dict, n: int) -> HeightSpec:
    path = "height"
    _check_keys(d, {"kind", "radius", "values", "table", "func", "profile", "roof"}, path)
    kind = _get(d, "kind", path, str, required=True)
    if kind not in HEIGHT_KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {HEIGHT_KINDS}")
    radius = _get(d, "radius", path, int, default=0)
    if radius < 0:
        raise ConfigError(f"{path}.radius", "must be >= 0")
    if kind == "symbol":
        values = _floats(_get(d, "values", path, list, required=True), f"{path}.values")
        if len(values) != n:
            raise ConfigError(f"{path}.values", f"expected {n} values (alphabet size), got {len(values)}")
        return HeightSpec(kind, 0, values=values)
    if kind == "table":
        rows = []
        for i, item in enumerate(_get(d, "table", path, list, required=True)):
            p = f"{path}.table[{i}]"
            if not isinstance(item, dict):
                raise ConfigError(p, "expected {window: [...], value: x}")
            w = _window(item.get("window"), f"{p}.window", 2 * radius + 1)
            v = _get(item, "value", p, float, required=True)
            rows.append((w, v))
        return HeightSpec(kind, radius, table=tuple(rows))
    if kind == "geometric":
        func = _get(d, "func", path, str, default="sum")
        if func not in GEOMETRIC_FUNCS:
            raise ConfigError(f"{path}.func", f"must be one of {sorted(GEOMETRIC_FUNCS)}")
        return HeightSpec(kind, radius, func=func)
    profile = _parse_profile(_get(d, "profile", path, dict, required=True), f"{path}.profile")
    roof = _floats(_get(d, "roof", path, list, default=[1.0] * n), f"{path}.roof")
    if len(roof) != n:
        raise ConfigError(f"{path}.roof", f"expected {n} return times (alphabet size), got {len(roof)}")
    if min(roof) <= 0:
        raise ConfigError(f"{path}.roof", "return times must be positive")
    return HeightSpec(kind, max(radius, profile.radius), profile=profile, roof=roof)


def _parse_resolutions(v, path: str) -> tuple:
    if isinstance(v, dict):
        _check_keys(v, {"base", "k_min", "k_max"}, path)
        base = _get(v, "base", path, float, default=2.0)
        k0 = _get(v, "k_min", path, int, required=True)
        k1 = _get(v, "k_max", path, int, required=True)
        if k1 <= k0 or base <= 1:
            raise ConfigError(path, "need base > 1 and k_max > k_min")
        return tuple(geometric_resolutions(k0, k1, base))
    if not isinstance(v, (list, tuple)):
        raise ConfigError(path, "expected a list or {base, k_min, k_max}")
    res = _floats(v, path)
    if any(r <= 0 for r in res):
        raise ConfigError(path, "resolutions must be positive")
    return res


def _parse_run(d: dict) -> RunSpec:
    path = "run"
    allowed = {f for f in RunSpec.__dataclass_fields__}
    _check_keys(d, allowed, path)
    t_grid = _floats(_get(d, "t_grid", path, list, default=[]), f"{path}.t_grid")
    if list(t_grid) != sorted(t_grid):
        raise ConfigError(f"{path}.t_grid", "must be sorted")
    kind = _get(d, "kind", path, str, default="markov")
    if kind not in SPECTRUM_KINDS:
        raise ConfigError(f"{path}.kind", f"must be one of {SPECTRUM_KINDS}")
    ints = {}
    for name, lo in (("max_period", 1), ("middle_bound", 0), ("depth", 1), ("r_min", 0), ("r_max", 1),
                     ("seed", 0), ("trials", 1), ("r0", 1)):
        ints[name] = _get(d, name, path, int, default=getattr(RunSpec, name))
        if ints[name] < lo:
            raise ConfigError(f"{path}.{name}", f"must be >= {lo}")
    if ints["r_max"] <= ints["r_min"]:
        raise ConfigError(f"{path}.r_max", "must exceed r_min")
    res = d.get("resolutions")
    resolutions = _parse_resolutions(res, f"{path}.resolutions") if res is not None else ()
    forbidden = []
    for i, w in enumerate(_get(d, "forbidden", path, list, default=[])):
        p = f"{path}.forbidden[{i}]"
        if not isinstance(w, (list, tuple)):
            raise ConfigError(p, "expected a list of symbols")
        forbidden.append(_ints(w, p))
    tol_d = _get(d, "tolerances", path, dict, default={})
    _check_keys(tol_d, set(Tolerances.__dataclass_fields__), f"{path}.tolerances")
    tol = Tolerances(**{k: _get(tol_d, k, f"{path}.tolerances", float, default=getattr(Tolerances, k))
                        for k in Tolerances.__dataclass_fields__})
    t = _get(d, "t", path, float)
    output = _get(d, "output", path, str)
    return RunSpec(t_grid, t, kind, resolutions=resolutions, forbidden=tuple(forbidden), tolerances=tol,
                   output=output, **ints)


def parse_config(data: Any) -> RunConfig:
    """Validate a decoded document and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping")
    _check_keys(data, {"schema_version", "system", "model_u", "model_s", "height", "run"}, "<root>")
    version = _get(data, "schema_version", "<root>", int, required=True)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version} (expected {SCHEMA_VERSION})")
    system = _parse_system(_get(data, "system", "<root>", dict, required=True))
    n = system.alphabet
    model_u = _parse_model(_get(data, "model_u", "<root>", dict, required=True), "model_u", n)
    ms = _get(data, "model_s", "<root>", dict)
    model_s = _parse_model(ms, "model_s", n) if ms is not None else None
    height = _parse_height(_get(data, "height", "<root>", dict, required=True), n)
    run = _parse_run(_get(data, "run", "<root>", dict, default={}))
    cfg = RunConfig(system, model_u, height, run, model_s, version)
    _cross_check(cfg)
    return cfg


def _cross_check(cfg: RunConfig) -> None:
    try:
        sft = cfg.sft()
    except EmptySystem as exc:
        raise ConfigError("system.transitions", str(exc)) from None
    if sft.deleted:
        raise ConfigError("system.transitions", f"symbols {list(sft.deleted)} are not bi-infinitely extendable")
    h = cfg.height
    width = 2 * h.radius + 1
    if h.kind == "table":
        seen = set()
        for i, (w, _) in enumerate(h.table):
            if not sft.is_admissible(w):
                raise ConfigError(f"height.table[{i}].window", f"{list(w)} is not admissible")
            if w in seen:
                raise ConfigError(f"height.table[{i}].window", f"duplicate window {list(w)}")
            seen.add(w)
        missing = [w for w in enumerate_words(sft, width) if w not in seen]
        if missing:
            raise ConfigError("height.table", f"missing admissible window {list(missing[0])}")
    if h.kind == "suspension":
        for i, (w, _) in enumerate(h.profile.windows):
            if not sft.is_admissible(w):
                raise ConfigError(f"height.profile.windows[{i}].window", f"{list(w)} is not admissible")
        try:
            _build_profile(h, sft)
        except ValueError as exc:
            raise ConfigError("height.profile", str(exc)) from None
    for i, w in enumerate(cfg.run.forbidden):
        if len(w) != width or not sft.is_admissible(w):
            raise ConfigError(f"run.forbidden[{i}]", f"{list(w)} is not an admissible window of width {width}")


def _build_profile(h: HeightSpec, sft: Sft) -> tuple[FiberProfile, RoofFunction]:
    p = h.profile
    overrides = dict(p.windows)
    profile = profile_from_function(sft, p.radius, lambda w: overrides.get(w, p.default))
    return profile, symbol_roof(sft, h.roof)


def _build_height(cfg: RunConfig, sft: Sft) -> HeightTable:
    h = cfg.height
    if h.kind == "symbol":
        return symbol_table(sft, h.values)
    if h.kind == "table":
        return table_from_mapping(sft, h.radius, dict(h.table))
    if h.kind == "geometric":
        return geometric_table(sft, cfg.unstable_model(), cfg.stable_model(), h.radius, GEOMETRIC_FUNCS[h.func])
    profile, roof = _build_profile(h, sft)
    return height_table_from_suspension(profile, roof, sft, h.radius)


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponent floats without a dot (``1e-10``), as JSON writes them."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*)(?:\.[0-9_]*)?[eE][-+]?[0-9]+$"""),
    list("-+0123456789"),
)


def config_from_text(text: str) -> RunConfig:
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError("<root>", f"not valid YAML/JSON: {exc}") from None
    return parse_config(data)


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {p}: {exc.strerror}") from None
    return config_from_text(text)


def dump_config(cfg: RunConfig, fmt: str = "yaml") -> str:
    data = cfg.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    return yaml.safe_dump(data, sort_keys=True, default_flow_style=None)
