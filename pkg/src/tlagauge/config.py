"""Strict YAML experiment configuration.

Every section is a dataclass; unknown keys, wrong types and out-of-range
values raise ``SchemaError`` with the line of the offending key.
"""
from __future__ import annotations

import dataclasses
import re
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import yaml

_SCI_FLOAT = re.compile(r"[-+]?(\d+\.?\d*|\.\d+)[eE][-+]?\d+")

EXPERIMENTS = ("lineshape", "emission", "gauge-compare", "mastereq", "identity-check",
               "gap-sweep")

GAUGES = ("dipole", "naive-coulomb", "corrected-coulomb", "milonni")


class SchemaError(ValueError):
    def __init__(self, message, line=None, key=None):
        self.line, self.key = line, key
        if line is None:
            where = ""
        elif isinstance(line, str):
            where = f"{line}: "
        else:
            where = f"line {line}: "
        super().__init__(f"{where}{key + ': ' if key else ''}{message}")


# -- sections -----------------------------------------------------------------

@dataclass
class TlaConfig:
    omega0: float = 1.0
    gamma0: float | None = 0.02
    d: float | None = None

    def check(self, err):
        if self.omega0 <= 0:
            err("omega0", "must be positive")
        if self.d is not None and self.gamma0 is not None:
            err("d", "give either gamma0 or d, not both")
        if self.d is None and self.gamma0 is None:
            err("gamma0", "one of gamma0 or d is required")
        for k in ("gamma0", "d"):
            v = getattr(self, k)
            if v is not None and v <= 0:
                err(k, "must be positive")


@dataclass
class BathConfig:
    n_modes: int = 2000
    band: tuple[float, float] = (0.5, 1.5)
    rule: str = "uniform"

    def check(self, err):
        if self.n_modes < 2:
            err("n_modes", "must be at least 2")
        if not 0 < self.band[0] < self.band[1]:
            err("band", "must satisfy 0 < lower < upper (omega = 0 is excluded)")
        if self.rule not in ("uniform", "gauss-legendre"):
            err("rule", "must be 'uniform' or 'gauss-legendre'")


@dataclass
class EmissionConfig:
    gauge: str = "dipole"
    expansion_order: int = 2
    max_photons: int = 1
    rwa: bool = True
    include_a2: bool = True
    xi0: float | None = None
    shift_compensation: bool = True
    initial_state: str = "gauge-mapped"
    t_final: float = 16.0                     # units of 1/Gamma0
    checkpoints: tuple[float, ...] = (0.5, 1.0, 2.0)
    tol: float = 1e-10

    def check(self, err):
        if self.gauge not in GAUGES:
            err("gauge", f"must be one of {', '.join(GAUGES)}")
        if self.expansion_order not in (1, 2, 3):
            err("expansion_order", "must be 1, 2 or 3")
        if self.max_photons not in (1, 2):
            err("max_photons", "must be 1 or 2")
        if (self.gauge == "corrected-coulomb" and self.expansion_order >= 2
                and self.max_photons < 2):
            err("max_photons", "configuration conflict: corrected-coulomb with "
                "expansion_order >= 2 needs max_photons = 2")
        if self.initial_state not in ("bare", "gauge-mapped", "dressed-flip"):
            err("initial_state", "must be bare, gauge-mapped or dressed-flip")
        if self.t_final <= 0:
            err("t_final", "must be positive")
        if self.tol <= 0:
            err("tol", "must be positive")
        if any(c < 0 or c > self.t_final for c in self.checkpoints):
            err("checkpoints", "must lie in [0, t_final]")


@dataclass
class GaugeCompareConfig:
    gauges: tuple[str, ...] = ("dipole", "naive-coulomb")
    fit_band: tuple[float, float] = (0.7, 1.3)
    recenter: bool = True

    def check(self, err):
        if len(self.gauges) < 2:
            err("gauges", "need a reference gauge and at least one other")
        for g in self.gauges:
            if g not in GAUGES:
                err("gauges", f"unknown gauge {g!r}")
        if not 0 < self.fit_band[0] < self.fit_band[1]:
            err("fit_band", "must satisfy 0 < lower < upper")


@dataclass
class LineshapeConfig:
    n_points: int = 10000
    range: tuple[float, float] = (0.5, 1.5)
    markov_half_width: float = 20.0           # units of Gamma0

    def check(self, err):
        if self.n_points < 2:
            err("n_points", "must be at least 2")
        if not 0 < self.range[0] < self.range[1]:
            err("range", "must satisfy 0 < lower < upper (omega = 0 is excluded)")
        if self.markov_half_width <= 0:
            err("markov_half_width", "must be positive")


@dataclass
class SpectralConfig:
    kind: str = "free-space"
    exponent: float = 3.0                     # power-law only
    omegas: tuple[float, ...] = ()            # tabulated only
    values: tuple[float, ...] = ()

    def check(self, err):
        if self.kind not in ("free-space", "power-law", "tabulated"):
            err("kind", "must be free-space, power-law or tabulated")
        if self.kind == "tabulated":
            if len(self.omegas) < 2 or len(self.omegas) != len(self.values):
                err("omegas", "tabulated density needs matching omegas and values (>= 2)")
            if any(b <= a for a, b in zip(self.omegas, self.omegas[1:])):
                err("omegas", "must be strictly increasing")
            if any(v < 0 for v in self.values):
                err("values", "must be nonnegative")


@dataclass
class AuxConfig:
    frequency: float = 1.0
    kind: str = "two-level"
    truncation: int = 1

    def check(self, err):
        if self.frequency <= 0:
            err("frequency", "must be positive")
        if self.kind not in ("two-level", "oscillator"):
            err("kind", "must be two-level or oscillator")
        if self.truncation < 1:
            err("truncation", "must be at least 1")


@dataclass
class CouplingConfig:
    type: str = "exchange"
    strengths: tuple[tuple[float, ...], ...] = ((0, 0.1),)
    seed: int | None = None                   # random only; defaults to the run seed
    scale: float = 0.1
    structure: str = "full"
    matrix: tuple[tuple[float, ...], ...] = ()

    def check(self, err):
        if self.type not in ("none", "exchange", "random", "general"):
            err("type", "must be none, exchange, random or general")
        if self.type == "exchange":
            for s in self.strengths:
                if len(s) != 2 or s[0] < 0 or int(s[0]) != s[0]:
                    err("strengths", "entries must be [aux_index, g]")
        if self.structure not in ("full", "aux-only", "exchange-like"):
            err("structure", "must be full, aux-only or exchange-like")
        if self.scale < 0:
            err("scale", "must be nonnegative")


@dataclass
class MastereqConfig:
    aux: tuple[AuxConfig, ...] = (AuxConfig(),)
    coupling: CouplingConfig = field(default_factory=CouplingConfig)
    spectral_density: SpectralConfig = field(default_factory=SpectralConfig)
    secular: bool = True
    delta_sec: float = 0.0
    t_final: float = 10.0                     # units of 1/Gamma0
    n_checkpoints: int = 50
    dim_cap: int = 4096
    n_random_models: int = 20                 # extra random models for the secular check
    random_scale: float = 0.3

    def check(self, err):
        if self.delta_sec < 0:
            err("delta_sec", "must be nonnegative")
        if self.t_final <= 0:
            err("t_final", "must be positive")
        if self.n_checkpoints < 1:
            err("n_checkpoints", "must be at least 1")
        if self.n_random_models < 0:
            err("n_random_models", "must be nonnegative")


@dataclass
class IdentityCheckConfig:
    n_models: int = 100
    max_dim: int = 64
    scale: float = 0.3
    structures: tuple[str, ...] = ("exchange", "full", "aux-only", "exchange-like")

    def check(self, err):
        if self.n_models < 1:
            err("n_models", "must be positive")
        if self.max_dim < 4:
            err("max_dim", "must be at least 4")
        for s in self.structures:
            if s not in ("exchange", "full", "aux-only", "exchange-like"):
                err("structures", f"unknown structure {s!r}")


@dataclass
class GapSweepConfig:
    delta_min: float = 0.01
    delta_max: float = 0.1
    n_points: int = 7
    spectral_density: SpectralConfig = field(default_factory=SpectralConfig)
    evolve: bool = True

    def check(self, err):
        if not 0 < self.delta_min < self.delta_max:
            err("delta_min", "must satisfy 0 < delta_min < delta_max")
        if self.n_points < 3:
            err("n_points", "must be at least 3")


@dataclass
class Tolerances:
    analytic_ratio: float = 1e-13
    markov_integral: float = 1e-6
    survival_rel: float = 0.01
    lineshape_core: float = 0.02
    lineshape_wide: float = 0.05
    gauge_ratio: float = 0.03
    exponent: float = 0.15
    identity_rel: float = 1e-9
    secular_rel: float = 1e-12
    trace_distance: float = 1e-10
    gap_exponent: float = 0.2

    def check(self, err):
        for f in dataclasses.fields(self):
            if getattr(self, f.name) <= 0:
                err(f.name, "must be positive")


@dataclass
class UnitsConfig:
    frequency: str = "omega0"                 # or "absolute"

    def check(self, err):
        if self.frequency not in ("omega0", "absolute"):
            err("frequency", "must be omega0 or absolute")


@dataclass
class ExperimentConfig:
    experiment: str = "lineshape"
    seed: int = 0
    out: str | None = None
    tla: TlaConfig = field(default_factory=TlaConfig)
    bath: BathConfig = field(default_factory=BathConfig)
    emission: EmissionConfig = field(default_factory=EmissionConfig)
    gauge_compare: GaugeCompareConfig = field(default_factory=GaugeCompareConfig)
    lineshape: LineshapeConfig = field(default_factory=LineshapeConfig)
    mastereq: MastereqConfig = field(default_factory=MastereqConfig)
    identity_check: IdentityCheckConfig = field(default_factory=IdentityCheckConfig)
    gap_sweep: GapSweepConfig = field(default_factory=GapSweepConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    units: UnitsConfig = field(default_factory=UnitsConfig)

    def check(self, err):
        if self.experiment not in EXPERIMENTS:
            err("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
        if self.seed < 0:
            err("seed", "must be nonnegative")
        e = self.emission
        if (self.experiment == "gauge-compare" and "corrected-coulomb" in self.gauge_compare.gauges
                and e.expansion_order >= 2 and e.max_photons < 2):
            err("gauge_compare", "configuration conflict: corrected-coulomb with "
                "expansion_order >= 2 needs emission.max_photons = 2")

    def freq_scale(self) -> float:
        """Factor converting configured frequencies to absolute units."""
        return self.tla.omega0 if self.units.frequency == "omega0" else 1.0


# -- YAML with line tracking --------------------------------------------------

def _to_python(node, path=(), lines=None):
    """Convert a composed YAML node, recording the line of every key path."""
    if lines is None:
        lines = {}
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = yaml.safe_load(yaml.serialize(k)) if not isinstance(k, yaml.ScalarNode) else k.value
            if key in out:
                raise SchemaError("duplicate key", k.start_mark.line + 1, ".".join(path + (str(key),)))
            lines[path + (str(key),)] = k.start_mark.line + 1
            out[str(key)] = _to_python(v, path + (str(key),), lines)[0]
        return out, lines
    if isinstance(node, yaml.SequenceNode):
        return [_to_python(v, path + (str(i),), lines)[0] for i, v in enumerate(node.value)], lines
    return yaml.safe_load(yaml.serialize(node)), lines


def _hint_base(tp):
    origin = typing.get_origin(tp)
    if origin in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        return args[0], True
    return tp, False


def _coerce(value, tp, path, lines):
    key = ".".join(path)
    line = _line(lines, path)
    tp, optional = _hint_base(tp)
    if value is None:
        if optional:
            return None
        raise SchemaError("may not be null", line, key)
    if dataclasses.is_dataclass(tp):
        return _build(tp, value, path, lines)
    origin = typing.get_origin(tp)
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(value, (list, tuple)):
            raise SchemaError("expected a list", line, key)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(v, args[0], path + (str(i),), lines) for i, v in enumerate(value))
        if len(value) != len(args):
            raise SchemaError(f"expected a list of {len(args)} values", line, key)
        return tuple(_coerce(v, a, path + (str(i),), lines) for i, (v, a) in enumerate(zip(value, args)))
    if tp is bool:
        if not isinstance(value, bool):
            raise SchemaError("expected true or false", line, key)
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError("expected an integer", line, key)
        return value
    if tp is float:
        if isinstance(value, str) and _SCI_FLOAT.fullmatch(value.strip()):
            # YAML 1.1 reads exponent notation without a decimal point as a string
            return float(value)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError("expected a number", line, key)
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise SchemaError("expected a string", line, key)
        return value
    raise SchemaError(f"unsupported type {tp}", line, key)


def _line(lines, path):
    while path and path not in lines:
        path = path[:-1]
    return lines.get(path)


def _build(cls, data, path, lines):
    if not isinstance(data, dict):
        raise SchemaError("expected a mapping", _line(lines, path), ".".join(path) or None)
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    for k in data:
        name = k.replace("-", "_")
        if name not in names:
            raise SchemaError(f"unknown key (allowed: {', '.join(sorted(names))})",
                              _line(lines, path + (k,)), ".".join(path + (k,)))
    kwargs = {}
    for k, v in data.items():
        name = k.replace("-", "_")
        kwargs[name] = _coerce(v, hints[name], path + (k,), lines)
    obj = cls(**kwargs)
    raw_keys = {k.replace("-", "_"): k for k in data}

    def err(name, msg):
        p = path + (raw_keys.get(name, name),)
        raise SchemaError(msg, _line(lines, p), ".".join(p))

    obj.check(err)
    return obj


def _set_path(data: dict, dotted: str, value):
    parts = dotted.split(".")
    cur = data
    for p in parts[:-1]:
        nxt = cur.get(p)
        if nxt is None:
            nxt = cur[p] = {}
        if not isinstance(nxt, dict):
            raise SchemaError(f"cannot override inside non-mapping {p!r}", key=dotted)
        cur = nxt
    cur[parts[-1]] = value


def parse_override(text: str):
    if "=" not in text:
        raise SchemaError("override must look like key=value", key=text)
    k, v = text.split("=", 1)
    try:
        val = yaml.safe_load(v) if v.strip() else None
    except yaml.YAMLError as exc:
        raise SchemaError(f"unparsable override value: {exc}", key=k) from None
    return k.strip(), val


def load_config_text(text: str, overrides=(), source: str = "<config>") -> ExperimentConfig:
    try:
        node = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SchemaError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                          mark.line + 1 if mark else None) from None
    if node is None:
        data, lines = {}, {}
    else:
        data, lines = _to_python(node)
    if not isinstance(data, dict):
        raise SchemaError("top level must be a mapping", 1)
    for ov in overrides:
        k, v = parse_override(ov) if isinstance(ov, str) else ov
        _set_path(data, k, v)
        # overrides have no line in the file; anchor errors to the override itself
        for p in list(lines):
            if ".".join(p).startswith(k):
                lines.pop(p)
        lines[tuple(k.split("."))] = f"override {k}"
    return _build(ExperimentConfig, data, (), lines)


def load_config(path, overrides=()) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read config: {exc}") from None
    return load_config_text(text, overrides, str(p))


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)
