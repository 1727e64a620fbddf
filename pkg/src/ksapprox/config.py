"""Declarative run configuration: TOML loading, schema checks, builders.

A run document has sections

    [grid]      L, N
    [kernel]    family + family-specific parameters
    [model]     type, mu, and (for the chemotaxis system) eps plus either
                explicit channel tables a/d or an expansion degree n with
                d1_mode
    [init]      kind + parameters of the initial datum
    [time]      t_end, dt ("auto" or a number), save_every
    [output]    directory, formats
    [stability] n_max (dispersion scan range)
    [converge]  eps ladder, workers

Every key is checked against the schema; unknown sections or keys are
rejected with the dotted field path.  ``resolve_config`` fills defaults
so the persisted config echo is complete, and the build_* helpers turn
the document into solver objects.
"""

from __future__ import annotations

import copy
import math

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .chebfit import KSParams, cosh_expansion, expansion_to_ks
from .errors import ConfigError
from .kernels import (Attract, AttractRepel, BesselFund, ConstantLimit,
                      LinearSum, MexicanHat, SampledKernel)
from .pde_core import PeriodicGrid
from .solvers import (CosineMode, KellerSegel, NonlocalFP, PerturbedConstant,
                      SampledInit, SimConfig)

__all__ = [
    "load_config", "resolve_config", "build_grid", "build_kernel",
    "build_model", "build_init", "build_sim_config", "MAX_SEED",
]

MAX_SEED = 2 ** 64 - 1

_KERNEL_FAMILIES = {
    "bessel_fund": {"d"},
    "constant_limit": set(),
    "mexican_hat": {"d1", "d2"},
    "attract": {"R0"},
    "attract_repel": {"a1", "a2", "R0", "R1"},
    "linear_sum": {"a", "d"},
    "sampled": {"values"},
}
_INIT_KINDS = {
    "perturbed_constant": {"base", "amplitude", "seed"},
    "cosine_mode": {"base", "amplitude", "mode"},
    "sampled": {"values"},
}
_MODEL_TYPES = ("nonlocal_fp", "keller_segel")
_SECTION_KEYS = {
    "grid": {"L", "N"},
    "kernel": None,          # family-dependent, handled separately
    "model": {"type", "mu", "eps", "M", "a", "d", "n", "d1_mode"},
    "init": None,            # kind-dependent, handled separately
    "time": {"t_end", "dt", "save_every"},
    "output": {"directory", "formats"},
    "stability": {"n_max"},
    "converge": {"eps", "workers"},
}
_FORMATS = ("csv", "svg")


def _reject_unknown(given, allowed, where):
    for key in given:
        if key not in allowed:
            raise ConfigError(
                f"unknown key (allowed: {', '.join(sorted(allowed)) or 'none'})",
                field=f"{where}.{key}" if where else key,
            )


def _number(section, key, value, positive=False, nonneg=False, allow_inf=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field=f"{section}.{key}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ConfigError(f"expected a finite number, got {value!r}", field=f"{section}.{key}")
    if positive and not value > 0:
        raise ConfigError(f"must be > 0, got {value!r}", field=f"{section}.{key}")
    if nonneg and value < 0:
        raise ConfigError(f"must be >= 0, got {value!r}", field=f"{section}.{key}")
    return value


def _integer(section, key, value, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", field=f"{section}.{key}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", field=f"{section}.{key}")
    if maximum is not None and value > maximum:
        raise ConfigError(f"must be <= {maximum}, got {value}", field=f"{section}.{key}")
    return value


def _number_list(section, key, value, allow_inf=False):
    if not isinstance(value, list) or not value:
        raise ConfigError(f"expected a non-empty list of numbers, got {value!r}",
                          field=f"{section}.{key}")
    return [_number(section, key, v, allow_inf=allow_inf) for v in value]


def load_config(path):
    """Parse a TOML run document and resolve it against the schema."""
    try:
        with open(path, "rb") as handle:
            doc = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML ({exc})") from None
    return resolve_config(doc)


def resolve_config(doc):
    """Validate a run document and return a copy with defaults filled in.

    The returned dict is the config echo persisted to metadata: every
    key the run will use is present, including defaulted ones.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a table of sections")
    _reject_unknown(doc, _SECTION_KEYS, "")
    for name in doc:
        if not isinstance(doc[name], dict):
            raise ConfigError("section must be a table", field=name)
    cfg = copy.deepcopy(doc)

    if "grid" in cfg:
        sec = cfg["grid"]
        _reject_unknown(sec, _SECTION_KEYS["grid"], "grid")
        if "L" not in sec or "N" not in sec:
            raise ConfigError("grid needs both L and N", field="grid")
        sec["L"] = _number("grid", "L", sec["L"], positive=True)
        sec["N"] = _integer("grid", "N", sec["N"], minimum=16)

    if "kernel" in cfg:
        sec = cfg["kernel"]
        family = sec.get("family")
        if family not in _KERNEL_FAMILIES:
            raise ConfigError(
                f"unknown kernel family {family!r} "
                f"(one of: {', '.join(sorted(_KERNEL_FAMILIES))})",
                field="kernel.family",
            )
        allowed = _KERNEL_FAMILIES[family] | {"family"}
        _reject_unknown(sec, allowed, "kernel")
        for key in _KERNEL_FAMILIES[family]:
            if key not in sec:
                raise ConfigError(f"kernel family {family!r} needs key {key}",
                                  field=f"kernel.{key}")
        if family == "bessel_fund":
            sec["d"] = _number("kernel", "d", sec["d"], positive=True)
        elif family == "mexican_hat":
            sec["d1"] = _number("kernel", "d1", sec["d1"], positive=True)
            sec["d2"] = _number("kernel", "d2", sec["d2"], positive=True)
        elif family == "attract":
            sec["R0"] = _number("kernel", "R0", sec["R0"], positive=True)
        elif family == "attract_repel":
            for key in ("a1", "a2", "R0", "R1"):
                sec[key] = _number("kernel", key, sec[key], positive=True)
        elif family == "linear_sum":
            sec["a"] = _number_list("kernel", "a", sec["a"])
            sec["d"] = _number_list("kernel", "d", sec["d"], allow_inf=True)
            if len(sec["a"]) != len(sec["d"]):
                raise ConfigError("a and d need equal lengths", field="kernel.a")
        elif family == "sampled":
            sec["values"] = _number_list("kernel", "values", sec["values"])

    if "model" in cfg:
        sec = cfg["model"]
        _reject_unknown(sec, _SECTION_KEYS["model"], "model")
        mtype = sec.get("type")
        if mtype not in _MODEL_TYPES:
            raise ConfigError(
                f"unknown model type {mtype!r} (one of: {', '.join(_MODEL_TYPES)})",
                field="model.type",
            )
        sec["mu"] = _number("model", "mu", sec.get("mu", 1.0), nonneg=True)
        if mtype == "nonlocal_fp":
            for key in ("eps", "M", "a", "d"):
                if key in sec:
                    raise ConfigError("only valid for model type 'keller_segel'",
                                      field=f"model.{key}")
            # n and d1_mode stay legal here so an expansion study (the
            # expand subcommand) can share a document with a direct run.
            if "n" in sec:
                sec["n"] = _expand_degrees(sec["n"])
            if "d1_mode" in sec:
                sec["d1_mode"] = _d1_mode(sec["d1_mode"])
        else:
            if "eps" not in sec:
                raise ConfigError("keller_segel needs eps", field="model.eps")
            sec["eps"] = _number("model", "eps", sec["eps"], positive=True)
            explicit = "a" in sec or "d" in sec
            if explicit:
                if "n" in sec or "d1_mode" in sec:
                    raise ConfigError(
                        "give either explicit a/d tables or an expansion degree n, not both",
                        field="model.n",
                    )
                if "a" not in sec or "d" not in sec:
                    raise ConfigError("explicit channels need both a and d", field="model.a")
                sec["a"] = _number_list("model", "a", sec["a"])
                sec["d"] = _number_list("model", "d", sec["d"], allow_inf=True)
                if len(sec["a"]) != len(sec["d"]):
                    raise ConfigError("a and d need equal lengths", field="model.a")
                m_expected = len(sec["a"])
            else:
                if "n" not in sec:
                    raise ConfigError(
                        "keller_segel needs either explicit a/d tables or an expansion degree n",
                        field="model.n",
                    )
                degrees = _expand_degrees(sec["n"])
                if len(degrees) != 1:
                    raise ConfigError("a simulation run needs a single expansion degree",
                                      field="model.n")
                sec["n"] = degrees
                sec["d1_mode"] = _d1_mode(sec.get("d1_mode", "exact"))
                m_expected = degrees[0] + 1
            if "M" in sec:
                _integer("model", "M", sec["M"], minimum=1)
                if sec["M"] != m_expected:
                    raise ConfigError(
                        f"M = {sec['M']} inconsistent with {m_expected} channels",
                        field="model.M",
                    )
            sec["M"] = m_expected

    if "init" not in cfg:
        cfg["init"] = {"kind": "perturbed_constant"}
    sec = cfg["init"]
    kind = sec.get("kind")
    if kind not in _INIT_KINDS:
        raise ConfigError(
            f"unknown init kind {kind!r} (one of: {', '.join(sorted(_INIT_KINDS))})",
            field="init.kind",
        )
    _reject_unknown(sec, _INIT_KINDS[kind] | {"kind"}, "init")
    if kind == "perturbed_constant":
        sec["base"] = _number("init", "base", sec.get("base", 1.0))
        sec["amplitude"] = _number("init", "amplitude", sec.get("amplitude", 1e-3),
                                   nonneg=True)
        sec["seed"] = _integer("init", "seed", sec.get("seed", 0),
                               minimum=0, maximum=MAX_SEED)
    elif kind == "cosine_mode":
        sec["base"] = _number("init", "base", sec.get("base", 1.0))
        sec["amplitude"] = _number("init", "amplitude", sec.get("amplitude", 1e-3))
        sec["mode"] = _integer("init", "mode", sec.get("mode", 1), minimum=0)
    else:
        if "values" not in sec:
            raise ConfigError("sampled init needs values", field="init.values")
        sec["values"] = _number_list("init", "values", sec["values"])

    if "time" in cfg:
        sec = cfg["time"]
        _reject_unknown(sec, _SECTION_KEYS["time"], "time")
        if "t_end" not in sec:
            raise ConfigError("time needs t_end", field="time.t_end")
        sec["t_end"] = _number("time", "t_end", sec["t_end"], positive=True)
        dt = sec.get("dt", "auto")
        if dt != "auto":
            dt = _number("time", "dt", dt, positive=True)
        sec["dt"] = dt
        sec["save_every"] = _integer("time", "save_every", sec.get("save_every", 1),
                                     minimum=1)

    if "output" not in cfg:
        cfg["output"] = {}
    sec = cfg["output"]
    _reject_unknown(sec, _SECTION_KEYS["output"], "output")
    sec["directory"] = sec.get("directory", "out")
    if not isinstance(sec["directory"], str) or not sec["directory"]:
        raise ConfigError("directory must be a non-empty string", field="output.directory")
    formats = sec.get("formats", ["csv"])
    if not isinstance(formats, list) or not all(isinstance(f, str) for f in formats):
        raise ConfigError("formats must be a list of strings", field="output.formats")
    for f in formats:
        if f not in _FORMATS:
            raise ConfigError(f"unknown format {f!r} (one of: {', '.join(_FORMATS)})",
                              field="output.formats")
    sec["formats"] = list(dict.fromkeys(formats))

    if "stability" not in cfg:
        cfg["stability"] = {}
    sec = cfg["stability"]
    _reject_unknown(sec, _SECTION_KEYS["stability"], "stability")
    sec["n_max"] = _integer("stability", "n_max", sec.get("n_max", 64), minimum=1)

    if "converge" in cfg:
        sec = cfg["converge"]
        _reject_unknown(sec, _SECTION_KEYS["converge"], "converge")
        if "eps" not in sec:
            raise ConfigError("converge needs an eps ladder", field="converge.eps")
        sec["eps"] = [_number("converge", "eps", v, positive=True) for v in
                      (sec["eps"] if isinstance(sec["eps"], list) else [sec["eps"]])]
        if "workers" in sec:
            sec["workers"] = _integer("converge", "workers", sec["workers"], minimum=1)

    return cfg


def _expand_degrees(value):
    """Normalize model.n (one degree or a list of degrees) to a list."""
    values = value if isinstance(value, list) else [value]
    out = [_integer("model", "n", v, minimum=1) for v in values]
    if not out:
        raise ConfigError("need at least one expansion degree", field="model.n")
    return out


def _d1_mode(value):
    """d1_mode is 'exact' (constant-limit channel) or a finite diffusivity."""
    if value == "exact":
        return "exact"
    return _number("model", "d1_mode", value, positive=True)


def _require(cfg, section):
    if section not in cfg:
        raise ConfigError(f"missing required section [{section}]", field=section)
    return cfg[section]


def build_grid(cfg):
    sec = _require(cfg, "grid")
    return PeriodicGrid(L=sec["L"], N=sec["N"])


def build_kernel(cfg):
    sec = _require(cfg, "kernel")
    L = _require(cfg, "grid")["L"]
    family = sec["family"]
    if family == "bessel_fund":
        return BesselFund(d=sec["d"], L=L)
    if family == "constant_limit":
        return ConstantLimit(L=L)
    if family == "mexican_hat":
        return MexicanHat(d1=sec["d1"], d2=sec["d2"], L=L)
    if family == "attract":
        return Attract(R0=sec["R0"], L=L)
    if family == "attract_repel":
        return AttractRepel(a1=sec["a1"], a2=sec["a2"], R0=sec["R0"], R1=sec["R1"], L=L)
    if family == "linear_sum":
        return LinearSum(terms=tuple(zip(sec["a"], sec["d"])), L=L)
    return SampledKernel(values=np.asarray(sec["values"], dtype=float), L=L)


def build_model(cfg):
    """Solver model object from [model] (and [kernel] where needed)."""
    sec = _require(cfg, "model")
    if sec["type"] == "nonlocal_fp":
        return NonlocalFP(kernel=build_kernel(cfg), mu=sec["mu"])
    if "a" in sec:
        params = KSParams(M=sec["M"], a=tuple(sec["a"]), d=tuple(sec["d"]),
                          eps=sec["eps"], mu=sec["mu"])
    else:
        kernel = build_kernel(cfg)
        L = _require(cfg, "grid")["L"]
        expansion = cosh_expansion(kernel.evaluate, sec["n"][0], L)
        d1 = math.inf if sec["d1_mode"] == "exact" else sec["d1_mode"]
        params = expansion_to_ks(expansion, eps=sec["eps"], mu=sec["mu"], d1=d1)
    return KellerSegel(params)


def build_init(cfg, seed_override=None):
    """Initial-datum descriptor; seed_override replaces init.seed if given."""
    sec = cfg["init"]
    kind = sec["kind"]
    if kind == "perturbed_constant":
        seed = sec["seed"] if seed_override is None else seed_override
        return PerturbedConstant(base=sec["base"], amplitude=sec["amplitude"], seed=seed)
    if kind == "cosine_mode":
        return CosineMode(base=sec["base"], amplitude=sec["amplitude"], mode=sec["mode"])
    return SampledInit(values=tuple(sec["values"]))


def build_sim_config(cfg, seed_override=None):
    """Full SimConfig for the simulate/converge subcommands."""
    grid = build_grid(cfg)
    model = build_model(cfg)
    time_sec = _require(cfg, "time")
    return SimConfig(
        grid=grid,
        model=model,
        rho0=build_init(cfg, seed_override),
        t_end=time_sec["t_end"],
        dt=time_sec["dt"],
        save_every=time_sec["save_every"],
    )
