"""Sectioned key = value experiment configs.

    [experiment]
    name = rotation-check
    seed = 7

    [grid]
    N = 256

Unknown sections or keys, bad values and duplicate keys are collected and
reported together with line numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

EXPERIMENTS = (
    "pointwise-check", "variation-sweep", "jump-sweep", "jsw-compare", "lp-decomp-check",
    "decay-fit", "rotation-check", "averaging-check", "cz-check", "martingale-check",
    "kernel-classes", "vdc-check",
)


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 2
    N: int = 256
    L: float = 1.0
    kernels: tuple = ("sin",)
    nodes: int = 1024
    j_min: int = -4
    j_max: int = -2
    samples_per_octave: int = 4
    lambdas: tuple = (0.05, 0.1, 0.2, 0.4, 0.8)
    q: tuple = (2.0, 3.0, 6.0)
    p: tuple = (2.0,)
    trials: int = 100
    seed: int = 0
    out: str = "runs"
    params: dict = field(default_factory=dict)

    def param(self, key, default=None):
        return self.params.get(key, default)

    def echo(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "params"}
        d["kernels"] = list(self.kernels)
        d["lambdas"] = list(self.lambdas)
        d["q"] = list(self.q)
        d["p"] = list(self.p)
        d["params"] = dict(sorted(self.params.items()))
        return d


# per-experiment defaults; keys under [params] are listed with their defaults
DEFAULTS = {
    "pointwise-check": dict(trials=10000, q=(2.0, 3.0, 6.0), params={"lambdas_per_series": 3, "max_len": 64}),
    "variation-sweep": dict(trials=500, q=(1.0, 2.0, 2.5, 3.0, 6.0), params={"max_len": 12}),
    "jump-sweep": dict(trials=500, lambdas=(0.05, 0.1, 0.25, 0.5, 1.0), params={"max_len": 12}),
    "jsw-compare": dict(trials=10000, j_min=0, j_max=5, samples_per_octave=4, params={"bound": 9.0, "stability": 0.10}),
    "lp-decomp-check": dict(N=256, kernels=("sin", "twolevel:a=1.5,arc=0.5pi"), trials=1,
                            params={"tol": 1e-8, "fmax": 20.0}),
    "decay-fit": dict(kernels=("sin", "twolevel:a=1.5,arc=0.5pi", "atom:c=0,r=0.25pi"),
                      params={"alpha": 2.0, "slope_tol": 0.05, "log_tol": 0.3, "slack": 0.05, "refine": 1.0}),
    "rotation-check": dict(N=256, L=1.28, kernels=("sin", "twolevel:a=1.5,arc=0.5pi"),
                           params={"angular_nodes": 512, "r1": 0.1, "r2": 0.3, "tol": 0.02,
                                   "refine": 1, "supersample": 8, "width": 0.1}),
    "averaging-check": dict(N=256, j_min=-6, j_max=-2, samples_per_octave=4, kernels=("const:c=1",)),
    "cz-check": dict(N=64, trials=100, params={"components": 3}),
    "martingale-check": dict(trials=100, params={"lambda": 0.5, "stability": 0.10, "fmax": 4.0}),
    "kernel-classes": dict(nodes=1024, trials=50, params={"c2": 5.0, "ratio_bound": 4.0, "xi_nodes": 1024}),
    "vdc-check": dict(params={"xi_step": 0.5, "xi_max": 1000.0, "refine": 4, "tol": 0.01}),
}

# variation-sweep also hosts the operator-family stability proxy
DEFAULTS["variation-sweep"]["params"].update({"oracle": 1, "operators": 1, "corpus": 4, "stability": 0.10, "fmax": 4.0,
                                              "radius": 0.4, "grids": "64,128,256"})
DEFAULTS["variation-sweep"]["kernels"] = ("sin", "atom:c=0,r=0.25pi", "twolevel:a=1.5,arc=0.5pi")

_SECTIONS = {
    "experiment": {"name": "experiment", "trials": "trials", "seed": "seed", "out": "out"},
    "grid": {"n": "n", "N": "N", "L": "L"},
    "kernel": {"spec": "kernels", "nodes": "nodes"},
    "scales": {"j_min": "j_min", "j_max": "j_max", "samples_per_octave": "samples_per_octave"},
    "sweep": {"lambdas": "lambdas", "q": "q", "p": "p"},
}


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _convert(field_name, raw):
    if field_name in ("n", "N", "trials", "seed", "nodes", "j_min", "j_max", "samples_per_octave"):
        return int(raw)
    if field_name == "L":
        return float(raw)
    if field_name in ("lambdas", "q", "p"):
        return _floats(raw)
    if field_name == "kernels":
        return tuple(s.strip() for s in raw.split(";") if s.strip())
    return raw.strip()


def _param_value(raw):
    try:
        v = float(raw)
    except ValueError:
        return raw.strip()
    return int(v) if v.is_integer() and "." not in raw and "e" not in raw.lower() else v


def defaults_for(name: str) -> ExperimentConfig:
    if name not in EXPERIMENTS:
        raise ConfigError([f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}"])
    d = dict(DEFAULTS.get(name, {}))
    params = dict(d.pop("params", {}))
    return ExperimentConfig(experiment=name, params=params, **d)


def parse_config(text: str, name: str | None = None) -> ExperimentConfig:
    """Parse config text; `name` fills in the experiment when the text omits it."""
    errors = []
    seen = {}
    values = {}
    params = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            if section not in _SECTIONS and section != "params":
                errors.append(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in s:
            errors.append(f"line {lineno}: expected key = value")
            continue
        key, raw = (t.strip() for t in s.split("=", 1))
        if section is None:
            errors.append(f"line {lineno}: key {key!r} outside any section")
            continue
        full = f"{section}.{key}"
        if full in seen:
            errors.append(f"line {lineno}: duplicate key {full!r} (first set on line {seen[full]})")
            continue
        seen[full] = lineno
        if section == "params":
            params[key] = (_param_value(raw), lineno)
            continue
        if section not in _SECTIONS:
            continue
        fname = _SECTIONS[section].get(key)
        if fname is None:
            errors.append(f"line {lineno}: unknown key {key!r} in [{section}]")
            continue
        try:
            values[fname] = (_convert(fname, raw), lineno)
        except ValueError:
            errors.append(f"line {lineno}: bad value {raw!r} for {full}")
    exp = values.pop("experiment", (name, 0))[0] or name
    if exp is None:
        errors.append("missing [experiment] name")
        raise ConfigError(errors)
    try:
        cfg = defaults_for(exp)
    except ConfigError as e:
        raise ConfigError(errors + e.errors) from None
    allowed = set(cfg.params)
    merged = dict(cfg.params)
    for key, (v, lineno) in params.items():
        if key not in allowed:
            errors.append(f"line {lineno}: unknown parameter {key!r} for {exp} (known: {', '.join(sorted(allowed))})")
        else:
            merged[key] = v
    cfg = replace(cfg, params=merged, **{k: v for k, (v, _) in values.items()})
    errors.extend(validate(cfg, {k: ln for k, (_, ln) in values.items()}))
    if errors:
        raise ConfigError(errors)
    return cfg


def validate(cfg: ExperimentConfig, lines: dict | None = None) -> list:
    lines = lines or {}

    def at(f):
        return f"line {lines[f]}: " if f in lines else ""

    errs = []
    if cfg.n not in (1, 2):
        errs.append(f"{at('n')}n must be 1 or 2")
    if cfg.N < 8 or cfg.N & (cfg.N - 1):
        errs.append(f"{at('N')}N = {cfg.N} must be a power of two >= 8")
    if not (cfg.L > 0 and math.isfinite(cfg.L)):
        errs.append(f"{at('L')}L must be positive")
    if cfg.nodes < 2 or cfg.nodes & (cfg.nodes - 1):
        errs.append(f"{at('nodes')}nodes = {cfg.nodes} must be a power of two")
    if cfg.j_max < cfg.j_min:
        errs.append(f"{at('j_max')}j_max must be >= j_min")
    if cfg.samples_per_octave < 1:
        errs.append(f"{at('samples_per_octave')}samples_per_octave must be >= 1")
    if any(not lam > 0 for lam in cfg.lambdas):
        errs.append(f"{at('lambdas')}lambdas must be positive")
    if any(not q >= 1 for q in cfg.q):
        errs.append(f"{at('q')}q values must be >= 1")
    if any(not 1 < p < math.inf for p in cfg.p):
        errs.append(f"{at('p')}p values must lie in (1, inf)")
    if cfg.trials < 1:
        errs.append(f"{at('trials')}trials must be >= 1")
    from .sphere import parse_kernel
    for spec in cfg.kernels:
        try:
            parse_kernel(spec, max(cfg.nodes, 2))
        except ValueError as e:
            errs.append(f"{at('kernels')}kernel spec: {e}")
    return errs
