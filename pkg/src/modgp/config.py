"""Experiment config: one JSON document describing a run."""

import json
import math
import os
from dataclasses import dataclass

from . import warp as _warp
from .exceptions import ConfigError
from .grid import QuadratureRule
from .kernel import KernelFamily, KernelSpec
from .spectral import OPERATORS

_GRID_DEFAULTS = {"rule": "GaussLegendre", "size": 400, "density": 50.0}
_MC_DEFAULTS = {"n_paths": 10_000, "seed": 0}


@dataclass(frozen=True)
class ExperimentConfig:
    kernel: KernelSpec
    warping: _warp.Warping
    interval: tuple
    T: float
    grid_rule: str
    grid_size: int
    grid_sizes: tuple
    grid_density: float
    n_modes: int
    operator: str
    n_paths: int
    seed: int
    output_dir: str
    resolved: dict


def _require(d, key, where):
    if not isinstance(d, dict):
        raise ConfigError("expected a JSON object", field=where or "<root>")
    if key not in d:
        raise ConfigError("missing required field", field=f"{where}.{key}" if where else key)
    return d[key]


def _number(value, field, positive=False, integer=False):
    ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
    if ok and integer:
        ok = float(value).is_integer()
    if ok and positive:
        ok = value > 0
    if not ok:
        kind = "positive " if positive else ""
        kind += "integer" if integer else "number"
        raise ConfigError(f"expected a {kind}, got {value!r}", field=field)
    return int(value) if integer else float(value)


def _parse_kernel(d):
    family = _require(d, "family", "kernel")
    if family not in {f.value for f in KernelFamily}:
        raise ConfigError(f"unknown family {family!r}", field="kernel.family")
    variance = _number(d.get("variance", 1.0), "kernel.variance", positive=True)
    lengthscale = _number(d.get("lengthscale", 1.0), "kernel.lengthscale", positive=True)
    return KernelSpec(family, variance, lengthscale)


def _parse_warping(d, base_dir, strict_csv):
    kind = _require(d, "kind", "warping")
    if kind not in {k.value for k in _warp.WarpKind}:
        raise ConfigError(f"unknown kind {kind!r}", field="warping.kind")
    d = dict(d)
    if kind == "Affine":
        _number(_require(d, "a", "warping"), "warping.a", positive=True)
    if kind == "Tabulated":
        if "csv" not in d and not ("nodes" in d and "values" in d):
            raise ConfigError("needs 'csv' or both 'nodes' and 'values'", field="warping")
        d.setdefault("strict", strict_csv)
    try:
        return _warp.from_dict(d, base_dir)
    except (KeyError, TypeError) as exc:
        raise ConfigError(str(exc), field="warping") from None


def load_config(path, seed_override=None, strict_csv=True):
    """Parse and resolve a config file; raises :class:`ConfigError` with field or line info."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return resolve_config(raw, os.path.dirname(os.path.abspath(path)), seed_override, strict_csv)


def resolve_config(raw, base_dir=None, seed_override=None, strict_csv=True):
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    kernel = _parse_kernel(_require(raw, "kernel", ""))
    warping = _parse_warping(_require(raw, "warping", ""), base_dir, strict_csv)

    if "interval" in raw:
        iv = raw["interval"]
        if not isinstance(iv, list) or len(iv) != 2:
            raise ConfigError("expected [a, b]", field="interval")
        a, b = _number(iv[0], "interval[0]"), _number(iv[1], "interval[1]")
        if not b > a:
            raise ConfigError("need a < b", field="interval")
    elif math.isfinite(warping.domain[0]) and math.isfinite(warping.domain[1]):
        a, b = warping.domain
    else:
        raise ConfigError("missing required field (warping domain is unbounded)", field="interval")
    T = _number(raw.get("T", b), "T")
    if T < 0:
        raise ConfigError("must be nonnegative", field="T")

    grid = {**_GRID_DEFAULTS, **raw.get("grid", {})}
    if grid["rule"] not in {r.value for r in QuadratureRule}:
        raise ConfigError(f"unknown rule {grid['rule']!r}", field="grid.rule")
    size = _number(grid["size"], "grid.size", positive=True, integer=True)
    sizes = grid.get("sizes", [size])
    if not isinstance(sizes, list) or not sizes:
        raise ConfigError("expected a non-empty list", field="grid.sizes")
    sizes = tuple(_number(s, "grid.sizes", positive=True, integer=True) for s in sizes)
    density = _number(grid["density"], "grid.density", positive=True)

    n_modes = _number(raw.get("n_modes", 10), "n_modes", positive=True, integer=True)
    operator = raw.get("operator", "modulated")
    if operator not in OPERATORS:
        raise ConfigError(f"expected one of {OPERATORS}", field="operator")

    mc = {**_MC_DEFAULTS, **raw.get("mc", {})}
    n_paths = _number(mc["n_paths"], "mc.n_paths", positive=True, integer=True)
    seed = mc["seed"] if seed_override is None else seed_override
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"expected an unsigned 64-bit integer, got {seed!r}", field="mc.seed")
    output_dir = raw.get("output_dir", "out")

    resolved = {
        "kernel": kernel.to_dict(),
        "warping": warping.to_dict(),
        "interval": [a, b],
        "T": T,
        "grid": {"rule": grid["rule"], "size": size, "sizes": list(sizes), "density": density},
        "n_modes": n_modes,
        "operator": operator,
        "mc": {"n_paths": n_paths, "seed": seed},
    }
    return ExperimentConfig(
        kernel=kernel,
        warping=warping,
        interval=(a, b),
        T=T,
        grid_rule=grid["rule"],
        grid_size=size,
        grid_sizes=sizes,
        grid_density=density,
        n_modes=n_modes,
        operator=operator,
        n_paths=n_paths,
        seed=seed,
        output_dir=output_dir,
        resolved=resolved,
    )
