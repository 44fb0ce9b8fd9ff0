from __future__ import annotations

import argparse
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from hofbauer_entropy.core.dotenv import default_output_dir
from hofbauer_entropy.core.errors import ConfigError, RepresentationError
from hofbauer_entropy.core.map_spec import MapSpec, parse_map_spec
from hofbauer_entropy.core.storage import read_json_or_yaml
from hofbauer_entropy.graphs import OrientedGraph, graph_from_payload
from hofbauer_entropy.maps import (
    Piece,
    PiecewiseMonotoneMap,
    PolynomialBranch,
    as_float_map,
    identity,
    logistic,
    tent,
)

MODES = {"exact", "float"}
METHODS = {"lap", "hofbauer", "all"}


@dataclass(frozen=True)
class RunConfig:
    command: str
    map_spec: str | None = None
    graph_path: str | None = None
    method: str = "all"
    N: int = 8
    p_max: int = 40
    n_max: int = 16
    r: float | None = None
    delta: float = 0.01
    l_list: tuple[int, ...] = (10, 15, 20)
    M: int = 2
    K: int = 2
    Q_max: int = 10
    C: float = 1.0
    vertex: str | None = None
    mode: str = "exact"
    seed: int = 0
    samples: int = 50
    max_cr: float = 0.01
    output_dir: Path = Path(".output")
    concurrency: int = 1
    config_path: Path | None = None

    def validate(self) -> RunConfig:
        checks = [
            (self.N >= 1, "N must be >= 1"),
            (self.p_max >= 1, "p_max must be >= 1"),
            (self.n_max >= 1, "n_max must be >= 1"),
            (self.r is None or self.r >= 1, "r must be >= 1"),
            (0 < self.delta <= 0.1, "delta must lie in (0, 0.1]"),
            (len(self.l_list) > 0, "l_list must not be empty"),
            (all(lv >= 1 for lv in self.l_list), "every l must be >= 1"),
            (self.M >= 1, "M must be >= 1"),
            (self.K >= 1, "K must be >= 1"),
            (self.Q_max >= 1, "Q_max must be >= 1"),
            (self.C > 0, "C must be > 0"),
            (self.samples >= 1, "samples must be >= 1"),
            (self.max_cr > 0, "max_cr must be > 0"),
            (self.concurrency >= 1, "concurrency must be >= 1"),
            (self.mode in MODES, f"mode must be one of {sorted(MODES)}"),
            (self.method in METHODS, f"method must be one of {sorted(METHODS)}"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self


_FIELD_NAMES = {f.name for f in fields(RunConfig)} - {"command", "config_path"}


def load_run_config_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise FileNotFoundError(f"file not found: {path}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("Run config file must be a YAML mapping")
    unknown = sorted(set(raw) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"Unknown run config field: {unknown[0]}")
    return dict(raw)


def build_run_config(command: str, args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional `--config` file and explicitly given flags.

    Flags parsed as None are treated as not given.
    """

    values: dict[str, Any] = {"output_dir": default_output_dir()}
    config_path = getattr(args, "config", None)
    if config_path:
        values.update(load_run_config_file(Path(config_path)))
    for name in _FIELD_NAMES:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v

    try:
        if "l_list" in values:
            values["l_list"] = tuple(_parse_int_list(values["l_list"], default=[]))
        if "output_dir" in values:
            values["output_dir"] = Path(values["output_dir"])
        for name in ("N", "p_max", "n_max", "M", "K", "Q_max", "seed", "samples", "concurrency"):
            if name in values:
                values[name] = int(values[name])
        for name in ("delta", "C", "max_cr"):
            if name in values:
                values[name] = float(values[name])
        if values.get("r") is not None:
            values["r"] = float(values["r"])
        for name in ("map_spec", "graph_path", "vertex", "method", "mode"):
            if values.get(name) is not None:
                values[name] = str(values[name])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid run config value: {e}") from e

    cfg = RunConfig(command=command, config_path=Path(config_path) if config_path else None, **values)
    return cfg.validate()


def load_map(text: str, *, r: float | None = None, mode: str = "exact") -> PiecewiseMonotoneMap:
    """Resolve a map spec (builtin grammar or description file) to a map."""

    spec = parse_map_spec(text)
    fmap = _builtin(spec) if spec.is_builtin else load_map_description(spec.path)  # type: ignore[arg-type]
    if r is not None:
        fmap = replace(fmap, smoothness_order=float(r))
    if mode == "float":
        fmap = as_float_map(fmap)
    return fmap


def _builtin(spec: MapSpec) -> PiecewiseMonotoneMap:
    param = spec.param
    try:
        if spec.family == "tent":
            return tent(param if param is not None else 2)
        if spec.family == "logistic":
            return logistic(param if param is not None else 4)
        if spec.family == "identity":
            return identity()
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Invalid parameter for {spec.map_spec}: {e}") from e

    from hofbauer_entropy.perturb import tangency_family

    return tangency_family()


def load_map_description(path: Path) -> PiecewiseMonotoneMap:
    raw = read_json_or_yaml(path)
    if not isinstance(raw, dict):
        raise ConfigError("Map description must be a YAML mapping")
    return map_from_payload(raw, default_name=path.stem)


def map_from_payload(raw: dict[str, Any], *, default_name: str = "map") -> PiecewiseMonotoneMap:
    kind = str(raw.get("type") or "piecewise_poly")
    name = str(raw.get("name") or default_name)

    if kind == "builtin":
        family = str(raw.get("family") or "")
        param = raw.get("param")
        text = f"builtin:{family}" + (f":{param}" if param is not None else "")
        return load_map(text, r=raw.get("r"))
    if kind not in {"piecewise_linear", "piecewise_poly"}:
        raise ConfigError(f"Unknown map type: {kind}")

    pieces_raw = raw.get("pieces")
    if not isinstance(pieces_raw, list) or not pieces_raw:
        raise ConfigError("Map description needs a non-empty 'pieces' list")

    float_mode = _contains_float(pieces_raw)
    pieces: list[Piece] = []
    for i, pr in enumerate(pieces_raw):
        if not isinstance(pr, dict):
            raise ConfigError(f"pieces[{i}] must be a mapping")
        interval = pr.get("interval")
        coeffs = pr.get("coeffs")
        if not isinstance(interval, list) or len(interval) != 2:
            raise ConfigError(f"pieces[{i}].interval must be [lo, hi]")
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError(f"pieces[{i}].coeffs must be a non-empty list")
        if kind == "piecewise_linear" and len(coeffs) > 2:
            raise ConfigError(f"pieces[{i}] has degree > 1 in a piecewise_linear map")
        lo, hi = (_number(v, float_mode) for v in interval)
        branch = PolynomialBranch(tuple(_number(c, float_mode) for c in coeffs))
        pieces.append(Piece(lo, hi, branch, strictly_monotone=bool(pr.get("monotone", False))))

    try:
        return PiecewiseMonotoneMap(pieces=tuple(pieces), smoothness_order=float(raw.get("r", 2)), name=name)
    except RepresentationError as e:
        raise ConfigError(str(e)) from e


def load_graph_file(path: Path) -> OrientedGraph:
    raw = read_json_or_yaml(path)
    if not isinstance(raw, dict):
        raise ConfigError("Graph file must be a YAML/JSON mapping")
    return graph_from_payload(raw)


def _contains_float(value: Any) -> bool:
    if isinstance(value, float):
        return True
    if isinstance(value, dict):
        return any(_contains_float(v) for v in value.values())
    if isinstance(value, list):
        return any(_contains_float(v) for v in value)
    return False


def _number(value: Any, float_mode: bool) -> Fraction | float:
    if isinstance(value, bool):
        raise ConfigError(f"Expected a number, got {value!r}")
    try:
        exact = Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Expected a number or 'p/q' string, got {value!r}") from e
    return float(exact) if float_mode else exact


def _parse_int_list(value: Any, default: list[int]) -> list[int]:
    if value is None:
        return list(default)
    if isinstance(value, str):
        items = [x.strip() for x in value.split(",") if x.strip()]
        return [int(x) for x in items]
    if isinstance(value, (list, tuple)):
        return [int(x) for x in value]
    if isinstance(value, int):
        return [value]
    raise ConfigError("Expected l_list to be a list or comma-separated string")
