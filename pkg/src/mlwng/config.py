"""YAML experiment configs: strict loading and a canonical echo for provenance."""

from __future__ import annotations

import dataclasses
import typing
from pathlib import Path

import yaml

from .experiments import BaselineTemplate, ExperimentConfig, MLWTemplate


class ConfigError(ValueError):
    pass


_NESTED = {"mlw": MLWTemplate, "baselines": BaselineTemplate}


def _key_lines(text: str) -> dict[tuple[str, ...], int]:
    """1-based line of every mapping key, addressed by its path."""
    lines: dict[tuple[str, ...], int] = {}

    def walk(node, path):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                key_path = path + (str(k.value),)
                lines[key_path] = k.start_mark.line + 1
                walk(v, key_path)

    walk(yaml.compose(text), ())
    return lines


def _coerce(value, tp, where: str):
    origin = typing.get_origin(tp)
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        (inner,) = typing.get_args(tp)
        return [_coerce(v, inner, where) for v in value]
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        try:
            f = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: expected an integer, got {value!r}") from None
        if f != int(f):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(f)
    if tp is float:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if tp is str:
        return str(value)
    raise ConfigError(f"{where}: unsupported field type {tp}")


def _build(cls, data: dict, path: tuple[str, ...], lines: dict) -> object:
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        key_path = path + (str(key),)
        where = f"line {lines.get(key_path, '?')}, key '{'.'.join(key_path)}'"
        if key not in names:
            raise ConfigError(f"{where}: unknown key (allowed: {', '.join(sorted(names))})")
        if key in _NESTED and not path:
            if not isinstance(value, dict):
                raise ConfigError(f"{where}: expected a mapping")
            kwargs[key] = _build(_NESTED[key], value, key_path, lines)
        else:
            kwargs[key] = _coerce(value, hints[key], where)
    return cls(**kwargs)


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text) or {}
        lines = _key_lines(text) if data else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at the top level")
    cfg = _build(ExperimentConfig, data, (), lines)
    try:
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def dump_config(cfg: ExperimentConfig) -> str:
    """Every field spelled out, in declaration order; loads back to an equal config."""
    return yaml.safe_dump(dataclasses.asdict(cfg), sort_keys=False, default_flow_style=None)
