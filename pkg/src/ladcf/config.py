"""Flat ``key = value`` run configuration."""
from dataclasses import fields, replace
from fractions import Fraction

from .errors import InvalidInputError, LoadError
from .solver import SolverConfig
from .tracker import TrackerConfig

SOLVER_KEYS = tuple(f.name for f in fields(SolverConfig) if f.name != "strict")
TRACKER_KEYS = tuple(f.name for f in fields(TrackerConfig) if f.name != "solver")
INT_KEYS = {"K", "scales", "cell", "max_cells"}
STR_KEYS = {"window"}


def _value(key, raw, lineno):
    if key in STR_KEYS:
        return raw
    try:
        v = Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise LoadError(f"{key}: cannot parse {raw!r} as a number", line=lineno) from None
    if key in INT_KEYS:
        if v.denominator != 1:
            raise LoadError(f"{key} must be an integer, got {raw!r}", line=lineno)
        return int(v)
    return float(v)


def parse_config(text, source="config"):
    """Parse config text into a dict of typed values; unknown keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LoadError(f"{source}: expected 'key = value'", line=lineno)
        key, raw = (p.strip() for p in line.split("=", 1))
        if key not in SOLVER_KEYS and key not in TRACKER_KEYS:
            raise LoadError(f"{source}: unknown key {key!r}", line=lineno)
        if key in values:
            raise LoadError(f"{source}: duplicate key {key!r}", line=lineno)
        values[key] = _value(key, raw, lineno)
    return values


def build_config(values):
    solver_kw = {k: v for k, v in values.items() if k in SOLVER_KEYS}
    tracker_kw = {k: v for k, v in values.items() if k in TRACKER_KEYS}
    try:
        return TrackerConfig(solver=SolverConfig(**solver_kw), **tracker_kw)
    except InvalidInputError as exc:
        raise LoadError(f"invalid configuration: {exc}") from None


def load_config(path=None):
    if path is None:
        return TrackerConfig()
    with open(path) as fh:
        return build_config(parse_config(fh.read(), str(path)))


def dump_config(cfg):
    lines = ["# LADCF run configuration"]
    for name in SOLVER_KEYS:
        lines.append(f"{name} = {getattr(cfg.solver, name)}")
    for name in TRACKER_KEYS:
        lines.append(f"{name} = {getattr(cfg, name)}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg, **kw):
    solver_kw = {k: v for k, v in kw.items() if k in SOLVER_KEYS}
    tracker_kw = {k: v for k, v in kw.items() if k in TRACKER_KEYS}
    return replace(cfg, solver=replace(cfg.solver, **solver_kw), **tracker_kw)
