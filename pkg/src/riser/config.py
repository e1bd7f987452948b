"""Run configuration: a flat ``key = value`` text format.

One assignment per line; ``#`` starts a comment; blank lines are ignored.
A system is named either by alias or by variant plus parameters::

    system = s6.1            # alias, parameters from the alias table

    system = well_linear     # explicit variant ...
    Vp = 5                   # ... with every parameter given
    a = 2
    g = 1

Parameters given after an alias override the alias values.  Everything is
validated while parsing, including the physical invariants of the system,
and errors carry the line and column of the offending text.

Recognised keys besides the system parameters:

==========================  ===============================================
key                         meaning
==========================  ===============================================
``task``                    ``tau``, ``poles``, ``psi``, ``reflectivity``
                            or ``table1``
``out``                     output path (``-`` or absent: standard output)
``peaks_out``               path for the ``tau`` task's peak report
``e_min e_max n_grid``      real energy grid (``tau``, ``reflectivity``)
``energy``                  complex energy of a ``psi`` profile
``x_min x_max n_points``    spatial grid of a ``psi`` profile
``re_min re_max im_min``    pole search rectangle and its cell grid
``im_max nx ny``
``peaks``                   attach delay peaks to a pole report
                            (``true``/``false``)
``tol``                     root refinement tolerance
``matcher_tol``             integrator tolerance for ``psi``
``prominence``              relative prominence filter for delay peaks
``energy_tol``              reference check: pole and peak energies
``peak_tol``
``width_abs_tol``           reference check: half widths
``width_rel_tol``
``narrow_width_rel_tol``
==========================  ===============================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from . import systems as S
from .poles import DEFAULT_REGION, SearchRegion
from .systems import SystemSpec

__all__ = ["ConfigError", "Tolerances", "RunConfig", "TASKS", "parse_config", "serialize_config", "load_config"]

TASKS = ("tau", "poles", "psi", "reflectivity", "table1")


class ConfigError(ValueError):
    """Configuration problem located at ``line``:``column`` (1-based).

    ``kind`` is one of ``syntax``, ``unknown-key``, ``duplicate-key``,
    ``unknown-alias``, ``missing-parameter``, ``invariant-violation`` or
    ``bad-value``.
    """

    def __init__(self, kind: str, message: str, line: int = 0, column: int = 0):
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{kind}: {message}")
        self.kind = kind
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Tolerances:
    """Acceptance windows for the comparison against the reference table.

    Widths below ``narrow_width`` use the relative window only; wider ones
    pass within ``max(width_abs_tol, width_rel_tol * width)``.
    """

    energy_tol: float = 0.02
    width_abs_tol: float = 0.02
    width_rel_tol: float = 0.10
    narrow_width_rel_tol: float = 0.50
    narrow_width: float = 0.01
    peak_tol: float = 0.05

    def width_window(self, printed: float) -> float:
        if printed < self.narrow_width:
            return self.narrow_width_rel_tol * printed
        return max(self.width_abs_tol, self.width_rel_tol * printed)


@dataclass(frozen=True)
class RunConfig:
    """A validated run.  ``None`` means "use the task's default"."""

    system: Optional[SystemSpec] = None
    alias: Optional[str] = None
    task: str = "tau"
    out: Optional[str] = None
    peaks_out: Optional[str] = None
    e_min: Optional[float] = None
    e_max: Optional[float] = None
    n_grid: Optional[int] = None
    energy: Optional[complex] = None
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    n_points: Optional[int] = None
    region: Optional[SearchRegion] = None
    peaks: bool = True
    tol: float = 1e-10
    matcher_tol: float = 1e-10
    prominence: float = 1e-6
    tolerances: Tolerances = field(default_factory=Tolerances)


# ---------------------------------------------------------------------------
# value parsing
# ---------------------------------------------------------------------------

_FLOAT_KEYS = ("e_min", "e_max", "x_min", "x_max", "tol", "matcher_tol", "prominence")
_INT_KEYS = ("n_grid", "n_points")
_REGION_KEYS = ("re_min", "re_max", "im_min", "im_max", "nx", "ny")
_TOLERANCE_KEYS = ("energy_tol", "peak_tol", "width_abs_tol", "width_rel_tol", "narrow_width_rel_tol")
_OTHER_KEYS = ("system", "task", "out", "peaks_out", "energy", "peaks")
_KNOWN = set(_FLOAT_KEYS + _INT_KEYS + _REGION_KEYS + _TOLERANCE_KEYS + _OTHER_KEYS)


@dataclass
class _Entry:
    key: str
    value: str
    line: int
    key_col: int
    value_col: int

    def fail(self, kind: str, message: str) -> ConfigError:
        return ConfigError(kind, message, self.line, self.value_col)


def _normalise_number(text: str) -> str:
    # accept typographic minus signs and an ``i`` imaginary unit
    return text.replace("−", "-").replace(" ", "")


def _as_float(entry: _Entry) -> float:
    try:
        value = float(_normalise_number(entry.value))
    except ValueError:
        raise entry.fail("bad-value", f"{entry.key}: expected a number, got {entry.value!r}") from None
    if not math.isfinite(value):
        raise entry.fail("bad-value", f"{entry.key}: must be finite")
    return value


def _as_int(entry: _Entry) -> int:
    try:
        return int(_normalise_number(entry.value))
    except ValueError:
        raise entry.fail("bad-value", f"{entry.key}: expected an integer, got {entry.value!r}") from None


def _as_complex(entry: _Entry) -> complex:
    text = _normalise_number(entry.value).strip("()")
    if text.endswith("i"):
        text = text[:-1] + "j"
    try:
        value = complex(text)
    except ValueError:
        raise entry.fail("bad-value", f"{entry.key}: expected a complex number, got {entry.value!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise entry.fail("bad-value", f"{entry.key}: must be finite")
    return value


def _as_bool(entry: _Entry) -> bool:
    text = entry.value.lower()
    if text in ("true", "yes", "1", "on"):
        return True
    if text in ("false", "no", "0", "off"):
        return False
    raise entry.fail("bad-value", f"{entry.key}: expected true or false, got {entry.value!r}")


def _lex(text: str) -> list[_Entry]:
    entries = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise ConfigError("syntax", f"expected 'key = value', got {body.strip()!r}", number, col)
        key_part, value_part = body.split("=", 1)
        key = key_part.strip()
        value = value_part.strip().strip('"').strip("'")
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        value_col = len(key_part) + 1 + len(value_part) - len(value_part.lstrip()) + 1
        if not key:
            raise ConfigError("syntax", "missing key", number, key_col)
        if not value:
            raise ConfigError("syntax", f"{key}: missing value", number, value_col)
        entries.append(_Entry(key, value, number, key_col, value_col))
    return entries


# ---------------------------------------------------------------------------
# parse
# ---------------------------------------------------------------------------


def _system_from(entry: Optional[_Entry], params: dict[str, _Entry]) -> tuple[Optional[SystemSpec], Optional[str]]:
    if entry is None:
        if params:
            first = min(params.values(), key=lambda e: e.line)
            raise ConfigError("unknown-key", f"{first.key}: no system given", first.line, first.key_col)
        return None, None
    name = entry.value.lower()
    if name in S.ALIASES:
        alias, (kind, values) = name, S.ALIASES[name]
        values = dict(values)
    elif name in S.VARIANTS:
        alias, kind, values = None, name, {}
    else:
        raise entry.fail("unknown-alias", f"unknown system {entry.value!r}")
    names = [f.name for f in fields(S.VARIANTS[kind])]
    for key, param in params.items():
        if key not in names:
            raise ConfigError("unknown-key", f"{kind} has no parameter {key!r}", param.line, param.key_col)
        values[key] = _as_float(param)
    missing = [n for n in names if n not in values]
    if missing:
        raise entry.fail("missing-parameter", f"{kind}: missing parameters {', '.join(missing)}")
    if alias is not None and values != dict(S.ALIASES[alias][1]):
        alias = None
    try:
        spec = S.make_system(kind, **values)
    except S.InvalidSystemError as err:
        culprit = params.get(err.parameter) if err.parameter else None
        where = culprit or entry
        raise ConfigError("invariant-violation", str(err), where.line, where.value_col) from None
    return spec, alias


def parse_config(text: str, task: Optional[str] = None) -> RunConfig:
    """Parse and validate configuration text.

    ``task``, when given, is the task to run; a ``task`` line in the text
    must then agree with it.

    Raises
    ------
    ConfigError
        With ``kind`` and 1-based ``line``/``column`` of the problem.
    """
    entries = _lex(text)
    seen: dict[str, _Entry] = {}
    for entry in entries:
        if entry.key in seen:
            raise ConfigError("duplicate-key", f"{entry.key} already set on line {seen[entry.key].line}", entry.line, entry.key_col)
        seen[entry.key] = entry

    system_entry = seen.get("system")
    params = {k: e for k, e in seen.items() if k not in _KNOWN}
    spec, alias = _system_from(system_entry, params)

    values: dict = {"system": spec, "alias": alias}
    for key in ("out", "peaks_out"):
        if key in seen:
            values[key] = seen[key].value
    if "task" in seen:
        given = seen["task"].value.lower()
        if given not in TASKS:
            raise seen["task"].fail("bad-value", f"task must be one of {', '.join(TASKS)}")
        if task is not None and given != task:
            raise seen["task"].fail("bad-value", f"task {given!r} conflicts with the requested {task!r}")
        values["task"] = given
    elif task is not None:
        if task not in TASKS:
            raise ConfigError("bad-value", f"task must be one of {', '.join(TASKS)}")
        values["task"] = task
    for key in _FLOAT_KEYS:
        if key in seen:
            values[key] = _as_float(seen[key])
    for key in _INT_KEYS:
        if key in seen:
            values[key] = _as_int(seen[key])
    if "energy" in seen:
        values["energy"] = _as_complex(seen["energy"])
    if "peaks" in seen:
        values["peaks"] = _as_bool(seen["peaks"])
    config = RunConfig(**values)

    if any(k in seen for k in _REGION_KEYS):
        base = DEFAULT_REGION
        region = {
            name: (_as_int if name in ("nx", "ny") else _as_float)(seen[name]) if name in seen else getattr(base, name)
            for name in _REGION_KEYS
        }
        try:
            config = replace(config, region=SearchRegion(**region))
        except ValueError as err:
            where = next(seen[k] for k in _REGION_KEYS if k in seen)
            raise where.fail("invariant-violation", f"search region: {err}") from None
    if any(k in seen for k in _TOLERANCE_KEYS):
        tols = {k: _as_float(seen[k]) for k in _TOLERANCE_KEYS if k in seen}
        for key, value in tols.items():
            if not value > 0:
                raise seen[key].fail("invariant-violation", f"{key} must be > 0")
        config = replace(config, tolerances=replace(Tolerances(), **tols))
    _check(config, seen, system_entry)
    return config


def _check(config: RunConfig, seen: dict[str, _Entry], system_entry: Optional[_Entry]) -> None:
    def bad(key: str, message: str) -> ConfigError:
        return seen[key].fail("invariant-violation", message)

    if config.e_min is not None and config.e_max is not None and not config.e_min < config.e_max:
        raise bad("e_max", "e_max must exceed e_min")
    if config.x_min is not None and config.x_max is not None and not config.x_min < config.x_max:
        raise bad("x_max", "x_max must exceed x_min")
    for key in ("n_grid", "n_points"):
        if getattr(config, key) is not None and getattr(config, key) < 2:
            raise bad(key, f"{key} must be at least 2")
    for key in ("tol", "prominence"):
        if key in seen and not getattr(config, key) > 0:
            raise bad(key, f"{key} must be > 0")
    if "matcher_tol" in seen and not 1e-13 <= config.matcher_tol <= 1e-6:
        raise bad("matcher_tol", "matcher_tol must lie in [1e-13, 1e-6]")
    task_line = seen.get("task")

    def missing(message: str) -> ConfigError:
        if task_line is None:
            return ConfigError("missing-parameter", message)
        return task_line.fail("missing-parameter", message)

    if config.task != "table1" and config.system is None:
        raise missing(f"task {config.task!r} needs a system")
    if config.task == "psi" and config.energy is None:
        raise missing("task 'psi' needs an energy")
    if config.task == "psi" and isinstance(config.system, S.RigidWall):
        raise system_entry.fail("invariant-violation", "rigid_wall has no wavefunction profile")


# ---------------------------------------------------------------------------
# serialize
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: RunConfig) -> str:
    """Text such that ``parse_config(serialize_config(c)) == c``."""
    lines = []
    if config.system is not None:
        if config.alias is not None:
            lines.append(f"system = {config.alias}")
        else:
            lines.append(f"system = {config.system.kind}")
            lines.extend(f"{k} = {_fmt(v)}" for k, v in config.system.params().items())
    lines.append(f"task = {config.task}")
    for key in ("out", "peaks_out", "e_min", "e_max", "n_grid", "energy", "x_min", "x_max", "n_points"):
        value = getattr(config, key)
        if value is not None:
            lines.append(f"{key} = {_fmt(value)}")
    if config.region is not None:
        lines.extend(f"{k} = {_fmt(getattr(config.region, k))}" for k in _REGION_KEYS)
    defaults = RunConfig()
    for key in ("peaks", "tol", "matcher_tol", "prominence"):
        if getattr(config, key) != getattr(defaults, key):
            lines.append(f"{key} = {_fmt(getattr(config, key))}")
    for key in _TOLERANCE_KEYS:
        value = getattr(config.tolerances, key)
        if value != getattr(Tolerances(), key):
            lines.append(f"{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"


def load_config(path: str, task: Optional[str] = None) -> RunConfig:
    """Read and parse a UTF-8 configuration file."""
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), task)
