"""Run configuration: a sectioned key=value text format.

    [run]
    grid = 20
    command = sweep

    [operator U1]
    family = example-2uninorm, e = 0.2, a = 0.6, f = 0.8

    [params]
    u1 = U1, u2 = U2

Precedence is CLI flag, then the [run] section, then the built-in default.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from src import operators
from src.errors import ConstructionError, NotOnGrid, OutOfRange, ParseError, ValidationError
from src.grid_domain import Mode, ToleranceConfig, UnitGrid, snap
from src.utils import family_mapping, parse_fraction

logger = logging.getLogger(__name__)

COMMANDS = ("verify", "migrative", "sweep", "enumerate", "audit", "heatmap", "evaluate")
FORMATS = ("json-lines", "csv", "human")
DEFAULT_GRID = 10
DEFAULT_CHAIN = 3
DEFAULT_FORMAT = "human"

SECTION_REGEX = re.compile(r"^\[\s*(run|params|operator)(?:\s+([A-Za-z_][\w.-]*))?\s*\]$")
SECTION_KEYS = {
    "run": {"grid", "mode", "command", "format", "eps"},
    "operator": {"family", "e", "a", "f", "inner", "t", "s", "low", "high", "row"},
    "params": {"u1", "u2", "triple1", "triple2", "alpha", "operator", "triple", "x", "y", "naive", "chain"},
}
REFERENCE_KEYS = ("inner", "t", "s", "low", "high")
PARAMETERLESS = ("min", "max", "product", "lukasiewicz", "drastic", "t-min", "s-max")
FAMILY_KEYS = {
    "min": (), "max": (), "product": (), "lukasiewicz": (), "drastic": (),
    "dual": ("inner",),
    "uninorm-min": ("e", "t", "s"),
    "uninorm-max": ("e", "t", "s"),
    "nullnorm": ("a", "s", "t"),
    "example-2uninorm": ("e", "a", "f"),
    "glued-2uninorm": ("a", "low", "high"),
    "table": ("row",),
}


@dataclass
class _Section:
    kind: str
    name: Optional[str]
    line: int
    values: dict = field(default_factory=dict)  # key -> (text, line)
    rows: list = field(default_factory=list)  # (text, line), table family only


@dataclass
class RunConfig:
    grid: UnitGrid
    tolerance: ToleranceConfig
    command: Optional[str] = None
    output_format: str = DEFAULT_FORMAT
    operators: dict = field(default_factory=dict)  # name -> OperatorSpec
    params: dict = field(default_factory=dict)  # key -> (text, line)
    out: Optional[str] = None
    budget: Optional[float] = None
    jobs: int = 1
    progress: bool = False

    def operator(self, key):
        """Resolves the operator named by a [params] key."""
        if key not in self.params:
            raise ValidationError(f"[params] needs '{key}' for command '{self.command}'")
        name, line = self.params[key]
        if name not in self.operators:
            raise ValidationError(f"'{key}' refers to undefined operator '{name}'", line=line)
        return name, self.operators[name]

    def point(self, key):
        text, line = self._required(key)
        return _snap_literal(text, self.grid, self.tolerance, key, line)

    def triple(self, key, spec=None):
        """Explicit [params] triple, else the operator's natural triple; None for raw tables."""
        if key in self.params:
            text, line = self.params[key]
            parts = text.split()
            if len(parts) != 3:
                raise ValidationError(f"'{key}' needs three values 'e a f', got '{text}'", line=line)
            points = [_snap_literal(part, self.grid, self.tolerance, key, line) for part in parts]
            try:
                return operators.NeutralTriple(*points)
            except ValueError as e:
                raise ValidationError(f"'{key}': {e}", line=line) from e
        if spec is None:
            return None
        return operators.natural_triple(spec, self.grid)

    def literal(self, key):
        text, line = self._required(key)
        try:
            if self.tolerance.exact:
                return parse_fraction(text)
            return float(parse_fraction(text))
        except ValueError as e:
            raise ValidationError(f"'{key}': {e}", line=line) from e

    def flag(self, key, default=False):
        if key not in self.params:
            return default
        text, line = self.params[key]
        lowered = text.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"'{key}' must be a boolean, got '{text}'", line=line)

    def integer(self, key, default, minimum=None, maximum=None):
        if key not in self.params:
            return default
        text, line = self.params[key]
        try:
            value = int(text)
        except ValueError as e:
            raise ValidationError(f"'{key}' must be an integer, got '{text}'", line=line) from e
        if (minimum is not None and value < minimum) or (maximum is not None and value > maximum):
            low = "" if minimum is None else f"{minimum} <= "
            high = "" if maximum is None else f" <= {maximum}"
            raise ValidationError(f"'{key}' must satisfy {low}{key}{high}, got {value}", line=line)
        return value

    def _required(self, key):
        if key not in self.params:
            raise ValidationError(f"[params] needs '{key}' for command '{self.command}'")
        return self.params[key]


def _snap_literal(text, grid, tolerance, key, line):
    try:
        return snap(parse_fraction(text), grid, tolerance)
    except (NotOnGrid, OutOfRange) as e:
        raise ValidationError(f"'{key}' = {text}: {e}", line=line) from e
    except ValueError as e:
        raise ValidationError(f"'{key}': {e}", line=line) from e


def _strip_comment(raw):
    for marker in ("#", ";"):
        if marker in raw:
            raw = raw[: raw.index(marker)]
    return raw.strip()


def _read_sections(text):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("["):
            match = SECTION_REGEX.match(line)
            if not match:
                raise ParseError(f"malformed section header '{line}'", line=lineno)
            kind, name = match.groups()
            if kind == "operator" and not name:
                raise ParseError("operator sections need a name: [operator NAME]", line=lineno)
            if kind != "operator" and name:
                raise ParseError(f"[{kind}] takes no name", line=lineno)
            if kind != "operator" and any(s.kind == kind for s in sections):
                raise ParseError(f"duplicate [{kind}] section", line=lineno)
            current = _Section(kind, name, lineno)
            sections.append(current)
            continue
        if current is None:
            raise ParseError(f"'{line}' appears before any section", line=lineno)
        for pair in line.split(","):
            if "=" not in pair:
                raise ParseError(f"expected key=value, got '{pair.strip()}'", line=lineno)
            key, value = (part.strip() for part in pair.split("=", 1))
            if key not in SECTION_KEYS[current.kind]:
                raise ParseError(f"unknown key '{key}' in [{current.kind}]", line=lineno)
            if not value:
                raise ParseError(f"empty value for '{key}'", line=lineno)
            if key == "row":
                current.rows.append((value, lineno))
            elif key in current.values:
                raise ParseError(f"duplicate key '{key}'", line=lineno)
            else:
                current.values[key] = (value, lineno)
    return sections


class _OperatorBuilder:
    """Resolves operator stanzas, following references between them."""

    def __init__(self, stanzas, grid, tolerance):
        self.stanzas = stanzas
        self.grid = grid
        self.tolerance = tolerance
        self.built = {}
        self.visiting = []

    def build(self, name, line=None):
        if name in self.built:
            return self.built[name]
        if name not in self.stanzas:
            if name in PARAMETERLESS:
                return getattr(operators, family_mapping[name])()
            raise ValidationError(f"reference to undefined operator '{name}'", line=line)
        if name in self.visiting:
            cycle = " -> ".join(self.visiting[self.visiting.index(name):] + [name])
            raise ValidationError(f"operator references form a cycle: {cycle}", line=self.stanzas[name].line)
        self.visiting.append(name)
        spec = self._construct(self.stanzas[name])
        self.visiting.pop()
        self.built[name] = spec
        return spec

    def _construct(self, stanza):
        if "family" not in stanza.values:
            raise ValidationError(f"operator '{stanza.name}' has no family", line=stanza.line)
        family, line = stanza.values["family"]
        if family not in family_mapping:
            raise ValidationError(f"unknown family '{family}' for operator '{stanza.name}'", line=line)
        canonical = "min" if family == "t-min" else "max" if family == "s-max" else family
        wanted = FAMILY_KEYS[canonical]
        for key, (_, key_line) in stanza.values.items():
            if key != "family" and key not in wanted:
                raise ValidationError(f"family '{family}' takes no '{key}'", line=key_line)
        if stanza.rows and canonical != "table":
            raise ValidationError("only the table family takes 'row'", line=stanza.rows[0][1])
        for key in wanted:
            if key != "row" and key not in stanza.values:
                raise ValidationError(f"family '{family}' needs '{key}'", line=stanza.line)

        cls = getattr(operators, family_mapping[family])
        if canonical == "table":
            return cls(self._table(stanza))
        kwargs = {}
        for key in wanted:
            text, key_line = stanza.values[key]
            if key in REFERENCE_KEYS:
                kwargs[key] = self.build(text, key_line)
            else:
                kwargs[key] = _snap_literal(text, self.grid, self.tolerance, key, key_line)
        try:
            return cls(**kwargs)
        except ConstructionError as e:
            raise ValidationError(f"operator '{stanza.name}': {e}", line=stanza.line) from e

    def _table(self, stanza):
        if len(stanza.rows) != self.grid.size:
            raise ValidationError(
                f"table '{stanza.name}' needs {self.grid.size} rows for grid n={self.grid.n}, got {len(stanza.rows)}",
                line=stanza.line,
            )
        indices = []
        for text, line in stanza.rows:
            cells = text.split()
            if len(cells) != self.grid.size:
                raise ValidationError(f"row needs {self.grid.size} values, got {len(cells)}", line=line)
            indices.append([_snap_literal(cell, self.grid, self.tolerance, "row", line).index for cell in cells])
        return operators.OperatorTable(self.grid, indices)


def _run_value(run, key, convert, default, override=None):
    if override is not None:
        return override
    if run is None or key not in run.values:
        return default
    text, line = run.values[key]
    try:
        return convert(text)
    except ValueError as e:
        raise ValidationError(f"[run] {key}: {e}", line=line) from e


def _grid_size(text):
    n = int(text)
    if n < 1:
        raise ValueError(f"grid size must be a positive integer, got {n}")
    return n


def _choice(options):
    def convert(text):
        if text not in options:
            raise ValueError(f"'{text}' is not one of {', '.join(options)}")
        return text
    return convert


def _eps(text):
    value = float(text)
    if value < 0:
        raise ValueError(f"eps must be non-negative, got {text}")
    return value


def parse_config(text, grid_override=None, mode_override=None, command_override=None, format_override=None):
    """
    Parses config text into a fully resolved RunConfig.
    Args:
        text (str): The config text.
        grid_override, mode_override, command_override, format_override: CLI values that win
            over the [run] section when not None.
    Returns:
        RunConfig: With every operator built and every parameter on the grid.
    Raises:
        ParseError: For malformed lines, unknown keys or duplicate keys.
        ValidationError: For duplicate or undefined operator names, reference cycles and
            parameters that are off the grid.
    """
    sections = _read_sections(text)
    run = next((s for s in sections if s.kind == "run"), None)
    params = next((s for s in sections if s.kind == "params"), None)

    n = _run_value(run, "grid", _grid_size, DEFAULT_GRID, grid_override)
    mode = _run_value(run, "mode", lambda t: Mode(_choice(("exact", "float"))(t)), Mode.EXACT,
                      None if mode_override is None else Mode(mode_override))
    eps = _run_value(run, "eps", _eps, ToleranceConfig().eps)
    command = _run_value(run, "command", _choice(COMMANDS), None, command_override)
    output_format = _run_value(run, "format", _choice(FORMATS), DEFAULT_FORMAT, format_override)

    grid = UnitGrid(n)
    tolerance = ToleranceConfig(mode, eps)

    stanzas = {}
    for section in sections:
        if section.kind != "operator":
            continue
        if section.name in stanzas:
            raise ValidationError(
                f"duplicate operator name '{section.name}' (first defined on line {stanzas[section.name].line})",
                line=section.line,
            )
        stanzas[section.name] = section

    builder = _OperatorBuilder(stanzas, grid, tolerance)
    built = {name: builder.build(name) for name in stanzas}

    cfg = RunConfig(
        grid=grid,
        tolerance=tolerance,
        command=command,
        output_format=output_format,
        operators=built,
        params=dict(params.values) if params else {},
    )
    for key in ("u1", "u2", "operator"):
        if key in cfg.params:
            cfg.operator(key)
    logger.debug(f"Parsed config: grid n={n}, mode={mode.value}, {len(built)} operator(s), command={command}.")
    return cfg


def load_config(path, **overrides):
    """Reads and parses a config file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ValidationError(f"cannot read config '{path}': {e}") from e
    return parse_config(text, **overrides)
