"""Line-oriented run configuration.

Each non-blank line is ``section.key = value``; ``#`` starts a comment.
Values are integers, floats, ``true``/``false``, bare or quoted strings, or
comma-separated lists in square brackets. Unknown sections or keys are
errors. Example::

    params.n = 2
    params.u_b = -0.05
    solver.N = 512
    initial.family = gaussian-bump
    sweep.m = [20, 40, 80]
"""

import ast
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError, OutflowError
from .model import Params
from .recipes import Bump
from .solver import SolverConfig

FAMILIES = ("gaussian-bump", "stationary")


@dataclass(frozen=True)
class StationarySpec:
    r_max: float = 50.0
    tol: float = 1e-10
    N: int = 2000


@dataclass(frozen=True)
class InitialSpec:
    family: str = "gaussian-bump"
    center: float = 4.0
    width: float = 0.7
    amplitude: float = 0.3
    u_amplitude: float = 0.0

    def bump(self):
        if self.family == "stationary":
            return Bump(amplitude=0.0, center=self.center, width=self.width, u_amplitude=0.0)
        return Bump(self.amplitude, self.center, self.width, self.u_amplitude)


@dataclass(frozen=True)
class DiagnosticsSpec:
    ledger: bool = True
    deltas: tuple = (0.5, 1.0, 2.0)
    representation: bool = False
    probes: int = 10
    snapshots: bool = False


@dataclass(frozen=True)
class SweepSpec:
    m: tuple = (20.0, 40.0, 80.0)
    u_b: tuple = (-0.025, -0.05, -0.1)
    r_lo: float = 1.0
    r_hi: float = 10.0
    t_hi: float = 20.0


@dataclass(frozen=True)
class VerifySpec:
    seed: int = 42
    samples: int = 100000


@dataclass(frozen=True)
class OutputSpec:
    dir: str = "out"


@dataclass(frozen=True)
class RunSpec:
    params: Params = field(default_factory=Params)
    solver: SolverConfig = field(default_factory=SolverConfig)
    stationary: StationarySpec = field(default_factory=StationarySpec)
    initial: InitialSpec = field(default_factory=InitialSpec)
    diagnostics: DiagnosticsSpec = field(default_factory=DiagnosticsSpec)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    verify: VerifySpec = field(default_factory=VerifySpec)
    output: OutputSpec = field(default_factory=OutputSpec)


_SECTIONS = {f.name: f.default_factory for f in fields(RunSpec)}


def _parse_value(text, line, key):
    text = text.strip()
    if text == "":
        raise ConfigError("missing value", line=line, key=key)
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", "null"):
        return None
    if text[0] in "[(\"'" or text[0].isdigit() or text[0] in "+-.":
        try:
            val = ast.literal_eval(text)
        except (ValueError, SyntaxError):
            if text[0] in "[(\"'":
                raise ConfigError(f"cannot parse value {text!r}", line=line, key=key) from None
            return text
        if isinstance(val, list):
            val = tuple(val)
        return val
    return text


def _coerce(value, default, line, key):
    """Convert to the type of the default; None defaults accept numbers."""
    try:
        if isinstance(default, bool):
            if not isinstance(value, bool):
                raise TypeError
            return value
        if isinstance(default, int):
            if isinstance(value, bool) or not float(value).is_integer():
                raise TypeError
            return int(value)
        if isinstance(default, float) or default is None:
            if value is None:
                return None
            if isinstance(value, (bool, str, tuple)):
                raise TypeError
            return float(value)
        if isinstance(default, tuple):
            vals = value if isinstance(value, tuple) else (value,)
            if any(isinstance(v, (bool, str, tuple)) for v in vals):
                raise TypeError
            return tuple(float(v) for v in vals)
        if isinstance(default, str):
            return str(value)
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"wrong type for {key}: {value!r}", line=line, key=key)


def parse_assignments(text):
    """(line, section, key, raw value) for every assignment line."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError("expected 'section.key = value'", line=lineno)
        lhs, rhs = body.split("=", 1)
        lhs = lhs.strip()
        if lhs.count(".") != 1 or not all(part.strip() for part in lhs.split(".")):
            raise ConfigError(f"malformed key {lhs!r}", line=lineno, key=lhs)
        section, key = (p.strip() for p in lhs.split("."))
        out.append((lineno, section, key, _parse_value(rhs, lineno, lhs)))
    return out


def parse_config(text, overrides=()):
    """Validated RunSpec from a config document plus ``section.key=value`` overrides."""
    items = parse_assignments(text)
    for j, item in enumerate(overrides):
        items.extend((f"override {j + 1}", s, k, v) for _, s, k, v in parse_assignments(item))
    values = {name: {} for name in _SECTIONS}
    lines = {}
    for lineno, section, key, val in items:
        path = f"{section}.{key}"
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section {section!r}", line=lineno, key=path)
        defaults = _SECTIONS[section]()
        if key not in {f.name for f in fields(defaults)}:
            raise ConfigError(f"unknown key {path!r}", line=lineno, key=path)
        values[section][key] = _coerce(val, getattr(defaults, key), lineno, path)
        lines[path] = lineno
    return _build(values, lines)


def _build(values, lines):
    def fail(path, msg):
        raise ConfigError(f"{path}: {msg}", line=lines.get(path), key=path)

    p = values["params"]
    if "gamma" in p and not 1.0 <= p["gamma"] <= 2.0:
        fail("params.gamma", "must lie in [1, 2], the adiabatic range covered by the stability theory")
    if "u_b" in p and p["u_b"] > 0:
        fail("params.u_b", "must be <= 0: the boundary velocity describes outflow (u_b < 0)")
    if "n" in p and p["n"] < 2:
        fail("params.n", "dimension must be at least 2")
    sections = {}
    for name, factory in _SECTIONS.items():
        try:
            sections[name] = replace(factory(), **values[name])
        except OutflowError as exc:
            key = next(iter(exc.context), None)
            path = f"{name}.{key}" if key in values[name] else name
            raise ConfigError(f"{path}: {exc}", line=lines.get(path), key=path) from None
    st = sections["stationary"]
    if not (st.tol > 0 and st.r_max >= 10 and st.N >= 100):
        fail("stationary", "tol must be positive, r_max >= 10 and N >= 100")
    init = sections["initial"]
    if init.family not in FAMILIES:
        fail("initial.family", f"unknown family {init.family!r}; known: {', '.join(FAMILIES)}")
    if not init.width > 0:
        fail("initial.width", "must be positive")
    diag = sections["diagnostics"]
    if any(d <= 0 for d in diag.deltas):
        fail("diagnostics.deltas", "weights must be positive")
    sw = sections["sweep"]
    if any(m <= 1 for m in sw.m) or any(u > 0 for u in sw.u_b):
        fail("sweep", "m values must exceed 1 and u_b values must be <= 0")
    if sections["verify"].samples < 1000:
        fail("verify.samples", "need at least 1000 samples")
    solver = sections["solver"]
    if solver.m > st.r_max:
        fail("solver.m", f"exceeds stationary.r_max = {st.r_max}")
    return RunSpec(**sections)


def load_config(path, overrides=()):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, overrides)
