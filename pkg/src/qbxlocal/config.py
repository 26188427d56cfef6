"""Flat ``key = value`` sweep configuration files.

Lines are ``key = value`` or ``key = [a, b, c]``; ``#`` starts a comment.
Numbers may be written as powers, e.g. ``2^-3``. 3D targets are written
``theta:phi``.
"""

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

COUPLINGS = ("fixed_r", "r_equals_4h", "r_equals_sqrt_h")
_POWER = re.compile(r"^([+-]?\d+(?:\.\d*)?)\^([+-]?\d+)$")
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class SweepConfig:
    kernel: str
    geometry: str
    density: str
    N_list: tuple
    M_list: tuple
    q: int
    targets: tuple
    coupling: str = "fixed_r"
    r_list: tuple = ()
    k: float = 0.0
    dimension: int = 2
    geometry_params: tuple = ()
    density_params: tuple = ()
    side: str = "interior"
    n_phi: int = 48
    n_theta: int = 96
    reference_tol: float = 1e-10
    out: str = None
    source: dict = field(default=None, compare=False, repr=False)


def parse_number(text, line=None, key=None):
    t = text.strip()
    m = _POWER.match(t)
    try:
        if m:
            return float(m.group(1)) ** int(m.group(2))
        if t in ("pi", "+pi"):
            return math.pi
        if t.endswith("*pi"):
            return float(t[:-3]) * math.pi
        if "/" in t and not t.startswith("/"):
            num, den = t.split("/", 1)
            return parse_number(num, line, key) / parse_number(den, line, key)
        return float(t)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}", line=line, field=key) from None


def _split_list(raw, line, key):
    inner = raw.strip()
    if not (inner.startswith("[") and inner.endswith("]")):
        return [inner]
    inner = inner[1:-1].strip()
    if not inner:
        raise ConfigError("empty list", line=line, field=key)
    return [item.strip() for item in inner.split(",")]


def parse_text(text):
    """Parse config text into ``{key: (line_number, [items])}``."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", line=lineno)
        key, value = (part.strip() for part in stripped.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"invalid key {key!r}", line=lineno, field=key)
        if key in entries:
            raise ConfigError(f"duplicate key {key!r} (first set on line {entries[key][0]})",
                              line=lineno, field=key)
        if not value:
            raise ConfigError("missing value", line=lineno, field=key)
        items = _split_list(value, lineno, key)
        if any(not item for item in items):
            raise ConfigError("empty list element", line=lineno, field=key)
        entries[key] = (lineno, items)
    return entries


_REQUIRED = ("kernel", "geometry", "density", "N", "M", "q", "targets")
_KNOWN = set(_REQUIRED) | {"coupling", "r", "k", "dimension", "geometry_params", "density_params",
                           "side", "n_phi", "n_theta", "reference_tol", "out"}


def _scalar(entries, key, conv, default=None):
    if key not in entries:
        return default
    line, items = entries[key]
    if len(items) != 1:
        raise ConfigError("expected a single value, got a list", line=line, field=key)
    return conv(items[0], line, key)


def _text(item, line, key):
    return item


def _int(item, line, key):
    v = parse_number(item, line, key)
    if v != int(v):
        raise ConfigError(f"expected an integer, got {item!r}", line=line, field=key)
    return int(v)


def _numbers(entries, key, conv=parse_number):
    if key not in entries:
        return ()
    line, items = entries[key]
    return tuple(conv(item, line, key) for item in items)


def _target(item, line, key):
    if ":" in item:
        a, b = item.split(":", 1)
        return (parse_number(a, line, key), parse_number(b, line, key))
    return parse_number(item, line, key)


def config_from_text(text):
    entries = parse_text(text)
    for key, (line, _) in entries.items():
        if key not in _KNOWN:
            raise ConfigError(f"unknown key {key!r}", line=line, field=key)
    for key in _REQUIRED:
        if key not in entries:
            raise ConfigError(f"missing required key {key!r}", field=key)

    def where(key):
        return entries[key][0] if key in entries else None

    geometry = _scalar(entries, "geometry", _text)
    dimension = _scalar(entries, "dimension", _int, 3 if geometry == "sphere" else 2)
    coupling = _scalar(entries, "coupling", _text, "fixed_r")
    if coupling not in COUPLINGS:
        raise ConfigError(f"coupling must be one of {', '.join(COUPLINGS)}, got {coupling!r}",
                          line=where("coupling"), field="coupling")
    r_list = _numbers(entries, "r")
    if coupling == "fixed_r" and not r_list:
        raise ConfigError("fixed_r coupling needs an r list", field="r")
    if coupling != "fixed_r" and r_list:
        raise ConfigError(f"r list is not allowed with coupling {coupling}", line=where("r"), field="r")
    if any(r <= 0 for r in r_list):
        raise ConfigError("radii must be positive", line=where("r"), field="r")
    N_list = _numbers(entries, "N", _int)
    if any(n < 0 for n in N_list):
        raise ConfigError("orders must be non-negative", line=where("N"), field="N")
    M_list = _numbers(entries, "M", _int)
    if any(m < 1 for m in M_list):
        raise ConfigError("panel counts must be positive", line=where("M"), field="M")
    targets = _numbers(entries, "targets", _target)
    if dimension == 3 and not all(isinstance(t, tuple) for t in targets):
        raise ConfigError("3D targets must be written theta:phi", line=where("targets"), field="targets")
    if dimension == 2 and any(isinstance(t, tuple) for t in targets):
        raise ConfigError("2D targets are single curve parameters", line=where("targets"), field="targets")
    side = _scalar(entries, "side", _text, "interior")
    if side not in ("interior", "exterior"):
        raise ConfigError(f"side must be interior or exterior, got {side!r}", line=where("side"), field="side")
    return SweepConfig(
        kernel=_scalar(entries, "kernel", _text),
        geometry=geometry,
        density=_scalar(entries, "density", _text),
        N_list=N_list,
        M_list=M_list,
        q=_scalar(entries, "q", _int),
        targets=targets,
        coupling=coupling,
        r_list=r_list,
        k=_scalar(entries, "k", parse_number, 0.0),
        dimension=dimension,
        geometry_params=_numbers(entries, "geometry_params"),
        density_params=_numbers(entries, "density_params"),
        side=side,
        n_phi=_scalar(entries, "n_phi", _int, 48),
        n_theta=_scalar(entries, "n_theta", _int, 96),
        reference_tol=_scalar(entries, "reference_tol", parse_number, 1e-10),
        out=_scalar(entries, "out", _text),
        source={key: line for key, (line, _) in entries.items()},
    )


def load_config(path):
    p = Path(path)
    try:
        text = p.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {p}: {exc}") from None
    return config_from_text(text)
