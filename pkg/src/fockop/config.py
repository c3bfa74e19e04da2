"""Run configuration: INI sections with flat key = value pairs.

Example::

    [weight]
    id = gaussian:1

    [domain]
    box = -3,3,-3,3
    delta = 0.45

    [basis]
    size = 64
    n_radial = 200
    n_angular = 128

    [lattice]
    probe_resolution = 201

    [symbols]
    d = 2
    list = gallery           # or one symbol id per line
    p_set = 0.5, 1, 2

    [run]
    output = out
    seed = 0
    threads = 1
    grid_resolution = 41
"""

import configparser
from dataclasses import dataclass, field

from .errors import ConfigError, FockopError
from .geometry import Box
from .symbols import parse_symbol_id, standard_gallery


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _lines(text):
    return tuple(s.strip() for s in text.splitlines() if s.strip())


# section -> key -> (attribute, parser, check, message)
SCHEMA = {
    "weight": {"id": ("weight_id", str, lambda v: bool(v), "non-empty weight id")},
    "domain": {
        "box": ("box", Box.parse, lambda b: b.width > 0 and b.height > 0, "xmin,xmax,ymin,ymax with xmin<xmax, ymin<ymax"),
        "delta": ("delta", float, lambda v: 0 < v < 1, "0 < delta < 1"),
    },
    "basis": {
        "size": ("basis_size", int, lambda v: 4 <= v <= 512, "4 <= size <= 512"),
        "n_radial": ("n_radial", int, lambda v: 8 <= v <= 4096, "8 <= n_radial <= 4096"),
        "n_angular": ("n_angular", int, lambda v: 8 <= v <= 4096, "8 <= n_angular <= 4096"),
    },
    "lattice": {
        "probe_resolution": ("probe_resolution", int, lambda v: 11 <= v <= 2001 and v % 2 == 1,
                             "odd integer in [11, 2001]"),
    },
    "symbols": {
        "d": ("d", int, lambda v: 1 <= v <= 8, "1 <= d <= 8"),
        "list": ("symbol_ids", _lines, lambda v: len(v) > 0, "at least one symbol id"),
        "p_set": ("p_set", _floats, lambda v: len(v) > 0 and all(p > 0 for p in v), "positive exponents"),
    },
    "run": {
        "output": ("output", str, lambda v: bool(v), "output directory"),
        "seed": ("seed", int, lambda v: v >= 0, "seed >= 0"),
        "threads": ("threads", int, lambda v: 1 <= v <= 256, "1 <= threads <= 256"),
        "grid_resolution": ("grid_resolution", int, lambda v: 3 <= v <= 1001, "3 <= grid_resolution <= 1001"),
    },
}


@dataclass
class RunConfig:
    weight_id: str = "gaussian:1"
    box: Box = field(default_factory=lambda: Box.square(3.0))
    delta: float = 0.45
    basis_size: int = 64
    n_radial: int = 200
    n_angular: int = 128
    probe_resolution: int = 201
    d: int = 2
    symbol_ids: tuple = ("gallery",)
    p_set: tuple = (0.5, 1.0, 2.0)
    output: str = "out"
    seed: int = 0
    threads: int = 1
    grid_resolution: int = 41

    def symbols(self):
        """Resolve symbol ids; 'gallery' expands to the standard eight."""
        out = []
        for sid in self.symbol_ids:
            if sid == "gallery":
                out.extend(standard_gallery(self.d))
                continue
            try:
                out.append(parse_symbol_id(sid, self.d))
            except FockopError as exc:
                raise ConfigError(f"[symbols] list: {exc}") from None
        return out

    def setup_kwargs(self):
        return dict(weight_id=self.weight_id, box=self.box, delta=self.delta,
                    basis_size=self.basis_size, d=self.d, n_radial=self.n_radial,
                    n_angular=self.n_angular, grid_resolution=self.grid_resolution,
                    probe_resolution=self.probe_resolution)


def _line_of(text, section, key):
    sec = None
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            sec = s[1:-1].strip()
        elif sec == section and s.split("=")[0].strip() == key:
            return i
    return None


def parse_config(text, source="<config>"):
    """Parse and validate; raises ConfigError naming the line and field."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    cfg = RunConfig()
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key, raw in cp.items(section):
            where = f"{source}:{_line_of(text, section, key) or '?'}: [{section}] {key}"
            if key not in SCHEMA[section]:
                raise ConfigError(f"{where}: unknown key")
            attr, parse, check, msg = SCHEMA[section][key]
            try:
                value = parse(raw)
            except (ValueError, FockopError):
                raise ConfigError(f"{where}: cannot parse {raw!r} (expected {msg})") from None
            if not check(value):
                raise ConfigError(f"{where}: value {raw!r} out of range (expected {msg})")
            setattr(cfg, attr, value)
    return cfg


def load_config(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
