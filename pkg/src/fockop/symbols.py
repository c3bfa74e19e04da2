"""Positive matrix-valued symbols G: C -> d x d PSD matrices."""

import ast
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NotHermitianError, ParameterError

HERMITIAN_TOL = 1e-10
DECAY_KINDS = ("bounded", "vanishing", "integrable")


@dataclass(frozen=True)
class SymbolField:
    """Matrix symbol evaluated pointwise; ``func`` maps z (any shape) to z.shape + (d, d).

    ``decay`` is the expected behaviour at infinity: 'bounded' (no decay),
    'vanishing' (tends to 0) or 'integrable' (tends to 0 and is integrable).
    ``breaks`` lists radii of jump discontinuities across circles |z| = b.
    """

    name: str
    d: int
    func: Callable
    decay: str = "bounded"
    breaks: tuple = ()

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.func(z), dtype=complex).reshape(z.shape + (self.d, self.d))

    def norm(self, z):
        return op_norm_pointwise(self, z)

    def scaled(self, c):
        if c < 0:
            raise ParameterError("symbols must stay positive")
        return SymbolField(f"{c:g}*{self.name}", self.d, lambda z: c * self(z),
                           self.decay, self.breaks)

    def __add__(self, other):
        if other.d != self.d:
            raise ParameterError("dimension mismatch")
        decay = "bounded" if "bounded" in (self.decay, other.decay) else (
            "vanishing" if "vanishing" in (self.decay, other.decay) else "integrable")
        return SymbolField(f"{self.name}+{other.name}", self.d,
                           lambda z: self(z) + other(z), decay,
                           tuple(sorted(set(self.breaks) | set(other.breaks))))


def hermitian_deviation(m):
    m = np.asarray(m)
    d = m.shape[-1]
    dev = float(np.max(np.abs(np.einsum("...ii->...i", m).imag), initial=0.0))
    for i in range(d):
        for j in range(i + 1, d):
            dev = max(dev, float(np.max(np.abs(m[..., i, j] - np.conj(m[..., j, i])), initial=0.0)))
    return dev


def op_norm_pointwise(G, z):
    """Largest eigenvalue of G(z) (its operator norm, G being positive)."""
    vals = G(z)
    dev = hermitian_deviation(vals)
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(f"symbol {G.name} is not Hermitian (max asymmetry {dev:.3g})", dev)
    if G.d == 1:
        return vals[..., 0, 0].real
    if G.d == 2:
        a, c = vals[..., 0, 0].real, vals[..., 1, 1].real
        return 0.5 * (a + c) + np.hypot(0.5 * (a - c), np.abs(vals[..., 0, 1]))
    return np.linalg.eigvalsh(vals)[..., -1]


def min_eigenvalue(G, z):
    return np.linalg.eigvalsh(G(z))[..., 0]


# scalar profiles g(z) -> real array

def _one(z):
    return np.ones(np.shape(z))


def _chi_disk(R=1.0):
    return lambda z: (np.abs(z) < R).astype(float)


def _gauss(a=1.0):
    return lambda z: np.exp(-a * np.abs(z) ** 2)


def _poly_decay(s=3.0):
    return lambda z: (1.0 + np.abs(z) ** 2) ** (-s)


PROFILES = {
    "one": (lambda **p: _one, "bounded", lambda **p: ()),
    "chi_disk": (lambda R=1.0: _chi_disk(R), "integrable", lambda R=1.0: (float(R),)),
    "gauss": (lambda a=1.0: _gauss(a), "integrable", lambda a=1.0: ()),
    "poly_decay": (lambda s=3.0: _poly_decay(s), "integrable", lambda s=3.0: ()),
}


def profile(name, **params):
    """Scalar profile by name; returns (callable, decay tag, breaks)."""
    if callable(name):
        return name, "bounded", ()
    try:
        make, decay, brk = PROFILES[name]
    except KeyError:
        raise ParameterError(f"unknown scalar profile {name!r}") from None
    try:
        fn, breaks = make(**params), brk(**params)
    except TypeError:
        raise ParameterError(f"bad parameters {params} for profile {name!r}") from None
    if name == "poly_decay" and params.get("s", 3.0) <= 1.0:
        decay = "vanishing"
    return fn, decay, breaks


def _weakest(tags):
    for t in DECAY_KINDS:
        if t in tags:
            return t
    return "bounded"


def scalar_symbol(g, d=1, name="scalar", decay="bounded", breaks=()):
    eye = np.eye(d)
    return SymbolField(name, d, lambda z: g(z)[..., None, None] * eye, decay, tuple(breaks))


def diag_symbol(gs, name="diag", decays=None, breaks=()):
    gs = list(gs)
    d = len(gs)

    def f(z):
        out = np.zeros(np.shape(z) + (d, d))
        for i, g in enumerate(gs):
            out[..., i, i] = g(z)
        return out

    decay = _weakest(decays) if decays else "bounded"
    return SymbolField(name, d, f, decay, tuple(breaks))


def rotating_projector(scale=3.0, d=2):
    """scale * v v^T with v = (cos|z|, sin|z|, 0, ...)."""
    if d < 2:
        raise ParameterError("rotating projector needs d >= 2")

    def f(z):
        t = np.abs(z)
        v = np.zeros(np.shape(z) + (d,))
        v[..., 0] = np.cos(t)
        v[..., 1] = np.sin(t)
        return scale * v[..., :, None] * v[..., None, :]

    return SymbolField(f"rotating-projector:{scale:g}", d, f, "bounded")


def gallery(name, d=1, **params):
    """Named symbols.

    'identity'; 'scalar:<profile>' (profiles: one, chi_disk[R], gauss[a],
    poly_decay[s]); 'diag' with ``entries=[profile names]`` (or
    'diag:p1,p2,...'); 'rotating-projector' with ``scale``; 'expr' with
    ``entries`` a d x d nested list of expression strings.
    """
    head, _, rest = name.partition(":")
    if head == "identity":
        return scalar_symbol(_one, d, "identity", "bounded")
    if head == "scalar":
        g, decay, brk = profile(rest, **params)
        label = rest + "".join(f",{k}={v:g}" for k, v in sorted(params.items()))
        return scalar_symbol(g, d, f"scalar:{label}", decay, brk)
    if head == "diag":
        names = params.pop("entries", None) or [s for s in rest.split(",") if s]
        if len(names) != d:
            raise ParameterError(f"diag symbol needs {d} entries, got {len(names)}")
        built = []
        for n in names:
            keys = _PROFILE_KEYS.get(n, ()) if isinstance(n, str) else ()
            built.append(profile(n, **{k: v for k, v in params.items() if k in keys}))
        label = ",".join(n if isinstance(n, str) else "fn" for n in names)
        brk = tuple(sorted({b for _, _, bs in built for b in bs}))
        return diag_symbol([b[0] for b in built], f"diag:{label}",
                           [b[1] for b in built], brk)
    if head == "rotating-projector":
        scale = float(rest) if rest else float(params.get("scale", 3.0))
        return rotating_projector(scale, d)
    if head == "expr":
        return expression_symbol(params["entries"], name=params.get("label", "expr"))
    raise ParameterError(f"unknown symbol {name!r}")


_PROFILE_KEYS = {"chi_disk": ("R",), "gauss": ("a",), "poly_decay": ("s",), "one": ()}


def standard_gallery(d=2):
    """The eight bounded symbols used by the equivalence harness."""
    return [
        gallery("identity", d),
        gallery("scalar:gauss", d),
        gallery("scalar:chi_disk", d, R=1.0),
        gallery("scalar:poly_decay", d, s=3.0),
        gallery("diag", d, entries=["gauss", "chi_disk"][:d] + ["gauss"] * max(0, d - 2)),
        gallery("rotating-projector", d, scale=3.0),
        diag_symbol([lambda z: 2.0 * np.exp(-np.abs(z) ** 2)] + [_gauss()] * (d - 1),
                    "diag:2gauss,gauss", ["integrable"] * d),
        gallery("diag", d, entries=["one"] + ["gauss"] * (d - 1)),
    ]


def parse_symbol_id(text, d):
    """'name' or 'name;key=value;...' as used in run configs."""
    head, *opts = [t.strip() for t in text.split(";")]
    params = {}
    for o in opts:
        k, _, v = o.partition("=")
        try:
            params[k.strip()] = float(v)
        except ValueError:
            raise ParameterError(f"bad symbol option {o!r} in {text!r}") from None
    return gallery(head, d, **params)


# --- expression symbols --------------------------------------------------

_FUNCS = {"exp": np.exp, "cos": np.cos, "sin": np.sin, "sqrt": np.sqrt}
_ALLOWED = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
            ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def compile_expression(text):
    """Compile an arithmetic expression in |z|, Re z, Im z to a vectorized function.

    Grammar: numbers, variables ``|z|`` (or ``absz``/``r``), ``Re z`` (or ``x``),
    ``Im z`` (or ``y``), operators + - * / ^, functions exp, cos, sin, sqrt
    and chi_disk(R).
    """
    src = text.replace("|z|", "absz").replace("^", "**")
    src = re.sub(r"Re\s*z", "x", src)
    src = re.sub(r"Im\s*z", "y", src)
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParameterError(f"cannot parse expression {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise ParameterError(f"disallowed syntax in {text!r}: {type(node).__name__}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in (*_FUNCS, "chi_disk"):
                raise ParameterError(f"unknown function in {text!r}")
        if isinstance(node, ast.Name) and node.id not in (*_FUNCS, "chi_disk", "absz", "r", "x", "y"):
            raise ParameterError(f"unknown variable {node.id!r} in {text!r}")
    code = compile(tree, "<symbol>", "eval")

    def f(z):
        z = np.asarray(z, dtype=complex)
        env = dict(_FUNCS, absz=np.abs(z), r=np.abs(z), x=z.real, y=z.imag,
                   chi_disk=lambda R: (np.abs(z) < R).astype(float))
        out = eval(code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(out, dtype=complex), z.shape)

    return f


def expression_symbol(entries, name="expr", decay="bounded"):
    """Symbol from a square nested list of expression strings."""
    d = len(entries)
    if any(len(row) != d for row in entries):
        raise ParameterError("expression symbol needs a square matrix of entries")
    fns = [[compile_expression(e) for e in row] for row in entries]

    def f(z):
        out = np.empty(np.shape(z) + (d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                out[..., i, j] = fns[i][j](z)
        return out

    return SymbolField(name, d, f, decay)


def check_symbol(G, probes):
    """Hermitian deviation and minimum eigenvalue over probe points."""
    vals = G(probes)
    return hermitian_deviation(vals), float(np.min(np.linalg.eigvalsh(vals)))
