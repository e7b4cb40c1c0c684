"""Holomorphic expression trees and the calculus the surface synthesis needs.

The trees are deliberately tiny: constants, one complex variable z (or the
real pair x, y), the four arithmetic operations, negation, integer powers,
and the entire functions exp, sin, cos, sinh, cosh.  Everything a generator
pair uses is closed under differentiation inside this class, and the
antiderivatives we need either stay inside it (polynomials, c*exp(a*z+b),
trigonometric and hyperbolic lines) or fall back to adaptive quadrature.

Trees are immutable and compare structurally.  Smart constructors fold
subtrees whose operands are all constants and eliminate additive zeros and
multiplicative ones, and nothing else, so a tree built through them has a
unique canonical text form that parses back to the identical tree.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

import numpy as np

# |w| below this counts as a vanishing denominator.
DIV_EPS = 1e-300
# Default absolute tolerance for contour integration.
DEFAULT_QUAD_TOL = 1e-10
# Hard cap on adaptive panels per integration call.
MAX_PANELS = 10_000

NumberLike = Union[int, float, complex]


class ExpressionError(Exception):
    """Base class for every error raised by this module."""


class ParseError(ExpressionError):
    """Source text rejected; `offset` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class SingularityError(ExpressionError):
    """Evaluation hit a (near-)vanishing denominator."""


class NonFiniteError(ExpressionError):
    """Evaluation overflowed to inf or produced nan."""


class QuadratureError(ExpressionError):
    """Contour integration could not reach the tolerance within budget."""


# ---------------------------------------------------------------------------
# nodes


class Expr:
    """Base node.  Subclasses are frozen dataclasses; trees are immutable."""

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return intpow(self, n)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Constant(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    def _eval(self, env):
        return self.value

    def _diff(self):
        return Constant(0)

    def _text(self):
        return _format_complex(self.value)


@dataclass(frozen=True)
class Variable(Expr):
    tag: str  # "z" (complex mode) or "x"/"y" (real mode)

    def __post_init__(self):
        if self.tag not in ("z", "x", "y"):
            raise ValueError(f"unknown variable tag {self.tag!r}")

    def _eval(self, env):
        return env[self.tag]

    def _diff(self):
        return Constant(1)

    def _text(self):
        return self.tag


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def _eval(self, env):
        return self.left._eval(env) + self.right._eval(env)

    def _diff(self):
        return add(self.left._diff(), self.right._diff())

    def _text(self):
        return f"({self.left._text()}+{self.right._text()})"


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def _eval(self, env):
        return self.left._eval(env) - self.right._eval(env)

    def _diff(self):
        return sub(self.left._diff(), self.right._diff())

    def _text(self):
        return f"({self.left._text()}-{self.right._text()})"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def _eval(self, env):
        return self.left._eval(env) * self.right._eval(env)

    def _diff(self):
        return add(
            mul(self.left._diff(), self.right),
            mul(self.left, self.right._diff()),
        )

    def _text(self):
        return f"({self.left._text()}*{self.right._text()})"


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def _eval(self, env):
        den = self.right._eval(env)
        if _min_abs(den) < DIV_EPS:
            raise SingularityError("division by a vanishing denominator")
        return self.left._eval(env) / den

    def _diff(self):
        return div(
            sub(
                mul(self.left._diff(), self.right),
                mul(self.left, self.right._diff()),
            ),
            intpow(self.right, 2),
        )

    def _text(self):
        return f"({self.left._text()}/{self.right._text()})"


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr

    def _eval(self, env):
        return -self.child._eval(env)

    def _diff(self):
        return neg(self.child._diff())

    def _text(self):
        return f"(-{self.child._text()})"


@dataclass(frozen=True)
class IntPow(Expr):
    base: Expr
    n: int

    def __post_init__(self):
        object.__setattr__(self, "n", int(self.n))

    def _eval(self, env):
        b = self.base._eval(env)
        if self.n < 0 and _min_abs(b) < DIV_EPS:
            raise SingularityError("negative power of a vanishing base")
        return b ** self.n

    def _diff(self):
        return mul(
            mul(Constant(self.n), intpow(self.base, self.n - 1)),
            self.base._diff(),
        )

    def _text(self):
        return f"({self.base._text()}^{self.n})"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def _eval(self, env):
        return np.exp(self.arg._eval(env))

    def _diff(self):
        return mul(Exp(self.arg), self.arg._diff())

    def _text(self):
        return f"exp({self.arg._text()})"


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr

    def _eval(self, env):
        return np.sin(self.arg._eval(env))

    def _diff(self):
        return mul(Cos(self.arg), self.arg._diff())

    def _text(self):
        return f"sin({self.arg._text()})"


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr

    def _eval(self, env):
        return np.cos(self.arg._eval(env))

    def _diff(self):
        return neg(mul(Sin(self.arg), self.arg._diff()))

    def _text(self):
        return f"cos({self.arg._text()})"


@dataclass(frozen=True)
class Sinh(Expr):
    arg: Expr

    def _eval(self, env):
        return np.sinh(self.arg._eval(env))

    def _diff(self):
        return mul(Cosh(self.arg), self.arg._diff())

    def _text(self):
        return f"sinh({self.arg._text()})"


@dataclass(frozen=True)
class Cosh(Expr):
    arg: Expr

    def _eval(self, env):
        return np.cosh(self.arg._eval(env))

    def _diff(self):
        return mul(Sinh(self.arg), self.arg._diff())

    def _text(self):
        return f"cosh({self.arg._text()})"


_FUNCTIONS = {"exp": Exp, "sin": Sin, "cos": Cos, "sinh": Sinh, "cosh": Cosh}


# ---------------------------------------------------------------------------
# smart constructors (constant folding, zero/one elimination)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, float, complex)):
        return Constant(v)
    raise TypeError(f"cannot coerce {type(v).__name__} to an expression")


def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Constant):
        return False
    return value is None or e.value == value


def add(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Constant) and isinstance(r, Constant):
        return Constant(l.value + r.value)
    if _is_const(l, 0):
        return r
    if _is_const(r, 0):
        return l
    return Add(l, r)


def sub(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Constant) and isinstance(r, Constant):
        return Constant(l.value - r.value)
    if _is_const(r, 0):
        return l
    if _is_const(l, 0):
        return neg(r)
    return Sub(l, r)


def mul(l: Expr, r: Expr) -> Expr:
    if isinstance(l, Constant) and isinstance(r, Constant):
        return Constant(l.value * r.value)
    if _is_const(l, 0) or _is_const(r, 0):
        return Constant(0)
    if _is_const(l, 1):
        return r
    if _is_const(r, 1):
        return l
    return Mul(l, r)


def div(l: Expr, r: Expr) -> Expr:
    if isinstance(r, Constant) and abs(r.value) >= DIV_EPS:
        if isinstance(l, Constant):
            return Constant(l.value / r.value)
        if r.value == 1:
            return l
    return Div(l, r)


def neg(e: Expr) -> Expr:
    if isinstance(e, Constant):
        return Constant(-e.value)
    return Neg(e)


def intpow(base: Expr, n: int) -> Expr:
    n = int(n)
    if isinstance(base, Constant):
        if n >= 0 or abs(base.value) >= DIV_EPS:
            try:
                v = base.value ** n
            except OverflowError:
                v = None
            if v is not None and np.isfinite(v):
                return Constant(v)
    if n == 0:
        return Constant(1)
    if n == 1:
        return base
    return IntPow(base, n)


# ---------------------------------------------------------------------------
# inspection


def variables(e: Expr) -> set[str]:
    """Set of variable tags used by the tree."""
    out: set[str] = set()
    _collect_vars(e, out)
    return out


def _collect_vars(e: Expr, out: set[str]) -> None:
    if isinstance(e, Variable):
        out.add(e.tag)
    elif isinstance(e, (Add, Sub, Mul, Div)):
        _collect_vars(e.left, out)
        _collect_vars(e.right, out)
    elif isinstance(e, Neg):
        _collect_vars(e.child, out)
    elif isinstance(e, IntPow):
        _collect_vars(e.base, out)
    elif isinstance(e, (Exp, Sin, Cos, Sinh, Cosh)):
        _collect_vars(e.arg, out)


def _require_complex_mode(e: Expr, what: str) -> None:
    tags = variables(e)
    if tags - {"z"}:
        raise ValueError(f"{what} requires an expression in z only, got {sorted(tags)}")


# ---------------------------------------------------------------------------
# evaluation


def evaluate(expr: Expr, at: Mapping[str, NumberLike | np.ndarray]):
    """Evaluate a tree at a point, or elementwise over same-shaped arrays.

    `at` maps variable tags to complex scalars or to numpy arrays (all arrays
    must share one shape).  Scalar input returns a Python complex, array
    input a complex128 array.  A vanishing denominator raises
    SingularityError and any overflow to a non-finite value raises
    NonFiniteError; neither nan nor inf ever escapes.
    """
    needed = variables(expr)
    missing = needed - set(at)
    if missing:
        raise ValueError(f"no value supplied for variable(s) {sorted(missing)}")
    env: dict[str, complex | np.ndarray] = {}
    shape = None
    for tag, value in at.items():
        if isinstance(value, np.ndarray):
            arr = np.asarray(value, dtype=np.complex128)
            if shape is not None and arr.shape != shape:
                raise ValueError("all variable arrays must share one shape")
            shape = arr.shape
            env[tag] = arr
        else:
            env[tag] = complex(value)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        out = expr._eval(env)
    if not np.all(np.isfinite(out)):
        raise NonFiniteError("evaluation overflowed to a non-finite value")
    if shape is not None:
        if np.ndim(out) == 0:
            return np.full(shape, complex(out), dtype=np.complex128)
        return np.asarray(out, dtype=np.complex128)
    return complex(out)


def _min_abs(v) -> float:
    return float(np.min(np.abs(v)))


# ---------------------------------------------------------------------------
# symbolic calculus


def derivative(e: Expr) -> Expr:
    """Symbolic d/dz.  The result is folded, never expanded or reordered."""
    _require_complex_mode(e, "derivative")
    return e._diff()


def antiderivative(e: Expr) -> Expr | None:
    """Antiderivative F with F(0) = 0, or None when outside the closed class.

    Supported: polynomials in z, c*exp(a*z+b), c*sin/cos/sinh/cosh(a*z+b),
    and finite sums and constant multiples of these.  None means "use
    quadrature instead"; it is a value, not an error.
    """
    _require_complex_mode(e, "antiderivative")
    raw = _anti(e)
    if raw is None:
        return None
    at_zero = evaluate(raw, {"z": 0j})
    if at_zero != 0:
        raw = sub(raw, Constant(at_zero))
    return raw


def _anti(e: Expr) -> Expr | None:
    coeffs = _poly_coeffs(e)
    if coeffs is not None:
        return _integrate_poly(coeffs)
    if isinstance(e, Add):
        l, r = _anti(e.left), _anti(e.right)
        return None if l is None or r is None else add(l, r)
    if isinstance(e, Sub):
        l, r = _anti(e.left), _anti(e.right)
        return None if l is None or r is None else sub(l, r)
    if isinstance(e, Neg):
        c = _anti(e.child)
        return None if c is None else neg(c)
    if isinstance(e, Mul):
        if isinstance(e.left, Constant):
            r = _anti(e.right)
            return None if r is None else mul(e.left, r)
        if isinstance(e.right, Constant):
            l = _anti(e.left)
            return None if l is None else mul(l, e.right)
        return None
    if isinstance(e, Div):
        if isinstance(e.right, Constant) and abs(e.right.value) >= DIV_EPS:
            l = _anti(e.left)
            return None if l is None else div(l, e.right)
        return None
    if isinstance(e, (Exp, Sin, Cos, Sinh, Cosh)):
        lin = _linear_coeffs(e.arg)
        if lin is None:
            return None
        a, _ = lin
        if a == 0:
            return mul(Constant(evaluate(e, {"z": 0j})), Variable("z"))
        inv = Constant(1 / a)
        if isinstance(e, Exp):
            return mul(inv, Exp(e.arg))
        if isinstance(e, Sin):
            return neg(mul(inv, Cos(e.arg)))
        if isinstance(e, Cos):
            return mul(inv, Sin(e.arg))
        if isinstance(e, Sinh):
            return mul(inv, Cosh(e.arg))
        return mul(inv, Sinh(e.arg))
    return None


def _integrate_poly(coeffs: list[complex]) -> Expr:
    z = Variable("z")
    out: Expr = Constant(0)
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        out = add(out, mul(Constant(c / (k + 1)), intpow(z, k + 1)))
    return out


def _poly_coeffs(e: Expr) -> list[complex] | None:
    """Coefficient list (index = degree) when e is a polynomial in z."""
    if isinstance(e, Constant):
        return [e.value]
    if isinstance(e, Variable):
        return [0, 1]
    if isinstance(e, Add) or isinstance(e, Sub):
        l, r = _poly_coeffs(e.left), _poly_coeffs(e.right)
        if l is None or r is None:
            return None
        n = max(len(l), len(r))
        l = l + [0] * (n - len(l))
        r = r + [0] * (n - len(r))
        s = 1 if isinstance(e, Add) else -1
        return [a + s * b for a, b in zip(l, r)]
    if isinstance(e, Neg):
        c = _poly_coeffs(e.child)
        return None if c is None else [-v for v in c]
    if isinstance(e, Mul):
        l, r = _poly_coeffs(e.left), _poly_coeffs(e.right)
        if l is None or r is None:
            return None
        return list(np.convolve(l, r))
    if isinstance(e, Div):
        if isinstance(e.right, Constant) and abs(e.right.value) >= DIV_EPS:
            l = _poly_coeffs(e.left)
            return None if l is None else [v / e.right.value for v in l]
        return None
    if isinstance(e, IntPow):
        if e.n < 0:
            base = _poly_coeffs(e.base)
            if base is not None and len(base) == 1 and abs(base[0]) >= DIV_EPS:
                return [base[0] ** e.n]
            return None
        base = _poly_coeffs(e.base)
        if base is None:
            return None
        out = [complex(1)]
        for _ in range(e.n):
            out = list(np.convolve(out, base))
        return out
    return None


def _linear_coeffs(e: Expr) -> tuple[complex, complex] | None:
    """(a, b) when e is exactly a*z + b, else None."""
    coeffs = _poly_coeffs(e)
    if coeffs is None or len(coeffs) > 2:
        return None
    coeffs = coeffs + [0] * (2 - len(coeffs))
    return complex(coeffs[1]), complex(coeffs[0])


# ---------------------------------------------------------------------------
# contour integration


@dataclass(frozen=True)
class Contour:
    """Integration polyline; the first waypoint is the base point."""

    waypoints: tuple[complex, ...]

    def __post_init__(self):
        pts = tuple(complex(w) for w in self.waypoints)
        if len(pts) < 2:
            raise ValueError("a contour needs at least 2 waypoints")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("consecutive contour waypoints must be distinct")
        if not all(np.isfinite(w) for w in pts):
            raise ValueError("contour waypoints must be finite")
        object.__setattr__(self, "waypoints", pts)

    @property
    def base_point(self) -> complex:
        return self.waypoints[0]

    def segments(self) -> Iterable[tuple[complex, complex]]:
        return zip(self.waypoints, self.waypoints[1:])


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)


def contour_integral(
    expr: Expr,
    contour: Contour,
    tol: float = DEFAULT_QUAD_TOL,
    max_panels: int = MAX_PANELS,
) -> complex:
    """Integrate expr along the polyline with adaptive Gauss-Legendre panels.

    Each panel uses a 10-point rule; a panel is accepted when the two-half
    refinement agrees with it within the panel's share of the absolute
    tolerance, and is bisected otherwise.  Exceeding `max_panels` raises
    QuadratureError.  Singularities on the path surface as SingularityError
    from evaluation.
    """
    _require_complex_mode(expr, "contour integration")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    segs = list(contour.segments())
    total_len = sum(abs(b - a) for a, b in segs)
    acc = 0j
    panels = 0
    for za, zb in segs:
        seg_tol = tol * abs(zb - za) / total_len
        stack = [(0.0, 1.0, _gl_panel(expr, za, zb, 0.0, 1.0), seg_tol)]
        while stack:
            panels += 1
            if panels > max_panels:
                raise QuadratureError(
                    f"tolerance {tol:g} not reached within {max_panels} panels"
                )
            t0, t1, coarse, budget = stack.pop()
            tm = 0.5 * (t0 + t1)
            left = _gl_panel(expr, za, zb, t0, tm)
            right = _gl_panel(expr, za, zb, tm, t1)
            fine = left + right
            if abs(fine - coarse) <= budget:
                acc += fine
            else:
                stack.append((t0, tm, left, 0.5 * budget))
                stack.append((tm, t1, right, 0.5 * budget))
    return complex(acc)


def _gl_panel(expr: Expr, za: complex, zb: complex, t0: float, t1: float) -> complex:
    half = 0.5 * (t1 - t0)
    ts = 0.5 * (t0 + t1) + half * _GL_NODES
    zs = za + ts * (zb - za)
    vals = evaluate(expr, {"z": zs})
    return complex((zb - za) * half * np.dot(_GL_WEIGHTS, vals))


# ---------------------------------------------------------------------------
# parsing and printing


def to_text(e: Expr) -> str:
    """Canonical fully parenthesized text; parse(to_text(e)) == e."""
    return e._text()


def _format_float(x: float) -> str:
    return repr(float(x))


def _format_complex(v: complex) -> str:
    re_, im = v.real, v.imag
    if im == 0:
        return _format_float(re_)
    if re_ == 0:
        return f"({_format_float(im)}*i)"
    if im < 0:
        return f"({_format_float(re_)}-{_format_float(-im)}*i)"
    return f"({_format_float(re_)}+{_format_float(im)}*i)"


_TOKEN_NUMBER = re.compile(r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_TOKEN_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass
class _Token:
    kind: str  # "num", "ident", an operator character, or "end"
    text: str
    pos: int
    value: float = 0.0


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+-*/^()":
            tokens.append(_Token(ch, ch, i))
            i += 1
            continue
        m = _TOKEN_NUMBER.match(src, i)
        if m:
            tokens.append(_Token("num", m.group(), i, value=float(m.group())))
            i = m.end()
            continue
        m = _TOKEN_IDENT.match(src, i)
        if m:
            tokens.append(_Token("ident", m.group(), i))
            i = m.end()
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    """Recursive descent over the token list.

    Precedence, loosest to tightest: +/- then */ then unary minus then ^.
    The exponent binds tighter than unary minus, so "-z^2" is -(z^2); write
    "(-z)^2" for the square of a negation.  Exponents must be integer
    literals (optionally signed or parenthesized).
    """

    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.next()

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.parse_term()
            node = add(node, rhs) if op == "+" else sub(node, rhs)
        return node

    def parse_term(self) -> Expr:
        node = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.next().kind
            rhs = self.parse_factor()
            node = mul(node, rhs) if op == "*" else div(node, rhs)
        return node

    def parse_factor(self) -> Expr:
        if self.peek().kind == "-":
            self.next()
            return neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek().kind == "^":
            self.next()
            return intpow(base, self.parse_exponent())
        return base

    def parse_exponent(self) -> int:
        paren = self.peek().kind == "("
        if paren:
            self.next()
        sign = 1
        if self.peek().kind == "-":
            self.next()
            sign = -1
        tok = self.peek()
        if tok.kind != "num":
            raise ParseError("expected an integer exponent", tok.pos)
        self.next()
        if tok.value != int(tok.value):
            raise ParseError(f"non-integer exponent {tok.text}", tok.pos)
        if paren:
            self.expect(")")
        return sign * int(tok.value)

    def parse_atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return Constant(tok.value)
        if tok.kind == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "ident":
            self.next()
            name = tok.text
            if name == "i":
                return Constant(1j)
            if name in ("z", "x", "y"):
                return Variable(name)
            if name in _FUNCTIONS:
                self.expect("(")
                arg = self.parse_expr()
                self.expect(")")
                return _FUNCTIONS[name](arg)
            raise ParseError(f"unknown identifier {name!r}", tok.pos)
        raise ParseError(f"expected a value, found {tok.text or 'end of input'!r}", tok.pos)


def parse(src: str) -> Expr:
    """Parse source text into a tree, folding constant-only subtrees.

    Grammar (loosest to tightest binding):

        expr   = term { ("+" | "-") term }
        term   = factor { ("*" | "/") factor }
        factor = "-" factor | power
        power  = atom [ "^" integer ]
        atom   = number | "i" | "z" | "x" | "y" | ident "(" expr ")" | "(" expr ")"
        ident  = "exp" | "sin" | "cos" | "sinh" | "cosh"

    The complex variable z never mixes with the real pair x, y in one tree.
    Errors carry the byte offset of the offending token.
    """
    parser = _Parser(_tokenize(src))
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    tags = variables(node)
    if "z" in tags and tags & {"x", "y"}:
        raise ParseError("an expression may use either z or x/y, not both", 0)
    return node
