"""Exact arithmetic for Laurent rational functions with half-integer exponents.

Every variable ``x`` is represented internally by its square root ``t = x^(1/2)``,
so a half power of ``x`` is an ordinary integer power of ``t``.  Polynomials in
the ``t`` variables are python-flint ``fmpq_mpoly`` objects; a rational function
is stored as ``t^shift * num / den`` with

* ``num`` and ``den`` free of monomial factors,
* ``gcd(num, den) = 1``,
* ``den`` having leading coefficient 1 in the graded-lex order.

That canonical form makes structural equality exact.  ``QuadElem`` adds formal
square roots ``rho`` with ``rho^2 = D`` on top of ``RationalFn``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

import flint


class AlgebraError(Exception):
    """Base class for errors raised by the algebra layer."""


class DivisionByZero(AlgebraError, ZeroDivisionError):
    pass


class NonSquareSubstitution(AlgebraError):
    pass


class DiscriminantMismatch(AlgebraError):
    pass


class ParseError(AlgebraError, ValueError):
    pass


# ---------------------------------------------------------------------------
# Variable registry and flint contexts
# ---------------------------------------------------------------------------

_CHUNK = 16
_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")


class VarTable:
    """Append-only table of variable names.

    Indices never change once assigned, so polynomials built early stay valid
    when later computations register more variables.
    """

    def __init__(self):
        self.names: list[str] = []
        self._index: dict[str, int] = {}

    def index(self, name: str) -> int:
        i = self._index.get(name)
        if i is None:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid variable name {name!r}")
            i = len(self.names)
            self.names.append(name)
            self._index[name] = i
        return i

    def lookup(self, name: str):
        return self._index.get(name)

    def __len__(self):
        return len(self.names)

    def __contains__(self, name):
        return name in self._index


VARS = VarTable()


@lru_cache(maxsize=None)
def _ctx(cap: int):
    return flint.fmpq_mpoly_ctx.get(tuple(f"t{i}" for i in range(cap)), "deglex")


def _cap_for(n: int) -> int:
    return max(_CHUNK, -(-n // _CHUNK) * _CHUNK)


def _current_cap() -> int:
    return _cap_for(len(VARS))


def _lift(p, cap: int):
    if p.context().nvars() == cap:
        return p
    return p.project_to_context(_ctx(cap))


def _pad(shift: Tuple[int, ...], cap: int) -> Tuple[int, ...]:
    if len(shift) == cap:
        return shift
    return shift + (0,) * (cap - len(shift))


def _mono(ctx, exps: Sequence[int]):
    return ctx.from_dict({tuple(exps): 1})


def _one(cap):
    return _ctx(cap).from_dict({(0,) * cap: 1})


def _zero(cap):
    return _ctx(cap).from_dict({})


def _min_exps(p) -> Tuple[int, ...]:
    monoms = p.monoms()
    m = [int(v) for v in monoms[0]]
    for e in monoms[1:]:
        for i, v in enumerate(e):
            if v < m[i]:
                m[i] = int(v)
    return tuple(m)


Number = Union[int, Fraction]


def _to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq(int(c))


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


# ---------------------------------------------------------------------------
# RationalFn
# ---------------------------------------------------------------------------


class RationalFn:
    """Canonical ``t^shift * num / den`` over the rationals.

    ``shift`` holds doubled exponents of the original variables.
    """

    __slots__ = ("num", "den", "shift", "_hash")

    def __init__(self, num, den, shift, _canonical=False):
        if not _canonical:
            num, den, shift = _normalize(num, den, shift)
        self.num = num
        self.den = den
        self.shift = shift
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "RationalFn":
        cap = _current_cap()
        ctx = _ctx(cap)
        c = _to_fmpq(c)
        if c == 0:
            return cls(_zero(cap), _one(cap), (0,) * cap, True)
        return cls(ctx.from_dict({(0,) * cap: c}), _one(cap), (0,) * cap, True)

    @classmethod
    def var(cls, name: str) -> "RationalFn":
        i = VARS.index(name)
        cap = _current_cap()
        shift = [0] * cap
        shift[i] = 2
        return cls(_one(cap), _one(cap), tuple(shift), True)

    @classmethod
    def monomial(cls, exps: Mapping[str, Number], coeff: Number = 1) -> "RationalFn":
        """Monomial ``coeff * prod name^e``; exponents may be half-integers."""
        idx = {VARS.index(n): e for n, e in exps.items()}
        cap = _current_cap()
        shift = [0] * cap
        for i, e in idx.items():
            d = Fraction(e) * 2
            if d.denominator != 1:
                raise ValueError(f"exponent {e} is not a half-integer")
            shift[i] = int(d)
        c = _to_fmpq(Fraction(coeff))
        if c == 0:
            return cls.const(0)
        return cls(_ctx(cap).from_dict({(0,) * cap: c}), _one(cap), tuple(shift), True)

    # -- basic predicates ---------------------------------------------------
    @property
    def cap(self) -> int:
        return len(self.shift)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant() and not any(self.shift)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("not a constant")
        return _to_fraction(self.num.leading_coefficient())

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def is_monomial(self) -> bool:
        return self.den.is_one() and len(self.num) == 1

    def is_integral(self) -> bool:
        """True if every exponent of every term is an integer (no half powers)."""
        if any(s % 2 for s in self.shift):
            return False
        for p in (self.num, self.den):
            for e in p.monoms():
                if any(v % 2 for v in e):
                    return False
        return True

    def variables(self) -> set:
        used = set()
        for i, s in enumerate(self.shift):
            if s:
                used.add(i)
        for p in (self.num, self.den):
            for i, d in enumerate(p.degrees()):
                if d > 0:  # the zero polynomial reports degree -1
                    used.add(i)
        return {VARS.names[i] for i in used}

    def n_terms(self) -> int:
        return len(self.num)

    # -- coercion -----------------------------------------------------------
    def _lifted(self, cap):
        if cap == self.cap:
            return self.num, self.den, self.shift
        return _lift(self.num, cap), _lift(self.den, cap), _pad(self.shift, cap)

    @staticmethod
    def coerce(x) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        if isinstance(x, (int, Fraction, flint.fmpq)):
            return RationalFn.const(x)
        if isinstance(x, str):
            return parse(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RationalFn")

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, QuadElem):
            return NotImplemented
        o = RationalFn.coerce(other)
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        cap = max(self.cap, o.cap)
        n1, d1, s1 = self._lifted(cap)
        n2, d2, s2 = o._lifted(cap)
        ctx = _ctx(cap)
        m = tuple(min(a, b) for a, b in zip(s1, s2))
        e1 = tuple(a - c for a, c in zip(s1, m))
        e2 = tuple(b - c for b, c in zip(s2, m))
        if any(e1):
            n1 = n1 * _mono(ctx, e1)
        if any(e2):
            n2 = n2 * _mono(ctx, e2)
        if d1 == d2:
            num, den = n1 + n2, d1
        elif d1.is_one():
            num, den = n1 * d2 + n2, d2
        elif d2.is_one():
            num, den = n1 + n2 * d1, d1
        else:
            g = d1.gcd(d2)
            if g.is_one():
                num, den = n1 * d2 + n2 * d1, d1 * d2
            else:
                q1, q2 = d1 / g, d2 / g
                num, den = n1 * q2 + n2 * q1, d1 * q2
        return RationalFn(num, den, m)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den, self.shift, True)

    def __sub__(self, other):
        if isinstance(other, QuadElem):
            return NotImplemented
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other):
        return RationalFn.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, QuadElem):
            return NotImplemented
        o = RationalFn.coerce(other)
        if self.is_zero() or o.is_zero():
            return RationalFn.const(0)
        cap = max(self.cap, o.cap)
        n1, d1, s1 = self._lifted(cap)
        n2, d2, s2 = o._lifted(cap)
        shift = tuple(a + b for a, b in zip(s1, s2))
        if not d2.is_one():
            g = n1.gcd(d2)
            if not g.is_one():
                n1, d2 = n1 / g, d2 / g
        if not d1.is_one():
            g = n2.gcd(d1)
            if not g.is_one():
                n2, d1 = n2 / g, d1 / g
        num, den = n1 * n2, d1 * d2
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFn(num, den, shift, True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise DivisionByZero("division by the zero function")
        num, den = self.den, self.num
        lc = den.leading_coefficient()
        if lc != 1:
            num, den = num / lc, den / lc
        return RationalFn(num, den, tuple(-s for s in self.shift), True)

    def __truediv__(self, other):
        if isinstance(other, QuadElem):
            return NotImplemented
        return self * RationalFn.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RationalFn.coerce(other) * self.inverse()

    def __pow__(self, k):
        if isinstance(k, Fraction) and k.denominator == 2:
            return self.sqrt() ** int(k * 2)
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return RationalFn.const(1)
        return RationalFn(self.num ** k, self.den ** k, tuple(s * k for s in self.shift), True)

    def sqrt(self) -> "RationalFn":
        """Exact square root; raises NonSquareSubstitution if none exists.

        The branch returned has positive leading coefficient in the numerator.
        """
        if self.is_zero():
            return self
        if any(s % 2 for s in self.shift):
            raise NonSquareSubstitution("odd half-power in monomial factor")
        try:
            rn = self.num.sqrt()
            rd = self.den.sqrt()
        except Exception as exc:  # flint DomainError
            raise NonSquareSubstitution(f"not a perfect square: {self}") from exc
        if rn.leading_coefficient() < 0:
            rn = -rn
        if rd.leading_coefficient() < 0:
            rd = -rd
        return RationalFn(rn, rd, tuple(s // 2 for s in self.shift))

    # -- equality / hashing ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return other == self
        try:
            o = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        cap = max(self.cap, o.cap)
        n1, d1, s1 = self._lifted(cap)
        n2, d2, s2 = o._lifted(cap)
        if s1 == s2 and n1 == n2 and d1 == d2:
            return True
        # cross-multiplication fallback (only reached for non-canonical input)
        return (self - o).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.to_str())
        return self._hash

    # -- calculus -------------------------------------------------------------
    def euler_numerator(self, i: int):
        """Return polynomial ``A`` with ``E_i f = t^shift * A / (2 den^2)``."""
        cap = self.cap
        if i >= cap:
            return _zero(cap)
        ctx = _ctx(cap)
        n, d = self.num, self.den
        tn = n.derivative(i) * ctx.gen(i) if n.degrees()[i] else None
        s = self.shift[i]
        if d.is_one():
            out = tn if tn is not None else _zero(cap)
            if s:
                out = out + n * s
            return out
        td = d.derivative(i) * ctx.gen(i) if d.degrees()[i] else None
        out = _zero(cap)
        if s:
            out = n * d * s
        if tn is not None:
            out = out + tn * d
        if td is not None:
            out = out - n * td
        return out

    def euler_derive(self, v: str) -> "RationalFn":
        """``v * d/dv`` applied to self."""
        i = VARS.index(v)
        f = self
        if i >= f.cap:
            return RationalFn.const(0)
        a = f.euler_numerator(i)
        if a.is_zero():
            return RationalFn.const(0)
        return RationalFn(a, f.den * f.den * 2, f.shift)

    # -- substitution -----------------------------------------------------------
    def substitute(self, sigma: Mapping[str, "RationalFn"]) -> "RationalFn":
        return _substitute(self, {k: RationalFn.coerce(v) for k, v in sigma.items()})

    # -- evaluation -------------------------------------------------------------
    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        """Exact value; half powers need a rational square root of the value."""
        sigma = {}
        for name in self.variables():
            if name not in point:
                raise KeyError(f"no value for {name}")
            sigma[name] = RationalFn.const(Fraction(point[name]))
        val = self.substitute(sigma)
        return val.constant_value()

    def evaluate_float(self, point: Mapping[str, float]) -> float:
        cap = self.cap
        tvals = [0.0] * cap
        for i in range(min(cap, len(VARS))):
            name = VARS.names[i]
            if name in point:
                tvals[i] = math.sqrt(float(point[name]))

        def ev(p):
            tot = 0.0
            for e, c in p.terms():
                term = float(c.p) / float(c.q)
                for j, k in enumerate(e):
                    if k:
                        term *= tvals[j] ** k
                tot += term
            return tot

        mono = 1.0
        for j, s in enumerate(self.shift):
            if s:
                mono *= tvals[j] ** s
        return mono * ev(self.num) / ev(self.den)

    # -- term access --------------------------------------------------------------
    def laurent_terms(self) -> Dict[Tuple[Tuple[str, Fraction], ...], Fraction]:
        """Map from sorted (name, exponent) tuples to coefficients (Laurent only)."""
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        return _poly_terms(self.num, self.shift)

    def numerator(self) -> "RationalFn":
        return RationalFn(self.num, _one(self.cap), self.shift, True)

    def denominator(self) -> "RationalFn":
        return RationalFn(self.den, _one(self.cap), (0,) * self.cap, True)

    # -- printing ---------------------------------------------------------------
    def to_str(self) -> str:
        if self.is_zero():
            return "0"
        top = _poly_str(self.num, self.shift)
        if self.den.is_one():
            return top
        bottom = _poly_str(self.den, (0,) * self.cap)
        return f"({top})/({bottom})"

    __str__ = to_str

    def __repr__(self):
        return f"RationalFn({self.to_str()!r})"


def _normalize(num, den, shift):
    cap = max(num.context().nvars(), den.context().nvars(), _cap_for(len(shift)))
    num, den = _lift(num, cap), _lift(den, cap)
    shift = _pad(tuple(shift), cap)
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    if num.is_zero():
        return _zero(cap), _one(cap), (0,) * cap
    ctx = _ctx(cap)
    shift = list(shift)
    for p, sgn in ((num, 1), (den, -1)):
        m = _min_exps(p)
        if any(m):
            for i, v in enumerate(m):
                shift[i] += sgn * v
            if sgn == 1:
                num = num / _mono(ctx, m)
            else:
                den = den / _mono(ctx, m)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num, den = num / g, den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num, den = num / lc, den / lc
    return num, den, tuple(shift)


def _exp_str(d: int) -> str:
    if d % 2 == 0:
        e = d // 2
        return "" if e == 1 else f"^{e}" if e > 0 else f"^({e})"
    return f"^({d}/2)"


def _poly_terms(p, shift):
    out = {}
    for e, c in p.terms():
        key = []
        for i, v in enumerate(e):
            tot = int(v) + (shift[i] if i < len(shift) else 0)
            if tot:
                key.append((VARS.names[i], Fraction(tot, 2)))
        for i in range(len(e), len(shift)):
            if shift[i]:
                key.append((VARS.names[i], Fraction(shift[i], 2)))
        out[tuple(sorted(key))] = _to_fraction(c)
    return out


def _term_sort_key(item):
    key, _ = item
    deg = sum(e for _, e in key)
    return (-deg, [(n, -e) for n, e in key])


def _poly_str(p, shift) -> str:
    terms = sorted(_poly_terms(p, shift).items(), key=_term_sort_key)
    parts = []
    for key, c in terms:
        factors = []
        for name, e in key:
            d = int(e * 2)
            factors.append(name + _exp_str(d))
        mono = "*".join(factors)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{a}*{mono}"
        else:
            body = str(a)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------


def _substitute(f: RationalFn, sigma: Dict[str, RationalFn]) -> RationalFn:
    if f.is_zero():
        return f
    cap = f.cap
    active = {}
    for name, img in sigma.items():
        i = VARS.lookup(name)
        if i is not None and i < cap:
            active[i] = img
    used = set()
    for p in (f.num, f.den):
        for i, d in enumerate(p.degrees()):
            if d > 0:
                used.add(i)
    used |= {i for i, s in enumerate(f.shift) if s}
    active = {i: img for i, img in active.items() if i in used}
    if not active:
        return f
    # Decide for every substituted variable whether its t-exponents are all even.
    even = {}
    for i in active:
        ev = f.shift[i] % 2 == 0
        if ev:
            for p in (f.num, f.den):
                if p.degrees()[i] and any(e[i] % 2 for e in p.monoms()):
                    ev = False
                    break
        even[i] = ev
    # image of the generator actually used (x_i for even, t_i = sqrt(x_i) for odd)
    gen_img = {}
    for i, img in active.items():
        if even[i]:
            gen_img[i] = img
        else:
            try:
                gen_img[i] = img.sqrt()
            except NonSquareSubstitution as exc:
                raise NonSquareSubstitution(
                    f"half power of {VARS.names[i]} -> {img} needs a square root"
                ) from exc
    out_cap = max([cap] + [g.cap for g in gen_img.values()] + [_current_cap()])

    def image_of_poly(p):
        """Return (numerator poly, denominator poly) in context out_cap."""
        degs = p.degrees()
        order = sorted(active)
        hdeg = {}
        for i in order:
            d = degs[i]
            hdeg[i] = d // 2 if even[i] else d
        # homogenize: one extra variable z_i per substituted variable
        zidx = {i: cap + k for k, i in enumerate(order)}
        hcap = cap + len(order)
        hctx = flint.fmpq_mpoly_ctx.get(tuple(f"t{j}" for j in range(hcap)), "deglex")
        hd = {}
        for e, c in p.terms():
            ne = list(e) + [0] * len(order)
            for i in order:
                k = e[i] // 2 if even[i] else e[i]
                ne[i] = k
                ne[zidx[i]] = hdeg[i] - k
            hd[tuple(ne)] = c
        h = hctx.from_dict(hd)
        octx = _ctx(out_cap)
        args = [octx.gen(j) for j in range(cap)]
        zargs = []
        denom = _one(out_cap)
        for i in order:
            g = gen_img[i]
            gn, gd, gs = g._lifted(out_cap)
            pos = tuple(max(v, 0) for v in gs)
            neg = tuple(max(-v, 0) for v in gs)
            top = gn * _mono(octx, pos) if any(pos) else gn
            bot = gd * _mono(octx, neg) if any(neg) else gd
            args[i] = top
            zargs.append(bot)
            if hdeg[i]:
                denom = denom * bot ** hdeg[i]
        val = h.compose(*(args + zargs), ctx=octx)
        return val, denom

    nn, nd = image_of_poly(f.num)
    dn, dd = image_of_poly(f.den)
    if dn.is_zero():
        raise DivisionByZero("denominator vanishes under substitution")
    # monomial shift of f: product of images raised to shift
    mono = RationalFn(_one(out_cap), _one(out_cap), (0,) * out_cap, True)
    rest = [0] * cap
    for i, s in enumerate(f.shift):
        if not s:
            continue
        if i in active:
            k = s // 2 if even[i] else s
            mono = mono * gen_img[i] ** k
        else:
            rest[i] = s
    body = RationalFn(nn * dd, nd * dn, _pad(tuple(rest), out_cap))
    return body * mono


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_']*)|(\*\*|[-+*/^()]))")


def _tokenize(s: str):
    pos = 0
    out = []
    s = s.strip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {s[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            out.append(("num", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op))
        while pos < len(s) and s[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val and tok[1] != val):
            raise ParseError(f"expected {val or kind}, got {tok[1]!r}")
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            f = self.factor()
            acc = acc * f if op == "*" else acc / f
        return acc

    def exponent(self):
        if self.peek() == ("op", "("):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            p = self.take("num")[1]
            q = 1
            if self.peek() == ("op", "/"):
                self.take()
                q = self.take("num")[1]
            self.take("op", ")")
            return Fraction(sign * p, q)
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        return Fraction(sign * self.take("num")[1])

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.factor()
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            e = self.exponent()
            if e.denominator == 1:
                return base ** int(e)
            if e.denominator != 2:
                raise ParseError("only half-integer exponents are supported")
            if not base.is_monomial():
                raise ParseError("half powers are only allowed on monomials")
            return base.sqrt_monomial() ** int(e * 2)
        return base

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return RationalFn.const(val)
        if kind == "name":
            self.take()
            return RationalFn.var(val)
        if (kind, val) == ("op", "("):
            self.take()
            e = self.expr()
            self.take("op", ")")
            return e
        raise ParseError(f"unexpected token {val!r}")


def _sqrt_monomial(self: RationalFn) -> RationalFn:
    """Square root of a monomial with positive square coefficient (half exponents)."""
    if not self.is_monomial():
        raise NonSquareSubstitution("not a monomial")
    c = _to_fraction(self.num.leading_coefficient())
    if c < 0:
        raise NonSquareSubstitution("negative coefficient")
    rp, rq = math.isqrt(c.numerator), math.isqrt(c.denominator)
    if rp * rp != c.numerator or rq * rq != c.denominator:
        raise NonSquareSubstitution("coefficient is not a rational square")
    cap = self.cap
    # halve doubled exponents: an odd doubled exponent is a quarter power
    total = [s + int(e) for s, e in zip(self.shift, self.num.monoms()[0])]
    if any(v % 2 for v in total):
        raise NonSquareSubstitution("quarter powers are not representable")
    return RationalFn(
        _ctx(cap).from_dict({(0,) * cap: flint.fmpq(rp, rq)}),
        _one(cap),
        tuple(v // 2 for v in total),
        True,
    )


RationalFn.sqrt_monomial = _sqrt_monomial


def parse(text: str) -> RationalFn:
    """Parse the canonical text grammar (also accepts ``**`` for ``^``)."""
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty expression")
    e = p.expr()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input at token {p.i}")
    return e


def var(name: str) -> RationalFn:
    return RationalFn.var(name)


def const(c) -> RationalFn:
    return RationalFn.const(c)


def variables(*names: str):
    return tuple(RationalFn.var(n) for n in names)


# ---------------------------------------------------------------------------
# spec-level operation helpers
# ---------------------------------------------------------------------------


def arith(f, g, op: str):
    """Apply ``op`` in {add, sub, mul, div} to two expressions."""
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        if (isinstance(g, RationalFn) and g.is_zero()) or (isinstance(g, QuadElem) and g.is_zero()):
            raise DivisionByZero("division by the zero function")
        return f / g
    raise ValueError(f"unknown op {op!r}")


def euler_derive(f, v: str):
    return f.euler_derive(v)


def substitute(f, sigma: Mapping[str, object]):
    return f.substitute(sigma)


def normalize(f: RationalFn) -> RationalFn:
    return RationalFn(f.num, f.den, f.shift)


# ---------------------------------------------------------------------------
# Quadratic extensions
# ---------------------------------------------------------------------------

Key = frozenset


class QuadElem:
    """Element of Q(vars)[rho_1, ..., rho_k] with rho_r^2 = D_r.

    ``terms`` maps a frozenset of radical names to its RationalFn coefficient.
    Almost all uses need a single radical; ``base``, ``rad`` and ``disc`` give
    the ``base + rad * rho`` view in that case.
    """

    __slots__ = ("terms", "discs")

    def __init__(self, terms: Mapping[frozenset, RationalFn], discs: Mapping[str, RationalFn]):
        self.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        used = set().union(*self.terms) if self.terms else set()
        self.discs = {r: discs[r] for r in sorted(discs) if r in used}

    # -- constructors ---------------------------------------------------------
    @classmethod
    def radical(cls, name: str, disc) -> "QuadElem":
        return cls({Key([name]): RationalFn.const(1)}, {name: RationalFn.coerce(disc)})

    @classmethod
    def lift(cls, x) -> "QuadElem":
        if isinstance(x, QuadElem):
            return x
        return cls({Key(): RationalFn.coerce(x)}, {})

    @classmethod
    def make(cls, base, rad, name: str, disc) -> "QuadElem":
        """``base + rad * sqrt(disc)``."""
        return cls.lift(base) + cls.lift(rad) * cls.radical(name, disc)

    # -- views ------------------------------------------------------------------
    def _single(self):
        if len(self.discs) > 1:
            raise ValueError("element involves more than one radical")
        return next(iter(self.discs), None)

    @property
    def base(self) -> RationalFn:
        return self.terms.get(Key(), RationalFn.const(0))

    @property
    def rad(self) -> RationalFn:
        r = self._single()
        return self.terms.get(Key([r]), RationalFn.const(0)) if r else RationalFn.const(0)

    @property
    def disc(self):
        r = self._single()
        return self.discs[r] if r else None

    def is_zero(self) -> bool:
        return not self.terms

    def is_rational(self) -> bool:
        return all(not k for k in self.terms)

    def to_rational(self) -> RationalFn:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.base

    # -- arithmetic ---------------------------------------------------------------
    @staticmethod
    def _merge_discs(a: Mapping, b: Mapping) -> dict:
        out = dict(a)
        for r, d in b.items():
            if r in out and out[r] != d:
                raise DiscriminantMismatch(f"radical {r} bound to two discriminants")
            out[r] = d
        return out

    def __add__(self, other):
        o = QuadElem.lift(other)
        discs = self._merge_discs(self.discs, o.discs)
        terms = dict(self.terms)
        for k, v in o.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return QuadElem(terms, discs)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem({k: -v for k, v in self.terms.items()}, self.discs)

    def __sub__(self, other):
        return self + (-QuadElem.lift(other))

    def __rsub__(self, other):
        return QuadElem.lift(other) - self

    def __mul__(self, other):
        o = QuadElem.lift(other)
        discs = self._merge_discs(self.discs, o.discs)
        terms: Dict[frozenset, RationalFn] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                c = v1 * v2
                for r in k1 & k2:
                    c = c * discs[r]
                k = k1 ^ k2
                terms[k] = terms[k] + c if k in terms else c
        return QuadElem(terms, discs)

    __rmul__ = __mul__

    def conjugate(self, r: str) -> "QuadElem":
        return QuadElem({k: (-v if r in k else v) for k, v in self.terms.items()}, self.discs)

    def inverse(self) -> "QuadElem":
        if self.is_zero():
            raise DivisionByZero("division by the zero element")
        num = QuadElem.lift(1)
        den = self
        for r in list(self.discs):
            c = den.conjugate(r)
            num = num * c
            den = den * c
        d = den.to_rational()
        if d.is_zero():
            raise DivisionByZero("norm of element vanishes")
        return num * QuadElem.lift(d.inverse())

    def __truediv__(self, other):
        return self * QuadElem.lift(other).inverse()

    def __rtruediv__(self, other):
        return QuadElem.lift(other) * self.inverse()

    def __pow__(self, k: int):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadElem.lift(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, (QuadElem, RationalFn, int, Fraction)):
            return NotImplemented
        return (self - QuadElem.lift(other)).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((tuple(sorted(k)), hash(v)) for k, v in self.terms.items())))

    # -- calculus / substitution ----------------------------------------------------
    def euler_derive(self, v: str) -> "QuadElem":
        out = QuadElem.lift(0)
        for k, c in self.terms.items():
            dc = c.euler_derive(v)
            piece = QuadElem({k: dc}, self.discs) if not dc.is_zero() else QuadElem.lift(0)
            for r in k:
                dd = self.discs[r].euler_derive(v)
                if dd.is_zero():
                    continue
                piece = piece + QuadElem({k: c * dd / (self.discs[r] * 2)}, self.discs)
            out = out + piece
        return out

    def substitute(self, sigma) -> "QuadElem":
        discs = {r: d.substitute(sigma) for r, d in self.discs.items()}
        return QuadElem({k: v.substitute(sigma) for k, v in self.terms.items()}, discs)

    def replace_radical(self, r: str, value) -> "QuadElem":
        """Replace rho_r by ``value`` (a QuadElem or RationalFn squaring to D_r)."""
        value = QuadElem.lift(value)
        if value * value != QuadElem.lift(self.discs[r]):
            raise DiscriminantMismatch(f"replacement for {r} does not square to its discriminant")
        out = QuadElem.lift(0)
        rest = {q: d for q, d in self.discs.items() if q != r}
        for k, c in self.terms.items():
            piece = QuadElem({k - {r}: c}, rest)
            if r in k:
                piece = piece * value
            out = out + piece
        return out

    def evaluate_float(self, point: Mapping[str, float], signs: Mapping[str, int] | None = None) -> float:
        signs = signs or {}
        roots = {}
        for r, d in self.discs.items():
            dv = d.evaluate_float(point)
            roots[r] = signs.get(r, 1) * math.sqrt(dv)
        tot = 0.0
        for k, c in self.terms.items():
            term = c.evaluate_float(point)
            for r in k:
                term *= roots[r]
            tot += term
        return tot

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda s: (len(s), sorted(s))):
            c = self.terms[k]
            if not k:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*" + "*".join(f"sqrt({r})" for r in sorted(k)))
        return " + ".join(parts)

    __repr__ = __str__


def quad_mul(u: QuadElem, v: QuadElem) -> QuadElem:
    """Product in a shared quadratic extension; mismatched discriminants raise."""
    u, v = QuadElem.lift(u), QuadElem.lift(v)
    for r in set(u.discs) & set(v.discs):
        if u.discs[r] != v.discs[r]:
            raise DiscriminantMismatch(f"radical {r} has different discriminants")
    if u.discs and v.discs and set(u.discs) != set(v.discs):
        raise DiscriminantMismatch("elements live in different quadratic extensions")
    return u * v


Scalar = Union[RationalFn, QuadElem]


def as_scalar(x) -> Scalar:
    if isinstance(x, (RationalFn, QuadElem)):
        return x
    return RationalFn.coerce(x)


def is_zero(x) -> bool:
    return x.is_zero()
