"""Ribbon graphs, shear-coordinate holonomies and geodesic functions.

A ribbon graph is stored as a map from vertex name to the anticlockwise
cyclic list of incident edges.  Every edge carries a shear variable.  A path
that arrives at a vertex along edge ``a`` and leaves along edge ``b`` turns
right (matrix R) when ``b`` is the anticlockwise successor of ``a`` and left
(matrix L) when it is the predecessor; traversing edge t contributes X_t.
Products are taken in path order.

For the graphs Gamma_n the slanted ("vertical") edges are x1..xn and the two
horizontal chains are y1..y_{n-3} (top, west to east) and
y_{n-2}..y_{2n-6} (bottom, west to east).  Basepoint S1 sits on x1 next to
the top-left vertex, S2 on xn next to the bottom-left vertex, and F_i is the
holonomy of the unique turning path from S1 down x_i to S2.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from pathlib import Path as _FsPath
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .algebra import QuadElem, RationalFn, as_scalar, var
from .quiver import Quiver
from .report import VerificationReport


class RibbonError(Exception):
    """Base class for ribbon-graph errors."""


class InvalidN(RibbonError, ValueError):
    pass


class InvalidPath(RibbonError, ValueError):
    pass


class InvalidIndex(RibbonError, IndexError):
    pass


class EvenN(RibbonError, ValueError):
    pass


# -- 2x2 matrices --------------------------------------------------------------


class Mat2:
    """2x2 matrix over RationalFn (or QuadElem)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (as_scalar(x) for x in (a, b, c, d))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1, 0, 0, 1)

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def inverse(self) -> "Mat2":
        dt = self.det()
        inv = dt.inverse()
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def substitute(self, sigma) -> "Mat2":
        return Mat2(*(x.substitute(sigma) for x in self.entries()))

    def __eq__(self, o):
        return isinstance(o, Mat2) and all(x == y for x, y in zip(self.entries(), o.entries()))

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


L = Mat2(0, 1, -1, -1)
R = Mat2(1, 1, -1, 0)


def x_matrix(s) -> Mat2:
    """Edge matrix X_s = [[0, -s^(1/2)], [s^(-1/2), 0]] for exponential shear s.

    With this orientation L X_s = [[s^(-1/2), 0], [-s^(-1/2), s^(1/2)]] and
    tr(F_2^{-1} F_1) on Gamma_5 is <x1 x2>.
    """
    s = as_scalar(var(s) if isinstance(s, str) else s)
    h = s ** Fraction(1, 2)
    return Mat2(0, -h, h.inverse(), 0)


def l_mat(s) -> Mat2:
    """L_s = L X_s."""
    return L * x_matrix(s)


def r_mat(s) -> Mat2:
    """R_s = R X_s."""
    return R * x_matrix(s)


def product(mats: Iterable[Mat2]) -> Mat2:
    out = Mat2.identity()
    for m in mats:
        out = out * m
    return out


# -- ribbon graphs ---------------------------------------------------------------


class RibbonGraph:
    """Fat graph: anticlockwise edge order at each vertex plus edge labels."""

    def __init__(self, vertices: Mapping[str, Sequence[str]], labels: Optional[Mapping[str, str]] = None,
                 name: str = "ribbon"):
        self.name = name
        self.order: Dict[str, Tuple[str, ...]] = {v: tuple(es) for v, es in vertices.items()}
        count: Dict[str, int] = {}
        for es in self.order.values():
            for e in es:
                count[e] = count.get(e, 0) + 1
        bad = [e for e, c in count.items() if c != 2]
        if bad:
            raise RibbonError(f"edges must have exactly two ends: {bad}")
        self.edges: List[str] = sorted(count, key=_natural_key)
        self.labels: Dict[str, str] = {e: e for e in self.edges}
        if labels:
            self.labels.update(labels)

    # half-edges are (vertex, slot)
    def half_edges(self) -> List[Tuple[str, int]]:
        return [(v, i) for v, es in self.order.items() for i in range(len(es))]

    def alpha(self, h: Tuple[str, int]) -> Tuple[str, int]:
        v, i = h
        e = self.order[v][i]
        for w, es in self.order.items():
            for j, f in enumerate(es):
                if f == e and (w, j) != (v, i):
                    return (w, j)
        raise RibbonError("unpaired half-edge")

    def sigma(self, h: Tuple[str, int]) -> Tuple[str, int]:
        v, i = h
        return (v, (i + 1) % len(self.order[v]))

    def boundary_components(self) -> int:
        """Number of faces: orbits of sigma after alpha."""
        seen = set()
        faces = 0
        for h in self.half_edges():
            if h in seen:
                continue
            faces += 1
            x = h
            while x not in seen:
                seen.add(x)
                x = self.sigma(self.alpha(x))
        return faces

    def genus(self) -> int:
        chi = len(self.order) - len(self.edges) + self.boundary_components()
        return (2 - chi) // 2

    def is_trivalent(self) -> bool:
        return all(len(es) == 3 for es in self.order.values())

    def turn(self, v: str, a: str, b: str) -> Mat2:
        es = self.order[v]
        if a not in es or b not in es:
            raise InvalidPath(f"edges {a}, {b} do not both meet vertex {v}")
        if a == b:
            raise InvalidPath(f"U-turn on edge {a} at {v}")
        k = len(es)
        p = es.index(a)
        if es[(p + 1) % k] == b:
            return R
        if es[(p - 1) % k] == b:
            return L
        raise InvalidPath(f"edges {a}, {b} are not adjacent at {v}")

    def edge_matrix(self, e: str) -> Mat2:
        return x_matrix(self.labels[e])

    def to_text(self) -> str:
        lines = [f"ribbon {self.name}"]
        for v, es in self.order.items():
            lines.append("vertex " + v + " " + " ".join(es))
        for e in self.edges:
            lines.append(f"edge {e} {self.labels[e]}")
        return "\n".join(lines) + "\n"


def _natural_key(s: str):
    import re
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", s)]


def parse_ribbon(text: str) -> RibbonGraph:
    name = "ribbon"
    verts: Dict[str, List[str]] = {}
    labels: Dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "ribbon":
            name = tok[1] if len(tok) > 1 else name
        elif tok[0] == "vertex" and len(tok) >= 3:
            verts[tok[1]] = tok[2:]
        elif tok[0] == "edge" and len(tok) == 3:
            labels[tok[1]] = tok[2]
        else:
            raise RibbonError(f"cannot parse line: {raw!r}")
    return RibbonGraph(verts, labels, name)


def load_ribbon(path) -> RibbonGraph:
    return parse_ribbon(_FsPath(path).read_text())


# -- Gamma_n ----------------------------------------------------------------------


def gamma_n(n: int) -> RibbonGraph:
    """The ribbon graph Gamma_n with 3n - 6 edges."""
    if not isinstance(n, int) or n < 3:
        raise InvalidN(f"Gamma_n needs n >= 3, got {n}")
    m = n - 2
    verts: Dict[str, List[str]] = {}
    for j in range(1, m + 1):
        east = f"y{j}" if j < m else f"x{n}"
        west = f"y{j - 1}" if j > 1 else "x1"
        verts[f"T{j}"] = [east, west, f"x{j + 1}"]
    for j in range(1, m + 1):
        east = f"y{n - 3 + j}" if j < m else "x1"
        west = f"y{n - 4 + j}" if j > 1 else f"x{n}"
        verts[f"B{j}"] = [east, f"x{n - j}", west]
    return RibbonGraph(verts, name=f"gamma{n}")


def _gamma_size(G: RibbonGraph) -> int:
    return sum(1 for e in G.edges if e.startswith("x"))


def f_path(G: RibbonGraph, i: int) -> Tuple[List[str], List[str]]:
    """Edges and vertices of the S1 -> S2 path through slanted edge i."""
    n = _gamma_size(G)
    if not 1 <= i <= n:
        raise InvalidIndex(f"slanted index {i} outside 1..{n}")
    m = n - 2
    if i == 1:
        edges = ["x1"] + [f"y{n - 4 + j}" for j in range(m, 1, -1)] + [f"x{n}"]
        verts = [f"B{j}" for j in range(m, 0, -1)]
    elif i == n:
        edges = ["x1"] + [f"y{j}" for j in range(1, m)] + [f"x{n}"]
        verts = [f"T{j}" for j in range(1, m + 1)]
    else:
        top = [f"y{j}" for j in range(1, i - 1)]
        b = n - i
        bottom = [f"y{n - 4 + j}" for j in range(b, 1, -1)]
        edges = ["x1"] + top + [f"x{i}"] + bottom + [f"x{n}"]
        verts = [f"T{j}" for j in range(1, i)] + [f"B{j}" for j in range(b, 0, -1)]
    return edges, verts


def walk_holonomy(G: RibbonGraph, edges: Sequence[str], verts: Sequence[str],
                  full_first: bool, full_last: bool) -> Mat2:
    """Holonomy of an open walk e0 v0 e1 v1 ... e_k with given endpoint policy."""
    if len(edges) != len(verts) + 1:
        raise InvalidPath("walk needs one more edge than vertices")
    mats = []
    for k, v in enumerate(verts):
        if k > 0 or full_first:
            mats.append(G.edge_matrix(edges[k]))
        mats.append(G.turn(v, edges[k], edges[k + 1]))
    if full_last:
        mats.append(G.edge_matrix(edges[-1]))
    return product(mats)


def f_operator(G: RibbonGraph, i: int) -> Mat2:
    """F_i: holonomy from S1 to S2 through slanted edge i."""
    edges, verts = f_path(G, i)
    n = _gamma_size(G)
    return walk_holonomy(G, edges, verts, full_first=(i == 1), full_last=(i == n))


def f_word(G: RibbonGraph, i: int) -> List[str]:
    """Symbolic L/R/X form of F_i, e.g. ['L', 'X5', 'R', 'X3', 'R']."""
    edges, verts = f_path(G, i)
    n = _gamma_size(G)
    out = []
    for k, v in enumerate(verts):
        if k > 0 or i == 1:
            out.append("X" + G.labels[edges[k]])
        out.append("R" if G.turn(v, edges[k], edges[k + 1]) is R else "L")
    if i == n:
        out.append("X" + G.labels[edges[-1]])
    return out


# -- loop words ---------------------------------------------------------------------


class LoopWord:
    """A closed loop: explicit (edge, arriving vertex) cycle or a hat word.

    Hat words are sequences of (index, direction) with direction 'up' or
    'down'.  Text tokens: ``3^`` is up through x3, ``3_`` is down.
    """

    def __init__(self, path: Optional[Sequence[Tuple[str, str]]] = None,
                 hat: Optional[Sequence[Tuple[int, str]]] = None):
        if (path is None) == (hat is None):
            raise InvalidPath("give exactly one of path or hat")
        self.path = list(path) if path is not None else None
        self.hat = [(int(i), d) for i, d in hat] if hat is not None else None
        if self.hat is not None:
            if not self.hat:
                raise InvalidPath("empty hat word")
            for k, (_, d) in enumerate(self.hat):
                if d not in ("up", "down"):
                    raise InvalidPath(f"bad direction {d}")
                if self.hat[k - 1][1] == d and len(self.hat) > 1:
                    raise InvalidPath("hat word directions must alternate")

    @classmethod
    def parse(cls, text: str) -> "LoopWord":
        toks = text.split()
        hat = []
        for t in toks:
            if t.endswith("^"):
                hat.append((int(t[:-1]), "up"))
            elif t.endswith("_"):
                hat.append((int(t[:-1]), "down"))
            else:
                raise InvalidPath(f"bad loop token {t!r}")
        return cls(hat=hat)

    @classmethod
    def hat_word(cls, indices: Sequence[int], first_up: bool = True) -> "LoopWord":
        """(i1 i2 ... ) with alternating directions; first letter up or down."""
        dirs = ("up", "down") if first_up else ("down", "up")
        return cls(hat=[(i, dirs[k % 2]) for k, i in enumerate(indices)])

    def rotations(self) -> List["LoopWord"]:
        seq = self.hat if self.hat is not None else self.path
        out = []
        for k in range(len(seq)):
            r = seq[k:] + seq[:k]
            out.append(LoopWord(hat=r) if self.hat is not None else LoopWord(path=r))
        return out

    def normalized(self) -> "LoopWord":
        """Alphabetically minimal cyclic rotation (hat words only)."""
        if self.hat is None:
            return self
        best = min(self.rotations(), key=lambda w: w.hat)
        return best

    def to_text(self) -> str:
        if self.hat is None:
            return " ".join(f"{e}@{v}" for e, v in self.path)
        return " ".join(f"{i}{'^' if d == 'up' else '_'}" for i, d in self.hat)

    def __repr__(self):
        return f"LoopWord({self.to_text()!r})"


def holonomy(G: RibbonGraph, loop: LoopWord) -> Mat2:
    """Holonomy matrix of a closed loop (determinant 1)."""
    if loop.path is not None:
        p = loop.path
        if not p:
            return Mat2.identity()
        mats = []
        for k, (e, v) in enumerate(p):
            nxt = p[(k + 1) % len(p)][0]
            if v not in G.order or e not in G.order[v]:
                raise InvalidPath(f"edge {e} does not end at {v}")
            mats.append(G.edge_matrix(e))
            mats.append(G.turn(v, e, nxt))
        return product(mats)
    n = _gamma_size(G)
    mats = []
    cache: Dict[int, Mat2] = {}
    for i, d in loop.hat:
        if not 1 <= i <= n:
            raise InvalidPath(f"slanted index {i} outside 1..{n}")
        if i not in cache:
            cache[i] = f_operator(G, i)
        mats.append(cache[i].inverse() if d == "up" else cache[i])
    return product(mats)


_ONES_CACHE: Dict[str, int] = {}


def positive_sign(expr) -> int:
    """Sign of an expression at the point where every variable equals 1."""
    vs = expr.variables()
    val = expr.evaluate({v: 1 for v in vs}) if vs else expr.constant_value()
    if val == 0:
        raise RibbonError("expression vanishes at the all-ones point; sign undetermined")
    return 1 if val > 0 else -1


def geodesic(G: RibbonGraph, loop: LoopWord):
    """Geodesic function: trace of the holonomy on its positive branch."""
    t = holonomy(G, loop).trace()
    return t * positive_sign(t)


def gij(G: RibbonGraph, i: int, j: int):
    """G_ij = tr(F_j^{-1} F_i), positive branch; G_ii = 2."""
    if i == j:
        return RationalFn.const(2)
    t = (f_operator(G, j).inverse() * f_operator(G, i)).trace()
    return t * positive_sign(t)


def geodesic_table(G: RibbonGraph) -> List[List[RationalFn]]:
    """Symmetric n x n table (0-based) of G_ij."""
    n = _gamma_size(G)
    F = [f_operator(G, i) for i in range(1, n + 1)]
    Finv = [f.inverse() for f in F]
    T = [[RationalFn.const(2) if i == j else None for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            t = (Finv[j] * F[i]).trace()
            t = t * positive_sign(t)
            T[i][j] = T[j][i] = t
    return T


# -- angle bracket, Goldman quiver ----------------------------------------------------


def angle_bracket(zs: Sequence) -> RationalFn:
    """<z1 ... zn> = (z1...zn)^(1/2) (1 + 1/z1 + 1/(z1 z2) + ... + 1/(z1...zn))."""
    zs = [as_scalar(var(z) if isinstance(z, str) else z) for z in zs]
    if not zs:
        raise ValueError("angle bracket needs at least one entry")
    prod = RationalFn.const(1)
    tail = RationalFn.const(1)
    partial = RationalFn.const(1)
    for z in zs:
        prod = prod * z
        partial = partial * z
        tail = tail + partial.inverse()
    return prod.sqrt_monomial() * tail


def goldman_quiver(G: RibbonGraph) -> Quiver:
    """Quiver of adjacency indices: +1 from an edge to its anticlockwise successor."""
    labels = [G.labels[e] for e in G.edges]
    idx = {e: k for k, e in enumerate(G.edges)}
    n = len(labels)
    wd = [[0] * n for _ in range(n)]
    for v, es in G.order.items():
        k = len(es)
        for p in range(k):
            a, b = idx[es[p]], idx[es[(p + 1) % k]]
            if a == b:
                continue
            wd[a][b] += 2
            wd[b][a] -= 2
    return Quiver(labels, wd)


# -- Markov function, skein ------------------------------------------------------------


def cyclic_product_sum(table, n: int, k: int):
    """G^(k): sum over i1<...<ik of G_{i1 i2} G_{i2 i3} ... G_{ik i1} (k >= 3); sum of squares for k = 2."""
    total = RationalFn.const(0)
    if k == 2:
        for i, j in combinations(range(n), 2):
            total = total + table[i][j] * table[i][j]
        return total
    for c in combinations(range(n), k):
        term = RationalFn.const(1)
        for a in range(k):
            term = term * table[c[a]][c[(a + 1) % k]]
        total = total + term
    return total


def markov_function(n: int, table) -> RationalFn:
    """M^(n) = G_{12..n} - G^(n-1) + G^(n-2) - ... + (-1)^n G^(2) + (-1)^(n+1) 2 (2 - n)."""
    out = cyclic_product_sum(table, n, n)
    sign = -1
    for k in range(n - 1, 1, -1):
        out = out + cyclic_product_sum(table, n, k) * sign
        sign = -sign
    out = out + RationalFn.const((-1) ** (n + 1) * 2 * (2 - n))
    return out


def maximal_loop(n: int, first_up: bool = True) -> LoopWord:
    """(1 2 ... n 1 2 ... n) with alternating directions; closed only for odd n."""
    if n % 2 == 0:
        raise EvenN("the maximal loop exists only for odd n")
    return LoopWord.hat_word(list(range(1, n + 1)) * 2, first_up)


def verify_skein(G: RibbonGraph, w1: LoopWord, w2: LoopWord, w_sum: Optional[LoopWord] = None,
                 w_diff: Optional[LoopWord] = None, quiver: Optional[Quiver] = None) -> VerificationReport:
    """Trace skein identity for two loops meeting once.

    Checks tr(M1) tr(M2) = tr(M1 M2) + tr(M1 M2^{-1}); when the resolved loops
    are named, matches the two summands to their geodesic functions, and with
    a quiver checks {G1, G2} = G(w_sum)/2 - G(w_diff)/2 up to the branch sign.
    """
    rep = VerificationReport("skein")
    m1, m2 = holonomy(G, w1), holonomy(G, w2)
    t1, t2 = m1.trace(), m2.trace()
    ts, td = (m1 * m2).trace(), (m1 * m2.inverse()).trace()
    rep.add("trace identity", t1 * t2 == ts + td, f"{w1.to_text()} * {w2.to_text()}")
    g1, g2 = t1 * positive_sign(t1), t2 * positive_sign(t2)
    if w_sum is not None and w_diff is not None:
        gs, gd = geodesic(G, w_sum), geodesic(G, w_diff)
        lhs = g1 * g2
        rep.add("skein with named loops", lhs == gs + gd,
                f"({w1.to_text()})({w2.to_text()}) = ({w_sum.to_text()}) + ({w_diff.to_text()})",
                witness=lhs - gs - gd)
        if quiver is not None:
            from .poisson import bracket, half_bracket
            br = bracket(g1, g2, quiver)
            rep.add("bracket form", br == (gs - gd) * Fraction(1, 2),
                    "{G1, G2} = G_sum/2 - G_diff/2", witness=br - (gs - gd) * Fraction(1, 2))
            rep.add("half bracket", half_bracket(g1, g2, quiver) == gs, "<G1, G2> = G_sum")
    return rep
