"""Quivers with frozen vertices and half-integer weights, and seeds over them.

Weights are stored doubled, so the weight matrix ``W`` of a quiver is the
integer matrix ``Wd / 2``.  The exchange matrix used by mutation is the same
matrix; mutation refuses vertices whose row is not integral.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import flint
import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from .algebra import QuadElem, RationalFn, as_scalar


class QuiverError(Exception):
    pass


class FrozenVertex(QuiverError):
    pass


class NonIntegralRow(QuiverError):
    pass


class OverlappingPairs(QuiverError):
    pass


class UnknownVertex(QuiverError, KeyError):
    pass


class QuiverParseError(QuiverError, ValueError):
    pass


def _half(x) -> int:
    """Doubled integer representation of an integer or half-integer weight."""
    d = Fraction(x) * 2
    if d.denominator != 1:
        raise ValueError(f"weight {x} is not a half-integer")
    return int(d)


class Quiver:
    """Skew-symmetric weighted quiver.

    ``wd[i][j]`` is twice the weight from vertex ``i`` to vertex ``j``.
    """

    __slots__ = ("labels", "frozen", "wd", "_index")

    def __init__(self, labels: Sequence[str], wd: Sequence[Sequence[int]], frozen: Optional[Sequence[bool]] = None):
        self.labels = tuple(labels)
        n = len(self.labels)
        self._index = {l: i for i, l in enumerate(self.labels)}
        if len(self._index) != n:
            raise QuiverError("duplicate vertex labels")
        self.frozen = tuple(bool(f) for f in frozen) if frozen is not None else (False,) * n
        self.wd = tuple(tuple(int(x) for x in row) for row in wd)
        if len(self.wd) != n or any(len(r) != n for r in self.wd):
            raise QuiverError("weight matrix has wrong shape")
        for i in range(n):
            if self.wd[i][i] != 0:
                raise QuiverError("loops are not allowed")
            for j in range(i + 1, n):
                if self.wd[i][j] != -self.wd[j][i]:
                    raise QuiverError("weight matrix is not skew-symmetric")

    # -- construction -----------------------------------------------------------
    @classmethod
    def from_arrows(cls, labels: Sequence[str], arrows: Iterable[tuple], frozen: Iterable[str] = ()) -> "Quiver":
        """Build from ``(src, dst)`` or ``(src, dst, weight)`` tuples; weights add up."""
        labels = list(labels)
        idx = {l: i for i, l in enumerate(labels)}
        n = len(labels)
        wd = [[0] * n for _ in range(n)]
        for a in arrows:
            s, t = a[0], a[1]
            w = _half(a[2]) if len(a) > 2 else 2
            if s not in idx or t not in idx:
                raise UnknownVertex(f"arrow {s}->{t} uses an unknown vertex")
            i, j = idx[s], idx[t]
            wd[i][j] += w
            wd[j][i] -= w
        fz = set(frozen)
        return cls(labels, wd, [l in fz for l in labels])

    @classmethod
    def from_matrix(cls, B: Sequence[Sequence], labels: Optional[Sequence[str]] = None, frozen=None) -> "Quiver":
        n = len(B)
        labels = labels or [str(i + 1) for i in range(n)]
        return cls(labels, [[_half(x) for x in row] for row in B], frozen)

    # -- access -------------------------------------------------------------------
    def __len__(self):
        return len(self.labels)

    def index(self, v) -> int:
        if isinstance(v, int) and v not in self._index:
            if 0 <= v < len(self.labels):
                return v
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def weight(self, u, v) -> Fraction:
        return Fraction(self.wd[self.index(u)][self.index(v)], 2)

    def matrix(self) -> List[List[Fraction]]:
        return [[Fraction(x, 2) for x in row] for row in self.wd]

    def int_matrix(self) -> List[List[int]]:
        out = []
        for row in self.wd:
            if any(x % 2 for x in row):
                raise NonIntegralRow("matrix has half-integer entries")
            out.append([x // 2 for x in row])
        return out

    def arrows(self) -> List[Tuple[str, str, Fraction]]:
        n = len(self)
        return [
            (self.labels[i], self.labels[j], Fraction(self.wd[i][j], 2))
            for i in range(n)
            for j in range(n)
            if self.wd[i][j] > 0
        ]

    def mutable(self) -> List[str]:
        return [l for l, f in zip(self.labels, self.frozen) if not f]

    def in_degree(self, v) -> Fraction:
        i = self.index(v)
        return sum((Fraction(self.wd[j][i], 2) for j in range(len(self)) if self.wd[j][i] > 0), Fraction(0))

    def out_degree(self, v) -> Fraction:
        i = self.index(v)
        return sum((Fraction(self.wd[i][j], 2) for j in range(len(self)) if self.wd[i][j] > 0), Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, Quiver):
            return NotImplemented
        return self.labels == other.labels and self.frozen == other.frozen and self.wd == other.wd

    def __hash__(self):
        return hash((self.labels, self.frozen, self.wd))

    def same_arrows(self, other: "Quiver") -> bool:
        """Equality up to vertex ordering (labels must coincide as sets)."""
        if set(self.labels) != set(other.labels):
            return False
        return all(
            self.wd[self.index(a)][self.index(b)] == other.wd[other.index(a)][other.index(b)]
            for a in self.labels
            for b in self.labels
        ) and all(self.frozen[self.index(a)] == other.frozen[other.index(a)] for a in self.labels)

    def relabel(self, mapping: Mapping[str, str]) -> "Quiver":
        return Quiver([mapping.get(l, l) for l in self.labels], self.wd, self.frozen)

    def reorder(self, labels: Sequence[str]) -> "Quiver":
        idx = [self.index(l) for l in labels]
        return Quiver(labels, [[self.wd[i][j] for j in idx] for i in idx], [self.frozen[i] for i in idx])

    def induced(self, labels: Sequence[str]) -> "Quiver":
        return self.reorder(list(labels))

    def drop(self, labels: Iterable[str]) -> "Quiver":
        gone = set(labels)
        return self.induced([l for l in self.labels if l not in gone])

    def with_frozen(self, frozen: Iterable[str]) -> "Quiver":
        fz = set(frozen)
        return Quiver(self.labels, self.wd, [l in fz for l in self.labels])

    def __repr__(self):
        return f"Quiver({len(self)} vertices, {len(self.arrows())} arrows)"

    # -- text format ------------------------------------------------------------------
    def to_text(self, annotations: Optional[Mapping[str, str]] = None) -> str:
        lines = [f"quiver {len(self)}"]
        for l, f in zip(self.labels, self.frozen):
            parts = [l]
            if f:
                parts.append("frozen")
            if annotations and l in annotations:
                parts.append(f"casimir={annotations[l]}")
            lines.append(" ".join(parts))
        for s, t, w in self.arrows():
            ws = str(w.numerator) if w.denominator == 1 else f"{w.numerator}/2"
            lines.append(f"{s} {t} {ws}")
        return "\n".join(lines) + "\n"

    def save(self, path, annotations=None):
        Path(path).write_text(self.to_text(annotations))


def parse_quiver(text: str, with_annotations: bool = False):
    """Parse the quiver text format.

    Header ``quiver <n>``; ``n`` vertex lines ``name [frozen] [casimir=ddd]``;
    then arrow lines ``src dst weight`` with weight an integer or ``p/2``.
    Lines starting with ``#`` are comments.
    """
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    lines = [l for l in lines if l]
    if not lines or not lines[0].startswith("quiver"):
        raise QuiverParseError("missing 'quiver <n>' header")
    head = lines[0].split()
    try:
        n = int(head[1])
    except (IndexError, ValueError):
        raise QuiverParseError("bad header") from None
    if len(lines) < n + 1:
        raise QuiverParseError("truncated vertex list")
    labels, frozen, ann = [], [], {}
    for l in lines[1 : n + 1]:
        toks = l.split()
        name = toks[0]
        fz = False
        for t in toks[1:]:
            if t == "frozen":
                fz = True
            elif t.startswith("casimir="):
                ann[name] = t.split("=", 1)[1]
            else:
                raise QuiverParseError(f"bad vertex line {l!r}")
        labels.append(name)
        frozen.append(fz)
    arrows = []
    for l in lines[n + 1 :]:
        toks = l.split()
        if len(toks) != 3:
            raise QuiverParseError(f"bad arrow line {l!r}")
        try:
            w = Fraction(toks[2])
        except ValueError:
            raise QuiverParseError(f"bad weight in {l!r}") from None
        if w <= 0:
            raise QuiverParseError(f"arrow weights must be positive: {l!r}")
        arrows.append((toks[0], toks[1], w))
    try:
        q = Quiver.from_arrows(labels, arrows, [l for l, f in zip(labels, frozen) if f])
    except (QuiverError, ValueError) as exc:
        raise QuiverParseError(str(exc)) from exc
    return (q, ann) if with_annotations else q


def load_quiver(path, with_annotations: bool = False):
    return parse_quiver(Path(path).read_text(), with_annotations)


# ---------------------------------------------------------------------------
# mutation
# ---------------------------------------------------------------------------


def mutate_matrix(B: Sequence[Sequence], k: int, frozen: Optional[Sequence[bool]] = None) -> List[List]:
    """Matrix mutation in direction ``k`` (0-based) of a skew matrix.

    Entries may be ints or Fractions; the k-th row and column must be integral.
    """
    n = len(B)
    if frozen is not None and frozen[k]:
        raise FrozenVertex(f"vertex {k} is frozen")
    for j in range(n):
        if Fraction(B[k][j]).denominator != 1 or Fraction(B[j][k]).denominator != 1:
            raise NonIntegralRow(f"row/column {k} is not integral")
    out = [[Fraction(x) for x in r] for r in B]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -Fraction(B[i][j])
            else:
                bik, bkj = Fraction(B[i][k]), Fraction(B[k][j])
                out[i][j] = Fraction(B[i][j]) + (abs(bik) * bkj + bik * abs(bkj)) / 2
    return [[int(x) if x.denominator == 1 else x for x in r] for r in out]


def mutate_quiver(q: Quiver, k) -> Quiver:
    i = q.index(k)
    if q.frozen[i]:
        raise FrozenVertex(f"vertex {q.labels[i]} is frozen")
    row = q.wd[i]
    if any(x % 2 for x in row):
        raise NonIntegralRow(f"vertex {q.labels[i]} has half-integer arrows")
    n = len(q)
    wd = [list(r) for r in q.wd]
    for a in range(n):
        for b in range(n):
            if a == i or b == i:
                wd[a][b] = -q.wd[a][b]
            else:
                # doubled: wd' = wd + (|wd_ak| wd_kb + wd_ak |wd_kb|) / 4 ... in doubled units
                bak, bkb = q.wd[a][i], q.wd[i][b]
                wd[a][b] = q.wd[a][b] + (abs(bak) * bkb + bak * abs(bkb)) // 4
    return Quiver(q.labels, wd, q.frozen)


class Seed:
    """A quiver together with one expression per vertex (in the initial variables)."""

    __slots__ = ("quiver", "exprs")

    def __init__(self, quiver: Quiver, exprs: Mapping[str, object]):
        self.quiver = quiver
        self.exprs = {l: as_scalar(exprs[l]) for l in quiver.labels}

    @classmethod
    def initial(cls, quiver: Quiver, names: Optional[Mapping[str, str]] = None) -> "Seed":
        """Seed whose expressions are the coordinate variables.

        ``names`` maps vertex labels to variable names (default: the label).
        """
        names = names or {}
        return cls(quiver, {l: RationalFn.var(names.get(l, l)) for l in quiver.labels})

    def __getitem__(self, label):
        return self.exprs[label]

    def mutate(self, k) -> "Seed":
        return mutate_seed(self, k)

    def relabel(self, mapping: Mapping[str, str]) -> "Seed":
        q = self.quiver.relabel(mapping)
        return Seed(q, {mapping.get(l, l): e for l, e in self.exprs.items()})

    def same_as(self, other: "Seed") -> bool:
        return self.quiver.same_arrows(other.quiver) and all(self.exprs[l] == other.exprs[l] for l in self.exprs)


def mutate_seed(s: Seed, k) -> Seed:
    """x-variable mutation: x_k -> 1/x_k, x_i -> x_i (1 + x_k^{-sgn B_ik})^{-B_ik}."""
    q = s.quiver
    i = q.index(k)
    lab = q.labels[i]
    newq = mutate_quiver(q, lab)  # validates frozen / integrality
    xk = s.exprs[lab]
    exprs = dict(s.exprs)
    exprs[lab] = 1 / xk
    inv = None
    for j, other in enumerate(q.labels):
        if j == i:
            continue
        b = q.wd[j][i] // 2  # B_jk
        if b == 0:
            continue
        if b > 0:
            if inv is None:
                inv = 1 / xk
            factor = 1 + inv
        else:
            factor = 1 + xk
        exprs[other] = s.exprs[other] * factor ** (-b)
    return Seed(newq, exprs)


def mutate_sequence(s, seq: Iterable[str]):
    for k in seq:
        s = s.mutate(k) if isinstance(s, Seed) else mutate_quiver(s, k)
    return s


# ---------------------------------------------------------------------------
# Casimirs
# ---------------------------------------------------------------------------


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> List[List[int]]:
    """LLL-reduced Z-basis of {v in Z^n : M v = 0} for an integer matrix M."""
    m = len(rows)
    if n == 0:
        return []
    aug = []
    for j in range(n):
        aug.append([rows[i][j] for i in range(m)] + [1 if c == j else 0 for c in range(n)])
    h = flint.fmpz_mat(aug).hnf()
    basis = []
    for r in range(n):
        row = [int(h[r, c]) for c in range(m + n)]
        if all(v == 0 for v in row[:m]):
            basis.append(row[m:])
    if not basis:
        return []
    red = flint.fmpz_mat(basis).lll()
    out = [[int(red[r, c]) for c in range(n)] for r in range(red.nrows())]
    # deterministic sign: first nonzero entry positive
    for v in out:
        for x in v:
            if x:
                if x < 0:
                    v[:] = [-y for y in v]
                break
    return out


def casimir_basis(q: Quiver) -> List[Tuple[int, ...]]:
    """Z-basis of exponent vectors v with W v = 0 (over all vertices)."""
    return [tuple(v) for v in integer_kernel(q.wd, len(q))]


def in_kernel(q: Quiver, v: Mapping[str, int] | Sequence[int]) -> bool:
    vec = _as_vec(q, v)
    return all(sum(q.wd[i][j] * vec[j] for j in range(len(q))) == 0 for i in range(len(q)))


def _as_vec(q: Quiver, v) -> List[int]:
    if isinstance(v, Mapping):
        return [int(v.get(l, 0)) for l in q.labels]
    return [int(x) for x in v]


def lattice_contains(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Is ``v`` an integer combination of ``basis``?"""
    if not basis:
        return not any(v)
    m = flint.fmpz_mat([list(b) for b in basis] + [list(v)])
    h = m.hnf()
    base_rank = flint.fmpz_mat([list(b) for b in basis]).rank()
    # v in the lattice iff the HNF with v appended spans the same lattice
    hb = flint.fmpz_mat([list(b) for b in basis]).hnf()
    rows_h = [tuple(int(h[r, c]) for c in range(h.ncols())) for r in range(h.nrows())]
    rows_hb = [tuple(int(hb[r, c]) for c in range(hb.ncols())) for r in range(hb.nrows())]
    nz = lambda rows: [r for r in rows if any(r)]
    return m.rank() == base_rank and nz(rows_h) == nz(rows_hb)


def mutate_casimir_vector(q: Quiver, v: Sequence[int], k) -> List[int]:
    """Exponent vector of the same Casimir monomial in the mutated cluster.

    v'_k = -v_k + sum over arrows i->k of (multiplicity * v_i); other entries fixed.
    """
    i = q.index(k)
    out = list(v)
    tot = -v[i]
    for j in range(len(q)):
        if q.wd[j][i] > 0:
            tot += (q.wd[j][i] // 2) * v[j]
    out[i] = tot
    return out


def monomial_of(exprs: Mapping[str, object], labels: Sequence[str], v: Sequence[int]):
    out = RationalFn.const(1)
    for l, e in zip(labels, v):
        if e:
            out = out * exprs[l] ** e
    return out


# ---------------------------------------------------------------------------
# amalgamation and specialization
# ---------------------------------------------------------------------------


def amalgamate(q: Quiver, pairs: Sequence[Tuple[str, str]], names: Optional[Sequence[str]] = None) -> Quiver:
    """Merge each pair into one vertex; weights to other vertices add.

    The merged vertex takes the first label of the pair unless ``names`` is
    given; it is frozen only if both members were frozen.
    """
    seen = set()
    for a, b in pairs:
        for x in (a, b):
            q.index(x)
            if x in seen:
                raise OverlappingPairs(f"vertex {x} appears in two pairs")
            seen.add(x)
        if a == b:
            raise OverlappingPairs(f"pair ({a}, {b}) is degenerate")
    names = list(names) if names is not None else [a for a, _ in pairs]
    rep = {}
    for (a, b), nm in zip(pairs, names):
        rep[a] = nm
        rep[b] = nm
    new_labels = []
    for l in q.labels:
        t = rep.get(l, l)
        if t not in new_labels:
            new_labels.append(t)
    idx = {l: i for i, l in enumerate(new_labels)}
    n = len(new_labels)
    wd = [[0] * n for _ in range(n)]
    for i, a in enumerate(q.labels):
        for j, b in enumerate(q.labels):
            ia, jb = idx[rep.get(a, a)], idx[rep.get(b, b)]
            if ia != jb:
                wd[ia][jb] += q.wd[i][j]
    frozen = []
    for l in new_labels:
        members = [x for x in q.labels if rep.get(x, x) == l]
        frozen.append(all(q.frozen[q.index(x)] for x in members))
    return Quiver(new_labels, wd, frozen)


def amalgamate_seed(s: Seed, pairs, names=None) -> Seed:
    q = amalgamate(s.quiver, pairs, names)
    names = list(names) if names is not None else [a for a, _ in pairs]
    exprs = dict(s.exprs)
    for (a, b), nm in zip(pairs, names):
        e = exprs.pop(a) * exprs.pop(b)
        exprs[nm] = e
    return Seed(q, exprs)


def specialize(s: Seed, v: str, value) -> Seed:
    """Substitute ``v -> value`` in all expressions and drop vertex ``v``."""
    value = as_scalar(value)
    sigma = {v: value}
    exprs = {l: e.substitute(sigma) for l, e in s.exprs.items() if l != v}
    q = s.quiver.drop([v])
    return Seed(q, exprs)


# ---------------------------------------------------------------------------
# isomorphism
# ---------------------------------------------------------------------------


def _digraph(q: Quiver, node_attrs: Optional[Mapping[str, object]] = None) -> nx.DiGraph:
    g = nx.DiGraph()
    for l, f in zip(q.labels, q.frozen):
        g.add_node(l, frozen=f, attr=(node_attrs or {}).get(l))
    for s, t, w in q.arrows():
        g.add_edge(s, t, w=w)
    return g


def quiver_isomorphisms(q1: Quiver, q2: Quiver, attrs1=None, attrs2=None):
    """Iterate over frozen-flag (and attribute) preserving isomorphisms q1 -> q2."""
    if len(q1) != len(q2):
        return
    if sorted(q1.frozen) != sorted(q2.frozen):
        return
    if sorted(w for *_, w in q1.arrows()) != sorted(w for *_, w in q2.arrows()):
        return
    g1, g2 = _digraph(q1, attrs1), _digraph(q2, attrs2)
    gm = DiGraphMatcher(
        g1,
        g2,
        node_match=lambda a, b: a["frozen"] == b["frozen"] and a["attr"] == b["attr"],
        edge_match=lambda a, b: a["w"] == b["w"],
    )
    yield from gm.isomorphisms_iter()


def quivers_isomorphic(q1: Quiver, q2: Quiver, attrs1=None, attrs2=None) -> Optional[Dict[str, str]]:
    """A bijection carrying q1's weights onto q2's, or None."""
    for m in quiver_isomorphisms(q1, q2, attrs1, attrs2):
        return dict(m)
    return None
