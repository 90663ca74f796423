"""Log-canonical Poisson brackets defined by a quiver.

For a quiver with weight matrix W on variables x_1..x_n the bracket is
``{x_i, x_j} = W_ij x_i x_j``.  On arbitrary functions it is computed through
the Euler derivations E_i = x_i d/dx_i:

    {f, g} = sum_{i<j} W_ij (E_i f E_j g - E_j f E_i g)

which keeps half-integer exponents inside the Laurent world.  Elements of a
quadratic extension are handled through ``QuadElem.euler_derive``, which
encodes {rho, g} = rho {D, g} / (2 D).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Union

from .algebra import DiscriminantMismatch, QuadElem, RationalFn, as_scalar
from .quiver import Quiver
from .report import VerificationReport

Scalar = Union[RationalFn, QuadElem]


def _variables(f: Scalar) -> set:
    if isinstance(f, QuadElem):
        out = set()
        for c in f.terms.values():
            out |= c.variables()
        for d in f.discs.values():
            out |= d.variables()
        return out
    return f.variables()


def _names(q: Quiver, names: Optional[Mapping[str, str]]) -> list:
    if not names:
        return list(q.labels)
    return [names.get(l, l) for l in q.labels]


def _euler_table(f: Scalar, vs: Sequence[str]) -> Dict[int, Scalar]:
    present = _variables(f)
    out = {}
    for i, v in enumerate(vs):
        if v in present:
            d = f.euler_derive(v)
            if not d.is_zero():
                out[i] = d
    return out


def bracket(f, g, q: Quiver, names: Optional[Mapping[str, str]] = None) -> Scalar:
    """The log-canonical bracket {f, g} of the quiver ``q``.

    ``names`` optionally maps quiver labels to variable names.
    """
    f, g = as_scalar(f), as_scalar(g)
    vs = _names(q, names)
    ef = _euler_table(f, vs)
    eg = _euler_table(g, vs)
    quad = isinstance(f, QuadElem) or isinstance(g, QuadElem)
    total = QuadElem.lift(0) if quad else RationalFn.const(0)
    if not ef or not eg:
        return total
    wd = q.wd
    for i, fi in ef.items():
        row = wd[i]
        for j, gj in eg.items():
            w = row[j]
            if w:
                total = total + fi * gj * Fraction(w, 2)
    return total


def bracket_quad(f: QuadElem, g: QuadElem, q: Quiver, names=None) -> QuadElem:
    """Bracket in a shared quadratic extension; radicals must agree on D."""
    f, g = QuadElem.lift(f), QuadElem.lift(g)
    for r in set(f.discs) & set(g.discs):
        if f.discs[r] != g.discs[r]:
            raise DiscriminantMismatch(f"radical {r} bound to two discriminants")
    return QuadElem.lift(bracket(f, g, q, names))


def half_bracket(f, g, q: Quiver, names=None) -> Scalar:
    """<f, g> = f g / 2 + {f, g}."""
    f, g = as_scalar(f), as_scalar(g)
    return f * g * Fraction(1, 2) + bracket(f, g, q, names)


def _apply_constraints(x: Scalar, constraints, radical_rules) -> Scalar:
    if constraints:
        x = x.substitute(constraints)
    if isinstance(x, QuadElem) and radical_rules:
        for r, value in radical_rules.items():
            if r in x.discs:
                x = x.replace_radical(r, value)
    if isinstance(x, QuadElem) and x.is_rational():
        x = x.to_rational()
    return x


def log_canonical_matrix(fns: Sequence[Scalar], ambient: Quiver, constraints=None,
                         radical_rules=None, names=None):
    """Matrix of {f_i, f_j} / (f_i f_j) after constraints, as expressions."""
    fns = [as_scalar(f) for f in fns]
    n = len(fns)
    out = [[RationalFn.const(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            b = bracket(fns[i], fns[j], ambient, names)
            r = b / (fns[i] * fns[j]) if not b.is_zero() else b
            r = _apply_constraints(r, constraints, radical_rules)
            out[i][j] = r
            out[j][i] = -r
    return out


def verify_log_canonical(fns, expected: Quiver, constraints=None, ambient: Optional[Quiver] = None,
                         radical_rules=None, names=None) -> VerificationReport:
    """Check that ``fns`` are log-canonical with weights given by ``expected``.

    ``fns`` is either a sequence aligned with ``expected.labels`` or a mapping
    from those labels.  Brackets are taken in ``ambient`` (default: the
    expected quiver itself), divided by the product, and then the constraint
    substitution and radical replacements are applied.
    """
    if isinstance(fns, Mapping):
        fl = [fns[l] for l in expected.labels]
    else:
        fl = list(fns)
    ambient = ambient if ambient is not None else expected
    mat = log_canonical_matrix(fl, ambient, constraints, radical_rules, names)
    rep = VerificationReport("log-canonical")
    labels = expected.labels
    for i in range(len(fl)):
        for j in range(i + 1, len(fl)):
            r = mat[i][j]
            w = expected.weight(labels[i], labels[j])
            ok = isinstance(r, RationalFn) and r.is_constant() and r.constant_value() == w
            rep.add(f"{{{labels[i]},{labels[j]}}}", ok, f"expected weight {w}",
                    witness=None if ok else r)
    return rep
