"""Verification suites for the ribbon-graph and groupoid identities.

These back the ``skein``, ``markov`` and ``rank`` targets of the command line
and the corresponding acceptance checks.  Random points are seeded; shear
values are drawn as squares (p/q)^2 with p, q uniform in [1, 1000] so that
half powers evaluate exactly.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .algebra import RationalFn
from .groupoid import (
    assemble_A,
    chi_coefficients,
    determinant,
    generic_A,
    pfaffian,
    rank_at,
    symmetric_rank,
)
from .poisson import bracket, half_bracket
from .report import VerificationReport
from .ribbon import (
    LoopWord,
    gamma_n,
    geodesic,
    geodesic_table,
    goldman_quiver,
    holonomy,
    markov_function,
    maximal_loop,
    verify_skein,
)

W = LoopWord.hat_word


def random_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(1, 1000), rng.randint(1, 1000))


def shear_point(rng: random.Random, names) -> Dict[str, Fraction]:
    """Positive rational point whose values are rational squares."""
    return {v: random_fraction(rng) ** 2 for v in sorted(names)}


def gamma_variables(n: int) -> List[str]:
    G = gamma_n(n)
    return [G.labels[e] for e in G.edges]


# -- skein --------------------------------------------------------------------------------


def verify_skein_suite(n: int = 5) -> VerificationReport:
    """Skein relation, half bracket and the six-letter identity on Gamma_n."""
    G = gamma_n(n)
    Q = goldman_quiver(G)
    T = geodesic_table(G)
    rep = VerificationReport(f"skein gamma{n}")
    r = verify_skein(G, W([1, 2]), W([2, 3]), W([1, 3]), W([1, 2, 3, 2]))
    rep.extend(r)
    g12, g23, g13 = T[0][1], T[1][2], T[0][2]
    g1232 = geodesic(G, W([1, 2, 3, 2]))
    hb = half_bracket(g12, g23, Q)
    rep.add("<(12),(23)> = (13)", hb == g13, witness=hb - g13)
    rep.info("<(12),(23)> = (1232)", str(hb == g1232))
    br = bracket(g12, g23, Q)
    rep.info("{(12),(23)} = ((1232) - (13))/2", str(br == (g1232 - g13) * Fraction(1, 2)))
    if n >= 5:
        g = lambda idx: geodesic(G, W(idx, True))
        lhs = g([1, 3, 5, 4, 3, 2])
        rhs = 2 * g([1, 4, 3, 2]) * T[2][4] - 2 * g([1, 5, 3, 2]) * T[2][3] + g([1, 5, 4, 2])
        rep.add("six-letter identity at (1,2,3,4,5)", lhs == rhs,
                "(^1 3 5 4 3 2) = 2(^1 4 3 2)(3 5) - 2(^1 5 3 2)(3 4) + (^1 5 4 2)", witness=lhs - rhs)
        unit = g([1, 4, 3, 2]) * T[2][4] - g([1, 5, 3, 2]) * T[2][3] + g([1, 5, 4, 2])
        rep.info("same identity with unit coefficients", str(lhs == unit))
    return rep


# -- Markov -------------------------------------------------------------------------------


def verify_markov(ns: Sequence[int] = (3, 5)) -> VerificationReport:
    """Markov function against the trace of the maximal loop."""
    rep = VerificationReport("markov")
    for n in ns:
        G = gamma_n(n)
        M = markov_function(n, geodesic_table(G))
        h = geodesic(G, maximal_loop(n))
        diff = h - M
        rep.add(f"M({n}) = maximal-loop trace on gamma{n}", diff.is_zero(), witness=f"trace - M = {diff.to_str()}")
        if diff.is_constant():
            rep.info(f"trace - M({n})", str(diff.constant_value()))
    return rep


# -- rank ---------------------------------------------------------------------------------


def verify_rank(ns: Sequence[int] = (5, 6), trials: int = 20, seed: int = 0,
                symbolic: bool = True) -> VerificationReport:
    """rank(A + A^T) for A assembled from the geodesic table of Gamma_n."""
    rep = VerificationReport("rank")
    rng = random.Random(seed)
    for n in ns:
        A = assemble_A(geodesic_table(gamma_n(n)))
        S = A.symmetrized()
        if symbolic:
            r = symmetric_rank(S)
            rep.add(f"symbolic rank(A + A^T) = 4 for n = {n}", r == 4, f"rank {r}")
        names = gamma_variables(n)
        ranks = [rank_at(S, shear_point(rng, names)) for _ in range(trials)]
        ok = sum(1 for r in ranks if r <= 4)
        rep.add(f"random points n = {n}: rank <= 4", ok == trials, f"{ok}/{trials} rank <= 4",
                witness=None if ok == trials else ranks)
    return rep


# -- Pfaffian and chi ---------------------------------------------------------------------


def random_skew(rng: random.Random, n: int) -> List[List[RationalFn]]:
    M = [[RationalFn.const(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = random_fraction(rng) * rng.choice((1, -1))
            M[i][j] = RationalFn.const(v)
            M[j][i] = RationalFn.const(-v)
    return M


def verify_pfaffian(trials: int = 10, seed: int = 0, n: int = 5,
                    index: Sequence[int] = (1, 2, 3, 4)) -> VerificationReport:
    """Pf^2 = det, and the hat-class functions against Pf(U - U^T)."""
    rng = random.Random(seed)
    rep = VerificationReport("pfaffian")
    for size in (2, 4, 6):
        M = random_skew(rng, size)
        rep.add(f"Pf^2 = det for a random skew {size}x{size}", pfaffian(M) ** 2 == determinant(M))
    G = gamma_n(n)
    T = geodesic_table(G)
    idx = [i - 1 for i in index]
    U = [[RationalFn.const(1) if a == b else (T[idx[a]][idx[b]] if a < b else RationalFn.const(0))
          for b in range(4)] for a in range(4)]
    UmUt = [[U[a][b] - U[b][a] for b in range(4)] for a in range(4)]
    pf = pfaffian(UmUt)
    f = geodesic(G, W(list(index), True))
    g = geodesic(G, W(list(index), False))
    chi1 = chi_coefficients(assemble_A(U_table(T, idx)))[1]
    names = gamma_variables(n)
    fails = sum_ok = prod_ok = 0
    for _ in range(trials):
        pt = shear_point(rng, names)
        fv, gv, pv = f.evaluate(pt), g.evaluate(pt), pf.evaluate(pt)
        fails += fv * gv != pv
        sum_ok += fv + gv == -pv
        prod_ok += fv * gv == -chi1.evaluate(pt)
    rep.add(f"f.g = Pf(U - U^T) at {trials} random points", fails == 0, f"{trials - fails}/{trials} agree")
    rep.info("f + g = -Pf(U - U^T)", f"{sum_ok}/{trials}")
    rep.info("f.g = -[lambda^1] det(U + lambda U^T)", f"{prod_ok}/{trials}")
    return rep


def U_table(T, idx: Sequence[int]) -> List[List[RationalFn]]:
    return [[T[a][b] for b in idx] for a in idx]


def verify_chi(ns: Sequence[int] = (3, 4, 5, 6)) -> VerificationReport:
    rep = VerificationReport("chi")
    for n in ns:
        c = chi_coefficients(generic_A(n))
        rep.add(f"chi palindromic n = {n}", all(c[k] == c[n - k] for k in range(n + 1)))
        rep.add(f"chi(0) = 1 n = {n}", c[0] == 1)
    return rep
