"""Checks on pairs of dihedral actions with a common fixed locus.

Small groups (D_n x C_2, D_2n, and a semidirect product D_n x| C_2) are
handled as explicit element lists with a multiplication function; everything
is verified by exhaustive computation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

import numpy as np

from .group_core import DihedralAut, DihedralElement, aut_apply, automorphism_tables, dn_automorphisms
from .hurwitz import HurwitzVector, encode_rows, is_hurwitz_system, nu_type
from .mcg_moves import orbit_closure


class CoincidenceError(ValueError):
    pass


# --------------------------------------------------------------------------
# Finite groups given by a multiplication function
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteGroup:
    name: str
    elements: tuple
    mul: Callable[[Hashable, Hashable], Hashable] = field(repr=False, compare=False)
    identity: Hashable = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def inv(self, g):
        for h in self.elements:
            if self.mul(g, h) == self.identity:
                return h
        raise AssertionError(f"{g} has no inverse")

    def prod(self, *gs):
        out = self.identity
        for g in gs:
            out = self.mul(out, g)
        return out

    def comm(self, a, b):
        return self.prod(a, b, self.inv(a), self.inv(b))

    def element_order(self, g) -> int:
        k, p = 1, g
        while p != self.identity:
            p = self.mul(p, g)
            k += 1
        return k

    def generated(self, gens: Iterable) -> frozenset:
        gens = list(gens)
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    p = self.mul(h, g)
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return frozenset(seen)

    def is_associative(self) -> bool:
        E = self.elements
        return all(self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)) for a in E for b in E for c in E)

    def is_normal(self, sub: frozenset) -> bool:
        return all(self.prod(g, h, self.inv(g)) in sub for g in self.elements for h in sub)

    def center(self) -> frozenset:
        return frozenset(z for z in self.elements if all(self.mul(z, g) == self.mul(g, z) for g in self.elements))


def is_dihedral_subgroup(G: FiniteGroup, sub: frozenset, n: int) -> bool:
    """sub has order 2n, an element r of order n, and an involution s outside <r> with s r s^-1 = r^-1."""
    if len(sub) != 2 * n:
        return False
    for r in sub:
        if G.element_order(r) != n:
            continue
        cyc = G.generated([r])
        for s in sub:
            if s not in cyc and G.element_order(s) == 2 and G.prod(s, r, G.inv(s)) == G.inv(r):
                return True
    return False


def dn_group(n: int) -> FiniteGroup:
    els = tuple(DihedralElement(i, j, n) for i in range(n) for j in range(2))
    return FiniteGroup(f"D_{n}", els, lambda a, b: a * b, DihedralElement.identity(n))


def dn_times_c2(n: int) -> FiniteGroup:
    els = tuple((DihedralElement(i, j, n), e) for i in range(n) for j in range(2) for e in range(2))
    return FiniteGroup(
        f"D_{n} x C_2", els, lambda p, q: (p[0] * q[0], (p[1] + q[1]) % 2), (DihedralElement.identity(n), 0)
    )


def dn_semidirect_c2(n: int, phi: DihedralAut) -> FiniteGroup:
    """D_n x| <t>, t of order 2 acting by ``phi``: (g, e)(g', e') = (g phi^e(g'), e + e')."""

    def mul(p, q):
        g2 = aut_apply(phi, q[0]) if p[1] else q[0]
        return (p[0] * g2, (p[1] + q[1]) % 2)

    els = tuple((DihedralElement(i, j, n), e) for i in range(n) for j in range(2) for e in range(2))
    return FiniteGroup(f"D_{n} x| C_2", els, mul, (DihedralElement.identity(n), 0))


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


@dataclass
class CoincidenceReport:
    delta: int | None
    case_tag: str
    identities: list[tuple[str, bool]]
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.delta is not None and not 0 <= self.delta <= 3:
            raise CoincidenceError("fixed-locus dimension must lie in 0..3")

    @property
    def ok(self) -> bool:
        return all(flag for _, flag in self.identities)

    def failures(self) -> list[str]:
        return [name for name, flag in self.identities if not flag]

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "case_tag": self.case_tag,
            "ok": self.ok,
            "identities": [{"name": k, "holds": v} for k, v in self.identities],
            "details": self.details,
        }


def _same_orbit_mod_aut(v: HurwitzVector, w: HurwitzVector, mod_aut: bool = True) -> bool:
    keys, _, complete = orbit_closure(v, mod_aut=mod_aut)
    if not complete:
        raise CoincidenceError("orbit search did not finish")
    target = int(encode_rows(np.array([w.codes], dtype=np.int64), v.n)[0])
    i = np.searchsorted(keys, target)
    return bool(i < len(keys) and keys[i] == target)


def coincidence_check_pair(n: int, h: int) -> CoincidenceReport:
    """Both genus-zero systems (yx^(h-1), x, yx^(h+1), x^-1) and (x, y, x, y) give one type."""
    allowed = {0} if n % 2 else {0, n // 2}
    if n < 3 or h not in allowed:
        raise CoincidenceError(f"h={h} not allowed for n={n} (expected one of {sorted(allowed)})")
    x = DihedralElement.x(n)
    y = DihedralElement.y(n)
    X = lambda e: DihedralElement.x(n, e)
    u = HurwitzVector.from_entries(n, 0, [y * X(h - 1), x, y * X(h + 1), X(-1)])
    w = HurwitzVector.from_entries(n, 0, [x, y, x, y])
    nu_u, nu_w = nu_type(u), nu_type(w)
    aut_related = any(nu_u.apply(f) == nu_w for f in dn_automorphisms(n))
    ids = [
        ("first vector is a Hurwitz system", bool(is_hurwitz_system(u))),
        ("second vector is a Hurwitz system", bool(is_hurwitz_system(w))),
        ("Nielsen functions agree up to Aut(D_n)", aut_related),
        ("same orbit under moves and Aut(D_n)", _same_orbit_mod_aut(u, w)),
    ]
    if n % 2:
        ids.append(("Nielsen functions equal (n odd)", nu_u == nu_w))
    return CoincidenceReport(
        1,
        "III-b",
        ids,
        {"n": n, "h": h, "vectors": [str(u), str(w)], "nielsen_equal": nu_u == nu_w},
    )


def coincidence_exception_example(d4: int) -> CoincidenceReport:
    """The D_n x C_2 example (n = 2 d4) with one III-a and one III-b subgroup."""
    if d4 < 2:
        raise CoincidenceError("d4 must be at least 2")
    n = 2 * d4
    G = dn_times_c2(n)
    e = DihedralElement.identity(n)
    x, y = DihedralElement.x(n), DihedralElement.y(n)
    g1, g2, g3, g4 = (e, 1), (y * x, 1), (y, 0), (x, 0)
    a = G.prod(g1, g2)
    b = G.prod(g2, g3)
    c = G.prod(g1, g4, g1, g1, g4, g1)
    g3p, g4p = G.prod(g1, g3, g1), G.prod(g1, g4, g1)
    H_one = G.generated([a, b, c])
    H_zero = G.generated([g3, g4, g3p, g4p])
    proj = frozenset(p[0] for p in H_one)
    ids = [
        ("orders are (2, 2, 2, 2*d4)", [G.element_order(g) for g in (g1, g2, g3, g4)] == [2, 2, 2, 2 * d4]),
        ("product g1 g2 g3 g4 = 1", G.prod(g1, g2, g3, g4) == G.identity),
        ("g1..g4 generate D_n x C_2", len(G.generated([g1, g2, g3, g4])) == G.order),
        ("a = (yx, 0)", a == (y * x, 0)),
        ("b = (x^-1, 1)", b == (x.inverse(), 1)),
        ("c = (x^2, 0)", c == (x * x, 0)),
        ("[a, b] = c", G.comm(a, b) == c),
        ("genus-zero images are (y,0),(x,0),(y,0),(x,0)", (g3, g4, g3p, g4p) == ((y, 0), (x, 0), (y, 0), (x, 0))),
        ("g3 g4 g3' g4' = 1", G.prod(g3, g4, g3p, g4p) == G.identity),
        ("genus-zero side generates H' isomorphic to D_n", is_dihedral_subgroup(G, H_zero, n)),
        ("genus-one side projects onto D_n", len(proj) == 2 * n),
        ("genus-one subgroup H has index 2", 2 * len(H_one) == G.order),
        ("H differs from H'", H_one != H_zero),
    ]
    return CoincidenceReport(
        1,
        "III-a/III-b",
        ids,
        {"n": n, "d4": d4, "order_H": len(H_one), "order_H_prime": len(H_zero)},
    )


# --------------------------------------------------------------------------
# Groups containing two copies of D_n meeting in an index-two subgroup
# --------------------------------------------------------------------------


@dataclass
class GroupConstruction:
    name: str
    n: int
    group_order: int
    checks: list[tuple[str, bool]]
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(flag for _, flag in self.checks)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "group_order": self.group_order,
            "ok": self.ok,
            "checks": [{"name": k, "holds": v} for k, v in self.checks],
            "details": self.details,
        }


def _dd_checks(G: FiniteGroup, n: int, K: frozenset, g1, g2) -> list[tuple[str, bool]]:
    H = G.generated(list(K) + [g1])
    Hp = G.generated(list(K) + [g2])
    quotient_gens = G.generated(list(K) + [g1, g2])
    squares_in_K = all(G.mul(g, g) in K for g in G.elements)
    return [
        ("H is dihedral of order 2n", is_dihedral_subgroup(G, H, n)),
        ("H' is dihedral of order 2n", is_dihedral_subgroup(G, Hp, n)),
        ("H differs from H'", H != Hp),
        ("K = H meet H'", frozenset(H & Hp) == K),
        ("K has index 2 in H and H'", 2 * len(K) == len(H) == len(Hp)),
        ("K is normal in G", G.is_normal(K)),
        ("G/K has order 4", len(G.elements) == 4 * len(K)),
        ("G/K is elementary abelian", squares_in_K),
        ("images of g1, g2 generate G/K", len(quotient_gens) == G.order),
        ("g1^2 = g2^2 = 1", G.mul(g1, g1) == G.identity and G.mul(g2, g2) == G.identity),
    ]


def dd_constructions(n: int) -> list[GroupConstruction]:
    """Every applicable construction of G with H, H' ~ D_n and 1 -> K -> G -> (Z/2)^2 -> 1."""
    if n < 3:
        raise CoincidenceError("constructions need n >= 3")
    out = []
    # split case: D_n x C_2 with H' the graph of the character y -> 1, x -> 0
    G = dn_times_c2(n)
    K = frozenset((DihedralElement(i, 0, n), 0) for i in range(n))
    g1, g2 = (DihedralElement.y(n), 0), (DihedralElement.y(n), 1)
    out.append(GroupConstruction("split D_n x C_2", n, G.order, _dd_checks(G, n, K, g1, g2), {"center_order": len(G.center())}))
    if n % 2 == 0:
        # D_2n with H = <X^2, Y>, H' = <X^2, XY>
        G = dn_group(2 * n)
        X, Y = DihedralElement.x(2 * n), DihedralElement.y(2 * n)
        K = G.generated([X * X])
        checks = _dd_checks(G, n, K, Y, X * Y)
        checks.append(("D_2n is not D_n x C_2 (center order 2)", len(G.center()) == 2))
        out.append(GroupConstruction("non-split D_2n", n, G.order, checks, {"center_order": len(G.center())}))
    if n % 4 == 0 and (n // 4) % 2 == 1:
        h = n // 4
        phi = DihedralAut((2 * h - 1) % n, (-2) % n, n)  # x -> x^(2h-1), y -> y x^2 = x^-2 y
        x, y = DihedralElement.x(n), DihedralElement.y(n)
        G = dn_semidirect_c2(n, phi)
        e = DihedralElement.identity(n)
        K = G.generated([(x * x, 0), (y, 0)])
        g1, g2 = (y * x, 0), (e, 1)
        is_aut = all(aut_apply(phi, a * b) == aut_apply(phi, a) * aut_apply(phi, b) for a in dn_group(n).elements for b in dn_group(n).elements)
        checks = [
            ("action x -> x^(2h-1), y -> y x^2 is an automorphism", is_aut),
            ("action has order 2", all(aut_apply(phi, aut_apply(phi, g)) == g for g in dn_group(n).elements)
             and any(aut_apply(phi, g) != g for g in dn_group(n).elements)),
            ("conjugation by g2 realises the action", G.prod(g2, (x, 0), g2) == (aut_apply(phi, x), 0)
             and G.prod(g2, (y, 0), g2) == (aut_apply(phi, y), 0)),
        ] + _dd_checks(G, n, K, g1, g2)
        out.append(GroupConstruction("semidirect D_n x| C_2", n, G.order, checks, {"h": h, "center_order": len(G.center())}))
    return out


# --------------------------------------------------------------------------
# D_2 checks
# --------------------------------------------------------------------------


def d2_checks() -> list[tuple[str, bool]]:
    """(y,y; yx,1) ~ (y,y; x,x) by moves, and (y,y; yx,1) ~ (yx,yx; x,1) by Aut(D_2)."""
    n = 2
    e, x, y = DihedralElement.identity(n), DihedralElement.x(n), DihedralElement.y(n)
    yx = y * x
    v1 = HurwitzVector.from_entries(n, 1, [y, y], [yx, e])
    v2 = HurwitzVector.from_entries(n, 1, [y, y], [x, x])
    v3 = HurwitzVector.from_entries(n, 1, [yx, yx], [x, e])
    direct = any(tuple(t[c] for c in v1.codes) == v3.codes for t in automorphism_tables(n))
    return [
        ("all three are Hurwitz systems of D_2", all(bool(is_hurwitz_system(v)) for v in (v1, v2, v3))),
        ("(y,y; yx,1) ~ (y,y; x,x) under moves", _same_orbit_mod_aut(v1, v2, mod_aut=False)),
        ("(y,y; yx,1) -> (yx,yx; x,1) by one automorphism of D_2", direct),
        ("(y,y; yx,1) ~ (yx,yx; x,1) under moves and Aut(D_2)", _same_orbit_mod_aut(v1, v3)),
    ]
