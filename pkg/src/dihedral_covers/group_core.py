"""Exact arithmetic in the dihedral group D_n and its binary cover.

Elements of D_n are written x^i y^j with 0 <= i < n, j in {0, 1}, subject to
x^n = y^2 = 1 and xy = yx^-1.  Elements of the binary dihedral group are
written xi^p eta^e with xi of order 2n, eta^2 = xi^n and eta xi eta^-1 = xi^-1.

Besides the value types, every group has an integer encoding used by the
vectorised engines: an element x^i y^j has code ``2*i + j``, so comparing codes
is the same as comparing ``(rot, refl)`` lexicographically.  Code 0 is the
identity.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from itertools import permutations
from typing import Iterable

import numpy as np


class ModulusError(ValueError):
    """Operands live in dihedral groups of different order."""


class ElementParseError(ValueError):
    pass


def _check_modulus(n: int) -> None:
    if n < 2:
        raise ValueError(f"dihedral modulus must be >= 2, got {n}")


@dataclass(frozen=True, order=True)
class DihedralElement:
    rot: int
    refl: int
    n: int

    def __post_init__(self):
        _check_modulus(self.n)
        if not 0 <= self.rot < self.n:
            raise ValueError(f"rotation exponent {self.rot} out of range for n={self.n}")
        if self.refl not in (0, 1):
            raise ValueError(f"reflection bit must be 0 or 1, got {self.refl}")

    @classmethod
    def identity(cls, n: int) -> DihedralElement:
        return cls(0, 0, n)

    @classmethod
    def x(cls, n: int, power: int = 1) -> DihedralElement:
        return cls(power % n, 0, n)

    @classmethod
    def y(cls, n: int) -> DihedralElement:
        return cls(0, 1, n)

    @classmethod
    def from_code(cls, code: int, n: int) -> DihedralElement:
        return cls(int(code) >> 1, int(code) & 1, n)

    @property
    def code(self) -> int:
        return 2 * self.rot + self.refl

    @property
    def is_identity(self) -> bool:
        return self.rot == 0 and self.refl == 0

    @property
    def is_reflection(self) -> bool:
        return self.refl == 1

    def __mul__(self, other: DihedralElement) -> DihedralElement:
        return dn_mul(self, other)

    def inverse(self) -> DihedralElement:
        return dn_inverse(self)

    def order(self) -> int:
        if self.refl:
            return 2
        return self.n // math.gcd(self.n, self.rot)

    def __str__(self) -> str:
        return format_element(self)


def dn_mul(a: DihedralElement, b: DihedralElement, n: int | None = None) -> DihedralElement:
    """Product in D_n: (x^a y^s)(x^c y^t) = x^(a + (-1)^s c) y^(s+t)."""
    if a.n != b.n or (n is not None and a.n != n):
        raise ModulusError(f"cannot multiply elements of D_{a.n} and D_{b.n}")
    sign = -1 if a.refl else 1
    return DihedralElement((a.rot + sign * b.rot) % a.n, a.refl ^ b.refl, a.n)


def dn_inverse(a: DihedralElement) -> DihedralElement:
    if a.refl:
        return a
    return DihedralElement((-a.rot) % a.n, 0, a.n)


def dn_conj(a: DihedralElement, g: DihedralElement) -> DihedralElement:
    """g a g^-1."""
    return dn_mul(dn_mul(g, a), dn_inverse(g))


def commutator(a, b):
    """[a, b] = a b a^-1 b^-1, for either group."""
    return a * b * a.inverse() * b.inverse()


def dn_elements(n: int) -> list[DihedralElement]:
    """All 2n elements in code order."""
    _check_modulus(n)
    return [DihedralElement.from_code(c, n) for c in range(2 * n)]


_ELEMENT_RE = re.compile(r"^(?:(e|1)|x(?:\^(-?\d+))?(\*?y)?|(y))$")


def parse_element(text: str, n: int) -> DihedralElement:
    """Parse ``e``, ``x^i``, ``y`` or ``x^i*y`` (``x`` and ``x*y`` mean i = 1)."""
    s = text.strip().replace(" ", "")
    m = _ELEMENT_RE.match(s)
    if not m:
        raise ElementParseError(f"cannot parse dihedral element {text!r}")
    if m.group(1):
        return DihedralElement.identity(n)
    if m.group(4):
        return DihedralElement.y(n)
    i = int(m.group(2)) if m.group(2) is not None else 1
    if not 0 <= i < n:
        raise ElementParseError(f"exponent {i} out of range 0..{n - 1} in {text!r}")
    return DihedralElement(i, 1 if m.group(3) else 0, n)


def format_element(a: DihedralElement) -> str:
    if a.rot == 0:
        return "y" if a.refl else "e"
    base = "x" if a.rot == 1 else f"x^{a.rot}"
    return base + "*y" if a.refl else base


# --------------------------------------------------------------------------
# Conjugacy classes
# --------------------------------------------------------------------------


class ClassKind(IntEnum):
    IDENTITY = 0
    ROTATION = 1
    CENTRAL_ROTATION = 2
    REFL_EVEN = 3
    REFL_ODD = 4
    REFL_ALL = 5


_KIND_NAMES = {
    ClassKind.IDENTITY: "Identity",
    ClassKind.CENTRAL_ROTATION: "CentralRotation",
    ClassKind.REFL_EVEN: "ReflEven",
    ClassKind.REFL_ODD: "ReflOdd",
    ClassKind.REFL_ALL: "ReflAll",
}
_CLASS_RE = re.compile(r"^Rotation\((\d+)\)$")


@dataclass(frozen=True, order=True)
class ConjClassId:
    """Conjugacy class label; rotations carry the exponent min(i, n - i)."""

    kind: ClassKind
    index: int = 0

    @property
    def is_reflection(self) -> bool:
        return self.kind >= ClassKind.REFL_EVEN

    @property
    def is_rotation(self) -> bool:
        return self.kind in (ClassKind.ROTATION, ClassKind.CENTRAL_ROTATION)

    def representative(self, n: int) -> DihedralElement:
        if self.kind == ClassKind.IDENTITY:
            return DihedralElement.identity(n)
        if self.kind == ClassKind.ROTATION:
            return DihedralElement(self.index, 0, n)
        if self.kind == ClassKind.CENTRAL_ROTATION:
            return DihedralElement(n // 2, 0, n)
        if self.kind == ClassKind.REFL_ODD:
            return DihedralElement(1, 1, n)
        return DihedralElement.y(n)

    def element_order(self, n: int) -> int:
        return self.representative(n).order()

    def label(self) -> str:
        if self.kind == ClassKind.ROTATION:
            return f"Rotation({self.index})"
        return _KIND_NAMES[self.kind]

    __str__ = label

    @classmethod
    def parse(cls, text: str, n: int) -> ConjClassId:
        s = text.strip()
        m = _CLASS_RE.match(s)
        if m:
            i = int(m.group(1))
            if not 0 < i < n or i > n - i:
                raise ValueError(f"Rotation({i}) is not a class label for n={n}")
            if 2 * i == n:
                return cls(ClassKind.CENTRAL_ROTATION)
            return cls(ClassKind.ROTATION, i)
        for kind, name in _KIND_NAMES.items():
            if s == name:
                cid = cls(kind)
                if cid not in conjugacy_classes(n) and kind != ClassKind.IDENTITY:
                    raise ValueError(f"class {name} does not exist for n={n}")
                return cid
        raise ValueError(f"unknown conjugacy class {text!r}")


def dn_conjugacy_class(a: DihedralElement, n: int | None = None) -> ConjClassId:
    n = a.n if n is None else n
    if a.n != n:
        raise ModulusError(f"element of D_{a.n} used with n={n}")
    if n < 3:
        raise ValueError("conjugacy class labels need n >= 3")
    if a.refl:
        if n % 2:
            return ConjClassId(ClassKind.REFL_ALL)
        return ConjClassId(ClassKind.REFL_ODD if a.rot % 2 else ClassKind.REFL_EVEN)
    if a.rot == 0:
        return ConjClassId(ClassKind.IDENTITY)
    if 2 * a.rot == n:
        return ConjClassId(ClassKind.CENTRAL_ROTATION)
    return ConjClassId(ClassKind.ROTATION, min(a.rot, n - a.rot))


def class_members(cid: ConjClassId, n: int) -> frozenset[DihedralElement]:
    return frozenset(a for a in dn_elements(n) if dn_conjugacy_class(a, n) == cid)


@lru_cache(maxsize=None)
def conjugacy_classes(n: int) -> tuple[ConjClassId, ...]:
    """All classes of D_n (n >= 3), identity first, in label order."""
    return tuple(sorted({dn_conjugacy_class(a, n) for a in dn_elements(n)}))


def nontrivial_classes(n: int) -> tuple[ConjClassId, ...]:
    return tuple(c for c in conjugacy_classes(n) if c.kind != ClassKind.IDENTITY)


# --------------------------------------------------------------------------
# Automorphisms
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class DihedralAut:
    """The automorphism x -> x^a, y -> x^b y of D_n (n >= 3)."""

    a: int
    b: int
    n: int

    def __post_init__(self):
        if math.gcd(self.a, self.n) != 1:
            raise ValueError(f"a={self.a} is not a unit mod {self.n}")

    def __call__(self, g: DihedralElement) -> DihedralElement:
        return aut_apply(self, g)

    def compose(self, other: DihedralAut) -> DihedralAut:
        """self after other."""
        n = self.n
        return DihedralAut(self.a * other.a % n, (self.a * other.b + self.b) % n, n)

    def inverse(self) -> DihedralAut:
        ai = pow(self.a, -1, self.n)
        return DihedralAut(ai, (-ai * self.b) % self.n, self.n)

    def code_table(self) -> np.ndarray:
        return np.array([aut_apply(self, g).code for g in dn_elements(self.n)], dtype=np.int64)


def aut_apply(f: DihedralAut, g: DihedralElement) -> DihedralElement:
    if f.n != g.n:
        raise ModulusError(f"automorphism of D_{f.n} applied to element of D_{g.n}")
    return DihedralElement((f.a * g.rot + f.b * g.refl) % f.n, g.refl, f.n)


def dn_automorphisms(n: int) -> list[DihedralAut]:
    if n < 3:
        raise ValueError("the (a, b) parametrisation of Aut(D_n) needs n >= 3")
    return [DihedralAut(a, b, n) for a in range(1, n) if math.gcd(a, n) == 1 for b in range(n)]


def inner_automorphism(g: DihedralElement) -> DihedralAut:
    """Conjugation by g as an (a, b) pair."""
    n = g.n
    if g.refl:
        return DihedralAut(n - 1, (2 * g.rot) % n, n)
    return DihedralAut(1, (2 * g.rot) % n, n)


@lru_cache(maxsize=None)
def automorphism_tables(n: int) -> tuple[tuple[int, ...], ...]:
    """Every automorphism of D_n as a permutation of element codes.

    For n >= 3 this is the (a, b) family.  For n = 2 the group is the Klein
    four-group and automorphisms are found by brute force over images of x, y.
    """
    if n >= 3:
        return tuple(tuple(int(c) for c in f.code_table()) for f in dn_automorphisms(n))
    _check_modulus(n)
    tables = []
    for X, Y in permutations(range(1, 4), 2):
        img = {}
        for i in range(2):
            for j in range(2):
                val = 0
                for _ in range(i):
                    val = _mul_codes_small(val, X, n)
                for _ in range(j):
                    val = _mul_codes_small(val, Y, n)
                img[2 * i + j] = val
        if len(set(img.values())) == 4 and all(
            img[_mul_codes_small(p, q, n)] == _mul_codes_small(img[p], img[q], n)
            for p in range(4)
            for q in range(4)
        ):
            tables.append(tuple(img[c] for c in range(4)))
    return tuple(sorted(set(tables)))


def _mul_codes_small(p: int, q: int, n: int) -> int:
    return dn_mul(DihedralElement.from_code(p, n), DihedralElement.from_code(q, n)).code


def automorphism_generator_tables(n: int) -> tuple[tuple[int, ...], ...]:
    """A generating set of Aut(D_n): y -> xy plus x -> x^a for the units a."""
    if n < 3:
        return automorphism_tables(n)
    gens = [DihedralAut(1, 1, n)]
    gens += [DihedralAut(a, 0, n) for a in range(2, n) if math.gcd(a, n) == 1]
    return tuple(tuple(int(c) for c in f.code_table()) for f in gens)


def class_image(f: DihedralAut, cid: ConjClassId) -> ConjClassId:
    return dn_conjugacy_class(aut_apply(f, cid.representative(f.n)))


# --------------------------------------------------------------------------
# Subgroups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    n: int
    elements: frozenset[DihedralElement]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_all(self) -> bool:
        return self.order == 2 * self.n

    @property
    def is_rotations(self) -> bool:
        """True when the subgroup lies inside the rotation subgroup."""
        return all(not g.refl for g in self.elements)

    @property
    def index_in_rotations(self) -> int:
        """[R : H ∩ R]."""
        return self.n // sum(1 for g in self.elements if not g.refl)


def dn_subgroup_generated(gens: Iterable[DihedralElement], n: int) -> Subgroup:
    """Closure of ``gens`` under multiplication (finite group, so inverses come free)."""
    gens = list(gens)
    for g in gens:
        if g.n != n:
            raise ModulusError(f"generator from D_{g.n} used with n={n}")
    seen = {DihedralElement.identity(n)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                k = dn_mul(h, g)
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return Subgroup(n, frozenset(seen))


def generates_dn(codes: Iterable[int], n: int) -> bool:
    """Closed-form test that the given element codes generate all of D_n.

    The rotation part of <S> is generated by the rotations in S and the
    quotients of pairs of reflections, so S generates D_n iff it contains a
    reflection and gcd(n, those exponents) = 1.
    """
    g = n
    first_refl = None
    for c in codes:
        rot, refl = c >> 1, c & 1
        if refl:
            if first_refl is None:
                first_refl = rot
            else:
                g = math.gcd(g, rot - first_refl)
        else:
            g = math.gcd(g, rot)
    return first_refl is not None and g == 1


# --------------------------------------------------------------------------
# Binary dihedral group
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class BinaryDihedralElement:
    pow: int
    eta: int
    n: int

    def __post_init__(self):
        _check_modulus(self.n)
        if not 0 <= self.pow < 2 * self.n:
            raise ValueError(f"xi exponent {self.pow} out of range for n={self.n}")
        if self.eta not in (0, 1):
            raise ValueError("eta bit must be 0 or 1")

    @classmethod
    def identity(cls, n: int) -> BinaryDihedralElement:
        return cls(0, 0, n)

    @classmethod
    def xi(cls, n: int, power: int = 1) -> BinaryDihedralElement:
        return cls(power % (2 * n), 0, n)

    @classmethod
    def eta_(cls, n: int) -> BinaryDihedralElement:
        return cls(0, 1, n)

    @property
    def code(self) -> int:
        return 2 * self.pow + self.eta

    @property
    def is_identity(self) -> bool:
        return self.pow == 0 and self.eta == 0

    def __mul__(self, other: BinaryDihedralElement) -> BinaryDihedralElement:
        return bd_mul(self, other)

    def inverse(self) -> BinaryDihedralElement:
        n = self.n
        if self.eta:
            # (xi^p eta)^-1 = xi^(p+n) eta since (xi^p eta)^2 = xi^n
            return BinaryDihedralElement((self.pow + n) % (2 * n), 1, n)
        return BinaryDihedralElement((-self.pow) % (2 * n), 0, n)

    def __pow__(self, k: int) -> BinaryDihedralElement:
        out = BinaryDihedralElement.identity(self.n)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __str__(self) -> str:
        p = "" if self.pow == 0 else ("xi" if self.pow == 1 else f"xi^{self.pow}")
        if self.eta:
            return f"{p}*eta" if p else "eta"
        return p or "1"


def bd_mul(p: BinaryDihedralElement, q: BinaryDihedralElement) -> BinaryDihedralElement:
    if p.n != q.n:
        raise ModulusError(f"cannot multiply elements of binary D_{p.n} and D_{q.n}")
    n = p.n
    sign = -1 if p.eta else 1
    return BinaryDihedralElement((p.pow + sign * q.pow + n * (p.eta & q.eta)) % (2 * n), p.eta ^ q.eta, n)


def bd_lift(a: DihedralElement) -> BinaryDihedralElement:
    """Canonical section x^i y^j -> xi^i eta^j, 0 <= i < n."""
    return BinaryDihedralElement(a.rot, a.refl, a.n)


def bd_project(p: BinaryDihedralElement) -> DihedralElement:
    return DihedralElement(p.pow % p.n, p.eta, p.n)


def bd_central(n: int) -> BinaryDihedralElement:
    """xi^n, the generator of the kernel of the projection."""
    return BinaryDihedralElement(n, 0, n)


def bd_elements(n: int) -> list[BinaryDihedralElement]:
    return [BinaryDihedralElement(p, e, n) for p in range(2 * n) for e in range(2)]


# --------------------------------------------------------------------------
# Integer tables for the vectorised engines
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DnTables:
    """Lookup tables over element codes.  Indexing works on ints and arrays alike."""

    n: int
    mul: np.ndarray  # (2n, 2n)
    inv: np.ndarray  # (2n,)
    bd_mul: np.ndarray  # (4n, 4n) over binary codes 2*pow + eta
    bd_inv: np.ndarray
    lift: np.ndarray  # D_n code -> canonical binary code

    @property
    def size(self) -> int:
        return 2 * self.n

    def conj(self, a, g):
        """g a g^-1 on codes."""
        return self.mul[self.mul[g, a], self.inv[g]]

    def comm(self, a, b):
        return self.mul[self.mul[a, b], self.mul[self.inv[a], self.inv[b]]]

    def bd_comm(self, a, b):
        return self.bd_mul[self.bd_mul[a, b], self.bd_mul[self.bd_inv[a], self.bd_inv[b]]]


@lru_cache(maxsize=None)
def tables(n: int) -> DnTables:
    _check_modulus(n)
    els = dn_elements(n)
    m = len(els)
    mul = np.array([[dn_mul(a, b).code for b in els] for a in els], dtype=np.int64)
    inv = np.array([dn_inverse(a).code for a in els], dtype=np.int64)
    bels = bd_elements(n)
    bmul = np.empty((4 * n, 4 * n), dtype=np.int64)
    for p in bels:
        for q in bels:
            bmul[p.code, q.code] = bd_mul(p, q).code
    binv = np.array([p.inverse().code for p in bels], dtype=np.int64)
    lift = np.array([bd_lift(a).code for a in els], dtype=np.int64)
    for arr in (mul, inv, bmul, binv, lift):
        arr.setflags(write=False)
    assert mul.shape == (m, m)
    return DnTables(n, mul, inv, bmul, binv, lift)
