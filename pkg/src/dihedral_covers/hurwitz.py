"""Hurwitz vectors over D_n.

A (g', d)-Hurwitz vector is ``(c_1..c_d; a_1, b_1, .., a_g', b_g')``.  It is a
Hurwitz generating system (HS) when every c_i is nontrivial, the entries
generate D_n and ``c_1...c_d * [a_1,b_1]...[a_g',b_g'] = 1``.
"""
from __future__ import annotations

import math
import re
from collections.abc import Iterator, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .group_core import (
    ClassKind,
    ConjClassId,
    DihedralElement,
    class_image,
    commutator,
    dn_conjugacy_class,
    dn_mul,
    dn_subgroup_generated,
    format_element,
    generates_dn,
    nontrivial_classes,
    parse_element,
    tables,
)

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """A brute-force computation would exceed its configured budget."""


class VectorParseError(ValueError):
    pass


@dataclass(frozen=True)
class HurwitzVector:
    n: int
    g_prime: int
    d: int
    c: tuple[DihedralElement, ...]
    ab: tuple[DihedralElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(self.c))
        object.__setattr__(self, "ab", tuple(self.ab))
        if self.g_prime < 0 or self.d < 0:
            raise ValueError("g' and d must be non-negative")
        if len(self.c) != self.d:
            raise ValueError(f"expected {self.d} local monodromies, got {len(self.c)}")
        if len(self.ab) != 2 * self.g_prime:
            raise ValueError(f"expected {2 * self.g_prime} handle entries, got {len(self.ab)}")
        for e in self.c + self.ab:
            if e.n != self.n:
                raise ValueError(f"entry {e} does not belong to D_{self.n}")

    @classmethod
    def from_entries(cls, n: int, g_prime: int, c: Sequence, ab: Sequence = ()) -> HurwitzVector:
        """Build from elements or element strings."""
        conv = [e if isinstance(e, DihedralElement) else parse_element(e, n) for e in c]
        conv_ab = [e if isinstance(e, DihedralElement) else parse_element(e, n) for e in ab]
        return cls(n, g_prime, len(conv), tuple(conv), tuple(conv_ab))

    @classmethod
    def from_codes(cls, n: int, g_prime: int, d: int, codes: Sequence[int]) -> HurwitzVector:
        els = tuple(DihedralElement.from_code(int(k), n) for k in codes)
        return cls(n, g_prime, d, els[:d], els[d:])

    @property
    def entries(self) -> tuple[DihedralElement, ...]:
        return self.c + self.ab

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(e.code for e in self.entries)

    @property
    def a(self) -> tuple[DihedralElement, ...]:
        return self.ab[0::2]

    @property
    def b(self) -> tuple[DihedralElement, ...]:
        return self.ab[1::2]

    def __str__(self) -> str:
        return format_vector(self)

    @classmethod
    def parse(cls, text: str) -> HurwitzVector:
        return parse_vector(text)


_VEC_RE = re.compile(
    r"^\s*n\s*=\s*(\d+)\s+g\s*=\s*(\d+)\s+c\s*=\s*\[([^\]]*)\]\s+ab\s*=\s*\[([^\]]*)\]\s*$"
)


def parse_vector(text: str) -> HurwitzVector:
    """Parse ``n=<int> g=<int> c=[..] ab=[..]``."""
    m = _VEC_RE.match(text)
    if not m:
        raise VectorParseError(f"cannot parse Hurwitz vector {text!r}")
    n, g = int(m.group(1)), int(m.group(2))
    if n < 2:
        raise VectorParseError("n must be at least 2")

    def items(s):
        s = s.strip()
        return [t for t in (p.strip() for p in s.split(",")) if t] if s else []

    try:
        c = [parse_element(t, n) for t in items(m.group(3))]
        ab = [parse_element(t, n) for t in items(m.group(4))]
    except ValueError as exc:
        raise VectorParseError(str(exc)) from exc
    if len(ab) != 2 * g:
        raise VectorParseError(f"g={g} needs {2 * g} handle entries, got {len(ab)}")
    return HurwitzVector(n, g, len(c), tuple(c), tuple(ab))


def format_vector(v: HurwitzVector) -> str:
    c = ",".join(format_element(e) for e in v.c)
    ab = ",".join(format_element(e) for e in v.ab)
    return f"n={v.n} g={v.g_prime} c=[{c}] ab=[{ab}]"


# --------------------------------------------------------------------------
# Evaluation and HS membership
# --------------------------------------------------------------------------


def evaluate(v: HurwitzVector) -> DihedralElement:
    out = DihedralElement.identity(v.n)
    for c in v.c:
        out = dn_mul(out, c)
    for a, b in zip(v.a, v.b):
        out = dn_mul(out, commutator(a, b))
    return out


@dataclass(frozen=True)
class HSCheck:
    ok: bool
    reason: str | None = None  # fails_nontrivial | fails_generation | fails_evaluation

    def __bool__(self) -> bool:
        return self.ok


def is_hurwitz_system(v: HurwitzVector) -> HSCheck:
    if any(c.is_identity for c in v.c):
        return HSCheck(False, "fails_nontrivial")
    if not dn_subgroup_generated(v.entries, v.n).is_all:
        return HSCheck(False, "fails_generation")
    if not evaluate(v).is_identity:
        return HSCheck(False, "fails_evaluation")
    return HSCheck(True)


# --------------------------------------------------------------------------
# Class functions
# --------------------------------------------------------------------------


class NuType(Mapping):
    """Class function ConjClassId -> multiplicity; zero entries are dropped."""

    __slots__ = ("_items",)

    def __init__(self, counts: Mapping[ConjClassId, int] | None = None):
        items = {}
        for k, v in (counts or {}).items():
            if v < 0:
                raise ValueError("class multiplicities must be non-negative")
            if k.kind == ClassKind.IDENTITY and v:
                raise ValueError("the identity class cannot carry local monodromy")
            if v:
                items[k] = int(v)
        self._items = tuple(sorted(items.items()))

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def get(self, key, default=0):
        for k, v in self._items:
            if k == key:
                return v
        return default

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, NuType):
            return self._items == other._items
        return NotImplemented

    def __lt__(self, other: NuType) -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return tuple((k.kind, k.index, v) for k, v in self._items)

    @property
    def total(self) -> int:
        return sum(v for _, v in self._items)

    def support(self) -> frozenset[ConjClassId]:
        return frozenset(k for k, _ in self._items)

    def reflection_count(self) -> int:
        return sum(v for k, v in self._items if k.is_reflection)

    def to_labels(self) -> dict[str, int]:
        return {k.label(): v for k, v in self._items}

    @classmethod
    def parse(cls, text: str, n: int) -> NuType:
        """Parse ``Rotation(1):2,ReflAll:2`` (unknown class names raise)."""
        counts: dict[ConjClassId, int] = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            name, _, num = part.rpartition(":")
            if not name:
                raise ValueError(f"expected <class>:<count>, got {part!r}")
            cid = ConjClassId.parse(name, n)
            counts[cid] = counts.get(cid, 0) + int(num)
        return cls(counts)

    def apply(self, f) -> NuType:
        """Push forward along an automorphism."""
        out: dict[ConjClassId, int] = {}
        for k, v in self._items:
            img = class_image(f, k)
            out[img] = out.get(img, 0) + v
        return NuType(out)

    def __repr__(self):
        inner = ", ".join(f"{k.label()}: {v}" for k, v in self._items)
        return f"NuType({{{inner}}})"


def nu_type(v: HurwitzVector) -> NuType:
    counts: dict[ConjClassId, int] = {}
    for c in v.c:
        if c.is_identity:
            raise ValueError("identity among the local monodromies")
        cid = dn_conjugacy_class(c, v.n)
        counts[cid] = counts.get(cid, 0) + 1
    return NuType(counts)


def sigma_set(v: HurwitzVector) -> frozenset[ConjClassId]:
    return nu_type(v).support()


def _abelian_image(cid: ConjClassId, n: int) -> tuple[int, int]:
    """Image in D_n^ab: Z/2 via (0, refl) for n odd, Z/2 x Z/2 via (rot, refl) for n even."""
    rep = cid.representative(n)
    if n % 2:
        return (0, rep.refl)
    return (rep.rot % 2, rep.refl)


def is_admissible(nu: Mapping[ConjClassId, int], n: int) -> bool:
    s0 = s1 = 0
    for cid, k in nu.items():
        u, w = _abelian_image(cid, n)
        s0 += k * u
        s1 += k * w
    return s0 % 2 == 0 and s1 % 2 == 0


def dn_element_orders(n: int) -> set[int]:
    return {m for m in range(2, n + 1) if n % m == 0} | {2}


class GenusError(ValueError):
    pass


def hurwitz_genus(n: int, g_prime: int, orders: Sequence[int]) -> int:
    """Genus g from 2(g-1) = 2n [2(g'-1) + sum(1 - 1/m_i)]."""
    valid = dn_element_orders(n)
    for m in orders:
        if m not in valid:
            raise GenusError(f"{m} is not the order of a nontrivial element of D_{n}")
    rhs = 2 * n * (2 * (g_prime - 1) + sum((1 - Fraction(1, m) for m in orders), Fraction(0)))
    if rhs.denominator != 1 or rhs.numerator % 2:
        raise GenusError(f"2(g-1) = {rhs} is not an even integer")
    g = rhs.numerator // 2 + 1
    if g < 0:
        raise GenusError(f"2(g-1) = {rhs} gives negative genus")
    return g


# --------------------------------------------------------------------------
# Exhaustive enumeration
# --------------------------------------------------------------------------


def _class_index_table(n: int) -> tuple[np.ndarray, tuple[ConjClassId, ...]]:
    """Map element code -> position in nontrivial_classes(n), -1 for the identity."""
    classes = nontrivial_classes(n)
    pos = {c: i for i, c in enumerate(classes)}
    arr = np.full(2 * n, -1, dtype=np.int64)
    for code in range(1, 2 * n):
        arr[code] = pos[dn_conjugacy_class(DihedralElement.from_code(code, n))]
    return arr, classes


def nu_count_matrix(codes: np.ndarray, n: int, d: int) -> np.ndarray:
    """Per-row class multiplicities of the first d columns, shape (N, #classes)."""
    idx, classes = _class_index_table(n)
    out = np.zeros((codes.shape[0], len(classes)), dtype=np.int64)
    for j in range(d):
        np.add.at(out, (np.arange(codes.shape[0]), idx[codes[:, j]]), 1)
    return out


def nu_to_vector(nu: NuType, n: int) -> np.ndarray:
    classes = nontrivial_classes(n)
    return np.array([nu.get(c, 0) for c in classes], dtype=np.int64)


def generation_mask(codes: np.ndarray, n: int) -> np.ndarray:
    """Vectorised form of :func:`generates_dn` over the rows of ``codes``."""
    rot = codes >> 1
    refl = (codes & 1).astype(bool)
    has_refl = refl.any(axis=1)
    first = np.argmax(refl, axis=1)
    r0 = rot[np.arange(codes.shape[0]), first]
    vals = np.where(refl, rot - r0[:, None], rot) % n
    g = np.gcd.reduce(np.concatenate([np.full((codes.shape[0], 1), n), vals], axis=1), axis=1)
    return has_refl & (g == 1)


def candidate_count(n: int, g_prime: int, d: int) -> int:
    return (2 * n) ** (d + 2 * g_prime)


def _hs_chunk(n, g_prime, d, lead_value, free_slots):
    """All HS whose first free slot equals ``lead_value``."""
    T = tables(n)
    m = 2 * n
    k = d + 2 * g_prime
    nfree = len(free_slots)
    grids = np.indices((m,) * (nfree - 1)).reshape(nfree - 1, -1) if nfree > 1 else np.zeros((0, 1), dtype=np.int64)
    rows = grids.shape[1]
    cols = [None] * k
    for s_i, slot in enumerate(free_slots):
        cols[slot] = np.full(rows, lead_value, dtype=np.int64) if s_i == 0 else grids[s_i - 1].astype(np.int64)
    comm = np.zeros(rows, dtype=np.int64)
    for i in range(g_prime):
        a, b = cols[d + 2 * i], cols[d + 2 * i + 1]
        comm = T.mul[comm, T.comm(a, b)]
    if d >= 1:
        prefix = np.zeros(rows, dtype=np.int64)
        for j in range(d - 1):
            prefix = T.mul[prefix, cols[j]]
        cols[d - 1] = T.mul[T.inv[prefix], T.inv[comm]]
        ok = np.ones(rows, dtype=bool)
        for j in range(d):
            ok &= cols[j] != 0
    else:
        ok = comm == 0
    arr = np.stack(cols, axis=1) if k else np.zeros((rows, 0), dtype=np.int64)
    arr = arr[ok]
    return arr[generation_mask(arr, n)] if len(arr) else arr


def hs_codes(
    n: int,
    g_prime: int,
    d: int,
    nu: NuType | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
) -> np.ndarray:
    """All of HS(D_n; g', d) as a lexicographically sorted (N, d + 2g') code array.

    When d >= 1 the last local monodromy is solved from the evaluation, so only
    (2n)^(d+2g'-1) tuples are materialised; the work is sharded on the value of
    the first free slot and merged back into one global order.
    """
    k = d + 2 * g_prime
    if candidate_count(n, g_prime, d) > budget:
        raise BudgetExceeded(
            f"(2n)^(d+2g') = {candidate_count(n, g_prime, d)} exceeds budget {budget}"
        )
    if k == 0 or (d == 1 and g_prime == 0):
        return np.zeros((0, k), dtype=np.int64)
    free_slots = [s for s in range(k) if not (d >= 1 and s == d - 1)]
    work = list(range(2 * n))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda v: _hs_chunk(n, g_prime, d, v, free_slots), work))
    else:
        parts = [_hs_chunk(n, g_prime, d, v, free_slots) for v in work]
    arr = np.concatenate(parts, axis=0)
    if nu is not None:
        if nu.total != d:
            return arr[:0]
        target = nu_to_vector(nu, n)
        arr = arr[(nu_count_matrix(arr, n, d) == target).all(axis=1)]
    order = np.lexsort(arr.T[::-1])
    return np.ascontiguousarray(arr[order])


def enumerate_hs(
    n: int,
    g_prime: int,
    d: int,
    nu: NuType | None = None,
    *,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
) -> Iterator[HurwitzVector]:
    """Stream HS(D_n; g', d) in lexicographic (rot, refl) order, optionally for one nu."""
    for row in hs_codes(n, g_prime, d, nu, budget=budget, jobs=jobs):
        yield HurwitzVector.from_codes(n, g_prime, d, row.tolist())


def brute_force_hs(n: int, g_prime: int, d: int) -> list[tuple[int, ...]]:
    """Plain loop over all candidate tuples; the oracle for :func:`hs_codes`."""
    T = tables(n)
    out = []
    for tup in product(range(2 * n), repeat=d + 2 * g_prime):
        if any(c == 0 for c in tup[:d]):
            continue
        ev = 0
        for c in tup[:d]:
            ev = int(T.mul[ev, c])
        for i in range(g_prime):
            ev = int(T.mul[ev, T.comm(tup[d + 2 * i], tup[d + 2 * i + 1])])
        if ev == 0 and generates_dn(tup, n):
            out.append(tup)
    return out


def encode_rows(codes: np.ndarray, n: int) -> np.ndarray:
    """Mixed-radix integer key per row; preserves lexicographic order."""
    key = np.zeros(codes.shape[0], dtype=np.int64)
    for j in range(codes.shape[1]):
        key = key * (2 * n) + codes[:, j]
    return key


def nu_from_counts(counts: Sequence[int], n: int) -> NuType:
    return NuType(dict(zip(nontrivial_classes(n), (int(c) for c in counts))))


def class_orders(nu: NuType, n: int) -> tuple[int, ...]:
    return tuple(sorted(o for cid, k in nu.items() for o in [cid.element_order(n)] * k))


def gcd_all(values, n: int) -> int:
    g = n
    for v in values:
        g = math.gcd(g, v)
    return g
