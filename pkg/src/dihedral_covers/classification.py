"""Normal forms and the complete invariant of dihedral Hurwitz systems.

A vector is sorted into one of four cases by its branching data:

* ``Etale``: no branch points; the datum is the Schur bit (n even).
* ``WithReflections``: some local monodromy is a reflection and g' >= 1; the
  class function alone decides the orbit.
* ``RotationsOnly``: only rotations, g' >= 2; the class function plus a Z/2
  datum when n is even and the central rotation is absent.
* ``SmallFallback``: everything else (g' = 0, or g' = 1 with rotations only);
  the lexicographically least member of the orbit, found by search.

``canonical_invariant`` takes the least normal form over Aut(D_n).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from typing import Any, Mapping, Sequence

import numpy as np

from .group_core import (
    ClassKind,
    ConjClassId,
    DihedralElement,
    automorphism_tables,
    nontrivial_classes,
)
from .hurwitz import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    HurwitzVector,
    NuType,
    encode_rows,
    hs_codes,
    is_admissible,
    is_hurwitz_system,
    nu_count_matrix,
    nu_from_counts,
    nu_type,
)
from .invariants import rotation_epsilon_bit, rotation_epsilon_bits, schur_bits, schur_lift_product
from .mcg_moves import DEFAULT_CAP, Partition, decode_keys, orbit_closure, partition_codes


class CaseTag(IntEnum):
    ETALE = 0
    WITH_REFLECTIONS = 1
    ROTATIONS_ONLY = 2
    SMALL_FALLBACK = 3

    @property
    def label(self) -> str:
        return {0: "Etale", 1: "WithReflections", 2: "RotationsOnly", 3: "SmallFallback"}[int(self)]


class NotHurwitzSystem(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CanonicalForm:
    """Case tag plus parameters; ``representative`` is a Hurwitz system in the same class."""

    case: CaseTag
    n: int
    g_prime: int
    d: int
    params: tuple[tuple[str, Any], ...]
    representative: HurwitzVector = field(compare=False, hash=False)

    def sort_key(self) -> tuple:
        return (int(self.case), tuple(v for _, v in self.params))

    def __lt__(self, other: CanonicalForm) -> bool:
        return self.sort_key() < other.sort_key()

    def param(self, name: str):
        return dict(self.params)[name]

    def to_dict(self) -> dict:
        def plain(v):
            return list(plain(x) for x in v) if isinstance(v, tuple) else v

        return {
            "case": self.case.label,
            "n": self.n,
            "g_prime": self.g_prime,
            "d": self.d,
            "params": {k: plain(v) for k, v in self.params},
            "representative": str(self.representative),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


# --------------------------------------------------------------------------
# Forms from (class function, Z/2 datum)
# --------------------------------------------------------------------------


def rotation_labels(nu: NuType, n: int) -> tuple[int, ...]:
    """Sorted exponents min(i, n-i) of the rotation monodromies, with multiplicity."""
    out = []
    for cid, k in nu.items():
        if cid.kind == ClassKind.ROTATION:
            out += [cid.index] * k
        elif cid.kind == ClassKind.CENTRAL_ROTATION:
            out += [n // 2] * k
    return tuple(sorted(out))


def _is_fallback(g_prime: int, d: int, has_reflection: bool) -> bool:
    if d == 0:
        return g_prime == 0
    if has_reflection:
        return g_prime < 1
    return g_prime < 2


def _vec(n, g_prime, c, ab) -> HurwitzVector:
    ab = list(ab) + [DihedralElement.identity(n)] * (2 * g_prime - len(ab))
    return HurwitzVector.from_entries(n, g_prime, c, ab)


def _validated(v: HurwitzVector, nu: NuType | None = None) -> HurwitzVector:
    check = is_hurwitz_system(v)
    if not check:
        raise AssertionError(f"normal-form representative {v} is not a Hurwitz system ({check.reason})")
    if nu is not None and nu_type(v) != nu:
        raise AssertionError(f"normal-form representative {v} has the wrong class function")
    return v


@lru_cache(maxsize=4096)
def _rotations_only_h(n: int, g_prime: int, r: tuple[int, ...], central: bool, bit: int) -> int:
    """Residue h with 2h = |r| (mod n) selecting the right orbit."""
    total = sum(r)
    if n % 2:
        return total * pow(2, -1, n) % n
    k = n // 2
    h0 = (total // 2) % k
    if central:
        return h0
    X = lambda e: DihedralElement.x(n, e)
    for h in (h0, h0 + k):
        rep = _vec(n, g_prime, [X(e) for e in r], [DihedralElement.y(n), X(h), X(1)])
        if rotation_epsilon_bit(rep) == bit:
            return h
    raise AssertionError("no residue matches the epsilon bit")


def form_from_data(n: int, g_prime: int, d: int, nu: NuType, bit: int = 0) -> CanonicalForm:
    """Normal form for the non-search cases.

    ``bit`` is the Schur bit (etale, n even) or the rotation epsilon bit
    (rotations only, n even, no central rotation) and is ignored otherwise.
    """
    X = lambda e: DihedralElement.x(n, e)
    Y = lambda e: DihedralElement(e % n, 1, n)
    y, x = DihedralElement.y(n), X(1)
    refl = nu.reflection_count()
    if _is_fallback(g_prime, d, refl > 0):
        raise ValueError("this (g', d, Sigma) is handled by the search fallback")
    if d == 0:
        if n % 2:
            rep = _vec(n, g_prime, [], [y, X(0), x])
            params = ()
        else:
            rep = _vec(n, g_prime, [], [y, X(n // 2 if bit else 0), x])
            params = (("schur", int(bit)),)
        return CanonicalForm(CaseTag.ETALE, n, g_prime, d, params, _validated(rep))
    r = rotation_labels(nu, n)
    rs = sum(r)
    rots = [X(e) for e in r]
    if refl:
        if n % 2:
            c = rots + [Y(1 - rs), Y(1)] + [y] * (refl - 2)
            params = (("r", r), ("nu_refl", (refl,)))
        else:
            ev, od = sorted((nu.get(ConjClassId(ClassKind.REFL_EVEN)), nu.get(ConjClassId(ClassKind.REFL_ODD))))
            eps = (1 + od) % 2
            c = rots + [Y(eps - rs)] + [Y(1)] * (od - 1) + [y] * ev
            params = (("r", r), ("nu_refl", (ev, od)), ("eps", eps))
        rep = _vec(n, g_prime, c, [x])
        return CanonicalForm(CaseTag.WITH_REFLECTIONS, n, g_prime, d, params, _validated(rep))
    central = n % 2 == 0 and n // 2 in r
    h = _rotations_only_h(n, g_prime, r, central, int(bit))
    rep = _vec(n, g_prime, rots, [y, X(h), x])
    return CanonicalForm(CaseTag.ROTATIONS_ONLY, n, g_prime, d, (("r", r), ("h", h)), _validated(rep, nu))


# --------------------------------------------------------------------------
# Search fallback
# --------------------------------------------------------------------------

_FALLBACK_MEMO: dict[tuple[int, int, int], list[tuple[np.ndarray, tuple[int, ...]]]] = {}


def _fallback_form(v: HurwitzVector, cap: int) -> CanonicalForm:
    n, gp, d = v.n, v.g_prime, v.d
    key = int(encode_rows(np.array([v.codes], dtype=np.int64), n)[0])
    memo = _FALLBACK_MEMO.setdefault((n, gp, d), [])
    canon = None
    for keys, rep in memo:
        i = np.searchsorted(keys, key)
        if i < len(keys) and keys[i] == key:
            canon = rep
            break
    if canon is None:
        rep_report, keys = _orbit_keys(v, cap)
        canon = rep_report
        memo.append((keys, canon))
    rep = HurwitzVector.from_codes(n, gp, d, list(canon))
    return CanonicalForm(CaseTag.SMALL_FALLBACK, n, gp, d, (("rep", tuple(canon)),), _validated(rep))


def _orbit_keys(v: HurwitzVector, cap: int):
    keys, _, complete = orbit_closure(v, mod_aut=True, cap=cap)
    if not complete:
        raise BudgetExceeded(f"orbit of {v} exceeds {cap} states")
    canon = decode_keys(keys[:1], v.n, v.d + 2 * v.g_prime)[0]
    return tuple(int(c) for c in canon), keys


def clear_fallback_memo() -> None:
    _FALLBACK_MEMO.clear()


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------


def _require_hs(v: HurwitzVector) -> None:
    check = is_hurwitz_system(v)
    if not check:
        raise NotHurwitzSystem(f"{v} is not a Hurwitz generating system ({check.reason})")


def _case_bit(v: HurwitzVector, nu: NuType) -> int:
    if v.n % 2:
        return 0
    if v.d == 0:
        return schur_lift_product(v).bit
    if all(c.kind == ClassKind.ROTATION for c in nu):
        return rotation_epsilon_bit(v)
    return 0


def normal_form(v: HurwitzVector, *, cap: int = DEFAULT_CAP) -> CanonicalForm:
    _require_hs(v)
    nu = nu_type(v)
    if _is_fallback(v.g_prime, v.d, nu.reflection_count() > 0):
        return _fallback_form(v, cap)
    return form_from_data(v.n, v.g_prime, v.d, nu, _case_bit(v, nu))


def apply_aut_table(v: HurwitzVector, table: Sequence[int]) -> HurwitzVector:
    return HurwitzVector.from_codes(v.n, v.g_prime, v.d, [table[c] for c in v.codes])


def canonical_invariant(v: HurwitzVector, *, cap: int = DEFAULT_CAP) -> CanonicalForm:
    """Least normal form over all automorphism images of ``v``."""
    first = normal_form(v, cap=cap)
    if first.case == CaseTag.SMALL_FALLBACK:
        return first  # already taken modulo Aut
    return min((normal_form(apply_aut_table(v, t), cap=cap) for t in automorphism_tables(v.n)), key=CanonicalForm.sort_key)


def equivalent(v1: HurwitzVector, v2: HurwitzVector, *, cap: int = DEFAULT_CAP) -> bool:
    if (v1.n, v1.g_prime, v1.d) != (v2.n, v2.g_prime, v2.d):
        raise ShapeMismatch("vectors have different (n, g', d)")
    return canonical_invariant(v1, cap=cap).sort_key() == canonical_invariant(v2, cap=cap).sort_key()


# --------------------------------------------------------------------------
# Whole-cell computation
# --------------------------------------------------------------------------


@dataclass
class CellInvariants:
    """Canonical invariant of every row of a sorted HS code array."""

    n: int
    g_prime: int
    d: int
    codes: np.ndarray
    forms: list[CanonicalForm]  # sorted by sort_key
    labels: np.ndarray  # index into forms per row
    partition: Partition | None = None

    @property
    def count(self) -> int:
        return len(self.forms)


def _row_forms_for_aut(codes, n, gp, d, rows_mask, classes):
    """Distinct (class function, bit) data of the masked rows and their forms."""
    sub = codes[rows_mask]
    counts = nu_count_matrix(sub, n, d)
    bits = np.zeros(len(sub), dtype=np.int64)
    if n % 2 == 0 and len(sub):
        if d == 0:
            bits = schur_bits(sub, n, gp, d)
        else:
            rot_only = np.ones(len(sub), dtype=bool)
            for j, cid in enumerate(classes):
                if cid.kind != ClassKind.ROTATION:
                    rot_only &= counts[:, j] == 0
            if rot_only.any():
                bits[rot_only] = rotation_epsilon_bits(sub[rot_only], n, gp, d)
    # pack (counts, bit) into one integer per row; counts are at most d
    key = np.zeros(len(sub), dtype=np.int64)
    for j in range(counts.shape[1]):
        key = key * (d + 1) + counts[:, j]
    key = key * 2 + bits
    uniq, first, inverse = np.unique(key, return_index=True, return_inverse=True)
    forms = [form_from_data(n, gp, d, nu_from_counts(counts[i], n), int(bits[i])) for i in first]
    return forms, inverse.reshape(-1)


def cell_invariants(
    n: int,
    g_prime: int,
    d: int,
    *,
    codes: np.ndarray | None = None,
    budget: int = DEFAULT_BUDGET,
    partition: Partition | None = None,
) -> CellInvariants:
    """canonical_invariant for every vector of HS(D_n; g', d) at once.

    Uses the same :func:`form_from_data` as the per-vector path; fallback rows
    are resolved by the orbit partition modulo Aut.
    """
    if codes is None:
        codes = hs_codes(n, g_prime, d, budget=budget)
    N = len(codes)
    classes = nontrivial_classes(n)
    counts = nu_count_matrix(codes, n, d)
    has_refl = np.zeros(N, dtype=bool)
    for j, cid in enumerate(classes):
        if cid.is_reflection:
            has_refl |= counts[:, j] > 0
    fb = np.array([_is_fallback(g_prime, d, bool(h)) for h in (False, True)])[has_refl.astype(int)] if N else np.zeros(0, bool)
    forms_by_key: dict[tuple, CanonicalForm] = {}
    # each row gets a provisional id into ``provisional``; ids are re-ranked at the end
    provisional: list[tuple] = []
    row_id = np.zeros(N, dtype=np.int64)
    if (~fb).any():
        mask = ~fb
        per_aut = []
        for tab in automorphism_tables(n):
            img = np.asarray(tab, dtype=np.int64)[codes]
            forms, inverse = _row_forms_for_aut(img, n, g_prime, d, mask, classes)
            for f in forms:
                forms_by_key.setdefault(f.sort_key(), f)
            per_aut.append((forms, inverse))
        provisional = sorted(forms_by_key)
        ranking = {k: i for i, k in enumerate(provisional)}
        best = np.full(int(mask.sum()), np.iinfo(np.int64).max, dtype=np.int64)
        for forms, inverse in per_aut:
            ranks = np.array([ranking[f.sort_key()] for f in forms], dtype=np.int64)
            best = np.minimum(best, ranks[inverse])
        row_id[mask] = best
    if fb.any():
        if partition is None:
            partition = partition_codes(codes, n, g_prime, d, mod_aut=True)
        offset = len(provisional)
        for rep_row in partition.rep_rows:
            canon = tuple(int(c) for c in codes[rep_row])
            f = CanonicalForm(
                CaseTag.SMALL_FALLBACK, n, g_prime, d, (("rep", canon),),
                HurwitzVector.from_codes(n, g_prime, d, list(canon)),
            )
            forms_by_key.setdefault(f.sort_key(), f)
            provisional.append(f.sort_key())
        row_id[fb] = offset + partition.labels[fb]
    used_ids = np.unique(row_id) if N else np.zeros(0, dtype=np.int64)
    used = sorted({provisional[i] for i in used_ids.tolist()})
    pos = {k: i for i, k in enumerate(used)}
    remap = np.array([pos.get(k, -1) for k in provisional], dtype=np.int64)
    labels = remap[row_id] if N else np.zeros(0, dtype=np.int64)
    for f in (forms_by_key[k] for k in used):
        if f.case == CaseTag.SMALL_FALLBACK:
            _validated(f.representative)
    return CellInvariants(n, g_prime, d, codes, [forms_by_key[k] for k in used], labels, partition)


# --------------------------------------------------------------------------
# Realizability of class functions
# --------------------------------------------------------------------------


RULES = ("AnyAdmissible_gp2", "ReflectionPresent_gp1", "RotationIndex_gp1", "R", "O", "E", "None")


@dataclass(frozen=True)
class RealizabilityVerdict:
    realizable: bool
    rule_fired: str

    def to_dict(self) -> dict:
        return {"realizable": self.realizable, "rule_fired": self.rule_fired}


def _rotation_index_gp1(n: int, labels: Sequence[int]) -> bool:
    """Is there c_j in the given rotation classes and (a, b) with prod c_j [a, b] = 1 generating D_n?

    With only rotations among the c_j one of a, b is a reflection and
    [a, b] = x^(2 delta); search all sign choices and residues delta.
    """
    base = math.gcd(n, *labels) if labels else n
    for signs in itertools.product((1, -1), repeat=len(labels)):
        total = sum(s * r for s, r in zip(signs, labels)) % n
        for delta in range(n):
            if (2 * delta - total) % n == 0 and math.gcd(base, delta) == 1:
                return True
    return False


def nu_realizable(n: int, g_prime: int, nu: Mapping[ConjClassId, int]) -> RealizabilityVerdict:
    nu = nu if isinstance(nu, NuType) else NuType(nu)
    if not is_admissible(nu, n):
        return RealizabilityVerdict(False, "None")
    refl = nu.reflection_count()
    labels = rotation_labels(nu, n)
    if g_prime >= 2:
        return RealizabilityVerdict(True, "AnyAdmissible_gp2")
    if g_prime == 1:
        if refl:
            return RealizabilityVerdict(True, "ReflectionPresent_gp1")
        return RealizabilityVerdict(_rotation_index_gp1(n, labels), "RotationIndex_gp1")
    if refl == 0:
        return RealizabilityVerdict(False, "None")
    if refl == 2:
        return RealizabilityVerdict(math.gcd(n, *labels) == 1, "R")
    if n % 2:
        return RealizabilityVerdict(True, "O")
    both = nu.get(ConjClassId(ClassKind.REFL_EVEN)) > 0 and nu.get(ConjClassId(ClassKind.REFL_ODD)) > 0
    odd_rot = any(e % 2 for e in labels)
    return RealizabilityVerdict(both or odd_rot, "E")


def admissible_nus(n: int, d: int) -> list[NuType]:
    """Every admissible class function with total d, in sort order."""
    classes = nontrivial_classes(n)
    out = []
    for combo in itertools.combinations_with_replacement(classes, d):
        counts: dict[ConjClassId, int] = {}
        for c in combo:
            counts[c] = counts.get(c, 0) + 1
        nu = NuType(counts)
        if is_admissible(nu, n):
            out.append(nu)
    return sorted(out)
