"""Irreducible components of the loci M_g(D_n).

For a genus g the Hurwitz formula leaves finitely many primary numerical
types (g', d, m_1 <= ... <= m_d).  Each admissible, realizable class function
with those orders contributes its canonical forms, one per component, counted
modulo Aut(D_n).
"""
from __future__ import annotations

import itertools
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .classification import (
    CanonicalForm,
    _is_fallback,
    admissible_nus,
    canonical_invariant,
    cell_invariants,
    form_from_data,
    nu_realizable,
)
from .coincidence import (  # re-exported
    CoincidenceReport,
    coincidence_check_pair,
    coincidence_exception_example,
    d2_checks,
    dd_constructions,
)
from .group_core import class_members, dn_automorphisms, tables
from .hurwitz import (
    HurwitzVector,
    NuType,
    candidate_count,
    class_orders,
    dn_element_orders,
    hs_codes,
    hurwitz_genus,
    is_hurwitz_system,
    nu_count_matrix,
    nu_to_vector,
    nu_type,
)
from .invariants import h2_sigma_order
from .mcg_moves import partition_codes

CATALOG_BUDGET = 10**7

__all__ = [
    "CATALOG_BUDGET",
    "ComponentRecord",
    "CoincidenceReport",
    "OracleMismatch",
    "PrimaryNumericalType",
    "catalog_dict",
    "coincidence_check_pair",
    "coincidence_exception_example",
    "components",
    "d2_checks",
    "dd_constructions",
    "nu_orbit_key",
    "nus_with_orders",
    "primary_types",
    "validate_record",
    "write_catalog",
]


@dataclass(frozen=True, order=True)
class PrimaryNumericalType:
    g_prime: int
    d: int
    orders: tuple[int, ...]

    def genus(self, n: int) -> int:
        return hurwitz_genus(n, self.g_prime, self.orders)

    @property
    def dimension(self) -> int:
        return 3 * (self.g_prime - 1) + self.d


def primary_types(n: int, g: int) -> list[PrimaryNumericalType]:
    """All (g', d, orders) with 2(g-1) = 2n [2(g'-1) + sum(1 - 1/m_i)]."""
    if g < 2:
        raise ValueError("primary types are listed for g >= 2")
    target = Fraction(g - 1, n)  # = 2(g'-1) + sum(1 - 1/m_i)
    orders = sorted(dn_element_orders(n))
    out = []
    g_prime = 0
    while 2 * (g_prime - 1) <= target:
        rest = target - 2 * (g_prime - 1)
        d_max = int(rest / Fraction(1, 2))  # every term is at least 1/2
        for d in range(d_max + 1):
            for combo in itertools.combinations_with_replacement(orders, d):
                if sum((1 - Fraction(1, m) for m in combo), Fraction(0)) == rest:
                    out.append(PrimaryNumericalType(g_prime, d, combo))
        g_prime += 1
    return sorted(out)


# --------------------------------------------------------------------------
# Class functions
# --------------------------------------------------------------------------


def nus_with_orders(n: int, orders: tuple[int, ...]) -> list[NuType]:
    return [nu for nu in admissible_nus(n, len(orders)) if class_orders(nu, n) == tuple(sorted(orders))]


def nu_orbit_key(nu: NuType, n: int) -> NuType:
    """Least member of the Aut(D_n)-orbit of ``nu``."""
    return min((nu.apply(f) for f in dn_automorphisms(n)), key=NuType.sort_key)


def _search_representative(n: int, g_prime: int, nu: NuType) -> HurwitzVector | None:
    """Depth-first search for one Hurwitz system with class function ``nu``."""
    T = tables(n)

    slots = []
    for cid, k in nu.items():
        slots += [sorted(m.code for m in class_members(cid, n))] * k
    d = len(slots)
    handle_choices = list(range(2 * n))
    for c_tuple in itertools.product(*slots[:-1]) if d else [()]:
        ev = 0
        for c in c_tuple:
            ev = int(T.mul[ev, c])
        for ab in itertools.product(handle_choices, repeat=2 * g_prime):
            acc = ev
            for i in range(g_prime):
                acc = int(T.mul[acc, T.comm(ab[2 * i], ab[2 * i + 1])])
            if d:
                last = int(T.inv[acc])
                if last not in slots[-1]:
                    continue
                codes = list(c_tuple) + [last] + list(ab)
            else:
                if acc != 0:
                    continue
                codes = list(ab)
            v = HurwitzVector.from_codes(n, g_prime, d, codes)
            if is_hurwitz_system(v):
                return v
    return None


# --------------------------------------------------------------------------
# Components
# --------------------------------------------------------------------------


@dataclass
class ComponentRecord:
    ptype: PrimaryNumericalType
    nu: NuType  # least member of the Aut-orbit
    epsilon_multiplicity: int | None
    form: CanonicalForm | None
    representative: HurwitzVector | None
    flags: list[str] = field(default_factory=list)
    n: int = 0

    @property
    def dimension(self) -> int:
        return self.ptype.dimension

    def to_dict(self) -> dict:
        return {
            "g_prime": self.ptype.g_prime,
            "d": self.ptype.d,
            "orders": list(self.ptype.orders),
            "nu": self.nu.to_labels(),
            "epsilon_multiplicity": self.epsilon_multiplicity,
            "dimension": self.dimension,
            "representative": str(self.representative) if self.representative is not None else None,
            "canonical_form": self.form.to_dict()["params"] if self.form is not None else None,
            "case": self.form.case.label if self.form is not None else None,
            "flags": list(self.flags),
        }


class OracleMismatch(AssertionError):
    """Breadth-first orbit counts disagree with the canonical-form count."""


def _forms_by_enumeration(n, ptype, nu_orbits, budget, oracle):
    """Canonical forms per Aut-orbit of class functions, from the full HS cell."""
    gp, d = ptype.g_prime, ptype.d
    codes = hs_codes(n, gp, d, budget=budget)
    counts = nu_count_matrix(codes, n, d)
    wanted = {}
    for key, members in nu_orbits.items():
        for nu in members:
            wanted[tuple(nu_to_vector(nu, n).tolist())] = key
    row_keys = [wanted.get(tuple(r)) for r in counts.tolist()]
    mask = np.array([k is not None for k in row_keys], dtype=bool)
    sub = codes[mask]
    sub_keys = [k for k in row_keys if k is not None]
    part = partition_codes(sub, n, gp, d, mod_aut=True) if (oracle or _needs_partition(gp, d)) and len(sub) else None
    inv = cell_invariants(n, gp, d, codes=sub, partition=part)
    out: dict = {key: [] for key in nu_orbits}
    seen: dict = {key: set() for key in nu_orbits}
    for row, lab in enumerate(inv.labels.tolist()):
        key = sub_keys[row]
        if lab not in seen[key]:
            seen[key].add(lab)
            out[key].append(inv.forms[lab])
    for key in out:
        out[key].sort(key=CanonicalForm.sort_key)
    if oracle and part is not None:
        per_key_orbits: dict = {key: set() for key in nu_orbits}
        for row, lab in enumerate(part.labels.tolist()):
            per_key_orbits[sub_keys[row]].add(lab)
        for key in nu_orbits:
            if len(per_key_orbits[key]) != len(out[key]):
                raise OracleMismatch(
                    f"n={n} {ptype}: {len(per_key_orbits[key])} orbits but {len(out[key])} canonical forms for {key}"
                )
    return out


def _needs_partition(gp: int, d: int) -> bool:
    return gp <= 1


def _forms_by_theory(n, ptype, nu):
    """Canonical forms without enumeration (only for the constructive cases)."""
    gp, d = ptype.g_prime, ptype.d
    forms = {}
    for bit in (0, 1):
        f = form_from_data(n, gp, d, nu, bit)
        canon = canonical_invariant(f.representative)
        forms[canon.sort_key()] = canon
    return [forms[k] for k in sorted(forms)]


def components(
    n: int,
    g: int,
    *,
    oracle: bool = False,
    budget: int = CATALOG_BUDGET,
) -> list[ComponentRecord]:
    """One record per irreducible component of M_g(D_n), in a deterministic order."""
    records: list[ComponentRecord] = []
    for ptype in primary_types(n, g):
        gp, d = ptype.g_prime, ptype.d
        nu_orbits: dict[NuType, list[NuType]] = {}
        for nu in nus_with_orders(n, ptype.orders):
            if nu_realizable(n, gp, nu).realizable:
                nu_orbits.setdefault(nu_orbit_key(nu, n), []).append(nu)
        if not nu_orbits:
            continue
        enumerable = candidate_count(n, gp, d) <= budget
        if enumerable:
            per_key = _forms_by_enumeration(n, ptype, nu_orbits, budget, oracle)
        for key in sorted(nu_orbits, key=NuType.sort_key):
            has_refl = key.reflection_count() > 0
            flags: list[str] = []
            if enumerable:
                forms = per_key[key]
                if oracle:
                    flags.append("oracle_verified")
            elif not _is_fallback(gp, d, has_refl):
                forms = _forms_by_theory(n, ptype, key)
                flags.append("not_enumerated")
            else:
                rep = _search_representative(n, gp, key)
                mult = h2_sigma_order(n, key.support()).order if d else None
                records.append(
                    ComponentRecord(ptype, key, mult, None, rep, ["unverified", "budget_exceeded"], n)
                )
                continue
            for f in forms:
                rep = f.representative
                records.append(ComponentRecord(ptype, key, len(forms), f, rep, list(flags), n))
    _attach_coincidence_flags(n, records)
    return records


def _attach_coincidence_flags(n: int, records: list[ComponentRecord]) -> None:
    """Mark records matching the branching pattern of the known III-a / III-b coincidence.

    Advisory only: the pattern is a necessary shape, not a proof that the two
    components meet.
    """
    if n % 2:
        return
    d4 = n // 2
    a_side = [r for r in records if (r.ptype.g_prime, r.ptype.d, r.ptype.orders) == (1, 1, (d4,))]
    b_side = [r for r in records if (r.ptype.g_prime, r.ptype.d, r.ptype.orders) == (0, 4, tuple(sorted((2, 2, n, n))))]
    if a_side and b_side:
        for r in a_side:
            r.flags.append("possible_coincidence_III-a")
        for r in b_side:
            r.flags.append("possible_coincidence_III-b")


def validate_record(rec: ComponentRecord) -> list[str]:
    """Problems with a record; empty when its representative matches its data."""
    problems = []
    if rec.dimension != 3 * (rec.ptype.g_prime - 1) + rec.ptype.d:
        problems.append("dimension formula")
    v = rec.representative
    if v is None:
        problems.append("no representative")
        return problems
    if not is_hurwitz_system(v):
        problems.append("representative is not a Hurwitz system")
        return problems
    if (v.g_prime, v.d) != (rec.ptype.g_prime, rec.ptype.d):
        problems.append("representative has the wrong shape")
    elif nu_orbit_key(nu_type(v), v.n) != rec.nu:
        problems.append("representative has the wrong class function")
    elif tuple(sorted(c.order() for c in v.c)) != rec.ptype.orders:
        problems.append("representative has the wrong branching orders")
    if rec.form is not None and canonical_invariant(v).sort_key() != rec.form.sort_key():
        problems.append("representative does not reproduce its canonical form")
    return problems


def catalog_dict(n: int, g: int, records: list[ComponentRecord]) -> dict:
    return {"n": n, "g": g, "components": [r.to_dict() for r in records]}


def write_catalog(path: str | os.PathLike, n: int, g: int, records: list[ComponentRecord]) -> None:
    """Write the catalog JSON atomically (temp file in the same directory, then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name, suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(catalog_dict(n, g, records), fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
