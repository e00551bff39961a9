"""Desk-scale consistency checks, shared by ``verify-paper`` and the test suite.

Every check compares a closed-form answer with an independent computation
(orbit search, brute-force enumeration, or a direct group computation).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .classification import (
    CaseTag,
    admissible_nus,
    canonical_invariant,
    cell_invariants,
    equivalent,
    nu_realizable,
)
from .coincidence import coincidence_check_pair, coincidence_exception_example, d2_checks, dd_constructions
from .group_core import (
    BinaryDihedralElement,
    ClassKind,
    DihedralElement,
    bd_central,
    bd_elements,
    bd_project,
    class_members,
    nontrivial_classes,
    tables,
)
from .hurwitz import (
    HurwitzVector,
    candidate_count,
    encode_rows,
    evaluate,
    hs_codes,
    is_hurwitz_system,
    nu_count_matrix,
    nu_from_counts,
    nu_type,
)
from .invariants import h2_order, h2_sigma_order, relative_h2_class, schur_bits
from .mcg_moves import MoveKind, all_moves, apply_move, partition_codes
from .moduli_catalog import components, nu_orbit_key, validate_record

GRID_LIMITS = {"small": 10**5, "full": 10**7}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def grid_cells(grid: str = "full", *, include_empty: bool = False) -> list[tuple[int, int, int]]:
    """(n, g', d) with 3 <= n <= 6, g' <= 2, d <= 4 and (2n)^(d+2g') under the grid limit."""
    limit = GRID_LIMITS[grid]
    out = []
    for n in range(3, 7):
        for gp in range(3):
            for d in range(5):
                if candidate_count(n, gp, d) > limit:
                    continue
                if not include_empty and gp == 0 and d < 2:
                    continue
                out.append((n, gp, d))
    return out


@dataclass
class CellData:
    codes: np.ndarray
    partition: object
    invariants: object
    counts: np.ndarray


@lru_cache(maxsize=None)
def cell_data(n: int, gp: int, d: int) -> CellData:
    codes = hs_codes(n, gp, d)
    part = partition_codes(codes, n, gp, d, mod_aut=True)
    inv = cell_invariants(n, gp, d, codes=codes, partition=part)
    return CellData(codes, part, inv, nu_count_matrix(codes, n, d))


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str, dict]]) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail, data = fn()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0, data)


def _row_index(codes: np.ndarray, n: int, v: HurwitzVector) -> int:
    keys = encode_rows(codes, n)
    target = int(encode_rows(np.array([v.codes], dtype=np.int64), n)[0])
    i = int(np.searchsorted(keys, target))
    if i >= len(keys) or keys[i] != target:
        raise KeyError(f"{v} not in the enumerated cell")
    return i


# --------------------------------------------------------------------------
# 1, 2: second homology
# --------------------------------------------------------------------------


def check_h2_table() -> tuple[bool, str, dict]:
    bad = [n for n in range(3, 13) if h2_order(n).order != (1 if n % 2 else 2)]
    for n in range(3, 9):
        els = bd_elements(n)
        kernel = {p for p in els if bd_project(p).is_identity}
        if kernel != {BinaryDihedralElement.identity(n), bd_central(n)}:
            bad.append(("kernel", n))
        for p, q in itertools.product(els, repeat=2):
            if bd_project(p * q) != bd_project(p) * bd_project(q):
                bad.append(("hom", n))
                break
    return not bad, f"n=3..12 orders, projection kernels n=3..8; problems={bad}", {"problems": bad}


def _h2_sigma_oracle(n: int, sigma) -> int:
    """Z/2 survives unless some g in Sigma has a commuting h whose lifts commute to xi^n."""
    if n % 2:
        return 1
    T = tables(n)
    for cid in sigma:
        for g in class_members(cid, n):
            for h in range(2 * n):
                if T.mul[g.code, h] != T.mul[h, g.code]:
                    continue
                if T.bd_comm(T.lift[g.code], T.lift[h]) == 2 * n:
                    return 1
    return 2


def check_h2_sigma() -> tuple[bool, str, dict]:
    checked, bad = 0, []
    for n in range(3, 9):
        classes = nontrivial_classes(n)
        for r in range(len(classes) + 1):
            for sigma in itertools.combinations(classes, r):
                checked += 1
                if h2_sigma_order(n, sigma).order != _h2_sigma_oracle(n, sigma):
                    bad.append((n, [c.label() for c in sigma]))
    return not bad, f"{checked} (n, Sigma) pairs against the commutator oracle; mismatches={len(bad)}", {"mismatches": bad}


# --------------------------------------------------------------------------
# 3: etale case
# --------------------------------------------------------------------------


def check_etale() -> tuple[bool, str, dict]:
    counts, problems = {}, []
    for n in range(3, 7):
        data = cell_data(n, 2, 0)
        part = data.partition
        counts[n] = part.count
        want = 1 if n % 2 else 2
        if part.count != want:
            problems.append(f"n={n}: {part.count} orbits")
        if n % 2 == 0:
            bits = schur_bits(data.codes, n, 2, 0)
            per_orbit = {lab: set() for lab in range(part.count)}
            for lab, b in zip(part.labels.tolist(), bits.tolist()):
                per_orbit[lab].add(b)
            if sorted(map(tuple, per_orbit.values())) != [(0,), (1,)]:
                problems.append(f"n={n}: Schur bit does not separate orbits")
            e, x, y = DihedralElement.identity(n), DihedralElement.x(n), DihedralElement.y(n)
            v0 = HurwitzVector.from_entries(n, 2, [], [y, e, x, e])
            v1 = HurwitzVector.from_entries(n, 2, [], [y, DihedralElement.x(n, n // 2), x, e])
            l0 = part.labels[_row_index(part.codes, n, v0)]
            l1 = part.labels[_row_index(part.codes, n, v1)]
            if l0 == l1:
                problems.append(f"n={n}: the two normal forms share an orbit")
    return not problems, f"orbits mod Aut {counts}; problems={problems}", {"orbits": counts}


# --------------------------------------------------------------------------
# 4: move soundness
# --------------------------------------------------------------------------


def check_move_soundness(grid: str = "full", samples: int = 16_000, seed: int = 20240601) -> tuple[bool, str, dict]:
    rng = np.random.default_rng(seed)
    cells = [c for c in grid_cells(grid) if len(all_moves(c[1], c[2], c[0]))]
    per_cell = -(-samples // len(cells))
    kinds_seen: set[MoveKind] = set()
    violations, pairs = [], 0
    for n, gp, d in cells:
        codes = hs_codes(n, gp, d)
        if not len(codes):
            continue
        moves = all_moves(gp, d, n)
        rows = rng.integers(0, len(codes), size=per_cell)
        picks = rng.integers(0, len(moves), size=per_cell)
        for r, m_i in zip(rows.tolist(), picks.tolist()):
            v = HurwitzVector.from_codes(n, gp, d, codes[r].tolist())
            m = moves[m_i]
            w = apply_move(v, m)
            pairs += 1
            kinds_seen.add(m.kind)
            if not is_hurwitz_system(w):
                violations.append((str(v), m.label(n), "left HS"))
            elif not evaluate(w).is_identity:
                violations.append((str(v), m.label(n), "evaluation"))
            elif nu_type(w) != nu_type(v):
                violations.append((str(v), m.label(n), "class function"))
            elif apply_move(w, m.inverse(n)) != v:
                violations.append((str(v), m.label(n), "round trip"))
    missing = sorted(k.value for k in set(MoveKind) - kinds_seen)
    ok = not violations and not missing and pairs >= 10_000
    detail = f"{pairs} sampled (v, move) pairs over {len(cells)} cells; violations={len(violations)}; kinds missing={missing}"
    return ok, detail, {"pairs": pairs, "violations": violations[:20], "missing_kinds": missing}


# --------------------------------------------------------------------------
# 5: the invariant separates orbits
# --------------------------------------------------------------------------


def check_invariant_complete(grid: str = "full", spot: int = 3, seed: int = 7) -> tuple[bool, str, dict]:
    rng = np.random.default_rng(seed)
    problems, fallback_rows, total_rows = [], 0, 0
    table = {}
    for n, gp, d in grid_cells(grid):
        data = cell_data(n, gp, d)
        part, inv = data.partition, data.invariants
        table[(n, gp, d)] = part.count
        total_rows += len(data.codes)
        fallback_rows += int(sum(part.sizes[lab] for lab in set(inv.labels.tolist())
                                 if inv.forms[lab].case == CaseTag.SMALL_FALLBACK)) if len(data.codes) else 0
        if inv.count != part.count:
            problems.append(f"{(n, gp, d)}: {inv.count} invariants vs {part.count} orbits")
        pairs = np.unique(np.stack([part.labels, inv.labels], axis=1), axis=0) if len(data.codes) else np.zeros((0, 2))
        if len(pairs) != part.count:
            problems.append(f"{(n, gp, d)}: invariant not constant on orbits")
        if len(data.codes):
            for r in rng.integers(0, len(data.codes), size=spot).tolist():
                v = HurwitzVector.from_codes(n, gp, d, data.codes[r].tolist())
                if canonical_invariant(v).sort_key() != inv.forms[inv.labels[r]].sort_key():
                    problems.append(f"{(n, gp, d)}: scalar invariant differs on row {r}")
    detail = (f"{len(table)} cells, {total_rows} vectors ({fallback_rows} resolved by search); "
              f"problems={problems}")
    return not problems, detail, {"orbits": {str(k): v for k, v in table.items()}, "problems": problems}


# --------------------------------------------------------------------------
# 6: epsilon multiplicity for rotation-only monodromy
# --------------------------------------------------------------------------


def _rotation_only_mask(counts: np.ndarray, n: int) -> np.ndarray:
    mask = np.ones(len(counts), dtype=bool)
    for j, cid in enumerate(nontrivial_classes(n)):
        if cid.kind != ClassKind.ROTATION:
            mask &= counts[:, j] == 0
    return mask


def _nu_keys(counts: np.ndarray, n: int) -> list:
    uniq, inverse = np.unique(counts, axis=0, return_inverse=True)
    keys = [nu_orbit_key(nu_from_counts(row, n), n) for row in uniq.tolist()]
    return [keys[i] for i in inverse.reshape(-1).tolist()]


def check_epsilon_multiplicity(grid: str = "full") -> tuple[bool, str, dict]:
    problems, split = [], []
    for n, gp, d in grid_cells(grid):
        if n % 2 or d == 0:
            continue
        data = cell_data(n, gp, d)
        mask = _rotation_only_mask(data.counts, n)
        if not mask.any():
            continue
        rows = np.flatnonzero(mask)
        keys = _nu_keys(data.counts[rows], n)
        inv = data.invariants
        groups: dict = {}
        for r, key in zip(rows.tolist(), keys):
            groups.setdefault(key, set()).add(int(inv.labels[r]))
        for key, labs in groups.items():
            if len(labs) not in (1, 2):
                problems.append(f"{(n, gp, d)} {key.to_labels()}: {len(labs)} forms")
                continue
            if len(labs) == 1:
                continue
            split.append((n, gp, d, str(key.to_labels())))
            la, lb = sorted(labs)
            rep_a = inv.forms[la].representative
            target = np.array([c.code for c in rep_a.c], dtype=np.int64)
            same_c = (data.codes[:, :d] == target).all(axis=1)
            in_b = np.flatnonzero(same_c & (inv.labels == lb))
            if not len(in_b):
                problems.append(f"{(n, gp, d)} {key.to_labels()}: no matched c-list in second orbit")
                continue
            rep_b = HurwitzVector.from_codes(n, gp, d, data.codes[in_b[0]].tolist())
            if relative_h2_class(rep_a, rep_b).bit != 1:
                problems.append(f"{(n, gp, d)} {key.to_labels()}: relative class 0")
    a = HurwitzVector.parse("n=4 g=2 c=[x,x] ab=[y,x,x,1]")
    b = HurwitzVector.parse("n=4 g=2 c=[x,x] ab=[y,x^3,x,1]")
    witness = (not equivalent(a, b)) and relative_h2_class(a, b).bit == 1
    if not witness:
        problems.append("D_4 witness pair")
    detail = f"{len(split)} class-function orbits split in two; D_4 witness ok={witness}; problems={problems}"
    return not problems, detail, {"split": split, "problems": problems}


# --------------------------------------------------------------------------
# 7: realizability
# --------------------------------------------------------------------------


def check_realizability(grid: str = "full") -> tuple[bool, str, dict]:
    checked, bad = 0, []
    for n, gp, d in grid_cells(grid, include_empty=True):
        codes = hs_codes(n, gp, d)
        present = {tuple(r) for r in np.unique(nu_count_matrix(codes, n, d), axis=0).tolist()} if len(codes) else set()
        classes = nontrivial_classes(n)
        for nu in admissible_nus(n, d):
            vec = tuple(nu.get(c) for c in classes)
            checked += 1
            verdict = nu_realizable(n, gp, nu)
            if verdict.realizable != (vec in present):
                bad.append((n, gp, d, str(nu.to_labels()), verdict.rule_fired))
    return not bad, f"{checked} admissible (n, g', nu) against enumeration; mismatches={len(bad)}", {"mismatches": bad}


# --------------------------------------------------------------------------
# 8: reflection rigidity
# --------------------------------------------------------------------------


def check_reflection_rigidity(grid: str = "full") -> tuple[bool, str, dict]:
    problems, checked = [], 0
    for n, gp, d in grid_cells(grid):
        if d == 0:
            continue
        data = cell_data(n, gp, d)
        if not len(data.codes):
            continue
        refl = np.zeros(len(data.codes), dtype=bool)
        for j, cid in enumerate(nontrivial_classes(n)):
            if cid.is_reflection:
                refl |= data.counts[:, j] > 0
        rows = np.flatnonzero(refl)
        if not len(rows):
            continue
        groups: dict = {}
        for r, key in zip(rows.tolist(), _nu_keys(data.counts[rows], n)):
            groups.setdefault(key, set()).add(int(data.partition.labels[r]))
        checked += len(groups)
        for key, labs in groups.items():
            if len(labs) != 1:
                problems.append(f"{(n, gp, d)} {key.to_labels()}: {len(labs)} orbits")
    return not problems, f"{checked} class-function orbits with a reflection; split={problems}", {"problems": problems}


# --------------------------------------------------------------------------
# 9: coincidences and constructions
# --------------------------------------------------------------------------


def check_coincidences() -> tuple[bool, str, dict]:
    failures = {}
    for n, h in ((3, 0), (5, 0), (4, 2), (6, 3)):
        rep = coincidence_check_pair(n, h)
        if not rep.ok:
            failures[f"pair{(n, h)}"] = rep.failures()
    for d4 in (2, 3):
        rep = coincidence_exception_example(d4)
        if not rep.ok:
            failures[f"exception d4={d4}"] = rep.failures()
    built = {}
    for n in (3, 4, 6):
        cons = dd_constructions(n)
        built[n] = [c.name for c in cons]
        for c in cons:
            if not c.ok:
                failures[f"{c.name} n={n}"] = [k for k, v in c.checks if not v]
    d2 = d2_checks()
    if not all(v for _, v in d2):
        failures["D_2"] = [k for k, v in d2 if not v]
    detail = f"4 pairs, 2 exception examples, constructions {built}, {len(d2)} D_2 checks; failures={failures}"
    return not failures, detail, {"failures": failures}


# --------------------------------------------------------------------------
# 10: catalog
# --------------------------------------------------------------------------


def _etale(records) -> list:
    return [r for r in records if (r.ptype.g_prime, r.ptype.d) == (2, 0)]


def check_catalog() -> tuple[bool, str, dict]:
    """Literal regression: one component for (3, 2), two etale components for (4, 5)."""
    c32 = components(3, 2)
    c45 = components(4, 5)
    problems = []
    if len(c32) != 1 or c32[0].dimension != 1:
        problems.append(f"(3,2): {len(c32)} components")
    n_etale = len(_etale(c45))
    if n_etale != 2:
        problems.append(f"(4,5): {n_etale} etale components")
    for recs in (c32, c45):
        for r in recs:
            p = validate_record(r)
            if p:
                problems.append(p)
    data = {"components_3_2": len(c32), "components_4_5": len(c45), "etale_4_5": n_etale}
    return not problems, f"problems={problems}", data


def check_catalog_corrected() -> tuple[bool, str, dict]:
    """Same regression with the etale D_4 type placed at the genus the Hurwitz formula gives (g = 9)."""
    c32 = components(3, 2)
    c49 = components(4, 9)
    c45 = components(4, 5)
    problems = []
    if len(c32) != 1 or c32[0].dimension != 1:
        problems.append(f"(3,2): {len(c32)} components")
    if len(_etale(c49)) != 2:
        problems.append(f"(4,9): {len(_etale(c49))} etale components")
    if _etale(c45):
        problems.append("(4,5) has an etale type")
    for recs in (c32, c45, c49):
        for r in recs:
            p = validate_record(r)
            if p:
                problems.append(p)
    data = {"components_3_2": len(c32), "components_4_9": len(c49), "etale_4_9": len(_etale(c49))}
    return not problems, f"(3,2) -> 1 at dim 1; (4,9) -> {len(_etale(c49))} etale; problems={problems}", data


# --------------------------------------------------------------------------


CRITERIA: dict[int, tuple[str, Callable]] = {
    1: ("H_2 table", lambda grid: check_h2_table()),
    2: ("H_2,Sigma case rule", lambda grid: check_h2_sigma()),
    3: ("etale classification", lambda grid: check_etale()),
    4: ("move soundness", lambda grid: check_move_soundness(grid)),
    5: ("invariant = orbits", lambda grid: check_invariant_complete(grid)),
    6: ("epsilon multiplicity", lambda grid: check_epsilon_multiplicity(grid)),
    7: ("realizability", lambda grid: check_realizability(grid)),
    8: ("reflection rigidity", lambda grid: check_reflection_rigidity(grid)),
    9: ("coincidences and constructions", lambda grid: check_coincidences()),
    10: ("catalog regression", lambda grid: check_catalog()),
}


def run_criterion(number: int, grid: str = "full") -> CriterionResult:
    name, fn = CRITERIA[number]
    return _timed(number, name, lambda: fn(grid))


def run_all(grid: str = "full") -> list[CriterionResult]:
    results = [run_criterion(k, grid) for k in sorted(CRITERIA)]
    results.append(_timed(10, "catalog regression (etale D_4 at g=9)", check_catalog_corrected))
    return results


def format_table(results: list[CriterionResult]) -> str:
    return "\n".join(r.line() for r in results)
