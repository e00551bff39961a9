"""Mapping-class-group moves on Hurwitz vectors and the BFS orbit engine.

Every move is written once against :class:`~dihedral_covers.group_core.DnTables`
lookups, so the same code transforms a single vector (columns are ints) or a
whole batch of vectors (columns are integer arrays).
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .group_core import DihedralElement, automorphism_generator_tables, tables
from .hurwitz import DEFAULT_BUDGET, HurwitzVector, encode_rows, hs_codes

DEFAULT_CAP = 10**7
CACHE_ENV = "DIHEDRAL_COVERS_CACHE"
_ENGINE_VERSION = "moves-v1"


class MoveKind(str, Enum):
    BRAID_L = "BraidL"
    BRAID_R = "BraidR"
    XI_TWIST_A = "XiTwistA"
    XI_TWIST_A_INV = "XiTwistAInv"
    XI_TWIST_B = "XiTwistB"
    XI_TWIST_B_INV = "XiTwistBInv"
    MAP2 = "Map2"
    MAP2_INV = "Map2Inv"
    HANDLE_TWIST_A = "HandleTwistA"
    HANDLE_TWIST_A_INV = "HandleTwistAInv"
    HANDLE_TWIST_B = "HandleTwistB"
    HANDLE_TWIST_B_INV = "HandleTwistBInv"
    GLOBAL_CONJ = "GlobalConj"


_INVERSE_KIND = {
    MoveKind.BRAID_L: MoveKind.BRAID_R,
    MoveKind.XI_TWIST_A: MoveKind.XI_TWIST_A_INV,
    MoveKind.XI_TWIST_B: MoveKind.XI_TWIST_B_INV,
    MoveKind.MAP2: MoveKind.MAP2_INV,
    MoveKind.HANDLE_TWIST_A: MoveKind.HANDLE_TWIST_A_INV,
    MoveKind.HANDLE_TWIST_B: MoveKind.HANDLE_TWIST_B_INV,
}
_INVERSE_KIND.update({v: k for k, v in list(_INVERSE_KIND.items())})

FORWARD_KINDS = (
    MoveKind.BRAID_L,
    MoveKind.XI_TWIST_A,
    MoveKind.XI_TWIST_B,
    MoveKind.MAP2,
    MoveKind.HANDLE_TWIST_A,
    MoveKind.HANDLE_TWIST_B,
    MoveKind.GLOBAL_CONJ,
)


class MoveError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Move:
    """A move; ``index`` is 1-based, or an element code for GlobalConj."""

    kind: MoveKind
    index: int

    def inverse(self, n: int) -> Move:
        if self.kind == MoveKind.GLOBAL_CONJ:
            return Move(self.kind, int(tables(n).inv[self.index]))
        return Move(_INVERSE_KIND[self.kind], self.index)

    def label(self, n: int | None = None) -> str:
        if self.kind == MoveKind.GLOBAL_CONJ and n is not None:
            return f"GlobalConj({DihedralElement.from_code(self.index, n)})"
        return f"{self.kind.value}({self.index})"

    def check(self, g_prime: int, d: int, n: int) -> None:
        k, i = self.kind, self.index
        if k in (MoveKind.BRAID_L, MoveKind.BRAID_R):
            ok = 1 <= i < d
        elif k in (MoveKind.XI_TWIST_A, MoveKind.XI_TWIST_A_INV, MoveKind.XI_TWIST_B, MoveKind.XI_TWIST_B_INV):
            ok = d >= 1 and 1 <= i <= g_prime
        elif k in (MoveKind.MAP2, MoveKind.MAP2_INV):
            ok = 1 <= i < g_prime
        elif k == MoveKind.GLOBAL_CONJ:
            ok = 0 <= i < 2 * n
        else:
            ok = 1 <= i <= g_prime
        if not ok:
            raise MoveError(f"{self.label()} out of range for g'={g_prime}, d={d}")


def apply_to_columns(T, cols: Sequence, move: Move, d: int, g_prime: int) -> list:
    """Apply ``move`` to a vector given column-wise (ints or equal-length arrays)."""
    mul, inv = T.mul, T.inv
    out = list(cols)
    k, i = move.kind, move.index

    def handle(l):  # 1-based handle -> (a slot, b slot)
        return d + 2 * (l - 1), d + 2 * (l - 1) + 1

    def u_before(l):
        u = 0 * out[0] if hasattr(out[0], "shape") else 0
        for h in range(1, l):
            sa, sb = handle(h)
            u = mul[u, T.comm(out[sa], out[sb])]
        return u

    if k == MoveKind.BRAID_L:
        p, q = out[i - 1], out[i]
        out[i - 1], out[i] = q, mul[mul[inv[q], p], q]
    elif k == MoveKind.BRAID_R:
        p, q = out[i - 1], out[i]
        out[i - 1], out[i] = mul[mul[p, q], inv[p]], p
    elif k in (MoveKind.XI_TWIST_A, MoveKind.XI_TWIST_A_INV, MoveKind.XI_TWIST_B, MoveKind.XI_TWIST_B_INV):
        sa, sb = handle(i)
        u = u_before(i)
        ui = inv[u]
        c, a, b = out[d - 1], out[sa], out[sb]
        if k == MoveKind.XI_TWIST_A:
            # w = c u a b a^-1 u^-1 ; a -> u^-1 c u a ; c -> w c w^-1
            w = mul[mul[mul[c, u], mul[a, b]], mul[inv[a], ui]]
            out[sa] = mul[mul[ui, c], mul[u, a]]
            out[d - 1] = mul[mul[w, c], inv[w]]
        elif k == MoveKind.XI_TWIST_A_INV:
            m = mul[mul[u, a], mul[b, mul[inv[a], ui]]]
            c0 = mul[mul[inv[m], c], m]
            out[d - 1] = c0
            out[sa] = mul[mul[ui, inv[c0]], mul[u, a]]
        elif k == MoveKind.XI_TWIST_B:
            # w = c u [a,b] a^-1 u^-1 ; b -> a^-1 u^-1 c u a b ; c -> w c w^-1
            w = mul[mul[mul[c, u], T.comm(a, b)], mul[inv[a], ui]]
            out[sb] = mul[mul[mul[inv[a], ui], mul[c, u]], mul[a, b]]
            out[d - 1] = mul[mul[w, c], inv[w]]
        else:
            m = mul[mul[u, T.comm(a, b)], mul[inv[a], ui]]
            c0 = mul[mul[inv[m], c], m]
            out[d - 1] = c0
            out[sb] = mul[mul[mul[inv[a], ui], mul[inv[c0], u]], mul[a, b]]
    elif k in (MoveKind.MAP2, MoveKind.MAP2_INV):
        s1, t1 = handle(i)
        s2, t2 = handle(i + 1)
        a1, b1, a2, b2 = out[s1], out[t1], out[s2], out[t2]
        if k == MoveKind.MAP2:
            # (a1 a2, a2^-1 b1 a2, a2^-1 b1 a2 b1^-1 a2, b2 b1^-1 a2); keeps [a1,b1][a2,b2] exactly
            ia2 = inv[a2]
            out[s1] = mul[a1, a2]
            out[t1] = mul[mul[ia2, b1], a2]
            out[s2] = mul[mul[mul[ia2, b1], mul[a2, inv[b1]]], a2]
            out[t2] = mul[mul[b2, inv[b1]], a2]
        else:
            old_a2 = mul[mul[inv[b1], a2], b1]
            old_b1 = mul[mul[old_a2, b1], inv[old_a2]]
            ia2 = inv[old_a2]
            out[s1] = mul[a1, ia2]
            out[t1] = old_b1
            out[s2] = old_a2
            out[t2] = mul[mul[b2, ia2], old_b1]
    elif k in (MoveKind.HANDLE_TWIST_A, MoveKind.HANDLE_TWIST_A_INV):
        sa, sb = handle(i)
        a = out[sa]
        out[sb] = mul[out[sb], a if k == MoveKind.HANDLE_TWIST_A else inv[a]]
    elif k in (MoveKind.HANDLE_TWIST_B, MoveKind.HANDLE_TWIST_B_INV):
        sa, sb = handle(i)
        b = out[sb]
        out[sa] = mul[out[sa], b if k == MoveKind.HANDLE_TWIST_B else inv[b]]
    elif k == MoveKind.GLOBAL_CONJ:
        g, gi = i, int(inv[i])
        out = [mul[mul[g, e], gi] for e in out]
    else:  # pragma: no cover
        raise MoveError(f"unknown move {move}")
    return out


def apply_move(v: HurwitzVector, move: Move) -> HurwitzVector:
    move.check(v.g_prime, v.d, v.n)
    cols = apply_to_columns(tables(v.n), list(v.codes), move, v.d, v.g_prime)
    return HurwitzVector.from_codes(v.n, v.g_prime, v.d, [int(c) for c in cols])


def braid_move(v: HurwitzVector, i: int, direction: str = "L") -> HurwitzVector:
    kind = MoveKind.BRAID_L if direction.upper() == "L" else MoveKind.BRAID_R
    return apply_move(v, Move(kind, i))


def xi_twist_a(v: HurwitzVector, ell: int, inverse: bool = False) -> HurwitzVector:
    return apply_move(v, Move(MoveKind.XI_TWIST_A_INV if inverse else MoveKind.XI_TWIST_A, ell))


def xi_twist_b(v: HurwitzVector, ell: int, inverse: bool = False) -> HurwitzVector:
    return apply_move(v, Move(MoveKind.XI_TWIST_B_INV if inverse else MoveKind.XI_TWIST_B, ell))


def handle_move(v: HurwitzVector, j, kind: str) -> HurwitzVector:
    """``kind`` is Map2, HandleTwistA, HandleTwistB (or an *Inv), or GlobalConj with j an element."""
    mk = MoveKind(kind)
    if mk == MoveKind.GLOBAL_CONJ:
        j = j.code if isinstance(j, DihedralElement) else int(j)
    return apply_move(v, Move(mk, j))


def generator_moves(g_prime: int, d: int, n: int, kinds: Iterable[MoveKind] | None = None) -> list[Move]:
    """Forward moves; on a finite set their closure already gives the orbit."""
    kinds = set(FORWARD_KINDS if kinds is None else kinds)
    out = []
    if MoveKind.BRAID_L in kinds:
        out += [Move(MoveKind.BRAID_L, i) for i in range(1, d)]
    if d >= 1:
        for kind in (MoveKind.XI_TWIST_A, MoveKind.XI_TWIST_B):
            if kind in kinds:
                out += [Move(kind, l) for l in range(1, g_prime + 1)]
    if MoveKind.MAP2 in kinds:
        out += [Move(MoveKind.MAP2, j) for j in range(1, g_prime)]
    for kind in (MoveKind.HANDLE_TWIST_A, MoveKind.HANDLE_TWIST_B):
        if kind in kinds:
            out += [Move(kind, j) for j in range(1, g_prime + 1)]
    if MoveKind.GLOBAL_CONJ in kinds and g_prime + d > 0:
        out += [Move(MoveKind.GLOBAL_CONJ, DihedralElement.x(n).code), Move(MoveKind.GLOBAL_CONJ, DihedralElement.y(n).code)]
    return out


def all_moves(g_prime: int, d: int, n: int) -> list[Move]:
    """Every move kind at every valid index, inverses included."""
    fwd = generator_moves(g_prime, d, n)
    out = set(fwd)
    out.update(m.inverse(n) for m in fwd)
    return sorted(out)


def move_set_hash(kinds: Iterable[MoveKind] | None = None, mod_aut: bool = False) -> str:
    names = sorted(k.value for k in (FORWARD_KINDS if kinds is None else kinds))
    blob = json.dumps({"engine": _ENGINE_VERSION, "kinds": names, "mod_aut": mod_aut})
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# Batch application and orbits
# --------------------------------------------------------------------------


def _apply_batch(T, codes: np.ndarray, move: Move, d: int, g_prime: int) -> np.ndarray:
    cols = apply_to_columns(T, [codes[:, j] for j in range(codes.shape[1])], move, d, g_prime)
    return np.stack(cols, axis=1)


def _aut_batch(codes: np.ndarray, table: Sequence[int]) -> np.ndarray:
    return np.asarray(table, dtype=np.int64)[codes]


def _successors(T, codes, moves, aut_tables, d, g_prime):
    for m in moves:
        yield _apply_batch(T, codes, m, d, g_prime)
    for tab in aut_tables:
        yield _aut_batch(codes, tab)


def decode_keys(keys: np.ndarray, n: int, k: int) -> np.ndarray:
    out = np.empty((keys.shape[0], k), dtype=np.int64)
    rest = keys.copy()
    for j in range(k - 1, -1, -1):
        out[:, j] = rest % (2 * n)
        rest //= 2 * n
    return out


@dataclass(frozen=True)
class OrbitReport:
    seed: HurwitzVector
    size: int
    canonical: HurwitzVector
    diameter_bound: int
    mod_aut: bool
    complete: bool = True

    def to_json(self) -> dict:
        return {
            "seed": str(self.seed),
            "size": self.size,
            "canonical": str(self.canonical),
            "diameter_bound": self.diameter_bound,
            "mod_aut": self.mod_aut,
            "complete": self.complete,
        }


def orbit_closure(
    v: HurwitzVector,
    *,
    mod_aut: bool = False,
    move_set: Iterable[MoveKind] | None = None,
    cap: int = DEFAULT_CAP,
) -> tuple[np.ndarray, int, bool]:
    """Sorted keys of the orbit of ``v``, BFS depth reached, and completeness flag."""
    n, gp, d = v.n, v.g_prime, v.d
    k = d + 2 * gp
    T = tables(n)
    moves = generator_moves(gp, d, n, move_set)
    auts = automorphism_generator_tables(n) if mod_aut else ()
    frontier = np.array([v.codes], dtype=np.int64)
    visited = encode_rows(frontier, n)
    depth = 0
    if not (moves or auts):
        return visited, depth, True
    while len(frontier):
        imgs = np.concatenate(list(_successors(T, frontier, moves, auts, d, gp)), axis=0)
        new = np.setdiff1d(np.unique(encode_rows(imgs, n)), visited, assume_unique=True)
        if not len(new):
            break
        depth += 1
        visited = np.union1d(visited, new)
        if len(visited) > cap:
            return visited, depth, False
        frontier = decode_keys(new, n, k)
    return visited, depth, True


def orbit(
    v: HurwitzVector,
    *,
    mod_aut: bool = False,
    move_set: Iterable[MoveKind] | None = None,
    cap: int = DEFAULT_CAP,
) -> OrbitReport:
    """Breadth-first closure of ``v`` under the move set (and Aut(D_n) if ``mod_aut``).

    The canonical representative is the lexicographic minimum of the orbit, so
    it does not depend on the order in which the frontier is processed.  When
    the orbit outgrows ``cap`` the partial report has ``complete=False``.
    """
    visited, depth, complete = orbit_closure(v, mod_aut=mod_aut, move_set=move_set, cap=cap)
    k = v.d + 2 * v.g_prime
    canon = decode_keys(visited[:1], v.n, k)[0].tolist()
    return OrbitReport(
        seed=v,
        size=int(len(visited)),
        canonical=HurwitzVector.from_codes(v.n, v.g_prime, v.d, canon),
        diameter_bound=depth,
        mod_aut=mod_aut,
        complete=complete,
    )


class MoveSoundnessError(AssertionError):
    """A move sent a Hurwitz generating system outside HS."""


@dataclass
class Partition:
    """Orbit decomposition of a sorted set of HS code rows."""

    n: int
    g_prime: int
    d: int
    codes: np.ndarray
    labels: np.ndarray  # orbit id per row, numbered by first (= minimal) row
    mod_aut: bool
    move_hash: str
    sizes: np.ndarray = field(init=False)
    rep_rows: np.ndarray = field(init=False)

    def __post_init__(self):
        self.sizes = np.bincount(self.labels) if len(self.labels) else np.zeros(0, dtype=np.int64)
        if len(self.labels):
            _, first = np.unique(self.labels, return_index=True)
            self.rep_rows = first
        else:
            self.rep_rows = np.zeros(0, dtype=np.int64)

    @property
    def count(self) -> int:
        return int(len(self.sizes))

    def representative(self, label: int) -> HurwitzVector:
        return HurwitzVector.from_codes(self.n, self.g_prime, self.d, self.codes[self.rep_rows[label]].tolist())

    def summary(self) -> list[tuple[tuple[int, ...], int]]:
        return [(tuple(int(c) for c in self.codes[r]), int(s)) for r, s in zip(self.rep_rows, self.sizes)]


def partition_codes(
    codes: np.ndarray,
    n: int,
    g_prime: int,
    d: int,
    *,
    mod_aut: bool = False,
    move_set: Iterable[MoveKind] | None = None,
) -> Partition:
    """Split a move-closed (and Aut-closed if ``mod_aut``) set of HS rows into orbits."""
    kinds = None if move_set is None else tuple(move_set)
    T = tables(n)
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    N = codes.shape[0]
    keys = encode_rows(codes, n)
    order = np.argsort(keys, kind="stable")
    if not np.array_equal(order, np.arange(N)):
        codes, keys = codes[order], keys[order]
    moves = generator_moves(g_prime, d, n, kinds)
    auts = automorphism_generator_tables(n) if mod_aut else ()
    src, dst = [np.arange(N)], [np.arange(N)]
    for img in _successors(T, codes, moves, auts, d, g_prime):
        ik = encode_rows(img, n)
        pos = np.searchsorted(keys, ik)
        pos_c = np.minimum(pos, N - 1)
        bad = (pos >= N) | (keys[pos_c] != ik)
        if bad.any():
            row = codes[np.argmax(bad)].tolist()
            raise MoveSoundnessError(f"move image of {row} left the input set (n={n}, g'={g_prime}, d={d})")
        src.append(np.arange(N))
        dst.append(pos_c)
    if N:
        s, t = np.concatenate(src), np.concatenate(dst)
        graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, t)), shape=(N, N)).tocsr()
        _, raw = connected_components(graph, directed=True, connection="weak")
        # renumber components by their minimal row
        _, first = np.unique(raw, return_index=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first)] = np.arange(len(first))
        labels = rank[raw]
    else:
        labels = np.zeros(0, dtype=np.int64)
    return Partition(n, g_prime, d, codes, labels, mod_aut, move_set_hash(kinds, mod_aut))


def partition_hs(
    n: int,
    g_prime: int,
    d: int,
    *,
    mod_aut: bool = False,
    move_set: Iterable[MoveKind] | None = None,
    budget: int = DEFAULT_BUDGET,
) -> Partition:
    """Full orbit partition of HS(D_n; g', d)."""
    return partition_codes(hs_codes(n, g_prime, d, budget=budget), n, g_prime, d, mod_aut=mod_aut, move_set=move_set)


# --------------------------------------------------------------------------
# Orbit cache
# --------------------------------------------------------------------------


class OrbitCache:
    """Line-delimited JSON store of orbit summaries, one file per cell and move set."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    @classmethod
    def from_env(cls) -> OrbitCache | None:
        path = os.environ.get(CACHE_ENV)
        return cls(path) if path else None

    def _path(self, n, g_prime, d, mod_aut, move_hash) -> Path:
        tag = "aut" if mod_aut else "raw"
        return self.directory / f"orbits_n{n}_g{g_prime}_d{d}_{tag}_{move_hash}.jsonl"

    def get(self, n, g_prime, d, mod_aut, move_hash):
        path = self._path(n, g_prime, d, mod_aut, move_hash)
        if not path.exists():
            return None
        out = []
        with path.open() as fh:
            for line in fh:
                rec = json.loads(line)
                if (rec["n"], rec["g_prime"], rec["d"], rec["move_set"]) != (n, g_prime, d, move_hash):
                    return None
                out.append((tuple(rec["canonical"]), rec["size"]))
        return out

    def put(self, n, g_prime, d, mod_aut, move_hash, summary) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(n, g_prime, d, mod_aut, move_hash)
        tmp = path.with_suffix(".tmp")
        with tmp.open("w") as fh:
            for canon, size in summary:
                rec = {"n": n, "g_prime": g_prime, "d": d, "mod_aut": mod_aut, "move_set": move_hash,
                       "canonical": list(canon), "size": size}
                fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        os.replace(tmp, path)


def orbit_summary(
    n: int,
    g_prime: int,
    d: int,
    *,
    mod_aut: bool = True,
    cache: OrbitCache | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[tuple[tuple[int, ...], int]]:
    """(canonical codes, size) for every orbit of HS(D_n; g', d), using the cache if given."""
    h = move_set_hash(None, mod_aut)
    if cache is not None:
        hit = cache.get(n, g_prime, d, mod_aut, h)
        if hit is not None:
            return hit
    summary = partition_hs(n, g_prime, d, mod_aut=mod_aut, budget=budget).summary()
    if cache is not None:
        cache.put(n, g_prime, d, mod_aut, h, summary)
    return summary
