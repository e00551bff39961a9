"""Second-homology invariants of dihedral Hurwitz systems.

H_2(D_n, Z) is trivial for n odd and Z/2 for n even; in the even case the
class of a vector is read off in the binary dihedral group, whose projection to
D_n has kernel {1, xi^n}.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .group_core import ClassKind, ConjClassId, tables
from .hurwitz import HurwitzVector, evaluate, sigma_set


class InvariantError(ValueError):
    """Inputs outside the domain of an invariant."""


@dataclass(frozen=True)
class H2Order:
    order: int

    def __int__(self) -> int:
        return self.order


@dataclass(frozen=True)
class SchurClass:
    bit: int

    def __int__(self) -> int:
        return self.bit


def h2_order(n: int) -> H2Order:
    if n < 3:
        raise InvariantError("h2_order needs n >= 3")
    return H2Order(1 if n % 2 else 2)


def h2_sigma_order(n: int, sigma: Iterable[ConjClassId]) -> H2Order:
    """Order of H_{2,Sigma}(D_n): Z/2 only for n even with Sigma inside the non-central rotations."""
    sigma = frozenset(sigma)
    for cid in sigma:
        if not isinstance(cid, ConjClassId):
            raise InvariantError(f"malformed class {cid!r}")
        if cid.kind == ClassKind.IDENTITY:
            raise InvariantError("Sigma cannot contain the identity class")
        if cid.kind == ClassKind.REFL_ALL and n % 2 == 0 or cid.kind in (ClassKind.REFL_EVEN, ClassKind.REFL_ODD) and n % 2:
            raise InvariantError(f"{cid.label()} is not a class of D_{n}")
        if cid.kind == ClassKind.CENTRAL_ROTATION and n % 2:
            raise InvariantError(f"D_{n} has no central rotation")
    base = h2_order(n)
    if base.order == 1:
        return base
    if any(c.is_reflection or c.kind == ClassKind.CENTRAL_ROTATION for c in sigma):
        return H2Order(1)
    return H2Order(2)


def _bit_of_central(code, n: int):
    """Binary code of 1 -> 0, of xi^n -> 1; anything else is a bug."""
    ok = (code == 0) | (code == 2 * n)
    if not np.all(ok):
        raise AssertionError("lifted product left the kernel of the projection")
    return (code != 0).astype(np.int64) if hasattr(code, "shape") else int(code != 0)


def _lift_product(T, cols, d: int, g_prime: int, lift):
    bmul = T.bd_mul
    acc = 0 * cols[0] if cols and hasattr(cols[0], "shape") else 0
    for j in range(d):
        acc = bmul[acc, lift[cols[j]]]
    for i in range(g_prime):
        acc = bmul[acc, T.bd_comm(T.lift[cols[d + 2 * i]], T.lift[cols[d + 2 * i + 1]])]
    return acc


def _require_even_and_closed(v: HurwitzVector) -> None:
    if v.n % 2:
        raise InvariantError("H_2(D_n) is trivial for odd n; no Schur bit")
    if not evaluate(v).is_identity:
        raise InvariantError("vector does not evaluate to the identity")


def schur_lift_product(v: HurwitzVector) -> SchurClass:
    """Bit of prod lift(c_j) * prod [lift(a_i), lift(b_i)] under the canonical section."""
    _require_even_and_closed(v)
    T = tables(v.n)
    code = _lift_product(T, list(v.codes), v.d, v.g_prime, T.lift)
    return SchurClass(_bit_of_central(int(code), v.n))


def schur_bits(codes: np.ndarray, n: int, g_prime: int, d: int) -> np.ndarray:
    """Vectorised :func:`schur_lift_product` over rows that evaluate to 1."""
    if n % 2:
        raise InvariantError("H_2(D_n) is trivial for odd n; no Schur bit")
    T = tables(n)
    cols = [codes[:, j] for j in range(codes.shape[1])]
    return _bit_of_central(_lift_product(T, cols, d, g_prime, T.lift), n)


def relative_h2_class(v1: HurwitzVector, v2: HurwitzVector) -> SchurClass:
    """Difference of Schur bits of two vectors with identical local monodromies."""
    if v1.n != v2.n:
        raise InvariantError("vectors live in different dihedral groups")
    if (v1.g_prime, v1.d) != (v2.g_prime, v2.d):
        raise InvariantError("vectors have different shapes (g', d)")
    if v1.c != v2.c:
        raise InvariantError("relative class needs entrywise identical c-lists")
    _require_even_and_closed(v1)
    _require_even_and_closed(v2)
    sigma = sigma_set(v1)
    if h2_sigma_order(v1.n, sigma).order != 2:
        raise InvariantError("H_{2,Sigma} is trivial for this Sigma")
    return SchurClass(schur_lift_product(v1).bit ^ schur_lift_product(v2).bit)


# --------------------------------------------------------------------------
# Equivariant lift on non-central rotations
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def equivariant_rotation_lift(n: int) -> np.ndarray:
    """Lift x^s -> xi^s (s < n/2), xi^(s+n) (s > n/2).

    On the non-central rotations this commutes with conjugation and inversion,
    so the lifted product below is unchanged by every move even when local
    monodromies are replaced by conjugates.  Entries for other elements are the
    canonical section and must not be used.
    """
    if n % 2:
        raise InvariantError("equivariant lift is only needed for even n")
    T = tables(n)
    lift = np.array(T.lift, copy=True)
    k = n // 2
    for s in range(k + 1, n):
        lift[2 * s] = 2 * (s + n)
    lift.setflags(write=False)
    return lift


def _require_rotation_sigma(n: int, sigma) -> None:
    if n % 2:
        raise InvariantError("the rotation epsilon bit needs even n")
    for cid in sigma:
        if cid.kind != ClassKind.ROTATION:
            raise InvariantError("the rotation epsilon bit needs Sigma inside the non-central rotations")


def rotation_epsilon_bit(v: HurwitzVector) -> int:
    """Move-invariant Z/2 datum of a vector with only non-central rotation monodromy."""
    _require_rotation_sigma(v.n, sigma_set(v))
    if not evaluate(v).is_identity:
        raise InvariantError("vector does not evaluate to the identity")
    T = tables(v.n)
    code = _lift_product(T, list(v.codes), v.d, v.g_prime, equivariant_rotation_lift(v.n))
    return _bit_of_central(int(code), v.n)


def rotation_epsilon_bits(codes: np.ndarray, n: int, g_prime: int, d: int) -> np.ndarray:
    """Vectorised :func:`rotation_epsilon_bit`; rows must satisfy its preconditions."""
    T = tables(n)
    cols = [codes[:, j] for j in range(codes.shape[1])]
    return _bit_of_central(_lift_product(T, cols, d, g_prime, equivariant_rotation_lift(n)), n)
