import itertools

import pytest

from dihedral_covers.group_core import ClassKind, ConjClassId, nontrivial_classes
from dihedral_covers.hurwitz import HurwitzVector, hs_codes
from dihedral_covers.invariants import (
    InvariantError,
    h2_order,
    h2_sigma_order,
    relative_h2_class,
    rotation_epsilon_bit,
    rotation_epsilon_bits,
    schur_bits,
    schur_lift_product,
)
from dihedral_covers.mcg_moves import all_moves, apply_move
from dihedral_covers.verification import _h2_sigma_oracle

P = HurwitzVector.parse
C = lambda kind, i=0: ConjClassId(kind, i)


@pytest.mark.parametrize("n,order", [(3, 1), (4, 2), (5, 1), (12, 2)])
def test_h2_order(n, order):
    assert h2_order(n).order == order


def test_h2_order_domain():
    with pytest.raises(InvariantError):
        h2_order(2)


def test_h2_sigma_examples():
    assert h2_sigma_order(6, [C(ClassKind.ROTATION, 1)]).order == 2
    assert h2_sigma_order(6, [C(ClassKind.REFL_EVEN)]).order == 1
    assert h2_sigma_order(6, [C(ClassKind.CENTRAL_ROTATION)]).order == 1
    assert h2_sigma_order(6, []).order == 2
    assert h2_sigma_order(5, [C(ClassKind.ROTATION, 2)]).order == 1


def test_h2_sigma_rejects_bad_classes():
    with pytest.raises(InvariantError):
        h2_sigma_order(6, [C(ClassKind.IDENTITY)])
    with pytest.raises(InvariantError):
        h2_sigma_order(6, [C(ClassKind.REFL_ALL)])
    with pytest.raises(InvariantError):
        h2_sigma_order(5, [C(ClassKind.REFL_EVEN)])
    with pytest.raises(InvariantError):
        h2_sigma_order(5, ["Rotation(1)"])


@pytest.mark.parametrize("n", range(3, 9))
def test_h2_sigma_against_commutator_oracle(n):
    classes = nontrivial_classes(n)
    for r in range(len(classes) + 1):
        for sigma in itertools.combinations(classes, r):
            assert h2_sigma_order(n, sigma).order == _h2_sigma_oracle(n, sigma)


def test_schur_bit_examples():
    assert schur_lift_product(P("n=4 g=2 c=[] ab=[y,1,x,1]")).bit == 0
    assert schur_lift_product(P("n=4 g=2 c=[] ab=[y,x^2,x,1]")).bit == 1
    assert schur_lift_product(P("n=4 g=2 c=[x,x] ab=[y,x,x,1]")).bit == 0


def test_schur_bit_domain():
    with pytest.raises(InvariantError):
        schur_lift_product(P("n=3 g=2 c=[] ab=[y,1,x,1]"))
    with pytest.raises(InvariantError):
        schur_lift_product(P("n=4 g=0 c=[y,x] ab=[]"))


def test_relative_class_examples():
    a = P("n=4 g=2 c=[x,x] ab=[y,x,x,1]")
    b = P("n=4 g=2 c=[x,x] ab=[y,x^3,x,1]")
    assert relative_h2_class(a, b).bit == 1
    assert relative_h2_class(a, a).bit == 0
    e0 = P("n=4 g=2 c=[] ab=[y,1,x,1]")
    e1 = P("n=4 g=2 c=[] ab=[y,x^2,x,1]")
    assert relative_h2_class(e0, e1).bit == 1


def test_relative_class_preconditions():
    a = P("n=4 g=2 c=[x,x] ab=[y,x,x,1]")
    with pytest.raises(InvariantError):
        relative_h2_class(a, P("n=4 g=2 c=[x^3,x^3] ab=[y,x,x,1]"))
    with pytest.raises(InvariantError):
        relative_h2_class(a, P("n=6 g=2 c=[x,x] ab=[y,x,x,1]"))
    refl = P("n=4 g=1 c=[y,y] ab=[x,1]")
    with pytest.raises(InvariantError):
        relative_h2_class(refl, refl)


@pytest.mark.parametrize("n", [4, 6])
def test_etale_schur_bit_is_move_invariant(n):
    codes = hs_codes(n, 2, 0)
    bits = schur_bits(codes, n, 2, 0)
    for row in range(0, len(codes), max(1, len(codes) // 200)):
        v = HurwitzVector.from_codes(n, 2, 0, codes[row].tolist())
        for m in all_moves(2, 0, n):
            assert schur_lift_product(apply_move(v, m)).bit == bits[row]


@pytest.mark.parametrize("cell", [(4, 1, 2), (4, 2, 2), (6, 1, 2), (6, 1, 3)])
def test_rotation_epsilon_bit_is_move_invariant(cell):
    n, gp, d = cell
    codes = hs_codes(n, gp, d)
    rot = [i for i, r in enumerate(codes.tolist()) if all(c % 2 == 0 and c // 2 != n // 2 for c in r[:d])]
    sub = codes[rot]
    bits = rotation_epsilon_bits(sub, n, gp, d)
    for row in range(0, len(sub), max(1, len(sub) // 100)):
        v = HurwitzVector.from_codes(n, gp, d, sub[row].tolist())
        assert rotation_epsilon_bit(v) == bits[row]
        for m in all_moves(gp, d, n):
            assert rotation_epsilon_bit(apply_move(v, m)) == bits[row]


def test_rotation_epsilon_bit_domain():
    with pytest.raises(InvariantError):
        rotation_epsilon_bit(P("n=4 g=1 c=[y,y] ab=[x,1]"))
