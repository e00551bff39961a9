import numpy as np
import pytest
from hypothesis import given, strategies as st

from dihedral_covers.group_core import ClassKind, ConjClassId
from dihedral_covers.hurwitz import (
    BudgetExceeded,
    GenusError,
    HurwitzVector,
    NuType,
    brute_force_hs,
    enumerate_hs,
    evaluate,
    hs_codes,
    hurwitz_genus,
    is_admissible,
    is_hurwitz_system,
    nu_count_matrix,
    nu_to_vector,
    nu_type,
    sigma_set,
)

P = HurwitzVector.parse
ROT1 = ConjClassId(ClassKind.ROTATION, 1)
ALL = ConjClassId(ClassKind.REFL_ALL)
EVEN, ODD = ConjClassId(ClassKind.REFL_EVEN), ConjClassId(ClassKind.REFL_ODD)


def test_parse_format_round_trip():
    text = "n=4 g=2 c=[x,x^3*y] ab=[y,e,x,x^2]"
    v = P(text)
    assert (v.n, v.g_prime, v.d) == (4, 2, 2)
    assert P(str(v)) == v
    with pytest.raises(ValueError):
        P("n=4 g=2 c=[] ab=[y,e]")
    with pytest.raises(ValueError):
        P("n=4 g=0 c=[q] ab=[]")


def test_evaluation_examples():
    assert evaluate(P("n=5 g=2 c=[] ab=[y,1,x,1]")).is_identity
    assert evaluate(P("n=3 g=1 c=[x] ab=[xy,y]")).is_identity
    assert not evaluate(P("n=3 g=0 c=[y,x] ab=[]")).is_identity


def test_hurwitz_system_examples():
    assert is_hurwitz_system(P("n=4 g=2 c=[] ab=[y,1,x,1]"))
    assert is_hurwitz_system(P("n=3 g=0 c=[x,x,x] ab=[]")).reason == "fails_generation"
    assert is_hurwitz_system(P("n=3 g=1 c=[y,y] ab=[x,1]"))
    assert is_hurwitz_system(P("n=3 g=0 c=[y,1,y] ab=[]")).reason == "fails_nontrivial"


def test_nu_type_examples():
    v = P("n=3 g=0 c=[y,xy,x] ab=[]")
    assert nu_type(v) == NuType({ALL: 2, ROT1: 1})
    assert sigma_set(v) == {ALL, ROT1}
    assert nu_type(P("n=3 g=2 c=[] ab=[y,1,x,1]")) == NuType()
    assert nu_type(P("n=6 g=0 c=[x,x^5] ab=[]")) == NuType({ConjClassId(ClassKind.ROTATION, 1): 2})


def test_nu_parse():
    nu = NuType.parse("Rotation(1):2,ReflAll:2", 3)
    assert nu == NuType({ROT1: 2, ALL: 2})
    assert NuType.parse("Rotation(2):1", 4) == NuType({ConjClassId(ClassKind.CENTRAL_ROTATION): 1})
    with pytest.raises(ValueError):
        NuType.parse("ReflAll:1", 4)
    with pytest.raises(ValueError):
        NuType.parse("Blob:1", 4)


def test_admissibility():
    assert is_admissible(NuType({ALL: 2}), 5)
    assert not is_admissible(NuType({ALL: 3}), 5)
    assert not is_admissible(NuType({EVEN: 1, ODD: 1}), 6)
    assert is_admissible(NuType({EVEN: 1, ODD: 1, ROT1: 1}), 6)


def test_genus_formula():
    assert hurwitz_genus(3, 0, (2, 2, 3, 3)) == 2
    assert hurwitz_genus(3, 2, ()) == 7
    assert hurwitz_genus(4, 2, ()) == 9
    with pytest.raises(GenusError):
        hurwitz_genus(3, 0, (2, 2, 2))
    with pytest.raises(GenusError):
        hurwitz_genus(3, 0, (5,))


def test_small_counts():
    assert len(hs_codes(3, 0, 3)) == 18
    assert len(hs_codes(4, 0, 1)) == 0
    assert len(hs_codes(3, 1, 0)) == 0


@pytest.mark.parametrize("cell", [(3, 0, 3), (3, 0, 4), (4, 1, 1), (4, 1, 2), (3, 1, 2), (4, 0, 4), (5, 1, 1), (3, 2, 0)])
def test_vectorised_enumeration_matches_brute_force(cell):
    n, gp, d = cell
    fast = [tuple(r) for r in hs_codes(n, gp, d).tolist()]
    assert fast == sorted(brute_force_hs(n, gp, d))


def test_enumeration_is_independent_of_jobs():
    assert np.array_equal(hs_codes(4, 1, 3, jobs=1), hs_codes(4, 1, 3, jobs=4))


def test_enumeration_filtered_by_nu():
    nu = NuType({ROT1: 2, ALL: 2})
    rows = list(enumerate_hs(3, 0, 4, nu))
    assert rows and all(nu_type(v) == nu for v in rows)
    counts = nu_count_matrix(hs_codes(3, 0, 4), 3, 4)
    assert len(rows) == int((counts == nu_to_vector(nu, 3)).all(axis=1).sum())


def test_budget():
    with pytest.raises(BudgetExceeded):
        hs_codes(6, 2, 4, budget=10**6)


@given(st.integers(3, 6), st.data())
def test_enumerated_rows_are_hurwitz_systems(n, data):
    codes = hs_codes(n, 1, 2)
    row = data.draw(st.integers(0, len(codes) - 1))
    v = HurwitzVector.from_codes(n, 1, 2, codes[row].tolist())
    assert is_hurwitz_system(v)
