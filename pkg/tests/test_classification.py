import pytest
from hypothesis import given, strategies as st

from dihedral_covers.classification import (
    CaseTag,
    NotHurwitzSystem,
    ShapeMismatch,
    admissible_nus,
    apply_aut_table,
    canonical_invariant,
    cell_invariants,
    equivalent,
    form_from_data,
    normal_form,
    nu_realizable,
)
from dihedral_covers.group_core import ClassKind, ConjClassId, DihedralElement, automorphism_tables
from dihedral_covers.hurwitz import HurwitzVector, NuType, hs_codes, is_hurwitz_system, nu_type
from dihedral_covers.mcg_moves import all_moves, apply_move, handle_move, partition_codes

P = HurwitzVector.parse
ALL = ConjClassId(ClassKind.REFL_ALL)


def test_reflection_case_example():
    form = canonical_invariant(P("n=3 g=1 c=[y,y] ab=[x,1]"))
    assert form.case == CaseTag.WITH_REFLECTIONS
    assert form.representative == P("n=3 g=1 c=[xy,xy] ab=[x,1]")


def test_etale_example():
    form = canonical_invariant(P("n=4 g=2 c=[] ab=[y,x^2,x,e]"))
    assert form.case == CaseTag.ETALE and form.param("schur") == 1


def test_rotations_only_example():
    form = normal_form(P("n=5 g=2 c=[x^2,x^3] ab=[y,1,x,1]"))
    assert form.case == CaseTag.ROTATIONS_ONLY
    assert form.param("r") == (2, 2) and form.param("h") == 2
    assert normal_form(P("n=5 g=2 c=[x^2,x^2] ab=[y,x^2,x,1]")).sort_key() == form.sort_key()
    # x -> x^2 carries the labels (2, 2) to (1, 1)
    assert canonical_invariant(form.representative).param("r") == (1, 1)


def test_non_hurwitz_input_is_rejected():
    # evaluates to x, not the identity
    with pytest.raises(NotHurwitzSystem):
        normal_form(P("n=5 g=2 c=[x^2,x^3] ab=[y,x^2,x,1]"))


def test_canonical_invariant_is_idempotent():
    for text in ("n=3 g=1 c=[y,y] ab=[x,1]", "n=4 g=2 c=[x,x] ab=[y,x^3,x,1]", "n=6 g=1 c=[y,xy,x] ab=[x,1]"):
        form = canonical_invariant(P(text))
        assert canonical_invariant(form.representative).sort_key() == form.sort_key()


def test_epsilon_pair_is_not_identified_by_automorphisms():
    a = P("n=4 g=2 c=[x,x] ab=[y,x,x,1]")
    b = P("n=4 g=2 c=[x,x] ab=[y,x^3,x,1]")
    assert len(automorphism_tables(4)) == 8
    assert canonical_invariant(a).sort_key() != canonical_invariant(b).sort_key()
    assert not equivalent(a, b)


def test_global_conjugation_does_not_change_the_invariant():
    v = P("n=6 g=1 c=[y,xy,x] ab=[x,1]")
    for g in (DihedralElement.x(6), DihedralElement.y(6), DihedralElement(3, 1, 6)):
        assert equivalent(v, handle_move(v, g, "GlobalConj"))


def test_equivalence_examples():
    assert equivalent(P("n=3 g=1 c=[y,y] ab=[x,1]"), P("n=3 g=1 c=[xy,xy] ab=[x,1]"))
    assert not equivalent(P("n=4 g=2 c=[] ab=[y,1,x,1]"), P("n=4 g=2 c=[] ab=[y,x^2,x,1]"))
    v = P("n=5 g=0 c=[y,y,x,x^4] ab=[]")
    assert equivalent(v, v)
    with pytest.raises(ShapeMismatch):
        equivalent(v, P("n=5 g=1 c=[y,y] ab=[x,1]"))


def test_realizability_examples():
    r = nu_realizable(5, 0, NuType({ALL: 4}))
    assert r.realizable and r.rule_fired == "O"
    r = nu_realizable(5, 0, NuType({ALL: 2}))
    assert not r.realizable and r.rule_fired == "R"
    assert not len(hs_codes(5, 0, 2))
    for nu in admissible_nus(3, 3):
        assert nu_realizable(3, 2, nu) == nu_realizable(3, 2, nu).__class__(True, "AnyAdmissible_gp2")
    assert nu_realizable(5, 0, NuType({ALL: 3})).rule_fired == "None"


def _check_form_constraints(form):
    n = form.n
    if form.case in (CaseTag.WITH_REFLECTIONS, CaseTag.ROTATIONS_ONLY):
        r = form.param("r")
        assert list(r) == sorted(r) and all(0 < e <= n // 2 for e in r)
    if form.case == CaseTag.WITH_REFLECTIONS and n % 2 == 0:
        lo, hi = form.param("nu_refl")
        assert lo <= hi and (form.param("eps") + hi) % 2 == 1
    if form.case == CaseTag.ROTATIONS_ONLY:
        assert (2 * form.param("h") - sum(form.param("r"))) % n == 0
    assert is_hurwitz_system(form.representative)


@pytest.mark.parametrize("cell", [(3, 1, 3), (4, 1, 3), (4, 2, 1), (5, 1, 2), (6, 1, 2), (6, 2, 1), (4, 0, 4)])
def test_cell_invariants_match_orbits(cell):
    n, gp, d = cell
    codes = hs_codes(n, gp, d)
    part = partition_codes(codes, n, gp, d, mod_aut=True)
    inv = cell_invariants(n, gp, d, codes=codes)
    assert inv.count == part.count
    pairs = {(a, b) for a, b in zip(part.labels.tolist(), inv.labels.tolist())}
    assert len(pairs) == part.count
    for form in inv.forms:
        _check_form_constraints(form)
    for row in range(0, len(codes), max(1, len(codes) // 25)):
        v = HurwitzVector.from_codes(n, gp, d, codes[row].tolist())
        assert canonical_invariant(v).sort_key() == inv.forms[inv.labels[row]].sort_key()


def test_form_from_data_rejects_search_cases():
    with pytest.raises(ValueError):
        form_from_data(3, 0, 4, NuType({ALL: 2, ConjClassId(ClassKind.ROTATION, 1): 2}))


SAMPLE_CELLS = [(3, 1, 2), (4, 1, 2), (4, 2, 1), (6, 1, 2), (5, 2, 0)]


@given(st.sampled_from(SAMPLE_CELLS), st.data())
def test_invariant_constant_under_moves_and_automorphisms(cell, data):
    n, gp, d = cell
    codes = hs_codes(n, gp, d)
    v = HurwitzVector.from_codes(n, gp, d, codes[data.draw(st.integers(0, len(codes) - 1))].tolist())
    w = v
    for _ in range(data.draw(st.integers(1, 4))):
        w = apply_move(w, data.draw(st.sampled_from(all_moves(gp, d, n))))
    w = apply_aut_table(w, data.draw(st.sampled_from(automorphism_tables(n))))
    assert nu_type(w).total == nu_type(v).total
    assert canonical_invariant(w).sort_key() == canonical_invariant(v).sort_key()
