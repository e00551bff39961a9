import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dihedral_covers.group_core import DihedralElement, parse_element
from dihedral_covers.hurwitz import HurwitzVector, evaluate, hs_codes, is_hurwitz_system, nu_type
from dihedral_covers.mcg_moves import (
    Move,
    MoveError,
    MoveKind,
    OrbitCache,
    all_moves,
    apply_move,
    braid_move,
    generator_moves,
    handle_move,
    move_set_hash,
    orbit,
    orbit_summary,
    partition_codes,
    partition_hs,
    xi_twist_a,
    xi_twist_b,
)

P = HurwitzVector.parse


def test_braid_examples():
    v = P("n=3 g=0 c=[y,x] ab=[]")
    w = braid_move(v, 1, "L")
    assert w == P("n=3 g=0 c=[x,xy] ab=[]")
    assert braid_move(w, 1, "R") == v
    r = P("n=5 g=0 c=[x,x^3] ab=[]")
    assert braid_move(r, 1) == P("n=5 g=0 c=[x^3,x] ab=[]")


def test_xi_twist_a_example():
    v = P("n=3 g=1 c=[x] ab=[xy,y]")
    assert xi_twist_a(v, 1) == P("n=3 g=1 c=[x^2] ab=[x^2y,y]")
    assert xi_twist_a(xi_twist_a(v, 1), 1, inverse=True) == v


def test_xi_twist_a_central():
    v = P("n=4 g=1 c=[y,y,x^2] ab=[x,1]")
    w = xi_twist_a(v, 1)
    assert w.c == v.c
    assert w.a[0] == parse_element("x^2", 4) * v.a[0]


def test_xi_twist_b_example():
    v = P("n=3 g=1 c=[x] ab=[xy,y]")
    w = xi_twist_b(v, 1)
    assert evaluate(w).is_identity
    assert w.a == v.a
    assert w.b[0] == parse_element("xy", 3).inverse() * parse_element("x", 3) * parse_element("xy", 3) * parse_element("y", 3)
    assert xi_twist_b(w, 1, inverse=True) == v


def test_handle_twists():
    v = P("n=3 g=1 c=[y,y] ab=[y,x]")
    assert handle_move(v, 1, "HandleTwistA").ab == (parse_element("y", 3), parse_element("xy", 3))
    assert handle_move(v, 1, "HandleTwistB").ab == (parse_element("y", 3) * parse_element("x", 3), parse_element("x", 3))
    for kind in ("HandleTwistA", "HandleTwistB"):
        w = handle_move(v, 1, kind)
        assert evaluate(w) == evaluate(v)


def test_global_conjugation():
    v = P("n=3 g=1 c=[y,y] ab=[x,1]")
    x = DihedralElement.x(3)
    w = handle_move(v, x, "GlobalConj")
    assert w.entries == tuple(x * e * x.inverse() for e in v.entries)
    assert nu_type(w) == nu_type(v)


def _literal_map2(a1, b1, a2, b2):
    """The four-entry substitution (a2 a1, b1, b1 a2 b1^-1, a2 b2 a2 b1^-1)."""
    return a2 * a1, b1, b1 * a2 * b1.inverse(), a2 * b2 * a2 * b1.inverse()


def _comm(a, b):
    return a * b * a.inverse() * b.inverse()


def test_literal_map2_substitution_breaks_the_relation():
    # kept as a regression: the uncorrected substitution does not fix [a1,b1][a2,b2]
    # once branch points make that product nontrivial
    d = 2
    codes = hs_codes(3, 2, d)
    broken = 0
    for row in codes.tolist():
        w = HurwitzVector.from_codes(3, 2, d, row)
        before = _comm(*w.ab[:2]) * _comm(*w.ab[2:])
        a1, b1, a2, b2 = _literal_map2(*w.ab)
        broken += _comm(a1, b1) * _comm(a2, b2) != before
    assert broken > 0


def test_map2_fixes_the_boundary_product():
    v = P("n=4 g=2 c=[] ab=[y,1,x,1]")
    w = handle_move(v, 1, "Map2")
    assert w == P("n=4 g=2 c=[] ab=[x^3y,1,x,x]")
    a1, b1, a2, b2 = w.ab
    assert _comm(a1, b1) * _comm(a2, b2) == _comm(*v.ab[:2]) * _comm(*v.ab[2:])
    assert handle_move(w, 1, "Map2Inv") == v


def test_move_bounds():
    with pytest.raises(MoveError):
        Move(MoveKind.BRAID_L, 3).check(0, 3, 4)
    with pytest.raises(MoveError):
        Move(MoveKind.XI_TWIST_A, 1).check(1, 0, 4)
    with pytest.raises(MoveError):
        Move(MoveKind.MAP2, 1).check(1, 2, 4)
    with pytest.raises(MoveError):
        braid_move(P("n=3 g=0 c=[y,y] ab=[]"), 2)


def test_every_kind_has_an_inverse_in_the_set():
    moves = set(all_moves(2, 3, 5))
    assert {m.kind for m in moves} == set(MoveKind)
    for m in moves:
        assert m.inverse(5) in moves


CELLS = [(3, 1, 2), (4, 1, 3), (4, 2, 1), (5, 0, 4), (6, 1, 2), (6, 2, 0)]


@given(st.sampled_from(CELLS), st.data())
def test_moves_preserve_hs_and_invert(cell, data):
    n, gp, d = cell
    codes = hs_codes(n, gp, d)
    v = HurwitzVector.from_codes(n, gp, d, codes[data.draw(st.integers(0, len(codes) - 1))].tolist())
    m = data.draw(st.sampled_from(all_moves(gp, d, n)))
    w = apply_move(v, m)
    assert is_hurwitz_system(w)
    assert nu_type(w) == nu_type(v)
    assert apply_move(w, m.inverse(n)) == v


def test_orbit_examples():
    seed = HurwitzVector.from_codes(3, 0, 3, hs_codes(3, 0, 3)[0].tolist())
    rep = orbit(seed, mod_aut=True)
    assert rep.size == 18 and rep.complete
    assert partition_hs(4, 2, 0, mod_aut=True).count == 2


def test_orbit_contains_seed_and_is_idempotent():
    v = P("n=4 g=1 c=[x,y,x^3y] ab=[x,1]")
    rep = orbit(v)
    again = orbit(rep.canonical)
    assert again.canonical == rep.canonical and again.size == rep.size
    assert tuple(rep.canonical.codes) <= tuple(v.codes)


def test_orbit_cap_flags_partial_report():
    rep = orbit(P("n=6 g=2 c=[x] ab=[y,x,x,x]"), cap=10)
    assert not rep.complete


def test_partition_is_consistent_with_orbits():
    n, gp, d = 4, 1, 2
    part = partition_hs(n, gp, d)
    for label in range(part.count):
        rep = orbit(part.representative(label))
        assert rep.size == part.sizes[label]


def test_partition_detects_a_set_that_is_not_closed():
    codes = hs_codes(3, 1, 2)[:5]
    with pytest.raises(AssertionError):
        partition_codes(codes, 3, 1, 2)


def test_restricted_move_set_gives_finer_partition():
    full = partition_hs(3, 0, 4)
    braids_only = partition_hs(3, 0, 4, move_set=[MoveKind.BRAID_L])
    assert braids_only.count >= full.count
    assert move_set_hash([MoveKind.BRAID_L]) != move_set_hash()


def test_generator_moves_cover_forward_kinds():
    kinds = {m.kind for m in generator_moves(2, 2, 4)}
    assert MoveKind.MAP2 in kinds and MoveKind.BRAID_L in kinds and MoveKind.GLOBAL_CONJ in kinds


def test_orbit_cache_round_trip(tmp_path):
    cache = OrbitCache(tmp_path)
    first = orbit_summary(3, 1, 2, cache=cache)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    lines = [json.loads(l) for l in files[0].read_text().splitlines()]
    assert len(lines) == len(first)
    assert {"n", "g_prime", "d", "move_set", "canonical", "size"} <= set(lines[0])
    assert orbit_summary(3, 1, 2, cache=cache) == first
    assert sum(s for _, s in first) == len(hs_codes(3, 1, 2))
