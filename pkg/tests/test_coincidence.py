import pytest

from dihedral_covers.coincidence import (
    CoincidenceError,
    coincidence_check_pair,
    coincidence_exception_example,
    d2_checks,
    dd_constructions,
    dn_group,
    dn_times_c2,
)


@pytest.mark.parametrize("n,h", [(3, 0), (5, 0), (4, 2), (6, 3), (4, 0), (6, 0)])
def test_pairs_are_one_type(n, h):
    rep = coincidence_check_pair(n, h)
    assert rep.ok, rep.failures()


def test_nielsen_functions():
    assert coincidence_check_pair(5, 0).details["nielsen_equal"]
    assert not coincidence_check_pair(4, 2).details["nielsen_equal"]
    # for n = 6 and h = 3 the two functions already agree
    assert coincidence_check_pair(6, 3).details["nielsen_equal"]


def test_pair_rejects_bad_h():
    with pytest.raises(CoincidenceError):
        coincidence_check_pair(5, 2)


@pytest.mark.parametrize("d4", [2, 3, 4])
def test_exception_example(d4):
    rep = coincidence_exception_example(d4)
    assert rep.ok, rep.failures()
    assert len(rep.identities) == 13


def test_exception_example_images():
    rep = coincidence_exception_example(2)
    names = dict(rep.identities)
    assert names["a = (yx, 0)"] and names["b = (x^-1, 1)"] and names["c = (x^2, 0)"] and names["[a, b] = c"]


def test_small_groups():
    assert dn_group(4).order == 8 and dn_group(4).is_associative()
    G = dn_times_c2(4)
    assert G.order == 16 and G.is_associative() and len(G.center()) == 4


@pytest.mark.parametrize("n,names", [
    (3, ["split D_n x C_2"]),
    (4, ["split D_n x C_2", "non-split D_2n", "semidirect D_n x| C_2"]),
    (6, ["split D_n x C_2", "non-split D_2n"]),
    (8, ["split D_n x C_2", "non-split D_2n"]),
    (12, ["split D_n x C_2", "non-split D_2n", "semidirect D_n x| C_2"]),
])
def test_constructions(n, names):
    cons = dd_constructions(n)
    assert [c.name for c in cons] == names
    for c in cons:
        assert c.ok, [k for k, v in c.checks if not v]


def test_d2():
    assert all(v for _, v in d2_checks())
