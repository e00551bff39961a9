import json
import subprocess
import sys

import pytest

from dihedral_covers.cli import EXIT_BUDGET, EXIT_DOMAIN, EXIT_OK, run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_etale(capsys):
    code, out, _ = _run(capsys, "classify", "-v", "n=4 g=2 c=[] ab=[y,x^2,x,e]")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["case"] == "Etale" and data["params"] == {"schur": 1}


def test_equivalent(capsys):
    code, out, _ = _run(capsys, "equivalent", "-v1", "n=4 g=2 c=[] ab=[y,e,x,e]", "-v2", "n=4 g=2 c=[] ab=[y,x^2,x,e]")
    assert (code, out.strip()) == (EXIT_OK, "false")
    code, out, _ = _run(capsys, "equivalent", "-v1", "n=3 g=1 c=[y,y] ab=[x,e]", "-v2", "n=3 g=1 c=[xy,xy] ab=[x,e]")
    assert (code, out.strip()) == (EXIT_OK, "true")


def test_invariant(capsys):
    code, out, _ = _run(capsys, "invariant", "-v", "n=4 g=2 c=[x,x] ab=[y,x,x,e]")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["nu"] == {"Rotation(1)": 2}
    assert data["h2_sigma_order"] == 2 and data["schur_bit"] == 0 and data["rotation_epsilon_bit"] == 0


def test_orbit(capsys):
    code, out, _ = _run(capsys, "orbit", "-v", "n=3 g=0 c=[y,xy,x] ab=[]", "--mod-aut")
    data = json.loads(out)
    assert code == EXIT_OK and data["size"] == 18 and data["complete"]


def test_orbit_cap(capsys):
    code, out, _ = _run(capsys, "orbit", "-v", "n=6 g=2 c=[x] ab=[y,x,x,x]", "--cap", "10")
    assert code == EXIT_BUDGET and not json.loads(out)["complete"]


def test_catalog(capsys, tmp_path):
    code, out, _ = _run(capsys, "catalog", "-n", "3", "-g", "2", "--oracle")
    data = json.loads(out)
    assert code == EXIT_OK and len(data["components"]) == 1 and data["components"][0]["dimension"] == 1
    path = tmp_path / "c.json"
    code, _, _ = _run(capsys, "catalog", "-n", "3", "-g", "2", "-o", str(path))
    written = json.loads(path.read_text())
    assert code == EXIT_OK
    assert data["components"][0]["flags"] == ["oracle_verified"] and written["components"][0]["flags"] == []
    assert {**written["components"][0], "flags": None} == {**data["components"][0], "flags": None}


def test_enumerate(capsys):
    code, out, _ = _run(capsys, "enumerate", "-n", "3", "-gp", "0", "-d", "3")
    assert code == EXIT_OK and len(out.splitlines()) == 18
    code, out, _ = _run(capsys, "enumerate", "-n", "3", "-gp", "0", "-d", "4", "--nu", "Rotation(1):2,ReflAll:2", "--limit", "5")
    assert len(out.splitlines()) == 5


def test_orbits_uses_cache(capsys, tmp_path):
    code, out, _ = _run(capsys, "--cache-dir", str(tmp_path), "orbits", "-n", "3", "-gp", "1", "-d", "2", "--mod-aut")
    assert code == EXIT_OK and len(out.splitlines()) == 2
    assert len(list(tmp_path.iterdir())) == 1


@pytest.mark.parametrize("argv", [
    ["classify", "-v", "garbage"],
    ["classify", "-v", "n=4 g=1 c=[x] ab=[y,e]"],
    ["enumerate", "-n", "4", "-gp", "0", "-d", "2", "--nu", "ReflAll:2"],
    ["equivalent", "-v1", "n=3 g=1 c=[y,y] ab=[x,e]", "-v2", "n=3 g=0 c=[y,y,x,x^2] ab=[]"],
])
def test_domain_errors(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == EXIT_DOMAIN and err.startswith("error:")


def test_budget_error(capsys):
    code, _, err = _run(capsys, "enumerate", "-n", "6", "-gp", "2", "-d", "4", "--budget", "1000")
    assert code == EXIT_BUDGET and "budget" in err


def test_verify_small_grid(capsys):
    code, out, _ = _run(capsys, "verify-paper", "--grid", "small")
    lines = out.splitlines()
    assert len(lines) == 11
    assert sum("[PASS]" in l for l in lines) == 10
    assert code == EXIT_DOMAIN  # criterion 10 as written fails


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "dihedral_covers.cli", "classify", "-v", "n=3 g=1 c=[y,y] ab=[x,e]"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["case"] == "WithReflections"
