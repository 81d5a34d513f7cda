import csv
import io
import json
from fractions import Fraction as F

import pytest

from kerovlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_catalog(capsys):
    code, out, _ = run(capsys, "catalog")
    data = json.loads(out)
    assert code == 0
    assert {"z", "zp", "theta"} <= set(data["families"]["young"]["params"])
    assert data["families"]["plane_partitions"]["no_kerov"] is True
    assert "heisenberg" in data["checks"]


def test_verify_sl2_young(capsys):
    code, out, _ = run(capsys, "verify", "sl2", "--family", "young", "--z", "2", "--zp", "3", "--theta", "1",
                       "--depth", "6")
    rep = json.loads(out)
    assert code == 0 and rep["ok"]
    assert rep["config"]["z"] == "2" and rep["config"]["depth"] == 6 and rep["config"]["which"] == "sl2"


def test_verify_heisenberg_macdonald(capsys):
    code, out, _ = run(capsys, "verify", "heisenberg", "--family", "macdonald", "--q", "1/3", "--t", "1/2",
                       "--depth", "5")
    rep = json.loads(out)
    assert code == 0 and rep["checks"][0]["r"] == "4/3"


def test_verify_heisenberg_bare_young_and_trees(capsys):
    code, out, _ = run(capsys, "verify", "heisenberg", "--family", "young", "--z", "2", "--zp", "3",
                       "--depth", "4")
    assert code == 0 and json.loads(out)["checks"][0]["r"] == "1"
    code, out, _ = run(capsys, "verify", "heisenberg", "--family", "trees", "--depth", "4")
    assert code == 1 and not json.loads(out)["ok"]


def test_plane_partitions_sl2(capsys):
    # the q-system still has solutions at depth 3; it first becomes empty at depth 5
    code, out, _ = run(capsys, "verify", "sl2", "--family", "plane_partitions", "--depth", "3")
    assert code == 0
    code, out, _ = run(capsys, "verify", "sl2", "--family", "plane_partitions", "--depth", "5")
    rep = json.loads(out)
    assert code == 1 and rep["checks"][0]["infeasible_at"] == "2,2"


@pytest.mark.parametrize("which", ["duality", "coherency", "zn", "comb_identity", "tn_action", "spectrum",
                                   "eigen", "orthogonality", "autoduality"])
def test_verify_kerov_checks(capsys, which):
    code, out, _ = run(capsys, "verify", which, "--family", "young", "--z", "2", "--zp", "3", "--xi", "1/2",
                       "--depth", "4")
    assert code == 0, out


def test_verify_kingman_and_rimhook(capsys):
    assert run(capsys, "verify", "kingman_degenerate", "--xi", "1/3", "--depth", "3")[0] == 0
    assert run(capsys, "verify", "rimhook", "--r", "2", "--z", "2", "--zp", "3", "--depth", "3")[0] == 0


def test_measure_pascal(capsys):
    code, out, _ = run(capsys, "measure", "--family", "pascal", "--t1", "1", "--t2", "2", "--n", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["vertex", "mass"] and len(rows) == 5
    assert sum(F(r[1]) for r in rows[1:]) == 1
    assert rows[1] == ["0,3", "2/5"]


def test_measure_json_embeds_config(capsys):
    code, out, _ = run(capsys, "measure", "--family", "pascal", "--t1", "1", "--t2", "2", "--n", "2",
                       "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["t1"] == "1"


def test_csv_out_writes_config_sidecar(capsys, tmp_path):
    target = tmp_path / "m.csv"
    code, _, _ = run(capsys, "measure", "--family", "pascal", "--t1", "1", "--t2", "2", "--n", "3",
                     "--out", str(target))
    assert code == 0 and target.read_text().startswith("vertex,mass")
    side = json.loads((tmp_path / "m.csv.config.json").read_text())
    assert side["config"]["n"] == 3 and side["total"] == "1"


def test_spectrum_young(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "young", "--z", "2", "--zp", "3", "--n", "3")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0][:3] == ["eigenvalue", "multiplicity", "predicted"]
    assert all(r[0] == r[2] for r in rows[1:])


def test_eigenfunctions_chain(capsys):
    code, out, _ = run(capsys, "eigenfunctions", "--family", "chain", "--t", "7/2", "--xi", "1/3", "--n", "1",
                       "--depth", "3")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["kind"] == "meixner"


def test_simulate_reproducible(capsys):
    argv = ("simulate", "--family", "schur", "--a", "5", "--xi", "0.4", "--T", "20", "--seed", "7")
    code, a, err = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert code == 0 and a == b and "float backend" in err
    head = json.loads(a.splitlines()[0])
    assert head["seed"] == 7 and head["params"]["a"] == "5"


def test_simulate_updown(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "young", "--z", "2", "--zp", "3", "--process", "updown",
                       "--n", "2", "--steps", "3", "--depth", "3", "--seed", "1")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and len(lines) == 5 and lines[0]["config"]["process"] == "updown"


@pytest.mark.parametrize("argv", [
    ("verify", "sl2", "--family", "young", "--zp", "3"),
    ("verify", "nonsense", "--family", "young"),
    ("measure", "--family", "nosuch", "--n", "2"),
    ("measure", "--family", "pascal", "--t1", "1", "--t2", "2", "--n", "-1"),
    ("verify", "eigen", "--family", "young", "--z", "2", "--zp", "3", "--xi", "3/2"),
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_simulate_replicas_report_uses_vertex_codes(capsys):
    code, out, _ = run(capsys, "simulate", "--family", "young", "--z", "2", "--zp", "3", "--xi", "2/5",
                       "--T", "10", "--replicas", "500", "--depth", "8", "--n", "3")
    rep = json.loads(out)
    states = [r["state"] for r in rep["report"]["table"]]
    assert code == 0 and "2,1" in states and states[-1] == ">3"
