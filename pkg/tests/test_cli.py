from __future__ import annotations

import json

import pytest

from octocut import cli, datafiles
from octocut.polyring import GF, parse_polynomial


def run_json(tmp_path, argv: list[str], name: str = "out.json") -> tuple[int, dict]:
    path = tmp_path / name
    code = cli.main(argv + ["--json", str(path)])
    return code, json.loads(path.read_text())


def test_e6_verify(tmp_path):
    code, rep = run_json(tmp_path, ["e6", "verify"])
    assert code == 0 and rep["ok"] and rep["cubic_terms"] == 45


def test_cut_build_writes_26_quadrics(tmp_path):
    out = tmp_path / "cut.txt"
    assert cli.main(["cut", "build", "--d1", "2", "--d2", "3", "--field", "fp:10007",
                     "--out", str(out)]) == 0
    lines = [ln for ln in out.read_text().splitlines() if ln and not ln.startswith("#")]
    assert len(lines) == 26
    names = [f"t{i}" for i in range(1, 13)]
    assert all(parse_polynomial(ln, names, GF(10007)).homogeneous_degree() == 2 for ln in lines)


def test_cut_verify_symmetries(tmp_path):
    code, rep = run_json(tmp_path, ["cut", "verify-symmetries"])
    assert code == 0
    assert rep["match_symbolic"] and rep["c3_symmetry_rescaled"] and not rep["c3_symmetry_plain"]
    assert rep["galois_symbolic"] and all(rep["galois_orbit_closure"].values())


def test_hilbert_commands(tmp_path):
    code, rep = run_json(tmp_path, ["hilbert", "--system", "cut", "--max-deg", "3"])
    assert code == 0 and rep["dims"] == [1, 12, 52, 130]
    code, rep = run_json(tmp_path, ["hilbert", "--system", "op2", "--max-deg", "2",
                                    "--p", "10009"], "op2.json")
    assert rep["dims"] == [1, 27, 351] and rep["modulus"] == 10009
    code, rep = run_json(tmp_path, ["inv", "hilbert", "--max-deg", "2"], "inv.json")
    assert rep["invariant_dims"] == [1, 0, 4]


def test_disc_commands(tmp_path):
    code, rep = run_json(tmp_path, ["disc", "check"])
    assert code == 0 and rep["slice_ok"] and rep["cusp_pairs"]
    csv = tmp_path / "heat.csv"
    assert cli.main(["disc", "heatmap", "--grid", "3", "--csv", str(csv)]) == 0
    assert len(csv.read_text().splitlines()) == 10


def test_sing_find_small(tmp_path):
    code, rep = run_json(tmp_path, ["sing", "find", "--d1", "0.3+0.7j", "--d2=-1.1+0.4j",
                                    "--starts", "10"])
    assert code == 0 and rep["clusters"] == 0 and rep["starts"] == 10


def test_run_all_quick_is_deterministic(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    cli.main(["run-all", "--profile", "quick", "--seed", "1", "--json", str(a)])
    cli.main(["run-all", "--profile", "quick", "--seed", "1", "--threads", "3", "--json", str(b)])
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    verdicts = {c["name"]: c["verdict"] for c in rep["checks"]}
    exact = ["transcription", "constraint_identity", "equation_reproduction", "hilbert",
             "invariant_hilbert"]
    assert all(verdicts[n] == "pass" for n in exact)
    assert rep["command"] == "run-all --profile quick --seed 1"


def test_corrupted_data_skips_downstream_checks(tmp_path, data_copy):
    path = data_copy / "cartan_cubic.txt"
    text = path.read_text()
    assert "- 1*P7*P8*P9" in text
    path.write_text(text.replace("- 1*P7*P8*P9", "+ 1*P7*P8*P9"))
    code, rep = run_json(tmp_path, ["run-all", "--data-dir", str(data_copy)])
    assert code == 1
    verdicts = [c["verdict"] for c in rep["checks"]]
    assert verdicts[0] == "fail"
    assert set(verdicts[1:]) == {"skipped"}


def test_corrupted_data_with_refreshed_manifest_fails_verification(tmp_path, data_copy):
    path = data_copy / "affine_chart.txt"
    text = path.read_text()
    lines = text.splitlines()
    k = next(i for i, ln in enumerate(lines) if ln.startswith("P4 ="))
    lines[k] = lines[k].replace("= 1*P2*P24", "= -1*P2*P24")
    path.write_text("\n".join(lines) + "\n")
    datafiles.write_manifest(data_copy)
    code, rep = run_json(tmp_path, ["e6", "verify", "--data-dir", str(data_copy)])
    assert code == 1 and not rep["chart_ok"]


def test_unknown_field_is_rejected():
    with pytest.raises(ValueError):
        cli.main(["cut", "build", "--d1", "2", "--d2", "3", "--field", "zz"])
