import csv
import json
import shutil
from pathlib import Path

import pytest

from bslab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(tmp_path, *argv):
    return main(list(argv))


def rows(path: Path) -> list[dict]:
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# bslab ")
    return list(csv.DictReader(lines[1:]))


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_counterexample_defects_increase(tmp_path):
    assert main(["euclid", "scan", "--config", str(CONFIGS / "euclid_counterexample.json"), "--out", str(tmp_path)]) == 0
    out = rows(tmp_path / "euclid_scan.csv")
    d = {}
    for r in out:
        d[int(r["n"])] = int(r["defect_f"])
    ns = sorted(d)
    assert all(d[a] < d[b] for a, b in zip(ns, ns[1:]) if a >= 3)
    meta = json.loads((tmp_path / "euclid_scan.json").read_text())["meta"]
    assert meta["module"] == "euclid" and len(meta["config_hash"]) == 64


def test_schreier_relative_zero_above_r(tmp_path):
    assert main(["schreier", "scan", "--config", str(CONFIGS / "schreier_free2.json"), "--out", str(tmp_path)]) == 0
    for r in rows(tmp_path / "schreier_scan.csv"):
        if int(r["n"]) > int(r["r"]):
            assert r["count_sum"] == "0" and r["sign_sum"] == "0"


def test_missing_seed_is_config_error(tmp_path, capsys):
    doc = json.loads((CONFIGS / "hyp_bsprob.json").read_text())
    del doc["seed"]
    assert main(["hyp", "bsprob", "--config", write(tmp_path, doc), "--out", str(tmp_path)]) == 2
    assert "seed" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    doc = json.loads((CONFIGS / "schreier_free2.json").read_text())
    doc["colour"] = "blue"
    assert main(["schreier", "scan", "--config", write(tmp_path, doc)]) == 2
    assert "colour" in capsys.readouterr().err


def test_wrong_model_and_bad_json(tmp_path):
    assert main(["hyp", "bsprob", "--config", str(CONFIGS / "schreier_free2.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["euclid", "scan", "--config", str(bad)]) == 2
    assert main(["euclid", "scan", "--config", str(tmp_path / "missing.json")]) == 2


def test_budget_exit_code(tmp_path):
    doc = {"model": "schreier", "group": {"kind": "surface", "rank": 2}, "scheme": {"kind": "homology_cover"},
           "n": [12], "r": [1]}
    assert main(["schreier", "scan", "--config", write(tmp_path, doc), "--out", str(tmp_path)]) == 3
    assert "BudgetExceeded" in (tmp_path / "schreier_scan.csv").read_text()


def _strip(path: Path) -> str:
    return "\n".join(path.read_text().splitlines()[1:])


@pytest.mark.parametrize("argv, stem", [
    (["zcover", "check", "--config", str(CONFIGS / "zcover_standard.json")], "zcover_check"),
    (["hyp", "bsprob", "--config", None], "hyp_bsprob"),
])
def test_reruns_byte_identical(tmp_path, argv, stem):
    if None in argv:
        doc = {"model": "hyperbolic", "seed": 5, "n": [1, 2], "R": [0.3, 0.55], "R_unit": "systole", "samples": 1500}
        argv = argv[:-1] + [write(tmp_path, doc)]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--threads", "2"]) == 0
    assert _strip(a / f"{stem}.csv") == _strip(b / f"{stem}.csv")
    assert (a / f"{stem}.json").read_bytes() == (b / f"{stem}.json").read_bytes()


def test_seed_override_changes_samples(tmp_path):
    doc = {"model": "hyperbolic", "seed": 5, "n": [1], "R": [0.55], "R_unit": "systole", "samples": 400}
    cfg = write(tmp_path, doc)
    assert main(["hyp", "injrad", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert main(["hyp", "injrad", "--config", cfg, "--out", str(tmp_path / "b"), "--seed-override", "6"]) == 0
    a, b = rows(tmp_path / "a" / "hyp_injrad.csv"), rows(tmp_path / "b" / "hyp_injrad.csv")
    assert [r["x"] for r in a] != [r["x"] for r in b]
    ja = json.loads((tmp_path / "a" / "hyp_injrad.json").read_text())["meta"]
    jb = json.loads((tmp_path / "b" / "hyp_injrad.json").read_text())["meta"]
    assert ja["config_hash"] != jb["config_hash"]


def test_injrad_vs_conjugation_command(tmp_path):
    doc = {"model": "hyperbolic", "seed": 7, "n": [1, 3], "R": [0.8], "R_unit": "systole", "samples": 300}
    assert main(["hyp", "prop24", "--config", write(tmp_path, doc), "--out", str(tmp_path)]) == 0
    for r in rows(tmp_path / "hyp_prop24.csv"):
        assert r["disagree"] == "0"


def test_default_output_directory(tmp_path, monkeypatch):
    shutil.copy(CONFIGS / "zcover_standard.json", tmp_path / "z.json")
    monkeypatch.chdir(tmp_path)
    assert main(["zcover", "check", "--config", "z.json"]) == 0
    assert (tmp_path / "out" / "zcover_standard" / "zcover_check.csv").exists()


def test_acceptance_subset(tmp_path, capsys):
    assert main(["suite", "acceptance", "--only", "2,3,7", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 3 and "3/3 criteria passed" in out
    assert (tmp_path / "acceptance.csv").exists()
