import csv
import json
import subprocess
import sys

from geocast.cli import main


def test_sweep_writes_rows(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc = main(
        ["sweep", "--nodes", "200", "--densities", "6,8,10", "--runs", "2", "--senders", "2",
         "--protocols", "gfg,gfpg-star", "--out", str(out)]
    )
    assert rc == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 6
    assert {r["protocol"] for r in rows} == {"gfg", "gfpg-star"}
    assert "PASS" in capsys.readouterr().err


def test_sweep_json_from_extension(tmp_path):
    out = tmp_path / "r.json"
    assert main(["sweep", "--nodes", "150", "--densities", "8", "--runs", "1", "--senders", "1",
                 "--protocols", "flood", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["rows"][0]["mean_overhead"] == 150


def test_verify_reports_pass_count(capsys):
    rc = main(["verify", "--protocol", "gfpg", "--nodes", "300", "--runs", "12", "--densities", "6", "--senders", "3"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "12/12 PASS"


def test_verify_fails_for_gfg_on_sparse_networks(capsys):
    rc = main(["verify", "--protocol", "gfg", "--nodes", "300", "--runs", "20", "--densities", "5", "--senders", "5"])
    out = capsys.readouterr().out.strip()
    assert rc == 1
    assert out.endswith("FAIL")


def test_single_trace(capsys):
    rc = main(["single", "--protocol", "gfpg-star", "--density", "6", "--seed", "7", "--nodes", "300", "--trace"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("t=0 node=")
    summary = json.loads(out[out.index("{"):])
    assert summary["oracle"] == "PASS"
    assert summary["protocol"] == "gfpg-star"


def test_topo_dump(tmp_path):
    out = tmp_path / "t.json"
    assert main(["topo", "--nodes", "30", "--density", "8", "--seed", "3", "--planar", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["positions"]) == 30 and doc["planar_edges"]


def test_config_error_is_one_line(capsys):
    rc = main(["sweep", "--densities", "0", "--runs", "1"])
    err = capsys.readouterr().err
    assert rc == 2
    assert err.count("\n") == 1 and "densities" in err


def test_bad_protocol_rejected_before_running():
    proc = subprocess.run(
        [sys.executable, "-m", "geocast", "sweep", "--protocols", "olsr"], capture_output=True, text=True
    )
    assert proc.returncode == 2
    assert "unknown protocol" in proc.stderr
