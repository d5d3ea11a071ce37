import csv
import json

import pytest

from zklab.cli import emit_plot_data, load_config, main


def _run(*argv):
    return main([str(a) for a in argv])


def _read(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.fixture
def gi_no(tmp_path):
    out = tmp_path / "gi"
    assert _run("gi", "build", "--g0", "0-1,1-2", "--g1", "0-1,0-2,1-2", "--vertices", 3, "--out", out) == 0
    return out / "spec.json"


def test_hash_audit(tmp_path):
    out = tmp_path / "audit"
    assert _run("hash-audit", "--n1", 2, "--n2", 1, "--t", 3, "--out", out) == 0
    rep = _read(out / "report.json")
    assert rep["audit"]["uniform"] and rep["members"] == 64
    man = _read(out / "manifest.json")
    assert {f["file"] for f in man["files"]} == {"report.json", "uniformity.csv"}


def test_gi_and_protocol(tmp_path, gi_no):
    rep = _read(gi_no.parent / "report.json")
    assert not rep["isomorphic"] and rep["optimal_cheat"] == pytest.approx(0.5)
    out = tmp_path / "compose"
    assert _run("protocol", "compose", "--spec", gi_no, "--copies", 2, "--out", out) == 0
    assert _read(out / "report.json")["optimal_cheat"] == pytest.approx(0.25)
    out = tmp_path / "run"
    assert _run("protocol", "run", "--spec", gi_no, "--out", out) == 0
    assert _read(out / "report.json")["acceptance"] == pytest.approx(0.5)
    # no honest prover for non-isomorphic graphs
    assert _run("protocol", "run", "--spec", gi_no, "--prover", "honest", "--out", tmp_path / "h") == 2


def test_extract_outputs(tmp_path, gi_no):
    sim = tmp_path / "sim.json"
    sim.write_text(json.dumps({"kind": "gi_spike"}))
    out = tmp_path / "ex"
    assert _run("extract", "zq3", "--spec", gi_no, "--simulator", sim, "--out", out) == 0
    rep = _read(out / "report.json")
    assert rep["chain_holds"] and rep["q"] == pytest.approx(0.5)
    with open(out / "chain.csv") as fh:
        names = [r["name"] for r in csv.DictReader(fh)]
    assert names[0] == "cheat_closed_form" and "good_mass" in names
    rows = emit_plot_data([out])
    assert any(series.endswith("slack:final_bound") for series, _, _ in rows)


def test_searchlab_and_plot(tmp_path):
    cfg = tmp_path / "grover.cfg"
    cfg.write_text("# grover sweep\nt = 3\nn2 = 4\n")
    out = tmp_path / "grover"
    assert _run("searchlab", "grover", "--config", cfg, "--out", out) == 0
    rep = _read(out / "report.json")
    assert rep["t"] == 3 and rep["n2"] == 4 and len(rep["rows"]) == 4
    # flags beat the config file
    out2 = tmp_path / "grover2"
    assert _run("searchlab", "grover", "--config", cfg, "--n2", 3, "--out", out2) == 0
    assert _read(out2 / "report.json")["n2"] == 3
    plot = tmp_path / "plot"
    assert _run("plot", out, "--out", plot) == 0
    assert (plot / "plot_data.csv").read_text().startswith("series,x,y")


def test_load_config_formats(tmp_path):
    a = tmp_path / "a.json"
    a.write_text('{"t": 2, "mode": "mc"}')
    b = tmp_path / "b.cfg"
    b.write_text("t = 2\nmode = mc\n")
    assert load_config(a) == load_config(b)


def test_exit_codes(tmp_path, gi_no, monkeypatch):
    assert _run("searchlab", "grover", "--t", 1) == 2  # no --out
    assert _run("extract", "zq3", "--spec", tmp_path / "missing.json", "--simulator", "x",
                "--out", tmp_path / "m") == 2
    sim = tmp_path / "sim.json"
    sim.write_text(json.dumps({"kind": "gi_oracle_ignoring"}))
    assert _run("extract", "zq3", "--spec", gi_no, "--simulator", sim, "--t", 0, "--out", tmp_path / "z") == 3
    monkeypatch.setenv("ZKLAB_ENUM_LIMIT", "100")
    assert _run("hash-audit", "--n1", 3, "--n2", 2, "--t", 3, "--out", tmp_path / "big") == 3
    assert not (tmp_path / "big").exists()


def test_refuses_nonempty_out(tmp_path):
    out = tmp_path / "o"
    out.mkdir()
    (out / "x").write_text("keep")
    assert _run("hash-audit", "--out", out) == 2
    assert (out / "x").read_text() == "keep"
