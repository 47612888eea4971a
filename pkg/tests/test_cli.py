import json
import os

import pytest

from wildstrat.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_levi_gl3(capsys):
    code, out, _ = run_cli(capsys, "levi", "--type", "gl3")
    assert code == 0
    data = json.loads(out)
    assert data["nodes"] == 5


def test_levi_sl2_depth(capsys):
    code, out, _ = run_cli(capsys, "levi", "--type", "sl2", "--depth", "3")
    assert code == 0
    assert json.loads(out)["filtration_count"] == 4


def test_levi_b2(capsys):
    code, out, _ = run_cli(capsys, "levi", "--type", "B2")
    assert code == 0
    assert json.loads(out)["nodes"] == 6


def test_levi_dot_output(tmp_path, capsys):
    out_prefix = str(tmp_path / "levi_gl3")
    code, _, _ = run_cli(capsys, "levi", "--type", "gl3", "--out", out_prefix)
    assert code == 0
    dot = (tmp_path / "levi_gl3.dot").read_text()
    assert dot.startswith("digraph") and dot.count("->") == 6


def test_parabolic_gl3(capsys):
    code, out, _ = run_cli(capsys, "parabolic", "--type", "gl3")
    assert code == 0
    data = json.loads(out)
    assert data["parabolic_subsets"] == 13 and data["weyl_classes"] == 4


def test_classify(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"element": {"tuple": [["1"], ["0"]]}}))
    code, out, _ = run_cli(capsys, "classify", "--type", "sl2", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["strictness"] == 2
    assert data["filtration"] == [[], []]
    # the stratification-side filtration of (H, 0) is (empty, Phi)
    assert data["stratum_filtration"] == [[], [0, 1]]
    assert data["centralizer"]["dim"] == 2
    # zero input: the minimal stratum (everything in every Levi)
    cfg.write_text(json.dumps({"element": {"tuple": [["0"], ["0"]]}}))
    code, out, _ = run_cli(capsys, "classify", "--type", "sl2", "--config", str(cfg))
    data = json.loads(out)
    assert data["filtration"] == [[0, 1], [0, 1]]


def test_classify_gauge_round_trip(tmp_path, capsys):
    """A gauged fixture reports the same invariants as the fixture."""
    cfg = tmp_path / "c.json"
    element = {"depth": 2, "coeffs": [
        {"cartan": ["1"], "roots": {}},
        {"cartan": ["0"], "roots": {"0": "3/2"}},
    ]}
    cfg.write_text(json.dumps({"element": element}))
    code, out, _ = run_cli(capsys, "classify", "--type", "sl2", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["strictness"] == 2
    assert data["normal_form"]["coeffs"][0]["cartan"] == ["1"]


def test_shapovalov_first_singular(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 1, "lambdas": [["2"]]},
    }))
    code, out, _ = run_cli(capsys, "shapovalov", "--type", "sl2", "--depth", "1",
                           "--height", "4", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["first_singular_weight"] == ["6"]  # weight 3 alpha
    assert all("matrix" in b for b in data["blocks"])
    assert all(f["exact"] for f in data["factorisation"])


def test_shapovalov_height_zero(tmp_path, capsys):
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 1, "lambdas": [["2"]]},
    }))
    code, out, _ = run_cli(capsys, "shapovalov", "--type", "sl2", "--depth", "1",
                           "--height", "0", "--config", str(cfg))
    assert code == 0
    # K = 0: the single 1x1 block [1] through the cyclic vector
    blocks = json.loads(out)["blocks"]
    assert len(blocks) == 1 and blocks[0]["matrix"] == [["1"]]


def test_quantize(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 1, "lambdas": [["3"]]},
    }))
    code, out, _ = run_cli(capsys, "quantize", "--type", "sl2", "--depth", "1",
                           "--order", "2", "--height", "2", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["poisson_check"] is True and data["associativity"] is True
    assert data["terms"][0]["hdeg"] == 0


def test_quantize_singular_rejected(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 2, "lambdas": [["3"], ["0"]]},
    }))
    code, _, err = run_cli(capsys, "quantize", "--type", "sl2", "--depth", "2",
                           "--config", str(cfg))
    assert code == 2 and "singular" in err


def test_simplicity(tmp_path, capsys):
    cfg = tmp_path / "p.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 1, "lambdas": [["1/2"]]},
    }))
    code, out, _ = run_cli(capsys, "simplicity", "--type", "sl2", "--depth", "1",
                           "--height", "4", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["observed_simple_up_to_K"] is True


def test_validation_errors(tmp_path, capsys):
    code, _, err = run_cli(capsys, "levi", "--type", "nosuch")
    assert code == 2
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 1, "lambdas": [[0.5]]},
    }))
    code, _, err = run_cli(capsys, "shapovalov", "--type", "sl2", "--depth", "1",
                           "--config", str(cfg))
    assert code == 2
    # floats are rejected even as JSON numbers
    cfg.write_text('{"formal_type": {"depth": 1, "lambdas": [[0.5]]}}')
    code, _, err = run_cli(capsys, "shapovalov", "--type", "sl2", "--depth", "1",
                           "--config", str(cfg))
    assert code == 2


def test_inadmissible_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad2.json"
    cfg.write_text(json.dumps({
        "filtration": [[0], [0, 1]],
        "formal_type": {"depth": 2, "lambdas": [["1"], ["1"]]},
    }))
    code, _, err = run_cli(capsys, "shapovalov", "--type", "sl2", "--depth", "2",
                           "--config", str(cfg))
    assert code == 2


def test_deterministic_output(tmp_path, capsys):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 2, "lambdas": [["5"], ["7"]]},
    }))
    args = ("quantize", "--type", "sl2", "--depth", "2", "--order", "2",
            "--height", "2", "--config", str(cfg))
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_cache_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("WILDSTRAT_CACHE_DIR", str(tmp_path / "cache"))
    code, out1, _ = run_cli(capsys, "levi", "--type", "gl3")
    assert code == 0
    files = list((tmp_path / "cache").glob("*.json"))
    assert files
    code, out2, _ = run_cli(capsys, "levi", "--type", "gl3")
    assert code == 0 and out1 == out2


def test_workers_flag_deterministic(tmp_path, capsys):
    cfg = tmp_path / "w.json"
    cfg.write_text(json.dumps({
        "filtration": "borel",
        "formal_type": {"depth": 2, "lambdas": [["5"], ["7"]]},
    }))
    base = ("shapovalov", "--type", "sl2", "--depth", "2", "--height", "3",
            "--config", str(cfg))
    code1, out1, _ = run_cli(capsys, *base, "--workers", "1")
    code2, out2, _ = run_cli(capsys, *base, "--workers", "2")
    assert code1 == code2 == 0 and out1 == out2
