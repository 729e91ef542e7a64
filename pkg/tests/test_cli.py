import json
import subprocess
import sys

import pytest

from conelip.cli import main


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "space": _write(tmp_path / "space.json", {"kind": "points", "norm": "l2", "dim": 1, "points": [[0], [1], [2]]}),
        "id": _write(tmp_path / "id.json", {"values": [0, 1, 2]}),
        "g": _write(tmp_path / "g.json", {"values": [0, -1, 0]}),
        "bad": _write(tmp_path / "bad.json", {"values": [1, 0, 0]}),
        "rays": _write(tmp_path / "rays.json", {"norm": "l2", "dim": 1, "directions": [[1], [-1]], "values": [2, 1]}),
        "part": _write(tmp_path / "part.json", {"domain": [0, 1], "values": [0, 1]}),
        "mu": _write(tmp_path / "mu.json", {"terms": [{"point": 1, "a": 1}, {"point": 2, "a": 1}]}),
        "ph": _write(tmp_path / "ph.json", {"norm": "l2", "dim": 1, "terms": [{"x": [2], "a": 1.0}, {"x": [-1], "a": -1.0}]}),
        "open": _write(tmp_path / "open.json", {"norm": "l2", "dim": 2, "directions": [[1, 0], [0, 1]], "values": [1, None]}),
        "scal": _write(tmp_path / "scal.json", {"scalings": [[1, 2, 2]]}),
        "circle": _write(tmp_path / "circle.json", {"kind": "points", "norm": "l2", "dim": 2, "points": [[0, 0], [1, 0], [0, 1]]}),
        "pair": _write(tmp_path / "pair.json", {"terms": [{"point": 1, "a": 1}, {"point": 2, "a": 1}]}),
        "g2": _write(tmp_path / "g2.json", {"values": [0, 0, 1]}),
        "tmp": tmp_path,
    }


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


def test_lip(files, capsys):
    assert run(["lip", files["space"], files["id"]], capsys)[:2] == (0, "1")


def test_cone_lip(files, capsys):
    assert run(["cone-lip", files["rays"]], capsys)[:2] == (0, "2")


def test_extend(files, capsys):
    code, out, _ = run(["extend", files["space"], files["part"], "--method", "inf"], capsys)
    assert code == 0 and json.loads(out)["values"] == [0, 1, 2]
    code, out, _ = run(["extend", files["space"], files["part"]], capsys)
    assert json.loads(out)["values"] == [0, 1, 0]


def test_kr_norm_methods(files, capsys):
    for method in ("lp", "flow", "both"):
        code, out, _ = run(["kr-norm", files["space"], files["mu"], "--method", method], capsys)
        assert code == 0 and float(out) == pytest.approx(3)


def test_ph_norm(files, capsys):
    code, out, _ = run(["ph-norm", files["ph"]], capsys)
    assert code == 0 and float(out) == pytest.approx(3)


def test_quotient_prints_primal_dual(files, capsys):
    code, out, _ = run(["quotient", files["space"], files["g"], "--generators", files["id"], "--exact"], capsys)
    lines = dict(line.split(" ", 1) for line in out.splitlines())
    assert code == 0 and lines["primal"] == "1" and lines["dual"] == "1" and lines["gap"] == "0"
    assert json.loads(lines["measure"]) == {"terms": [{"point": 1, "a": -1}, {"point": 2, "a": "1/2"}]}


def test_ph_quotient(files, capsys):
    code, out, _ = run(["ph-quotient", files["space"], files["g2"], "--scalings", files["scal"], "--exact"], capsys)
    assert code == 0 and out.splitlines()[:2] == ["primal 1/2", "dual 1/2"]


def test_ph_extend_and_odot(files, capsys):
    code, out, _ = run(["ph-extend", files["open"]], capsys)
    assert code == 0 and json.loads(out)["values"] == [1, 0]
    code, out, _ = run(["odot", files["rays"], files["rays"]], capsys)
    assert json.loads(out)["values"] == pytest.approx([0.8, 0.2])
    code, out, _ = run(["odot", files["rays"], files["rays"], "--raw"], capsys)
    assert json.loads(out)["values"] == [4, 1]


def test_theta_phi_q(files, capsys):
    code, out, _ = run(["theta", files["circle"], files["pair"]], capsys)
    assert code == 0
    doc = json.loads(out)
    ph_file = _write(files["tmp"] / "t.json", doc)
    code, out, _ = run(["phi", ph_file, "--space", files["circle"]], capsys)
    assert json.loads(out)["element"] == {"terms": [{"point": 1, "a": 1}, {"point": 2, "a": 1}]}
    assert run(["q", files["circle"], files["pair"]], capsys)[1] == "2"


def test_json_record(files, capsys):
    code, out, _ = run(["lip", files["space"], files["g"], "--json"], capsys)
    rec = json.loads(out)
    assert set(rec) == {"op", "inputs_hash", "value", "witness", "tolerance", "certificate"}
    assert rec["value"] == 1 and rec["witness"]["pair"] == [0, 1]
    again = run(["lip", files["space"], files["g"], "--json"], capsys)[1]
    assert again == out


def test_exit_codes(files, capsys, monkeypatch):
    assert run(["lip", files["space"], files["bad"]], capsys)[0] == 1
    assert run(["lip", files["space"], str(files["tmp"] / "missing.json")], capsys)[0] == 1
    import conelip.cli as cli
    from conelip.exceptions import NoConvergence

    def boom(*a, **k):
        raise NoConvergence("forced")

    monkeypatch.setattr(cli, "ph_norm_result", boom)
    code, _, err = run(["ph-norm", files["ph"]], capsys)
    assert code == 3 and "forced" in err


def test_verify_failure_exit_code(tmp_path, capsys, monkeypatch):
    import conelip.verify as verify

    def failing(rng, index):
        return "lip", "demo anchor", {}, [verify.Check("always fails", 1.0, 0.0)], {"x": index}

    monkeypatch.setitem(verify.SUITES, "lipschitz", (failing, 2))
    code, _, err = run(["verify", "--suite", "lipschitz", "--report", str(tmp_path / "r.json")], capsys)
    assert code == 2
    assert "demo anchor" in err
    assert (tmp_path / "r-counterexamples" / "lipschitz-1.json").exists()


def test_verify_report_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["verify", "--suite", "q-bound", "--cases", "6", "--seed", "3", "--report", str(a)], capsys)[0] == 0
    assert run(["verify", "--suite", "q-bound", "--cases", "6", "--seed", "3", "--report", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()


def test_module_entry_point(files):
    out = subprocess.run([sys.executable, "-m", "conelip", "cone-lip", files["rays"]], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "2"
