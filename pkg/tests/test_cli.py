import json

import pytest

from slitmaps.cli import main


def write(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def arcsine(tmp_path):
    return write(tmp_path / "arcsine.json",
                 {"atoms": [], "segments": [{"a": -2.0, "b": 2.0, "formula": "arcsine"}]})


def test_check_slit_accepts_arcsine(tmp_path, arcsine):
    out = tmp_path / "out"
    assert main(["--out", str(out), "check-slit", arcsine]) == 0
    report = json.loads((out / "check_slit.json").read_text())
    assert report["status"] == "ok" and report["case"] == "ZeroC"


def test_check_slit_rejects_semicircle(tmp_path):
    src = write(tmp_path / "semi.json",
                {"atoms": [], "segments": [{"a": -2.0, "b": 2.0, "formula": "semicircle"}]})
    out = tmp_path / "out"
    assert main(["--out", str(out), "check-slit", src]) == 4
    report = json.loads((out / "check_slit.json").read_text())
    assert report["status"] == "negative"
    assert report["conditions"]["c"]["witness"]["density_matching"]["antisymmetric"]


def test_self_intersecting_slit_is_input_error(tmp_path):
    src = write(tmp_path / "bad.json", [[0, 0], [0, 1], [1, 0.5], [0.5, 1.5], [0.5, 0.2]])
    assert main(["--out", str(tmp_path), "encode", src]) == 2


def test_missing_file_and_unknown_command(tmp_path):
    assert main(["--out", str(tmp_path), "check-slit", str(tmp_path / "nope.json")]) == 2
    assert main(["frobnicate"]) == 2


def test_outputs_are_deterministic(tmp_path):
    src = write(tmp_path / "slit.json", {"vertices": [[0, 0], [0.3, 1.0], [0.1, 1.8]]})
    runs = []
    for name in ("one", "two"):
        out = tmp_path / name
        assert main(["--out", str(out), "encode", src]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1] and "encode.json" in runs[0]


def test_encode_then_decode(tmp_path):
    src = write(tmp_path / "slit.json", [[0, 0], [0, 2]])
    assert main(["--out", str(tmp_path), "encode", src]) == 0
    assert main(["--out", str(tmp_path), "decode", str(tmp_path / "encode.driving.csv")]) == 0
    lines = (tmp_path / "decode.csv").read_text().splitlines()
    assert lines[0] == "param,re,im,err_est"
    tip = [float(v) for v in lines[-1].split(",")[1:3]]
    assert tip == pytest.approx([0.0, 2.0], abs=1e-3)
