import json
import subprocess
import sys

import numpy as np
import pytest

from lcp import synth
from lcp.cli import main
from lcp.container import read_container, read_header
from lcp.csvio import parse_csv
from lcp.quantize import DEFAULT_CHANNELS, quantize_array


@pytest.fixture(scope="module")
def csv_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "in.csv"
    assert main(["synth", str(path), "--duration", "20", "--seed", "3"]) == 0
    return path


def _quantized(text):
    p = parse_csv(text)
    return [quantize_array(c, s) for c, s in zip(p.channels, DEFAULT_CHANNELS)]


def test_compress_decompress_roundtrip(csv_path, tmp_path, capsys):
    out = tmp_path / "a.bin"
    assert main(["compress", str(csv_path), str(out), "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["rows"] == 1000 and summary["ratio"] > 1
    back = tmp_path / "a.csv"
    assert main(["decompress", str(out), str(back)]) == 0
    for a, b in zip(_quantized(csv_path.read_text()), _quantized(back.read_text())):
        assert np.array_equal(a, b)


def test_verify(csv_path, capsys):
    assert main(["verify", str(csv_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("OK") and "bits per value" in out
    assert main(["verify", str(csv_path), "--json", "--obfuscate", "9", "--seed", "1"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "OK"


def test_lca_values_are_multiples_of_five(csv_path, tmp_path):
    out = tmp_path / "lca.bin"
    assert main(["compress", str(csv_path), str(out), "--lca"]) == 0
    header, chans = read_container(out.read_bytes())
    assert all(c.lca for c in header.channels)
    for before, after in zip(_quantized(csv_path.read_text()), chans):
        assert (after % 5 == 0).all()
        assert np.abs(after.astype(int) - before).max() <= 2


def test_obfuscate_count_prefix(csv_path, tmp_path):
    out = tmp_path / "o.bin"
    assert main(["compress", str(csv_path), str(out), "--obfuscate", "6", "--seed", "2"]) == 0
    data = out.read_bytes()
    _, off = read_header(data)
    assert data[off] == 0b00000110


def test_inspect_and_stats(csv_path, tmp_path, capsys):
    out = tmp_path / "s.bin"
    main(["compress", str(csv_path), str(out)])
    capsys.readouterr()
    assert main(["inspect", str(out)]) == 0
    header = json.loads(capsys.readouterr().out)
    assert header["magic"] == "LCP1" and header["sample_rate_mHz"] == 50000
    assert [c["name"] for c in header["channels"]] == ["V", "I", "P", "Q"]
    assert main(["stats", str(out), "--json"]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["file_bytes"] == out.stat().st_size
    assert main(["stats", str(out)]) == 0
    assert "bits/value" in capsys.readouterr().out


def test_bench_json(capsys):
    assert main(["bench", "--duration", "10", "--json"]) == 0
    r = json.loads(capsys.readouterr().out)
    assert r["value_count"] == 4 * 500 and r["bits_per_value"] > 0


def test_stdin_stdout(csv_path):
    text = csv_path.read_bytes()
    run = [sys.executable, "-m", "lcp"]
    blob = subprocess.run(run + ["compress", "-", "-"], input=text,
                          capture_output=True, check=True).stdout
    assert blob[:4] == b"LCP1"
    back = subprocess.run(run + ["decompress", "-", "-"], input=blob,
                          capture_output=True, check=True).stdout
    assert np.array_equal(_quantized(back.decode())[2], _quantized(text.decode())[2])


def _write(tmp_path, name, data):
    p = tmp_path / name
    p.write_bytes(data)
    return str(p)


def test_exit_codes(csv_path, tmp_path, capsys):
    good = tmp_path / "g.bin"
    main(["compress", str(csv_path), str(good)])
    blob = good.read_bytes()

    bad_cell = _write(tmp_path, "bad.csv", b"timestamp,V,I,P,Q\n0,1,x,1,1\n")
    assert main(["compress", bad_cell, str(tmp_path / "x.bin")]) == 3
    too_big = _write(tmp_path, "big.csv", b"timestamp,V,I,P,Q\n0,400,1,1,1\n1,400,1,1,1\n")
    assert main(["compress", too_big, str(tmp_path / "x.bin")]) == 4
    assert main(["compress", too_big, str(tmp_path / "x.bin"), "--clamp"]) == 0
    assert main(["decompress", str(tmp_path / "missing.bin"), "-"]) == 5
    assert main(["decompress", _write(tmp_path, "m.bin", b"XXXX" + blob[4:]), "-"]) == 6
    assert main(["decompress", _write(tmp_path, "v.bin", blob[:4] + b"\x09" + blob[5:]), "-"]) == 7
    assert main(["decompress", _write(tmp_path, "t.bin", blob[:-3]), "-"]) == 8
    assert main(["decompress", _write(tmp_path, "c.bin", blob + b"\x00"), "-"]) == 9
    single = _write(tmp_path, "one.csv", b"timestamp,V,I,P,Q\n0,1,1,1,1\n")
    assert main(["compress", single, str(tmp_path / "x.bin")]) == 2
    assert main(["compress", single, str(tmp_path / "x.bin"), "--rate", "50"]) == 0
    with pytest.raises(SystemExit) as exc:
        main(["compress", str(csv_path), "x.bin", "--obfuscate", "256"])
    assert exc.value.code == 2
    err = capsys.readouterr().err
    assert "parse error" in err and "row 2" in err


def test_custom_columns(tmp_path):
    src = _write(tmp_path, "c.csv", b"P;junk;t\n10;a;0\n10;b;1\n15;c;2\n")
    out = tmp_path / "c.bin"
    assert main(["compress", src, str(out), "--columns", "P,-,t", "--delimiter", ";"]) == 0
    header, (p,) = read_container(out.read_bytes())
    assert p.tolist() == [10, 10, 15] and header.sample_rate_mHz == 1000
