import subprocess
import sys

import pytest

from conftest import SONG
from gramlab.analysis import RECORD_HEADER, ExperimentRecord, read_csv
from gramlab.cli import main, read_config
from gramlab.coder import IntCode, code_length
from gramlab.experiments import zipf_text
from gramlab.grammar import Grammar
from gramlab.processes import SantaFeParams, sample_santafe, sample_ternary


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compress_round_trip(tmp_path, capsys):
    src = tmp_path / "corpus.txt"
    data = zipf_text(50_000, seed=3)
    src.write_bytes(data)
    code, out, _ = run(["compress", src], capsys)
    assert code == 0
    assert set(dict(kv.split("=") for kv in out.split())) == {"voc", "code_bytes", "file_bytes", "longest_repeat", "ratio"}
    packed = tmp_path / "corpus.txt.gbc"
    assert packed.exists()
    target = tmp_path / "restored.txt"
    assert run(["decompress", packed, "-o", target], capsys)[0] == 0
    assert target.read_bytes() == data


@pytest.mark.parametrize("transform", ["greedy", "kblock:3"])
def test_compress_transforms(tmp_path, capsys, transform):
    src = tmp_path / "song.txt"
    src.write_bytes(SONG)
    out = tmp_path / "song.gbc"
    assert run(["compress", src, "-o", out, "--transform", transform], capsys)[0] == 0
    assert run(["decompress", out, "-o", tmp_path / "back"], capsys)[0] == 0
    assert (tmp_path / "back").read_bytes() == SONG


def test_song_code_beats_single_rule(tmp_path, capsys):
    src = tmp_path / "song.txt"
    src.write_bytes(SONG)
    code, out, _ = run(["compress", src], capsys)
    stats = dict(kv.split("=") for kv in out.split())
    assert int(stats["code_bytes"]) < code_length(Grammar([list(SONG)], 256), IntCode(256))
    assert int(stats["voc"]) >= 2


def test_exhaustive_compress_limits(tmp_path, capsys):
    small = tmp_path / "s"
    small.write_bytes(b"abab")
    assert run(["compress", small, "--transform", "exhaustive"], capsys)[0] == 0
    big = tmp_path / "b"
    big.write_bytes(b"abababababab")
    assert run(["compress", big, "--transform", "exhaustive"], capsys)[0] == 2


def test_data_errors(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.write_bytes(b"")
    code, _, err = run(["compress", empty], capsys)
    assert code == 2 and "input empty" in err
    bad = tmp_path / "bad.gbc"
    bad.write_bytes(b"GBC1\x01\x07")
    assert run(["decompress", bad], capsys)[0] == 2
    assert run(["compress", tmp_path / "missing"], capsys)[0] == 2
    assert run(["vocab", empty], capsys)[0] == 2


def test_length_mismatch_is_a_data_error(tmp_path, capsys):
    from gramlab.coder import pack_container

    p = tmp_path / "x.gbc"
    p.write_bytes(pack_container(Grammar([list(b"abc")], 256), 4))
    code, _, err = run(["decompress", p], capsys)
    assert code == 2 and "length" in err


def test_usage_errors(tmp_path, capsys):
    assert run(["frobnicate"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["experiment", "nope"], capsys)[0] == 1
    assert run(["experiment", "ucard", "--beta", "1.5"], capsys)[0] == 1
    assert run(["experiment", "ucard", "--delta", "0.3"], capsys)[0] == 1
    assert run(["experiment", "ucard", "--n-grid", "10,x"], capsys)[0] == 1
    assert run(["experiment", "ucard", "--transform", "lz"], capsys)[0] == 1
    src = tmp_path / "f"
    src.write_bytes(b"abc")
    assert run(["compress", src, "--transform", "kblock:z"], capsys)[0] == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# ucard sweep\nbeta = 0.9\nn_grid=100,1000,10000  # three points\n\ndelta=0.8\n")
    assert read_config(cfg) == {"beta": "0.9", "n-grid": "100,1000,10000", "delta": "0.8"}
    out = tmp_path / "o"
    code, stdout, _ = run(["experiment", "ucard", "--config", cfg, "--out", out, "--beta", "0.75"], capsys)
    assert code == 0
    recs = read_csv(out / "ucard.csv")
    assert [r.n for r in recs] == [100, 1000, 10000]
    assert {(r.beta, r.delta) for r in recs} == {(0.75, 0.8)}
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour=blue\n")
    assert run(["experiment", "ucard", "--config", bad], capsys)[0] == 1
    bad.write_text("just words\n")
    assert run(["experiment", "ucard", "--config", bad], capsys)[0] == 1
    assert run(["experiment", "ucard", "--config", tmp_path / "none.cfg"], capsys)[0] == 1


def test_experiment_writes_csv(tmp_path, capsys):
    code, out, _ = run(["experiment", "ucard", "--out", tmp_path], capsys)
    assert code == 0
    assert (tmp_path / "ucard.csv").read_text().splitlines()[0] == RECORD_HEADER
    assert "ucard u_card: exponent=" in out
    first = (tmp_path / "ucard.csv").read_bytes()
    run(["experiment", "ucard", "--out", tmp_path], capsys)
    assert (tmp_path / "ucard.csv").read_bytes() == first
    recs = read_csv(tmp_path / "ucard.csv", ExperimentRecord)
    assert all(r.u_card is not None for r in recs)


def test_report_command(tmp_path, capsys):
    run(["experiment", "ucard", "--out", tmp_path, "--n-grid", "100,1000,10000,100000"], capsys)
    code, out, _ = run(["report", tmp_path / "ucard.csv", tmp_path / "ucard_curves.csv", "--out", tmp_path / "r"], capsys)
    assert code == 0
    assert (tmp_path / "r" / "ucard_u_card.svg").exists()
    assert (tmp_path / "r" / "ucard_lower_bound.svg").exists()
    assert run(["report", tmp_path / "missing.csv"], capsys)[0] == 2


def test_vocab_command(tmp_path, capsys):
    src = tmp_path / "song.txt"
    src.write_bytes(SONG)
    code, out, _ = run(["vocab", src], capsys)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()]
    assert any("Good morning" in r[0] for r in rows)
    assert all(len(r) == 3 and int(r[1]) >= 2 and int(r[2]) > 0 for r in rows)
    assert run(["vocab", src], capsys)[1] == out
    one = tmp_path / "one"
    one.write_bytes(b"x")
    assert run(["vocab", one], capsys)[1] == ""
    tsv = tmp_path / "v.tsv"
    assert run(["vocab", src, "--out", tsv, "--dy", "3"], capsys)[0] == 0
    assert tsv.exists()


def test_vocab_escapes_control_characters(tmp_path, capsys):
    src = tmp_path / "t"
    src.write_bytes(b"ab\tcd\nab\tcd\nab\tcd\n")
    out = run(["vocab", src], capsys)[1]
    assert all(line.count("\t") == 2 for line in out.splitlines())
    assert "\\t" in out


def test_simulate_santafe(tmp_path, capsys):
    code, out, _ = run(["simulate", "--n-grid", "50", "--seeds", "3,4"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 100
    want = sample_santafe(SantaFeParams(0.8, 3), 50).pairs()
    assert [tuple(map(int, line.split())) for line in lines[:50]] == want
    assert run(["simulate", "--n-grid", "50", "--seeds", "3,4"], capsys)[1] == out


def test_simulate_ternary_to_files(tmp_path, capsys):
    code, _, _ = run(["simulate", "--kind", "ternary", "--n-grid", "200", "--seeds", "2", "--out", tmp_path], capsys)
    assert code == 0
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["ternary_beta0.8_n200_seed0.txt", "ternary_beta0.8_n200_seed1.txt"]
    body = (tmp_path / files[1]).read_text().strip()
    assert body == sample_ternary(SantaFeParams(0.8, 1), 200).text()
    assert run(["simulate", "--kind", "ternary", "--beta", "0.6"], capsys)[0] == 1


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "gramlab.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "compress" in r.stdout
    r = subprocess.run([sys.executable, "-m", "gramlab.cli", "experiment"], capture_output=True, text=True)
    assert r.returncode == 1
