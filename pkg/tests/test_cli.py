"""Command-line behavior: parsing, validation, output formats, determinism."""
import json
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiquantum.adversary import AttackKind
from semiquantum.cli import EXIT_USAGE, CliConfig, main, parse_args, run
from semiquantum.protocols import bits_to_hex, hex_to_bits


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40))
def test_hex_encoding_roundtrip(bits):
    bits = tuple(bits)
    assert hex_to_bits(bits_to_hex(bits), len(bits)) == bits


def test_parse_defaults():
    cfg = parse_args(["--protocol", "sqka", "--n", "8", "--seed", "42"])
    assert cfg == CliConfig(
        protocol="sqka",
        n=8,
        m=None,
        attack=AttackKind.NONE,
        trials=1,
        seed=42,
        threshold=0.0,
        permutation=True,
        commitments=True,
        out=None,
        format="json",
        messages=(),
    )


def test_parse_full_flags():
    cfg = parse_args(
        [
            "--protocol", "sqka", "--n", "8", "--m", "24",
            "--trials", "1000", "--seed", "42", "--attack", "measure-resend",
            "--permutation", "off", "--commitments", "off",
            "--format", "csv", "--threshold", "0.1",
        ]
    )
    assert cfg.m == 24 and cfg.trials == 1000
    assert cfg.attack is AttackKind.MEASURE_RESEND
    assert not cfg.permutation and not cfg.commitments


@pytest.mark.parametrize("protocol", ["sqka", "sqkd", "cdssqc-ghz", "cdssqc-switch", "sqd"])
@pytest.mark.parametrize("attack", ["none", "cnot", "intercept-resend", "measure-resend"])
def test_every_attack_applies_to_every_protocol(protocol, attack):
    argv = ["--protocol", protocol, "--n", "2", "--attack", attack, "--trials", "2"]
    cfg = parse_args(argv)
    assert run(cfg)  # produces output without raising


def test_seed_env_fallback(monkeypatch):
    monkeypatch.setenv("SEMIQ_SEED", "777")
    cfg = parse_args(["--protocol", "sqka", "--n", "2"])
    assert cfg.seed == 777
    monkeypatch.delenv("SEMIQ_SEED")
    cfg = parse_args(["--protocol", "sqka", "--n", "2"])
    assert cfg.seed == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["--protocol", "sqd", "--n", "4", "--messages", "a"],          # needs two
        ["--protocol", "sqd", "--n", "4", "--messages", "ff,b"],       # too long
        ["--protocol", "sqd", "--n", "4", "--messages", "zz,a"],       # not hex
        ["--protocol", "sqka", "--n", "4", "--messages", "a"],         # not accepted
        ["--protocol", "sqka", "--n", "0"],
        ["--protocol", "sqka", "--n", "4", "--format", "csv"],          # transcript is json
        ["--protocol", "sqka", "--n", "4", "--threshold", "2"],
    ],
)
def test_validation_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_usage_error_exit_2(capsys):
    assert main(["--protocol", "bogus", "--n", "1"]) == EXIT_USAGE
    capsys.readouterr()


def test_single_session_prints_transcript(capsys):
    assert main(["--protocol", "sqka", "--n", "2", "--m", "2", "--seed", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    actions = [e["action"] for e in doc["events"]]
    assert actions.index("announce_K_A") < actions.index("reveal_Pi_n")
    assert doc["aborted"] is False


def test_sqd_message_combinations(capsys):
    # scripted single-bit dialogue: decoded messages match the inputs
    for m_a, m_b in ((0, 0), (0, 1), (1, 0), (1, 1)):
        argv = [
            "--protocol", "sqd", "--n", "1", "--seed", "5",
            "--messages", f"{m_a:x},{m_b:x}",
        ]
        assert main(argv) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["keys"]["bob_decoded"] == [m_a]
        assert doc["keys"]["alice_decoded"] == [m_b]


def test_cdssqc_scripted_message(capsys):
    argv = ["--protocol", "cdssqc-ghz", "--n", "4", "--seed", "2", "--messages", "a"]
    assert main(argv) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["keys"]["alice_sent"] == [1, 0, 1, 0]
    assert doc["keys"]["bob_decoded"] == [1, 0, 1, 0]


def test_batch_csv_row(capsys):
    argv = [
        "--protocol", "sqka", "--n", "4", "--trials", "200",
        "--seed", "42", "--format", "csv",
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    header, row = out.strip().split("\n")
    cells = row.split(",")
    assert cells[5] == "0.000000"
    assert cells[9] == "0.100000"


def test_identical_invocations_are_byte_identical(capsys):
    argv = ["--protocol", "sqd", "--n", "3", "--trials", "25", "--seed", "9"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert first == second


def test_out_file_written_atomically(tmp_path, capsys):
    target = tmp_path / "stats.csv"
    argv = [
        "--protocol", "sqka", "--n", "2", "--trials", "20",
        "--seed", "1", "--format", "csv", "--out", str(target),
    ]
    assert main(argv) == 0
    assert capsys.readouterr().out == ""
    text = target.read_text()
    assert text.startswith("protocol,")
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".semiquantum-")]
    assert leftovers == []


def test_out_file_io_error(capsys):
    argv = [
        "--protocol", "sqka", "--n", "2", "--trials", "2",
        "--seed", "1", "--out", "/nonexistent-dir/x/stats.json",
    ]
    assert main(argv) == 1
    assert "error:" in capsys.readouterr().err
