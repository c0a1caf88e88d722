import json
import logging

import numpy as np
import pytest

from twocoin import cli
from twocoin.errors import ConfigError
from twocoin.hilbert import GraphSpec, distance


def test_flag_mapping():
    cfg = cli.parse_config(["transfer-line", "--target", "3", "--input", "0.6,0", "0.8,0"])
    plan = cli.build_plan(cfg)
    assert (plan.case_tag, plan.n_steps) == ("L1_2", 7)
    assert cfg.input_state == ((0.6, 0.0), (0.8, 0.0))


def test_coprimality_named():
    with pytest.raises(ConfigError, match=r"gcd\(t,d\) must be 1"):
        cli.parse_config(["teleport-complete", "--d", "4", "--t", "2"])


def test_toml_config(tmp_path):
    cfg = cli.parse_config(text='protocol = "transfer-regular"\nn = 9\nd = 3\nx = 4\n')
    assert cli.build_plan(cfg).n_steps == 18
    path = tmp_path / "run.toml"
    path.write_text('protocol = "transfer-regular"\n[arena]\nn = 9\nd = 3\nx = 4\n'
                    '[input]\namplitudes = [[1, 0], [0, 0], [0, 0]]\n')
    cfg = cli.parse_config(["--config", str(path), "--target", "2"])
    assert cfg.x == 2 and cfg.n == 9  # flags override the file


@pytest.mark.parametrize("argv,needle", [
    (["transfer-cycle", "--target", "2"], "needs parameter d"),
    (["teleport-cycle", "--d", "6"], "d divisible by 4"),
    (["teleport-regular", "--n", "4", "--d", "3", "--t", "1"], "n >= 2d-1"),
    (["transfer-line", "--target", "2", "--input", "1,0"], "needs 2 amplitudes"),
    (["transfer-line", "--target", "2", "--input", "0,0", "0,0"], "nonzero"),
    (["certify", "--target", "2"], "certify needs --protocol"),
    (["transfer-line"], "needs parameter x"),
    (["transfer-cycle", "--d", "5", "--target", "2", "--method", "3"], "even number"),
])
def test_preconditions_named(argv, needle):
    with pytest.raises(ConfigError, match=needle):
        cli.parse_config(argv)


def test_bad_toml():
    with pytest.raises(ConfigError):
        cli.parse_config(text="protocol = ")


def test_norm_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="twocoin"):
        cfg = cli.parse_config(["transfer-line", "--target", "2", "--input", "3", "4"])
    assert "normalizing" in caplog.text
    assert np.allclose(cfg.input_state, [(0.6, 0), (0.8, 0)])


def test_exit_codes(tmp_path, capsys):
    out = str(tmp_path / "r.json")
    assert cli.main(["transfer-complete", "--d", "3", "--target", "0"]) == cli.EXIT_CONFIG
    assert "TargetError" in capsys.readouterr().err
    assert cli.main(["transfer-line", "--target", "3", "--out", out]) == cli.EXIT_PASS
    assert cli.main(["certify", "--protocol", "transfer-cycle", "--d", "6", "--target", "3",
                     "--corrupt-step", "2", "--out", out]) == cli.EXIT_FIDELITY
    rec = json.loads(open(out).read())["certification"][0]
    assert not rec["passed"] and rec["counterexample"]


def test_internal_guard_exit(monkeypatch, tmp_path):
    from twocoin import oracle
    monkeypatch.setattr(oracle, "MAX_DIM", 4)
    argv = ["certify", "--protocol", "transfer-line", "--target", "2", "--out", str(tmp_path / "r")]
    assert cli.main(argv) == cli.EXIT_INTERNAL


def test_teleport_line_table():
    rep = cli.run(cli.parse_config(["teleport-line", "--n", "6", "--enumerate"]))
    assert len(rep.data["branches"]) == 6
    assert all(f >= 1 - 1e-10 for f in rep.data["fidelities"])
    assert rep.exit_code == 0


def test_sample_mode_single_branch():
    cfg = cli.parse_config(["teleport-complete", "--d", "3", "--t", "1", "--sample", "--seed", "5"])
    rep = cli.run(cfg)
    assert len(rep.data["branches"]) == 1 and rep.verdict
    assert cli.emit_trace(rep, "structured") == cli.emit_trace(cli.run(cfg), "structured")


def test_csv_trace_rows():
    a, b = 0.6, 0.8
    cfg = cli.parse_config(["transfer-line", "--target", "2", "--input", f"{a},0", f"{b},0", "--trace"])
    text = cli.emit_trace(cli.run(cfg), "csv").decode()
    lines = text.splitlines()
    assert lines[0] == "step,position,coin1,coin2,re,im"
    step1 = [ln for ln in lines[1:] if ln.startswith("1,")]
    assert step1 == [f"1,-1,1,0,{b:.17g},0", f"1,1,0,0,{a:.17g},0"]


def test_csv_header_only_without_trace():
    rep = cli.run(cli.parse_config(["transfer-line", "--target", "2"]))
    assert cli.emit_trace(rep, "csv") == b"step,position,coin1,coin2,re,im\n"


@pytest.mark.parametrize("argv,arena", [
    (["transfer-cycle", "--d", "7", "--target", "3", "--method", "2"], GraphSpec.cycle(7)),
    (["transfer-regular", "--n", "7", "--d", "3", "--target", "5"], GraphSpec.circulant(7, 3)),
    (["teleport-complete", "--d", "5", "--t", "2"], GraphSpec.complete(5)),
])
def test_csv_round_trip(argv, arena):
    rep = cli.run(cli.parse_config(argv + ["--trace", "--seed", "9"]))
    dims = (arena.coin_dim, arena.coin_dim)
    back = cli.read_trace_csv(cli.emit_trace(rep, "csv").decode(), arena, dims)
    assert len(back) == len(rep.trace)
    for got, want in zip(back, rep.trace):
        assert distance(got, want) <= 1e-15


def test_structured_report_fields():
    rep = cli.run(cli.parse_config(["transfer-cycle", "--d", "8", "--target", "3", "--method", "4",
                                    "--trace"]))
    data = json.loads(cli.emit_trace(rep, "structured"))
    for key in ("protocol", "parameters", "step_count", "placements", "recovery", "certification",
                "fidelity", "verdict", "trace"):
        assert key in data
    assert data["placements"][0] == {"step": 1, "coin": 1, "op": "X"}
    assert data["certification"][-1]["passed"]


def test_determinism():
    argv = ["transfer-complete", "--d", "5", "--target", "2", "--seed", "3", "--trace"]
    one = cli.emit_trace(cli.run(cli.parse_config(argv)), "structured")
    two = cli.emit_trace(cli.run(cli.parse_config(argv)), "structured")
    assert one == two
    other = cli.emit_trace(cli.run(cli.parse_config(argv[:-2] + ["4", "--trace"])), "structured")
    assert other != one
