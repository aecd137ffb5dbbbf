import csv
import io
import json
import math

import pytest

from relbc import __version__, cli
from relbc.config import ConfigError, parse_config

IDEAL = '[code]\nN = 2\nk = 1\n[channel]\nname = "ideal"\n[run]\ntrials = 100\nseed = 1\n'
ROTATE = ('[code]\nN = 4\nk = 5\n[channel]\nname = "rotate"\n'
          'params = { theta = 0.3, lam = 0.6 }\n[run]\ntrials = 2000\nseed = 2\n')
NONCAUSAL = ('[code]\nN = 2\nk = 1\n[channel]\nname = "advanced"\n'
             '[[channel.modes]]\nweight = 1.0\nshift = -3.0\n')


def write(tmp_path, text, name="c.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def parse_csv(text):
    meta, summary, body = {}, {}, []
    for line in text.splitlines():
        if line.startswith("# summary "):
            k, v = line[len("# summary "):].split("=", 1)
            summary[k] = v
        elif line.startswith("# "):
            k, v = line[2:].split("=", 1)
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.DictReader(io.StringIO("\n".join(body)))), summary


def test_config_parsing():
    cfg = parse_config(ROTATE)
    assert (cfg.code.n_blocks, cfg.code.block_len) == (4, 5)
    assert cfg.max_delay == 40.0
    assert cfg.channel().name.startswith("rotate")
    with pytest.raises(ConfigError):
        parse_config("[code\n")
    with pytest.raises(ConfigError):
        parse_config("[code]\nN = 3\n")
    with pytest.raises(ConfigError):
        parse_config("[run]\nseeds = [1, 2, 3]\n")


def test_validate_exit_codes(tmp_path, capsys):
    assert cli.main(["validate", write(tmp_path, IDEAL)]) == 0
    assert cli.main(["validate", write(tmp_path, NONCAUSAL, "n.toml")]) == 1
    assert "failed checks: causality" in capsys.readouterr().out
    assert cli.main(["validate", str(tmp_path / "missing.toml")]) == 2
    assert cli.main(["validate", write(tmp_path, "not toml [", "bad.toml")]) == 2


def test_catalogue_channel_failing_validation_exits_1(tmp_path):
    text = IDEAL.replace('name = "ideal"', 'name = "jitter"\nparams = { shifts = [0.0, 0.5] }')
    assert cli.main(["validate", write(tmp_path, text)]) == 1


def test_usage_errors():
    assert cli.main([]) == 2
    assert cli.main(["attack", "x.toml", "--kind", "teleport"]) == 2
    assert cli.main(["--version"]) == 0


def test_run_ideal(tmp_path):
    out = tmp_path / "out" / "ideal.csv"
    assert cli.main(["run", write(tmp_path, IDEAL), "--out", str(out)]) == 0
    meta, rows, summary = parse_csv(out.read_text())
    assert meta["seed"] == "1" and meta["tool"] == f"relbc {__version__}"
    assert len(rows) == 100 and all(r["accepted"] == "1" for r in rows)
    assert list(rows[0]) == ["trial", "committed_bit", "recovered_bit", "accepted",
                             "n_perp", "n_noclick"]
    record = json.loads(out.with_suffix(".json").read_text())
    assert record["seed"] == 1 and record["version"] == __version__
    assert record["results"]["parity_error"]["empirical"] == 0.0
    assert record["config"]["channel"]["name"] == "ideal"


def test_run_noisy_summary_within_three_sigma(tmp_path, capsys):
    assert cli.main(["run", write(tmp_path, ROTATE)]) == 0
    _, rows, summary = parse_csv(capsys.readouterr().out)
    emp = float(summary["empirical_parity_error"])
    ana = float(summary["analytic_parity_error"])
    assert abs(emp - ana) <= 3 * float(summary["parity_error_sigma"])


def test_run_is_byte_identical_and_seed_sensitive(tmp_path):
    cfg = write(tmp_path, ROTATE)
    paths = [tmp_path / f"{n}.csv" for n in "abc"]
    for p, seed in zip(paths, ("5", "5", "6")):
        assert cli.main(["run", cfg, "--trials", "200", "--seed", seed, "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].with_suffix(".json").read_bytes() == paths[1].with_suffix(".json").read_bytes()
    assert paths[0].read_bytes() != paths[2].read_bytes()


def test_output_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path / "env"))
    assert cli.main(["run", write(tmp_path, IDEAL), "--trials", "5", "--out", "r.csv"]) == 0
    assert (tmp_path / "env" / "r.csv").exists()
    assert (tmp_path / "env" / "r.json").exists()


def test_run_rejects_invalid_channel(tmp_path, capsys):
    assert cli.main(["run", write(tmp_path, NONCAUSAL)]) == 1
    assert "causality" in capsys.readouterr().err


def test_attack_delay(tmp_path, capsys):
    text = IDEAL.replace("k = 1", "k = 2")
    assert cli.main(["attack", write(tmp_path, text), "--kind", "delay", "--s", "tau0",
                     "--trials", "3000"]) == 0
    _, rows, summary = parse_csv(capsys.readouterr().out)
    assert float(summary["p_perp"]) == pytest.approx(0.75)
    assert float(summary["analytic"]) == pytest.approx(0.0625)
    rate = sum(r["detected"] == "0" for r in rows) / len(rows)
    assert rate == float(summary["rate"])


def test_attack_early_per_bit_error(tmp_path, capsys):
    cli.main(["attack", write(tmp_path, IDEAL), "--kind", "early", "--trials", "4000"])
    _, rows, summary = parse_csv(capsys.readouterr().out)
    mean = sum(int(r["bit_errors"]) for r in rows) / (2 * len(rows))
    assert abs(mean - 0.25) <= 3 * math.sqrt(0.25 * 0.75 / (2 * len(rows)))
    assert {"committed_bit", "detected", "n_perp", "guessed_parity"} <= set(rows[0])


def test_attack_flip(tmp_path, capsys):
    assert cli.main(["attack", write(tmp_path, IDEAL), "--kind", "flip", "--trials", "50"]) == 0
    _, rows, summary = parse_csv(capsys.readouterr().out)
    assert float(summary["rate"]) == 1.0


def test_parse_shift():
    assert cli.parse_shift("tau0", 20.0) == 20.0
    assert cli.parse_shift("2*tau0", 20.0) == 40.0
    assert cli.parse_shift("0.5tau0", 20.0) == 10.0
    assert cli.parse_shift("12.5", 20.0) == 12.5
    with pytest.raises(ValueError):
        cli.parse_shift("tau1", 20.0)


def test_tables(capsys):
    assert cli.main(["tables", "--family", "eq22"]) == 0
    _, rows, _ = parse_csv(capsys.readouterr().out)
    assert len(rows) == 66
    assert all(r["exact"] == r["brute_force"] == r["trigonometric"] for r in rows)

    cli.main(["tables", "--family", "eq28", "--p", "0,0.1"])
    _, rows, _ = parse_csv(capsys.readouterr().out)
    assert all(float(r["closed"]) == float(r["direct"]) == 0 for r in rows if r["p_block"] == "0.0")

    cli.main(["tables", "--family", "eq25", "--p", "0.25", "--k-max", "2"])
    _, rows, _ = parse_csv(capsys.readouterr().out)
    assert float(rows[1]["exact"]) == pytest.approx(0.4375)

    cli.main(["tables", "--family", "eq34", "--p", "0.5", "--k-min", "10", "--k-max", "10"])
    _, rows, _ = parse_csv(capsys.readouterr().out)
    assert float(rows[0]["cheat"]) == pytest.approx(2 ** -10)


def test_tables_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert cli.main(["tables", "--family", "eq25", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
