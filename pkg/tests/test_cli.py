import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualism import errors
from dualism.bell import TSIRELSON
from dualism.cli import RunConfig, config_from_args, main, parse_range

ALL_COMMANDS = [
    ["dualize", "--alpha", "0.6", "--beta", "0.8j", "--stats", "fermion"],
    ["chsh", "--state", "bell", "--settings", "optimal"],
    ["sign-report", "--stats", "fermion"],
    ["sample", "--state", "bell", "--shots", "2000", "--seed", "11"],
    ["sweep", "--gammas", "0:1:0.5", "--settings", "optimal"],
]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dualize_fermion(capsys):
    code, out, _ = run_cli(capsys, "dualize", "--alpha", "0.70710678", "--beta", "0.70710678", "--stats", "fermion")
    assert code == 0
    d = json.loads(out)
    assert d["a_form"]["c2"]["re"] == pytest.approx(1 / math.sqrt(2))
    assert d["b_form"]["c2"]["re"] == pytest.approx(-1 / math.sqrt(2))
    assert d["a_form"]["label_variable"] == "A" and d["b_form"]["label_variable"] == "B"


def test_chsh_bell_canonical(capsys):
    code, out, _ = run_cli(capsys, "chsh", "--state", "bell", "--settings", "canonical")
    assert code == 0
    assert json.loads(out)["result"]["S"] == pytest.approx(2.8284271, abs=1e-7)


def test_chsh_explicit_degrees(capsys):
    code, out, _ = run_cli(capsys, "chsh", "--state", "bell", "--settings", "90,0,90,90,90,45,90,-45", "--format", "csv")
    assert code == 0
    assert out.splitlines()[-1].startswith("S,2.82842712474619")


def test_sweep_eleven_rows_monotone(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--gammas", "0:1:0.1", "--settings", "optimal", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gamma,s_spin,s_momentum,settings_mode"
    assert len(lines) == 12
    mom = [float(l.split(",")[2]) for l in lines[1:]]
    assert all(b >= a - 1e-12 for a, b in zip(mom, mom[1:]))
    assert mom[0] == pytest.approx(2, abs=1e-9) and mom[-1] == pytest.approx(TSIRELSON, abs=1e-9)


def test_sweep_from_times(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--times", "0,1", "--tau", "2", "--settings", "canonical")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[1]["gamma"] == pytest.approx(math.exp(-0.5))


def test_sample_json_has_estimate(capsys):
    code, out, _ = run_cli(capsys, "sample", "--state", "bell", "--shots", "100000", "--seed", "3")
    d = json.loads(out)
    est = d["estimate"]
    assert abs(est["S_hat"] - TSIRELSON) < 4 * est["stderr"]
    assert d["routed_state"]["parties"] == ["Diana", "Charlie"]


def test_sample_main_text_routing(capsys):
    code, out, _ = run_cli(capsys, "sample", "--state", "bell", "--shots", "100", "--routing", "main-text")
    assert json.loads(out)["routed_state"]["parties"] == ["Charlie", "Diana"]


def test_sample_csv(capsys):
    code, out, _ = run_cli(capsys, "sample", "--shots", "50", "--seed", "1", "--format", "csv")
    assert out.splitlines()[0] == "settings_pair,outcome,count,shots,seed"


@pytest.mark.parametrize(
    "argv,error",
    [
        (["dualize", "--nip"], errors.SpeciesSuperpositionForbidden),
        (["dualize", "--alpha", "0", "--beta", "0"], errors.ZeroState),
        (["sign-report", "--settings", "0,0,90,90,90,45,90,-45"], errors.SettingsNotInPlane),
        (["chsh", "--shots", "-3"], errors.ConfigError),
        (["bogus"], errors.ConfigError),
        (["chsh", "--settings", "1,2,3"], errors.ConfigError),
        (["sweep", "--gammas", "0:2:0.5"], errors.ConfigError),
        (["sample", "--efficiency", "1.5"], errors.ConfigError),
        (["chsh", "--alpha", "nope"], errors.ConfigError),
    ],
)
def test_errors_map_to_exit_codes(capsys, argv, error):
    code, out, err = run_cli(capsys, *argv)
    assert code == error.exit_code
    assert out == ""
    assert len(err.strip().splitlines()) == 1
    assert json.loads(err)["error"] == error.__name__


def test_nip_product_succeeds(capsys):
    code, out, _ = run_cli(capsys, "dualize", "--nip", "--alpha", "1", "--beta", "0")
    assert code == 0
    assert json.loads(out)["b_form"]["c1"]["re"] == 1


def test_exit_codes_are_distinct():
    codes = [e.exit_code for e in errors.ALL_ERRORS]
    assert len(set(codes)) == len(codes)
    assert 0 not in codes


@pytest.mark.parametrize("argv", ALL_COMMANDS)
@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_determinism_byte_identical(tmp_path, argv, fmt):
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}.{fmt}"
        assert main(argv + ["--format", fmt, "-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]


def test_config_file_and_override(tmp_path, capsys):
    cfg = RunConfig("chsh", statistics="fermion", form="B", settings="canonical")
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    code, out, _ = run_cli(capsys, "chsh", "--config", str(path))
    assert json.loads(out)["result"]["S"] == pytest.approx(-TSIRELSON)
    code, out, _ = run_cli(capsys, "chsh", "--config", str(path), "--stats", "boson")
    assert json.loads(out)["result"]["S"] == pytest.approx(TSIRELSON)


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run_cli(capsys, "chsh", "--config", str(path))
    assert code == errors.ConfigError.exit_code


@given(
    st.sampled_from(["dualize", "chsh", "sign-report", "sample", "sweep"]),
    st.floats(-5, 5), st.floats(-5, 5), st.sampled_from(["boson", "fermion"]),
    st.integers(1, 10**6), st.integers(0, 2**63 - 1),
    st.lists(st.floats(0, 1), min_size=1, max_size=5),
)
def test_config_round_trip(command, are, bim, stats, shots, seed, gammas):
    cfg = RunConfig(command, alpha_re=are, beta_im=bim, statistics=stats, shots=shots, seed=seed, gammas=gammas)
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_parsed_config_round_trips():
    cfg = config_from_args(["sample", "--alpha", "0.3+0.4j", "--seed", "9", "--routing", "main-text"])
    assert cfg.alpha == 0.3 + 0.4j
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_parse_range():
    assert parse_range("0:1:0.1") == [round(0.1 * k, 12) for k in range(11)]
    assert parse_range("0.2,0.7") == [0.2, 0.7]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dualism", "sign-report", "--stats", "fermion", "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    s_a, s_b, sign = proc.stdout.splitlines()[1].split(",")
    assert float(s_b) == pytest.approx(-TSIRELSON) and sign == "-1"
