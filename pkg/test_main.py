"""
End-to-end tests of the dunkl command line through main().
"""

import csv
import io
import json
import math
import os

import pytest
from pydantic import ValidationError

import main as cli
from bessel import bessel_j
from errors import DomainError
from main import REFERENCE_CEILING_FILE, CommandRunner, build_parser, ceiling_key, main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def records(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def test_eval_j1d():
    code, out = run("eval", "j1d", "--alpha", "0.5", "--t", "1")
    assert code == 0
    (record,) = records(out)
    assert record["command"] == "eval j1d"
    assert record["outputs"]["value"] == pytest.approx(0.841471, abs=1e-6)
    assert record["versions"]["artifact"]


def test_eval_j1d_imaginary():
    code, out = run("eval", "j1d", "--alpha", "0.5", "--t", "2", "--imag-y")
    assert code == 0
    assert records(out)[0]["outputs"]["value"] == pytest.approx(math.sinh(2.0) / 2.0, rel=1e-13)


def test_eval_jack():
    code, out = run("eval", "jack", "--alpha", "1", "--lambda", "2", "--x", "1,1")
    assert code == 0
    (record,) = records(out)
    assert record["outputs"]["value"] == pytest.approx(3.0, rel=1e-14)
    assert record["inputs"]["lambda"] == [2]


def test_eval_jack_exact():
    code, out = run("eval", "jack", "--alpha", "2", "--lambda", "2,1", "--x", "1,2,3", "--exact")
    assert code == 0
    outputs = records(out)[0]["outputs"]
    assert outputs["exact"] == "684/5"
    assert outputs["value"] == pytest.approx(684 / 5, rel=1e-13)
    assert {"exponents": [2, 1, 0], "numerator": 12, "denominator": 5} in outputs["expansion"]


def test_eval_jack_from_k2():
    code, out = run("eval", "jack", "--k2", "0.5", "--lambda", "1,1", "--x", "2,3")
    assert code == 0
    assert records(out)[0]["outputs"]["value"] == pytest.approx(4.0 / 3.0 * 6.0, rel=1e-14)


def test_eval_besselB_imaginary_second_argument():
    code, out = run("eval", "besselB", "--k1", "3", "--k2", "0.5", "--x", "1", "--y", "1", "--imag-y")
    assert code == 0
    (record,) = records(out)
    assert record["outputs"]["value"] == pytest.approx(bessel_j(2.5, 1.0), rel=1e-12)
    assert record["outputs"]["converged"]
    assert record["inputs"]["mu"] == 3.5


def test_eval_besselA_k2_zero():
    code, out = run("eval", "besselA", "--k2", "0", "--x", "1,0", "--y", "0,1")
    assert code == 0
    outputs = records(out)[0]["outputs"]
    assert outputs["value"] == pytest.approx((1 + math.e) / 2, rel=1e-15)
    assert outputs["tail_bound"] == 0.0


def test_eval_cone():
    code, out = run("eval", "cone", "--mu", "3.5", "--d", "2", "--x", "0.25")
    assert code == 0
    assert records(out)[0]["outputs"]["value"] == pytest.approx(bessel_j(2.5, 1.0), rel=1e-12)


def test_eval_hc_oracle():
    code, out = run("eval", "hc-oracle", "--x", "1.3", "--y", "0.7")
    assert code == 0
    assert records(out)[0]["outputs"]["value"] == pytest.approx(math.exp(-(1.3 * 0.7) ** 2), rel=1e-15)


def test_exit_codes():
    assert run("eval", "jack", "--alpha", "1", "--lambda", "1,2", "--x", "1,1")[0] == 2
    assert run("eval", "jack", "--alpha", "1", "--lambda", "1,1,1", "--x", "1,1")[0] == 2
    assert run("eval", "jack", "--lambda", "1", "--x", "1,1")[0] == 2
    assert run("eval", "besselA", "--k2", "1", "--x", "1,2", "--y", "1")[0] == 2
    assert run("eval", "hc-oracle", "--x", "1,-1", "--y", "0.5,2")[0] == 1
    assert run("verify", "prop12", "--k2", "0.7", "--mu", "10", "--points", "2")[0] == 2
    assert run("verify", "prop11", "--k2", "1", "--mu", "2", "--points", "2")[0] == 2


def test_usage_errors_exit_through_argparse():
    with pytest.raises(SystemExit) as info:
        main(["eval", "nonsense"], stdout=io.StringIO())
    assert info.value.code == 2


def test_verify_lemma31():
    code, out = run("verify", "lemma31", "--N", "2", "--points", "5", "--max-weight", "4", "--seed", "3")
    assert code == 0
    (report,) = records(out)
    assert report["pass"] is True
    assert report["command"] == "verify lemma31"
    assert [r["m"] for r in report["records"]] == [0, 1, 2, 3, 4]


def test_verify_lemma32():
    code, out = run("verify", "lemma32", "--N", "2", "--k2", "1", "--max-weight", "5", "--k1", "1,4")
    assert code == 0
    report = records(out)[0]
    assert report["inputs"]["k1"] == [1.0, 4.0]
    assert report["pass"] is True


def test_verify_onedim():
    code, out = run("verify", "onedim", "--mu", "16,64", "--points", "40")
    assert code == 0
    report = records(out)[0]
    assert [r["mu"] for r in report["records"]] == [16.0, 64.0]
    assert report["summary"]["max_sup_ratio"] > 0


PROP_ARGS = ("verify", "prop12", "--N", "2", "--k2", "0.5", "--mu", "10,100", "--points", "3", "--seed", "1")


def test_verify_json_round_trips_byte_for_byte():
    code, out = run(*PROP_ARGS)
    assert code == 0
    line = out.rstrip("\n")
    assert "\n" not in line
    assert json.dumps(json.loads(line), separators=(",", ":")) == line
    report = json.loads(line)
    assert report["pass"] is True
    assert len(report["records"]) == 6
    assert report["convergence_order"]["median"] is not None


def test_verify_is_deterministic():
    assert run(*PROP_ARGS) == run(*PROP_ARGS)


def test_verify_csv(tmp_path):
    target = tmp_path / "prop12.csv"
    code, out = run(*PROP_ARGS, "--csv", "--out", str(target))
    assert code == 0
    assert out == ""
    rows = list(csv.reader(io.StringIO(target.read_text())))
    assert rows[0] == ["mu", "x", "y", "error", "denominator", "ratio"]
    assert len(rows) == 7
    assert float(rows[1][0]) == 10.0
    assert len(rows[1][1].split(",")) == 2


def test_mint_and_reuse_ceiling(tmp_path):
    ceilings = tmp_path / "ceilings.json"
    code, out = run(*PROP_ARGS, "--ceiling-file", str(ceilings), "--mint-ceiling")
    assert code == 0
    constant = records(out)[0]["empirical_constant"]
    stored = json.loads(ceilings.read_text())
    key = ceiling_key("prop12", 2, 0.5, 1)
    assert stored[key] == pytest.approx(1.5 * constant)

    code, out = run(*PROP_ARGS, "--ceiling-file", str(ceilings))
    assert code == 0
    assert records(out)[0]["inputs"]["ceiling"] == pytest.approx(1.5 * constant)

    code, _ = run(*PROP_ARGS, "--ceiling", str(constant / 2))
    assert code == 1


def test_conjecture_reports_but_never_fails():
    code, out = run("verify", "conjecture", "--N", "2", "--k2", "0.7", "--mu", "10,100",
                    "--points", "2", "--ceiling", "0")
    assert code == 0
    report = records(out)[0]
    assert report["informational"] is True
    assert report["pass"] is True


def test_validation_errors_surface_as_domain_errors():
    args = build_parser().parse_args(["verify", "prop11", "--k2", "1", "--mu", "100,10", "--points", "2"])
    with pytest.raises(DomainError) as info:
        CommandRunner(args, io.StringIO()).run()
    assert isinstance(info.value.__cause__, ValidationError)

    args = build_parser().parse_args(["eval", "j1d", "--alpha", "0.5", "--t", "1", "--max-weight", "0"])
    with pytest.raises(DomainError):
        CommandRunner(args, io.StringIO())
    assert run("eval", "j1d", "--alpha", "0.5", "--t", "1", "--max-weight", "0")[0] == 2


def test_default_ceiling_file_is_the_repository_map():
    args = build_parser().parse_args(["verify", "prop12"])
    assert args.ceiling_file == REFERENCE_CEILING_FILE
    assert os.path.basename(REFERENCE_CEILING_FILE) == "ceilings.json"
    assert os.path.dirname(REFERENCE_CEILING_FILE) == os.path.dirname(os.path.abspath(cli.__file__))


REFERENCE_ARGS = ("verify", "prop12", "--k2", "0.5")


def test_first_reference_run_mints_and_later_runs_check(tmp_path):
    ceilings = tmp_path / "ceilings.json"
    key = ceiling_key("prop12", 2, 0.5, 0)

    code, out = run(*REFERENCE_ARGS, "--ceiling-file", str(ceilings))
    assert code == 0
    first = records(out)[0]
    assert first["inputs"]["ceiling"] is None
    assert len(first["records"]) == 4 * 25
    stored = json.loads(ceilings.read_text())
    assert stored == pytest.approx({key: 1.5 * first["empirical_constant"]})

    code, out = run(*REFERENCE_ARGS, "--ceiling-file", str(ceilings))
    assert code == 0
    second = records(out)[0]
    assert second["inputs"]["ceiling"] == stored[key]
    assert second["empirical_constant"] == first["empirical_constant"]
    assert json.loads(ceilings.read_text()) == stored

    ceilings.write_text(json.dumps({key: first["empirical_constant"] / 2}))
    code, out = run(*REFERENCE_ARGS, "--ceiling-file", str(ceilings))
    assert code == 1
    assert records(out)[0]["failures"][-1]["reason"] == "empirical constant above ceiling"


def test_non_reference_runs_ignore_the_repository_map(tmp_path, monkeypatch):
    reference = tmp_path / "ceilings.json"
    key = ceiling_key("prop12", 2, 0.5, 1)
    reference.write_text(json.dumps({key: 1e-30}))
    monkeypatch.setattr(cli, "REFERENCE_CEILING_FILE", str(reference))

    code, out = run(*PROP_ARGS)
    assert code == 0
    assert records(out)[0]["inputs"]["ceiling"] is None
    assert json.loads(reference.read_text()) == {key: 1e-30}


def _stored_reference_keys(subject):
    if not os.path.exists(REFERENCE_CEILING_FILE):
        return []
    with open(REFERENCE_CEILING_FILE) as f:
        keys = sorted(json.load(f))
    return [k for k in keys if k.startswith(subject + ":")]


@pytest.mark.slow
@pytest.mark.parametrize("key", _stored_reference_keys("prop12"))
def test_stored_prop12_reference_ceilings_hold(key):
    fields = dict(part.split("=") for part in key.split(":")[1:])
    code, out = run("verify", "prop12", "--N", fields["N"], "--k2", fields["k2"], "--seed", fields["seed"])
    report = records(out)[0]
    assert report["inputs"]["ceiling"] is not None
    assert code == 0
    assert report["pass"] is True
