"""Command-line front end: dispatch, exit codes, CSV output, reproducibility."""

import csv
import io
import math

import pytest

from obkit.cli import main

FAST = ["--outer", "512", "--radial", "32"]


def run(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def parse_csv(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


# --- young ----------------------------------------------------------------

def test_young_check_closed_forms(capsys):
    rc, out, _ = run(["young", "check", "--phi", "pow:1.5", "--alpha", "-1",
                      "--n", "2"], capsys)
    assert rc == 0
    row = parse_csv(out)[0]
    assert float(row["lambda_under"]) == pytest.approx(1.0, rel=0.02)
    assert float(row["lambda_over"]) == pytest.approx(2.0, rel=0.02)
    assert row["admissible"] == "1"


def test_young_check_non_admissible_is_a_finding(capsys):
    rc, out, _ = run(["young", "check", "--phi", "pow:2", "--alpha", "-1"],
                     capsys)
    assert rc == 0  # a finding, not an error
    row = parse_csv(out)[0]
    assert row["admissible"] == "0"
    assert row["lambda_over"] == "inf"


def test_malformed_phi_exits_1_and_names_token(capsys):
    rc, _, err = run(["young", "check", "--phi", "pow:abc", "--alpha", "-1"],
                     capsys)
    assert rc == 1
    assert "pow:abc" in err


def test_missing_required_flag_exits_1(capsys):
    rc, _, err = run(["young", "check", "--alpha", "-1"], capsys)
    assert rc == 1


def test_unknown_domain_kind_exits_1(capsys):
    rc, _, err = run(["norm", "lebesgue", "--domain", "disk:0,0,1",
                      "--field", "const:1", "--q", "2"], capsys)
    assert rc == 1
    assert "disk" in err


# --- norms ------------------------------------------------------------------

def test_norm_besov_constant_field(capsys):
    rc, out, _ = run(["norm", "besov", "--domain", "ball:0,0,1",
                      "--field", "const:3", "--phi", "pow:1.5",
                      "--alpha", "-1", *FAST], capsys)
    assert rc == 0
    assert float(parse_csv(out)[0]["value"]) == 0.0


def test_norm_lebesgue_coordinate(capsys):
    rc, out, _ = run(["norm", "lebesgue", "--domain", "box:0,0,1,1",
                      "--field", "coord:0", "--q", "2", *FAST], capsys)
    assert rc == 0
    assert float(parse_csv(out)[0]["value"]) == pytest.approx(
        1 / math.sqrt(3), rel=0.02)


def test_norm_orlicz_constant(capsys):
    rc, out, _ = run(["norm", "orlicz", "--domain", "ball:0,0,1",
                      "--field", "const:1", "--phi", "pow:2", *FAST], capsys)
    assert float(parse_csv(out)[0]["value"]) == pytest.approx(
        math.sqrt(math.pi), rel=0.02)


def test_norm_gagliardo(capsys):
    rc, out, _ = run(["norm", "gagliardo", "--domain", "box:0,0,1,1",
                      "--field", "coord:0", "--s", "0.3333333333",
                      "--p", "1.5", "--outer", "2048", "--radial", "64"],
                     capsys)
    assert rc == 0
    assert float(parse_csv(out)[0]["value"]) == pytest.approx(1.398, rel=0.06)


# --- domain -------------------------------------------------------------------

def test_domain_regularity(capsys):
    rc, out, _ = run(["domain", "regularity", "--domain", "ball:0,0,1",
                      "--centers", "24", "--radii", "16", *FAST], capsys)
    assert rc == 0
    assert float(parse_csv(out)[0]["theta_hat"]) == pytest.approx(
        math.pi / 16, rel=0.15)


def test_domain_dyadic(capsys):
    rc, out, _ = run(["domain", "dyadic", "--domain", "ball:0,0,1",
                      "--center", "0,0", "--r", "0.5", "--levels", "2",
                      "--outer", "1024", "--radial", "64"], capsys)
    assert rc == 0
    rows = parse_csv(out)
    assert float(rows[1]["b_j"]) == pytest.approx(2 ** -0.5, rel=0.02)
    assert float(rows[1]["halving_ratio"]) == pytest.approx(0.5, abs=0.02)


# --- verify -------------------------------------------------------------------

def test_verify_levelset_passes(capsys):
    rc, out, _ = run(["verify", "levelset", "--domain", "ball:0,0,1",
                      "--field", "cutoff:0,0,0.2,0.45", "--phi", "pow:1.5",
                      "--alpha", "-1", *FAST], capsys)
    assert rc == 0


def test_verify_scaling_passes(capsys):
    rc, out, err = run(["verify", "scaling", "--phi", "pow:1.5", "--alpha", "-1",
                        "--field", "gauss:0,0,0.2", "--r-factors", "1,2",
                        "--outer", "4096", "--radial", "96"], capsys)
    assert rc == 0
    assert "violations=0" in err


def test_verify_imbedding_tip_sweep_reports_slope(capsys):
    rc, out, err = run(["verify", "imbedding", "--domain", "cusp:2",
                        "--phi", "pow:1.5", "--alpha", "-1", "--tip-sweep",
                        "--outer", "2048", "--radial", "64"], capsys)
    assert rc == 0
    assert "slope=" in err


def test_verify_critical(capsys):
    rc, _, err = run(["verify", "critical", "--domain", "box:0,0,1,1",
                      "--ball", "0.5,0.5,0.2", "--alpha", "-1", *FAST], capsys)
    assert rc == 0


def test_verify_geom_ineq_small(capsys):
    rc, _, err = run(["verify", "geom-ineq", "--domain", "ball:0,0,1",
                      "--phi", "pow:1.5", "--alpha", "-1", "--trials", "24",
                      *FAST], capsys)
    assert rc == 0
    assert "violations=0" in err


# --- output plumbing --------------------------------------------------------------

def test_csv_header_always_present(capsys):
    _, out, _ = run(["young", "check", "--phi", "pow:1.5", "--alpha", "-1"],
                    capsys)
    header = out.splitlines()[0]
    assert header.startswith("phi,")


def test_tsv_format(capsys):
    _, out, _ = run(["young", "check", "--phi", "pow:1.5", "--alpha", "-1",
                     "--format", "tsv"], capsys)
    assert "\t" in out.splitlines()[0]


def test_summary_line_present(capsys):
    _, out, _ = run(["young", "check", "--phi", "pow:1.5", "--alpha", "-1"],
                    capsys)
    assert out.splitlines()[-1].startswith("# summary:")


def test_byte_identical_reruns(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["verify", "levelset", "--domain", "ball:0,0,1",
            "--field", "cutoff:0,0,0.2,0.45", "--phi", "pow:1.5",
            "--alpha", "-1", "--seed", "7", *FAST]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out2.read_bytes()


def test_printed_specs_reparse(capsys):
    from obkit.geometry import parse_domain
    from obkit.norms import parse_field
    _, out, _ = run(["norm", "lebesgue", "--domain", "ball:0,0,1",
                     "--field", "sum:const:1.0+coord:0", "--q", "2", *FAST],
                    capsys)
    row = parse_csv(out)[0]
    assert parse_domain(row["domain"]) == parse_domain("ball:0,0,1")
    assert parse_field(row["field"]) == parse_field("sum:const:1.0+coord:0")


def test_tip_sweep_writes_slope_file(tmp_path, capsys):
    out = tmp_path / "cusp.csv"
    rc, _, _ = run(["verify", "imbedding", "--domain", "cusp:2",
                    "--phi", "pow:1.5", "--alpha", "-1", "--tip-sweep",
                    "--outer", "1024", "--radial", "48",
                    "--out", str(out)], capsys)
    assert rc == 0
    slope_file = tmp_path / "cusp.csv.slope.tsv"
    assert slope_file.exists()
    lines = slope_file.read_text().splitlines()
    assert len(lines) == 5 and all("\t" in ln for ln in lines)


def test_config_file_provides_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 9\nouter = 256\nradial = 16\n')
    rc, out, _ = run(["norm", "lebesgue", "--domain", "box:0,0,1,1",
                      "--field", "coord:0", "--q", "2",
                      "--config", str(cfg)], capsys)
    assert rc == 0
    assert parse_csv(out)[0]["seed"] == "9"


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text('seed = 9\n')
    rc, out, _ = run(["norm", "lebesgue", "--domain", "box:0,0,1,1",
                      "--field", "coord:0", "--q", "2",
                      "--config", str(cfg), "--seed", "5", *FAST], capsys)
    assert parse_csv(out)[0]["seed"] == "5"


def test_missing_config_exits_1(capsys):
    rc, _, err = run(["norm", "lebesgue", "--domain", "box:0,0,1,1",
                      "--field", "coord:0", "--q", "2",
                      "--config", "/nonexistent.toml"], capsys)
    assert rc == 1


def test_holdout_violations_exit_2(monkeypatch, capsys):
    import obkit.cli as cli
    from obkit.verify import VerificationReport

    def fake(*a, **k):
        return VerificationReport(
            experiment="cutoff", params={}, fitted_constants={"C": 1.0},
            trials=1, violations=1, witnesses=[{"trial": 0}],
            min_ratio=2.0, max_ratio=2.0, runtime_s=0.0,
            rows=[{"trial": 0, "ratio": 2.0}])

    monkeypatch.setattr(cli.verify, "check_cutoff_bound", fake)
    rc, _, err = run(["verify", "cutoff", "--domain", "ball:0,0,1",
                      "--phi", "pow:1.5", "--alpha", "-1"], capsys)
    assert rc == 2
    assert "violations=1" in err
