"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside pytest's own verdicts.  All tolerances are pinned here; the
suite is deterministic (fixed seeds throughout).
"""

import math
import warnings

import numpy as np
import pytest

from obkit.cli import main as cli_main
from obkit.geometry import (
    ball,
    box,
    cusp,
    dyadic_radii,
    local_density,
    regularity_constant,
)
from obkit.norms import (
    besov_modular,
    besov_seminorm,
    constant,
    coordinate,
    cutoff,
    gagliardo_seminorm,
    gaussian,
    offset,
    scale_field,
)
from obkit.quadrature import QuadratureSpec
from obkit.verify import (
    check_critical_case,
    check_cutoff_bound,
    check_geometric_inequality,
    check_levelset_chain,
    check_scaling_homogeneity,
    cutoff_shrink_slope,
    default_field_family,
    enriched_field_family,
    geometric_inequality_lhs,
    imbedding_ratio,
    rn_imbedding_via_growing_balls,
    tip_cutoff_family,
)
from obkit.young import (
    admissible,
    convex_combine,
    growth_bound_violations,
    lambda_over,
    lambda_under,
    power,
    powerlog,
)

ALPHA = -1.0
N = 2


def _ok(num: int, msg: str) -> None:
    print(f"criterion {num:02d} PASS: {msg}")


def test_criterion_01_admissibility_closed_forms():
    """Scale integrals of t^p at alpha=-1, n=2 match 1/(2p-2) and 1/(2-p)."""
    lu15 = lambda_under(power(1.5), ALPHA, N)
    lu20 = lambda_under(power(2.0), ALPHA, N)
    lo15 = lambda_over(power(1.5), ALPHA, N)
    assert lu15 == pytest.approx(1.0, rel=0.02)
    assert lu20 == pytest.approx(0.5, rel=0.02)
    assert lo15 == pytest.approx(2.0, rel=0.02)
    assert lambda_over(power(2.0), ALPHA, N) == math.inf
    assert lambda_under(power(1.0), ALPHA, N) == math.inf
    _ok(1, f"closed forms {lu15:.4f}/{lu20:.4f}/{lo15:.4f}; divergences flagged")


def test_criterion_02_admissibility_window():
    probes = {0.9: False, 1.0: False, 1.1: True, 1.5: True, 1.9: True,
              2.0: False, 2.5: False}
    for p, expected in probes.items():
        res = admissible(power(p), ALPHA, N)
        assert res.admissible is expected, f"p={p}"
    _ok(2, "t^p admissible iff 1 < p < 2 at 7 probes")


def test_criterion_03_growth_bounds():
    gauges = [power(1.5), powerlog(1.3, 0.5),
              convex_combine([(0.5, power(1.4)), (0.5, power(1.8))])]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for i, f in enumerate(gauges):
            count, wit = growth_bound_violations(f, ALPHA, N, 10000, seed=100 + i)
            assert count == 0, wit
    _ok(3, "shrink/stretch growth envelopes: 0 violations at 10^4 pairs x 3 gauges")


def test_criterion_04_besov_gagliardo_identity():
    """phi = t^1.5 with s = alpha + n/p = 1/3 reproduces the Gagliardo seminorm."""
    f = power(1.5)
    fields = [gaussian((0.5, 0.5), 0.2), coordinate(0),
              cutoff((0.5, 0.5), 0.2, 0.45)]
    worst = 0.0
    for dom in (ball((0.5, 0.5), 0.7), box((0.0, 0.0), (1.0, 1.0))):
        for u in fields:
            sem = besov_seminorm(u, dom, f, ALPHA,
                                 QuadratureSpec(seed=42, n_outer=4096, n_radial=96))
            gag = gagliardo_seminorm(u, dom, 1.0 / 3.0, 1.5,
                                     QuadratureSpec(seed=91, n_outer=4096, n_radial=96))
            rel = abs(sem - gag) / gag
            worst = max(worst, rel)
            assert rel <= 0.05
    _ok(4, f"Besov = Gagliardo on 3 fields x 2 domains, worst rel dev {worst:.3f}")


def test_criterion_05_luxemburg_properties():
    dom = box((0.0, 0.0), (1.0, 1.0))
    f = power(1.5)
    spec = QuadratureSpec(seed=42)
    rel_tol = 1e-4
    u = gaussian((0.5, 0.5), 0.2)
    base = besov_seminorm(u, dom, f, ALPHA, spec, rel_tol=rel_tol)
    doubled = besov_seminorm(scale_field(2.0, u), dom, f, ALPHA, spec,
                             rel_tol=rel_tol)
    assert abs(doubled - 2.0 * base) <= 2.0 * rel_tol * 2.0 * base
    assert besov_seminorm(constant(7.0), dom, f, ALPHA, spec) == 0.0
    lams = np.geomspace(0.05, 20.0, 10)
    vals = [besov_modular(coordinate(0), dom, f, ALPHA, lam, spec)
            for lam in lams]
    assert all(a >= b for a, b in zip(vals, vals[1:]))  # exact on frozen samples
    _ok(5, "homogeneity within 2 rel_tol; constants -> 0; modular monotone")


def test_criterion_06_scaling_homogeneity():
    spec = QuadratureSpec(seed=17, n_outer=4096, n_radial=96)
    rep = check_scaling_homogeneity(power(1.5), ALPHA, gaussian((0, 0), 0.2),
                                    [2.0], spec)
    assert rep.passed
    ratio = rep.rows[0]["ratio"]
    assert ratio == pytest.approx(2.0, rel=0.05)
    _ok(6, f"dilation r=2: seminorm ratio {ratio:.3f} = 2^|alpha| within 5%")


def test_criterion_07_geometry_oracles():
    spec = QuadratureSpec(seed=42)
    th_ball, _ = regularity_constant(ball((0, 0), 1.0), 48, 24, spec,
                                     n_points_per_pair=32768)
    assert th_ball == pytest.approx(math.pi / 16, rel=0.10)
    th_box, _ = regularity_constant(box((0, 0), (1, 1)), 48, 24, spec,
                                    n_points_per_pair=32768)
    assert th_box == pytest.approx(1.0 / 8.0, rel=0.15)
    spike = cusp(2.0)
    eps_list = [2.0 ** -k for k in range(4, 10)]
    dens = [local_density(spike, (e, 0.0), e, QuadratureSpec(seed=11 + k),
                          n_points=400000)
            for k, e in enumerate(eps_list)]
    slope = float(np.polyfit(np.log(eps_list), np.log(dens), 1)[0])
    assert slope == pytest.approx(1.0, abs=0.15)
    bs = dyadic_radii(ball((0, 0), 1.0), (0, 0), 0.5, 3, spec)
    for j, b in enumerate(bs):
        assert b == pytest.approx(2.0 ** (-j / 2.0), rel=0.01)
    _ok(7, f"theta(ball)={th_ball:.4f}, theta(box)={th_box:.4f}, "
           f"tip slope={slope:.3f}, dyadic radii within 1%")


def test_criterion_08_geometric_inequality():
    f = power(1.5)
    dom = ball((0.0, 0.0), 1.0)
    spec = QuadratureSpec(seed=3)
    for k in range(2, 7):
        rho = 2.0 ** -k
        lhs = geometric_inequality_lhs(dom, (0.0, 0.0), f, ALPHA, 1.0,
                                       (0.0, 0.0), rho, spec, n_samples=131072)
        assert lhs == pytest.approx(4 * math.pi * (rho ** -0.5 - 1), rel=0.05)
    run_spec = QuadratureSpec(seed=7, n_outer=1024, n_radial=48)
    for dom in (ball((0, 0), 1.0), box((0, 0), (1, 1))):
        rep = check_geometric_inequality(dom, f, ALPHA, 220, run_spec,
                                         lhs_samples=16384)
        assert rep.trials >= 200
        assert rep.passed
    _ok(8, "radial anchor within 5% over 5 dyadic rho; 0 holdout violations "
           "on ball and box at 220 trials")


def test_criterion_09_cutoff_bound():
    f = power(1.5)
    dom = ball((0.0, 0.0), 1.0)
    rep = check_cutoff_bound(dom, f, ALPHA, QuadratureSpec(seed=7, n_outer=1024,
                                                           n_radial=48))
    assert rep.trials == 20
    assert rep.passed
    slope_rep = cutoff_shrink_slope(dom, f, ALPHA,
                                    QuadratureSpec(seed=21, n_outer=4096,
                                                   n_radial=96))
    assert slope_rep.passed
    ssem = slope_rep.fitted_constants["slope_seminorm"]
    sbnd = slope_rep.fitted_constants["slope_bound"]
    assert abs(ssem - sbnd) <= 0.2
    _ok(9, f"0 holdout violations over 20-point sweep; slopes {ssem:.3f} vs "
           f"{sbnd:.3f} agree within 0.2")


def test_criterion_10_levelset_chain():
    f = power(1.5)
    dom = ball((0.0, 0.0), 1.0)
    spec = QuadratureSpec(seed=7, n_outer=1024, n_radial=48)
    fields = [
        cutoff((0, 0), 0.2, 0.45, dom),
        cutoff((0.3, 0.1), 0.1, 0.3, dom),
        gaussian((0.0, 0.0), 0.3),
        scale_field(0.5, gaussian((0.2, -0.1), 0.25)),
        offset(coordinate(0), 1.0),
    ]
    for u in fields:
        rep = check_levelset_chain(u, dom, f, ALPHA, spec)
        assert rep.passed
    ind = cutoff((0, 0), 0.3 * (1 - 1e-12), 0.3, dom)
    rep = check_levelset_chain(ind, dom, f, ALPHA, spec)
    assert rep.passed
    s, lq = rep.fitted_constants["S"], rep.fitted_constants["Lq_q"]
    assert s == pytest.approx(lq / 3.0, rel=1e-9)  # S = m/3, Lq_q = m
    assert s <= (4.0 / 3.0) * lq
    _ok(10, "chain sandwich exact on frozen samples for 5 fields + indicator")


def test_criterion_11_imbedding_ratios():
    f = power(1.5)
    spec = QuadratureSpec(seed=7, n_outer=1024, n_radial=48)
    drifts = {}
    for name, dom in (("ball", ball((0, 0), 1.0)), ("box", box((0, 0), (1, 1)))):
        base = imbedding_ratio(dom, f, ALPHA, default_field_family(dom), spec)
        rich = imbedding_ratio(dom, f, ALPHA, enriched_field_family(dom), spec)
        assert base.passed and rich.passed
        m0 = base.fitted_constants["max_ratio"]
        m1 = rich.fitted_constants["max_ratio"]
        assert math.isfinite(m0) and math.isfinite(m1)
        drifts[name] = abs(m1 - m0) / m0
        assert drifts[name] <= 0.20
    spike = cusp(2.0)
    fields, scales = tip_cutoff_family(spike, [2.0 ** -k for k in range(3, 8)])
    rep = imbedding_ratio(spike, f, ALPHA, fields,
                          QuadratureSpec(seed=13, n_outer=2048, n_radial=64),
                          scales=scales)
    assert rep.slope is not None and rep.slope > 0.3
    _ok(11, f"stable max ratios (drift {drifts['ball']:.2%}/{drifts['box']:.2%}); "
            f"cusp blow-up slope {rep.slope:.2f} > 0.3")


def test_criterion_12_critical_explicit_constant():
    dom = box((0.0, 0.0), (1.0, 1.0))
    inner = ball((0.5, 0.5), 0.2)
    spec = QuadratureSpec(seed=7, n_outer=2048, n_radial=64)
    fam = default_field_family(dom) + [constant(2.0)]
    rep = check_critical_case(dom, inner, ALPHA, fam, spec)
    assert rep.passed
    _ok(12, f"explicit-constant bound holds for {rep.trials} fields on the box")


def test_criterion_13_growing_balls():
    spec = QuadratureSpec(seed=17, n_outer=4096, n_radial=96)
    rep = rn_imbedding_via_growing_balls(power(1.5), ALPHA, gaussian((0, 0), 0.2),
                                         [2.0, 4.0, 8.0], spec)
    assert rep.passed
    decays = [r["drift_decay"] for r in rep.rows if "drift_decay" in r]
    for d in decays:
        assert d <= 0.5 * 1.5  # drift at least halves per doubling (slack 1.5)
    spread = rep.fitted_constants["ratio_spread"]
    assert spread < 3.0
    _ok(13, f"drift decays {decays} per doubling; ratio spread {spread:.2f} < 3")


def test_criterion_14_reproducibility(tmp_path):
    args = ["verify", "levelset", "--domain", "ball:0,0,1",
            "--field", "cutoff:0,0,0.2,0.45", "--phi", "pow:1.5",
            "--alpha", "-1", "--seed", "42", "--outer", "1024", "--radial", "32"]
    out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    assert cli_main(args + ["--out", str(out1)]) == 0
    assert cli_main(args + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    args2 = ["young", "check", "--phi", "powlog:1.3,0.5", "--alpha", "-1"]
    out3, out4 = tmp_path / "r3.csv", tmp_path / "r4.csv"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert cli_main(args2 + ["--out", str(out3)]) == 0
        assert cli_main(args2 + ["--out", str(out4)]) == 0
    assert out3.read_bytes() == out4.read_bytes()
    _ok(14, "byte-identical CSV under repeated invocations with equal seed")
