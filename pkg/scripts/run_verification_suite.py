#!/usr/bin/env python3
"""Run the full verification battery and collect CSV reports.

Runs every experiment at desk-scale defaults on the unit ball, the unit box,
and the gamma=2 spike domain, writing one CSV per experiment into the output
directory (default ./out).  Exits 2 if any experiment reports a holdout
violation, 0 otherwise.

Usage: python scripts/run_verification_suite.py [--outdir out] [--seed 42]
"""

import argparse
import pathlib
import sys

from obkit.cli import main as run


def invocations(seed: str) -> list[tuple[str, list[str]]]:
    common = ["--seed", seed]
    fast = ["--outer", "2048", "--radial", "64"]
    jobs = [
        ("young_pow15", ["young", "check", "--phi", "pow:1.5", "--alpha", "-1"]),
        ("young_powlog", ["young", "check", "--phi", "powlog:1.3,0.5",
                          "--alpha", "-1"]),
        ("regularity_ball", ["domain", "regularity", "--domain", "ball:0,0,1"]),
        ("regularity_box", ["domain", "regularity", "--domain", "box:0,0,1,1"]),
        ("regularity_cusp", ["domain", "regularity", "--domain", "cusp:2"]),
        ("dyadic_ball", ["domain", "dyadic", "--domain", "ball:0,0,1",
                         "--center", "0,0", "--r", "0.5", "--levels", "3"]),
    ]
    for dom, tag in (("ball:0,0,1", "ball"), ("box:0,0,1,1", "box")):
        jobs += [
            (f"geom_ineq_{tag}", ["verify", "geom-ineq", "--domain", dom,
                                  "--phi", "pow:1.5", "--alpha", "-1",
                                  "--trials", "240", *fast]),
            (f"cutoff_{tag}", ["verify", "cutoff", "--domain", dom,
                               "--phi", "pow:1.5", "--alpha", "-1", *fast]),
            (f"imbedding_{tag}", ["verify", "imbedding", "--domain", dom,
                                  "--phi", "pow:1.5", "--alpha", "-1", *fast]),
            (f"imbedding_inhomog_{tag}", ["verify", "imbedding-inhomog",
                                          "--domain", dom, "--phi", "pow:1.5",
                                          "--alpha", "-1", *fast]),
        ]
    jobs += [
        ("levelset_ball", ["verify", "levelset", "--domain", "ball:0,0,1",
                           "--field", "cutoff:0,0,0.2,0.45",
                           "--phi", "pow:1.5", "--alpha", "-1", *fast]),
        ("imbedding_cusp_tips", ["verify", "imbedding", "--domain", "cusp:2",
                                 "--phi", "pow:1.5", "--alpha", "-1",
                                 "--tip-sweep", *fast]),
        ("critical_box", ["verify", "critical", "--domain", "box:0,0,1,1",
                          "--ball", "0.5,0.5,0.2", "--alpha", "-1", *fast]),
        ("scaling", ["verify", "scaling", "--phi", "pow:1.5", "--alpha", "-1",
                     "--field", "gauss:0,0,0.2", "--r-factors", "1,2",
                     "--outer", "4096", "--radial", "96"]),
        ("rn_balls", ["verify", "rn-balls", "--phi", "pow:1.5", "--alpha", "-1",
                      "--field", "gauss:0,0,0.2", "--radii-list", "2,4,8",
                      "--outer", "4096", "--radial", "96"]),
    ]
    return [(name, args + common) for name, args in jobs]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="out")
    ap.add_argument("--seed", default="42")
    opts = ap.parse_args()
    outdir = pathlib.Path(opts.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name, argv in invocations(opts.seed):
        target = outdir / f"{name}.csv"
        rc = run(argv + ["--out", str(target)])
        status = {0: "ok", 2: "VIOLATIONS"}.get(rc, "ERROR")
        print(f"{name:28s} -> {target}  [{status}]")
        worst = max(worst, rc)
    return worst


if __name__ == "__main__":
    sys.exit(main())
