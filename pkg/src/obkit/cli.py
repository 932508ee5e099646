"""Command-line front end.

Subcommands mirror the library: `young check`, `domain regularity|dyadic`,
`norm besov|gagliardo|orlicz|lebesgue`, and the eight `verify` experiments.
Output is CSV/TSV (header always, 9 significant digits, a trailing
`# summary:` line) written to --out or stdout; the human-readable summary
goes to stderr so captured output stays byte-reproducible under a fixed
seed.

Exit codes: 0 = ran (including negative findings such as a non-admissible
gauge), 2 = experiment ran and the holdout saw violations, 1 = usage or
spec-string error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from typing import Sequence

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from . import geometry, verify, young
from .quadrature import QuadratureSpec
from .geometry import (
    domain_spec,
    dyadic_radii,
    measure_ball_intersection,
    parse_domain,
    regularity_constant,
)
from .norms import (
    besov_seminorm,
    field_spec,
    gagliardo_seminorm,
    lebesgue_norm,
    orlicz_norm,
    parse_field,
)
from .young import admissible, parse_young, young_spec

__all__ = ["main"]

_DEFAULTS = {
    "seed": 42,
    "n": 2,
    "outer": 2048,
    "radial": 64,
    "tmin_frac": 2.0 ** -14,
    "tmax_frac": 1.0,
    "trials": 240,
    "format": "csv",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 on usage errors, not argparse's 2
        raise _UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _write_rows(rows: list[dict], target, fmt: str, summary: dict) -> None:
    delim = "\t" if fmt == "tsv" else ","
    columns: list[str] = []
    for r in rows:
        for k in r:
            if k not in columns:
                columns.append(k)
    writer = csv.writer(target, delimiter=delim, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c, "")) for c in columns])
    target.write("# summary: " + " ".join(f"{k}={_fmt(v)}" for k, v in summary.items())
                 + "\n")


def _emit(rows, summary, args) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            _write_rows(rows, fh, args.format, summary)
    else:
        _write_rows(rows, sys.stdout, args.format, summary)
    print("summary: " + " ".join(f"{k}={_fmt(v)}" for k, v in summary.items()),
          file=sys.stderr)


def _build_parser() -> _Parser:
    p = _Parser(prog="obkit", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="group", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--outer", type=int, default=None)
        sp.add_argument("--radial", type=int, default=None)
        sp.add_argument("--tmin-frac", dest="tmin_frac", type=float, default=None)
        sp.add_argument("--tmax-frac", dest="tmax_frac", type=float, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", choices=["csv", "tsv"], default=None)
        sp.add_argument("--config", type=str, default=None)

    g_young = sub.add_parser("young", help="Young-function checks")
    sub_young = g_young.add_subparsers(dest="cmd", required=True)
    sp = sub_young.add_parser("check", help="admissibility integrals")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    common(sp)

    g_dom = sub.add_parser("domain", help="domain geometry")
    sub_dom = g_dom.add_subparsers(dest="cmd", required=True)
    sp = sub_dom.add_parser("regularity", help="sampled measure-density constant")
    sp.add_argument("--domain", required=True)
    sp.add_argument("--centers", type=int, default=48)
    sp.add_argument("--radii", type=int, default=24)
    sp.add_argument("--rmin-frac", dest="rmin_frac", type=float, default=1.0 / 512)
    common(sp)
    sp = sub_dom.add_parser("dyadic", help="measure-halving radii")
    sp.add_argument("--domain", required=True)
    sp.add_argument("--center", required=True, help="cx,cy")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--levels", type=int, default=3)
    common(sp)

    g_norm = sub.add_parser("norm", help="norms and seminorms")
    sub_norm = g_norm.add_subparsers(dest="cmd", required=True)
    for name in ("besov", "gagliardo", "orlicz", "lebesgue"):
        sp = sub_norm.add_parser(name)
        sp.add_argument("--domain", required=True)
        sp.add_argument("--field", required=True)
        if name == "besov":
            sp.add_argument("--phi", required=True)
            sp.add_argument("--alpha", type=float, required=True)
        elif name == "gagliardo":
            sp.add_argument("--s", type=float, required=True)
            sp.add_argument("--p", type=float, required=True)
        elif name == "orlicz":
            sp.add_argument("--phi", required=True)
        else:
            sp.add_argument("--q", type=float, required=True)
        common(sp)

    g_ver = sub.add_parser("verify", help="inequality experiments")
    sub_ver = g_ver.add_subparsers(dest="cmd", required=True)
    for name in ("geom-ineq", "cutoff", "levelset", "imbedding",
                 "imbedding-inhomog", "critical", "scaling", "rn-balls"):
        sp = sub_ver.add_parser(name)
        if name not in ("scaling", "rn-balls"):
            sp.add_argument("--domain", required=True)
        sp.add_argument("--phi", default=None)
        sp.add_argument("--alpha", type=float, required=True)
        if name == "levelset":
            sp.add_argument("--field", required=True)
        if name in ("imbedding", "imbedding-inhomog"):
            sp.add_argument("--field", action="append", default=None,
                            help="repeatable; overrides the default family")
            sp.add_argument("--enriched", action="store_true")
            sp.add_argument("--tip-sweep", dest="tip_sweep", action="store_true",
                            help="tip-concentrated cut-offs on a cusp domain")
        if name == "critical":
            sp.add_argument("--ball", required=True, help="cx,cy,R")
        if name == "scaling":
            sp.add_argument("--field", required=True)
            sp.add_argument("--r-factors", dest="r_factors", default="1,2")
            sp.add_argument("--ball-radius", dest="ball_radius", type=float,
                            default=16.0)
        if name == "rn-balls":
            sp.add_argument("--field", required=True)
            sp.add_argument("--radii-list", dest="radii_list", default="2,4,8")
        common(sp)
    return p


def _load_config(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _resolve(args: argparse.Namespace) -> None:
    """Fill None-valued common options from the config file, then hard defaults."""
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    for key, hard in _DEFAULTS.items():
        if getattr(args, key, None) is None:
            val = cfg.get(key, hard)
            setattr(args, key, type(hard)(val))


def _spec_of(args: argparse.Namespace, diam: float | None = None) -> QuadratureSpec:
    t_min = t_max = None
    if diam is not None:
        t_min = args.tmin_frac * diam
        t_max = args.tmax_frac * diam
    return QuadratureSpec(seed=args.seed, n_outer=args.outer, n_radial=args.radial,
                          t_min=t_min, t_max=t_max)


def _parse_pair(text: str) -> tuple[float, float]:
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 2:
        raise ValueError(f"expected cx,cy in {text!r}")
    return vals[0], vals[1]


def _report_out(report, args) -> int:
    summary = {"experiment": report.experiment, "trials": report.trials,
               "violations": report.violations,
               "min_ratio": report.min_ratio, "max_ratio": report.max_ratio}
    for k, v in report.fitted_constants.items():
        summary[k] = v
    if report.slope is not None:
        summary["slope"] = report.slope
    _emit(report.rows, summary, args)
    if args.out and report.slope_data:
        with open(args.out + ".slope.tsv", "w") as fh:
            for x, y in report.slope_data:
                fh.write(f"{x:.9g}\t{y:.9g}\n")
    for note in report.notes:
        print("note: " + note, file=sys.stderr)
    return 0 if report.violations == 0 else 2


def _run_young(args) -> int:
    f = parse_young(args.phi)
    res = admissible(f, args.alpha, args.n)
    rows = [{
        "phi": young_spec(f), "alpha": args.alpha, "n": args.n,
        "lambda_under": res.lambda_under, "lambda_over": res.lambda_over,
        "admissible": res.admissible,
        "witness_x_under": res.sup_witness_x[0],
        "witness_x_over": res.sup_witness_x[1],
        "boundary_under": res.boundary_attained[0],
        "boundary_over": res.boundary_attained[1],
    }]
    _emit(rows, {"admissible": res.admissible}, args)
    return 0


def _run_domain(args) -> int:
    dom = parse_domain(args.domain)
    spec = _spec_of(args, dom.diam)
    if args.cmd == "regularity":
        theta, (wx, wr) = regularity_constant(
            dom, args.centers, args.radii, spec,
            r_min=args.rmin_frac * dom.diam,
        )
        rows = [{"domain": domain_spec(dom), "theta_hat": theta,
                 "witness_x0": float(wx[0]), "witness_x1": float(wx[1]),
                 "witness_r": wr, "centers": args.centers, "radii": args.radii,
                 "seed": args.seed}]
        _emit(rows, {"theta_hat": theta}, args)
        return 0
    center = _parse_pair(args.center)
    bs = dyadic_radii(dom, center, args.r, args.levels, spec)
    rows = []
    prev_measure = None
    for j, b in enumerate(bs):
        est = measure_ball_intersection(dom, center, b * args.r, spec)
        row = {"j": j, "b_j": b, "measure": est.value}
        if prev_measure is not None:
            row["halving_ratio"] = est.value / prev_measure
        prev_measure = est.value
        rows.append(row)
    _emit(rows, {"levels": args.levels, "r": args.r}, args)
    return 0


def _run_norm(args) -> int:
    dom = parse_domain(args.domain)
    u = parse_field(args.field)
    spec = _spec_of(args, dom.diam)
    if args.cmd == "besov":
        f = parse_young(args.phi)
        value = besov_seminorm(u, dom, f, args.alpha, spec)
        extra = {"phi": young_spec(f), "alpha": args.alpha}
    elif args.cmd == "gagliardo":
        value = gagliardo_seminorm(u, dom, args.s, args.p, spec)
        extra = {"s": args.s, "p": args.p}
    elif args.cmd == "orlicz":
        f = parse_young(args.phi)
        value = orlicz_norm(u, dom, f, spec)
        extra = {"phi": young_spec(f)}
    else:
        value = lebesgue_norm(u, dom, args.q, spec)
        extra = {"q": args.q}
    rows = [{"norm": args.cmd, "domain": domain_spec(dom),
             "field": field_spec(u), **extra, "value": value,
             "seed": args.seed}]
    _emit(rows, {"value": value}, args)
    return 0


def _run_verify(args) -> int:
    phi = parse_young(args.phi) if args.phi else young.power(1.5)
    if args.cmd == "scaling":
        u = parse_field(args.field)
        factors = [float(v) for v in args.r_factors.split(",")]
        spec = _spec_of(args, 2.0 * args.ball_radius)
        rep = verify.check_scaling_homogeneity(phi, args.alpha, u, factors, spec,
                                               ball_radius=args.ball_radius)
        return _report_out(rep, args)
    if args.cmd == "rn-balls":
        u = parse_field(args.field)
        radii = [float(v) for v in args.radii_list.split(",")]
        spec = _spec_of(args, 2.0 * max(radii))
        rep = verify.rn_imbedding_via_growing_balls(phi, args.alpha, u, radii, spec)
        return _report_out(rep, args)

    dom = parse_domain(args.domain)
    spec = _spec_of(args, dom.diam)
    if args.cmd == "geom-ineq":
        rep = verify.check_geometric_inequality(dom, phi, args.alpha, args.trials,
                                                spec)
    elif args.cmd == "cutoff":
        rep = verify.check_cutoff_bound(dom, phi, args.alpha, spec)
    elif args.cmd == "levelset":
        rep = verify.check_levelset_chain(parse_field(args.field), dom, phi,
                                          args.alpha, spec)
    elif args.cmd in ("imbedding", "imbedding-inhomog"):
        scales = None
        if args.tip_sweep:
            eps_list = [2.0 ** -k for k in range(3, 8)]
            family, scales = verify.tip_cutoff_family(dom, eps_list)
        elif args.field:
            family = [parse_field(s) for s in args.field]
        elif args.enriched:
            family = verify.enriched_field_family(dom)
        else:
            family = verify.default_field_family(dom)
        fn = (verify.imbedding_ratio if args.cmd == "imbedding"
              else verify.imbedding_ratio_inhomog)
        rep = fn(dom, phi, args.alpha, family, spec, scales=scales)
    else:  # critical
        cx, cy, r = (float(v) for v in args.ball.split(","))
        fam = verify.default_field_family(dom)
        rep = verify.check_critical_case(dom, geometry.ball((cx, cy), r),
                                         args.alpha, fam, spec)
    return _report_out(rep, args)


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _resolve(args)
        if args.group == "young":
            return _run_young(args)
        if args.group == "domain":
            return _run_domain(args)
        if args.group == "norm":
            return _run_norm(args)
        return _run_verify(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
