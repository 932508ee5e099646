"""Experiment drivers for the imbedding and kernel inequalities.

Each driver samples trial configurations, computes both sides of an
inequality, fits the free constants on a training half (the statements only
assert that finite constants exist), validates on the held-out half, and
returns a VerificationReport with per-trial rows, fitted constants, and
worst-case witnesses.  Reports are bit-reproducible under a fixed seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .geometry import Domain, ball, domain_spec, measure_ball_intersection
from .norms import (
    NotInSpaceError,
    ScalarField,
    besov_seminorm,
    coordinate,
    cutoff,
    field_spec,
    field_sum,
    gaussian,
    lebesgue_norm,
    level_sets,
    mean,
    orlicz_norm,
    scale_field,
    dilate,
)
from .quadrature import (
    QuadratureSpec,
    _rng,
    draw_domain_samples,
    radial_singular_integral,
    sample_in_domain,
    unit_ball_volume,
)
from .young import YoungFunction, power, young_spec

__all__ = [
    "VerificationReport",
    "check_geometric_inequality",
    "geometric_inequality_lhs",
    "check_cutoff_bound",
    "cutoff_shrink_slope",
    "check_levelset_chain",
    "imbedding_ratio",
    "imbedding_ratio_inhomog",
    "check_critical_case",
    "check_scaling_homogeneity",
    "rn_imbedding_via_growing_balls",
    "interior_anchor",
    "default_field_family",
    "enriched_field_family",
    "tip_cutoff_family",
    "default_cutoff_sweep",
]

FIT_MARGIN = 0.40  # finite-sample safety factor between train fit and holdout


@dataclass
class VerificationReport:
    """Per-experiment record: parameters, fitted constants, rows, witnesses."""

    experiment: str
    params: dict
    fitted_constants: dict
    trials: int
    violations: int
    witnesses: list
    min_ratio: float
    max_ratio: float
    runtime_s: float
    rows: list
    notes: list = dc_field(default_factory=list)
    slope: float | None = None
    slope_data: list[tuple[float, float]] | None = None  # plot-ready (x, y)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _report(experiment, params, constants, rows, violations, witnesses,
            t0, notes=None, slope=None, slope_data=None) -> VerificationReport:
    ratios = [r["ratio"] for r in rows
              if "ratio" in r and isinstance(r["ratio"], float)
              and math.isfinite(r["ratio"])]
    return VerificationReport(
        experiment=experiment,
        params=params,
        fitted_constants=constants,
        trials=len(rows),
        violations=violations,
        witnesses=witnesses,
        min_ratio=min(ratios) if ratios else math.nan,
        max_ratio=max(ratios) if ratios else math.nan,
        runtime_s=time.perf_counter() - t0,
        rows=rows,
        notes=notes or [],
        slope=slope,
        slope_data=slope_data,
    )


def _q_exponent(alpha: float, n: int) -> float:
    return n / abs(alpha)


def _domain_measure(dom: Domain, spec: QuadratureSpec) -> float:
    if dom.exact_area is not None:
        return dom.exact_area
    return draw_domain_samples(dom, spec, tag=11).measure().value


def _train_holdout(n_rows: int, rng: np.random.Generator) -> np.ndarray:
    """Boolean mask: True = training row; seeded alternating split after shuffle."""
    perm = rng.permutation(n_rows)
    train = np.zeros(n_rows, dtype=bool)
    train[perm[: n_rows // 2]] = True
    return train


# ---------------------------------------------------------------------------
# geometric kernel inequality
# ---------------------------------------------------------------------------

def geometric_inequality_lhs(
    dom: Domain,
    x,
    f: YoungFunction,
    alpha: float,
    t_scale: float,
    center,
    rho: float,
    spec: QuadratureSpec,
    *,
    n_samples: int | None = None,
) -> float:
    """int over Omega minus B(center, rho) of phi(t |x-y|^(-alpha)) |x-y|^(-2n) dy."""
    c = np.asarray(center, dtype=float)

    def in_ball(y: np.ndarray) -> np.ndarray:
        return ((y - c) ** 2).sum(axis=1) <= rho * rho

    est = radial_singular_integral(
        dom, x, lambda s: np.asarray(f(t_scale * s ** (-alpha)), dtype=float),
        spec, exclude=in_ball, n_samples=n_samples,
    )
    return est.value


def check_geometric_inequality(
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    trials: int,
    spec: QuadratureSpec,
    *,
    fit_margin: float = FIT_MARGIN,
    lhs_samples: int = 16384,
) -> VerificationReport:
    """Kernel mass of Omega minus E at x against the fitted lower envelope.

    Trials sample a scale t (log-uniform in [1e-2, 1e2]), a trap set
    E = B(c, rho) cap Omega with rho log-uniform in [diam/128, diam/2], and a
    point x uniform in E (outside E the left side has a non-integrable
    singularity at x, so the inequality is vacuous there).  The shape
    constant C2 is pinned to omega_n^(-|alpha|/n) -- the radius-measure
    comparability |E| <= omega_n r^n -- because the two-parameter fit
    degenerates as C2 -> 0; C1 is fitted on the training half.
    """
    t0 = time.perf_counter()
    n = dom.dim
    rng = _rng(spec.seed, 60)
    omega_total = _domain_measure(dom, spec)
    c2 = unit_ball_volume(n) ** (alpha / n)
    rows = []
    for i in range(trials):
        t_scale = math.exp(rng.uniform(math.log(1e-2), math.log(1e2)))
        center = sample_in_domain(dom, 1, rng)[0]
        rho = math.exp(rng.uniform(math.log(dom.diam / 128.0),
                                   math.log(dom.diam / 2.0)))
        e_ball = ball(center, rho)
        try:
            x = sample_in_domain(e_ball, 64, rng)
            x = x[dom.contains(x)]
        except RuntimeError:
            x = np.empty((0, n))
        if len(x) == 0:
            continue  # trap ball barely meets Omega; resample next trial
        x = x[0]
        e_meas = measure_ball_intersection(dom, center, rho, spec,
                                           n_points=16384).value
        if e_meas <= 0:
            continue
        lhs = geometric_inequality_lhs(dom, x, f, alpha, t_scale, center, rho,
                                       spec, n_samples=lhs_samples)
        rhs = ((1.0 / e_meas) * max(omega_total - e_meas, 0.0) / omega_total
               * float(f(c2 * t_scale * e_meas ** (abs(alpha) / n))))
        ratio = lhs / rhs if rhs > 0 else math.inf
        rows.append({
            "trial": i, "t": t_scale, "cx": float(center[0]), "cy": float(center[1]),
            "rho": rho, "x0": float(x[0]), "x1": float(x[1]),
            "E": e_meas, "lhs": lhs, "rhs": rhs, "ratio": ratio,
        })
    train = _train_holdout(len(rows), _rng(spec.seed, 61))
    finite_train = [r["ratio"] for r, tr in zip(rows, train)
                    if tr and math.isfinite(r["ratio"])]
    c1 = (1.0 - fit_margin) * min(finite_train) if finite_train else 0.0
    violations = 0
    witnesses = []
    for r, tr in zip(rows, train):
        r["split"] = "train" if tr else "holdout"
        ok = r["ratio"] >= c1
        r["pass"] = int(ok)
        if not tr and not ok:
            violations += 1
            witnesses.append(r)
    return _report(
        "geom-ineq",
        {"domain": domain_spec(dom), "phi": young_spec(f), "alpha": alpha,
         "n": n, "seed": spec.seed, "trials": trials},
        {"C1": c1, "C2": c2, "train_min_ratio": min(finite_train) if finite_train else math.nan},
        rows, violations, witnesses, t0,
    )


# ---------------------------------------------------------------------------
# cut-off norm bounds
# ---------------------------------------------------------------------------

def interior_anchor(dom: Domain) -> np.ndarray:
    """A reference interior point for building default field families."""
    if dom.kind == "ball":
        return np.asarray(dom.params[0], dtype=float)
    if dom.kind == "box":
        lo, hi = dom.bbox
        return 0.5 * (lo + hi)
    if dom.kind == "cusp":
        return np.array([0.6, 0.0])
    verts = np.asarray(dom.params[0], dtype=float)
    c = verts.mean(axis=0)
    if dom.contains(c[None, :])[0]:
        return c
    return sample_in_domain(dom, 1, _rng(0, 99))[0]


def _nudged_center(dom: Domain, point: np.ndarray) -> np.ndarray:
    """point if inside Omega, else the anchor."""
    if dom.contains(point[None, :])[0]:
        return point
    return interior_anchor(dom)


def default_cutoff_sweep(dom: Domain) -> list[tuple[np.ndarray, float, float]]:
    """Versioned 20-point (x, r, t) sweep scaled to the domain."""
    a = interior_anchor(dom)
    d = dom.diam
    offsets = [np.zeros(dom.dim)]
    for off in [(0.12, 0.08), (-0.1, 0.06), (0.05, -0.12)]:
        offsets.append(np.asarray(off) * d)
    combos = [(0.08, 0.5), (0.14, 0.5), (0.20, 0.5), (0.18, 0.75), (0.24, 0.5)]
    sweep = []
    for off in offsets:
        x = _nudged_center(dom, a + off)
        for t_frac, r_frac in combos:
            t = t_frac * d
            sweep.append((x, r_frac * t, t))
    return sweep


def check_cutoff_bound(
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    spec: QuadratureSpec,
    *,
    sweep: list[tuple[np.ndarray, float, float]] | None = None,
    fit_margin: float = FIT_MARGIN,
) -> VerificationReport:
    """Seminorm (and full norm) of ramp cut-offs against the shape bound.

    bound(x, r, t) = (t-r)^(-alpha) / phi^-1((t-r)^n / |B_Omega(x, t)|).
    Fits the smallest workable C on the training half for the seminorm and
    for the seminorm + Orlicz-norm sum, then validates both on the holdout.
    """
    t0 = time.perf_counter()
    n = dom.dim
    sweep = sweep if sweep is not None else default_cutoff_sweep(dom)
    rows = []
    for i, (x, r, t) in enumerate(sweep):
        u = cutoff(x, r, t, dom)
        sem = besov_seminorm(u, dom, f, alpha, spec)
        orl = orlicz_norm(u, dom, f, spec)
        b_meas = measure_ball_intersection(dom, x, t, spec, n_points=65536).value
        bound = (t - r) ** (-alpha) / f.inverse((t - r) ** n / b_meas)
        rows.append({
            "trial": i, "x0": float(x[0]), "x1": float(x[1]), "r": r, "t": t,
            "seminorm": sem, "orlicz": orl, "ball_measure": b_meas,
            "bound": bound, "ratio": sem / bound,
            "ratio_inhomog": (sem + orl) / bound,
        })
    train = _train_holdout(len(rows), _rng(spec.seed, 62))
    c_h = (1.0 + fit_margin) * max(r["ratio"] for r, tr in zip(rows, train) if tr)
    c_i = (1.0 + fit_margin) * max(r["ratio_inhomog"] for r, tr in zip(rows, train) if tr)
    violations = 0
    witnesses = []
    for r, tr in zip(rows, train):
        r["split"] = "train" if tr else "holdout"
        ok = r["ratio"] <= c_h and r["ratio_inhomog"] <= c_i
        r["pass"] = int(ok)
        if not tr and not ok:
            violations += 1
            witnesses.append(r)
    return _report(
        "cutoff",
        {"domain": domain_spec(dom), "phi": young_spec(f), "alpha": alpha,
         "n": n, "seed": spec.seed},
        {"C": c_h, "C_inhomog": c_i},
        rows, violations, witnesses, t0,
    )


def cutoff_shrink_slope(
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    spec: QuadratureSpec,
    *,
    x=None,
    t: float | None = None,
    n_points: int = 5,
    slope_tol: float = 0.2,
) -> VerificationReport:
    """Degenerate-ramp scaling: log seminorm vs log(t - r) against the bound's slope.

    As r -> t the bound grows like (t-r)^(-alpha - n/p) while the seminorm
    approaches the sharp indicator's (finite) seminorm, so its local slope
    flattens; the check asserts the two log-log exponents agree within
    slope_tol in absolute terms, i.e. the degenerate ramp grows no faster
    than the bound's envelope.
    """
    t0 = time.perf_counter()
    n = dom.dim
    x = np.asarray(x, dtype=float) if x is not None else interior_anchor(dom)
    t_rad = t if t is not None else 0.2 * dom.diam
    b_meas = measure_ball_intersection(dom, x, t_rad, spec, n_points=65536).value
    gaps = t_rad * 0.5 ** np.arange(1, n_points + 1)
    rows = []
    for i, gap in enumerate(gaps):
        r = t_rad - gap
        sem = besov_seminorm(cutoff(x, r, t_rad, dom), dom, f, alpha, spec)
        bound = gap ** (-alpha) / f.inverse(gap ** n / b_meas)
        rows.append({"trial": i, "gap": gap, "seminorm": sem, "bound": bound,
                     "ratio": sem / bound})
    lg = np.log([r["gap"] for r in rows])
    slope_sem = float(np.polyfit(lg, np.log([r["seminorm"] for r in rows]), 1)[0])
    slope_bound = float(np.polyfit(lg, np.log([r["bound"] for r in rows]), 1)[0])
    ok = abs(slope_sem - slope_bound) <= slope_tol
    return _report(
        "cutoff-slope",
        {"domain": domain_spec(dom), "phi": young_spec(f), "alpha": alpha,
         "n": n, "seed": spec.seed, "t": t_rad},
        {"slope_seminorm": slope_sem, "slope_bound": slope_bound},
        rows, 0 if ok else 1, [] if ok else rows[-1:], t0, slope=slope_sem,
        slope_data=[(float(x), float(math.log(r["seminorm"])))
                    for x, r in zip(lg, rows)],
    )


# ---------------------------------------------------------------------------
# level-set chain
# ---------------------------------------------------------------------------

def check_levelset_chain(
    u: ScalarField,
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    spec: QuadratureSpec,
    *,
    depth: int = 48,
) -> VerificationReport:
    """Dyadic level-set sandwich around the L^q mass, exact on frozen samples.

    With q = n/|alpha|, a_k = |{u > 2^k}| and S = sum_k a_k 2^(kq):
        ||u||_q^q <= 2^q S      and      S <= (1 - 2^(-q))^-1 ||u||_q^q.
    Values below the bottom dyadic level are clipped to zero on both sides,
    which keeps the per-sample inequalities exact under truncation.
    """
    t0 = time.perf_counter()
    n = dom.dim
    q = _q_exponent(alpha, n)
    ds = draw_domain_samples(dom, spec)
    vals = u.eval(ds.points)
    if float(vals[ds.inside].min(initial=0.0)) < 0:
        raise ValueError("level-set chain needs u >= 0 on the domain")
    vmax = float(np.where(ds.inside, vals, 0.0).max(initial=0.0))
    if vmax == 0.0:
        rows = [{"k": 0, "a_k": 0.0, "ratio": 1.0, "pass": 1}]
        return _report(
            "levelset", {"domain": domain_spec(dom), "field": field_spec(u),
                         "alpha": alpha, "n": n, "seed": spec.seed},
            {"S": 0.0, "Lq_q": 0.0}, rows, 0, [], t0,
            notes=["field vanishes on the sample: both chain sides are 0"],
        )
    k_hi = math.ceil(math.log2(vmax))
    k_lo = k_hi - depth
    prof = level_sets(u, dom, k_lo, k_hi, spec)
    clipped = np.where(vals > 2.0 ** k_lo, vals, 0.0)
    lq_q = ds.integrate(clipped ** q).value
    s_chain = prof.weighted_sum(q)
    upper_ok = lq_q <= 2.0 ** q * s_chain * (1.0 + 1e-12)
    lower_ok = s_chain <= lq_q / (1.0 - 2.0 ** (-q)) * (1.0 + 1e-12)
    rows = [{"k": k, "a_k": a, "d_k": d,
             "term": a * 2.0 ** (k * q)}
            for k, a, d in zip(range(k_lo, k_hi + 1), prof.a_k, prof.d_k)]
    violations = int(not upper_ok) + int(not lower_ok)
    return _report(
        "levelset",
        {"domain": domain_spec(dom), "field": field_spec(u), "alpha": alpha,
         "n": n, "seed": spec.seed, "phi": young_spec(f)},
        {"S": s_chain, "Lq_q": lq_q,
         "upper_factor": 2.0 ** q, "lower_factor": 1.0 / (1.0 - 2.0 ** (-q))},
        rows, violations,
        [] if violations == 0 else [{"upper_ok": upper_ok, "lower_ok": lower_ok}],
        t0,
    )


# ---------------------------------------------------------------------------
# imbedding ratios
# ---------------------------------------------------------------------------

def default_field_family(dom: Domain) -> list[ScalarField]:
    """Versioned 12-field test family: 4 Gaussian scales, 2 coordinates, 6 cut-offs."""
    a = interior_anchor(dom)
    d = dom.diam
    fields = [gaussian(a, sig * d) for sig in (0.04, 0.08, 0.15, 0.25)]
    fields += [coordinate(0), coordinate(1)]
    off = _nudged_center(dom, a + np.asarray((0.1, 0.06)) * d)
    for center in (a, off):
        for r_frac, t_frac in ((0.05, 0.1), (0.1, 0.2), (0.12, 0.24)):
            fields.append(cutoff(center, r_frac * d, t_frac * d, dom))
    return fields


def enriched_field_family(dom: Domain) -> list[ScalarField]:
    """The default family plus 12 more members (new scales, centers, combinations)."""
    a = interior_anchor(dom)
    d = dom.diam
    off1 = _nudged_center(dom, a + np.asarray((-0.08, 0.1)) * d)
    off2 = _nudged_center(dom, a + np.asarray((0.06, -0.09)) * d)
    extra = [gaussian(a, sig * d) for sig in (0.06, 0.12)]
    extra += [gaussian(off1, 0.08 * d), gaussian(off2, 0.15 * d)]
    extra += [cutoff(off1, 0.07 * d, 0.14 * d, dom), cutoff(off1, 0.09 * d, 0.2 * d, dom),
              cutoff(off2, 0.06 * d, 0.12 * d, dom), cutoff(off2, 0.11 * d, 0.22 * d, dom),
              cutoff(a, 0.15 * d, 0.24 * d, dom)]
    extra += [scale_field(2.5, gaussian(a, 0.1 * d)),
              field_sum(gaussian(a, 0.08 * d), cutoff(a, 0.05 * d, 0.12 * d, dom)),
              scale_field(0.5, coordinate(0))]
    return default_field_family(dom) + extra


def tip_cutoff_family(dom: Domain, eps_list) -> tuple[list[ScalarField], list[float]]:
    """Cut-offs concentrated at the spike tip: center (eps, 0), r = eps/2, t = eps."""
    if dom.kind != "cusp":
        raise ValueError("tip cut-offs are defined for cusp domains")
    fields = [cutoff((eps, 0.0), eps / 2.0, eps, dom) for eps in eps_list]
    return fields, [float(e) for e in eps_list]


def _imbedding_rows(dom, f, alpha, family, spec, *, centered: bool,
                    with_orlicz: bool) -> tuple[list, list]:
    n = dom.dim
    q = _q_exponent(alpha, n)
    rows, notes = [], []
    for i, u in enumerate(family):
        sem = besov_seminorm(u, dom, f, alpha, spec)
        den = sem
        orl = math.nan
        if with_orlicz:
            orl = orlicz_norm(u, dom, f, spec)
            den = sem + orl
        if centered:
            m = mean(u, dom, spec)
            num = lebesgue_norm(u, dom, q, spec, shift=m)
        else:
            m = math.nan
            num = lebesgue_norm(u, dom, q, spec)
        row = {"trial": i, "field": field_spec(u), "numerator": num,
               "seminorm": sem, "mean": m}
        if with_orlicz:
            row["orlicz"] = orl
        if den <= 0.0:
            if num <= 1e-9 * max(1.0, abs(m)):
                row["ratio"] = math.nan
                row["skipped"] = 1
                notes.append(f"field {field_spec(u)} skipped: 0/0 (constant)")
            else:
                row["ratio"] = math.inf
                row["skipped"] = 0
        else:
            row["ratio"] = num / den
            row["skipped"] = 0
        rows.append(row)
    return rows, notes


def _family_slope(rows: list[dict], scales: list[float] | None
                  ) -> tuple[float | None, list[tuple[float, float]] | None]:
    """log-log slope of ratio vs 1/scale, plus plot-ready points."""
    if scales is None:
        return None, None
    for s, r in zip(scales, rows):
        r["scale"] = s
    pts = [(math.log(1.0 / s), math.log(r["ratio"]))
           for s, r in zip(scales, rows)
           if math.isfinite(r["ratio"]) and r["ratio"] > 0]
    if len(pts) < 2:
        return None, pts
    slope = float(np.polyfit([x for x, _ in pts], [y for _, y in pts], 1)[0])
    return slope, pts


def imbedding_ratio(
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    family: list[ScalarField],
    spec: QuadratureSpec,
    *,
    scales: list[float] | None = None,
) -> VerificationReport:
    """Max over the family of ||u - mean(u)||_q / seminorm(u), q = n/|alpha|.

    When `scales` gives a concentration scale per field, the log-log slope of
    ratio against 1/scale is reported: positive slopes are the blow-up
    signature on domains that fail measure density.
    """
    t0 = time.perf_counter()
    rows, notes = _imbedding_rows(dom, f, alpha, family, spec,
                                  centered=True, with_orlicz=False)
    slope, slope_data = _family_slope(rows, scales)
    violations = sum(1 for r in rows if r["ratio"] == math.inf)
    return _report(
        "imbedding",
        {"domain": domain_spec(dom), "phi": young_spec(f), "alpha": alpha,
         "n": dom.dim, "seed": spec.seed, "family_size": len(family)},
        {"max_ratio": max((r["ratio"] for r in rows
                           if math.isfinite(r["ratio"])), default=math.nan)},
        rows, violations, [r for r in rows if r["ratio"] == math.inf],
        t0, notes=notes, slope=slope, slope_data=slope_data,
    )


def imbedding_ratio_inhomog(
    dom: Domain,
    f: YoungFunction,
    alpha: float,
    family: list[ScalarField],
    spec: QuadratureSpec,
    *,
    scales: list[float] | None = None,
) -> VerificationReport:
    """Max of ||u||_q / (||u||_Orlicz + seminorm(u)); constants are no longer degenerate."""
    t0 = time.perf_counter()
    rows, notes = _imbedding_rows(dom, f, alpha, family, spec,
                                  centered=False, with_orlicz=True)
    slope, slope_data = _family_slope(rows, scales)
    violations = sum(1 for r in rows if r["ratio"] == math.inf)
    return _report(
        "imbedding-inhomog",
        {"domain": domain_spec(dom), "phi": young_spec(f), "alpha": alpha,
         "n": dom.dim, "seed": spec.seed, "family_size": len(family)},
        {"max_ratio": max((r["ratio"] for r in rows
                           if math.isfinite(r["ratio"])), default=math.nan)},
        rows, violations, [r for r in rows if r["ratio"] == math.inf],
        t0, notes=notes, slope=slope, slope_data=slope_data,
    )


# ---------------------------------------------------------------------------
# critical gauge with explicit constant
# ---------------------------------------------------------------------------

def check_critical_case(
    dom: Domain,
    fixed_ball: Domain,
    alpha: float,
    family: list[ScalarField],
    spec: QuadratureSpec,
    *,
    slack: float = 0.05,
) -> VerificationReport:
    """Explicit-constant bound for the critical gauge phi_0 = t^(n/|alpha|).

    Checks ||u - mean_B(u)||_q <= |B|^(alpha/n) diam^(-alpha) * seminorm(u)
    per field, with B a fixed ball, 2B inside Omega.  phi_0 is not
    admissible, so fields whose modular diverges pass vacuously and are
    reported as such.
    """
    t0 = time.perf_counter()
    if fixed_ball.kind != "ball":
        raise ValueError("the centering set must be a ball domain")
    n = dom.dim
    q = _q_exponent(alpha, n)
    center, radius = fixed_ball.params
    probe = sample_in_domain(ball(center, 2.0 * radius), 4096, _rng(spec.seed, 63))
    if not dom.contains(probe).all():
        raise ValueError("need 2B inside Omega")
    phi0 = power(q)
    c_explicit = fixed_ball.exact_area ** (alpha / n) * dom.diam ** (-alpha)
    rows, notes = [], []
    violations = 0
    witnesses = []
    for i, u in enumerate(family):
        m_b = mean(u, fixed_ball, spec)
        num = lebesgue_norm(u, dom, q, spec, shift=m_b)
        try:
            sem = besov_seminorm(u, dom, phi0, alpha, spec)
        except NotInSpaceError:
            notes.append(f"field {field_spec(u)}: modular diverges for the "
                         "critical gauge; bound holds vacuously")
            rows.append({"trial": i, "field": field_spec(u), "numerator": num,
                         "seminorm": math.inf, "rhs": math.inf, "ratio": 0.0,
                         "pass": 1, "vacuous": 1})
            continue
        rhs = c_explicit * sem
        ok = num <= rhs * (1.0 + slack)
        ratio = num / rhs if rhs > 0 else (0.0 if num == 0.0 else math.inf)
        rows.append({"trial": i, "field": field_spec(u), "numerator": num,
                     "seminorm": sem, "rhs": rhs, "ratio": ratio,
                     "pass": int(ok), "vacuous": 0})
        if not ok:
            violations += 1
            witnesses.append(rows[-1])
    return _report(
        "critical",
        {"domain": domain_spec(dom), "ball": domain_spec(fixed_ball),
         "alpha": alpha, "n": n, "seed": spec.seed},
        {"C_explicit": c_explicit},
        rows, violations, witnesses, t0, notes=notes,
    )


# ---------------------------------------------------------------------------
# dilation homogeneity
# ---------------------------------------------------------------------------

def check_scaling_homogeneity(
    f: YoungFunction,
    alpha: float,
    field: ScalarField,
    r_factors: list[float],
    spec: QuadratureSpec,
    *,
    ball_radius: float = 16.0,
    tol: float = 0.05,
) -> VerificationReport:
    """Both norms scale the same way under dilation: norm(u)/norm(u(r .)) = r^|alpha|.

    Checked on a ball large enough that the truncated far-field is
    negligible; the field's support (and its dilates) must stay well inside.
    """
    t0 = time.perf_counter()
    sb = field.support_box
    if sb is None:
        raise ValueError("scaling checks need a compactly supported field")
    dom = ball((0.0, 0.0), ball_radius)
    n = dom.dim
    q = _q_exponent(alpha, n)
    reach = float(np.abs(np.concatenate(sb)).max())
    for r in r_factors:
        if reach / r > 0.75 * ball_radius:
            raise ValueError(f"support escapes the test ball under dilation r={r}")
    base_sem = besov_seminorm(field, dom, f, alpha, spec)
    base_leb = lebesgue_norm(field, dom, q, spec)
    target = lambda r: r ** abs(alpha)
    rows = []
    violations = 0
    witnesses = []
    for i, r in enumerate(r_factors):
        ur = dilate(field, r)
        sem_r = besov_seminorm(ur, dom, f, alpha, spec)
        leb_r = lebesgue_norm(ur, dom, q, spec)
        ratio_sem = base_sem / sem_r if sem_r > 0 else math.inf
        ratio_leb = base_leb / leb_r if leb_r > 0 else math.inf
        ok = (abs(ratio_sem / target(r) - 1.0) <= tol
              and abs(ratio_leb / target(r) - 1.0) <= tol)
        rows.append({"trial": i, "r": r, "seminorm": sem_r, "lebesgue": leb_r,
                     "ratio": ratio_sem, "ratio_lebesgue": ratio_leb,
                     "target": target(r), "pass": int(ok)})
        if not ok:
            violations += 1
            witnesses.append(rows[-1])
    return _report(
        "scaling",
        {"phi": young_spec(f), "alpha": alpha, "n": n, "seed": spec.seed,
         "field": field_spec(field), "ball_radius": ball_radius},
        {"base_seminorm": base_sem, "base_lebesgue": base_leb},
        rows, violations, witnesses, t0,
    )


# ---------------------------------------------------------------------------
# whole-space imbedding via growing balls
# ---------------------------------------------------------------------------

def rn_imbedding_via_growing_balls(
    f: YoungFunction,
    alpha: float,
    field: ScalarField,
    R_list: list[float],
    spec: QuadratureSpec,
    *,
    drift_slack: float = 1.5,
    ratio_spread_cap: float = 3.0,
) -> VerificationReport:
    """Ball means stabilize and ball-Poincare ratios stay uniform as R grows.

    For each R: ratio_R = ||u - mean_R|| _q / seminorm over B(0, R), and
    drift(R) = |mean_{2R} - mean_R|.  The mean of a fixed-mass field over
    B(0, R) scales like R^-n, so the drift must at least halve per radius
    doubling (one-sided, slack drift_slack); the ratio spread must stay
    under ratio_spread_cap.
    """
    t0 = time.perf_counter()
    sb = field.support_box
    if sb is None:
        raise ValueError("growing-ball checks need a compactly supported field")
    R_list = sorted(float(r) for r in R_list)
    reach = float(np.abs(np.concatenate(sb)).max())
    if reach > R_list[0]:
        raise ValueError("support must fit inside the smallest ball")
    n = 2
    q = _q_exponent(alpha, n)
    radii = sorted({*R_list, *(2.0 * r for r in R_list)})
    means = {}
    for R in radii:
        means[R] = mean(field, ball((0.0, 0.0), R), spec)
    rows = []
    for i, R in enumerate(R_list):
        dom_r = ball((0.0, 0.0), R)
        num = lebesgue_norm(field, dom_r, q, spec, shift=means[R])
        sem = besov_seminorm(field, dom_r, f, alpha, spec)
        drift = abs(means[2.0 * R] - means[R])
        rows.append({"trial": i, "R": R, "mean": means[R], "drift": drift,
                     "numerator": num, "seminorm": sem,
                     "ratio": num / sem if sem > 0 else math.inf})
    violations = 0
    witnesses = []
    for prev, cur in zip(rows, rows[1:]):
        if prev["drift"] <= 0:
            continue
        decay = cur["drift"] / prev["drift"]
        cur["drift_decay"] = decay
        if decay > 0.5 * drift_slack:
            violations += 1
            witnesses.append(cur)
    ratios = [r["ratio"] for r in rows if math.isfinite(r["ratio"])]
    spread = max(ratios) / min(ratios) if ratios and min(ratios) > 0 else math.inf
    if spread >= ratio_spread_cap:
        violations += 1
        witnesses.append({"ratio_spread": spread})
    return _report(
        "rn-balls",
        {"phi": young_spec(f), "alpha": alpha, "n": n, "seed": spec.seed,
         "field": field_spec(field), "radii": tuple(R_list)},
        {"ratio_spread": spread},
        rows, violations, witnesses, t0,
    )
