"""Seeded integration engine.

Three kinds of integrals back everything else in the package:

* 1-D improper integrals with the weight dt/t^(n+1) on (0, b] or [a, inf),
  computed decade by decade with divergence detection,
* plain domain integrals by stratified Monte Carlo over a bounding box,
* singular pair integrals with kernel |x-y|^(-2n), computed through the
  polar substitution y = x + t*omega which turns the kernel into the same
  dt/t^(n+1) radial weight.

Every estimator is a pure function of its QuadratureSpec; equal seeds give
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # pragma: no cover
    from .geometry import Domain

__all__ = [
    "QuadratureSpec",
    "MeasureEstimate",
    "PairIntegralResult",
    "unit_ball_volume",
    "sphere_surface",
    "integrate_weighted_1d",
    "integrate_domain",
    "integrate_pair_singular",
    "radial_singular_integral",
    "build_pair_samples",
    "draw_domain_samples",
    "sample_in_domain",
    "near_diagonal_scan",
]

DEFAULT_T_MIN_FRAC = 2.0 ** -14  # radial cutoff as a fraction of diam
DIVERGENCE_CAP = 1e12
NONDECAY_FRAC = 1e-3
NONDECAY_RUN = 3


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n (pi for n = 2)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def sphere_surface(n: int) -> float:
    """Surface measure of the unit sphere S^(n-1) in R^n."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True)
class QuadratureSpec:
    """Sampling plan making every estimate deterministic.

    t_min/t_max are absolute radial cutoffs (length units); when None they
    resolve to diam * 2^-14 and diam of the domain at hand.  stratification
    is the number of decades of t covered by one stratum.
    """

    seed: int = 42
    n_outer: int = 2048
    n_radial: int = 64
    t_min: float | None = None
    t_max: float | None = None
    stratification: float = 1.0

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.n_outer < 1 or self.n_radial < 1:
            raise ValueError("sample counts must be >= 1")
        if self.t_min is not None and self.t_min <= 0:
            raise ValueError("t_min must be positive")
        if self.t_min is not None and self.t_max is not None and not self.t_min < self.t_max:
            raise ValueError("need 0 < t_min < t_max")
        if self.stratification <= 0:
            raise ValueError("stratification must be positive")

    def radial_range(self, diam: float) -> tuple[float, float]:
        t_lo = self.t_min if self.t_min is not None else diam * DEFAULT_T_MIN_FRAC
        t_hi = self.t_max if self.t_max is not None else diam
        if not 0 < t_lo < t_hi:
            raise ValueError(f"resolved radial range invalid: ({t_lo}, {t_hi})")
        return t_lo, t_hi


@dataclass(frozen=True)
class MeasureEstimate:
    """Monte Carlo estimate with its standard error and provenance."""

    value: float
    std_err: float
    samples: int
    seed: int


def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, tags)]))


# ---------------------------------------------------------------------------
# 1-D weighted improper integrals
# ---------------------------------------------------------------------------

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss_legendre(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if nodes not in _GL_CACHE:
        _GL_CACHE[nodes] = np.polynomial.legendre.leggauss(nodes)
    return _GL_CACHE[nodes]


def _log_panel(g: Callable[[np.ndarray], np.ndarray], n: int, u0: float, u1: float,
               nodes: int) -> float:
    """Integral of g(t) dt/t^(n+1) over t in [e^u0, e^u1] via log substitution."""
    z, w = _gauss_legendre(nodes)
    u = 0.5 * (u1 + u0) + 0.5 * (u1 - u0) * z
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        vals = np.asarray(g(np.exp(u)), dtype=float) * np.exp(-n * u)
        return float(np.sum(w * vals) * 0.5 * (u1 - u0))


def integrate_weighted_1d(
    g: Callable[[np.ndarray], np.ndarray],
    interval: tuple[float, float],
    n: int,
    *,
    nodes_per_decade: int = 32,
    max_decades: int = 240,
    rel_tail: float = 1e-10,
    cap: float = DIVERGENCE_CAP,
) -> float:
    """Integral of g(t) dt/t^(n+1) over (0, b], [a, inf) or [a, b].

    Composite Gauss-Legendre per decade in log t.  Improper endpoints are
    scanned decade by decade; math.inf is returned when the running total
    passes `cap` with a non-decaying tail, or when the per-decade
    contributions fail to decay after `max_decades` decades.  Convergent
    tails are closed with a geometric extrapolation.
    """
    a, b = interval
    if a < 0 or not b > a:
        raise ValueError("interval must satisfy 0 <= a < b")
    if a == 0.0 and math.isinf(b):
        raise ValueError("split (0, inf) into (0, c] and [c, inf)")

    if a > 0.0 and not math.isinf(b):
        n_dec = max(1, math.ceil(math.log10(b / a)))
        edges = np.linspace(math.log(a), math.log(b), n_dec + 1)
        return sum(_log_panel(g, n, edges[k], edges[k + 1], nodes_per_decade)
                   for k in range(n_dec))

    ln10 = math.log(10.0)
    if a == 0.0:
        u_top = math.log(b)
        def decade(k: int) -> float:
            return _log_panel(g, n, u_top - (k + 1) * ln10, u_top - k * ln10,
                              nodes_per_decade)
    else:
        u_bot = math.log(a)
        def decade(k: int) -> float:
            return _log_panel(g, n, u_bot + k * ln10, u_bot + (k + 1) * ln10,
                              nodes_per_decade)

    total = 0.0
    contribs: list[float] = []
    zero_run = 0
    for k in range(max_decades):
        c = decade(k)
        if not math.isfinite(c) or not math.isfinite(total + c):
            # float range exhausted: trust the decay state seen so far
            if len(contribs) >= 2 and 0 < contribs[-1] < contribs[-2]:
                rho = contribs[-1] / contribs[-2]
                return total + contribs[-1] * rho / (1.0 - rho)
            return math.inf
        total += c
        contribs.append(c)
        if c == 0.0:
            zero_run += 1
            if total > 0.0 or zero_run >= 3:
                return total
            continue
        zero_run = 0
        recent = contribs[-NONDECAY_RUN:]
        nondecaying = (len(recent) == NONDECAY_RUN
                       and all(r > NONDECAY_FRAC * total for r in recent))
        if total > cap and nondecaying:
            return math.inf
        if len(contribs) >= 2 and contribs[-1] < contribs[-2]:
            rho = contribs[-1] / contribs[-2]
            tail = contribs[-1] * rho / (1.0 - rho)
            if tail <= rel_tail * total:
                return total + tail
    recent = contribs[-NONDECAY_RUN:]
    if all(r > NONDECAY_FRAC * total for r in recent):
        return math.inf
    return total


# ---------------------------------------------------------------------------
# point sampling inside a domain
# ---------------------------------------------------------------------------

def _clip_region(dom: "Domain", region: tuple[np.ndarray, np.ndarray] | None
                 ) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = dom.bbox
    if region is not None:
        lo = np.maximum(lo, np.asarray(region[0], dtype=float))
        hi = np.minimum(hi, np.asarray(region[1], dtype=float))
        if np.any(lo >= hi):
            raise ValueError("region does not intersect the domain bounding box")
    return np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)


def sample_in_domain(
    dom: "Domain",
    count: int,
    rng: np.random.Generator,
    *,
    region: tuple[np.ndarray, np.ndarray] | None = None,
    max_batches: int = 400,
) -> np.ndarray:
    """Rejection-sample `count` points uniform on (region box) iterated with Omega."""
    lo, hi = _clip_region(dom, region)
    dim = lo.size
    batch = max(2048, 2 * count)
    kept: list[np.ndarray] = []
    got = 0
    for _ in range(max_batches):
        cand = rng.uniform(size=(batch, dim)) * (hi - lo) + lo
        m = dom.contains(cand)
        if m.any():
            kept.append(cand[m])
            got += int(m.sum())
        if got >= count:
            return np.concatenate(kept)[:count]
        batch = min(1 << 21, batch * 2)
    raise RuntimeError(
        f"rejection sampling failed: {got}/{count} points after {max_batches} batches; "
        "the region may have a tiny volume fraction"
    )


# ---------------------------------------------------------------------------
# stratified domain integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSamples:
    """Frozen stratified point set over a box, with the Omega mask."""

    points: np.ndarray        # (cells*m, dim)
    inside: np.ndarray        # (cells*m,) bool, point in Omega
    region_vol: float
    cells: int
    per_cell: int
    seed: int

    def integrate(self, values: np.ndarray) -> MeasureEstimate:
        """Estimate of the integral of f*1_Omega over the region box."""
        arr = np.where(self.inside, np.asarray(values, dtype=float), 0.0)
        mean = float(arr.mean())
        per_cell = arr.reshape(self.cells, self.per_cell)
        var_cells = per_cell.var(axis=1, ddof=1)
        var = float(var_cells.mean()) / (self.cells * self.per_cell)
        return MeasureEstimate(
            value=self.region_vol * mean,
            std_err=self.region_vol * math.sqrt(max(var, 0.0)),
            samples=arr.size,
            seed=self.seed,
        )

    def measure(self) -> MeasureEstimate:
        return self.integrate(np.ones(len(self.points)))


def draw_domain_samples(
    dom: "Domain",
    spec: QuadratureSpec,
    *,
    region: tuple[np.ndarray, np.ndarray] | None = None,
    tag: int = 10,
    n_points: int | None = None,
) -> DomainSamples:
    """Stratified (equal-volume cells, 2+ points each) sample of the region box."""
    lo, hi = _clip_region(dom, region)
    dim = lo.size
    total = n_points if n_points is not None else spec.n_outer * spec.n_radial
    per_cell = 2
    target_cells = max(1, total // per_cell)
    edge = hi - lo
    scale = (target_cells / float(np.prod(edge))) ** (1.0 / dim)
    counts = np.maximum(1, np.round(edge * scale).astype(int))
    cells = int(np.prod(counts))
    rng = _rng(spec.seed, tag)
    # cell corner grid + uniform jitter
    grids = np.meshgrid(*[np.arange(c) for c in counts], indexing="ij")
    corners = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    jitter = rng.uniform(size=(cells, per_cell, dim))
    pts = (corners[:, None, :] + jitter) * (edge / counts) + lo
    pts = pts.reshape(cells * per_cell, dim)
    return DomainSamples(
        points=pts,
        inside=dom.contains(pts),
        region_vol=float(np.prod(edge)),
        cells=cells,
        per_cell=per_cell,
        seed=spec.seed,
    )


def integrate_domain(
    f: Callable[[np.ndarray], np.ndarray],
    dom: "Domain",
    spec: QuadratureSpec,
    *,
    region: tuple[np.ndarray, np.ndarray] | None = None,
) -> MeasureEstimate:
    """Stratified Monte Carlo estimate of the integral of f over Omega (or region)."""
    ds = draw_domain_samples(dom, spec, region=region)
    return ds.integrate(np.asarray(f(ds.points), dtype=float))


# ---------------------------------------------------------------------------
# singular pair integrals via the polar substitution
# ---------------------------------------------------------------------------

def _t_strata(t_lo: float, t_hi: float, decades_per_stratum: float,
              n_radial: int) -> tuple[np.ndarray, np.ndarray]:
    """Geometric stratum edges and per-stratum sample allocation."""
    decades = math.log10(t_hi / t_lo)
    k = max(1, min(n_radial, math.ceil(decades / decades_per_stratum)))
    edges = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), k + 1))
    alloc = np.full(k, n_radial // k, dtype=int)
    alloc[: n_radial - alloc.sum()] += 1
    return edges, alloc


@dataclass(frozen=True)
class PairSamples:
    """Frozen sample set for pair integrals; reusable across integrands.

    Weights fold in everything except the integrand F itself: the measure of
    the x-region, the sphere surface, the radial importance correction
    t^(-n) * log-width, the Omega indicator at y, and the support-splitting
    factor (2 - 1_S(y)) that accounts for pairs whose first coordinate falls
    outside the sampled support region.
    """

    x: np.ndarray             # (N, dim)
    y: np.ndarray             # (N, dim)
    t: np.ndarray             # (N,)
    w: np.ndarray             # (N,)
    n_outer: int
    n_radial: int
    strata: np.ndarray        # (K, 2) t-edges
    stratum_of: np.ndarray    # (N,) int
    x_measure: float
    seed: int

    def estimate(self, f_vals: np.ndarray) -> MeasureEstimate:
        with np.errstate(invalid="ignore"):
            contrib = self.w * np.asarray(f_vals, dtype=float)
        contrib[self.w == 0.0] = 0.0  # dead samples stay dead even for inf F
        per_x = contrib.reshape(self.n_outer, self.n_radial).sum(axis=1)
        value = float(per_x.sum())
        if self.n_outer > 1:
            std_err = float(per_x.std(ddof=1)) * math.sqrt(self.n_outer)
        else:
            std_err = 0.0
        return MeasureEstimate(value=value, std_err=std_err,
                               samples=contrib.size, seed=self.seed)

    def per_stratum(self, f_vals: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            contrib = self.w * np.asarray(f_vals, dtype=float)
        contrib[self.w == 0.0] = 0.0
        return np.bincount(self.stratum_of, weights=contrib,
                           minlength=len(self.strata))


def build_pair_samples(
    dom: "Domain",
    spec: QuadratureSpec,
    *,
    support: tuple[np.ndarray, np.ndarray] | None = None,
    tag: int = 20,
) -> PairSamples:
    """Draw the frozen sample set for integrals of F(x,y)|x-y|^(-2n) over Omega^2.

    x is uniform on S = (support box) cap Omega (all of Omega when support is
    None); y = x + t*omega with omega uniform on the sphere and t
    log-stratified on the resolved radial range.  For symmetric F vanishing
    when both arguments are outside S, the estimator 2*A - B (A: x in S, y in
    Omega; B: both in S) reproduces the full double integral; the factor
    (2 - 1_S(y)) in the weights implements it and degenerates to 1 when S
    covers Omega.
    """
    dim = dom.dim
    n = dim
    lo, hi = _clip_region(dom, support)
    # measure of the x-region
    if support is None and dom.exact_area is not None:
        x_measure = float(dom.exact_area)
    else:
        ds = draw_domain_samples(dom, spec, region=(lo, hi), tag=tag + 1)
        x_measure = ds.measure().value
        if x_measure <= 0:
            raise ValueError("sampled x-region has zero measure")
    t_lo, t_hi = spec.radial_range(dom.diam)
    edges, alloc = _t_strata(t_lo, t_hi, spec.stratification, spec.n_radial)

    rng = _rng(spec.seed, tag)
    xs = sample_in_domain(dom, spec.n_outer, rng, region=(lo, hi))

    t_cols: list[np.ndarray] = []
    logw_cols: list[np.ndarray] = []
    strat_cols: list[np.ndarray] = []
    for s, m_s in enumerate(alloc):
        if m_s == 0:
            continue
        la, lb = math.log(edges[s]), math.log(edges[s + 1])
        u = rng.uniform(la, lb, size=(spec.n_outer, m_s))
        t_cols.append(np.exp(u))
        logw_cols.append(np.full((spec.n_outer, m_s), (lb - la) / m_s))
        strat_cols.append(np.full((spec.n_outer, m_s), s, dtype=int))
    t = np.concatenate(t_cols, axis=1)
    logw = np.concatenate(logw_cols, axis=1)
    strat = np.concatenate(strat_cols, axis=1)

    g = rng.standard_normal(size=(spec.n_outer, spec.n_radial, dim))
    omega = g / np.linalg.norm(g, axis=2, keepdims=True)
    y = xs[:, None, :] + t[:, :, None] * omega

    y_flat = y.reshape(-1, dim)
    y_in = dom.contains(y_flat)
    in_box = np.all((y_flat >= lo) & (y_flat <= hi), axis=1)
    support_factor = 2.0 - (y_in & in_box).astype(float)

    w = (
        (x_measure / spec.n_outer)
        * sphere_surface(n)
        * logw.reshape(-1)
        * t.reshape(-1) ** (-n)
        * y_in.astype(float)
        * support_factor
    )
    return PairSamples(
        x=np.repeat(xs, spec.n_radial, axis=0),
        y=y_flat,
        t=t.reshape(-1),
        w=w,
        n_outer=spec.n_outer,
        n_radial=spec.n_radial,
        strata=np.column_stack([edges[:-1], edges[1:]]),
        stratum_of=strat.reshape(-1),
        x_measure=x_measure,
        seed=spec.seed,
    )


@dataclass(frozen=True)
class PairIntegralResult:
    value: float
    std_err: float
    samples: int
    seed: int
    strata: tuple[tuple[float, float, float], ...]  # (t_lo, t_hi, contribution)


def integrate_pair_singular(
    F: Callable[[np.ndarray, np.ndarray], np.ndarray],
    dom: "Domain",
    spec: QuadratureSpec,
    *,
    support: tuple[np.ndarray, np.ndarray] | None = None,
) -> PairIntegralResult:
    """Estimate of the double integral of F(x,y)|x-y|^(-2n) over Omega x Omega."""
    ps = build_pair_samples(dom, spec, support=support)
    vals = np.asarray(F(ps.x, ps.y), dtype=float)
    est = ps.estimate(vals)
    per = ps.per_stratum(vals)
    strata = tuple(
        (float(a), float(b), float(c)) for (a, b), c in zip(ps.strata, per)
    )
    return PairIntegralResult(est.value, est.std_err, est.samples, est.seed, strata)


def near_diagonal_scan(
    F: Callable[[np.ndarray, np.ndarray], np.ndarray],
    dom: "Domain",
    spec: QuadratureSpec,
    *,
    shrink_steps: int = 3,
    shrink_factor: float = 4.0,
) -> tuple[bool, list[tuple[float, float]]]:
    """Diagnose a near-diagonal divergence of the pair integral.

    Re-evaluates the whole estimate while t_min shrinks by `shrink_factor`
    per step.  A steadily growing total means the kernel singularity is not
    integrable against F (the signature of a non-admissible gauge), whereas
    an integrable pair stabilizes.  Returns (diverging, [(t_min, total)]).
    """
    t_lo, t_hi = spec.radial_range(dom.diam)
    table: list[tuple[float, float]] = []
    for k in range(shrink_steps):
        tk = t_lo / shrink_factor**k
        sub = QuadratureSpec(
            seed=spec.seed,
            n_outer=spec.n_outer,
            n_radial=spec.n_radial,
            t_min=tk,
            t_max=t_hi,
            stratification=spec.stratification,
        )
        table.append((tk, integrate_pair_singular(F, dom, sub).value))
    growing = all(table[i + 1][1] > table[i][1] * 1.05
                  for i in range(len(table) - 1))
    return growing and table[-1][1] > 0, table


def radial_singular_integral(
    dom: "Domain",
    x: np.ndarray,
    g: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec,
    *,
    exclude: Callable[[np.ndarray], np.ndarray] | None = None,
    n_samples: int | None = None,
) -> MeasureEstimate:
    """Estimate of the integral of g(|x-y|)|x-y|^(-2n) dy over Omega minus an excluded set.

    Polar form around the fixed point x: |S^(n-1)| * int E_omega[1(x+t w)]
    g(t) t^(-n-1) dt, with t log-stratified on the resolved radial range.
    """
    x = np.asarray(x, dtype=float)
    n = dom.dim
    t_lo, t_hi = spec.radial_range(dom.diam)
    total_samples = n_samples if n_samples is not None else spec.n_outer * spec.n_radial
    edges, alloc = _t_strata(t_lo, t_hi, spec.stratification, total_samples)
    rng = _rng(spec.seed, 30)
    surf = sphere_surface(n)
    value = 0.0
    var = 0.0
    used = 0
    for s, m_s in enumerate(alloc):
        if m_s == 0:
            continue
        la, lb = math.log(edges[s]), math.log(edges[s + 1])
        t = np.exp(rng.uniform(la, lb, size=m_s))
        gdir = rng.standard_normal(size=(m_s, n))
        omega = gdir / np.linalg.norm(gdir, axis=1, keepdims=True)
        y = x[None, :] + t[:, None] * omega
        keep = dom.contains(y)
        if exclude is not None:
            keep &= ~np.asarray(exclude(y), dtype=bool)
        vals = surf * (lb - la) * np.asarray(g(t), dtype=float) * t ** (-n) * keep
        value += float(vals.mean())
        if m_s > 1:
            var += float(vals.var(ddof=1)) / m_s
        used += m_s
    return MeasureEstimate(value=value, std_err=math.sqrt(max(var, 0.0)),
                           samples=used, seed=spec.seed)
