"""Modulars, Luxemburg norms, and scalar fields.

Fields are small composable dataclasses (constants, coordinates, Gaussian
bumps, radial cut-offs, sums, scalings, dilations).  On top of the
quadrature engine this module computes

* the Besov modular  int int phi(|u(x)-u(y)| / (lambda |x-y|^alpha)) dx dy / |x-y|^(2n)
  and its Luxemburg seminorm (infimum over lambda of modular <= 1),
* the Gagliardo seminorm (the phi = t^p special case in closed form),
* the Orlicz norm (Luxemburg norm of the plain domain modular),
* Lebesgue norms, means, medians and dyadic level-set profiles.

Luxemburg bisections run on one frozen sample set (common random numbers),
so the estimated modular is exactly non-increasing in lambda and bisection
is sound despite Monte Carlo noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .geometry import Domain
from .quadrature import (
    PairSamples,
    QuadratureSpec,
    _rng,
    build_pair_samples,
    draw_domain_samples,
    sample_in_domain,
)
from .young import YoungFunction

__all__ = [
    "ScalarField",
    "LevelSetProfile",
    "NotInSpaceError",
    "constant",
    "coordinate",
    "gaussian",
    "cutoff",
    "scale_field",
    "dilate",
    "offset",
    "truncate",
    "field_sum",
    "parse_field",
    "field_spec",
    "besov_modular",
    "besov_seminorm",
    "gagliardo_seminorm",
    "orlicz_norm",
    "lebesgue_norm",
    "mean",
    "median",
    "level_sets",
]

SEMINORM_FLOOR_FRAC = 1e-9  # lambda floor relative to field range * diam^alpha


class NotInSpaceError(RuntimeError):
    """The modular stayed above 1 for every tested lambda: u is not in the space."""


@dataclass(frozen=True)
class ScalarField:
    """Real-valued function on R^n, evaluatable on (N, n) point arrays."""

    kind: str
    params: tuple = ()
    children: tuple["ScalarField", ...] = dc_field(default=())

    def eval(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        k = self.kind
        if k == "const":
            return np.full(len(pts), self.params[0])
        if k == "coord":
            return pts[:, self.params[0]].copy()
        if k == "gauss":
            c = np.asarray(self.params[0], dtype=float)
            sig = self.params[1]
            return np.exp(-((pts - c) ** 2).sum(axis=1) / (2.0 * sig * sig))
        if k == "cutoff":
            c = np.asarray(self.params[0], dtype=float)
            r, t = self.params[1], self.params[2]
            d = np.sqrt(((pts - c) ** 2).sum(axis=1))
            return np.clip((t - d) / (t - r), 0.0, 1.0)
        if k == "scale":
            return self.params[0] * self.children[0].eval(pts)
        if k == "dilate":
            return self.children[0].eval(self.params[0] * pts)
        if k == "offset":
            return self.children[0].eval(pts) + self.params[0]
        if k == "min":
            return np.minimum(self.children[0].eval(pts), self.params[0])
        if k == "sum":
            return self.children[0].eval(pts) + self.children[1].eval(pts)
        raise ValueError(f"unknown field kind {k!r}")

    @property
    def support_box(self) -> tuple[np.ndarray, np.ndarray] | None:
        """Box outside which the field (effectively) vanishes; None = everywhere."""
        k = self.kind
        if k == "gauss":
            c = np.asarray(self.params[0], dtype=float)
            reach = 8.0 * self.params[1]
            return c - reach, c + reach
        if k == "cutoff":
            c = np.asarray(self.params[0], dtype=float)
            t = self.params[2]
            return c - t, c + t
        if k in ("scale", "min"):
            return self.children[0].support_box
        if k == "dilate":
            sb = self.children[0].support_box
            if sb is None:
                return None
            r = self.params[0]
            return sb[0] / r, sb[1] / r
        if k == "sum":
            a, b = self.children[0].support_box, self.children[1].support_box
            if a is None or b is None:
                return None
            return np.minimum(a[0], b[0]), np.maximum(a[1], b[1])
        return None  # const, coord, offset


def constant(c: float) -> ScalarField:
    return ScalarField("const", (float(c),))


def coordinate(i: int) -> ScalarField:
    if i < 0:
        raise ValueError("coordinate index must be >= 0")
    return ScalarField("coord", (int(i),))


def gaussian(center, sigma: float) -> ScalarField:
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return ScalarField("gauss", (tuple(float(v) for v in center), float(sigma)))


def cutoff(center, r: float, t: float, dom: Domain | None = None) -> ScalarField:
    """1 on B(x, r), linear ramp (t - |x - z|)/(t - r) on the annulus, 0 outside B(x, t)."""
    if not 0 < r < t:
        raise ValueError("cutoff needs 0 < r < t")
    if dom is not None and not t < dom.diam / 2.0:
        raise ValueError("cutoff needs t < diam/2")
    return ScalarField("cutoff", (tuple(float(v) for v in center), float(r), float(t)))


def scale_field(c: float, u: ScalarField) -> ScalarField:
    return ScalarField("scale", (float(c),), (u,))


def dilate(u: ScalarField, r: float) -> ScalarField:
    """z -> u(r z)."""
    if r <= 0:
        raise ValueError("dilation factor must be positive")
    return ScalarField("dilate", (float(r),), (u,))


def offset(u: ScalarField, c: float) -> ScalarField:
    return ScalarField("offset", (float(c),), (u,))


def truncate(u: ScalarField, cap: float) -> ScalarField:
    """z -> min(u(z), cap)."""
    return ScalarField("min", (float(cap),), (u,))


def field_sum(u: ScalarField, v: ScalarField) -> ScalarField:
    return ScalarField("sum", (), (u, v))


# ---------------------------------------------------------------------------
# spec strings: const:<c> | coord:<i> | gauss:<cx>,<cy>,<s> | cutoff:<cx>,<cy>,<r>,<t>
#               sum:<spec>+<spec> | scale:<c>*<spec>
# ---------------------------------------------------------------------------

def parse_field(text: str) -> ScalarField:
    head, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"malformed field spec {text!r}: missing ':'")
    try:
        if head == "const":
            return constant(float(rest))
        if head == "coord":
            return coordinate(int(rest))
        if head == "gauss":
            cx, cy, s = (float(v) for v in rest.split(","))
            return gaussian((cx, cy), s)
        if head == "cutoff":
            cx, cy, r, t = (float(v) for v in rest.split(","))
            return cutoff((cx, cy), r, t)
        if head == "sum":
            left, sep2, right = rest.partition("+")
            if not sep2:
                raise ValueError("sum spec needs '+'")
            return field_sum(parse_field(left), parse_field(right))
        if head == "scale":
            c_str, sep2, sub = rest.partition("*")
            if not sep2:
                raise ValueError("scale spec needs <c>*<spec>")
            return scale_field(float(c_str), parse_field(sub))
    except ValueError as exc:
        raise ValueError(f"malformed field spec {text!r}: {exc}") from None
    raise ValueError(f"unknown field kind {head!r} in {text!r}")


def field_spec(u: ScalarField) -> str:
    k = u.kind
    if k == "const":
        return f"const:{u.params[0]!r}"
    if k == "coord":
        return f"coord:{u.params[0]}"
    if k == "gauss":
        c, s = u.params
        return "gauss:" + ",".join(repr(v) for v in c) + f",{s!r}"
    if k == "cutoff":
        c, r, t = u.params
        return "cutoff:" + ",".join(repr(v) for v in c) + f",{r!r},{t!r}"
    if k == "sum":
        return f"sum:{field_spec(u.children[0])}+{field_spec(u.children[1])}"
    if k == "scale":
        return f"scale:{u.params[0]!r}*{field_spec(u.children[0])}"
    if k == "dilate":
        return f"dilate({u.params[0]!r}, {field_spec(u.children[0])})"
    if k == "offset":
        return f"offset({field_spec(u.children[0])}, {u.params[0]!r})"
    if k == "min":
        return f"min({field_spec(u.children[0])}, {u.params[0]!r})"
    raise ValueError(f"unknown field kind {k!r}")


# ---------------------------------------------------------------------------
# Luxemburg bisection on a frozen modular
# ---------------------------------------------------------------------------

def _luxemburg(modular, floor: float, rel_tol: float, guess: float) -> float:
    """inf{lambda > 0 : modular(lambda) <= 1} for a non-increasing modular.

    Returns lambda* with modular(lambda*) in [1 - rel_tol, 1 + rel_tol], or
    0.0 when the modular stays below 1 all the way down to the floor.
    """
    hi = max(guess, 2.0 * floor)
    m_hi = modular(hi)
    for _ in range(200):
        if m_hi <= 1.0:
            break
        hi *= 2.0
        m_hi = modular(hi)
    else:
        raise NotInSpaceError(
            "modular stayed above 1 after 200 doublings of lambda"
        )
    if m_hi >= 1.0 - rel_tol:
        return hi
    lo = hi / 2.0
    m_lo = modular(lo)
    while m_lo <= 1.0:
        if m_lo >= 1.0 - rel_tol:
            return lo
        hi, m_hi = lo, m_lo
        lo /= 2.0
        if lo < floor:
            return 0.0
        m_lo = modular(lo)
    # now modular(lo) > 1 >= modular(hi); geometric bisection
    for _ in range(500):
        mid = math.sqrt(lo * hi)
        m = modular(mid)
        if 1.0 - rel_tol <= m <= 1.0 + rel_tol:
            return mid
        if m > 1.0:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-14:
            return hi
    return hi


def _clipped_support(u: ScalarField, dom: Domain):
    sb = u.support_box
    if sb is None:
        return None
    lo, hi = dom.bbox
    if np.all(sb[0] <= lo) and np.all(sb[1] >= hi):
        return None  # support covers the whole domain: plain sampling
    return sb


@dataclass
class _PairContext:
    samples: PairSamples
    du: np.ndarray       # |u(x) - u(y)|
    t_pow: np.ndarray    # t^(-alpha)
    u_range: float


def _pair_context(u: ScalarField, dom: Domain, alpha: float,
                  spec: QuadratureSpec) -> _PairContext:
    ps = build_pair_samples(dom, spec, support=_clipped_support(u, dom))
    ux = u.eval(ps.x)
    uy = u.eval(ps.y)
    live = ps.w > 0
    if live.any():
        vals = np.concatenate([ux[live], uy[live]])
        u_range = float(vals.max() - vals.min())
    else:
        u_range = 0.0
    return _PairContext(ps, np.abs(ux - uy), ps.t ** (-alpha), u_range)


def _modular_of(ctx: _PairContext, f: YoungFunction, lam: float) -> float:
    with np.errstate(over="ignore", under="ignore"):
        vals = np.asarray(f(ctx.du * ctx.t_pow / lam), dtype=float)
    return ctx.samples.estimate(vals).value


def besov_modular(u: ScalarField, dom: Domain, f: YoungFunction, alpha: float,
                  lam: float, spec: QuadratureSpec) -> float:
    """Pair modular of u at scale lambda; deterministic under spec.seed."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    _check_alpha(alpha, dom.dim)
    ctx = _pair_context(u, dom, alpha, spec)
    return _modular_of(ctx, f, lam)


def _check_alpha(alpha: float, n: int) -> None:
    if not -n < alpha < 0:
        raise ValueError(f"alpha must lie in (-{n}, 0)")


def besov_seminorm(u: ScalarField, dom: Domain, f: YoungFunction, alpha: float,
                   spec: QuadratureSpec, rel_tol: float = 1e-4) -> float:
    """Luxemburg seminorm: inf{lambda : pair modular <= 1} on frozen samples.

    Constants (and any field with vanishing sampled increments) map to 0.
    Raises NotInSpaceError when the modular exceeds 1 for every lambda up to
    the expansion cap.
    """
    _check_alpha(alpha, dom.dim)
    ctx = _pair_context(u, dom, alpha, spec)
    prods = ctx.du * ctx.t_pow
    live = (ctx.samples.w > 0) & (prods > 0)
    if ctx.u_range == 0.0 or not live.any():
        return 0.0
    floor = SEMINORM_FLOOR_FRAC * ctx.u_range * dom.diam ** alpha
    guess = float(np.median(prods[live]))
    return _luxemburg(lambda lam: _modular_of(ctx, f, lam), floor, rel_tol, guess)


def gagliardo_seminorm(u: ScalarField, dom: Domain, s: float, p: float,
                       spec: QuadratureSpec) -> float:
    """Fractional Sobolev seminorm (iint |u(x)-u(y)|^p / |x-y|^(n+sp))^(1/p)."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if p < 1:
        raise ValueError("p must be >= 1")
    n = dom.dim
    ps = build_pair_samples(dom, spec, support=_clipped_support(u, dom))
    du = np.abs(u.eval(ps.x) - u.eval(ps.y))
    # F relative to the |x-y|^(-2n) kernel: |du|^p * t^(2n - (n + s p))
    vals = du ** p * ps.t ** (n - s * p)
    total = ps.estimate(vals).value
    return max(total, 0.0) ** (1.0 / p)


# ---------------------------------------------------------------------------
# domain modulars: Orlicz and Lebesgue norms, mean, median
# ---------------------------------------------------------------------------

def _domain_context(u: ScalarField, dom: Domain, spec: QuadratureSpec,
                    *, restrict: bool = True):
    region = _clipped_support(u, dom) if restrict else None
    ds = draw_domain_samples(dom, spec, region=region)
    return ds, u.eval(ds.points), region


def orlicz_norm(u: ScalarField, dom: Domain, f: YoungFunction,
                spec: QuadratureSpec, rel_tol: float = 1e-4) -> float:
    """Luxemburg norm inf{lambda : int phi(|u|/lambda) <= 1} on frozen samples.

    Fields with a support box are integrated over it only (phi(0) = 0 makes
    the restriction exact).
    """
    ds, vals, _ = _domain_context(u, dom, spec)
    absu = np.abs(vals)
    umax = float(absu[ds.inside].max(initial=0.0))
    if umax == 0.0:
        return 0.0

    def modular(lam: float) -> float:
        with np.errstate(over="ignore", under="ignore"):
            return ds.integrate(np.asarray(f(absu / lam), dtype=float)).value

    return _luxemburg(modular, SEMINORM_FLOOR_FRAC * umax, rel_tol, guess=umax)


def lebesgue_norm(u: ScalarField, dom: Domain, q: float, spec: QuadratureSpec,
                  *, shift: float = 0.0) -> float:
    """(int_Omega |u - shift|^q)^(1/q).

    For fields with a support box S the integral splits exactly into the
    part over S and |shift|^q * |Omega - S|, so concentrated fields are
    resolved by sampling S alone.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    ds, vals, region = _domain_context(u, dom, spec)
    if region is None:
        total = ds.integrate(np.abs(vals - shift) ** q).value
    else:
        inner = ds.integrate(np.abs(vals - shift) ** q).value
        s_measure = ds.measure().value
        omega = dom.exact_area
        if omega is None:
            omega = draw_domain_samples(dom, spec, tag=11).measure().value
        total = inner + abs(shift) ** q * max(omega - s_measure, 0.0)
    return max(total, 0.0) ** (1.0 / q)


def mean(u: ScalarField, dom: Domain, spec: QuadratureSpec) -> float:
    """Average of u over Omega."""
    ds, vals, region = _domain_context(u, dom, spec)
    if region is None:
        inside = ds.inside
        return float(vals[inside].mean()) if inside.any() else 0.0
    omega = dom.exact_area
    if omega is None:
        omega = draw_domain_samples(dom, spec, tag=11).measure().value
    return ds.integrate(vals).value / omega


def median(u: ScalarField, dom: Domain, spec: QuadratureSpec,
           *, n_points: int | None = None) -> float:
    """Sample median of u over rejection-sampled points of Omega."""
    total = n_points if n_points is not None else spec.n_outer * spec.n_radial
    pts = sample_in_domain(dom, total, _rng(spec.seed, 50))
    return float(np.quantile(u.eval(pts), 0.5))


# ---------------------------------------------------------------------------
# dyadic level sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelSetProfile:
    """Measures of the superlevel sets A_k = {u > 2^k} and their differences.

    Estimated from one frozen sample set, so a_k is exactly non-increasing
    and d_k = a_k - a_(k+1) is exactly non-negative.
    """

    k_lo: int
    k_hi: int
    a_k: tuple[float, ...]
    d_k: tuple[float, ...]
    domain_measure: float

    def weighted_sum(self, exponent: float) -> float:
        """sum_k a_k * 2^(k * exponent)."""
        ks = np.arange(self.k_lo, self.k_hi + 1)
        return float(np.sum(np.asarray(self.a_k) * np.exp2(ks * exponent)))


def level_sets(u: ScalarField, dom: Domain, k_lo: int, k_hi: int,
               spec: QuadratureSpec) -> LevelSetProfile:
    """Level-set profile of a nonnegative field from one frozen sample set."""
    if k_hi < k_lo:
        raise ValueError("need k_lo <= k_hi")
    ds = draw_domain_samples(dom, spec)
    vals = u.eval(ds.points)
    if float(vals[ds.inside].min(initial=0.0)) < 0:
        raise ValueError("level sets need u >= 0 on the domain")
    a = []
    for k in range(k_lo, k_hi + 2):
        a.append(ds.integrate((vals > 2.0 ** k).astype(float)).value)
    a = np.asarray(a)
    return LevelSetProfile(
        k_lo=k_lo,
        k_hi=k_hi,
        a_k=tuple(float(v) for v in a[:-1]),
        d_k=tuple(float(v) for v in a[:-1] - a[1:]),
        domain_measure=ds.measure().value,
    )
