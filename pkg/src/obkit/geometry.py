"""Bounded planar domains and measure-density machinery.

A Domain is an indicator plus a bounding box, a diameter, and (where a
closed form exists) an exact area.  On top of that sit estimates of
|B(x,r) cap Omega|, the local density |B(x,r) cap Omega| / r^n, the sampled
measure-density constant theta, measure-halving dyadic radii, and the
annulus non-emptiness check used by the geometric kernel inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .quadrature import (
    MeasureEstimate,
    QuadratureSpec,
    _rng,
    sample_in_domain,
    unit_ball_volume,
)

__all__ = [
    "Domain",
    "ball",
    "box",
    "cusp",
    "polygon",
    "parse_domain",
    "domain_spec",
    "measure_ball_intersection",
    "local_density",
    "regularity_constant",
    "dyadic_radii",
    "annulus_nonempty",
]


@dataclass(frozen=True)
class Domain:
    """Bounded region of R^n given by an indicator, a bbox and a diameter.

    kind is one of ball/box/cusp/polygon; params is the canonical parameter
    tuple, so equality and spec-string round-trips are structural.
    """

    kind: str
    params: tuple

    @cached_property
    def dim(self) -> int:
        if self.kind == "ball":
            return len(self.params[0])
        if self.kind == "box":
            return len(self.params[0])
        return 2

    @cached_property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "ball":
            c = np.asarray(self.params[0], dtype=float)
            r = float(self.params[1])
            return c - r, c + r
        if self.kind == "box":
            return (np.asarray(self.params[0], dtype=float),
                    np.asarray(self.params[1], dtype=float))
        if self.kind == "cusp":
            return np.array([0.0, -1.0]), np.array([1.0, 1.0])
        verts = np.asarray(self.params[0], dtype=float)
        return verts.min(axis=0), verts.max(axis=0)

    @cached_property
    def diam(self) -> float:
        if self.kind == "ball":
            return 2.0 * float(self.params[1])
        if self.kind == "box":
            lo, hi = self.bbox
            return float(np.linalg.norm(hi - lo))
        if self.kind == "cusp":
            # farthest pair in the closure: (1, 1) and (1, -1)
            return 2.0
        verts = np.asarray(self.params[0], dtype=float)
        d2 = ((verts[:, None, :] - verts[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))

    @cached_property
    def exact_area(self) -> float | None:
        if self.kind == "ball":
            r = float(self.params[1])
            return unit_ball_volume(self.dim) * r ** self.dim
        if self.kind == "box":
            lo, hi = self.bbox
            return float(np.prod(hi - lo))
        if self.kind == "cusp":
            g = float(self.params[0])
            return 2.0 / (g + 1.0)
        verts = np.asarray(self.params[0], dtype=float)
        x, y = verts[:, 0], verts[:, 1]
        return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "ball":
            c = np.asarray(self.params[0], dtype=float)
            r = float(self.params[1])
            return ((pts - c) ** 2).sum(axis=1) <= r * r
        if self.kind == "box":
            lo, hi = self.bbox
            return np.all((pts >= lo) & (pts <= hi), axis=1)
        if self.kind == "cusp":
            g = float(self.params[0])
            x1, x2 = pts[:, 0], pts[:, 1]
            ok = (x1 > 0.0) & (x1 < 1.0)
            out = np.zeros(len(pts), dtype=bool)
            out[ok] = np.abs(x2[ok]) < x1[ok] ** g
            return out
        return _polygon_contains(np.asarray(self.params[0], dtype=float), pts)


def _polygon_contains(verts: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd crossing rule, vectorized over pts."""
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    nv = len(verts)
    for i in range(nv):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % nv]
        crosses = (y1 > y) != (y2 > y)
        if not crosses.any():
            continue
        x_at = (x2 - x1) * (y - y1) / (y2 - y1) + x1
        inside ^= crosses & (x < x_at)
    return inside


def ball(center, radius: float) -> Domain:
    if radius <= 0:
        raise ValueError("ball radius must be positive")
    return Domain("ball", (tuple(float(c) for c in center), float(radius)))


def box(lo, hi) -> Domain:
    lo_t = tuple(float(v) for v in lo)
    hi_t = tuple(float(v) for v in hi)
    if len(lo_t) != len(hi_t) or any(a >= b for a, b in zip(lo_t, hi_t)):
        raise ValueError("box needs lo < hi componentwise")
    return Domain("box", (lo_t, hi_t))


def cusp(gamma: float) -> Domain:
    """Planar spike {0 < x1 < 1, |x2| < x1^gamma}; violates measure density at the tip."""
    if gamma <= 1:
        raise ValueError("cusp exponent must exceed 1")
    return Domain("cusp", (float(gamma),))


def polygon(vertices) -> Domain:
    verts = tuple(tuple(float(c) for c in v) for v in vertices)
    if len(verts) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    return Domain("polygon", (verts,))


# ---------------------------------------------------------------------------
# spec strings: ball:<cx>,<cy>,<R> | box:<x0>,<y0>,<x1>,<y1> | cusp:<g> | poly:...
# ---------------------------------------------------------------------------

def parse_domain(text: str) -> Domain:
    head, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"malformed domain spec {text!r}: missing ':'")
    try:
        if head == "ball":
            cx, cy, r = (float(v) for v in rest.split(","))
            return ball((cx, cy), r)
        if head == "box":
            x0, y0, x1, y1 = (float(v) for v in rest.split(","))
            return box((x0, y0), (x1, y1))
        if head == "cusp":
            return cusp(float(rest))
        if head == "poly":
            verts = [tuple(float(v) for v in pair.split(",")) for pair in rest.split(";")]
            return polygon(verts)
    except ValueError as exc:
        raise ValueError(f"malformed domain spec {text!r}: {exc}") from None
    raise ValueError(f"unknown domain kind {head!r} in {text!r}")


def domain_spec(dom: Domain) -> str:
    if dom.kind == "ball":
        c, r = dom.params
        return "ball:" + ",".join(repr(v) for v in c) + f",{r!r}"
    if dom.kind == "box":
        lo, hi = dom.params
        return "box:" + ",".join(repr(v) for v in (*lo, *hi))
    if dom.kind == "cusp":
        return f"cusp:{dom.params[0]!r}"
    return "poly:" + ";".join(f"{x!r},{y!r}" for x, y in dom.params[0])


# ---------------------------------------------------------------------------
# measures and densities
# ---------------------------------------------------------------------------

def _ball_cloud(center: np.ndarray, r: float, n_points: int, dim: int,
                rng: np.random.Generator, n_strata: int | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Uniform points in B(center, r), radially stratified into equal-volume shells.

    Returns (points, distances).  Distances are exact by construction.
    """
    k = n_strata if n_strata is not None else max(8, min(512, int(math.sqrt(n_points))))
    m = max(1, n_points // k)
    u = (np.arange(k)[:, None] + rng.uniform(size=(k, m))) / k
    rad = r * u ** (1.0 / dim)
    g = rng.standard_normal(size=(k, m, dim))
    omega = g / np.linalg.norm(g, axis=2, keepdims=True)
    pts = center[None, None, :] + rad[:, :, None] * omega
    return pts.reshape(-1, dim), rad.reshape(-1)


def measure_ball_intersection(
    dom: Domain,
    center,
    r: float,
    spec: QuadratureSpec,
    *,
    n_points: int | None = None,
) -> MeasureEstimate:
    """Unbiased stratified estimate of |B(center, r) cap Omega|."""
    if r <= 0:
        raise ValueError("radius must be positive")
    center = np.asarray(center, dtype=float)
    dim = dom.dim
    total = n_points if n_points is not None else spec.n_outer * spec.n_radial
    rng = _rng(spec.seed, 40)
    k = max(8, min(512, int(math.sqrt(total))))
    m = max(2, total // k)
    pts, _ = _ball_cloud(center, r, k * m, dim, rng, n_strata=k)
    ind = dom.contains(pts).astype(float).reshape(k, m)
    vol = unit_ball_volume(dim) * r ** dim
    mean = float(ind.mean())
    var = float(ind.var(axis=1, ddof=1).mean()) / (k * m)
    return MeasureEstimate(value=vol * mean, std_err=vol * math.sqrt(max(var, 0.0)),
                           samples=k * m, seed=spec.seed)


def local_density(dom: Domain, x, r: float, spec: QuadratureSpec,
                  *, n_points: int | None = None) -> float:
    """|B(x, r) cap Omega| / r^n for x in Omega and 0 < r < 2 diam."""
    x = np.asarray(x, dtype=float)
    if not dom.contains(x[None, :])[0]:
        raise ValueError(f"center {x.tolist()} is not in the domain")
    if not 0 < r <= 2.0 * dom.diam:
        raise ValueError("need 0 < r <= 2*diam")
    est = measure_ball_intersection(dom, x, r, spec, n_points=n_points)
    return est.value / r ** dom.dim


def regularity_constant(
    dom: Domain,
    n_centers: int,
    n_radii: int,
    spec: QuadratureSpec,
    *,
    r_min: float | None = None,
    extra_centers=None,
    n_points_per_pair: int | None = None,
) -> tuple[float, tuple[np.ndarray, float]]:
    """Sampled measure-density constant and its minimizing witness.

    theta_hat = min over rejection-sampled centers x in Omega and log-spaced
    radii r in (r_min, 2 diam) of |B(x,r) cap Omega| / r^n.  The sampled
    minimum is an upper bound on the true constant; the witness (x, r) makes
    runs auditable.  extra_centers lets callers probe known thin spots.
    """
    if n_centers < 1 or n_radii < 1:
        raise ValueError("counts must be >= 1")
    rng = _rng(spec.seed, 41)
    centers = sample_in_domain(dom, n_centers, rng)
    if extra_centers is not None:
        extra = np.atleast_2d(np.asarray(extra_centers, dtype=float))
        if not dom.contains(extra).all():
            raise ValueError("extra_centers must lie in the domain")
        centers = np.concatenate([centers, extra])
    lo = r_min if r_min is not None else dom.diam / 512.0
    hi = 2.0 * dom.diam * (1.0 - 1e-9)
    radii = np.exp(np.linspace(math.log(lo), math.log(hi), n_radii))
    n_pts = n_points_per_pair if n_points_per_pair is not None else 8192
    best = math.inf
    witness: tuple[np.ndarray, float] = (centers[0], radii[0])
    # common random numbers across all (center, radius) pairs: the sampled
    # minimum then carries a single estimate's noise, not the extreme of
    # n_centers*n_radii independent fluctuations
    for c in centers:
        for r in radii:
            est = measure_ball_intersection(dom, c, r, spec, n_points=n_pts)
            dens = est.value / r ** dom.dim
            if dens < best:
                best = dens
                witness = (c.copy(), float(r))
    return best, witness


def dyadic_radii(
    dom: Domain,
    z,
    r: float,
    J: int,
    spec: QuadratureSpec,
    *,
    n_points: int | None = None,
) -> list[float]:
    """Radii b_0 = 1 > b_1 > ... > b_J with |B(z, b_j r) cap Omega| = 2^-j |B(z,r) cap Omega|.

    The measure map is evaluated on one frozen point cloud in B(z, r), making
    it exactly monotone in b; each b_j is found by bisection against the
    halved target count.
    """
    z = np.asarray(z, dtype=float)
    if not dom.contains(z[None, :])[0]:
        raise ValueError("center must lie in the domain")
    if not 0 < r < dom.diam / 2.0:
        raise ValueError("need 0 < r < diam/2")
    if J < 0:
        raise ValueError("J must be >= 0")
    total = n_points if n_points is not None else spec.n_outer * spec.n_radial
    rng = _rng(spec.seed, 42)
    pts, dist = _ball_cloud(z, r, total, dom.dim, rng)
    dist_in = np.sort(dist[dom.contains(pts)])
    m_full = dist_in.size
    if m_full / 2.0 ** J < 100:
        raise RuntimeError(
            f"only {m_full} in-domain points for {J} halvings; increase samples"
        )
    out = [1.0]
    for j in range(1, J + 1):
        target = m_full / 2.0 ** j
        lo_b, hi_b = 0.0, 1.0
        # monotone step function of b: count of frozen distances <= b*r
        for _ in range(60):
            mid = 0.5 * (lo_b + hi_b)
            if np.searchsorted(dist_in, mid * r, side="right") >= target:
                hi_b = mid
            else:
                lo_b = mid
        out.append(hi_b)
    return out


def annulus_nonempty(
    dom: Domain,
    theta: float,
    z,
    s: float,
    spec: QuadratureSpec,
    *,
    n_points: int | None = None,
) -> bool:
    """Whether Omega meets the annulus B(z, kappa*s) minus B(z, s).

    kappa = (2 omega_n / theta)^(1/n) + 2; on a domain with measure-density
    constant theta this must hold for every z in Omega and s < (2/kappa) diam.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must be in (0, 1)")
    z = np.asarray(z, dtype=float)
    n = dom.dim
    kappa = (2.0 * unit_ball_volume(n) / theta) ** (1.0 / n) + 2.0
    if not 0 < s < (2.0 / kappa) * dom.diam:
        raise ValueError("need 0 < s < (2/kappa)*diam")
    total = n_points if n_points is not None else spec.n_outer * spec.n_radial
    rng = _rng(spec.seed, 43)
    u = rng.uniform(s ** n, (kappa * s) ** n, size=total)
    rad = u ** (1.0 / n)
    g = rng.standard_normal(size=(total, n))
    omega = g / np.linalg.norm(g, axis=1, keepdims=True)
    pts = z[None, :] + rad[:, None] * omega
    return bool(dom.contains(pts).any())
