"""Young-function algebra.

Parametric convex gauges phi (pure powers, power-log families, and their
convex combinations), numerical inversion, the two admissibility integrals

    Lambda_under(alpha) = sup_{x>0} int_0^1 phi(t^(1-alpha) x)/phi(x) dt/t^(n+1)
    Lambda_over(alpha)  = sup_{x>0} int_1^inf phi(t^(-alpha) x)/phi(x) dt/t^(n+1)

and the growth envelopes they imply.  The sup over x is taken on a fixed
121-point logarithmic grid in [1e-6, 1e6]; the attaining grid point is
reported and attainment at the grid boundary triggers a warning, since for
power-log families the true sup typically sits at a scale extreme.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .quadrature import integrate_weighted_1d

__all__ = [
    "YoungFunction",
    "AdmissibilityResult",
    "power",
    "powerlog",
    "convex_combine",
    "lambda_under",
    "lambda_over",
    "admissible",
    "parse_young",
    "young_spec",
    "growth_bound_violations",
    "tail_decay_profile",
    "SUP_GRID_MIN",
    "SUP_GRID_MAX",
    "SUP_GRID_POINTS",
]

SUP_GRID_MIN = 1e-6
SUP_GRID_MAX = 1e6
SUP_GRID_POINTS = 121


@dataclass(frozen=True)
class YoungFunction:
    """Evaluatable gauge phi with phi(0) = 0, strictly increasing to infinity.

    family is 'power' (t^p), 'powerlog' (t^p ln(1+t)^gamma) or 'mix'
    (convex combination of parts).  Convexity holds for p >= 1; smaller
    exponents are accepted because the admissibility window probes need
    them, but such gauges are not convex.
    """

    family: str
    p: float | None = None
    gamma: float | None = None
    parts: tuple[tuple[float, "YoungFunction"], ...] = field(default=())

    def __call__(self, t) -> np.ndarray | float:
        scalar = np.isscalar(t)
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise ValueError("Young functions are defined on t >= 0")
        with np.errstate(over="ignore", under="ignore"):
            if self.family == "power":
                out = arr ** self.p
            elif self.family == "powerlog":
                out = arr ** self.p * np.log1p(arr) ** self.gamma
            else:
                out = sum(w * np.asarray(f(arr), dtype=float) for w, f in self.parts)
        return float(out) if scalar else out

    def inverse(self, y: float, rel_tol: float = 1e-6) -> float:
        """t with |phi(t) - y| <= rel_tol * max(1, y), by bracket doubling + bisection."""
        if y < 0:
            raise ValueError("inverse needs y >= 0")
        if y == 0.0:
            return 0.0
        tol = rel_tol * max(1.0, y)
        lo, hi = 1.0, 1.0
        if self(1.0) < y:
            while self(hi) < y:
                hi *= 2.0
                if hi > 1e300:
                    raise RuntimeError("inverse bracket overflow")
            lo = hi / 2.0
        else:
            while self(lo) > y:
                lo /= 2.0
                if lo < 1e-300:
                    return 0.0
            hi = lo * 2.0
        for _ in range(400):
            mid = 0.5 * (lo + hi)
            v = self(mid)
            if abs(v - y) <= tol:
                return mid
            if v < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def power(p: float) -> YoungFunction:
    if p <= 0:
        raise ValueError("power exponent must be positive")
    return YoungFunction("power", p=float(p))


def powerlog(p: float, gamma: float) -> YoungFunction:
    if p <= 0:
        raise ValueError("power exponent must be positive")
    if gamma < 0:
        raise ValueError("log exponent must be >= 0")
    return YoungFunction("powerlog", p=float(p), gamma=float(gamma))


def convex_combine(parts) -> YoungFunction:
    """Pointwise convex combination; weights must be positive and sum to 1."""
    parts = tuple((float(w), f) for w, f in parts)
    if not parts:
        raise ValueError("convex combination needs at least one part")
    if any(w <= 0 for w, _ in parts):
        raise ValueError("weights must be positive")
    total = sum(w for w, _ in parts)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1 (got {total})")
    if any(not isinstance(f, YoungFunction) for _, f in parts):
        raise ValueError("parts must be YoungFunction instances")
    return YoungFunction("mix", parts=parts)


# ---------------------------------------------------------------------------
# spec strings: pow:<p> | powlog:<p>,<gamma> | mix:<w1>*<spec1>+<w2>*<spec2>
# ---------------------------------------------------------------------------

def parse_young(text: str) -> YoungFunction:
    head, sep, rest = text.partition(":")
    if not sep:
        raise ValueError(f"malformed gauge spec {text!r}: missing ':'")
    try:
        if head == "pow":
            return power(float(rest))
        if head == "powlog":
            p, g = (float(v) for v in rest.split(","))
            return powerlog(p, g)
        if head == "mix":
            parts = []
            for item in rest.split("+"):
                w_str, _, sub = item.partition("*")
                if not sub:
                    raise ValueError(f"mix part {item!r} needs <weight>*<spec>")
                if sub.startswith("mix:"):
                    raise ValueError("nested mix specs are not supported")
                parts.append((float(w_str), parse_young(sub)))
            return convex_combine(parts)
    except ValueError as exc:
        raise ValueError(f"malformed gauge spec {text!r}: {exc}") from None
    raise ValueError(f"unknown gauge kind {head!r} in {text!r}")


def young_spec(f: YoungFunction) -> str:
    if f.family == "power":
        return f"pow:{f.p!r}"
    if f.family == "powerlog":
        return f"powlog:{f.p!r},{f.gamma!r}"
    return "mix:" + "+".join(f"{w!r}*{young_spec(g)}" for w, g in f.parts)


# ---------------------------------------------------------------------------
# admissibility integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityResult:
    """Both scale integrals, the admissibility verdict, and sup witnesses.

    sup_witness_x holds the grid points attaining (Lambda_under,
    Lambda_over); boundary_attained flags whether each witness sits at the
    edge of the x-grid (the reported sup is then a lower bound for the
    true one).
    """

    lambda_under: float
    lambda_over: float
    admissible: bool
    sup_witness_x: tuple[float, float]
    boundary_attained: tuple[bool, bool]


def _x_grid() -> np.ndarray:
    return np.exp(np.linspace(math.log(SUP_GRID_MIN), math.log(SUP_GRID_MAX),
                              SUP_GRID_POINTS))


def _check_args(alpha: float, n: int) -> None:
    if n < 2:
        raise ValueError("dimension must be >= 2")
    if not -n < alpha < 0:
        raise ValueError(f"alpha must lie in (-{n}, 0)")


def _scale_scan(f: YoungFunction, alpha: float, n: int, which: str
                ) -> tuple[float, float, bool]:
    """Grid sup of the inner integral; returns (sup, witness_x, boundary_flag)."""
    xs = _x_grid()
    vals = np.empty(len(xs))
    for i, x in enumerate(xs):
        fx = f(x)
        if which == "under":
            def g(t, x=x, fx=fx):
                return np.asarray(f(t ** (1.0 - alpha) * x), dtype=float) / fx
            vals[i] = integrate_weighted_1d(g, (0.0, 1.0), n)
        else:
            def g(t, x=x, fx=fx):
                return np.asarray(f(t ** (-alpha) * x), dtype=float) / fx
            vals[i] = integrate_weighted_1d(g, (1.0, math.inf), n)
        if math.isinf(vals[i]):
            return math.inf, float(x), False
    idx = int(np.argmax(vals))
    spread = bool(vals.max() > vals.min() * (1.0 + 1e-6))
    boundary = spread and idx in (0, len(xs) - 1)
    if boundary:
        warnings.warn(
            f"Lambda_{which} sup attained at the x-grid boundary x={xs[idx]:.3g}; "
            "the true sup over x > 0 may be larger",
            stacklevel=3,
        )
    return float(vals[idx]), float(xs[idx]), boundary


def lambda_under(f: YoungFunction, alpha: float, n: int) -> float:
    """sup_x int_0^1 phi(t^(1-alpha) x)/phi(x) dt/t^(n+1); math.inf on divergence."""
    _check_args(alpha, n)
    return _scale_scan(f, alpha, n, "under")[0]


def lambda_over(f: YoungFunction, alpha: float, n: int) -> float:
    """sup_x int_1^inf phi(t^(-alpha) x)/phi(x) dt/t^(n+1); math.inf on divergence."""
    _check_args(alpha, n)
    return _scale_scan(f, alpha, n, "over")[0]


def admissible(f: YoungFunction, alpha: float, n: int) -> AdmissibilityResult:
    """Bundle of both scale integrals; admissible iff both are finite."""
    _check_args(alpha, n)
    lu, wu, bu = _scale_scan(f, alpha, n, "under")
    lo, wo, bo = _scale_scan(f, alpha, n, "over")
    return AdmissibilityResult(
        lambda_under=lu,
        lambda_over=lo,
        admissible=math.isfinite(lu) and math.isfinite(lo),
        sup_witness_x=(wu, wo),
        boundary_attained=(bu, bo),
    )


# ---------------------------------------------------------------------------
# growth envelopes implied by the admissibility integrals
# ---------------------------------------------------------------------------

def growth_bound_violations(
    f: YoungFunction,
    alpha: float,
    n: int,
    n_samples: int,
    seed: int,
    *,
    lam_under: float | None = None,
    lam_over: float | None = None,
    slack: float = 1e-9,
) -> tuple[int, list[tuple[str, float, float]]]:
    """Sampled check of the two growth envelopes.

    For admissible phi:
      shrink side: phi(x s) <= 2^(2n) * Lambda_under * phi(2^(1-alpha) x) * s^(n/(1-alpha))
                   for 0 < s <= 1,
      stretch side: phi(x s) <= 2^(3n) * Lambda_over * phi(x) * s^(-n/alpha)
                   for s >= 1,
    with x sampled log-uniform in [1e-3, 1e3].  Returns the violation count
    and up to 10 witnesses (side, x, s).
    """
    _check_args(alpha, n)
    lu = lam_under if lam_under is not None else lambda_under(f, alpha, n)
    lo = lam_over if lam_over is not None else lambda_over(f, alpha, n)
    if not (math.isfinite(lu) and math.isfinite(lo)):
        raise ValueError("growth envelopes need an admissible gauge (finite integrals)")
    rng = np.random.default_rng(seed)
    m = n_samples
    x = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), size=m))
    s_shrink = np.exp(rng.uniform(math.log(1e-4), 0.0, size=m))
    s_stretch = np.exp(rng.uniform(0.0, math.log(1e4), size=m))
    witnesses: list[tuple[str, float, float]] = []
    lhs = np.asarray(f(x * s_shrink), dtype=float)
    rhs = (2.0 ** (2 * n) * lu * np.asarray(f(2.0 ** (1.0 - alpha) * x), dtype=float)
           * s_shrink ** (n / (1.0 - alpha)))
    bad_shrink = lhs > rhs * (1.0 + slack)
    lhs2 = np.asarray(f(x * s_stretch), dtype=float)
    rhs2 = (2.0 ** (3 * n) * lo * np.asarray(f(x), dtype=float)
            * s_stretch ** (-n / alpha))
    bad_stretch = lhs2 > rhs2 * (1.0 + slack)
    for i in np.flatnonzero(bad_shrink)[:5]:
        witnesses.append(("shrink", float(x[i]), float(s_shrink[i])))
    for i in np.flatnonzero(bad_stretch)[:5]:
        witnesses.append(("stretch", float(x[i]), float(s_stretch[i])))
    return int(bad_shrink.sum() + bad_stretch.sum()), witnesses


def tail_decay_profile(f: YoungFunction, alpha: float, n: int, x: float,
                       s_grid: np.ndarray) -> np.ndarray:
    """phi(x s^(-alpha)) s^(-n) on a grid; tends to 0 for admissible gauges."""
    _check_args(alpha, n)
    s = np.asarray(s_grid, dtype=float)
    return np.asarray(f(x * s ** (-alpha)), dtype=float) * s ** (-float(n))
