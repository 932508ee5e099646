"""Domains, ball-intersection measures, density constants, dyadic radii."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from obkit.geometry import (
    annulus_nonempty,
    ball,
    box,
    cusp,
    domain_spec,
    dyadic_radii,
    local_density,
    measure_ball_intersection,
    parse_domain,
    polygon,
    regularity_constant,
)
from obkit.quadrature import QuadratureSpec, unit_ball_volume

LENS_AREA_UNIT_CIRCLES_D1 = 2.0 * math.pi / 3.0 - math.sqrt(3.0) / 2.0  # ~1.2284


def test_domain_metadata(unit_ball, unit_box, spike):
    assert unit_ball.diam == 2.0
    assert unit_ball.exact_area == pytest.approx(math.pi)
    assert unit_box.diam == pytest.approx(math.sqrt(2.0))
    assert unit_box.exact_area == 1.0
    assert spike.diam == 2.0
    assert spike.exact_area == pytest.approx(2.0 / 3.0)


def test_indicator_implies_bbox(unit_ball, unit_box, spike):
    rng = np.random.default_rng(1)
    pts = rng.uniform(-3, 3, size=(4000, 2))
    for dom in (unit_ball, unit_box, spike):
        lo, hi = dom.bbox
        inside = dom.contains(pts)
        assert np.all((pts[inside] >= lo) & (pts[inside] <= hi))


def test_polygon_square_matches_box(unit_box):
    poly = polygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert poly.exact_area == pytest.approx(1.0)
    assert poly.diam == pytest.approx(math.sqrt(2.0))
    rng = np.random.default_rng(2)
    pts = rng.uniform(-0.5, 1.5, size=(4000, 2))
    assert (poly.contains(pts) == unit_box.contains(pts)).mean() > 0.999


def test_cusp_contains_tip_geometry(spike):
    assert spike.contains(np.array([[0.5, 0.2], [0.5, 0.26], [0.0, 0.0],
                                    [1.0, 0.5], [0.9, -0.5]])).tolist() == \
        [True, False, False, False, True]


# --- ball intersection measures -------------------------------------------

def test_measure_contained_ball(unit_ball, spec):
    est = measure_ball_intersection(unit_ball, (0, 0), 2.0, spec)
    assert abs(est.value - math.pi) <= max(4 * est.std_err, 1e-3)


def test_measure_concentric_disc(unit_ball, spec):
    est = measure_ball_intersection(unit_ball, (0, 0), 0.5, spec)
    assert est.value == pytest.approx(math.pi / 4, abs=4 * est.std_err + 1e-9)


def test_measure_lens(unit_ball, spec):
    est = measure_ball_intersection(unit_ball, (1.0, 0.0), 1.0, spec)
    assert abs(est.value - LENS_AREA_UNIT_CIRCLES_D1) <= 4 * est.std_err


def test_measure_deterministic(unit_ball, spec):
    a = measure_ball_intersection(unit_ball, (1.0, 0.0), 1.0, spec)
    b = measure_ball_intersection(unit_ball, (1.0, 0.0), 1.0, spec)
    assert a.value == b.value


# --- local density ----------------------------------------------------------

def test_density_full_disc(unit_ball, spec):
    assert local_density(unit_ball, (0, 0), 1.0, spec) == pytest.approx(math.pi, rel=0.01)


def test_density_boundary_big_radius(unit_ball, spec):
    assert local_density(unit_ball, (1.0, 0.0), 4.0, spec) == pytest.approx(
        math.pi / 16, rel=0.01)


def test_density_requires_interior_center(unit_ball, spec):
    with pytest.raises(ValueError):
        local_density(unit_ball, (2.0, 0.0), 1.0, spec)


def test_density_never_exceeds_disc_ratio(unit_ball, unit_box, spike, spec):
    rng = np.random.default_rng(3)
    for dom in (unit_ball, unit_box, spike):
        from obkit.quadrature import sample_in_domain
        pts = sample_in_domain(dom, 10, rng)
        for x in pts:
            r = rng.uniform(0.05, 1.5) * dom.diam
            d = local_density(dom, x, r, spec, n_points=20000)
            assert d <= unit_ball_volume(2) * 1.02


def test_cusp_tip_density_bracket(spike, spec):
    # strip integral bounds: density at ((eps,0), r=eps) is between 2.1*eps
    # and 5.4*eps for gamma = 2
    eps = 0.01
    d = local_density(spike, (eps, 0.0), eps, spec, n_points=2000000)
    assert 2.1 * eps <= d <= 5.4 * eps


def test_cusp_density_decay_slope(spike):
    eps_list = [2.0 ** -k for k in range(4, 10)]
    dens = [local_density(spike, (e, 0.0), e, QuadratureSpec(seed=11 + k),
                          n_points=400000)
            for k, e in enumerate(eps_list)]
    slope = np.polyfit(np.log(eps_list), np.log(dens), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.15)  # gamma - 1


# --- sampled measure-density constant ---------------------------------------

def test_theta_ball(unit_ball, spec):
    theta, (wx, wr) = regularity_constant(unit_ball, 48, 24, spec,
                                          n_points_per_pair=16384)
    assert theta == pytest.approx(math.pi / 16, rel=0.10)
    assert wr > 3.0  # worst case is the top of the radius range
    assert unit_ball.contains(wx[None, :])[0]


def test_theta_box(unit_box, spec):
    theta, _ = regularity_constant(unit_box, 48, 24, spec,
                                   n_points_per_pair=16384)
    assert theta == pytest.approx(1.0 / 8.0, rel=0.15)


def test_theta_cusp_small_and_shrinking(spike, spec):
    theta, _ = regularity_constant(spike, 48, 24, spec)
    assert theta <= 0.05
    # probing the tip exhibits the density decay as r_min shrinks
    tips = np.array([[2.0 ** -k, 0.0] for k in range(4, 9)])
    t_coarse, _ = regularity_constant(spike, 4, 16, spec, extra_centers=tips,
                                      r_min=spike.diam / 128)
    t_fine, _ = regularity_constant(spike, 4, 16, spec, extra_centers=tips,
                                    r_min=spike.diam / 2048)
    assert t_fine < t_coarse


def test_theta_scale_invariance(spec):
    t1, _ = regularity_constant(ball((0, 0), 1.0), 32, 16, spec)
    t2, _ = regularity_constant(ball((3, -2), 5.0), 32, 16, spec)
    assert abs(t1 - t2) / t1 <= 0.10


# --- dyadic radii -------------------------------------------------------------

def test_dyadic_ball_halving(unit_ball, spec):
    bs = dyadic_radii(unit_ball, (0, 0), 0.5, 3, spec)
    for j, b in enumerate(bs):
        assert b == pytest.approx(2.0 ** (-j / 2.0), rel=0.01)


def test_dyadic_trivial_level(unit_ball, spec):
    assert dyadic_radii(unit_ball, (0, 0), 0.5, 0, spec) == [1.0]


def test_dyadic_box_corner(unit_box, spec):
    bs = dyadic_radii(unit_box, (0, 0), 0.5, 2, spec)
    for j, b in enumerate(bs):
        assert b == pytest.approx(2.0 ** (-j / 2.0), rel=0.01)


def test_dyadic_measures_halve(unit_ball, spec):
    bs = dyadic_radii(unit_ball, (0.3, 0.2), 0.4, 3, spec)
    prev = None
    for b in bs:
        est = measure_ball_intersection(unit_ball, (0.3, 0.2), b * 0.4, spec,
                                        n_points=400000)
        if prev is not None:
            assert est.value / prev == pytest.approx(0.5, abs=0.01)
        prev = est.value
    assert bs == sorted(bs, reverse=True)


def test_dyadic_needs_enough_samples(unit_ball):
    tiny = QuadratureSpec(seed=1, n_outer=16, n_radial=8)
    with pytest.raises(RuntimeError, match="increase samples"):
        dyadic_radii(unit_ball, (0, 0), 0.5, 3, tiny, n_points=128)


def test_dyadic_validates_inputs(unit_ball, spec):
    with pytest.raises(ValueError):
        dyadic_radii(unit_ball, (0, 0), 1.5, 2, spec)  # r >= diam/2
    with pytest.raises(ValueError):
        dyadic_radii(unit_ball, (5, 5), 0.5, 2, spec)  # center outside


# --- annulus non-emptiness -----------------------------------------------------

def test_annulus_near_boundary(unit_ball, spec):
    assert annulus_nonempty(unit_ball, 0.19, (0.9, 0.0), 0.05, spec)


def test_annulus_everywhere_on_ball(unit_ball, spec):
    rng = np.random.default_rng(8)
    kappa = (2 * math.pi / 0.19) ** 0.5 + 2
    for _ in range(20):
        z = rng.uniform(-0.7, 0.7, size=2)
        if not unit_ball.contains(z[None, :])[0]:
            continue
        s = rng.uniform(0.01, 1.9 / kappa * unit_ball.diam)
        assert annulus_nonempty(unit_ball, 0.19, z, s, spec)


def test_annulus_on_box(unit_box, spec):
    assert annulus_nonempty(unit_box, 0.12, (0.5, 0.5), 0.05, spec)
    assert annulus_nonempty(unit_box, 0.12, (0.05, 0.05), 0.1, spec)


def test_annulus_validates_range(unit_ball, spec):
    with pytest.raises(ValueError):
        annulus_nonempty(unit_ball, 0.19, (0, 0), 1.5, spec)


# --- spec strings ---------------------------------------------------------------

@pytest.mark.parametrize("text", [
    "ball:0.0,0.0,1.0", "ball:-1.5,2.25,0.75", "box:0.0,0.0,1.0,1.0",
    "cusp:2.0", "poly:0.0,0.0;1.0,0.0;0.5,1.0",
])
def test_domain_spec_round_trip(text):
    dom = parse_domain(text)
    assert parse_domain(domain_spec(dom)) == dom


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5),
       st.floats(min_value=0.1, max_value=10))
@settings(max_examples=100)
def test_ball_spec_round_trip_generated(cx, cy, r):
    dom = ball((cx, cy), r)
    assert parse_domain(domain_spec(dom)) == dom


@pytest.mark.parametrize("bad", ["ball:1,2", "box:1,2,3", "cusp:0.5",
                                 "poly:0,0;1,1", "disk:0,0,1", "ball"])
def test_domain_spec_rejects_malformed(bad):
    with pytest.raises(ValueError):
        parse_domain(bad)
