import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_diffusion.core import (DensityField, DomainError, Grid1D, Indicator, PowerTail, ScaledSine,
                                     SelfSimilarSeed, Tabulated, analytic_moments, ic_from_json, ic_to_json,
                                     moments, sample_ic, trapezoid)


def test_grid_nodes_and_spacing():
    g = Grid1D(4.0, 5)
    assert np.array_equal(g.nodes, [0, 1, 2, 3, 4])
    assert g.spacing == 1.0
    assert Grid1D.from_spacing(400.0, 0.2).node_count == 2001
    with pytest.raises(DomainError):
        Grid1D(1.0, 1)
    with pytest.raises(DomainError):
        Grid1D(-1.0, 10)


def test_sample_indicator_closed_interval():
    f = sample_ic(Indicator(1, 2), Grid1D(4.0, 5))
    assert np.array_equal(f.values, [0, 1, 1, 0, 0])


def test_sample_scaled_sine_midpoint():
    g = Grid1D(math.pi, 101)
    f = sample_ic(ScaledSine(2.0), g)
    assert f.values[50] == pytest.approx(1.0, abs=1e-15)


def test_sample_zero_tabulated():
    g = Grid1D(1.0, 6)
    f = sample_ic(Tabulated((0.0,) * 6), g)
    assert np.all(f.values == 0)
    with pytest.raises(DomainError):
        sample_ic(Tabulated((0.0,) * 5), g)


def test_moments_of_zero_field():
    rec = moments(DensityField(Grid1D(1.0, 11), np.zeros(11), 0.0))
    assert (rec.mass, rec.m1, rec.m2, rec.supnorm) == (0, 0, 0, 0)


def test_moments_indicator_fine_grid():
    rec = moments(sample_ic(Indicator(1, 2), Grid1D.from_spacing(4.0, 1e-4)))
    # pointwise sampling of a jump costs one edge cell
    assert abs(rec.mass - 1) <= 2e-4
    assert abs(rec.m1 - 1.5) <= 2 * 1e-4 * 2
    assert abs(rec.m2 - 7 / 3) <= 2 * 1e-4 * 4


def test_moments_sine_mass():
    rec = moments(sample_ic(ScaledSine(2.0), Grid1D(math.pi, 2001)))
    assert rec.mass == pytest.approx(2.0, rel=1e-6)


def test_trapezoid_second_order_on_smooth_data():
    errs = []
    for n in (101, 201, 401):
        rec = moments(sample_ic(ScaledSine(2.0), Grid1D(math.pi, n)))
        errs.append(abs(rec.mass - 2.0))
    assert errs[0] / errs[1] >= 3.5 and errs[1] / errs[2] >= 3.5


def test_sampled_moments_vs_analytic_edge_budget():
    ic = Indicator(1, 2)
    exact = analytic_moments(ic)
    for dx in (0.1, 0.05, 0.01):
        rec = moments(sample_ic(ic, Grid1D.from_spacing(4.0, dx)))
        assert abs(rec.mass - exact.mass) <= 2 * dx * exact.supnorm + 1e-12


def test_analytic_moments_known_values():
    r = analytic_moments(Indicator(1, 2))
    assert (r.mass, r.m1) == (1, 1.5) and r.m2 == pytest.approx(7 / 3)
    r = analytic_moments(ScaledSine(2.0))
    assert r.mass == 2 and r.m1 == pytest.approx(math.pi)
    r = analytic_moments(PowerTail(1.5))
    assert math.isinf(r.m1) and r.mass == pytest.approx(1 / (1.5 * 0.5))
    assert analytic_moments(Tabulated((0.0, 1.0))) is None


def test_self_similar_seed_moments_match_quadrature():
    ic = SelfSimilarSeed(1.5, 2.0)
    exact = analytic_moments(ic)
    rec = moments(sample_ic(ic, Grid1D.from_spacing(80.0, 1e-3)))
    # trapezoid endpoint term dx^2 u'(0) / 12 is about 1e-8
    assert rec.mass == pytest.approx(exact.mass, rel=1e-7)
    assert rec.m1 == pytest.approx(exact.m1, rel=1e-8)
    assert rec.m2 == pytest.approx(exact.m2, rel=1e-8)
    assert rec.supnorm == pytest.approx(exact.supnorm, rel=1e-6)


def test_power_tail_range_checked():
    for bad in (1.0, 2.0, 0.5):
        with pytest.raises(DomainError):
            PowerTail(bad)


def test_density_field_validation():
    g = Grid1D(1.0, 3)
    with pytest.raises(DomainError):
        DensityField(g, np.array([0.0, -1.0, 0.0]), 0.0)
    with pytest.raises(DomainError):
        DensityField(g, np.array([1.0, 1.0, 0.0]), 1.0)
    with pytest.raises(DomainError):
        DensityField(g, np.zeros(4), 0.0)
    f = DensityField(g, np.array([0.0, 1.0, 0.0]), 1.0)
    with pytest.raises(ValueError):
        f.values[1] = 2.0


def test_tabulated_support_trims_zero_tails():
    ic = Tabulated((0, 0, 1, 1, 0, 0), (0, 1, 2, 3, 4, 5))
    assert ic.support == (1.0, 4.0)
    assert ic.breakpoints == (2.0, 3.0)


@pytest.mark.parametrize("ic", [Indicator(1, 2, 0.5), ScaledSine(3.0), PowerTail(1.25),
                                SelfSimilarSeed(1.5, 1.0), Tabulated((0.0, 1.0, 0.0), (0.0, 1.0, 2.0))])
def test_json_round_trip(ic):
    text = json.dumps(ic_to_json(ic))
    assert ic_from_json(text) == ic


def test_json_errors():
    with pytest.raises(DomainError):
        ic_from_json({"params": {}})
    with pytest.raises(DomainError):
        ic_from_json({"variant": "Nope"})
    with pytest.raises(DomainError):
        ic_from_json({"variant": "Indicator", "params": {"lo": 1}})


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=2, max_size=40), st.floats(0.01, 2.0))
def test_trapezoid_is_linear_and_nonnegative(vals, dx):
    y = np.array(vals)
    assert trapezoid(y, dx) >= 0
    assert trapezoid(2 * y, dx) == pytest.approx(2 * trapezoid(y, dx), rel=1e-12, abs=1e-300)
    assert trapezoid(y, dx) == pytest.approx(np.trapezoid(y, dx=dx), rel=1e-12, abs=1e-12)
