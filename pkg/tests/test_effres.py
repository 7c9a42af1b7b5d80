import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mistscd import InputError, RangeError, diagonalize_strip, effective_resonance, reference_params
from mistscd.effres import effres_csv
from mistscd.params import TWO_PI


def test_uncoupled_curve_is_flat(linear_curve, linear_params):
    np.testing.assert_allclose(linear_curve.samples, linear_params.omega_r, rtol=1e-12)
    n = np.linspace(0, linear_curve.n_top, 37)
    np.testing.assert_allclose(linear_curve.eval(n), linear_params.omega_r, rtol=1e-12)
    assert np.max(np.abs(linear_curve.eval_derivative(n))) < 1e-6 * linear_params.omega_r


def test_two_level_dispersive_shift():
    p = reference_params(transmon_levels=2, n_max=10)
    c = effective_resonance(diagonalize_strip(p), 0)
    oracle = p.delta / 2 - np.sqrt(p.delta**2 / 4 + p.g**2)
    assert c.chi == pytest.approx(oracle, rel=1e-9)
    assert c.chi / TWO_PI / 1e6 == pytest.approx(-4.2, abs=0.05)


def test_nodes_exact(curves):
    c = curves[2]
    for n in (0, 1, 22, 100, 698):
        assert c.eval(float(n)) == c.samples[n]


@given(st.integers(0, 697), st.floats(0.0, 1.0), st.sampled_from([0, 1, 2]))
@settings(max_examples=200, deadline=None)
def test_no_overshoot_between_nodes(n, frac, level):
    c = _curves()[level]
    lo, hi = sorted((c.samples[n], c.samples[n + 1]))
    v = c.eval(n + frac)
    span = hi - lo
    assert lo - 1e-9 * span - 1e-6 <= v <= hi + 1e-9 * span + 1e-6


_cache = {}


def _curves():
    if not _cache:
        spec = diagonalize_strip(reference_params())
        _cache.update({i: effective_resonance(spec, i) for i in (0, 1, 2)})
    return _cache


def test_range_errors(curves):
    c = curves[0]
    with pytest.raises(RangeError):
        c.eval(c.n_top + 0.5)
    with pytest.raises(RangeError):
        c.eval_derivative([1.0, c.n_top + 1])
    with pytest.raises(InputError):
        c.eval(-1.0)


def test_dispersive_shifts_negative_and_growing(curves):
    chi = [curves[i].chi for i in (0, 1, 2)]
    assert all(x < 0 for x in chi)
    assert abs(chi[0]) < abs(chi[1]) < abs(chi[2])


def test_self_kerr_slope_then_positive(curves):
    for c in curves.values():
        assert c.eval_derivative(0.5) < 0
        m = c.local_minimum(n_hi=400)
        assert c.eval_derivative(m + 5.0) > 0


def test_minimum_moves_down_with_level(curves):
    argmins = [curves[i].local_minimum(n_hi=400) for i in (0, 1, 2)]
    assert argmins[0] > argmins[1] > argmins[2]
    assert all(0 < a < 400 for a in argmins)


def test_large_n_returns_toward_bare_cavity(curves):
    for c in curves.values():
        dev = np.abs(c.samples - c.omega_r)
        assert dev[-1] < 0.5 * abs(c.chi)
        assert dev[-1] < 0.5 * dev.max()
        near = np.flatnonzero(dev < 0.05 * abs(c.chi))
        # the curve passes within 5% of chi of the bare frequency somewhere in the table
        assert near.size > 0
        print(f"level {c.level}: first n with |w - w_r| < 0.05|chi|: {near[0]}")


def test_csv(curves):
    lines = effres_csv([curves[0]]).splitlines()
    assert lines[0] == "i,n,omega_eff_rad_per_s,d_omega_dn"
    assert len(lines) == 1 + len(curves[0].samples)
