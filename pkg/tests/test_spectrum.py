import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mistscd import InputError, build_block, diagonalize_strip, eigenenergy, reference_params
from mistscd.params import EtaConvention, Labeling, TWO_PI
from mistscd.spectrum import block_bands

from conftest import jc_two_level, mhz


def test_vacuum_block():
    p = reference_params()
    np.testing.assert_array_equal(build_block(p, 0), [[0.0]])


def test_single_excitation_block():
    p = reference_params()
    np.testing.assert_array_equal(build_block(p, 1), [[p.omega_r, p.g], [p.g, p.omega_q]])


@pytest.mark.parametrize("n_tot", [0, 1, 5, 40])
def test_uncoupled_block_is_diagonal(n_tot):
    p = reference_params(g=0.0, transmon_levels=6)
    H = build_block(p, n_tot)
    np.testing.assert_array_equal(H, np.diag(np.diag(H)))
    i = np.arange(H.shape[0])
    np.testing.assert_array_equal(np.linalg.eigvalsh(H), np.sort(p.bare_energy(i, n_tot - i)))


def test_block_elements():
    p = reference_params(transmon_levels=5)
    H = build_block(p, 9)
    assert H.shape == (5, 5)
    for i in range(5):
        assert H[i, i] == pytest.approx((9 - i) * p.omega_r + i * p.omega_q - 0.5 * p.eta * i * (i - 1), rel=1e-15)
    for i in range(4):
        assert H[i, i + 1] == pytest.approx(p.g * np.sqrt((i + 1) * (9 - i)), rel=1e-15)
    assert np.count_nonzero(np.triu(H, 2)) == 0


def test_as_printed_anharmonicity():
    p = reference_params(transmon_levels=4, eta_convention=EtaConvention.AS_PRINTED)
    H = build_block(p, 3)
    assert H[2, 2] == pytest.approx(p.omega_r + 2 * p.omega_q - 2 * p.eta, rel=1e-15)


def test_negative_block_rejected():
    with pytest.raises(InputError):
        build_block(reference_params(), -1)


@given(st.integers(0, 800))
@settings(max_examples=40, deadline=None)
def test_block_symmetric_and_trace_preserved(n_tot):
    p = reference_params(transmon_levels=12)
    H = build_block(p, n_tot)
    np.testing.assert_array_equal(H, H.T)
    diag, off = block_bands(p, n_tot)
    if len(diag) > 1:
        from scipy.linalg import eigh_tridiagonal
        vals = eigh_tridiagonal(diag, off, eigvals_only=True)
    else:
        vals = diag
    assert np.sum(vals) == pytest.approx(np.trace(H), rel=1e-12)


def test_tridiagonal_solver_matches_dense():
    p = reference_params(transmon_levels=15)
    for n_tot in (3, 20, 133, 500):
        diag, off = block_bands(p, n_tot)
        from scipy.linalg import eigh_tridiagonal
        np.testing.assert_allclose(eigh_tridiagonal(diag, off, eigvals_only=True),
                                   np.linalg.eigvalsh(build_block(p, n_tot)), rtol=1e-12)


@pytest.mark.parametrize("labeling", list(Labeling))
def test_two_level_matches_closed_form(labeling):
    p = reference_params(transmon_levels=2, n_max=300, labeling=labeling)
    spec = diagonalize_strip(p)
    for i in (0, 1):
        for n in range(0, 301, 7):
            assert spec.energies[i, n] == pytest.approx(jc_two_level(p, i, n), rel=1e-9)


def test_ground_dispersive_shift_two_level():
    p = reference_params(transmon_levels=2, n_max=4)
    spec = diagonalize_strip(p)
    shift = spec.energies[0, 1] - spec.energies[0, 0] - p.omega_r
    oracle = p.delta / 2 - np.sqrt(p.delta**2 / 4 + p.g**2)
    assert shift == pytest.approx(oracle, rel=1e-9)
    assert shift / TWO_PI / 1e6 == pytest.approx(-4.2, abs=0.05)


@pytest.mark.parametrize("convention", list(EtaConvention))
def test_uncoupled_spectrum_is_bare(convention):
    p = reference_params(g=0.0, transmon_levels=8, n_max=60, eta_convention=convention)
    spec = diagonalize_strip(p)
    i, n = np.meshgrid(np.arange(8), np.arange(61), indexing="ij")
    np.testing.assert_array_equal(spec.energies, p.bare_energy(i, n))
    np.testing.assert_array_equal(spec.overlap, 1.0)
    c = convention.factor
    assert eigenenergy(spec, 2, 5) == pytest.approx(5 * p.omega_r + 2 * p.omega_q - 2 * c * p.eta, rel=1e-15)


def test_eigenenergy_lookup(spec, params):
    assert eigenenergy(spec, 0, 0) == 0.0
    chi_g = eigenenergy(spec, 0, 1) - params.omega_r
    assert chi_g < 0
    with pytest.raises(InputError):
        eigenenergy(spec, spec.levels, 0)
    with pytest.raises(InputError):
        eigenenergy(spec, 0, spec.n_max + 1)


def test_overlaps_in_unit_interval(spec):
    assert np.all(spec.overlap > 0) and np.all(spec.overlap <= 1 + 1e-12)
    assert np.all(np.isfinite(spec.energies))


@pytest.mark.parametrize("labeling", list(Labeling))
def test_labels_are_a_bijection_per_block(labeling):
    p = reference_params(transmon_levels=10, n_max=120, labeling=labeling)
    spec = diagonalize_strip(p)
    for n_tot in (0, 4, 9, 66, 120):
        i = np.arange(min(10, n_tot + 1))
        labelled = np.sort(spec.energies[i, n_tot - i])
        np.testing.assert_allclose(labelled, np.linalg.eigvalsh(build_block(p, n_tot)), rtol=1e-13)


def test_overlap_labeling_warns_near_hybridization():
    spec = diagonalize_strip(reference_params(transmon_levels=12, n_max=100, labeling=Labeling.OVERLAP))
    assert spec.warnings
    assert all(w.overlap < 0.5 for w in spec.warnings)


def test_weak_coupling_converges_monotonically():
    base = reference_params(transmon_levels=6, n_max=30)
    i, n = np.meshgrid(np.arange(6), np.arange(31), indexing="ij")
    bare = base.bare_energy(i, n)
    prev = None
    # asymptotic property: start below the strongly hybridized regime
    for g in mhz(10.0) * 0.5 ** np.arange(0, 8):
        dev = np.abs(diagonalize_strip(base.with_(g=g)).energies - bare)
        if prev is not None:
            assert np.all(dev <= prev * (1 + 1e-9) + 1e-3)
        prev = dev
    assert np.max(prev) < mhz(0.1)


def test_spectrum_csv_header(spec):
    head = spec.to_csv().splitlines()[:2]
    assert head[0] == "i,n,energy_rad_per_s,overlap"
    assert head[1].startswith("0,0,0,")
