import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mistscd import InputError
from mistscd.config import PAPER_PRESET, ConfigError, load_preset, parse_config, parse_level
from mistscd.params import TWO_PI, KappaConvention, reference_params


def test_preset_matches_reference_params():
    cfg = load_preset("paper")
    assert cfg.system_params() == reference_params()
    np.testing.assert_allclose(cfg.drive_amplitudes(), [TWO_PI * 13e6])
    np.testing.assert_allclose(cfg.detunings(), TWO_PI * np.array([-8.2e6, -9e6, -10.85e6]))
    assert cfg.level_index() == 2 and cfg.t0() == 1e-6
    assert len(cfg.freq_axis()) == 161 and len(cfg.photon_axis()) == 49


def test_units_are_interchangeable():
    a = parse_config(PAPER_PRESET)
    b = parse_config(PAPER_PRESET.replace("g_MHz = 55", "g_kHz = 55000").replace("omega_r_GHz = 5.078",
                                                                                  "omega_r_Hz = 5078000000"))
    assert a.system_params() == b.system_params()


def test_rad_per_s_drive_convention():
    cfg = parse_config(PAPER_PRESET + "fig3_drive_convention = rad_per_s\ndrive_MHz = 13\n")
    assert cfg.drive_amplitudes()[0] == pytest.approx(13e6)


def test_ordinary_kappa():
    cfg = parse_config(PAPER_PRESET + "kappa_convention = ordinary\n")
    p = cfg.system_params()
    assert p.kappa == pytest.approx(1.3e6) and p.kappa_convention is KappaConvention.ORDINARY


@pytest.mark.parametrize("extra, message", [
    ("bogus = 1", "line 7: unknown key 'bogus'"),
    ("g_MHz = 3", "line 7: key 'g' already set on line 4"),
    ("n_max = many", "line 7: malformed number 'many'"),
    ("drive = 13", "line 7: frequency key 'drive' needs a unit suffix"),
    ("kappa_convention = sideways", "line 7: kappa_convention must be one of"),
    ("n_max = 0", "line 7: n_max must be positive"),
    ("drive_MHz = -1", "line 7: drive_MHz must be non-negative"),
    ("just words", "line 7: expected 'key = value'"),
    ("t0_us = inf", "line 7: non-finite value"),
    ("map_n_freqs = 5", "map_n_freqs must be >= 8"),
])
def test_errors_name_the_line(extra, message):
    with pytest.raises(ConfigError, match=message.replace("(", r"\(")):
        parse_config(PAPER_PRESET + extra + "\n")


def test_missing_keys_listed_together():
    with pytest.raises(ConfigError, match="omega_q_<unit>, eta_<unit>"):
        parse_config("omega_r_GHz = 5\ng_MHz = 5\nkappa_MHz = 1\n")


def test_config_error_is_input_error():
    assert issubclass(ConfigError, InputError) and issubclass(ConfigError, ValueError)


def test_levels():
    assert [parse_level(x) for x in ("g", "e", "f", "4")] == [0, 1, 2, 4]
    for bad in ("h", "-1", "1.5"):
        with pytest.raises(InputError):
            parse_level(bad)


finite = st.floats(0.01, 1e4, allow_nan=False)


@given(
    g=st.floats(0.0, 200.0), eta=finite, kappa=finite, levels=st.integers(2, 40),
    drives=st.lists(st.floats(0.0, 50.0), min_size=1, max_size=4),
    mode=st.sampled_from(["ode", "fixed_point", "both"]), level=st.sampled_from(["g", "e", "f", "5"]),
)
@settings(max_examples=60, deadline=None)
def test_emit_round_trip(g, eta, kappa, levels, drives, mode, level):
    text = (f"omega_r_GHz = 5.0\nomega_q_GHz = 5.7\ng_MHz = {g!r}\neta_MHz = {eta!r}\n"
            f"kappa_kHz = {kappa!r}\ntransmon_levels = {levels}\nmode = {mode}\nlevel = {level}\n"
            f"drive_MHz = {', '.join(repr(d) for d in drives)}\n")
    cfg = parse_config(text)
    again = parse_config(cfg.emit())
    assert again == cfg
    assert again.emit() == cfg.emit()
