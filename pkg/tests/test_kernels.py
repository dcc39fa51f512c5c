"""Link-budget and bit-error kernels, exercised on every available backend.

The reception-probability oracle here integrates the BER over a fine
uniform time grid instead of cutting segments at interferer edges, so it
is an independent cross-check of the production implementation.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

UWB_WAVELENGTH = 299792458.0 / 0.8e9


def test_backend_labels(both_backends):
    labels = {m.BACKEND for m in both_backends}
    assert "python" in labels


def test_dbm_mw_roundtrip_known_points(kern):
    assert kern.dbm_to_mw(0.0) == pytest.approx(1.0)
    assert kern.dbm_to_mw(10.0) == pytest.approx(10.0)
    assert kern.mw_to_dbm(100.0) == pytest.approx(20.0)


@given(st.floats(min_value=-150.0, max_value=50.0))
def test_dbm_mw_roundtrip_property(dbm):
    from uwbsim import kernels
    assert kernels.mw_to_dbm(kernels.dbm_to_mw(dbm)) == pytest.approx(dbm)


def test_crossover_distance_formula(kern):
    # 4*pi*h_tx*h_rx / wavelength, hand-evaluated for 0.45 m antennas.
    expected = 4.0 * math.pi * 0.45 * 0.45 / UWB_WAVELENGTH
    assert kern.crossover_distance(UWB_WAVELENGTH, 0.45, 0.45) == \
        pytest.approx(expected, rel=1e-12)


def test_path_loss_free_space_one_meter(kern):
    # 20 log10(4*pi*d/lambda) at d = 1 m.
    expected = 20.0 * math.log10(4.0 * math.pi / UWB_WAVELENGTH)
    assert kern.path_loss_db(1.0, UWB_WAVELENGTH, 0.45, 0.45, True) == \
        pytest.approx(expected, rel=1e-12)


def test_path_loss_continuous_at_crossover(kern):
    d_c = kern.crossover_distance(UWB_WAVELENGTH, 0.45, 0.45)
    below = kern.path_loss_db(d_c * (1 - 1e-9), UWB_WAVELENGTH, 0.45, 0.45, True)
    above = kern.path_loss_db(d_c * (1 + 1e-9), UWB_WAVELENGTH, 0.45, 0.45, True)
    assert below == pytest.approx(above, abs=1e-6)


def test_path_loss_two_ray_beyond_crossover(kern):
    # 40 log10(d) - 10 log10(h^4) at d = 20 m, h = 0.45 m.
    expected = 40.0 * math.log10(20.0) - 10.0 * math.log10(0.45 ** 4)
    assert kern.path_loss_db(20.0, UWB_WAVELENGTH, 0.45, 0.45, True) == \
        pytest.approx(expected, rel=1e-12)


def test_path_loss_rejects_nonpositive_distance(kern):
    with pytest.raises(ValueError):
        kern.path_loss_db(0.0, UWB_WAVELENGTH, 0.45, 0.45, True)


@given(st.floats(min_value=0.01, max_value=1000.0),
       st.floats(min_value=0.01, max_value=1000.0))
def test_path_loss_monotone_in_distance(d1, d2):
    from uwbsim import kernels
    lo, hi = sorted((d1, d2))
    assert kernels.path_loss_db(lo, UWB_WAVELENGTH, 0.45, 0.45, True) <= \
        kernels.path_loss_db(hi, UWB_WAVELENGTH, 0.45, 0.45, True) + 1e-9


def test_rx_powers_mw_matches_scalar_path(kern):
    eirp = -24.318 + 6.0
    dists = np.array([0.0, 0.5, 1.0, 6.79, 10.0, 25.0])
    out = kern.rx_powers_mw(eirp, dists, UWB_WAVELENGTH, 0.45, 0.45, True)
    assert out[0] == 0.0  # zero distance carries no decodable power
    for d, got in zip(dists[1:], out[1:]):
        loss = kern.path_loss_db(d, UWB_WAVELENGTH, 0.45, 0.45, True)
        assert got == pytest.approx(kern.dbm_to_mw(eirp - loss), rel=1e-12)


def test_bit_error_rate_limits(kern):
    assert kern.bit_error_rate(0.0, 100.0) == pytest.approx(0.5)
    assert kern.bit_error_rate(1.0, 100.0) < 1e-10
    with pytest.raises(ValueError):
        kern.bit_error_rate(-0.1, 100.0)


def test_bit_error_rate_closed_form(kern):
    sinr, pg = 0.02, 100.0
    assert kern.bit_error_rate(sinr, pg) == \
        pytest.approx(0.5 * math.erfc(math.sqrt(sinr * pg)), rel=1e-12)


def test_packet_success_prob_closed_form(kern):
    # One segment, no interference: (1 - ber)^bits.
    sinr, pg, bitrate, duration = 0.05, 100.0, 1e6, 1.152e-3
    ber = 0.5 * math.erfc(math.sqrt(sinr * pg))
    expected = (1.0 - ber) ** (duration * bitrate)
    assert kern.packet_success_prob([duration], [sinr], bitrate, pg) == \
        pytest.approx(expected, rel=1e-9)


def test_packet_success_prob_zero_sinr_is_zero(kern):
    assert kern.packet_success_prob([1e-3], [0.0], 1e6, 1.0) == \
        pytest.approx(0.0, abs=1e-30)


def _grid_oracle(signal_mw, noise_mw, t0, t1, int_mw, int_a, int_b,
                 bitrate, pg, steps=20000):
    """Reception success via brute-force uniform time discretization."""
    log_p = 0.0
    dt = (t1 - t0) / steps
    for k in range(steps):
        mid = t0 + (k + 0.5) * dt
        interf = sum(mw for mw, a, b in zip(int_mw, int_a, int_b)
                     if a <= mid < b)
        ber = 0.5 * math.erfc(math.sqrt(signal_mw / (noise_mw + interf) * pg))
        if ber >= 1.0:
            return 0.0
        log_p += dt * bitrate * math.log1p(-ber)
    return math.exp(log_p)


def _random_interference_case(rng, n):
    t0, t1 = 0.0, 1.152e-3
    signal = rng.uniform(0.5, 5.0) * 1e-9
    noise = 1e-12
    mw = (rng.uniform(0.01, 3.0, n) * signal).tolist()
    a = rng.uniform(t0 - 5e-4, t1, n).tolist()
    b = (np.array(a) + rng.uniform(1e-5, 2e-3, n)).tolist()
    return signal, noise, t0, t1, mw, a, b


@pytest.mark.parametrize("n_interferers", [0, 1, 3, 8])
def test_reception_success_matches_grid_oracle(kern, n_interferers):
    rng = np.random.default_rng(7 + n_interferers)
    for _ in range(3):
        sig, noise, t0, t1, mw, a, b = _random_interference_case(rng, n_interferers)
        got = kern.reception_success_prob(sig, noise, t0, t1, mw, a, b,
                                          1e6, 100.0)
        want = _grid_oracle(sig, noise, t0, t1, mw, a, b, 1e6, 100.0)
        assert 0.0 <= got <= 1.0
        if want > 1e-12:
            assert math.log(got) == pytest.approx(math.log(want), rel=5e-3)
        else:
            assert got < 1e-9


def test_reception_success_no_interference_reduces_to_closed_form(kern):
    sig, noise = 2e-9, 1e-12
    ber = 0.5 * math.erfc(math.sqrt(sig / noise * 100.0))
    expected = (1.0 - ber) ** 1152
    got = kern.reception_success_prob(sig, noise, 0.0, 1.152e-3, [], [], [],
                                      1e6, 100.0)
    assert got == pytest.approx(expected, rel=1e-9)


def test_reception_success_interferer_outside_window_ignored(kern):
    sig, noise = 2e-9, 1e-12
    clean = kern.reception_success_prob(sig, noise, 0.0, 1e-3, [], [], [],
                                        1e6, 100.0)
    shifted = kern.reception_success_prob(sig, noise, 0.0, 1e-3,
                                          [sig * 100], [2e-3], [3e-3],
                                          1e6, 100.0)
    assert shifted == pytest.approx(clean, rel=1e-12)


def test_reception_success_strong_overlap_destroys_frame(kern):
    sig, noise = 2e-9, 1e-12
    got = kern.reception_success_prob(sig, noise, 0.0, 1.152e-3,
                                      [sig * 1e4], [0.0], [1.152e-3],
                                      1e6, 1.0)
    assert got < 1e-12


def test_backends_agree_exactly(both_backends):
    if len(both_backends) < 2:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(123)
    for n in (0, 2, 5, 70):  # 70 exercises the compiled heap fallback
        case = _random_interference_case(rng, n)
        sig, noise, t0, t1, mw, a, b = case
        vals = [m.reception_success_prob(sig, noise, t0, t1, mw, a, b,
                                         1e6, 100.0) for m in both_backends]
        assert vals[0] == pytest.approx(vals[1], rel=1e-12)
        dists = rng.uniform(0.1, 50.0, 32)
        rows = [m.rx_powers_mw(-18.3, dists, UWB_WAVELENGTH, 0.45, 0.45, True)
                for m in both_backends]
        np.testing.assert_allclose(rows[0], rows[1], rtol=1e-13)


def test_selected_backend_exports():
    from uwbsim import kernels
    assert kernels.BACKEND in ("python", "cython")
    for name in ("dbm_to_mw", "mw_to_dbm", "crossover_distance",
                 "path_loss_db", "rx_powers_mw", "bit_error_rate",
                 "packet_success_prob", "reception_success_prob"):
        assert callable(getattr(kernels, name))
