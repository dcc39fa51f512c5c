"""Pure-Python link-budget and bit-error kernels.

Fallback twin of the compiled ``uwbsim._core`` extension; both expose the
same functions and must produce the same numbers. Selected at import time
by :mod:`uwbsim.kernels`.
"""

import math

import numpy as np

BACKEND = "python"

FOUR_PI = 4.0 * math.pi


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw):
    return 10.0 * math.log10(mw)


def crossover_distance(wavelength, h_tx, h_rx):
    """Distance where the free-space and two-ray branches meet."""
    return FOUR_PI * h_tx * h_rx / wavelength


def path_loss_db(d, wavelength, h_tx, h_rx, two_ray):
    """Free-space loss below the crossover, two-ray ground loss above it."""
    if d <= 0.0:
        raise ValueError(f"path loss undefined for distance {d}")
    if two_ray:
        d_c = crossover_distance(wavelength, h_tx, h_rx)
        if d > d_c:
            return 40.0 * math.log10(d) - 10.0 * math.log10(
                h_tx * h_tx * h_rx * h_rx)
    return 20.0 * math.log10(FOUR_PI * d / wavelength)


def rx_powers_mw(eirp_dbm, distances, wavelength, h_tx, h_rx, two_ray):
    """Received power in mW for an array of link distances.

    ``eirp_dbm`` is tx power plus both antenna gains. Zero distances map
    to +inf loss (a node does not receive itself).
    """
    d = np.asarray(distances, dtype=np.float64)
    out = np.empty_like(d)
    for i in range(d.shape[0]):
        di = d[i]
        if di <= 0.0:
            out[i] = 0.0
        else:
            out[i] = dbm_to_mw(
                eirp_dbm - path_loss_db(di, wavelength, h_tx, h_rx, two_ray))
    return out


def bit_error_rate(sinr, processing_gain):
    """Coherent binary detection: Q(sqrt(2 Eb/N0)) with Eb/N0 = sinr * gain."""
    if sinr < 0.0:
        raise ValueError("negative sinr")
    return 0.5 * math.erfc(math.sqrt(sinr * processing_gain))


def reception_success_prob(signal_mw, noise_mw, t_begin, t_end,
                           int_mw, int_a, int_b, bitrate, processing_gain):
    """Success probability of one reception against clipped interferers.

    ``int_mw``/``int_a``/``int_b`` are parallel sequences of interferer
    received power and arrival interval; intervals are clipped to the
    reception window here. Segment boundaries fall at every interferer
    edge, SINR is constant inside each segment.
    """
    if not int_mw:
        return packet_success_prob([t_end - t_begin],
                                   [signal_mw / noise_mw],
                                   bitrate, processing_gain)
    cuts = {t_begin, t_end}
    clipped = []
    for mw, a, b in zip(int_mw, int_a, int_b):
        a = max(a, t_begin)
        b = min(b, t_end)
        if b <= a:
            continue
        clipped.append((mw, a, b))
        cuts.add(a)
        cuts.add(b)
    edges = sorted(cuts)
    log_p = 0.0
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        mid = 0.5 * (a + b)
        interf = sum(mw for mw, ia, ib in clipped if ia <= mid < ib)
        bits = (b - a) * bitrate
        ber = bit_error_rate(signal_mw / (noise_mw + interf), processing_gain)
        if ber >= 1.0:
            return 0.0
        log_p += bits * math.log1p(-ber)
    return math.exp(log_p)


def packet_success_prob(durations, sinrs, bitrate, processing_gain):
    """Probability that every bit of a segmented reception decodes.

    Product over segments of (1 - BER)^(duration * bitrate); fractional
    bit counts are allowed in the exponent. Accumulated in log space so
    long frames at high BER underflow to 0.0 cleanly.
    """
    log_p = 0.0
    for dur, sinr in zip(durations, sinrs):
        bits = dur * bitrate
        if bits <= 0.0:
            continue
        ber = bit_error_rate(sinr, processing_gain)
        if ber >= 1.0:
            return 0.0
        log_p += bits * math.log1p(-ber)
    return math.exp(log_p)
