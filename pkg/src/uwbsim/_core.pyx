# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled link-budget and bit-error kernels.

Twin of uwbsim._core_py; same functions, same numbers, built with Cython
for the per-reception inner loops.
"""

from libc.math cimport log10, log1p, sqrt, erfc, exp, pow
from libc.stdlib cimport malloc, free

import numpy as np

BACKEND = "cython"

cdef double FOUR_PI = 12.566370614359172


cpdef double dbm_to_mw(double dbm):
    return pow(10.0, dbm / 10.0)


cpdef double mw_to_dbm(double mw):
    return 10.0 * log10(mw)


cpdef double crossover_distance(double wavelength, double h_tx, double h_rx):
    return FOUR_PI * h_tx * h_rx / wavelength


cpdef double path_loss_db(double d, double wavelength, double h_tx,
                          double h_rx, bint two_ray) except? -1.0:
    if d <= 0.0:
        raise ValueError(f"path loss undefined for distance {d}")
    if two_ray and d > FOUR_PI * h_tx * h_rx / wavelength:
        return 40.0 * log10(d) - 10.0 * log10(h_tx * h_tx * h_rx * h_rx)
    return 20.0 * log10(FOUR_PI * d / wavelength)


def rx_powers_mw(double eirp_dbm, distances, double wavelength,
                 double h_tx, double h_rx, bint two_ray):
    cdef double[::1] d = np.ascontiguousarray(distances, dtype=np.float64)
    out_arr = np.empty(d.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double d_c = FOUR_PI * h_tx * h_rx / wavelength
    cdef double h4 = h_tx * h_tx * h_rx * h_rx
    cdef double di, loss
    cdef Py_ssize_t i
    for i in range(d.shape[0]):
        di = d[i]
        if di <= 0.0:
            out[i] = 0.0
            continue
        if two_ray and di > d_c:
            loss = 40.0 * log10(di) - 10.0 * log10(h4)
        else:
            loss = 20.0 * log10(FOUR_PI * di / wavelength)
        out[i] = pow(10.0, (eirp_dbm - loss) / 10.0)
    return out_arr


cpdef double bit_error_rate(double sinr, double processing_gain) except? -1.0:
    if sinr < 0.0:
        raise ValueError("negative sinr")
    return 0.5 * erfc(sqrt(sinr * processing_gain))


cpdef double reception_success_prob(double signal_mw, double noise_mw,
                                    double t_begin, double t_end,
                                    list int_mw, list int_a, list int_b,
                                    double bitrate,
                                    double processing_gain) except? -1.0:
    """Success probability of one reception against clipped interferers.

    Interferer intervals are clipped to the reception window; segment
    boundaries fall at every interferer edge, SINR is constant inside
    each segment.
    """
    cdef Py_ssize_t n = len(int_mw)
    cdef double ber, log_p, a, b, mid, interf, bits
    cdef double[64] smw
    cdef double[64] sa
    cdef double[64] sb
    cdef double[130] scuts
    cdef double* mw = smw
    cdef double* ia = sa
    cdef double* ib = sb
    cdef double* cuts = scuts
    cdef double* heap = NULL
    cdef Py_ssize_t i, j, m, ncuts

    if n > 64:
        heap = <double*> malloc((5 * n + 2) * sizeof(double))
        if heap == NULL:
            raise MemoryError()
        mw = heap
        ia = heap + n
        ib = heap + 2 * n
        cuts = heap + 3 * n

    try:
        # clip interferers to the reception window
        m = 0
        for i in range(n):
            a = int_a[i]
            b = int_b[i]
            if a < t_begin:
                a = t_begin
            if b > t_end:
                b = t_end
            if b <= a:
                continue
            mw[m] = int_mw[i]
            ia[m] = a
            ib[m] = b
            m += 1
        if m == 0:
            ber = 0.5 * erfc(sqrt(signal_mw / noise_mw * processing_gain))
            return exp((t_end - t_begin) * bitrate * log1p(-ber))

        cuts[0] = t_begin
        cuts[1] = t_end
        for i in range(m):
            cuts[2 + 2 * i] = ia[i]
            cuts[3 + 2 * i] = ib[i]
        ncuts = 2 + 2 * m
        _insertion_sort(cuts, ncuts)

        log_p = 0.0
        for j in range(ncuts - 1):
            a = cuts[j]
            b = cuts[j + 1]
            if b <= a:
                continue
            mid = 0.5 * (a + b)
            interf = 0.0
            for i in range(m):
                if ia[i] <= mid and mid < ib[i]:
                    interf += mw[i]
            bits = (b - a) * bitrate
            ber = 0.5 * erfc(
                sqrt(signal_mw / (noise_mw + interf) * processing_gain))
            if ber >= 1.0:
                return 0.0
            log_p += bits * log1p(-ber)
        return exp(log_p)
    finally:
        if heap != NULL:
            free(heap)


cdef void _insertion_sort(double* arr, Py_ssize_t n) noexcept:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, n):
        key = arr[i]
        j = i - 1
        while j >= 0 and arr[j] > key:
            arr[j + 1] = arr[j]
            j -= 1
        arr[j + 1] = key


cpdef double packet_success_prob(durations, sinrs, double bitrate,
                                 double processing_gain) except? -1.0:
    cdef double log_p = 0.0
    cdef double dur, sinr, bits, ber
    for dur, sinr in zip(durations, sinrs):
        bits = dur * bitrate
        if bits <= 0.0:
            continue
        if sinr < 0.0:
            raise ValueError("negative sinr")
        ber = 0.5 * erfc(sqrt(sinr * processing_gain))
        if ber >= 1.0:
            return 0.0
        log_p += bits * log1p(-ber)
    return exp(log_p)
