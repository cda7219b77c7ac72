# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled swept-receiver kernel.

Per sample: mix the photocurrent down with the (possibly chirped) analyzer
LO, run it through ``n_stages`` complex one-pole low-passes (the resolution
filter), detect power, smooth it with a one-pole video filter, and latch
the video output at the requested display indices.

The LO phasor advances by complex multiplication and is recomputed exactly
every ``RESYNC`` samples, which keeps it within ~1e-13 of cos/sin.
"""
import numpy as np

from libc.math cimport cos, sin, floor, M_PI

cdef enum:
    MAX_STAGES = 16
    RESYNC = 256


cdef inline double _frac_cycles(double t, double f_start, double sweep_rate) nogil:
    cdef double c
    if t < 0:
        c = f_start * t
    else:
        c = f_start * t + 0.5 * sweep_rate * t * t
    return c - floor(c)


def sweep_detect(const double[::1] x, double fs, double f_start, double sweep_rate,
                 Py_ssize_t n_pre, double a_rbw, int n_stages, double a_vbw,
                 const Py_ssize_t[::1] out_idx):
    if n_stages < 1 or n_stages > MAX_STAGES:
        raise ValueError(f"n_stages must be in [1, {MAX_STAGES}]")
    cdef Py_ssize_t n = x.shape[0], m = out_idx.shape[0]
    cdef Py_ssize_t i, j = 0
    for i in range(m):
        if out_idx[i] < 0 or (i and out_idx[i] < out_idx[i - 1]):
            raise ValueError("display indices must be non-negative and sorted")
    if m and out_idx[m - 1] >= n:
        raise IndexError("display index beyond the end of the record")
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] out_v = out
    cdef double re[MAX_STAGES]
    cdef double im[MAX_STAGES]
    cdef int k
    cdef double t, ang, in_re, in_im, tmp, video = 0.0
    cdef double lo_re = 1.0, lo_im = 0.0, d_re = 1.0, d_im = 0.0, e_re = 1.0, e_im = 0.0
    cdef double dt = 1.0 / fs
    for k in range(n_stages):
        re[k] = 0.0
        im[k] = 0.0
    with nogil:
        for i in range(n):
            if j >= m:
                break
            t = (i - n_pre) * dt
            if i % RESYNC == 0 or i == n_pre:
                # exact LO, per-sample step and step-of-step at this sample
                ang = 2.0 * M_PI * _frac_cycles(t, f_start, sweep_rate)
                lo_re = cos(ang)
                lo_im = -sin(ang)
                if t < 0:
                    ang = 2.0 * M_PI * f_start * dt
                    e_re = 1.0
                    e_im = 0.0
                else:
                    tmp = f_start * dt + sweep_rate * (t + 0.5 * dt) * dt
                    ang = 2.0 * M_PI * (tmp - floor(tmp))
                    e_re = cos(2.0 * M_PI * sweep_rate * dt * dt)
                    e_im = -sin(2.0 * M_PI * sweep_rate * dt * dt)
                d_re = cos(ang)
                d_im = -sin(ang)
            in_re = x[i] * lo_re
            in_im = x[i] * lo_im
            for k in range(n_stages):
                re[k] += a_rbw * (in_re - re[k])
                im[k] += a_rbw * (in_im - im[k])
                in_re = re[k]
                in_im = im[k]
            video += a_vbw * (in_re * in_re + in_im * in_im - video)
            while j < m and out_idx[j] == i:
                out_v[j] = video
                j += 1
            # advance the phasor to sample i + 1
            tmp = lo_re * d_re - lo_im * d_im
            lo_im = lo_re * d_im + lo_im * d_re
            lo_re = tmp
            tmp = d_re * e_re - d_im * e_im
            d_im = d_re * e_im + d_im * e_re
            d_re = tmp
    return out
