# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics mirror _impl_py exactly (see its docstring
for the bit-identity contract)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, sin, fabs, fmod

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925286766559


def ensemble_steps(const double[::1] gv_ext, double[::1] r, double[::1] w,
                   const double[:, ::1] forcing):
    cdef Py_ssize_t m = gv_ext.shape[0] - 1
    cdef Py_ssize_t steps = forcing.shape[0]
    cdef Py_ssize_t K = r.shape[0]
    cdef Py_ssize_t s, k
    cdef double sm, frac, lo, hi, val, fl
    cdef Py_ssize_t j
    for s in range(steps):
        for k in range(K):
            sm = r[k] * m
            j = <Py_ssize_t>sm
            frac = sm - j
            lo = gv_ext[j]
            hi = gv_ext[j + 1]
            val = lo + frac * (hi - lo) + forcing[s, k]
            fl = floor(val)
            w[k] += fl
            r[k] = val - fl
            if r[k] >= 1.0:
                r[k] -= 1.0
                w[k] += 1.0


cdef inline double _gt_exact(double x, double c, double p, double q,
                             double tau, double a2p) noexcept nogil:
    cdef double k = floor(x - p)
    cdef double rr = x - k
    if rr <= q:
        return c + k
    return rr + tau + a2p * sin(TWO_PI * rr) + k


def backward_orbit_exact(double c, double p, double q, double tau,
                         double alpha, const double[::1] forcing, double x_end):
    cdef double a2p = alpha / TWO_PI
    cdef Py_ssize_t nsteps = forcing.shape[0]
    out_arr = np.empty(nsteps)
    cdef double[::1] out = out_arr
    cdef double y = x_end
    cdef double z, lo, hi, mid, x
    cdef Py_ssize_t s, it
    for s in range(nsteps):
        z = y - forcing[s]
        lo = z - (tau + a2p) - 2.0
        hi = z - tau + a2p + 2.0
        while _gt_exact(lo, c, p, q, tau, a2p) >= z:
            lo -= 1.0
        while _gt_exact(hi, c, p, q, tau, a2p) < z:
            hi += 1.0
        for it in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _gt_exact(mid, c, p, q, tau, a2p) >= z:
                hi = mid
            else:
                lo = mid
        x = hi - floor(hi)
        out[s] = x
        y = x
    return out_arr


def backward_orbit_grid(const double[::1] gv, const double[::1] forcing, double x_end):
    cdef Py_ssize_t m = gv.shape[0]
    cdef double base = gv[0]
    cdef Py_ssize_t nsteps = forcing.shape[0]
    out_arr = np.empty(nsteps)
    cdef double[::1] out = out_arr
    cdef double y = x_end
    cdef double z, zr, x, lo_v, hi_v, k
    cdef Py_ssize_t s, j, lo_i, hi_i, mid_i
    for s in range(nsteps):
        z = y - forcing[s]
        k = floor(z - base)
        zr = z - k
        if zr < base:
            k -= 1.0
            zr += 1.0
        elif zr >= base + 1.0:
            k += 1.0
            zr -= 1.0
        # leftmost j with gv[j] >= zr
        lo_i = 0
        hi_i = m
        while lo_i < hi_i:
            mid_i = (lo_i + hi_i) >> 1
            if gv[mid_i] < zr:
                lo_i = mid_i + 1
            else:
                hi_i = mid_i
        j = lo_i
        if j == 0:
            x = 0.0
        elif j >= m:
            lo_v = gv[m - 1]
            hi_v = base + 1.0
            x = (m - 1 + (zr - lo_v) / (hi_v - lo_v)) / m
        else:
            lo_v = gv[j - 1]
            hi_v = gv[j]
            if hi_v > lo_v:
                x = (j - 1 + (zr - lo_v) / (hi_v - lo_v)) / m
            else:
                x = (<double>j) / m
        x = x - floor(x)
        out[s] = x
        y = x
    return out_arr


def greedy_separated(const double[:, ::1] th_orbits, const double[:, ::1] x_orbits,
                     double eps, double circ_x):
    cdef Py_ssize_t n1 = th_orbits.shape[0]
    cdef Py_ssize_t P = th_orbits.shape[1]
    acc_arr = np.empty(P, dtype=np.int64)
    cdef cnp.int64_t[::1] acc = acc_arr
    cdef Py_ssize_t n_acc = 0
    cdef Py_ssize_t cand, ai, row
    cdef bint blocked, this_blocks
    cdef double dth, dx, d
    for cand in range(P):
        blocked = False
        for ai in range(n_acc):
            this_blocks = True
            for row in range(n1):
                dth = fmod(fabs(th_orbits[row, cand] - th_orbits[row, acc[ai]]), 1.0)
                if 1.0 - dth < dth:
                    dth = 1.0 - dth
                dx = fmod(fabs(x_orbits[row, cand] - x_orbits[row, acc[ai]]), circ_x)
                if circ_x - dx < dx:
                    dx = circ_x - dx
                d = dth if dth > dx else dx
                if d >= eps:
                    this_blocks = False
                    break
            if this_blocks:
                blocked = True
                break
        if not blocked:
            acc[n_acc] = cand
            n_acc += 1
    return acc_arr[:n_acc].copy()
