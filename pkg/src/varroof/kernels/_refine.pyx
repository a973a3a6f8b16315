# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled refinement kernel for the ensemble-variance oracle.

Line-for-line translation of ``refine_py``; any change there must be mirrored
here in the same operation order so the two backends agree to the last bit.
"""

from libc.math cimport M_PI, cos, sin, sqrt

import numpy as np

cdef double P_FLOOR = 1e-14
cdef int SCAN_POINTS = 16
cdef double GOLDEN_TOL = 1e-8
cdef int RESYNC_SWEEPS = 64
cdef double INF = float("inf")


cdef inline double _term(double mm, double nn) noexcept:
    if nn > P_FLOOR:
        return mm * mm / nn
    return 0.0


cdef inline double _plane_objective(double theta, double mii, double mjj, double wm,
                                    double nii, double njj, double wn,
                                    double direction) noexcept:
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef double cc = c * c
    cdef double ss = s * s
    cdef double cs2 = 2.0 * c * s
    cdef double mi = cc * mii + ss * mjj + cs2 * wm
    cdef double mj = ss * mii + cc * mjj - cs2 * wm
    cdef double ni = cc * nii + ss * njj + cs2 * wn
    cdef double nj = ss * nii + cc * njj - cs2 * wn
    return -direction * (_term(mi, ni) + _term(mj, nj))


cdef void _line_search(double mii, double mjj, double wm, double nii, double njj,
                       double wn, double direction,
                       double* out_f, double* out_t, double* out_hi) noexcept:
    cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
    cdef double step = M_PI / SCAN_POINTS
    cdef double best_f = INF
    cdef double best_t = 0.0
    cdef double f_hi = -INF
    cdef double theta, f, a, b, x1, x2, f1, f2, f_new, t_new
    cdef int idx
    for idx in range(SCAN_POINTS):
        theta = -0.5 * M_PI + step * idx
        f = _plane_objective(theta, mii, mjj, wm, nii, njj, wn, direction)
        if f < best_f:
            best_f = f
            best_t = theta
        if f > f_hi:
            f_hi = f
    a = best_t - step
    b = best_t + step
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = _plane_objective(x1, mii, mjj, wm, nii, njj, wn, direction)
    f2 = _plane_objective(x2, mii, mjj, wm, nii, njj, wn, direction)
    if f1 < best_f:
        best_f = f1
        best_t = x1
    if f1 > f_hi:
        f_hi = f1
    if f2 < best_f:
        best_f = f2
        best_t = x2
    if f2 > f_hi:
        f_hi = f2
    while (b - a) > GOLDEN_TOL:
        if f1 < f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - invphi * (b - a)
            f1 = _plane_objective(x1, mii, mjj, wm, nii, njj, wn, direction)
            f_new = f1
            t_new = x1
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + invphi * (b - a)
            f2 = _plane_objective(x2, mii, mjj, wm, nii, njj, wn, direction)
            f_new = f2
            t_new = x2
        if f_new < best_f:
            best_f = f_new
            best_t = t_new
        if f_new > f_hi:
            f_hi = f_new
    out_f[0] = best_f
    out_t[0] = best_t
    out_hi[0] = f_hi


cdef void _compute_mn(double complex[:, ::1] wl, double complex[:, ::1] bl,
                      double[::1] ll, int m, int r,
                      double complex[:, ::1] mm, double complex[:, ::1] nn) noexcept:
    cdef int k, l, a, b
    cdef double complex acc, nacc, t
    for k in range(m):
        for l in range(m):
            acc = 0
            nacc = 0
            for a in range(r):
                t = 0
                for b in range(r):
                    t = t + bl[a, b] * wl[l, b].conjugate()
                acc = acc + wl[k, a] * t
                nacc = nacc + wl[k, a] * ll[a] * wl[l, a].conjugate()
            mm[k, l] = acc
            nn[k, l] = nacc


cdef double _g_of(double complex[:, ::1] mm, double complex[:, ::1] nn, int m) noexcept:
    cdef double g = 0.0
    cdef int k
    for k in range(m):
        g += _term(mm[k, k].real, nn[k, k].real)
    return g


cdef void _apply_rotation(double complex[:, ::1] wl, double complex[:, ::1] mm,
                          double complex[:, ::1] nn, int m, int r, int i, int j,
                          double c, double s, double complex u) noexcept:
    cdef double complex us = u * s
    cdef double complex usc = us.conjugate()
    cdef double complex wi, wj, mi, mj, ni, nj
    cdef int a, l
    for a in range(r):
        wi = wl[i, a]
        wj = wl[j, a]
        wl[i, a] = c * wi + us * wj
        wl[j, a] = -usc * wi + c * wj
    for l in range(m):
        mi = mm[i, l]
        mj = mm[j, l]
        mm[i, l] = c * mi + us * mj
        mm[j, l] = -usc * mi + c * mj
        ni = nn[i, l]
        nj = nn[j, l]
        nn[i, l] = c * ni + us * nj
        nn[j, l] = -usc * ni + c * nj
    for l in range(m):
        mi = mm[l, i]
        mj = mm[l, j]
        mm[l, i] = c * mi + usc * mj
        mm[l, j] = -us * mi + c * mj
        ni = nn[l, i]
        nj = nn[l, j]
        nn[l, i] = c * ni + usc * nj
        nn[l, j] = -us * ni + c * nj


def refine_isometry(W, B, lam, double tr_h2, double direction, int max_sweeps,
                    double rel_tol):
    """Refine the isometry W in place; returns (value, sweeps, low, high)."""
    cdef double complex[:, ::1] wl = W
    cdef double complex[:, ::1] bl = np.ascontiguousarray(B, dtype=np.complex128)
    cdef double[::1] ll = np.ascontiguousarray(lam, dtype=np.float64)
    cdef int m = wl.shape[0]
    cdef int r = wl.shape[1]
    mm_arr = np.empty((m, m), dtype=np.complex128)
    nn_arr = np.empty((m, m), dtype=np.complex128)
    cdef double complex[:, ::1] mm = mm_arr
    cdef double complex[:, ::1] nn = nn_arr

    _compute_mn(wl, bl, ll, m, r, mm, nn)
    cdef double g = _g_of(mm, nn, m)
    cdef double value = tr_h2 - g
    cdef double low = value
    cdef double high = value
    cdef int sweeps = 0

    cdef int i, j, kind
    cdef double complex mij, nij, u
    cdef double wm, wn, mii, mjj, nii, njj, base, f0
    cdef double f_best, t_best, f_hi
    cdef double cbase, t_a, t_b, t_lo, t_hi
    cdef double v_prev, c, s, conv_scale

    if m >= 2:
        while sweeps < max_sweeps:
            sweeps += 1
            v_prev = value
            for i in range(m - 1):
                for j in range(i + 1, m):
                    for kind in range(2):
                        mij = mm[i, j]
                        nij = nn[i, j]
                        if kind == 0:
                            u = 1.0
                            wm = mij.real
                            wn = nij.real
                        else:
                            u = 1.0j
                            wm = mij.imag
                            wn = nij.imag
                        mii = mm[i, i].real
                        mjj = mm[j, j].real
                        nii = nn[i, i].real
                        njj = nn[j, j].real
                        base = _term(mii, nii) + _term(mjj, njj)
                        f0 = -direction * base
                        _line_search(mii, mjj, wm, nii, njj, wn, direction,
                                     &f_best, &t_best, &f_hi)
                        cbase = value + base
                        t_a = -direction * f_best
                        t_b = -direction * f_hi
                        t_lo = t_a if t_a < t_b else t_b
                        t_hi = t_a if t_a > t_b else t_b
                        if cbase - t_hi < low:
                            low = cbase - t_hi
                        if cbase - t_lo > high:
                            high = cbase - t_lo
                        if f_best < f0:
                            c = cos(t_best)
                            s = sin(t_best)
                            _apply_rotation(wl, mm, nn, m, r, i, j, c, s, u)
                            g = g - base + (-direction * f_best)
                            value = tr_h2 - g
            if sweeps % RESYNC_SWEEPS == 0:
                _compute_mn(wl, bl, ll, m, r, mm, nn)
                g = _g_of(mm, nn, m)
                value = tr_h2 - g
            conv_scale = abs(v_prev)
            if conv_scale < 1.0:
                conv_scale = 1.0
            if abs(value - v_prev) <= rel_tol * conv_scale:
                break

    _compute_mn(wl, bl, ll, m, r, mm, nn)
    g = _g_of(mm, nn, m)
    value = tr_h2 - g
    if value < low:
        low = value
    if value > high:
        high = value
    return value, sweeps, low, high
