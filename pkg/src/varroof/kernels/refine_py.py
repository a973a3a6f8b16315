"""Pure-Python refinement kernel for the ensemble-variance oracle.

Cyclic coordinate descent over two-row Givens rotations of the ensemble
isometry W.  The averaged variance of the induced ensemble is

    tr_h2 - sum_k (W B W^dagger)_kk^2 / (W D W^dagger)_kk

with B and D fixed by the state and observable, so each candidate rotation
only touches two diagonal entries of the maintained m x m matrices M and N.
That makes a line-search evaluation O(1) and a full accepted update O(m).

The compiled kernel in ``_refine.pyx`` is a line-for-line translation; keep
the operation order of the two in lockstep.
"""

import math

P_FLOOR = 1e-14          # member-weight guard for the 1/p_k term
SCAN_POINTS = 16         # coarse scan of one period before golden section
GOLDEN_TOL = 1e-8        # bracket width at which the angle search stops
RESYNC_SWEEPS = 64       # recompute M, N from W this often to cap drift
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _term(mm, nn):
    if nn > P_FLOOR:
        return mm * mm / nn
    return 0.0


def _plane_objective(theta, mii, mjj, wm, nii, njj, wn, direction):
    # f = -direction * (contribution of rows i and j after rotating by theta)
    c = math.cos(theta)
    s = math.sin(theta)
    cc = c * c
    ss = s * s
    cs2 = 2.0 * c * s
    mi = cc * mii + ss * mjj + cs2 * wm
    mj = ss * mii + cc * mjj - cs2 * wm
    ni = cc * nii + ss * njj + cs2 * wn
    nj = ss * nii + cc * njj - cs2 * wn
    return -direction * (_term(mi, ni) + _term(mj, nj))


def _line_search(mii, mjj, wm, nii, njj, wn, direction):
    """Minimize the plane objective over the rotation angle.

    A coarse scan over one period (which always includes theta = 0) brackets
    the best sample, then golden-section search refines it.  Returns the best
    angle, its objective, and the largest objective value seen.
    """
    step = math.pi / SCAN_POINTS
    best_f = math.inf
    best_t = 0.0
    f_hi = -math.inf
    for idx in range(SCAN_POINTS):
        theta = -0.5 * math.pi + step * idx
        f = _plane_objective(theta, mii, mjj, wm, nii, njj, wn, direction)
        if f < best_f:
            best_f = f
            best_t = theta
        if f > f_hi:
            f_hi = f
    a = best_t - step
    b = best_t + step
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1 = _plane_objective(x1, mii, mjj, wm, nii, njj, wn, direction)
    f2 = _plane_objective(x2, mii, mjj, wm, nii, njj, wn, direction)
    for f, t in ((f1, x1), (f2, x2)):
        if f < best_f:
            best_f = f
            best_t = t
        if f > f_hi:
            f_hi = f
    while (b - a) > GOLDEN_TOL:
        if f1 < f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - INVPHI * (b - a)
            f1 = _plane_objective(x1, mii, mjj, wm, nii, njj, wn, direction)
            f_new, t_new = f1, x1
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + INVPHI * (b - a)
            f2 = _plane_objective(x2, mii, mjj, wm, nii, njj, wn, direction)
            f_new, t_new = f2, x2
        if f_new < best_f:
            best_f = f_new
            best_t = t_new
        if f_new > f_hi:
            f_hi = f_new
    return best_f, best_t, f_hi


def _compute_mn(wl, bl, ll, m, r, mm, nn):
    for k in range(m):
        for l in range(m):
            acc = 0j
            nacc = 0j
            for a in range(r):
                t = 0j
                for b in range(r):
                    t += bl[a][b] * wl[l][b].conjugate()
                acc += wl[k][a] * t
                nacc += wl[k][a] * ll[a] * wl[l][a].conjugate()
            mm[k][l] = acc
            nn[k][l] = nacc


def _g_of(mm, nn, m):
    g = 0.0
    for k in range(m):
        g += _term(mm[k][k].real, nn[k][k].real)
    return g


def _apply_rotation(wl, mm, nn, m, r, i, j, c, s, u):
    us = u * s
    usc = us.conjugate()
    for a in range(r):
        wi = wl[i][a]
        wj = wl[j][a]
        wl[i][a] = c * wi + us * wj
        wl[j][a] = -usc * wi + c * wj
    for l in range(m):
        mi = mm[i][l]
        mj = mm[j][l]
        mm[i][l] = c * mi + us * mj
        mm[j][l] = -usc * mi + c * mj
        ni = nn[i][l]
        nj = nn[j][l]
        nn[i][l] = c * ni + us * nj
        nn[j][l] = -usc * ni + c * nj
    for l in range(m):
        mi = mm[l][i]
        mj = mm[l][j]
        mm[l][i] = c * mi + usc * mj
        mm[l][j] = -us * mi + c * mj
        ni = nn[l][i]
        nj = nn[l][j]
        nn[l][i] = c * ni + usc * nj
        nn[l][j] = -us * ni + c * nj


def refine_isometry(W, B, lam, tr_h2, direction, max_sweeps, rel_tol):
    """Refine the isometry W in place; returns (value, sweeps, low, high).

    direction +1 drives the averaged variance down, -1 drives it up.  ``low``
    and ``high`` bound the value of every ensemble evaluated along the way,
    including all rejected line-search candidates.
    """
    m, r = W.shape
    wl = [[complex(W[k, a]) for a in range(r)] for k in range(m)]
    bl = [[complex(B[a, b]) for b in range(r)] for a in range(r)]
    ll = [float(x) for x in lam]
    mm = [[0j] * m for _ in range(m)]
    nn = [[0j] * m for _ in range(m)]

    _compute_mn(wl, bl, ll, m, r, mm, nn)
    g = _g_of(mm, nn, m)
    value = tr_h2 - g
    low = value
    high = value
    sweeps = 0

    if m >= 2:
        while sweeps < max_sweeps:
            sweeps += 1
            v_prev = value
            for i in range(m - 1):
                for j in range(i + 1, m):
                    for kind in (0, 1):
                        mij = mm[i][j]
                        nij = nn[i][j]
                        if kind == 0:
                            u = 1.0 + 0.0j
                            wm = mij.real
                            wn = nij.real
                        else:
                            u = 1.0j
                            wm = mij.imag
                            wn = nij.imag
                        mii = mm[i][i].real
                        mjj = mm[j][j].real
                        nii = nn[i][i].real
                        njj = nn[j][j].real
                        base = _term(mii, nii) + _term(mjj, njj)
                        f0 = -direction * base
                        f_best, t_best, f_hi = _line_search(
                            mii, mjj, wm, nii, njj, wn, direction
                        )
                        # every evaluated angle is a valid ensemble; fold its
                        # value into the seen range
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
                            c = math.cos(t_best)
                            s = math.sin(t_best)
                            _apply_rotation(wl, mm, nn, m, r, i, j, c, s, u)
                            g = g - base + (-direction * f_best)
                            value = tr_h2 - g
            if sweeps % RESYNC_SWEEPS == 0:
                _compute_mn(wl, bl, ll, m, r, mm, nn)
                g = _g_of(mm, nn, m)
                value = tr_h2 - g
            if abs(value - v_prev) <= rel_tol * max(1.0, abs(v_prev)):
                break

    _compute_mn(wl, bl, ll, m, r, mm, nn)
    g = _g_of(mm, nn, m)
    value = tr_h2 - g
    if value < low:
        low = value
    if value > high:
        high = value
    for k in range(m):
        for a in range(r):
            W[k, a] = wl[k][a]
    return value, sweeps, low, high
