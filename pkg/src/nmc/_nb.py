"""Numba loop kernels; one-to-one twins of the functions in :mod:`nmc._np`."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def _upper_scalar(z, beta, gjx, gjw):
    s1 = 1.0 / z
    acc = 0.0
    for i in range(gjx.size):
        sg = 0.5 * s1 * (1.0 + gjx[i])
        acc += gjw[i] * (1.0 + sg * sg) ** (-beta)
    return (0.5 * s1) ** (2.0 * beta - 1.0) * acc


@njit(**_JIT)
def _f_scalar(q, beta, glx, glw, gjx, gjw, finf):
    aq = abs(q)
    if aq <= 1.0:
        acc = 0.0
        for i in range(glx.size):
            x = q * glx[i]
            acc += glw[i] * (1.0 + x * x) ** (-beta)
        return q * acc
    v = finf - _upper_scalar(aq, beta, gjx, gjw)
    return v if q > 0.0 else -v


@njit(**_JIT)
def _q_scalar(t, w, alpha, beta, glx, glw, gjx, gjw, finf):
    if w >= t:
        s1 = t / w
        acc = 0.0
        for i in range(gjx.size):
            sg = 0.5 * s1 * (1.0 + gjx[i])
            acc += gjw[i] * (1.0 + sg * sg) ** (-beta)
        return (2.0 * w) ** (-(1.0 + alpha)) * acc
    return t ** (-1.0 - alpha) * (finf - _f_scalar(w / t, beta, glx, glw, gjx, gjw, finf))


@njit(**_JIT)
def _e_parts(a, q, kap, ecoef, glx, glw, gjx, gjw, finf):
    x = a * q
    x2 = x * x
    eq = math.expm1(-kap * math.log1p(x2))
    if abs(x) < 0.25:
        acc = 0.0
        accd = 0.0
        for j in range(ecoef.size - 1, 0, -1):
            acc = acc * x2 + ecoef[j]
            accd = accd * x2 + j * ecoef[j]
        return q * x2 * acc, eq, 2.0 * a * q * q * q * accd
    f = _f_scalar(x, kap, glx, glw, gjx, gjw, finf)
    fp = (1.0 + x2) ** (-kap)
    return f / a - q, eq, (x * fp - f) / (a * a)


@njit(**_JIT)
def _increments(coef, s, t, psim, psip):
    am = s - 0.5 * t
    ap = s + 0.5 * t
    ch = 0.5 * t
    cam, sam = math.cos(am), math.sin(am)
    cap, sap = math.cos(ap), math.sin(ap)
    cch, sch = math.cos(ch), math.sin(ch)
    xm, ym = 1.0, 0.0
    xp, yp = 1.0, 0.0
    xc, yc = 1.0, 0.0
    nm = 0.0
    npl = 0.0
    psim[0] = 0.0
    psip[0] = 0.0
    for k in range(1, coef.size):
        xm, ym = xm * cam - ym * sam, xm * sam + ym * cam
        xp, yp = xp * cap - yp * sap, xp * sap + yp * cap
        xc, yc = xc * cch - yc * sch, xc * sch + yc * cch
        pm = -2.0 * ym * yc
        pp = 2.0 * yp * yc
        psim[k] = pm
        psip[k] = pp
        nm += coef[k] * pm
        npl += coef[k] * pp
    return nm, npl


@njit(**_JIT)
def _g_parts(t, c, d, kap, gx, gw):
    g = 0.0
    gc = 0.0
    gd = 0.0
    for m in range(gx.size):
        w = c + d * gx[m]
        base = t * t + w * w
        p = base ** (-kap)
        dp = -2.0 * kap * w * p / base
        g += gw[m] * p
        gc += gw[m] * dp
        gd += gw[m] * gx[m] * dp
    return g, gc, gd


@njit(**_JIT)
def phi_kernel(coef, s_arr, a, c, kap, t, ws, wr, tt, tw, n_nl, n_p2,
               ecoef, bcoef, gx, gw, glx, glw, gjx, gjw, finf, want_jac):
    ns = s_arr.size
    k1 = coef.size
    val_nl = np.zeros(ns)
    val_p2 = np.zeros(ns)
    dc_p2 = np.zeros(ns)
    da_nl = np.zeros(ns)
    da_p2 = np.zeros(ns)
    kj = k1 if want_jac else 0
    jac_nl = np.zeros((ns, kj))
    jac_p2 = np.zeros((ns, kj))
    psim = np.empty(k1)
    psip = np.empty(k1)
    cks = np.empty(k1)
    mm = np.empty(n_p2 + 1)
    mp = np.empty(n_p2 + 1)
    cm = np.empty(n_p2 + 1)
    cp = np.empty(n_p2 + 1)
    dm = np.empty(n_p2 + 1)
    dp = np.empty(n_p2 + 1)
    for i in range(ns):
        s = s_arr[i]
        phis = 0.0
        for k in range(k1):
            cks[k] = math.cos(k * s)
            phis += coef[k] * cks[k]
        nl = 0.0
        p2 = 0.0
        dcs = 0.0
        dan = 0.0
        dap = 0.0
        for n in range(t.size):
            tn = t[n]
            nm, npl = _increments(coef, s, tn, psim, psip)
            am = 0.0
            ap = 0.0
            bm = 0.0
            bp = 0.0
            if ws[n] != 0.0:
                e1, eq1, ea1 = _e_parts(a, nm / tn, kap, ecoef, glx, glw, gjx, gjw, finf)
                e2, eq2, ea2 = _e_parts(a, npl / tn, kap, ecoef, glx, glw, gjx, gjw, finf)
                nl += ws[n] * (e1 + e2)
                dan += ws[n] * (ea1 + ea2)
                am = ws[n] * eq1 / tn
                ap = ws[n] * eq2 / tn
            if wr[n] != 0.0:
                rm = 2.0 * phis - nm
                rp = 2.0 * phis - npl
                gm, gcm, gdm = _g_parts(tn, c, a * rm, kap, gx, gw)
                gp, gcp, gdp = _g_parts(tn, c, a * rp, kap, gx, gw)
                p2 += wr[n] * (rm * gm + rp * gp)
                dcs += wr[n] * (rm * gcm + rp * gcp)
                dap += wr[n] * (rm * rm * gdm + rp * rp * gdp)
                if want_jac:
                    wm = c + a * rm
                    wp = c + a * rp
                    bm = wr[n] * (tn * tn + wm * wm) ** (-kap)
                    bp = wr[n] * (tn * tn + wp * wp) ** (-kap)
            if want_jac:
                bs = 2.0 * (bm + bp)
                for k in range(k1):
                    jac_nl[i, k] += am * psim[k] + ap * psip[k]
                    jac_p2[i, k] += bs * cks[k] - bm * psim[k] - bp * psip[k]

        for n in range(tt.size):
            nm, npl = _increments(coef, s, tt[n], psim, psip)
            rm = 2.0 * phis - nm
            rp = 2.0 * phis - npl
            am = 0.0
            ap = 0.0
            a2j = 1.0
            for j in range(1, n_nl + 1):
                a2j *= a * a
                wj = tw[2 * j, n]
                nm2 = nm ** (2 * j)
                np2 = npl ** (2 * j)
                sm = nm2 * nm + np2 * npl
                cj = ecoef[j] * a2j
                nl += wj * cj * sm
                if a != 0.0:
                    dan += wj * ecoef[j] * 2 * j * (a2j / a) * sm
                am += wj * cj * (2 * j + 1) * nm2
                ap += wj * cj * (2 * j + 1) * np2
            for j in range(n_p2 + 1):
                mm[j] = 0.0
                mp[j] = 0.0
                cm[j] = 0.0
                cp[j] = 0.0
                dm[j] = 0.0
                dp[j] = 0.0
            for m in range(gx.size):
                w1 = c + a * rm * gx[m]
                w2 = c + a * rp * gx[m]
                q1 = 1.0
                q2 = 1.0
                for j in range(n_p2 + 1):
                    mm[j] += gw[m] * q1
                    mp[j] += gw[m] * q2
                    if j > 0:
                        cm[j] += gw[m] * 2 * j * q1 / w1
                        cp[j] += gw[m] * 2 * j * q2 / w2
                        dm[j] += gw[m] * gx[m] * 2 * j * q1 / w1
                        dp[j] += gw[m] * gx[m] * 2 * j * q2 / w2
                    q1 *= w1 * w1
                    q2 *= w2 * w2
            bm = 0.0
            bp = 0.0
            wem = c + a * rm
            wep = c + a * rp
            z1 = 1.0
            z2 = 1.0
            for j in range(n_p2 + 1):
                wj = tw[2 * j, n] * bcoef[j]
                p2 += wj * (rm * mm[j] + rp * mp[j])
                dcs += wj * (rm * cm[j] + rp * cp[j])
                dap += wj * (rm * rm * dm[j] + rp * rp * dp[j])
                bm += wj * z1
                bp += wj * z2
                z1 *= wem * wem
                z2 *= wep * wep
            if want_jac:
                bs = 2.0 * (bm + bp)
                for k in range(k1):
                    jac_nl[i, k] += am * psim[k] + ap * psip[k]
                    jac_p2[i, k] += bs * cks[k] - bm * psim[k] - bp * psip[k]
        val_nl[i] = nl
        val_p2[i] = p2
        dc_p2[i] = dcs
        da_nl[i] = dan
        da_p2[i] = dap
    return val_nl, val_p2, dc_p2, da_nl, da_p2, jac_nl, jac_p2


@njit(**_JIT)
def graph_kernel(coef, freq, s_arr, alpha, kap, t, ws, wr, tt, tw, n_ser,
                 fser, glx, glw, gjx, gjw, finf):
    ns = s_arr.size
    k1 = coef.size
    first = np.zeros(ns)
    second = np.zeros(ns)
    psim = np.empty(k1)
    psip = np.empty(k1)
    for i in range(ns):
        s = s_arr[i] * freq
        us = 0.0
        for k in range(k1):
            us += coef[k] * math.cos(k * s)
        f1 = 0.0
        f2 = 0.0
        for n in range(t.size):
            tn = t[n]
            nm, npl = _increments(coef, s, tn * freq, psim, psip)
            if ws[n] != 0.0:
                f1 += ws[n] * (_f_scalar(nm / tn, kap, glx, glw, gjx, gjw, finf)
                               + _f_scalar(npl / tn, kap, glx, glw, gjx, gjw, finf))
            if wr[n] != 0.0:
                f2 += wr[n] * (_q_scalar(tn, 2.0 * us - nm, alpha, kap, glx, glw, gjx, gjw, finf)
                               + _q_scalar(tn, 2.0 * us - npl, alpha, kap, glx, glw, gjx, gjw, finf))
        for n in range(tt.size):
            nm, npl = _increments(coef, s, tt[n] * freq, psim, psip)
            wm = 2.0 * us - nm
            wp = 2.0 * us - npl
            for j in range(n_ser + 1):
                wj = tw[2 * j, n] * fser[j]
                f1 += wj * (nm ** (2 * j + 1) + npl ** (2 * j + 1))
                f2 -= wj * (wm ** (2 * j + 1) + wp ** (2 * j + 1))
        first[i] = f1
        second[i] = f2
    return first, second


@njit(**_JIT)
def _zms(z):
    # (z - sin z)/z^2
    if abs(z) < 0.5:
        z2 = z * z
        return z * (1 / 6 - z2 * (1 / 120 - z2 * (1 / 5040 - z2 * (1 / 362880 - z2 / 39916800))))
    return (z - math.sin(z)) / (z * z)


@njit(**_JIT)
def _band_parts(coef, freq, x1, x2, w1, w2, lead, r):
    # upper part: lead + r w1^2 times a second divided difference of u
    h = r * w1
    q = 0.0
    uu = coef[0]
    for k in range(1, coef.size):
        om = k * freq
        z = om * h
        hz = 0.5 * z
        sc = 1.0 if hz == 0.0 else math.sin(hz) / hz
        q += coef[k] * om * om * (math.sin(om * x1) * _zms(z) - 0.5 * math.cos(om * x1) * sc * sc)
        uu += coef[k] * math.cos(om * (x1 + h))
    return lead + r * w1 * w1 * q, x2 + r * w2 + uu


@njit(**_JIT)
def _gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, r):
    if kind == 0:
        return lead - r
    if kind == 1:
        return lead - r * (w1 * w1 / prm[0] ** 2 + w2 * w2 / prm[1] ** 2)
    if kind == 2:
        return min(lead, 2.0 * prm[0] + r * w2)
    up, lo = _band_parts(coef, freq, x1, x2, w1, w2, lead, r)
    return min(up, lo)


@njit(**_JIT)
def _lead(kind, prm, x1, x2, t1, t2, n1, n2, cb, sb):
    # level function at r = 0 with its exactly vanishing tangential part dropped
    if kind == 0:
        return -2.0 * sb * (n1 * (x1 - prm[0]) + n2 * (x2 - prm[1]))
    if kind == 1:
        return -2.0 * sb * (n1 * x1 / prm[0] ** 2 + n2 * x2 / prm[1] ** 2)
    if kind == 2:
        return -(cb * t2 + sb * n2)
    return sb * (t2 * n1 - t1 * n2) / t1


@njit(**_JIT)
def _curv_bounds(coef, freq, w1):
    mu = 0.0
    ml = 0.0
    a = abs(w1)
    for k in range(1, coef.size):
        om = k * freq * a
        mu += abs(coef[k]) * om ** 3 / 3.0
        ml += abs(coef[k]) * om ** 2
    return mu, ml


@njit(**_JIT)
def _state_fixed(coef, freq, x1, x2, w1, w2, lead, a, b, mu, ml):
    """True if the band indicator provably keeps its value on [a, b]."""
    ua, la = _band_parts(coef, freq, x1, x2, w1, w2, lead, a)
    ub, lb = _band_parts(coef, freq, x1, x2, w1, w2, lead, b)
    q = 0.125 * (b - a) ** 2
    eu = mu * q
    el = ml * q
    if max(ua, ub) < -eu or max(la, lb) < -el:
        return True
    return min(ua, ub) > eu and min(la, lb) > el


@njit(**_JIT)
def _bisect(kind, prm, coef, freq, x1, x2, w1, w2, lead, lo, hi, inside):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if not (mid > lo and mid < hi and hi - lo > 4e-16 * hi):
            break
        if (_gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, mid) > 0.0) == inside:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit(**_JIT)
def _march(kind, prm, coef, freq, x1, x2, w1, w2, lead, r_end, r_start, h_max, max_cross,
           out_r, out_d):
    inside0 = _gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, 0.0) > 0.0
    inside = inside0
    n = 0
    mu = 0.0
    ml = 0.0
    if kind == 3:
        mu, ml = _curv_bounds(coef, freq, w1)
    stack_a = np.empty(96)
    stack_b = np.empty(96)
    r_prev = 0.0
    r = r_start
    while True:
        rc = r if r < r_end else r_end
        # intervals are processed left to right; a same-sign interval on a
        # band is split until the indicator is certified constant on it
        top = 0
        stack_a[0] = r_prev
        stack_b[0] = rc
        top = 1
        while top > 0:
            top -= 1
            a = stack_a[top]
            b = stack_b[top]
            ins = _gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, b) > 0.0
            if ins == inside:
                if (kind == 3 and top < 94 and b - a > 1e-13 * (1.0 + b)
                        and not _state_fixed(coef, freq, x1, x2, w1, w2, lead, a, b, mu, ml)):
                    m = 0.5 * (a + b)
                    stack_a[top] = m
                    stack_b[top] = b
                    stack_a[top + 1] = a
                    stack_b[top + 1] = m
                    top += 2
                continue
            if n >= max_cross:
                return -1, inside0
            out_r[n] = _bisect(kind, prm, coef, freq, x1, x2, w1, w2, lead, a, b, inside)
            out_d[n] = 2.0 if ins else -2.0
            n += 1
            inside = ins
        if rc >= r_end:
            break
        r_prev = rc
        r = min(rc * 1.5, rc + h_max)
    return n, inside0


@njit(**_JIT)
def pair_value(kind, prm, coef, freq, x1, x2, t1, t2, n1, n2, cb, sb, alpha, mode,
               half_width, umax, r_far, r_start, h_max, max_cross):
    w1 = cb * t1 + sb * n1
    w2 = cb * t2 + sb * n2
    out_r = np.empty(max_cross)
    out_d = np.empty(max_cross)
    total = 0.0
    init = 0
    rbox = np.inf
    if half_width > 0.0 and w1 != 0.0:
        rbox = half_width / abs(w1)
    finite = rbox < np.inf
    for side_i in range(2):
        side = 1.0 if side_i == 0 else -1.0
        d1 = side * w1
        d2 = side * w2
        if kind >= 2:
            if d2 > 0.0:
                rex = (umax - x2) / d2
            elif d2 < 0.0:
                rex = (-umax - x2) / d2
            else:
                rex = np.inf
            rex = rex * (1.0 + 1e-9) + 1e-12
        else:
            rex = r_far
        r_end = min(rbox, rex)
        lead = side * _lead(kind, prm, x1, x2, t1, t2, n1, n2, cb, sb)
        n, ins0 = _march(kind, prm, coef, freq, x1, x2, d1, d2, lead, r_end, r_start, h_max,
                         max_cross, out_r, out_d)
        if n < 0:
            return np.nan
        init += 1 if ins0 else -1
        if mode == 0:
            cut = rbox ** (-alpha) if finite else 0.0
            for i in range(n):
                total += out_d[i] * (out_r[i] ** (-alpha) - cut) / alpha
        else:
            cut = rbox ** (-1.0 - alpha) if finite else 0.0
            for i in range(n):
                total += side * out_d[i] * (out_r[i] ** (-1.0 - alpha) - cut) / (1.0 + alpha)
    if init != 0:
        return np.nan
    if mode == 1 and finite:
        total -= 2.0 * rbox ** (-1.0 - alpha) / (1.0 + alpha)
    return total
