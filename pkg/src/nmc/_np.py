"""Vectorised numpy kernels.

Every function here has a loop-based twin with the same signature in
:mod:`nmc._nb`. The public modules pick one through :mod:`nmc._backend`.
The scalar special-function helpers in this module double as the vectorised
implementation behind the public :mod:`nmc.kernels` API.
"""

from __future__ import annotations

import numpy as np

# ---------------------------------------------------------------- primitives


def upper_tail(z, beta, gjx, gjw):
    """int_z^inf (1+y^2)^-beta dy for z >= 1 (Gauss-Jacobi in sigma = 1/y)."""
    z = np.asarray(z, dtype=float)
    s1 = 1.0 / z
    sg = 0.5 * s1[..., None] * (1.0 + gjx)
    return (0.5 * s1) ** (2.0 * beta - 1.0) * ((1.0 + sg * sg) ** (-beta) @ gjw)


def f_core(q, beta, glx, glw, gjx, gjw, finf):
    """int_0^q (1+tau^2)^-beta dtau, odd in q."""
    q = np.asarray(q, dtype=float)
    aq = np.abs(q)
    out = np.empty_like(aq)
    small = aq <= 1.0
    if np.any(small):
        qs = q[small]
        x = qs[:, None] * glx
        out[small] = qs * ((1.0 + x * x) ** (-beta) @ glw)
    big = ~small
    if np.any(big):
        out[big] = np.sign(q[big]) * (finf - upper_tail(aq[big], beta, gjx, gjw))
    return out


def upper_any(z, beta, glx, glw, gjx, gjw, finf):
    """int_z^inf (1+y^2)^-beta dy for any z >= 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    big = z >= 1.0
    if np.any(big):
        out[big] = upper_tail(z[big], beta, gjx, gjw)
    if np.any(~big):
        out[~big] = finf - f_core(z[~big], beta, glx, glw, gjx, gjw, finf)
    return out


def q_upper(t, w, alpha, beta, glx, glw, gjx, gjw, finf):
    """int_w^inf (t^2+y^2)^-beta dy for t > 0, w > 0, smooth as t -> 0."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    t, w = np.broadcast_arrays(t, w)
    out = np.empty(t.shape)
    far = w >= t
    if np.any(far):
        tf, wf = t[far], w[far]
        sg = 0.5 * (tf / wf)[:, None] * (1.0 + gjx)
        out[far] = (2.0 * wf) ** (-(1.0 + alpha)) * ((1.0 + sg * sg) ** (-beta) @ gjw)
    near = ~far
    if np.any(near):
        tn, wn = t[near], w[near]
        out[near] = tn ** (-1.0 - alpha) * (finf - f_core(wn / tn, beta, glx, glw, gjx, gjw, finf))
    return out


def e_parts(a, q, kap, ecoef, glx, glw, gjx, gjw, finf):
    """(E, dE/dq, dE/da) for E(a, q) = F1(a, q) - q."""
    q = np.asarray(q, dtype=float)
    x = a * q
    x2 = x * x
    eq = np.expm1(-kap * np.log1p(x2))
    e = np.empty_like(q)
    ea = np.empty_like(q)
    small = np.abs(x) < 0.25
    if np.any(small):
        xs2 = x2[small]
        acc = np.zeros_like(xs2)
        accd = np.zeros_like(xs2)
        for j in range(ecoef.size - 1, 0, -1):
            acc = acc * xs2 + ecoef[j]
            accd = accd * xs2 + j * ecoef[j]
        qs = q[small]
        e[small] = qs * xs2 * acc
        ea[small] = 2.0 * a * qs**3 * accd
    big = ~small
    if np.any(big):
        xb = x[big]
        fb = f_core(xb, kap, glx, glw, gjx, gjw, finf)
        fp = (1.0 + xb * xb) ** (-kap)
        e[big] = fb / a - q[big]
        ea[big] = (xb * fp - fb) / (a * a)
    return e, eq, ea


def _increments(coef, s, t):
    """Stable cos(ks) - cos(k(s -/+ t)) for all k, shape (len(t), K+1)."""
    k = np.arange(coef.size, dtype=float)
    half = np.sin(np.multiply.outer(0.5 * t, k))
    psim = -2.0 * np.sin(np.multiply.outer(s - 0.5 * t, k)) * half
    psip = 2.0 * np.sin(np.multiply.outer(s + 0.5 * t, k)) * half
    return psim, psip


# ---------------------------------------------------------------- Phi kernel


def _g_parts(t, c, d, kap, gx, gw):
    w = c + d[:, None] * gx
    base = t[:, None] ** 2 + w * w
    p = base ** (-kap)
    dp = -2.0 * kap * w * p / base
    return p @ gw, dp @ gw, dp @ (gw * gx)


def phi_kernel(coef, s_arr, a, c, kap, t, ws, wr, tt, tw, n_nl, n_p2,
               ecoef, bcoef, gx, gw, glx, glw, gjx, gjw, finf, want_jac):
    ns = s_arr.size
    k1 = coef.size
    val_nl = np.zeros(ns)
    val_p2 = np.zeros(ns)
    dc_p2 = np.zeros(ns)
    da_nl = np.zeros(ns)
    da_p2 = np.zeros(ns)
    jac_nl = np.zeros((ns, k1 if want_jac else 0))
    jac_p2 = np.zeros((ns, k1 if want_jac else 0))
    ks = np.arange(k1, dtype=float)
    sing = ws != 0.0
    reg = wr != 0.0
    for i in range(ns):
        s = s_arr[i]
        cks = np.cos(ks * s)
        phis = coef @ cks

        # half-line grid
        psim, psip = _increments(coef, s, t)
        nm = psim @ coef
        npl = psip @ coef
        am = np.zeros(t.size)
        ap = np.zeros(t.size)
        ts = t[sing]
        e1, eq1, ea1 = e_parts(a, nm[sing] / ts, kap, ecoef, glx, glw, gjx, gjw, finf)
        e2, eq2, ea2 = e_parts(a, npl[sing] / ts, kap, ecoef, glx, glw, gjx, gjw, finf)
        val_nl[i] = np.sum(ws[sing] * (e1 + e2))
        da_nl[i] = np.sum(ws[sing] * (ea1 + ea2))
        am[sing] = ws[sing] * eq1 / ts
        ap[sing] = ws[sing] * eq2 / ts

        tr = t[reg]
        rm = 2.0 * phis - nm[reg]
        rp = 2.0 * phis - npl[reg]
        gm, gcm, gdm = _g_parts(tr, c, a * rm, kap, gx, gw)
        gp, gcp, gdp = _g_parts(tr, c, a * rp, kap, gx, gw)
        wrr = wr[reg]
        val_p2[i] = np.sum(wrr * (rm * gm + rp * gp))
        dc_p2[i] = np.sum(wrr * (rm * gcm + rp * gcp))
        da_p2[i] = np.sum(wrr * (rm * rm * gdm + rp * rp * gdp))
        if want_jac:
            bm = np.zeros(t.size)
            bp = np.zeros(t.size)
            bm[reg] = wrr * (tr * tr + (c + a * rm) ** 2) ** (-kap)
            bp[reg] = wrr * (tr * tr + (c + a * rp) ** 2) ** (-kap)
            jac_nl[i] += am @ psim + ap @ psip
            jac_p2[i] += (bm + bp).sum() * 2.0 * cks - bm @ psim - bp @ psip

        # exact periodic tails beyond the truncation radius
        psim, psip = _increments(coef, s, tt)
        nm = psim @ coef
        npl = psip @ coef
        rm = 2.0 * phis - nm
        rp = 2.0 * phis - npl
        tnl = np.zeros(tt.size)
        tda = np.zeros(tt.size)
        am = np.zeros(tt.size)
        ap = np.zeros(tt.size)
        for j in range(1, n_nl + 1):
            wj = tw[2 * j]
            cj = ecoef[j] * a ** (2 * j)
            sm = nm ** (2 * j + 1) + npl ** (2 * j + 1)
            tnl += wj * cj * sm
            if j >= 1 and a != 0.0:
                tda += wj * ecoef[j] * 2 * j * a ** (2 * j - 1) * sm
            am += wj * cj * (2 * j + 1) * nm ** (2 * j)
            ap += wj * cj * (2 * j + 1) * npl ** (2 * j)
        val_nl[i] += tnl.sum()
        da_nl[i] += tda.sum()

        wm = c + a * rm[:, None] * gx
        wp = c + a * rp[:, None] * gx
        bm = np.zeros(tt.size)
        bp = np.zeros(tt.size)
        tp2 = np.zeros(tt.size)
        tdc = np.zeros(tt.size)
        tdap = np.zeros(tt.size)
        for j in range(n_p2 + 1):
            wj = tw[2 * j] * bcoef[j]
            mm = (wm ** (2 * j)) @ gw
            mp = (wp ** (2 * j)) @ gw
            tp2 += wj * (rm * mm + rp * mp)
            if j > 0:
                cm = (2 * j * wm ** (2 * j - 1)) @ gw
                cp = (2 * j * wp ** (2 * j - 1)) @ gw
                dm = (2 * j * wm ** (2 * j - 1)) @ (gw * gx)
                dp = (2 * j * wp ** (2 * j - 1)) @ (gw * gx)
                tdc += wj * (rm * cm + rp * cp)
                tdap += wj * (rm * rm * dm + rp * rp * dp)
            bm += wj * (c + a * rm) ** (2 * j)
            bp += wj * (c + a * rp) ** (2 * j)
        val_p2[i] += tp2.sum()
        dc_p2[i] += tdc.sum()
        da_p2[i] += tdap.sum()
        if want_jac:
            jac_nl[i] += am @ psim + ap @ psip
            jac_p2[i] += (bm + bp).sum() * 2.0 * cks - bm @ psim - bp @ psip
    return val_nl, val_p2, dc_p2, da_nl, da_p2, jac_nl, jac_p2


# ---------------------------------------------------------------- H(u) kernel


def graph_kernel(coef, freq, s_arr, alpha, kap, t, ws, wr, tt, tw, n_ser,
                 fser, glx, glw, gjx, gjw, finf):
    """Returns (first, second) integrals per s; see graph_nmc for assembly."""
    ns = s_arr.size
    first = np.zeros(ns)
    second = np.zeros(ns)
    ks = np.arange(coef.size, dtype=float)
    sing = ws != 0.0
    reg = wr != 0.0
    for i in range(ns):
        s = s_arr[i] * freq
        us = coef @ np.cos(ks * s)
        psim, psip = _increments(coef, s, t * freq)
        nm = psim @ coef
        npl = psip @ coef
        ts = t[sing]
        fq = f_core(nm[sing] / ts, kap, glx, glw, gjx, gjw, finf)
        fp = f_core(npl[sing] / ts, kap, glx, glw, gjx, gjw, finf)
        first[i] = np.sum(ws[sing] * (fq + fp))
        tr = t[reg]
        qm = q_upper(tr, 2.0 * us - nm[reg], alpha, kap, glx, glw, gjx, gjw, finf)
        qp = q_upper(tr, 2.0 * us - npl[reg], alpha, kap, glx, glw, gjx, gjw, finf)
        second[i] = np.sum(wr[reg] * (qm + qp))

        psim, psip = _increments(coef, s, tt * freq)
        nm = psim @ coef
        npl = psip @ coef
        wm = 2.0 * us - nm
        wp = 2.0 * us - npl
        for j in range(n_ser + 1):
            wj = tw[2 * j] * fser[j]
            first[i] += np.sum(wj * (nm ** (2 * j + 1) + npl ** (2 * j + 1)))
            second[i] -= np.sum(wj * (wm ** (2 * j + 1) + wp ** (2 * j + 1)))
    return first, second


# ---------------------------------------------------------------- ray casting


def gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, r):
    """Level function along the ray x + r w; positive inside the set.

    Written as a divided difference in r so that it stays well conditioned
    as r -> 0 for points x on the boundary. ``lead`` is its value at r = 0,
    supplied in closed form by the caller: computed from w it would suffer
    cancellation for nearly tangent rays.
    """
    r = np.asarray(r, dtype=float)
    if kind == 0:
        return lead - r
    if kind == 1:
        return lead - r * (w1 * w1 / prm[0] ** 2 + w2 * w2 / prm[1] ** 2)
    if kind == 2:
        return np.minimum(lead + 0.0 * r, 2.0 * prm[0] + r * w2)
    up, lo = band_parts(coef, freq, x1, x2, w1, w2, lead, r)
    return np.minimum(up, lo)


def _z_minus_sin(z):
    """(z - sin z)/z^2, stable near 0."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    small = np.abs(z) < 0.5
    ser = z * (1 / 6 - z2 * (1 / 120 - z2 * (1 / 5040 - z2 * (1 / 362880 - z2 / 39916800))))
    safe = np.where(small, 1.0, z)
    return np.where(small, ser, (safe - np.sin(safe)) / (safe * safe))


def band_parts(coef, freq, x1, x2, w1, w2, lead, r):
    """Upper and lower level functions of a graph band along a ray.

    The upper one is lead + r w1^2 Q(r w1) with the second divided
    difference Q(d) = (u(x1 + d) - u(x1) - u'(x1) d)/d^2; the lower one is
    x2 + r w2 + u(x1 + r w1).
    """
    r = np.asarray(r, dtype=float)
    d = r * w1
    q = np.zeros_like(r)
    uu = np.full_like(r, coef[0])
    for k in range(1, coef.size):
        om = k * freq
        z = om * d
        half = np.sinc(0.5 * z / np.pi)
        q += coef[k] * om * om * (np.sin(om * x1) * _z_minus_sin(z) - 0.5 * np.cos(om * x1) * half * half)
        uu += coef[k] * np.cos(om * (x1 + d))
    return lead + r * w1 * w1 * q, x2 + r * w2 + uu


def curv_bounds(coef, freq, w1):
    """Bounds on the second r-derivatives of the two band level functions."""
    om = np.arange(1, coef.size) * freq * abs(w1)
    c = np.abs(coef[1:])
    return float(c @ om ** 3) / 3.0, float(c @ om ** 2)


def _refine(coef, freq, x1, x2, w1, w2, lead, grid):
    """Split grid intervals until the band indicator is certified constant on each
    interval whose end states agree (no hidden pair of crossings)."""
    mu, ml = curv_bounds(coef, freq, w1)
    for _ in range(100):
        up, lo = band_parts(coef, freq, x1, x2, w1, w2, lead, grid)
        ins = np.minimum(up, lo) > 0.0
        q = 0.125 * np.diff(grid) ** 2
        eu, el = mu * q, ml * q
        neg = (np.maximum(up[:-1], up[1:]) < -eu) | (np.maximum(lo[:-1], lo[1:]) < -el)
        pos = (np.minimum(up[:-1], up[1:]) > eu) & (np.minimum(lo[:-1], lo[1:]) > el)
        wide = np.diff(grid) > 1e-13 * (1.0 + grid[1:])
        split = (ins[:-1] == ins[1:]) & ~neg & ~pos & wide
        if not np.any(split):
            return grid
        mids = 0.5 * (grid[:-1] + grid[1:])[split]
        grid = np.sort(np.concatenate([grid, mids]))
    return grid


def march_grid(r_start, h_max, r_end):
    rs = [0.0]
    r = r_start
    while True:
        rc = min(r, r_end)
        rs.append(rc)
        if rc >= r_end:
            break
        r = min(rc * 1.5, rc + h_max)
    return np.array(rs)


def march(kind, prm, coef, freq, x1, x2, w1, w2, lead, r_end, r_start, h_max, max_cross):
    grid = march_grid(r_start, h_max, r_end)
    if kind == 3:
        grid = _refine(coef, freq, x1, x2, w1, w2, lead, grid)
    ins = gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, grid) > 0.0
    idx = np.nonzero(ins[1:] != ins[:-1])[0]
    if idx.size > max_cross:
        return None, bool(ins[0])
    lo = grid[idx].copy()
    hi = grid[idx + 1].copy()
    side = ins[idx]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi) & (hi - lo > 4e-16 * hi)
        if not np.any(active):
            break
        gm = gap(kind, prm, coef, freq, x1, x2, w1, w2, lead, mid) > 0.0
        same = gm == side
        lo = np.where(active & same, mid, lo)
        hi = np.where(active & ~same, mid, hi)
    radii = 0.5 * (lo + hi)
    jumps = np.where(ins[idx + 1], 2.0, -2.0)
    return (radii, jumps), bool(ins[0])


def _lead(kind, prm, x1, x2, t1, t2, n1, n2, cb, sb):
    """Level function at r = 0 along cos(beta) T + sin(beta) n, with the
    tangential part (zero in exact arithmetic) dropped."""
    if kind == 0:
        return -2.0 * sb * (n1 * (x1 - prm[0]) + n2 * (x2 - prm[1]))
    if kind == 1:
        return -2.0 * sb * (n1 * x1 / prm[0] ** 2 + n2 * x2 / prm[1] ** 2)
    if kind == 2:
        return -(cb * t2 + sb * n2)
    return sb * (t2 * n1 - t1 * n2) / t1


def pair_value(kind, prm, coef, freq, x1, x2, t1, t2, n1, n2, cb, sb, alpha, mode,
               half_width, umax, r_far, r_start, h_max, max_cross):
    w1 = cb * t1 + sb * n1
    w2 = cb * t2 + sb * n2
    total = 0.0
    init = 0
    rbox = np.inf
    if half_width > 0.0 and w1 != 0.0:
        rbox = half_width / abs(w1)
    for side in (1.0, -1.0):
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
        res, ins0 = march(kind, prm, coef, freq, x1, x2, d1, d2, lead, r_end, r_start, h_max, max_cross)
        if res is None:
            return np.nan
        init += 1 if ins0 else -1
        radii, jumps = res
        if mode == 0:
            cut = rbox ** (-alpha) if np.isfinite(rbox) else 0.0
            total += np.sum(jumps * (radii ** (-alpha) - cut)) / alpha
        else:
            cut = rbox ** (-1.0 - alpha) if np.isfinite(rbox) else 0.0
            total += side * np.sum(jumps * (radii ** (-1.0 - alpha) - cut)) / (1.0 + alpha)
    if init != 0:
        return np.nan
    if mode == 1 and np.isfinite(rbox):
        total -= 2.0 * rbox ** (-1.0 - alpha) / (1.0 + alpha)
    return float(total)
