"""Compiled numerical core.

Everything here works on raw angles (floats in [0, 2pi)) and a structure
tuple ``S = (kind, eps, table)`` so that numba can specialize once per
process.  The public modules wrap these kernels with value types and
error handling; nothing in here raises, failures come back as NaN.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

CANONICAL = 0
SINE = 1
POWER = 2
TABULATED = 3

XTOL = 1e-18
MAXITER = 200

_jit = njit(cache=True, nogil=True)


# ---------------------------------------------------------------- distances


@_jit
def wrap(t):
    t = t - TWO_PI * math.floor(t / TWO_PI)
    if t >= TWO_PI:
        t = 0.0
    return t


@_jit
def offset(t, start):
    """Counterclockwise angular offset of ``t`` from ``start``."""
    return wrap(t - start)


@_jit
def angle_gap(a, b):
    d = abs(wrap(a) - wrap(b))
    return min(d, TWO_PI - d)


@_jit
def chordal(x, y):
    return 2.0 * abs(math.sin(0.5 * (x - y)))


@_jit
def _table_factor(table, x, y):
    n = table.shape[0]
    fx = wrap(x) / TWO_PI * n
    fy = wrap(y) / TWO_PI * n
    i0 = int(math.floor(fx)) % n
    j0 = int(math.floor(fy)) % n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    tx = fx - math.floor(fx)
    ty = fy - math.floor(fy)
    g = ((1.0 - tx) * (1.0 - ty) * table[i0, j0]
         + tx * (1.0 - ty) * table[i1, j0]
         + (1.0 - tx) * ty * table[i0, j1]
         + tx * ty * table[i1, j1])
    return g


@_jit
def dist(S, x, y):
    kind = S[0]
    eps = S[1]
    d = chordal(x, y)
    if kind == SINE:
        return d * (1.0 + eps * math.sin(x + y))
    if kind == POWER:
        return d ** (1.0 + eps)
    if kind == TABULATED:
        table = S[2]
        g = 0.5 * (_table_factor(table, x, y) + _table_factor(table, y, x))
        return d * g
    return d


@_jit
def logd(S, x, y):
    d = dist(S, x, y)
    if d <= 0.0:
        return -np.inf
    return math.log(d)


@_jit
def tcoord(S, ap, aq, x):
    """Coordinate on the line with axis (ap, aq) of the pair through x."""
    return logd(S, ap, x) - logd(S, aq, x)


@_jit
def harmonic_residual(S, x, y, z, u):
    return abs(logd(S, x, z) + logd(S, y, u) - logd(S, x, u) - logd(S, y, z))


@_jit
def partner_bracketed(S, x, y, z, u, ulps):
    """True if the signed harmonic residual changes sign within ``ulps`` spacings of u.

    Near an axis end one ulp of angle moves the log residual by more than
    the harmonic tolerance; this tells a correctly rounded partner apart
    from a wrong one.
    """
    h = ulps * np.spacing(TWO_PI)
    lo = wrap(u - h)
    hi = wrap(u + h)
    g_lo = logd(S, x, z) + logd(S, y, lo) - logd(S, x, lo) - logd(S, y, z)
    g_hi = logd(S, x, z) + logd(S, y, hi) - logd(S, x, hi) - logd(S, y, z)
    return g_lo * g_hi <= 0.0


# -------------------------------------------------------------- root finder


def make_solver(f):
    """Build a bracketing root finder (Brent/Dekker) for ``f(x, args)``.

    The solver takes (args, a, b, fa, fb).  ``fa`` and ``fb`` may be
    infinite; interpolation is skipped whenever a non-finite value is
    involved, which degrades to bisection.  It returns
    (root, |f(root)|, iterations) and a NaN root when the ends do not
    bracket a sign change.
    """

    @_jit
    def solve(args, a, b, fa, fb):
        if fa == 0.0:
            return a, 0.0, 0
        if fb == 0.0:
            return b, 0.0, 0
        if (fa > 0.0) == (fb > 0.0) or math.isnan(fa) or math.isnan(fb):
            return np.nan, np.inf, 0
        c = a
        fc = fa
        d = b - a
        e = d
        for it in range(1, MAXITER + 1):
            if (fb > 0.0) == (fc > 0.0):
                c = a
                fc = fa
                d = b - a
                e = d
            if abs(fc) < abs(fb):
                a = b
                b = c
                c = a
                fa = fb
                fb = fc
                fc = fa
            tol = 4.0 * 2.220446049250313e-16 * abs(b) + 0.5 * XTOL
            m = 0.5 * (c - b)
            if abs(m) <= tol or fb == 0.0:
                return b, abs(fb), it
            finite = (math.isfinite(fa) and math.isfinite(fb)
                      and math.isfinite(fc))
            if abs(e) >= tol and abs(fa) > abs(fb) and finite:
                s = fb / fa
                if a == c:
                    p = 2.0 * m * s
                    q = 1.0 - s
                else:
                    qq = fa / fc
                    r = fb / fc
                    p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0))
                    q = (qq - 1.0) * (r - 1.0) * (s - 1.0)
                if p > 0.0:
                    q = -q
                else:
                    p = -p
                if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                    e = d
                    d = p / q
                else:
                    d = m
                    e = m
            else:
                d = m
                e = m
            a = b
            fa = fb
            if abs(d) > tol:
                b = b + d
            elif m > 0.0:
                b = b + tol
            else:
                b = b - tol
            fb = f(b, args)
            if math.isnan(fb):
                return np.nan, np.inf, it
        return b, abs(fb), MAXITER

    return solve


# ---------------------------------------------------------------- conjugate


@_jit
def _conj_f(tau, args):
    S, x, y, z, base, sgn, lxz, lyz = args
    u = base + sgn * tau
    return lxz + logd(S, y, u) - logd(S, x, u) - lyz


_solve_conj = make_solver(_conj_f)


@_jit
def conjugate_with_info(S, x, y, z):
    """Harmonic partner of z across (x, y) with (|residual|, iterations).

    Solves ln d(x,z) + ln d(y,u) - ln d(x,u) - ln d(y,z) = 0 for u on the
    arc of the circle minus {x, y} that does not contain z; f runs to
    -inf at y and +inf at x.  The arc is parametrized from the axis point
    nearer to z, where the partner also lies, so the solver's absolute
    tolerance is relative to a small offset.  Points of the pair are fixed.
    """
    if z == x or z == y:
        return z, 0.0, 0
    oy = offset(y, x)
    oz = offset(z, x)
    if oz < oy:
        # u on the ccw arc y -> x
        lo, length = y, TWO_PI - oy
        f_lo, f_hi = -np.inf, np.inf
    else:
        # u on the ccw arc x -> y
        lo, length = x, oy
        f_lo, f_hi = np.inf, -np.inf
    near_x = angle_gap(z, x) < angle_gap(z, y)
    # the arc end at x is lo when u runs x -> y, hi when u runs y -> x
    reverse = near_x == (oz < oy)
    if reverse:
        base, sgn, fa, fb = lo + length, -1.0, f_hi, f_lo
    else:
        base, sgn, fa, fb = lo, 1.0, f_lo, f_hi
    args = (S, x, y, z, base, sgn, logd(S, x, z), logd(S, y, z))
    tau, res, it = _solve_conj(args, 0.0, length, fa, fb)
    if math.isnan(tau):
        return np.nan, np.inf, it
    return wrap(base + sgn * tau), res, it


@_jit
def conjugate(S, x, y, z):
    """Harmonic partner of z across the pair (x, y); NaN on failure."""
    u, res, it = conjugate_with_info(S, x, y, z)
    return u


# ---------------------------------------------------- common perpendicular


@_jit
def _perp_g(tau, args):
    S, p, q, p2, q2, start = args
    x = start + tau
    y = conjugate(S, p2, q2, wrap(x))
    r = conjugate(S, p, q, y)
    return offset(r, start) - tau


_solve_perp = make_solver(_perp_g)


@_jit
def perpendicular(S, p, q, p2, q2):
    """Common perpendicular (x, y) of the strongly causal pairs (p, q), (p2, q2).

    x is the fixed point of rho_b o rho_b' on the closed arc of b that
    misses b'; y = rho_b'(x).  NaNs if the pairs are not strongly causal.
    """
    oq = offset(q, p)
    o1 = offset(p2, p)
    o2 = offset(q2, p)
    if o1 == 0.0 or o2 == 0.0 or o1 == oq or o2 == oq:
        return np.nan, np.nan
    in1 = o1 < oq
    in2 = o2 < oq
    if in1 != in2:
        return np.nan, np.nan
    if in1:
        start = q
        length = TWO_PI - oq
    else:
        start = p
        length = oq
    args = (S, p, q, p2, q2, start)
    ga = _perp_g(0.0, args)
    gb = _perp_g(length, args)
    tau, res, it = _solve_perp(args, 0.0, length, ga, gb)
    if math.isnan(tau):
        return np.nan, np.nan
    x = wrap(start + tau)
    y = conjugate(S, p2, q2, x)
    return x, y


# ---------------------------------------------------------- line utilities


@_jit
def _coord_f(tau, args):
    S, p, q, t = args
    return tcoord(S, p, q, wrap(p + tau)) - t


_solve_coord = make_solver(_coord_f)


@_jit
def point_at(S, p, q, t):
    """Point z on the ccw arc p->q with tcoord(p, q, z) = t."""
    length = offset(q, p)
    tau, res, it = _solve_coord((S, p, q, t), 0.0, length, -np.inf, np.inf)
    if math.isnan(tau):
        return np.nan
    return wrap(p + tau)


@_jit
def same_pair(p, q, p2, q2, tol):
    return ((angle_gap(p, p2) <= tol and angle_gap(q, q2) <= tol)
            or (angle_gap(p, q2) <= tol and angle_gap(q, p2) <= tol))


# --------------------------------------------------------------- projections


@_jit
def plus_rep(S, cp, cq, x):
    """Representative of the pair (x, rho_c x) on the ccw arc cp->cq (closed)."""
    L = offset(cq, cp)
    ox = offset(x, cp)
    if ox <= L:
        return x
    return conjugate(S, cp, cq, x)


@_jit
def _sproj_f(tau, args):
    S, ap, aq, cp, cq, start, tb, s = args
    v = wrap(start + tau)
    w = conjugate(S, cp, cq, v)
    tv = tcoord(S, ap, aq, v)
    tw = tcoord(S, ap, aq, w)
    return tb - (tv + s * tw) / (1.0 + s)


_solve_sproj = make_solver(_sproj_f)


@_jit
def s_project(S, ap, aq, bp, bq, cp, cq, s):
    """Solve for the v-end (on ccw arc cp->cq) of the s-projection.

    Returns (v, |residual|, iterations).  The bracket runs between the
    plus-representatives of ap and aq; the combination diverges to -inf at
    the ap end and +inf at the aq end.
    """
    zeta = plus_rep(S, cp, cq, ap)
    mu = plus_rep(S, cp, cq, aq)
    oz = offset(zeta, cp)
    om = offset(mu, cp)
    tb = tcoord(S, ap, aq, bp)
    args = (S, ap, aq, cp, cq, cp, tb, s)
    # F = tb - combination: +inf at the ap end, -inf at the aq end
    if oz < om:
        lo, hi, flo, fhi = oz, om, np.inf, -np.inf
    else:
        lo, hi, flo, fhi = om, oz, -np.inf, np.inf
    tau, res, it = _solve_sproj(args, lo, hi, flo, fhi)
    if math.isnan(tau):
        return np.nan, np.inf, it
    return wrap(cp + tau), res, it


@_jit
def ratio_pair(S, ap, aq, bp, bq, cp, cq, v):
    """(s, t) of the equal-ratio construction for d = (v, rho_c v)."""
    w = conjugate(S, cp, cq, v)
    ta_b = tcoord(S, ap, aq, bp)
    tb_a = tcoord(S, bp, bq, ap)
    s = abs(tb_a - tcoord(S, bp, bq, v)) / abs(tcoord(S, bp, bq, w) - tb_a)
    t = abs(ta_b - tcoord(S, ap, aq, v)) / abs(tcoord(S, ap, aq, w) - ta_b)
    return s, t


@_jit
def _eqr_f(tau, args):
    S, ap, aq, bp, bq, cp, cq = args
    s, t = ratio_pair(S, ap, aq, bp, bq, cp, cq, wrap(cp + tau))
    return math.log(s) - math.log(t)


_solve_eqr = make_solver(_eqr_f)


@_jit
def _end_sign(S, cp, cq, x, from_a):
    # v -> x when x itself lies on the plus arc, otherwise w -> x
    L = offset(cq, cp)
    ox = offset(x, cp)
    v_side = ox <= L
    if from_a:
        return -1.0 if v_side else 1.0
    return 1.0 if v_side else -1.0


@_jit
def equal_ratio(S, ap, aq, bp, bq, cp, cq):
    """Equal-ratio projection: returns (v, s, |residual|, iterations)."""
    L = offset(cq, cp)
    reps = np.empty(4)
    reps[0] = offset(plus_rep(S, cp, cq, ap), cp)
    reps[1] = offset(plus_rep(S, cp, cq, aq), cp)
    reps[2] = offset(plus_rep(S, cp, cq, bp), cp)
    reps[3] = offset(plus_rep(S, cp, cq, bq), cp)
    lo = max(min(reps[0], reps[1]), min(reps[2], reps[3]))
    hi = min(max(reps[0], reps[1]), max(reps[2], reps[3]))
    if not hi > lo:
        return np.nan, np.nan, np.inf, 0
    pts = (ap, aq, bp, bq)
    flo = np.nan
    fhi = np.nan
    ray = False
    for k in range(4):
        x = pts[k]
        ox = offset(x, cp)
        if ox == 0.0 or ox == L:
            ray = True
        if reps[k] == lo:
            flo = _end_sign(S, cp, cq, x, k < 2)
        if reps[k] == hi:
            fhi = _end_sign(S, cp, cq, x, k < 2)
    args = (S, ap, aq, bp, bq, cp, cq)
    if ray or math.isnan(flo) or math.isnan(fhi) or flo == fhi:
        # probe just inside the ends
        flo = np.nan
        fhi = np.nan
        width = hi - lo
        for k in range(6, 15):
            h = width * 10.0 ** (-k)
            a = _eqr_f(lo + h, args)
            if math.isfinite(a) and a != 0.0:
                flo = a
                lo = lo + h
                break
        for k in range(6, 15):
            h = width * 10.0 ** (-k)
            b = _eqr_f(hi - h, args)
            if math.isfinite(b) and b != 0.0:
                fhi = b
                hi = hi - h
                break
    else:
        flo = flo * np.inf
        fhi = fhi * np.inf
    tau, res, it = _solve_eqr(args, lo, hi, flo, fhi)
    if math.isnan(tau):
        return np.nan, np.nan, np.inf, it
    v = wrap(cp + tau)
    s, t = ratio_pair(S, ap, aq, bp, bq, cp, cq, v)
    return v, math.sqrt(s * t), res, it


# ------------------------------------------------------------------- paths


@_jit
def side_lengths(S, chain):
    """Side lengths of the open axis chain s_0..s_m (m sides minus one)."""
    m = chain.shape[0] - 1
    out = np.empty(max(m - 1, 0))
    for i in range(1, m):
        p = chain[i, 0]
        q = chain[i, 1]
        t0 = tcoord(S, p, q, chain[i - 1, 0])
        t1 = tcoord(S, p, q, chain[i + 1, 0])
        out[i - 1] = abs(t1 - t0)
    return out


@_jit
def chain_length(S, chain):
    total = 0.0
    m = chain.shape[0] - 1
    for i in range(1, m):
        p = chain[i, 0]
        q = chain[i, 1]
        total += abs(tcoord(S, p, q, chain[i + 1, 0])
                     - tcoord(S, p, q, chain[i - 1, 0]))
    return total


@_jit
def sigmoid(u):
    if u >= 0.0:
        return 1.0 / (1.0 + math.exp(-u))
    e = math.exp(u)
    return e / (1.0 + e)


@_jit
def arc_point(start, length, u):
    return wrap(start + length * sigmoid(u))


@_jit
def complementary_arcs(pts):
    """Open arcs between the distinct angles in ``pts``: rows (start, length)."""
    srt = np.sort(pts)
    uniq = np.empty(srt.shape[0])
    n = 0
    for k in range(srt.shape[0]):
        if n == 0 or srt[k] - uniq[n - 1] > 1e-12:
            uniq[n] = srt[k]
            n += 1
    if n > 1 and uniq[0] + TWO_PI - uniq[n - 1] <= 1e-12:
        n -= 1
    arcs = np.empty((n, 2))
    for k in range(n):
        a = uniq[k]
        b = uniq[(k + 1) % n]
        arcs[k, 0] = a
        arcs[k, 1] = offset(b, a) if n > 1 else TWO_PI
    return arcs


@_jit
def walk_chain(S, head, params, arc_index, tail):
    """Build the axis chain of a walk-and-connect zig-zag path.

    head: (2, 2) array [B, A] -- the path starts at {A, B} moving along A.
    params: k walk parameters followed by two parameters for a''.
    tail: (2, 2) array [A', B'] -- the path ends at {A', B'} arriving along A'.
    Returns a (k + 7, 2) chain, or an array with a NaN on failure.
    """
    k = params.shape[0] - 2
    m = k + 7
    chain = np.empty((m, 2))
    chain[0, 0] = head[0, 0]
    chain[0, 1] = head[0, 1]
    chain[1, 0] = head[1, 0]
    chain[1, 1] = head[1, 1]
    cur_p = head[1, 0]
    cur_q = head[1, 1]
    for i in range(k):
        L = offset(cur_q, cur_p)
        z = arc_point(cur_p, L, params[i])
        r = conjugate(S, cur_p, cur_q, z)
        chain[2 + i, 0] = z
        chain[2 + i, 1] = r
        cur_p = z
        cur_q = r
    pts = np.empty(4)
    pts[0] = cur_p
    pts[1] = cur_q
    pts[2] = tail[0, 0]
    pts[3] = tail[0, 1]
    arcs = complementary_arcs(pts)
    j = arc_index % arcs.shape[0]
    s0 = arcs[j, 0]
    ln = arcs[j, 1]
    a1 = arc_point(s0, ln, params[k])
    a2 = arc_point(s0, ln, params[k + 1])
    if a1 == a2:
        chain[0, 0] = np.nan
        return chain
    bx, by = perpendicular(S, cur_p, cur_q, a1, a2)
    ex, ey = perpendicular(S, tail[0, 0], tail[0, 1], a1, a2)
    chain[k + 2, 0] = bx
    chain[k + 2, 1] = by
    chain[k + 3, 0] = a1
    chain[k + 3, 1] = a2
    chain[k + 4, 0] = ex
    chain[k + 4, 1] = ey
    chain[k + 5, 0] = tail[0, 0]
    chain[k + 5, 1] = tail[0, 1]
    chain[k + 6, 0] = tail[1, 0]
    chain[k + 6, 1] = tail[1, 1]
    return chain


@_jit
def chain_residual(S, chain):
    """Largest harmonic residual over consecutive axes of the chain."""
    worst = 0.0
    for i in range(chain.shape[0] - 1):
        r = harmonic_residual(S, chain[i, 0], chain[i, 1], chain[i + 1, 0], chain[i + 1, 1])
        if not r <= worst:
            worst = r
    return worst


@_jit
def walk_length(S, head, params, arc_index, tail, tol):
    """Length of the walk chain, or inf if it fails or breaks harmonicity beyond ``tol``."""
    chain = walk_chain(S, head, params, arc_index, tail)
    for i in range(chain.shape[0]):
        if not (math.isfinite(chain[i, 0]) and math.isfinite(chain[i, 1])):
            return np.inf
    if not chain_residual(S, chain) <= tol:
        return np.inf
    val = chain_length(S, chain)
    if not math.isfinite(val):
        return np.inf
    return val
