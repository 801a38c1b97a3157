"""Hot numeric kernels: elastic-net coordinate descent and boosting split search.

Both kernels exist twice: a loop-oriented version compiled with numba's
``@njit`` and a vectorized pure-numpy fallback.  The fallback is selected
automatically when numba is unavailable, or explicitly by setting the
environment variable ``GLASSBENCH_DISABLE_NUMBA=1`` (checked once at import
time).  ``benchmarks/bench_kernels.py`` times the two paths against each
other.

Numerical contract: neither path uses fastmath or parallel reductions, so
each is deterministic on its own; across paths results agree to float
round-off (summation order differs).
"""

from __future__ import annotations

import os

import numpy as np


def _env_disabled() -> bool:
    return os.environ.get("GLASSBENCH_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")


NUMBA_ENABLED = False
if not _env_disabled():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is an install-time choice
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(fn):
            return fn

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# Elastic-net coordinate descent
#
# Minimizes   (1/2n) sum_i sw_i (y_i - x_i.w)^2 + l1 |w|_1 + (l2/2) |w|_2^2
# by cyclic coordinate descent with soft-thresholding.  Xt is feature-major
# (d, n); y is the (centered) working response; sw are sample weights scaled
# to sum to n; w is updated in place.  The objective after each completed
# sweep is written to obj_out.  Returns the number of sweeps performed.
# ---------------------------------------------------------------------------


def _enet_cd_loops(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj_out):
    d, n = Xt.shape
    cj = np.zeros(d)
    for j in range(d):
        s = 0.0
        for i in range(n):
            v = Xt[j, i]
            s += sw[i] * v * v
        cj[j] = s / n
    r = y.copy()
    for j in range(d):
        if w[j] != 0.0:
            wj = w[j]
            for i in range(n):
                r[i] -= wj * Xt[j, i]
    sweeps = 0
    for sweep in range(max_sweeps):
        max_delta = 0.0
        for j in range(d):
            wj = w[j]
            rho = 0.0
            for i in range(n):
                rho += sw[i] * Xt[j, i] * r[i]
            rho = rho / n + cj[j] * wj
            denom = cj[j] + l2
            if denom <= 0.0:
                w_new = 0.0
            else:
                z = abs(rho) - l1
                if z <= 0.0:
                    w_new = 0.0
                else:
                    w_new = np.sign(rho) * z / denom
            if w_new != wj:
                diff = wj - w_new
                for i in range(n):
                    r[i] += diff * Xt[j, i]
                w[j] = w_new
            delta = abs(w_new - wj)
            if delta > max_delta:
                max_delta = delta
        sse = 0.0
        for i in range(n):
            sse += sw[i] * r[i] * r[i]
        l1n = 0.0
        l2n = 0.0
        for j in range(d):
            l1n += abs(w[j])
            l2n += w[j] * w[j]
        obj_out[sweep] = 0.5 * sse / n + l1 * l1n + 0.5 * l2 * l2n
        sweeps = sweep + 1
        if max_delta < tol:
            break
    return sweeps


enet_cd_numba = njit(cache=True)(_enet_cd_loops)


def enet_cd_numpy(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj_out):
    """Vectorized fallback with the same update order and tie semantics."""
    d, n = Xt.shape
    swXt = Xt * sw  # (d, n), reused for all inner products
    cj = (swXt * Xt).sum(axis=1) / n
    r = y - Xt.T @ w
    sweeps = 0
    for sweep in range(max_sweeps):
        max_delta = 0.0
        for j in range(d):
            wj = w[j]
            rho = swXt[j] @ r / n + cj[j] * wj
            denom = cj[j] + l2
            if denom <= 0.0:
                w_new = 0.0
            else:
                z = abs(rho) - l1
                w_new = 0.0 if z <= 0.0 else np.sign(rho) * z / denom
            if w_new != wj:
                r += (wj - w_new) * Xt[j]
                w[j] = w_new
            max_delta = max(max_delta, abs(w_new - wj))
        obj_out[sweep] = (
            0.5 * (sw * r * r).sum() / n + l1 * np.abs(w).sum() + 0.5 * l2 * (w * w).sum()
        )
        sweeps = sweep + 1
        if max_delta < tol:
            break
    return sweeps


def enet_cd(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj_out):
    if NUMBA_ENABLED:
        return enet_cd_numba(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj_out)
    return enet_cd_numpy(Xt, y, sw, w, l1, l2, max_sweeps, tol, obj_out)


# ---------------------------------------------------------------------------
# Boosting split search over pre-binned features
#
# codes: (n, d) int32 bin codes; idx: row subset; g, h: gradient/hessian.
# Gain of a split is GL^2/HL + GR^2/HR - G^2/H; a split is admitted only if
# both children hold >= min_child rows and positive hessian mass.  Ties are
# broken toward the lower feature index, then the lower bin index (strict
# greater-than while scanning in ascending order).  Returns
# (best_feature, best_bin, best_gain); best_feature == -1 means no admissible
# split with gain > 0 exists.
# ---------------------------------------------------------------------------


def _node_split_loops(codes, idx, g, h, nbins, min_child, max_bins):
    d = codes.shape[1]
    m = idx.shape[0]
    Gt = 0.0
    Ht = 0.0
    for t in range(m):
        i = idx[t]
        Gt += g[i]
        Ht += h[i]
    parent = Gt * Gt / Ht if Ht > 1e-12 else 0.0
    best_gain = 0.0
    best_feat = -1
    best_bin = -1
    Gb = np.zeros(max_bins)
    Hb = np.zeros(max_bins)
    Cb = np.zeros(max_bins, dtype=np.int64)
    for j in range(d):
        nb = nbins[j]
        if nb < 2:
            continue
        for b in range(nb):
            Gb[b] = 0.0
            Hb[b] = 0.0
            Cb[b] = 0
        for t in range(m):
            i = idx[t]
            c = codes[i, j]
            Gb[c] += g[i]
            Hb[c] += h[i]
            Cb[c] += 1
        GL = 0.0
        HL = 0.0
        CL = 0
        for b in range(nb - 1):
            GL += Gb[b]
            HL += Hb[b]
            CL += Cb[b]
            CR = m - CL
            if CL < min_child or CR < min_child:
                continue
            HR = Ht - HL
            if HL <= 1e-12 or HR <= 1e-12:
                continue
            GR = Gt - GL
            gain = GL * GL / HL + GR * GR / HR - parent
            if gain > best_gain:
                best_gain = gain
                best_feat = j
                best_bin = b
    return best_feat, best_bin, best_gain


node_split_numba = njit(cache=True)(_node_split_loops)


def node_split_numpy(codes, idx, g, h, nbins, min_child, max_bins):
    gi = g[idx]
    hi = h[idx]
    m = idx.shape[0]
    Gt = gi.sum()
    Ht = hi.sum()
    parent = Gt * Gt / Ht if Ht > 1e-12 else 0.0
    best_gain = 0.0
    best_feat = -1
    best_bin = -1
    for j in range(codes.shape[1]):
        nb = int(nbins[j])
        if nb < 2:
            continue
        cj = codes[idx, j]
        Gb = np.bincount(cj, weights=gi, minlength=nb)
        Hb = np.bincount(cj, weights=hi, minlength=nb)
        Cb = np.bincount(cj, minlength=nb)
        GL = np.cumsum(Gb[:-1])
        HL = np.cumsum(Hb[:-1])
        CL = np.cumsum(Cb[:-1])
        CR = m - CL
        HR = Ht - HL
        GR = Gt - GL
        ok = (CL >= min_child) & (CR >= min_child) & (HL > 1e-12) & (HR > 1e-12)
        if not ok.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = GL * GL / HL + GR * GR / HR - parent
        gains = np.where(ok, gains, -np.inf)
        b = int(np.argmax(gains))  # first max: lower bin wins ties
        if gains[b] > best_gain:
            best_gain = float(gains[b])
            best_feat = j
            best_bin = b
    return best_feat, best_bin, best_gain


def node_split(codes, idx, g, h, nbins, min_child, max_bins):
    if NUMBA_ENABLED:
        return node_split_numba(codes, idx, g, h, nbins, min_child, max_bins)
    return node_split_numpy(codes, idx, g, h, nbins, min_child, max_bins)
