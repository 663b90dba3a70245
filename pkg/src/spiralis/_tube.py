"""Compiled kernels for tube-bump potentials on the modular surface.

Hyperboloid vectors are stored in light-cone coordinates (m, p, x) with
m = X0 - X2, p = X0 + X2, x = X1, so a half-plane point has m = 1/v,
x = u/v, p = |z|^2/v and the form reads <X, Y> = -(m p' + p m')/2 + x x'.
In these coordinates z -> z + t and z -> -1/z are trivial to apply, which
keeps reduction to the standard fundamental domain of PSL2(Z) cheap.
"""

from __future__ import annotations

import math
import os

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is too old; avoid the warning by trying it last
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

CAP = 1.0  # distances are truncated at 1
SINH_CAP = math.sinh(CAP)
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(4)


def configure_threads() -> int:
    """Honour SPIRALIS_THREADS; results never depend on the thread count."""
    want = os.environ.get("SPIRALIS_THREADS")
    n = numba.config.NUMBA_NUM_THREADS
    if want:
        n = max(1, min(int(want), n))
    numba.set_num_threads(n)
    return n


def to_lightcone(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.stack([X[..., 0] - X[..., 2], X[..., 0] + X[..., 2], X[..., 1]], axis=-1)


@njit(cache=True, inline="always")
def _form(a0, a1, a2, b0, b1, b2):
    return -0.5 * (a0 * b1 + a1 * b0) + a2 * b2


@njit(cache=True)
def _reduce(P, W):
    """Move the frame (P, W) so that P lies in the standard fundamental domain."""
    for _ in range(10_000):
        n = math.floor(P[2] / P[0] + 0.5)
        if n != 0:
            for V in (P, W):
                m, p, x = V[0], V[1], V[2]
                V[2] = x - n * m
                V[1] = p - 2.0 * n * x + n * n * m
        if P[1] < P[0] * (1.0 - 1e-14):
            for V in (P, W):
                m, p = V[0], V[1]
                V[0] = p
                V[1] = m
                V[2] = -V[2]
        else:
            return


@njit(cache=True)
def _renormalise(P, W):
    s = math.sqrt(-_form(P[0], P[1], P[2], P[0], P[1], P[2]))
    P /= s
    k = _form(W[0], W[1], W[2], P[0], P[1], P[2])
    W += k * P
    s = math.sqrt(_form(W[0], W[1], W[2], W[0], W[1], W[2]))
    W /= s


@njit(cache=True)
def _flow(P, W, t):
    c, s = math.cosh(t), math.sinh(t)
    for i in range(3):
        p, w = P[i], W[i]
        P[i] = c * p + s * w
        W[i] = s * p + c * w


@njit(cache=True)
def _capped_min(A, B, nc, s):
    best = SINH_CAP
    ch, sh = math.cosh(s), math.sinh(s)
    for i in range(nc):
        f = abs(A[i] * ch + B[i] * sh)
        if f < best:
            best = f
    return math.asinh(best)


@njit(cache=True)
def _push_tanh(r, lo, hi, out, n):
    if abs(r) < 1.0:
        s = math.atanh(r)
        if lo < s < hi:
            out[n] = s
            return n + 1
    return n


@njit(cache=True)
def _window_integral(A, B, nc, lo, hi, gx, gw, brk):
    """Integral of min(1, min_i asinh|A_i cosh s + B_i sinh s|) over [lo, hi],
    split at every point where the active branch can change."""
    nb = 0
    brk[nb] = lo
    nb += 1
    for i in range(nc):
        a, b = A[i], B[i]
        if b != 0.0:
            nb = _push_tanh(-a / b, lo, hi, brk, nb)
        for sg in (-1.0, 1.0):
            # a cosh s + b sinh s = sg k  <=>  (a+b) y^2 - 2 sg k y + (a-b) = 0
            qa, qb, qc = a + b, -2.0 * sg * SINH_CAP, a - b
            if qa == 0.0:
                if qb != 0.0:
                    y = -qc / qb
                    if y > 0:
                        s = math.log(y)
                        if lo < s < hi:
                            brk[nb] = s
                            nb += 1
                continue
            disc = qb * qb - 4 * qa * qc
            if disc < 0:
                continue
            sq = math.sqrt(disc)
            q = -0.5 * (qb + (sq if qb >= 0 else -sq))
            for y in (q / qa, qc / q if q != 0.0 else -1.0):
                if y > 0:
                    s = math.log(y)
                    if lo < s < hi:
                        brk[nb] = s
                        nb += 1
        for j in range(i):
            for sg in (-1.0, 1.0):
                db = b - sg * B[j]
                if db != 0.0:
                    nb = _push_tanh(-(a - sg * A[j]) / db, lo, hi, brk, nb)
    brk[nb] = hi
    nb += 1
    # insertion sort: nb is small
    for k in range(1, nb):
        v = brk[k]
        j = k - 1
        while j >= 0 and brk[j] > v:
            brk[j + 1] = brk[j]
            j -= 1
        brk[j + 1] = v
    total = 0.0
    for k in range(nb - 1):
        a, b = brk[k], brk[k + 1]
        if b <= a:
            continue
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        acc = 0.0
        for q in range(gx.shape[0]):
            acc += gw[q] * _capped_min(A, B, nc, mid + half * gx[q])
        total += half * acc
    return total


@njit(cache=True)
def _segment(P, W, length, lifts, width, gx, gw, A, B, brk):
    if length <= 0.0:
        return 0.0
    nsub = max(1, int(math.ceil(length / width)))
    w = length / nsub
    reach = math.sinh(CAP + 0.5 * w) * (1.0 + 1e-12)
    sh_half = math.sinh(0.5 * w)
    _flow(P, W, 0.5 * w)
    total = 0.0
    for _ in range(nsub):
        _reduce(P, W)
        _renormalise(P, W)
        nc = 0
        for i in range(lifts.shape[0]):
            a = _form(P[0], P[1], P[2], lifts[i, 0], lifts[i, 1], lifts[i, 2])
            if abs(a) <= reach and nc < A.shape[0]:
                b = _form(W[0], W[1], W[2], lifts[i, 0], lifts[i, 1], lifts[i, 2])
                # |a cosh s + b sinh s| >= |a| - |b| sinh|s| on the window
                if abs(a) - abs(b) * sh_half <= SINH_CAP:
                    A[nc] = a
                    B[nc] = b
                    nc += 1
        if nc == 0:
            total += w
        else:
            total += _window_integral(A, B, nc, -0.5 * w, 0.5 * w, gx, gw, brk)
        _flow(P, W, w)
    return total


@njit(cache=True, parallel=True)
def capped_distance_integrals(P0, W0, lengths, lifts, width, gx, gw):
    """For each segment (P0[i], W0[i], lengths[i]) return the integral of
    min(1, distance to the nearest lift) along it."""
    n = lengths.shape[0]
    out = np.empty(n)
    for i in prange(n):
        P = P0[i].copy()
        W = W0[i].copy()
        A = np.empty(32)
        B = np.empty(32)
        brk = np.empty(32 * 40 + 2)
        out[i] = _segment(P, W, lengths[i], lifts, width, gx, gw, A, B, brk)
    return out


@njit(cache=True)
def reduce_points(P):
    """Reduce each row of P (light-cone coordinates) to the fundamental domain."""
    out = P.copy()
    W = np.zeros(3)
    for i in range(P.shape[0]):
        V = out[i]
        W[:] = 0.0
        _reduce(V, W)
    return out
