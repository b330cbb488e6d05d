"""Hot loops with a numba implementation and a vectorised numpy fallback.

Both implementations of a kernel consume the same counter-based random
stream (see ``_rng``), so they make identical stochastic decisions.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ._backend import HAVE_NUMBA, resolve_backend
from ._rng import uniform, uniform_nb

# ---------------------------------------------------------------------------
# Absorbing line walk
# ---------------------------------------------------------------------------


# Components below _TINY are flushed to zero by the compiled kernel: the
# exponential tail ahead of the ballistic front otherwise runs through
# subnormal arithmetic, which is two orders of magnitude slower. The flushed
# probability (< 1e-299 per site) is booked into the survivor.
_TINY = 1e-150

# Storage layout: the right-mover at site x and time s lives at r[x - s + T],
# the left-mover at l[x + s]. The shift then moves no data and a step is a
# pointwise 2x2 update of the active window. With ``cut`` set (one barrier),
# sites farther than T - s from the barrier cannot be absorbed before T; they
# are dropped exactly and their norm is booked into the survivor.


def _absorb_numpy(c, u0, u1, width, x0, li, ri, steps, cut):
    T = steps
    r = np.zeros(width + T + 1, dtype=np.complex128)
    l = np.zeros(width + T + 1, dtype=np.complex128)
    r[x0 + T] = u0
    l[x0] = u1
    left = np.zeros(T + 1)
    right = np.zeros(T + 1)
    acc_l = acc_r = dropped = 0.0

    def take(x, s):
        i, j = x - s + T, x + s
        w = r[i].real ** 2 + r[i].imag ** 2 + l[j].real ** 2 + l[j].imag ** 2
        r[i] = 0
        l[j] = 0
        return float(w)

    if li >= 0:
        acc_l += take(li, 0)
    if ri >= 0:
        acc_r += take(ri, 0)
    left[0], right[0] = acc_l, acc_r
    lo_lim = li + 1 if li >= 0 else 0
    hi_lim = ri - 1 if ri >= 0 else width - 1
    c00, c01, c10, c11 = c[0, 0], c[0, 1], c[1, 0], c[1, 1]
    for s in range(T):
        lo = max(lo_lim, x0 - s)
        hi = min(hi_lim, x0 + s)
        if cut:
            hi = min(hi, li + T - s)
        if hi >= lo:
            rs = r[lo - s + T : hi - s + T + 1]
            ls = l[lo + s : hi + s + 1]
            u = rs.copy()
            rs[:] = c00 * u + c01 * ls
            ls[:] = c10 * u + c11 * ls
        s1 = s + 1
        if li >= 0:
            acc_l += take(li, s1)
        if ri >= 0:
            acc_r += take(ri, s1)
        if cut:
            new_hi = min(hi_lim, x0 + s1, li + T - s1)
            for x in range(new_hi + 1, min(hi + 2, width)):
                dropped += take(x, s1)
        left[s1], right[s1] = acc_l, acc_r
    rr = r[0:width]
    ll = l[T : T + width]
    surv = dropped + float(np.sum(rr.real**2 + rr.imag**2 + ll.real**2 + ll.imag**2))
    return left, right, surv


if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _take_nb(r, l, x, s, T):  # pragma: no cover - compiled
        i = x - s + T
        j = x + s
        w = r[i].real ** 2 + r[i].imag ** 2 + l[j].real ** 2 + l[j].imag ** 2
        r[i] = 0
        l[j] = 0
        return w

    @njit(cache=True)
    def _absorb_nb(c, u0, u1, width, x0, li, ri, steps, cut, block=32):  # pragma: no cover
        # Same recurrence as the numpy path, swept as a wavefront: one pass
        # over x advances ``block`` rows, visiting (x - k, s0 + k). The
        # left-mover cell l[x + s0] is shared by the whole column and the
        # right-mover cells span 2*block entries, so the pass stays in cache.
        T = steps
        r = np.zeros(width + T + 1, dtype=np.complex128)
        l = np.zeros(width + T + 1, dtype=np.complex128)
        r[x0 + T] = u0
        l[x0] = u1
        w_l = np.zeros(T + 1)
        w_r = np.zeros(T + 1)
        dropped = 0.0
        flushed = 0.0
        if li >= 0:
            w_l[0] = _take_nb(r, l, li, 0, T)
        if ri >= 0:
            w_r[0] = _take_nb(r, l, ri, 0, T)
        lo_lim = li + 1 if li >= 0 else 0
        hi_lim = ri - 1 if ri >= 0 else width - 1
        lo = np.empty(T + 1, dtype=np.int64)
        hi = np.empty(T + 1, dtype=np.int64)
        for s in range(T + 1):
            lo[s] = max(lo_lim, x0 - s)
            h = min(hi_lim, x0 + s)
            if cut:
                h = min(h, li + T - s)
            hi[s] = h
        c00, c01, c10, c11 = c[0, 0], c[0, 1], c[1, 0], c[1, 1]
        for s0 in range(0, T, block):
            kmax = min(block, T - s0)
            xa = lo[s0]
            xb = hi[s0]
            for k in range(kmax):
                xa = min(xa, lo[s0 + k] + k)
                xb = max(xb, hi[s0 + k] + k)
            for x in range(xa, xb + 1):
                # the valid rows of a column form one contiguous range [ka, kb]
                ka = 0
                while ka < kmax and x - ka > hi[s0 + ka]:
                    ka += 1
                kb = ka - 1
                while kb + 1 < kmax and x - kb - 1 >= lo[s0 + kb + 1]:
                    kb += 1
                if kb < ka:
                    continue
                j = x + s0
                v = l[j]
                for k in range(ka, kb + 1):
                    i = x - 2 * k - s0 + T
                    u = r[i]
                    w = c00 * u + c01 * v
                    v = c10 * u + c11 * v
                    if abs(w.real) < _TINY and abs(w.imag) < _TINY:
                        flushed += w.real**2 + w.imag**2
                        w = 0j
                    if abs(v.real) < _TINY and abs(v.imag) < _TINY:
                        flushed += v.real**2 + v.imag**2
                        v = 0j
                    r[i] = w
                l[j] = v
                # bookkeeping for time s + 1 of the touched points
                if li >= 0 and x - kb == li + 1:
                    w_l[s0 + kb + 1] += v.real**2 + v.imag**2
                    l[j] = 0
                if ri >= 0:
                    k = x - (ri - 1)
                    if ka <= k <= kb:
                        i = x - 2 * k - s0 + T
                        w_r[s0 + k + 1] += r[i].real ** 2 + r[i].imag ** 2
                        r[i] = 0
                if cut:
                    k = ka
                    while k <= kb and x - k + 1 > hi[s0 + k + 1]:
                        i = x - 2 * k - s0 + T
                        dropped += r[i].real ** 2 + r[i].imag ** 2
                        r[i] = 0
                        k += 1
        left = np.empty(T + 1)
        right = np.empty(T + 1)
        acc_l = 0.0
        acc_r = 0.0
        for s in range(T + 1):
            acc_l += w_l[s]
            acc_r += w_r[s]
            left[s] = acc_l
            right[s] = acc_r
        surv = dropped + flushed
        for x in range(width):
            surv += r[x].real ** 2 + r[x].imag ** 2
            surv += l[x + T].real ** 2 + l[x + T].imag ** 2
        return left, right, surv


def absorbing_run(
    c: NDArray[np.complex128],
    coin_state: NDArray[np.complex128],
    width: int,
    start_idx: int,
    left_idx: int,
    right_idx: int,
    steps: int,
    backend: str | None = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64], float]:
    """Absorbing walk on sites ``0 .. width-1`` from a single start site.

    ``left_idx`` / ``right_idx`` are barrier sites (``-1`` for none). With a
    single left barrier the causal cut is applied.

    Returns
    -------
    left, right : ndarray, shape (steps + 1,)
        Cumulative absorbed probability after each step.
    survivor : float
        Unabsorbed norm at ``steps``, including the exactly dropped part.
    """
    c = np.ascontiguousarray(c, dtype=np.complex128)
    u0, u1 = complex(coin_state[0]), complex(coin_state[1])
    cut = left_idx >= 0 and right_idx < 0
    args = (c, u0, u1, int(width), int(start_idx), int(left_idx), int(right_idx), int(steps), cut)
    if resolve_backend(backend) == "numba":
        left, right, surv = _absorb_nb(*args)
        return left, right, float(surv)
    return _absorb_numpy(*args)


# ---------------------------------------------------------------------------
# Decoherence trajectories on the line
# ---------------------------------------------------------------------------
# Random slots per step: 0 coin-measure decision, 1 coin outcome,
# 2 position-measure decision, 3 position outcome, 4 + x link (x, x+1).


def _traj_numpy(c, init, steps, p_coin, p_pos, p_break, bounce, seed, t0, n_trials, chunk=2048):
    width = 2 * steps + 1
    acc = np.zeros(width)
    sq_norm_err = 0.0
    x = np.arange(width)
    for start in range(t0, t0 + n_trials, chunk):
        trials = np.arange(start, min(start + chunk, t0 + n_trials))
        m = trials.size
        a = np.zeros((m, 2, width), dtype=np.complex128)
        a[:, :, steps] = init
        for s in range(steps):
            phi = np.einsum("ij,mjx->mix", c, a)
            new = np.zeros_like(a)
            if p_break > 0.0:
                # link x joins sites x and x+1, for x = 0 .. width-2
                broken = uniform(seed, trials[:, None], s, 4 + x[None, :-1]) < p_break
                ok = ~broken
                new[:, 0, 1:] += np.where(ok, phi[:, 0, :-1], 0)
                new[:, 1, :-1] += np.where(ok, phi[:, 1, 1:], 0)
                new[:, 1, :-1] += np.where(broken, bounce * phi[:, 0, :-1], 0)
                new[:, 0, 1:] += np.where(broken, bounce * phi[:, 1, 1:], 0)
            else:
                new[:, 0, 1:] = phi[:, 0, :-1]
                new[:, 1, :-1] = phi[:, 1, 1:]
            a = new
            if p_coin > 0.0:
                do = uniform(seed, trials, s, 0) < p_coin
                r = uniform(seed, trials, s, 1)
                w = np.cumsum(a.real**2 + a.imag**2, axis=2)[:, :, -1]
                tot = w[:, 0] + w[:, 1]
                keep0 = r * tot < w[:, 0]
                for idx in np.nonzero(do)[0]:
                    k = 0 if keep0[idx] else 1
                    a[idx, 1 - k, :] = 0
                    a[idx, k, :] /= np.sqrt(w[idx, k])
            if p_pos > 0.0:
                do = uniform(seed, trials, s, 2) < p_pos
                r = uniform(seed, trials, s, 3)
                prob = np.sum(a.real**2 + a.imag**2, axis=1)
                cum = np.cumsum(prob, axis=1)
                for idx in np.nonzero(do)[0]:
                    target = r[idx] * cum[idx, -1]
                    j = int(np.searchsorted(cum[idx], target, side="right"))
                    j = min(j, width - 1)
                    while prob[idx, j] == 0.0 and j > 0:
                        j -= 1
                    col = a[idx, :, j].copy()
                    a[idx] = 0
                    a[idx, :, j] = col / np.sqrt(prob[idx, j])
        p = np.sum(a.real**2 + a.imag**2, axis=1)
        sq_norm_err = max(sq_norm_err, float(np.max(np.abs(p.sum(axis=1) - 1.0))))
        acc += p.sum(axis=0)
    return acc, sq_norm_err


if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _traj_nb(c, init, steps, p_coin, p_pos, p_break, bounce, seed, t0, n_trials):  # pragma: no cover
        width = 2 * steps + 1
        acc = np.zeros(width)
        a0 = np.zeros(width, dtype=np.complex128)
        a1 = np.zeros(width, dtype=np.complex128)
        b0 = np.zeros(width, dtype=np.complex128)
        b1 = np.zeros(width, dtype=np.complex128)
        c00, c01, c10, c11 = c[0, 0], c[0, 1], c[1, 0], c[1, 1]
        prob = np.zeros(width)
        err = 0.0
        for tr in range(t0, t0 + n_trials):
            a0[:] = 0
            a1[:] = 0
            a0[steps] = init[0]
            a1[steps] = init[1]
            for s in range(steps):
                lo = max(0, steps - s - 2)
                hi = min(width - 1, steps + s + 2)
                for x in range(lo, hi + 1):
                    b0[x] = 0
                    b1[x] = 0
                for x in range(lo, hi + 1):
                    p0 = c00 * a0[x] + c01 * a1[x]
                    p1 = c10 * a0[x] + c11 * a1[x]
                    # right-mover at x crosses link x; left-mover crosses link x-1
                    if x + 1 < width:
                        if p_break > 0.0 and uniform_nb(seed, tr, s, 4 + x) < p_break:
                            b1[x] += bounce * p0
                        else:
                            b0[x + 1] += p0
                    if x >= 1:
                        if p_break > 0.0 and uniform_nb(seed, tr, s, 4 + x - 1) < p_break:
                            b0[x] += bounce * p1
                        else:
                            b1[x - 1] += p1
                for x in range(lo, hi + 1):
                    a0[x] = b0[x]
                    a1[x] = b1[x]
                if p_coin > 0.0 and uniform_nb(seed, tr, s, 0) < p_coin:
                    r = uniform_nb(seed, tr, s, 1)
                    w0 = 0.0
                    w1 = 0.0
                    for x in range(width):
                        w0 += a0[x].real ** 2 + a0[x].imag ** 2
                        w1 += a1[x].real ** 2 + a1[x].imag ** 2
                    if r * (w0 + w1) < w0:
                        nrm = np.sqrt(w0)
                        for x in range(width):
                            a0[x] /= nrm
                            a1[x] = 0
                    else:
                        nrm = np.sqrt(w1)
                        for x in range(width):
                            a1[x] /= nrm
                            a0[x] = 0
                if p_pos > 0.0 and uniform_nb(seed, tr, s, 2) < p_pos:
                    r = uniform_nb(seed, tr, s, 3)
                    tot = 0.0
                    for x in range(width):
                        v0 = a0[x].real ** 2 + a0[x].imag ** 2
                        v1 = a1[x].real ** 2 + a1[x].imag ** 2
                        prob[x] = v0 + v1
                        tot += prob[x]
                    target = r * tot
                    cum = 0.0
                    j = width - 1
                    for x in range(width):
                        cum += prob[x]
                        if cum > target:
                            j = x
                            break
                    while prob[j] == 0.0 and j > 0:
                        j -= 1
                    nrm = np.sqrt(prob[j])
                    k0 = a0[j] / nrm
                    k1 = a1[j] / nrm
                    a0[:] = 0
                    a1[:] = 0
                    a0[j] = k0
                    a1[j] = k1
            tot = 0.0
            for x in range(width):
                v0 = a0[x].real ** 2 + a0[x].imag ** 2
                v1 = a1[x].real ** 2 + a1[x].imag ** 2
                v = v0 + v1
                acc[x] += v
                tot += v
            err = max(err, abs(tot - 1.0))
        return acc, err


def trajectory_sum(
    c: NDArray[np.complex128],
    init: NDArray[np.complex128],
    steps: int,
    p_coin: float,
    p_pos: float,
    p_break: float,
    bounce: float,
    seed: int,
    n_trials: int,
    trial_offset: int = 0,
    backend: str | None = None,
) -> tuple[NDArray[np.float64], float]:
    """Sum over trajectories of the final position distribution.

    Returns the (unnormalised) sum and the worst per-trajectory norm defect.
    """
    c = np.ascontiguousarray(c, dtype=np.complex128)
    init = np.ascontiguousarray(init, dtype=np.complex128)
    seed = int(seed) % (1 << 63)
    if resolve_backend(backend) == "numba":
        acc, err = _traj_nb(
            c, init, steps, float(p_coin), float(p_pos), float(p_break), float(bounce),
            seed, int(trial_offset), int(n_trials),
        )
        return acc, float(err)
    return _traj_numpy(
        c, init, steps, p_coin, p_pos, p_break, bounce, seed, trial_offset, n_trials
    )


# ---------------------------------------------------------------------------
# Monte Carlo hitting times on a Markov chain
# ---------------------------------------------------------------------------


def _hit_numpy(indptr, indices, cum, source, target_mask, n_trials, max_steps, seed, t0):
    n_rows = indptr.size - 1
    deg = np.diff(indptr)
    width = int(deg.max())
    pad = np.full((n_rows, width), np.inf)
    nbr = np.zeros((n_rows, width), dtype=np.int64)
    for v in range(n_rows):
        pad[v, : deg[v]] = cum[indptr[v] : indptr[v + 1]]
        nbr[v, : deg[v]] = indices[indptr[v] : indptr[v + 1]]
    steps = np.full(n_trials, -1, dtype=np.int64)
    if target_mask[source]:
        steps[:] = 0
        return steps
    pos = np.full(n_trials, source, dtype=np.int64)
    trials = np.arange(t0, t0 + n_trials)
    active = np.arange(n_trials)
    for s in range(max_steps):
        if active.size == 0:
            break
        r = uniform(seed, trials[active], s, 0)
        v = pos[active]
        j = np.minimum(np.sum(pad[v] <= r[:, None], axis=1), deg[v] - 1)
        pos[active] = nbr[v, j]
        hit = target_mask[pos[active]]
        steps[active[hit]] = s + 1
        active = active[~hit]
    return steps


if HAVE_NUMBA:

    @njit(cache=True)
    def _hit_nb(indptr, indices, cum, source, target_mask, n_trials, max_steps, seed, t0):  # pragma: no cover
        steps = np.full(n_trials, -1, dtype=np.int64)
        for i in range(n_trials):
            v = source
            if target_mask[v]:
                steps[i] = 0
                continue
            for s in range(max_steps):
                r = uniform_nb(seed, t0 + i, s, 0)
                j = indptr[v]
                end = indptr[v + 1] - 1
                while j < end and cum[j] <= r:
                    j += 1
                v = indices[j]
                if target_mask[v]:
                    steps[i] = s + 1
                    break
        return steps


def hitting_steps(
    indptr: NDArray[np.int64],
    indices: NDArray[np.int64],
    cum: NDArray[np.float64],
    source: int,
    target_mask: NDArray[np.bool_],
    n_trials: int,
    max_steps: int,
    seed: int,
    trial_offset: int = 0,
    backend: str | None = None,
) -> NDArray[np.int64]:
    """First-passage step counts for ``n_trials`` walkers (``-1`` if not hit).

    The chain is given in CSR form with per-row cumulative probabilities.
    """
    seed = int(seed) % (1 << 63)
    args = (
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(cum, dtype=np.float64),
        int(source),
        np.ascontiguousarray(target_mask, dtype=np.bool_),
        int(n_trials),
        int(max_steps),
        seed,
        int(trial_offset),
    )
    if resolve_backend(backend) == "numba":
        return _hit_nb(*args)
    return _hit_numpy(*args)
