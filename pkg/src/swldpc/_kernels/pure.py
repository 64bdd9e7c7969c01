"""Numpy implementations of the hot kernels.

This module is the fallback backend; `swldpc._kernels._core` is the compiled
(Cython) twin with identical semantics.  Keep the two in sync.
"""

import numpy as np

# Check-node magnitude clamp.  Exact certainties travel as +/-inf sentinels
# and bypass the clamp; everything finite is kept inside [MAG_FLOOR, MAG_CEIL]
# before inversion to avoid overflow.
MAG_FLOOR = 1e-12
MAG_CEIL = 50.0


def gamma_mag_array(x):
    """Elementwise -ln tanh(x/2) for x >= 0 (0 -> inf, inf -> 0).

    The function is an involution, so it serves as both the forward and the
    inverse magnitude transform of the check-node operation.  Two branches
    keep full relative precision at both ends of the range.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape, dtype=np.float64)
    small = x <= 1.0
    with np.errstate(divide="ignore"):
        out[small] = -np.log(np.tanh(0.5 * x[small]))
    big = ~small & (x < 710.0)  # beyond that 2/(e^x+1) underflows to 0 anyway
    out[big] = -np.log1p(-2.0 / (np.exp(x[big]) + 1.0))
    return out


def conv(a, b):
    """Dense linear convolution of two nonnegative mass arrays."""
    return np.convolve(a, b)


def signed_fold(ap, an, bp, bn):
    """Fold two sign/magnitude mass pairs under the check-node rule.

    Magnitudes add (index addition), signs multiply:
    plus = ap*bp + an*bn, minus = ap*bn + an*bp.
    """
    cp = np.convolve(ap, bp) + np.convolve(an, bn)
    cn = np.convolve(ap, bn) + np.convolve(an, bp)
    return cp, cn


def _syndrome_ok(x_hat, edge_var, edge_chk, m, syndrome):
    par = np.bincount(edge_chk[x_hat[edge_var] == 1], minlength=m).astype(np.uint8) & 1
    return bool(np.array_equal(par, syndrome))


def bp_run(n, m, edge_var, edge_chk, var_ptr, var_adj, chk_ptr, chk_adj,
           syndrome, init_llrs, max_iter, early_stop):
    """Flooding belief propagation over a coset (syndrome-flipped checks).

    Returns (v2c, c2v, beliefs, iterations_used, syndrome_satisfied).
    Conflicting certainties (+inf plus -inf) cancel to the finite remainder.
    """
    ev = edge_var
    ec = edge_chk
    e_count = ev.shape[0]
    m0 = np.asarray(init_llrs, dtype=np.float64)
    m0_fin = np.where(np.isfinite(m0), m0, 0.0)
    m0_pos = (m0 == np.inf).astype(np.float64)
    m0_neg = (m0 == -np.inf).astype(np.float64)
    sflip = 1.0 - 2.0 * syndrome.astype(np.float64)

    v2c = m0[ev].copy()
    c2v = np.zeros(e_count, dtype=np.float64)
    beliefs = m0.copy()
    x_hat = (beliefs < 0).astype(np.uint8)
    ok = _syndrome_ok(x_hat, ev, ec, m, syndrome)
    iters = 0
    if early_stop and ok:
        return v2c, c2v, beliefs, iters, ok

    for it in range(1, max_iter + 1):
        # check update: signs multiply, gamma magnitudes add, extrinsic by
        # subtraction from the per-check totals
        is_zero = v2c == 0.0
        is_neg = v2c < 0.0
        mag = gamma_mag_array(np.abs(v2c))
        mag[is_zero] = 0.0  # zeros tracked by count, not magnitude
        zc = np.bincount(ec, weights=is_zero, minlength=m)
        ng = np.bincount(ec, weights=is_neg, minlength=m)
        ms = np.bincount(ec, weights=mag, minlength=m)
        z_ex = zc[ec] - is_zero
        n_ex = ng[ec] - is_neg
        g_ex = ms[ec] - mag
        sign = np.where(n_ex.astype(np.int64) & 1, -1.0, 1.0) * sflip[ec]
        c2v = sign * gamma_mag_array(np.clip(g_ex, MAG_FLOOR, MAG_CEIL))
        all_certain = g_ex <= 0.0
        c2v[all_certain] = (sign * np.inf)[all_certain]
        c2v[z_ex > 0.5] = 0.0

        # variable update: plain sums with infinity counting
        c_fin = np.where(np.isfinite(c2v), c2v, 0.0)
        c_pos = (c2v == np.inf).astype(np.float64)
        c_neg = (c2v == -np.inf).astype(np.float64)
        sv = np.bincount(ev, weights=c_fin, minlength=n) + m0_fin
        pv = np.bincount(ev, weights=c_pos, minlength=n) + m0_pos
        nv = np.bincount(ev, weights=c_neg, minlength=n) + m0_neg
        beliefs = np.where(pv > nv, np.inf, np.where(nv > pv, -np.inf, sv))
        s_ex = sv[ev] - c_fin
        p_ex = pv[ev] - c_pos
        n2_ex = nv[ev] - c_neg
        v2c = np.where(p_ex > n2_ex, np.inf, np.where(n2_ex > p_ex, -np.inf, s_ex))

        x_hat = (beliefs < 0).astype(np.uint8)
        iters = it
        ok = _syndrome_ok(x_hat, ev, ec, m, syndrome)
        if early_stop and ok:
            break

    return v2c, c2v, beliefs, iters, ok
