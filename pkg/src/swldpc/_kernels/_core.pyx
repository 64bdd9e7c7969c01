# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: flooding BP message passing and dense convolutions.

Semantics must match swldpc._kernels.pure exactly (up to floating-point
summation order).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, fabs, log, log1p, tanh

cnp.import_array()

cdef double MAG_FLOOR = 1e-12
cdef double MAG_CEIL = 50.0


cdef inline double _gamma_mag(double x) nogil:
    # -ln tanh(x/2) for x >= 0; 0 -> inf, inf -> 0
    if x <= 1.0:
        return -log(tanh(0.5 * x))
    if x >= 710.0:
        return 0.0
    return -log1p(-2.0 / (exp(x) + 1.0))


def conv(a, b):
    """Dense linear convolution of two nonnegative mass arrays."""
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t na = av.shape[0], nb = bv.shape[0]
    out = np.zeros(na + nb - 1, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double ai
    with nogil:
        for i in range(na):
            ai = av[i]
            if ai != 0.0:
                for j in range(nb):
                    ov[i + j] += ai * bv[j]
    return out


def signed_fold(ap, an, bp, bn):
    """Fold two sign/magnitude mass pairs under the check-node rule."""
    cdef const double[::1] apv = np.ascontiguousarray(ap, dtype=np.float64)
    cdef const double[::1] anv = np.ascontiguousarray(an, dtype=np.float64)
    cdef const double[::1] bpv = np.ascontiguousarray(bp, dtype=np.float64)
    cdef const double[::1] bnv = np.ascontiguousarray(bn, dtype=np.float64)
    cdef Py_ssize_t na = apv.shape[0], nb = bpv.shape[0]
    cp = np.zeros(na + nb - 1, dtype=np.float64)
    cn = np.zeros(na + nb - 1, dtype=np.float64)
    cdef double[::1] cpv = cp
    cdef double[::1] cnv = cn
    cdef Py_ssize_t i, j
    cdef double xp, xn
    with nogil:
        for i in range(na):
            xp = apv[i]
            xn = anv[i]
            if xp != 0.0 or xn != 0.0:
                for j in range(nb):
                    cpv[i + j] += xp * bpv[j] + xn * bnv[j]
                    cnv[i + j] += xp * bnv[j] + xn * bpv[j]
    return cp, cn


def bp_run(Py_ssize_t n, Py_ssize_t m, edge_var, edge_chk, var_ptr, var_adj,
           chk_ptr, chk_adj, syndrome, init_llrs, Py_ssize_t max_iter,
           bint early_stop):
    """Flooding BP over a coset; see the pure backend for the contract."""
    cdef const cnp.int64_t[::1] ev = np.ascontiguousarray(edge_var, dtype=np.int64)
    cdef const cnp.int64_t[::1] ec = np.ascontiguousarray(edge_chk, dtype=np.int64)
    cdef const cnp.int64_t[::1] vp = np.ascontiguousarray(var_ptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] va = np.ascontiguousarray(var_adj, dtype=np.int64)
    cdef const cnp.int64_t[::1] cp = np.ascontiguousarray(chk_ptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] ca = np.ascontiguousarray(chk_adj, dtype=np.int64)
    cdef const cnp.uint8_t[::1] syn = np.ascontiguousarray(syndrome, dtype=np.uint8)
    cdef double[::1] m0 = np.ascontiguousarray(init_llrs, dtype=np.float64)
    cdef Py_ssize_t e_count = ev.shape[0]

    v2c_arr = np.empty(e_count, dtype=np.float64)
    c2v_arr = np.zeros(e_count, dtype=np.float64)
    beliefs_arr = np.empty(n, dtype=np.float64)
    xh_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] v2c = v2c_arr
    cdef double[::1] c2v = c2v_arr
    cdef double[::1] beliefs = beliefs_arr
    cdef cnp.uint8_t[::1] x_hat = xh_arr

    cdef Py_ssize_t e, v, c, k, it
    cdef Py_ssize_t iters = 0
    cdef bint ok
    cdef double msg, mag, g_ex, val, s_ex
    cdef long zc, ngc, z_ex, n_ex, ppar
    cdef double msum
    cdef long pos_cnt, neg_cnt, p_ex, q_ex
    cdef double sgn

    for e in range(e_count):
        v2c[e] = m0[ev[e]]
    for v in range(n):
        beliefs[v] = m0[v]
        x_hat[v] = 1 if beliefs[v] < 0 else 0
    ok = _syndrome_ok(x_hat, syn, ev, cp, ca, m)
    if early_stop and ok:
        return v2c_arr, c2v_arr, beliefs_arr, 0, ok

    for it in range(1, max_iter + 1):
        with nogil:
            # check update
            for c in range(m):
                zc = 0
                ngc = 0
                msum = 0.0
                for k in range(cp[c], cp[c + 1]):
                    msg = v2c[ca[k]]
                    if msg == 0.0:
                        zc += 1
                    else:
                        if msg < 0.0:
                            ngc += 1
                        msum += _gamma_mag(fabs(msg))
                for k in range(cp[c], cp[c + 1]):
                    e = ca[k]
                    msg = v2c[e]
                    if msg == 0.0:
                        z_ex = zc - 1
                        n_ex = ngc
                        g_ex = msum
                    else:
                        z_ex = zc
                        n_ex = ngc - (1 if msg < 0.0 else 0)
                        g_ex = msum - _gamma_mag(fabs(msg))
                    sgn = -1.0 if (n_ex & 1) else 1.0
                    if syn[c]:
                        sgn = -sgn
                    if z_ex > 0:
                        c2v[e] = 0.0
                    elif g_ex <= 0.0:
                        c2v[e] = sgn * INFINITY
                    else:
                        if g_ex < MAG_FLOOR:
                            g_ex = MAG_FLOOR
                        elif g_ex > MAG_CEIL:
                            g_ex = MAG_CEIL
                        c2v[e] = sgn * _gamma_mag(g_ex)

            # variable update
            for v in range(n):
                pos_cnt = 0
                neg_cnt = 0
                msum = 0.0
                val = m0[v]
                if val == INFINITY:
                    pos_cnt += 1
                elif val == -INFINITY:
                    neg_cnt += 1
                else:
                    msum += val
                for k in range(vp[v], vp[v + 1]):
                    msg = c2v[va[k]]
                    if msg == INFINITY:
                        pos_cnt += 1
                    elif msg == -INFINITY:
                        neg_cnt += 1
                    else:
                        msum += msg
                if pos_cnt > neg_cnt:
                    beliefs[v] = INFINITY
                elif neg_cnt > pos_cnt:
                    beliefs[v] = -INFINITY
                else:
                    beliefs[v] = msum
                x_hat[v] = 1 if beliefs[v] < 0 else 0
                for k in range(vp[v], vp[v + 1]):
                    e = va[k]
                    msg = c2v[e]
                    p_ex = pos_cnt
                    q_ex = neg_cnt
                    s_ex = msum
                    if msg == INFINITY:
                        p_ex -= 1
                    elif msg == -INFINITY:
                        q_ex -= 1
                    else:
                        s_ex -= msg
                    if p_ex > q_ex:
                        v2c[e] = INFINITY
                    elif q_ex > p_ex:
                        v2c[e] = -INFINITY
                    else:
                        v2c[e] = s_ex

        iters = it
        ok = _syndrome_ok(x_hat, syn, ev, cp, ca, m)
        if early_stop and ok:
            break

    return v2c_arr, c2v_arr, beliefs_arr, iters, ok


cdef bint _syndrome_ok(const cnp.uint8_t[::1] x_hat, const cnp.uint8_t[::1] syn,
                       const cnp.int64_t[::1] ev, const cnp.int64_t[::1] cp,
                       const cnp.int64_t[::1] ca, Py_ssize_t m) nogil:
    cdef Py_ssize_t c, k
    cdef long par
    for c in range(m):
        par = 0
        for k in range(cp[c], cp[c + 1]):
            par ^= x_hat[ev[ca[k]]]
        if par != syn[c]:
            return False
    return True
