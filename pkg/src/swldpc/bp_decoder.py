"""MAP belief propagation for LDPC coset codes.

Check nodes use the sign/magnitude update with the syndrome bit flipping the
outgoing sign; variable nodes add the posterior-LLR initialization to the
extrinsic sums.  With the posterior initialization the decoder computes exact
symbol-wise a posteriori LLRs on cycle-free graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ldpc import Syndrome

MAG_FLOOR = _kernels.MAG_FLOOR
MAG_CEIL = _kernels.MAG_CEIL


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    iterations_used: int
    syndrome_satisfied: bool
    beliefs: np.ndarray


@dataclass
class MessageState:
    """Per-edge messages after a fixed number of flooding iterations."""

    v2c: np.ndarray
    c2v: np.ndarray
    iteration: int


def gamma_mag(x):
    """-ln tanh(x/2) for x >= 0; equal to its own inverse."""
    if x <= 1.0:
        if x == 0.0:
            return math.inf
        return -math.log(math.tanh(0.5 * x))
    if x >= 710.0:
        return 0.0
    return -math.log1p(-2.0 / (math.exp(x) + 1.0))


def gamma(m):
    """Sign/magnitude transform (sgn m, -ln tanh|m/2|); zero keeps sign 0."""
    if m == 0:
        return 0, math.inf
    sign = 1 if m > 0 else -1
    return sign, gamma_mag(abs(m))


def check_node_op(msgs, s=0):
    """Combine messages at a check with syndrome bit s.

    Signs multiply, gamma magnitudes add, and the result is negated when
    s = 1.  A zero input erases the output; an all-infinite input stays
    infinite.  Finite magnitudes are clamped to [MAG_FLOOR, MAG_CEIL] before
    inversion.
    """
    msgs = list(msgs)
    if not msgs:
        raise ValueError("check node needs at least one incoming message")
    sign = 1
    mag = 0.0
    n_zero = 0
    for m in msgs:
        if m == 0:
            n_zero += 1
            continue
        if m < 0:
            sign = -sign
        mag += gamma_mag(abs(m))
    if n_zero:
        return 0.0
    if mag <= 0.0:
        out = sign * math.inf
    else:
        out = sign * gamma_mag(min(max(mag, MAG_FLOOR), MAG_CEIL))
    return -out if s else out


def variable_node_op(m0, incoming):
    """m0 plus the incoming sum; opposite certainties cancel pairwise."""
    pos = neg = 0
    total = 0.0
    for v in (m0, *incoming):
        if v == math.inf:
            pos += 1
        elif v == -math.inf:
            neg += 1
        else:
            total += v
    if pos > neg:
        return math.inf
    if neg > pos:
        return -math.inf
    return total


def _run(g, s, init_llrs, max_iter, early_stop):
    if isinstance(s, Syndrome):
        s = s.bits
    s = np.asarray(s, dtype=np.uint8)
    init_llrs = np.asarray(init_llrs, dtype=np.float64)
    if init_llrs.shape != (g.n,):
        raise ValueError(f"expected {g.n} initial LLRs, got {init_llrs.shape}")
    if s.shape != (g.m,):
        raise ValueError(f"expected {g.m} syndrome bits, got {s.shape}")
    return _kernels.bp_run(
        g.n, g.m, g.edge_var, g.edge_chk, g.var_ptr, g.var_adj,
        g.chk_ptr, g.chk_adj, s, init_llrs, int(max_iter), bool(early_stop),
    )


def decode(g, s, init_llrs, max_iter, early_stop=True):
    """Flooding BP decode; stops as soon as the syndrome is satisfied."""
    v2c, c2v, beliefs, iters, ok = _run(g, s, init_llrs, max_iter, early_stop)
    x_hat = (beliefs < 0).astype(np.uint8)
    return DecodeResult(x_hat=x_hat, iterations_used=iters,
                        syndrome_satisfied=bool(ok), beliefs=beliefs)


def bp_messages(g, s, init_llrs, iters):
    """Message state after exactly `iters` flooding iterations (no early stop)."""
    v2c, c2v, _, _, _ = _run(g, s, init_llrs, iters, early_stop=False)
    return MessageState(v2c=v2c, c2v=c2v, iteration=int(iters))


def count_incorrect_messages(state, g, x_true):
    """Variable-to-check messages whose sign favors the wrong bit.

    A message from variable v is correct when its sign matches (-1)^{x_v};
    zero messages count one half.
    """
    x_true = np.asarray(x_true, dtype=np.uint8)
    if x_true.shape != (g.n,):
        raise ValueError("x_true length mismatch")
    v2c = state.v2c
    xe = x_true[g.edge_var]
    wrong = ((v2c < 0) & (xe == 0)) | ((v2c > 0) & (xe == 1))
    return float(wrong.sum() + 0.5 * np.count_nonzero(v2c == 0.0))
