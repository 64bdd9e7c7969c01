"""Quantized density evolution for LDPC coset decoding.

One iteration maps the variable-to-check message density through the check
stage (sign/magnitude domain, magnitudes add under convolution) and back
through the variable stage (LLR-grid convolution with the initial density).
Erasures (mass at LLR zero) and exact certainties (masses at +/-infinity)
are tracked algebraically, which keeps erasure-channel evolutions exact.

Quantization onto both grids preserves total mass exactly.  In the default
"moment" mode an atom is split between its two bracketing grid points so
that the e^{-m} moment (the symmetry pairing factor) is preserved as well;
with that choice a symmetric input density stays symmetric through every
iteration up to floating-point noise.  The "nearest" mode assigns each atom
to its closest grid point (ties toward zero).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .source_model import DiscreteLlrDensity, initial_density

logger = logging.getLogger(__name__)

MASS_DEFECT_LIMIT = 1e-6


@dataclass(frozen=True)
class DeSettings:
    """Grid and stopping parameters for density evolution runs."""

    step: float = 1.0 / 64.0
    llr_cap: float = 30.0
    max_iter: int = 2000
    target: float = 1e-6
    gamma_step: float | None = None  # defaults to step/4
    gamma_cap: float = 50.0
    stall_window: int = 50
    stall_rel: float = 1e-6
    quant_mode: str = "moment"

    @property
    def half_range(self):
        return int(round(self.llr_cap / self.step))

    def resolved_gamma_step(self):
        return self.gamma_step if self.gamma_step is not None else self.step / 4.0

    def summary(self):
        return (f"step={self.step:g} llr_cap={self.llr_cap:g} "
                f"gamma_step={self.resolved_gamma_step():g} gamma_cap={self.gamma_cap:g} "
                f"max_iter={self.max_iter} target={self.target:g} "
                f"stall_window={self.stall_window} stall_rel={self.stall_rel:g} "
                f"quant_mode={self.quant_mode}")


class QuantizedDensity:
    """LLR mass function on the uniform grid {-K*step, ..., +K*step}."""

    def __init__(self, step, half_range, masses, mass_pos_inf=0.0, mass_neg_inf=0.0):
        if step <= 0:
            raise ValueError("step must be positive")
        K = int(half_range)
        masses = np.asarray(masses, dtype=np.float64)
        if masses.shape != (2 * K + 1,):
            raise ValueError(f"expected {2 * K + 1} grid masses")
        if np.any(masses < 0) or mass_pos_inf < 0 or mass_neg_inf < 0:
            raise ValueError("negative mass")
        total = masses.sum() + mass_pos_inf + mass_neg_inf
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"total mass {total!r} is not 1 within 1e-9")
        self.step = float(step)
        self.half_range = K
        self.masses = masses.copy()
        self.masses.setflags(write=False)
        self.mass_pos_inf = float(mass_pos_inf)
        self.mass_neg_inf = float(mass_neg_inf)

    def grid(self):
        K = self.half_range
        return (np.arange(2 * K + 1) - K) * self.step

    def to_discrete(self):
        keep = self.masses > 0
        return DiscreteLlrDensity(self.grid()[keep], self.masses[keep],
                                  mass_pos_inf=self.mass_pos_inf,
                                  mass_neg_inf=self.mass_neg_inf)

    def __repr__(self):
        return (f"QuantizedDensity(step={self.step:g}, K={self.half_range}, "
                f"p_e={error_probability(self):.6g})")


@dataclass
class DeTrajectory:
    p_e_by_iter: list[float]
    converged: bool
    iterations: int


def error_probability(d):
    """Mass at strictly negative LLRs plus half the mass at zero."""
    K = d.half_range
    return float(d.masses[:K].sum() + d.mass_neg_inf + 0.5 * d.masses[K])


# ---------------------------------------------------------------------------
# quantization
# ---------------------------------------------------------------------------


def _scatter_nearest(locs, masses, step, K, out):
    r = locs / step
    k = np.floor(r + 0.5)
    tie = (k - r == 0.5) & (locs > 0)
    k[tie] -= 1.0
    k = np.clip(k, -K, K).astype(np.int64)
    np.add.at(out, k + K, masses)


def _scatter_exp_moment(locs, masses, step, K, out):
    """Mass-splitting scatter preserving the e^{-m} moment of each atom."""
    hi = locs >= K * step
    lo = locs <= -K * step
    out[2 * K] += masses[hi].sum()
    out[0] += masses[lo].sum()
    mid = ~(hi | lo)
    locs = locs[mid]
    masses = masses[mid]
    if locs.size == 0:
        return
    i0 = np.floor(locs / step).astype(np.int64)
    a = locs - i0 * step
    # same expression in numerator and denominator so that an exact grid
    # hit (a == 0) keeps all of its mass in place
    e_step = math.exp(-step)
    w_lo = masses * (np.exp(-a) - e_step) / (1.0 - e_step)
    w_lo = np.clip(w_lo, 0.0, masses)
    w_hi = masses - w_lo
    np.add.at(out, i0 + K, w_lo)
    np.add.at(out, i0 + 1 + K, w_hi)


def quantize(d, step, half_range, mode="nearest"):
    """Quantize a discrete density onto the signed LLR grid.

    "nearest" assigns each atom to its closest grid point with ties toward
    zero; "moment" splits each atom between its two bracketing grid points,
    preserving the e^{-m} moment (and with it exact symmetry).  Out-of-range
    mass accrues at the edge bins; infinities are preserved; total mass is
    conserved exactly.
    """
    K = int(half_range)
    out = np.zeros(2 * K + 1)
    if mode == "nearest":
        _scatter_nearest(d.llrs, d.masses, step, K, out)
    elif mode == "moment":
        _scatter_exp_moment(d.llrs, d.masses, step, K, out)
    else:
        raise ValueError(f"unknown quantization mode {mode!r}")
    return QuantizedDensity(step, K, out, d.mass_pos_inf, d.mass_neg_inf)


# ---------------------------------------------------------------------------
# the check stage: sign/magnitude domain
# ---------------------------------------------------------------------------


@dataclass
class _SignedG:
    """Non-erasure check-domain state: magnitude grids per sign plus exact
    certainty scalars.  Bucket j holds magnitude j*gstep; bucket 0 is
    "stronger than the grid resolves" (finite), the scalars are exact."""

    p: np.ndarray
    n: np.ndarray
    inf_p: float
    inf_n: float

    def total(self):
        return float(self.p.sum() + self.n.sum() + self.inf_p + self.inf_n)


def _trim(arr):
    nz = np.nonzero(arr)[0]
    if nz.size == 0:
        return np.zeros(1)
    return arr[: nz[-1] + 1]


def _trim_pair(p, n):
    """Trim two sign components to a common length (kernels require it)."""
    length = max(_trim(p).shape[0], _trim(n).shape[0])
    return p[:length], n[:length]


def _gamma_map(d, gstep, J):
    """Map a grid density to the check domain.

    Magnitude pairs are split across bracketing gamma-buckets so that the
    grid-level symmetry pairing (mass ratio e^{-m}) carries over exactly;
    unpaired mass falls back to a tanh-moment split.
    """
    K = d.half_range
    masses = d.masses
    u_pos = masses[K + 1:]
    u_neg = masses[K - 1::-1]
    act = (u_pos > 0) | (u_neg > 0)
    Gp = np.zeros(J + 1)
    Gn = np.zeros(J + 1)
    if np.any(act):
        idx = np.nonzero(act)[0]
        up = u_pos[idx]
        un = u_neg[idx]
        g = _kernels.gamma_mag_array((idx + 1) * d.step)
        j0 = np.floor(g / gstep).astype(np.int64)
        capped = j0 >= J
        if np.any(capped):
            Gp[J] += up[capped].sum()
            Gn[J] += un[capped].sum()
            keep = ~capped
            up, un, g, j0 = up[keep], un[keep], g[keep], j0[keep]
        if up.size:
            s0 = 2.0 / (np.exp(j0 * gstep) + 1.0)
            s1 = 2.0 / (np.exp((j0 + 1) * gstep) + 1.0)
            sg = 2.0 / (np.exp(g) + 1.0)
            ds = s0 - s1
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio_gap = np.where(up > 0, (up - un) / np.where(up > 0, up, 1.0), 0.0)
            paired = (up > 0) & (un > 0) & (ratio_gap > s1) & (ratio_gap < s0)
            # paired split: preserve both totals and the bucket pairing factor
            w1 = np.where(paired, up * (s0 - ratio_gap) / ds, up * (s0 - sg) / ds)
            w1 = np.clip(w1, 0.0, up)
            w0 = up - w1
            w0n_paired = (1.0 - s0) * w0
            with np.errstate(invalid="ignore"):
                frac = np.clip((s0 - sg) / ds, 0.0, 1.0)
            w1n = np.where(paired, un - w0n_paired, un * frac)
            w1n = np.clip(w1n, 0.0, un)
            w0n = un - w1n
            np.add.at(Gp, j0, w0)
            np.add.at(Gp, j0 + 1, w1)
            np.add.at(Gn, j0, w0n)
            np.add.at(Gn, j0 + 1, w1n)
    Gp, Gn = _trim_pair(Gp, Gn)
    return _SignedG(Gp, Gn, d.mass_pos_inf, d.mass_neg_inf), float(masses[K])


def _fold_signed(a, b, J):
    """Combine two check-domain states: magnitudes add, signs multiply."""
    cp, cn = _kernels.signed_fold(a.p, a.n, b.p, b.n)
    cp = cp.copy()
    cn = cn.copy()
    la = a.p.shape[0]
    lb = b.p.shape[0]
    if a.inf_p or a.inf_n:
        cp[:lb] += a.inf_p * b.p + a.inf_n * b.n
        cn[:lb] += a.inf_p * b.n + a.inf_n * b.p
    if b.inf_p or b.inf_n:
        cp[:la] += b.inf_p * a.p + b.inf_n * a.n
        cn[:la] += b.inf_p * a.n + b.inf_n * a.p
    if cp.shape[0] > J + 1:
        cp[J] += cp[J + 1:].sum()
        cn[J] += cn[J + 1:].sum()
        cp = cp[:J + 1]
        cn = cn[:J + 1]
    cp, cn = _trim_pair(cp, cn)
    return _SignedG(cp, cn,
                    a.inf_p * b.inf_p + a.inf_n * b.inf_n,
                    a.inf_p * b.inf_n + a.inf_n * b.inf_p)


def _fold_powers(base, needed, fold):
    memo = {1: base}

    def get(k):
        if k not in memo:
            half = k // 2
            memo[k] = fold(get(half), get(k - half))
        return memo[k]

    return {k: get(k) for k in needed}


def _mix_signed(states, coeffs, J):
    length = max(s.p.shape[0] for s in states)
    p = np.zeros(length)
    n = np.zeros(length)
    ip = 0.0
    inn = 0.0
    for s, c in zip(states, coeffs):
        p[:s.p.shape[0]] += c * s.p
        n[:s.n.shape[0]] += c * s.n
        ip += c * s.inf_p
        inn += c * s.inf_n
    p, n = _trim_pair(p, n)
    return _SignedG(p, n, ip, inn)


def _gamma_unmap(state, erasure, gstep, step, K):
    """Invert the check-domain state back onto the signed LLR grid."""
    out = np.zeros(2 * K + 1)
    out[K] += erasure
    out[2 * K] += state.p[0]  # stronger than the gamma grid resolves
    out[0] += state.n[0]
    jp = np.nonzero(state.p[1:])[0] + 1
    jn = np.nonzero(state.n[1:])[0] + 1
    if jp.size:
        m = _kernels.gamma_mag_array(jp * gstep)
        _scatter_exp_moment(m, state.p[jp], step, K, out)
    if jn.size:
        m = _kernels.gamma_mag_array(jn * gstep)
        _scatter_exp_moment(-m, state.n[jn], step, K, out)
    return out, state.inf_p, state.inf_n


# ---------------------------------------------------------------------------
# the variable stage: LLR-grid convolution
# ---------------------------------------------------------------------------


def _conv_clip(a, b, K):
    """Grid convolution with out-of-range mass accrued at the edge bins."""
    nza = np.nonzero(a)[0]
    nzb = np.nonzero(b)[0]
    out = np.zeros(2 * K + 1)
    if nza.size == 0 or nzb.size == 0:
        return out
    a_lo, a_hi = nza[0], nza[-1]
    b_lo, b_hi = nzb[0], nzb[-1]
    conv = _kernels.conv(a[a_lo:a_hi + 1], b[b_lo:b_hi + 1])
    start = a_lo + b_lo - K
    idx = start + np.arange(conv.shape[0])
    low = idx < 0
    high = idx > 2 * K
    mid = ~(low | high)
    out[0] += conv[low].sum()
    out[2 * K] += conv[high].sum()
    np.add.at(out, idx[mid], conv[mid])
    return out


@dataclass
class _GridState:
    masses: np.ndarray
    inf_p: float
    inf_n: float


def _fold_grid(a, b, K):
    out = _conv_clip(a.masses, b.masses, K)
    afin = a.masses.sum()
    bfin = b.masses.sum()
    inf_p = a.inf_p * (bfin + b.inf_p) + b.inf_p * afin
    inf_n = a.inf_n * (bfin + b.inf_n) + b.inf_n * afin
    # opposite certainties cancel to an erased message
    out[K] += a.inf_p * b.inf_n + a.inf_n * b.inf_p
    return _GridState(out, inf_p, inf_n)


# ---------------------------------------------------------------------------
# density evolution proper
# ---------------------------------------------------------------------------


def de_iterate(d0, d_prev, dd, gamma_step=None, gamma_cap=50.0):
    """One density-evolution iteration.

    Check stage: transform to the sign/magnitude domain, mix the
    (degree-1)-fold combinations under the check rule, transform back.
    Variable stage: mix the (degree-1)-fold grid convolutions of the check
    output and convolve with the initial density.  The output is
    renormalized; a mass defect beyond 1e-6 aborts.
    """
    if (d0.step != d_prev.step) or (d0.half_range != d_prev.half_range):
        raise ValueError("grid mismatch between d0 and d_prev")
    step = d0.step
    K = d0.half_range
    gstep = gamma_step if gamma_step is not None else step / 4.0
    J = int(round(gamma_cap / gstep))

    # check stage
    g_state, erasure_in = _gamma_map(d_prev, gstep, J)
    t_in = g_state.total()
    needed = sorted({d - 1 for d, _ in dd.rho})
    powers = _fold_powers(g_state, needed, lambda x, y: _fold_signed(x, y, J))
    mix = _mix_signed([powers[d - 1] for d, _ in dd.rho],
                      [c for _, c in dd.rho], J)
    erasure_out = max(0.0, 1.0 - dd.rho_eval(t_in))
    chk_masses, chk_ip, chk_in = _gamma_unmap(mix, erasure_out, gstep, step, K)
    chk = _GridState(chk_masses, chk_ip, chk_in)

    # variable stage
    needed = sorted({d - 1 for d, _ in dd.lam})
    powers = _fold_powers(chk, needed, lambda x, y: _fold_grid(x, y, K))
    length = 2 * K + 1
    vm = np.zeros(length)
    vip = 0.0
    vin = 0.0
    for (d, c) in dd.lam:
        s = powers[d - 1]
        vm += c * s.masses
        vip += c * s.inf_p
        vin += c * s.inf_n
    d0_state = _GridState(d0.masses, d0.mass_pos_inf, d0.mass_neg_inf)
    out = _fold_grid(_GridState(vm, vip, vin), d0_state, K)

    # flush mirror-pairs of numerically extinct mass: repeated folding drives
    # some bins toward the subnormal range, where the symmetry pairing ratio
    # (factor e^{-m}) can no longer be represented
    extinct = np.maximum(out.masses, out.masses[::-1]) < 1e-250
    out.masses[extinct] = 0.0

    total = out.masses.sum() + out.inf_p + out.inf_n
    defect = abs(1.0 - total)
    if defect > MASS_DEFECT_LIMIT:
        raise RuntimeError(f"density evolution mass defect {defect:.3e} exceeds "
                           f"{MASS_DEFECT_LIMIT:g}")
    if defect > 0:
        logger.debug("renormalizing mass defect %.3e", defect)
    return QuantizedDensity(step, K, out.masses / total,
                            out.inf_p / total, out.inf_n / total)


def run_de(d0, dd, max_iter, target, *, gamma_step=None, gamma_cap=50.0,
           stall_window=50, stall_rel=1e-6):
    """Iterate density evolution until the error probability reaches target.

    Stops early (not converged) when the relative decrease of p_e over
    `stall_window` iterations falls below `stall_rel`.
    """
    if target <= 0:
        raise ValueError("target must be positive")
    p_hist = [error_probability(d0)]
    if p_hist[0] <= target:
        return DeTrajectory(p_hist, True, 0)
    d_prev = d0
    iters = 0
    converged = False
    while iters < max_iter:
        d_prev = de_iterate(d0, d_prev, dd, gamma_step=gamma_step, gamma_cap=gamma_cap)
        iters += 1
        pe = error_probability(d_prev)
        p_hist.append(pe)
        if pe <= target:
            converged = True
            break
        if len(p_hist) > stall_window:
            ref = p_hist[-1 - stall_window]
            if ref > 0 and (ref - pe) < stall_rel * ref:
                break
    return DeTrajectory(p_hist, converged, iters)


def evolve_source(source, dd, settings=DeSettings()):
    """Quantize a source's initial density and run density evolution."""
    d0 = quantize(initial_density(source), settings.step, settings.half_range,
                  mode=settings.quant_mode)
    return run_de(d0, dd, settings.max_iter, settings.target,
                  gamma_step=settings.resolved_gamma_step(),
                  gamma_cap=settings.gamma_cap,
                  stall_window=settings.stall_window,
                  stall_rel=settings.stall_rel)


def find_threshold(family, dd, lo, hi, tol, *, max_iter=2000, target=1e-6,
                   gamma_step=None, gamma_cap=50.0, stall_window=50,
                   stall_rel=1e-6):
    """Bisect a monotone one-parameter family for the convergence threshold.

    `family(param)` must return the initial QuantizedDensity.  Density
    evolution must converge at `lo` and fail at `hi`; violating either
    precondition raises ValueError.
    """

    def converges(param):
        d0 = family(param)
        return run_de(d0, dd, max_iter, target, gamma_step=gamma_step,
                      gamma_cap=gamma_cap, stall_window=stall_window,
                      stall_rel=stall_rel).converged

    if not converges(lo):
        raise ValueError(f"density evolution does not converge at lo={lo!r}")
    if converges(hi):
        raise ValueError(f"density evolution converges at hi={hi!r}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if converges(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bec_de_oracle(epsilon, dd, max_iter=2000):
    """Scalar erasure recursion x <- eps * lam(1 - rho(1 - x)).

    Independent oracle for erasure-class sources; returns (converged,
    final_x) with convergence meaning x < 1e-12.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon out of range")
    x = epsilon
    for _ in range(max_iter):
        if x < 1e-12:
            break
        x_next = epsilon * dd.lam_eval(1.0 - dd.rho_eval(1.0 - x))
        if x_next == x:
            break
        x = x_next
    return x < 1e-12, x


# ---------------------------------------------------------------------------
# dump format
# ---------------------------------------------------------------------------


def format_quantized(d):
    """Header 'step K mass_neg_inf mass_pos_inf' then 2K+1 mass lines."""
    lines = [f"{d.step!r} {d.half_range} {d.mass_neg_inf!r} {d.mass_pos_inf!r}"]
    lines += [f"{float(m)!r}" for m in d.masses]
    return "\n".join(lines) + "\n"


def parse_quantized(text):
    lines = [ln for ln in (raw.strip() for raw in text.splitlines())
             if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty density dump")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError("bad density header")
    step = float(head[0])
    K = int(head[1])
    ninf = float(head[2])
    pinf = float(head[3])
    masses = np.array([float(ln) for ln in lines[1:]])
    return QuantizedDensity(step, K, masses, pinf, ninf)
