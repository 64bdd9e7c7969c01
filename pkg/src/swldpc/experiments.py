"""Reproducible experiment drivers: sweeps, concentration checks, Monte-Carlo
decoding, correspondence and mismatch studies.

Every experiment is deterministic given its seed and settings.  Reports are
plain dataclasses with CSV writers; grid points and trials are independent
work items aggregated by index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bp_decoder import bp_messages, count_incorrect_messages, decode
from .density_evolution import (DeSettings, de_iterate, error_probability,
                                evolve_source, quantize, run_de)
from .ldpc import sample_graph, sample_source_pairs, syndrome_encode, design_rates
from .source_model import (JointSource, _finalize_joint, are_equivalent,
                           conditional_entropy, initial_density,
                           initial_llr_vector, mismatch_initial_density,
                           ml_mismatch_source, source_to_channel)


@dataclass(frozen=True)
class BscFamilyPoint:
    """Symmetric-correlation family member: P(x=0) = p, crossover q."""

    p: float
    q: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 0.5 or not 0.0 <= self.q <= 0.5:
            raise ValueError("p and q must lie in [0, 1/2]")


def bsc_family_source(p, q=None):
    """Joint table {p(1-q), pq, (1-p)q, (1-p)(1-q)} with labels 0, 1."""
    if isinstance(p, BscFamilyPoint):
        pt = p
    else:
        pt = BscFamilyPoint(p, q)
    probs = np.array([
        [pt.p * (1.0 - pt.q), pt.p * pt.q],
        [(1.0 - pt.p) * pt.q, (1.0 - pt.p) * (1.0 - pt.q)],
    ])
    return _finalize_joint(probs, [0, 1])


def erasure_source(epsilon):
    """Side information that is correct with probability 1-eps, else erased."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    half = (1.0 - epsilon) / 2.0
    probs = np.array([
        [half, 0.0, epsilon / 2.0],
        [0.0, half, epsilon / 2.0],
    ])
    return _finalize_joint(probs, [0, 1, 2])


def quantized_initial(source, settings):
    return quantize(initial_density(source), settings.step, settings.half_range,
                    mode=settings.quant_mode)


def make_bsc_family(p, settings):
    """q -> initial quantized density of the (p, q) family member."""
    return lambda q: quantized_initial(bsc_family_source(p, q), settings)


def make_bec_family(settings):
    return lambda eps: quantized_initial(erasure_source(eps), settings)


# ---------------------------------------------------------------------------
# feasible-domain sweep
# ---------------------------------------------------------------------------


@dataclass
class SweepRow:
    p: float
    q: float
    converged: bool
    h_xy: float
    iterations: int


@dataclass
class SweepReport:
    rows: list[SweepRow]
    dd_label: str
    syndrome_rate: float
    settings_summary: str

    def violations(self, margin=0.005):
        """Converged points whose H(X|Y) exceeds the syndrome rate + margin.

        The achievable-rate converse forbids these; a sound evolution
        produces none.
        """
        return [r for r in self.rows
                if r.converged and r.h_xy > self.syndrome_rate + margin]


def _sweep_point(args):
    p, q, dd, settings = args
    source = bsc_family_source(p, q)
    traj = evolve_source(source, dd, settings)
    return SweepRow(p=p, q=q, converged=traj.converged,
                    h_xy=conditional_entropy(source), iterations=traj.iterations)


def feasible_domain_sweep(dd, p_grid, q_grid, settings=DeSettings(), jobs=None):
    """Run density evolution over a (p, q) grid and record convergence."""
    tasks = [(float(p), float(q), dd, settings) for p in p_grid for q in q_grid]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks, chunksize=8))
    else:
        rows = [_sweep_point(t) for t in tasks]
    _, syndrome_rate = design_rates(dd)
    return SweepReport(rows=rows, dd_label=dd.label(),
                       syndrome_rate=syndrome_rate,
                       settings_summary=settings.summary())


# ---------------------------------------------------------------------------
# correspondence between source and converted-channel evolutions
# ---------------------------------------------------------------------------


def _tv_distance(a, b):
    d = 0.5 * float(np.abs(a.masses - b.masses).sum())
    d += 0.5 * (abs(a.mass_pos_inf - b.mass_pos_inf) + abs(a.mass_neg_inf - b.mass_neg_inf))
    return d


def correspondence_check(source, dd, iters, settings=DeSettings(), channel=None):
    """Max total-variation gap between the source evolution and the evolution
    started from the converted channel's message density."""
    if channel is None:
        channel = source_to_channel(source)
    da = quantized_initial(source, settings)
    db = quantize(channel.message_density(), settings.step, settings.half_range,
                  mode=settings.quant_mode)
    worst = _tv_distance(da, db)
    xa, xb = da, db
    gs = settings.resolved_gamma_step()
    for _ in range(iters):
        xa = de_iterate(da, xa, dd, gamma_step=gs, gamma_cap=settings.gamma_cap)
        xb = de_iterate(db, xb, dd, gamma_step=gs, gamma_cap=settings.gamma_cap)
        worst = max(worst, _tv_distance(xa, xb))
    return worst


# ---------------------------------------------------------------------------
# concentration of the incorrect-message count
# ---------------------------------------------------------------------------


@dataclass
class ConcentrationEntry:
    n: int
    ratios: list[float]
    mean: float
    de_pe: float
    outlier_fraction: dict[float, float]


@dataclass
class ConcentrationReport:
    iteration: int
    entries: list[ConcentrationEntry]
    dd_label: str


def concentration_experiment(dd, n_list, l, trials, source, seed,
                             epsilons=(0.005, 0.01, 0.02),
                             settings=DeSettings()):
    """Empirical spread of Z/(n d_v) around the evolution prediction.

    Z counts wrong-sign variable-to-check messages at iteration l over fresh
    graph/source realizations; the regular-ensemble assumption is checked.
    """
    if not dd.is_regular:
        raise ValueError("concentration experiment requires a regular ensemble")
    dv = dd.lam[0][0]
    d0 = quantized_initial(source, settings)
    d = d0
    gs = settings.resolved_gamma_step()
    for _ in range(l):
        d = de_iterate(d0, d, dd, gamma_step=gs, gamma_cap=settings.gamma_cap)
    de_pe = error_probability(d)

    entries = []
    seeds = np.random.SeedSequence(seed).spawn(len(n_list))
    for n, seq in zip(n_list, seeds):
        child = seq.generate_state(2 * trials)
        ratios = []
        for t in range(trials):
            g = sample_graph(n, dd, int(child[2 * t]))
            x, y = sample_source_pairs(source, n, int(child[2 * t + 1]))
            synd = syndrome_encode(g, x)
            init = initial_llr_vector(source, y)
            state = bp_messages(g, synd, init, l)
            z = count_incorrect_messages(state, g, x)
            ratios.append(z / (n * dv))
        mean = float(np.mean(ratios))
        frac = {eps: float(np.mean([abs(r - de_pe) > eps for r in ratios]))
                for eps in epsilons}
        entries.append(ConcentrationEntry(n=int(n), ratios=ratios, mean=mean,
                                          de_pe=de_pe, outlier_fraction=frac))
    return ConcentrationReport(iteration=l, entries=entries, dd_label=dd.label())


# ---------------------------------------------------------------------------
# Monte-Carlo decoding
# ---------------------------------------------------------------------------


@dataclass
class BerReport:
    ber: float
    fer: float
    ber_radius: float
    fer_radius: float
    n: int
    trials: int


def monte_carlo_ber(source, dd, n, trials, max_iter, seed):
    """End-to-end syndrome encoding plus BP decoding over fresh instances."""
    seeds = np.random.SeedSequence(seed).spawn(trials)
    bit_errors = 0
    frame_errors = 0
    for seq in seeds:
        child = seq.generate_state(2)
        g = sample_graph(n, dd, int(child[0]))
        x, y = sample_source_pairs(source, n, int(child[1]))
        synd = syndrome_encode(g, x)
        init = initial_llr_vector(source, y)
        res = decode(g, synd, init, max_iter)
        wrong = int(np.count_nonzero(res.x_hat != x))
        bit_errors += wrong
        frame_errors += wrong > 0
    total_bits = n * trials
    ber = bit_errors / total_bits
    fer = frame_errors / trials
    return BerReport(
        ber=ber, fer=fer,
        ber_radius=1.96 * math.sqrt(max(ber * (1 - ber), 1e-12) / total_bits),
        fer_radius=1.96 * math.sqrt(max(fer * (1 - fer), 1e-12) / trials),
        n=n, trials=trials,
    )


# ---------------------------------------------------------------------------
# mismatch studies
# ---------------------------------------------------------------------------


@dataclass
class MismatchReport:
    converged: bool
    p_e_by_iter: list[float]
    matched_converged: bool
    matched_p_e_by_iter: list[float]
    identical: bool


def mismatch_experiment(true_source, est_source, dd, settings=DeSettings()):
    """Evolution from the mismatched initial density versus the matched one."""
    d_mis = quantize(mismatch_initial_density(true_source, est_source),
                     settings.step, settings.half_range, mode=settings.quant_mode)
    gs = settings.resolved_gamma_step()
    traj = run_de(d_mis, dd, settings.max_iter, settings.target,
                  gamma_step=gs, gamma_cap=settings.gamma_cap,
                  stall_window=settings.stall_window, stall_rel=settings.stall_rel)
    matched = evolve_source(true_source, dd, settings)
    identical = (len(traj.p_e_by_iter) == len(matched.p_e_by_iter)
                 and all(a == b for a, b in zip(traj.p_e_by_iter, matched.p_e_by_iter)))
    return MismatchReport(converged=traj.converged, p_e_by_iter=traj.p_e_by_iter,
                          matched_converged=matched.converged,
                          matched_p_e_by_iter=matched.p_e_by_iter,
                          identical=identical)


def example_xor_source(q, p_y0):
    """X = Y xor Z with Z ~ Bernoulli(q) independent of Y, P(y=0) = p_y0."""
    if not 0.0 <= q <= 0.5:
        raise ValueError("q out of range")
    if not 0.0 < p_y0 < 1.0:
        raise ValueError("P(y=0) must be interior")
    probs = np.array([
        [p_y0 * (1.0 - q), (1.0 - p_y0) * q],
        [p_y0 * q, (1.0 - p_y0) * (1.0 - q)],
    ])
    return JointSource(probs, [0, 1])


def example1_equivalence_check(q, py_list):
    """All XOR-correlation sources with the same q are pairwise equivalent."""
    sources = [example_xor_source(q, py) for py in py_list]
    for i in range(len(sources)):
        for j in range(i + 1, len(sources)):
            if not are_equivalent(sources[i], sources[j], 1e-9):
                return False
    return True


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------


def write_csv(fh, preamble, header, rows):
    """CSV with '#'-prefixed metadata preamble, then a header row."""
    for line in preamble:
        fh.write(f"# {line}\n")
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(str(v) for v in row) + "\n")


def write_sweep_csv(fh, report, extra_preamble=()):
    pre = [f"dd={report.dd_label}", f"syndrome_rate={report.syndrome_rate!r}",
           f"de {report.settings_summary}", *extra_preamble]
    rows = [(r.p, r.q, int(r.converged), r.h_xy, r.iterations) for r in report.rows]
    write_csv(fh, pre, ("p", "q", "converged", "h_xy", "iterations"), rows)


def write_concentration_csv(fh, report, extra_preamble=()):
    pre = [f"dd={report.dd_label}", f"iteration={report.iteration}", *extra_preamble]
    header = ("n", "trial", "ratio", "de_pe")
    rows = []
    for entry in report.entries:
        for t, r in enumerate(entry.ratios):
            rows.append((entry.n, t, r, entry.de_pe))
    write_csv(fh, pre, header, rows)
