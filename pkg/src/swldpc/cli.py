"""Command-line interface.

Data goes to stdout or to files; diagnostics and the resolved-settings echo
go to stderr.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import density_evolution as de
from . import experiments as ex
from . import ldpc
from . import source_model as sm
from ._kernels import BACKEND
from .bp_decoder import decode


@dataclass
class RunConfig:
    """Resolved settings of one invocation, echoed for reproducibility."""

    subcommand: str
    inputs: dict
    settings: de.DeSettings
    seed: int
    output: str | None

    def preamble(self):
        lines = [f"swldpc {self.subcommand} (kernel backend: {BACKEND})"]
        for key, val in self.inputs.items():
            lines.append(f"{key}={val}")
        lines.append(f"de {self.settings.summary()}")
        lines.append(f"seed={self.seed}")
        return lines


def _read(path):
    with open(path) as fh:
        return fh.read()


def _add_de_flags(sub):
    sub.add_argument("--step", type=float, default=1.0 / 64.0)
    sub.add_argument("--llr-cap", type=float, default=30.0)
    sub.add_argument("--gamma-step", type=float, default=None)
    sub.add_argument("--gamma-cap", type=float, default=50.0)
    sub.add_argument("--max-iter", type=int, default=2000)
    sub.add_argument("--target", type=float, default=1e-6)
    sub.add_argument("--quant-mode", choices=("moment", "nearest"), default="moment")


def _settings_from(args):
    if getattr(args, "step", None) is None:
        return de.DeSettings()
    return de.DeSettings(step=args.step, llr_cap=args.llr_cap,
                         gamma_step=args.gamma_step, gamma_cap=args.gamma_cap,
                         max_iter=args.max_iter, target=args.target,
                         quant_mode=args.quant_mode)


def _echo(config):
    for line in config.preamble():
        print(f"# {line}", file=sys.stderr)


def _out_stream(args):
    if getattr(args, "output", None):
        return open(args.output, "w")
    return sys.stdout


def build_parser():
    parser = argparse.ArgumentParser(prog="swldpc", description=__doc__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("encode", help="syndrome-encode a bit vector")
    p.add_argument("--graph", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output")

    p = subs.add_parser("decode", help="BP-decode a coset instance")
    p.add_argument("--graph", required=True)
    p.add_argument("--syndrome", required=True, help="0/1 string or a file path")
    p.add_argument("--llrs", required=True, help="file with one initial LLR per line")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--output")

    p = subs.add_parser("simulate", help="Monte-Carlo encode/decode error rates")
    p.add_argument("--source", required=True)
    p.add_argument("--dd", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--decoder-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output")

    p = subs.add_parser("de-run", help="run density evolution for one source")
    p.add_argument("--source", required=True)
    p.add_argument("--dd", required=True)
    p.add_argument("--trajectory", help="write iteration,p_e CSV here")
    p.add_argument("--ml", action="store_true",
                   help="initialize with channel-likelihood LLRs (mismatched)")
    p.add_argument("--estimate", help="source file used as the mismatched estimate")
    _add_de_flags(p)

    p = subs.add_parser("de-threshold", help="bisect a family for its threshold")
    p.add_argument("--family", choices=("bsc", "bec"), required=True)
    p.add_argument("--p", type=float, default=0.5, help="P(x=0) for the bsc family")
    p.add_argument("--dd", required=True)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-3)
    _add_de_flags(p)

    p = subs.add_parser("sweep", help="feasible-domain sweep over (p, q)")
    p.add_argument("--dd", required=True)
    p.add_argument("--points", type=int, default=26)
    p.add_argument("--p-list", help="comma-separated p values (overrides --points)")
    p.add_argument("--q-list", help="comma-separated q values (overrides --points)")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--output", required=True)
    _add_de_flags(p)

    p = subs.add_parser("convert", help="source-to-channel conversion report")
    p.add_argument("--source", required=True)
    p.add_argument("--output")

    p = subs.add_parser("equiv", help="test whether two sources are equivalent")
    p.add_argument("--source", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--tol", type=float, default=1e-9)

    p = subs.add_parser("degrade-check", help="degradation order of converted channels")
    p.add_argument("--source", required=True)
    p.add_argument("--other", help="candidate degraded source")
    p.add_argument("--map", dest="smap", help="stochastic map file applied to --source")
    p.add_argument("--tol", type=float, default=1e-9)

    p = subs.add_parser("concentration", help="incorrect-message concentration runs")
    p.add_argument("--source", required=True)
    p.add_argument("--dd", required=True)
    p.add_argument("--n-list", required=True, help="comma-separated block lengths")
    p.add_argument("--iterations", type=int, default=2)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--output", required=True)
    _add_de_flags(p)

    p = subs.add_parser("mismatch", help="mismatched-initialization evolution")
    p.add_argument("--source", required=True)
    p.add_argument("--estimate")
    p.add_argument("--ml", action="store_true")
    p.add_argument("--dd", required=True)
    _add_de_flags(p)

    return parser


def _cmd_encode(args, config):
    g = ldpc.read_adjacency(_read(args.graph))
    x = ldpc.parse_bits(_read(args.input))
    synd = ldpc.syndrome_encode(g, x)
    out = _out_stream(args)
    out.write(ldpc.format_bits(synd.bits) + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_decode(args, config):
    g = ldpc.read_adjacency(_read(args.graph))
    try:
        synd_bits = ldpc.parse_bits(args.syndrome)
    except ValueError:
        synd_bits = ldpc.parse_bits(_read(args.syndrome))
    llrs = np.array([float(tok) for tok in _read(args.llrs).split()])
    res = decode(g, ldpc.Syndrome(synd_bits), llrs, args.max_iter)
    out = _out_stream(args)
    out.write(ldpc.format_bits(res.x_hat) + "\n")
    if out is not sys.stdout:
        out.close()
    status = "satisfied" if res.syndrome_satisfied else "unsatisfied"
    print(f"# iterations={res.iterations_used} syndrome={status}", file=sys.stderr)
    return 0


def _cmd_simulate(args, config):
    source = sm.parse_source(_read(args.source))
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    rep = ex.monte_carlo_ber(source, dd, args.n, args.trials,
                             args.decoder_iter, args.seed)
    out = _out_stream(args)
    ex.write_csv(out, config.preamble(),
                 ("n", "trials", "ber", "ber_radius", "fer", "fer_radius"),
                 [(rep.n, rep.trials, rep.ber, rep.ber_radius, rep.fer, rep.fer_radius)])
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_de_run(args, config):
    source = sm.parse_source(_read(args.source))
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    settings = _settings_from(args)
    if args.ml or args.estimate:
        est = (sm.ml_mismatch_source(source) if args.ml
               else sm.parse_source(_read(args.estimate)))
        d0 = de.quantize(sm.mismatch_initial_density(source, est),
                         settings.step, settings.half_range,
                         mode=settings.quant_mode)
        traj = de.run_de(d0, dd, settings.max_iter, settings.target,
                         gamma_step=settings.resolved_gamma_step(),
                         gamma_cap=settings.gamma_cap)
    else:
        traj = de.evolve_source(source, dd, settings)
    print(f"converged={traj.converged} iterations={traj.iterations} "
          f"final_p_e={traj.p_e_by_iter[-1]:.6e}")
    if args.trajectory:
        with open(args.trajectory, "w") as fh:
            ex.write_csv(fh, config.preamble(), ("iteration", "p_e"),
                         list(enumerate(traj.p_e_by_iter)))
    return 0


def _cmd_de_threshold(args, config):
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    settings = _settings_from(args)
    if args.family == "bsc":
        family = ex.make_bsc_family(args.p, settings)
        lo = args.lo if args.lo is not None else 0.005
        hi = args.hi if args.hi is not None else 0.3
    else:
        family = ex.make_bec_family(settings)
        lo = args.lo if args.lo is not None else 0.01
        hi = args.hi if args.hi is not None else 0.95
    th = de.find_threshold(family, dd, lo, hi, args.tol,
                           max_iter=settings.max_iter, target=settings.target,
                           gamma_step=settings.resolved_gamma_step(),
                           gamma_cap=settings.gamma_cap)
    print(f"{th:.6f}")
    return 0


def _cmd_sweep(args, config):
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    settings = _settings_from(args)
    if args.p_list:
        p_grid = [float(v) for v in args.p_list.split(",")]
    else:
        p_grid = np.linspace(0.0, 0.5, args.points).tolist()
    if args.q_list:
        q_grid = [float(v) for v in args.q_list.split(",")]
    else:
        q_grid = np.linspace(0.0, 0.5, args.points).tolist()
    report = ex.feasible_domain_sweep(dd, p_grid, q_grid, settings, jobs=args.jobs)
    with open(args.output, "w") as fh:
        ex.write_sweep_csv(fh, report, extra_preamble=config.preamble())
    bad = report.violations()
    print(f"points={len(report.rows)} converged={sum(r.converged for r in report.rows)} "
          f"violations={len(bad)}")
    return 0


def _cmd_convert(args, config):
    source = sm.parse_source(_read(args.source))
    ch = sm.source_to_channel(source)
    h = sm.conditional_entropy(source)
    c = sm.channel_capacity(ch)
    d_src = sm.initial_density(source)
    d_ch = ch.message_density()
    match = sm.densities_close(d_src, d_ch, 1e-12)
    out = _out_stream(args)
    for line in config.preamble():
        out.write(f"# {line}\n")
    out.write(f"# H(X|Y)={h!r} capacity={c!r} identity_residual={h + c - 1.0!r} "
              f"density_match={match}\n")
    out.write("output,llr,p_given_0,p_given_1,pair\n")
    p1 = ch.p_given_1
    for k, lab in enumerate(ch.outputs):
        out.write(f"{k},{lab},{float(ch.p_given_0[k])!r},{float(p1[k])!r},{int(ch.pairing[k])}\n")
    if out is not sys.stdout:
        out.close()
    return 0


def _cmd_equiv(args, config):
    a = sm.parse_source(_read(args.source))
    b = sm.parse_source(_read(args.other))
    verdict = sm.are_equivalent(a, b, args.tol)
    print("equivalent" if verdict else "not-equivalent")
    return 0


def _cmd_degrade_check(args, config):
    a = sm.parse_source(_read(args.source))
    if args.smap:
        smap = sm.parse_stochastic_map(_read(args.smap))
        b = sm.degrade_source(a, smap)
    elif args.other:
        b = sm.parse_source(_read(args.other))
    else:
        raise ValueError("degrade-check needs --other or --map")
    verdict = sm.is_degraded(sm.source_to_channel(a), sm.source_to_channel(b), args.tol)
    print("degraded" if verdict else "not-degraded")
    return 0


def _cmd_concentration(args, config):
    source = sm.parse_source(_read(args.source))
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    n_list = [int(v) for v in args.n_list.split(",")]
    settings = _settings_from(args)
    rep = ex.concentration_experiment(dd, n_list, args.iterations, args.trials,
                                      source, args.seed, settings=settings)
    with open(args.output, "w") as fh:
        ex.write_concentration_csv(fh, rep, extra_preamble=config.preamble())
    for entry in rep.entries:
        fracs = " ".join(f"out{eps:g}={f:.3f}" for eps, f in entry.outlier_fraction.items())
        print(f"n={entry.n} mean={entry.mean:.6f} de_pe={entry.de_pe:.6f} {fracs}")
    return 0


def _cmd_mismatch(args, config):
    source = sm.parse_source(_read(args.source))
    dd = ldpc.parse_degree_distribution(_read(args.dd))
    if args.ml:
        est = sm.ml_mismatch_source(source)
    elif args.estimate:
        est = sm.parse_source(_read(args.estimate))
    else:
        raise ValueError("mismatch needs --estimate or --ml")
    settings = _settings_from(args)
    rep = ex.mismatch_experiment(source, est, dd, settings)
    print(f"mismatched converged={rep.converged} final_p_e={rep.p_e_by_iter[-1]:.6e}")
    print(f"matched converged={rep.matched_converged} "
          f"final_p_e={rep.matched_p_e_by_iter[-1]:.6e}")
    print(f"identical={rep.identical}")
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "simulate": _cmd_simulate,
    "de-run": _cmd_de_run,
    "de-threshold": _cmd_de_threshold,
    "sweep": _cmd_sweep,
    "convert": _cmd_convert,
    "equiv": _cmd_equiv,
    "degrade-check": _cmd_degrade_check,
    "concentration": _cmd_concentration,
    "mismatch": _cmd_mismatch,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("subcommand",) and v is not None}
    config = RunConfig(subcommand=args.subcommand, inputs=inputs,
                       settings=_settings_from(args),
                       seed=getattr(args, "seed", 1),
                       output=getattr(args, "output", None))
    _echo(config)
    try:
        return _COMMANDS[args.subcommand](args, config)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
