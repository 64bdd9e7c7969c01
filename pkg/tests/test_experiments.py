import io
import math

import numpy as np
import pytest

from conftest import random_source
from swldpc.density_evolution import DeSettings
from swldpc.experiments import (BscFamilyPoint, bsc_family_source,
                                concentration_experiment,
                                correspondence_check, erasure_source,
                                example1_equivalence_check,
                                feasible_domain_sweep, make_bec_family,
                                mismatch_experiment, monte_carlo_ber,
                                write_sweep_csv)
from swldpc.ldpc import DegreeDistribution
from swldpc.source_model import (conditional_entropy, ml_mismatch_source,
                                 source_to_channel)

DD36 = DegreeDistribution.regular(3, 6)
FAST = DeSettings(step=1.0 / 16.0, llr_cap=20.0, max_iter=250)


def test_bsc_family_point_validation():
    with pytest.raises(ValueError):
        BscFamilyPoint(0.6, 0.1)
    with pytest.raises(ValueError):
        BscFamilyPoint(0.3, -0.1)


def test_bsc_family_tables():
    s = bsc_family_source(0.5, 0.1)
    assert np.allclose(sorted(s.probs.reshape(-1)), [0.05, 0.05, 0.45, 0.45])
    s2 = bsc_family_source(0.4, 0.1)
    assert np.allclose(sorted(s2.probs.reshape(-1)), [0.04, 0.06, 0.36, 0.54])
    assert conditional_entropy(bsc_family_source(0.3, 0.0)) == 0.0


def test_correspondence_random_sources(rng):
    worst = 0.0
    for _ in range(3):
        worst = max(worst, correspondence_check(random_source(rng), DD36, 10, FAST))
    assert worst <= 1e-12


def test_correspondence_erasure_and_negative_control():
    assert correspondence_check(erasure_source(0.3), DD36, 10, FAST) == 0.0
    other = source_to_channel(bsc_family_source(0.5, 0.2))
    div = correspondence_check(bsc_family_source(0.5, 0.1), DD36, 3, FAST,
                               channel=other)
    assert div > 1e-3


def test_sweep_small_grid_sound():
    report = feasible_domain_sweep(DD36, [0.0, 0.25, 0.5], [0.0, 0.04, 0.3],
                                   FAST, jobs=1)
    assert len(report.rows) == 9
    assert report.violations() == []
    by_pq = {(r.p, r.q): r for r in report.rows}
    # q = 0: every p converges (perfect side information)
    for p in (0.0, 0.25, 0.5):
        assert by_pq[(p, 0.0)].converged
    # far above the converse bound: cannot converge
    assert not by_pq[(0.5, 0.3)].converged
    # H(X|Y) recorded consistently
    for r in report.rows:
        assert r.h_xy == pytest.approx(
            conditional_entropy(bsc_family_source(r.p, r.q)), abs=1e-9)


def test_sweep_parallel_matches_serial():
    grid_p = [0.2, 0.5]
    grid_q = [0.02, 0.3]
    a = feasible_domain_sweep(DD36, grid_p, grid_q, FAST, jobs=1)
    b = feasible_domain_sweep(DD36, grid_p, grid_q, FAST, jobs=2)
    assert [(r.p, r.q, r.converged, r.h_xy) for r in a.rows] == \
        [(r.p, r.q, r.converged, r.h_xy) for r in b.rows]


def test_sweep_csv_format():
    report = feasible_domain_sweep(DD36, [0.5], [0.02], FAST, jobs=1)
    buf = io.StringIO()
    write_sweep_csv(buf, report)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0].startswith("# dd=")
    header_idx = next(i for i, ln in enumerate(lines) if not ln.startswith("#"))
    assert lines[header_idx] == "p,q,converged,h_xy,iterations"
    assert len(lines) == header_idx + 2


def test_concentration_iteration_zero(rng):
    # at l = 0 the ratio is the empirical initial error rate
    src = bsc_family_source(0.5, 0.1)
    rep = concentration_experiment(DD36, [4000], 0, 8, src, seed=5, settings=FAST)
    entry = rep.entries[0]
    assert entry.de_pe == pytest.approx(0.1, abs=1e-9)
    assert abs(entry.mean - 0.1) < 0.02
    with pytest.raises(ValueError, match="regular"):
        from swldpc.ldpc import AWGN_IRREGULAR_R12
        concentration_experiment(AWGN_IRREGULAR_R12, [1000], 0, 2, src, seed=1)


def test_monte_carlo_endpoints():
    src = bsc_family_source(0.5, 0.0)
    rep = monte_carlo_ber(src, DD36, 600, 3, 20, seed=2)
    assert rep.ber == 0.0 and rep.fer == 0.0

    hopeless = bsc_family_source(0.5, 0.2)  # far above the rate-1/2 limit
    rep2 = monte_carlo_ber(hopeless, DD36, 600, 3, 20, seed=2)
    assert rep2.fer == 1.0


def test_mismatch_identity_cases():
    src = bsc_family_source(0.5, 0.07)
    rep = mismatch_experiment(src, src, DD36, FAST)
    assert rep.identical

    ml = mismatch_experiment(src, ml_mismatch_source(src), DD36, FAST)
    assert ml.identical  # uniform prior: posterior init equals channel init


def test_mismatch_nonuniform_prior_differs():
    src = bsc_family_source(0.4, 0.08)
    rep = mismatch_experiment(src, ml_mismatch_source(src), DD36, FAST)
    assert not rep.identical


def test_example1_equivalence():
    assert example1_equivalence_check(0.1, [0.2, 0.5, 0.8])
    assert example1_equivalence_check(0.1, [0.35])
    # different q values are not equivalent
    from swldpc.experiments import example_xor_source
    from swldpc.source_model import are_equivalent
    assert not are_equivalent(example_xor_source(0.1, 0.5),
                              example_xor_source(0.2, 0.5), 1e-9)


def test_experiment_determinism():
    src = bsc_family_source(0.5, 0.08)
    a = monte_carlo_ber(src, DD36, 400, 3, 20, seed=9)
    b = monte_carlo_ber(src, DD36, 400, 3, 20, seed=9)
    assert (a.ber, a.fer) == (b.ber, b.fer)
    c1 = concentration_experiment(DD36, [800], 1, 4, src, seed=4, settings=FAST)
    c2 = concentration_experiment(DD36, [800], 1, 4, src, seed=4, settings=FAST)
    assert c1.entries[0].ratios == c2.entries[0].ratios
