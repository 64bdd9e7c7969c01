import math

import numpy as np
import pytest

from conftest import UNIFORM_BSC01_TEXT, random_source
from swldpc.experiments import bsc_family_source, erasure_source
from swldpc.source_model import (BiosChannel, DiscreteLlrDensity, JointSource,
                                 StochasticMap, are_equivalent,
                                 channel_capacity, check_symmetry,
                                 conditional_entropy, degrade_source,
                                 densities_close, equivalence_class_source,
                                 initial_density, initial_llr, is_degraded,
                                 mismatch_initial_density, ml_mismatch_source,
                                 parse_source, parse_stochastic_map,
                                 source_to_channel)

LN9 = 2.1972245773362196
LN6 = 1.791759469228055
LN_2_27 = -2.6026896854443837
HB01 = 0.4689955935892812


def test_parse_uniform_bsc():
    s = parse_source(UNIFORM_BSC01_TEXT)
    assert s.ny == 2
    assert s.probs[0, 0] == 0.45 and s.probs[1, 0] == 0.05
    assert s.p_x[0] == pytest.approx(0.5, abs=1e-15)


def test_parse_rejects_bad_sum():
    bad = "0 0 0.45\n0 1 0.05\n1 0 0.05\n1 1 0.449\n"
    with pytest.raises(ValueError, match="sum"):
        parse_source(bad)


def test_parse_rejects_negative_and_duplicates():
    with pytest.raises(ValueError, match="negative"):
        parse_source("0 0 -0.1\n0 1 0.55\n1 0 0.55\n")
    with pytest.raises(ValueError, match="duplicate"):
        parse_source("0 0 0.25\n0 0 0.25\n1 0 0.5\n")
    with pytest.raises(ValueError, match="malformed|expected"):
        parse_source("0 0\n")


def test_parse_normalizes_within_tolerance():
    # off by < 1e-9 is accepted and renormalized to machine precision
    s = parse_source("0 0 0.4500000001\n0 1 0.05\n1 0 0.05\n1 1 0.45\n")
    assert abs(s.probs.sum() - 1.0) <= 1e-15


def test_parse_rejects_zero_probability_symbol():
    with pytest.raises(ValueError, match="zero-probability"):
        parse_source("0 0 0.5\n1 0 0.5\n0 1 0\n1 1 0\n")


def test_bsc_correlation_table():
    s = bsc_family_source(0.4, 0.1)
    assert s.probs[0].tolist() == [0.4 * 0.9, 0.4 * 0.1]
    assert s.probs[1].tolist() == [0.6 * 0.1, 0.6 * 0.9]


def test_initial_llr_values():
    s = parse_source(UNIFORM_BSC01_TEXT)
    assert initial_llr(s, 0) == pytest.approx(LN9, abs=1e-15)
    assert initial_llr(s, 1) == pytest.approx(-LN9, abs=1e-15)
    flat = JointSource([[0.25, 0.3], [0.25, 0.2]])
    assert initial_llr(flat, 0) == 0.0
    degenerate = JointSource([[0.5, 0.2], [0.0, 0.3]])
    assert initial_llr(degenerate, 0) == math.inf
    with pytest.raises(ValueError, match="unknown"):
        initial_llr(s, 99)


def test_initial_density_worked_table():
    d = initial_density(bsc_family_source(0.4, 0.1))
    assert np.allclose(d.llrs, [LN_2_27, -LN6, LN6, -LN_2_27], atol=1e-12)
    assert np.allclose(d.masses, [0.04, 0.06, 0.36, 0.54], atol=0)
    assert d.mass_pos_inf == 0.0


def test_initial_density_merges_equal_llrs():
    d = initial_density(parse_source(UNIFORM_BSC01_TEXT))
    assert len(d.llrs) == 2
    assert np.allclose(d.llrs, [-LN9, LN9], atol=1e-12)
    assert np.allclose(d.masses, [0.1, 0.9], atol=1e-15)


def test_initial_density_erasure_class():
    d = initial_density(erasure_source(0.3))
    assert d.llrs.tolist() == [0.0]
    assert d.masses.tolist() == [0.3]
    assert d.mass_pos_inf == pytest.approx(0.7, abs=1e-15)


def test_density_merge_tolerance_and_total():
    d = DiscreteLlrDensity([1.0, 1.0 + 1e-13], [0.5, 0.5])
    assert len(d.llrs) == 1
    with pytest.raises(ValueError, match="total mass"):
        DiscreteLlrDensity([0.0], [0.9])


def test_mismatch_identity_and_degenerate():
    s = bsc_family_source(0.4, 0.1)
    d_match = mismatch_initial_density(s, s)
    d_ref = initial_density(s)
    assert np.array_equal(d_match.llrs, d_ref.llrs)
    assert np.array_equal(d_match.masses, d_ref.masses)

    est = JointSource([[0.5, 0.3], [0.0, 0.2]])  # P_es(x=1|y=0) = 0
    truth = bsc_family_source(0.4, 0.1)
    d = mismatch_initial_density(truth, est)
    # all true mass on y=0 is pushed to certainty
    assert d.mass_pos_inf == pytest.approx(truth.probs[0, 0], abs=1e-15)
    assert d.mass_neg_inf == pytest.approx(truth.probs[1, 0], abs=1e-15)


def test_mismatch_is_generally_asymmetric(rng):
    # note: for the two-symbol symmetric-correlation family the
    # channel-likelihood mismatch density happens to be symmetric (it merges
    # into the uniform-prior density), so use a generic source instead
    truth = random_source(rng, ny=3)
    est = random_source(rng, ny=3)
    d = mismatch_initial_density(truth, est)
    assert not check_symmetry(d, 1e-9)


def test_mismatch_requires_shared_alphabet():
    with pytest.raises(ValueError, match="alphabet"):
        mismatch_initial_density(bsc_family_source(0.4, 0.1), erasure_source(0.3))


def test_check_symmetry_cases(rng):
    for _ in range(20):
        assert check_symmetry(initial_density(random_source(rng)), 1e-9)
    assert not check_symmetry(DiscreteLlrDensity([-1.0, 1.0], [0.5, 0.5]), 1e-9)
    assert check_symmetry(DiscreteLlrDensity([0.0], [1.0]), 1e-9)
    # mass at -infinity breaks symmetry
    bad = DiscreteLlrDensity([], [], mass_pos_inf=0.5, mass_neg_inf=0.5)
    assert not check_symmetry(bad, 1e-9)


def test_conditional_entropy_values():
    assert conditional_entropy(parse_source(UNIFORM_BSC01_TEXT)) == pytest.approx(HB01, abs=1e-12)
    assert conditional_entropy(JointSource([[0.4, 0.0], [0.0, 0.6]])) == 0.0
    assert conditional_entropy(bsc_family_source(0.4, 0.1)) == pytest.approx(0.45849229301029637, abs=1e-12)


def test_source_to_channel_worked_example():
    ch = source_to_channel(bsc_family_source(0.4, 0.1))
    assert ch.n_outputs == 4
    # canonical order: LLR ascending
    assert np.allclose(ch.outputs, [LN_2_27, -LN6, LN6, -LN_2_27], atol=1e-12)
    assert np.allclose(ch.p_given_0, [0.04, 0.06, 0.36, 0.54], atol=0)
    assert ch.pairing.tolist() == [3, 2, 1, 0]
    assert densities_close(ch.message_density(),
                           initial_density(bsc_family_source(0.4, 0.1)), 1e-12)


def test_source_to_channel_erasure_is_bec():
    ch = source_to_channel(erasure_source(0.3))
    bec = BiosChannel.bec(0.3)
    assert ch.n_outputs == 3
    assert np.allclose(ch.p_given_0, bec.p_given_0)
    assert ch.pairing.tolist() == bec.pairing.tolist()
    assert channel_capacity(ch) == pytest.approx(0.7, abs=1e-12)


def test_uniform_bios_source_roundtrip():
    # for uniform X the converted channel reproduces P(y|x) up to relabeling:
    # verified through density equality
    s = parse_source(UNIFORM_BSC01_TEXT)
    ch = source_to_channel(s)
    assert densities_close(ch.message_density(), initial_density(s), 1e-12)
    assert channel_capacity(ch) == pytest.approx(1 - HB01, abs=1e-12)


def test_capacity_identity_random(rng):
    for _ in range(50):
        s = random_source(rng)
        ch = source_to_channel(s)
        assert abs(conditional_entropy(s) + channel_capacity(ch) - 1.0) <= 1e-9


def test_correspondence_exactness_random(rng):
    for _ in range(25):
        s = random_source(rng)
        assert densities_close(source_to_channel(s).message_density(),
                               initial_density(s), 1e-12)


def test_equivalence_class_bsc():
    s = parse_source(UNIFORM_BSC01_TEXT)
    q = initial_density(s)
    member = equivalence_class_source(q, [0.5, 0.5])
    # the same source up to relabeling of y
    cols = {tuple(member.probs[:, k]) for k in range(member.ny)}
    assert cols == {(0.45, 0.05), (0.05, 0.45)}
    assert are_equivalent(s, member, 1e-12)
    other = equivalence_class_source(q, [0.3, 0.7])
    assert are_equivalent(s, other, 1e-12)
    assert sorted(other.p_y.tolist()) != sorted(s.p_y.tolist())


def test_equivalence_class_erasure_and_validation():
    q = initial_density(erasure_source(0.3))
    member = equivalence_class_source(q, [0.4, 0.5, 0.6])
    assert are_equivalent(member, erasure_source(0.3), 1e-12)
    with pytest.raises(ValueError, match="alpha"):
        equivalence_class_source(q, [0.4, 0.3, 0.6])
    with pytest.raises(ValueError, match="sum to 1"):
        equivalence_class_source(q, [0.4, 0.5, 0.7])
    asym = DiscreteLlrDensity([-1.0, 1.0], [0.5, 0.5])
    with pytest.raises(ValueError, match="symmetric"):
        equivalence_class_source(asym, [0.5, 0.5])


def test_equivalence_freedom_count(rng):
    # a density with 2k finite atoms has k free parameters; distinct alphas
    # give distinct P(y) but equivalent sources
    s = random_source(rng, ny=3, floor=0.2)
    q = initial_density(s)
    n = len(q.llrs)
    half = n // 2
    a1 = rng.uniform(0.2, 0.8, half)
    a2 = rng.uniform(0.2, 0.8, half)
    m1 = equivalence_class_source(q, np.concatenate([a1, (1 - a1)[::-1]]))
    m2 = equivalence_class_source(q, np.concatenate([a2, (1 - a2)[::-1]]))
    assert are_equivalent(m1, m2, 1e-12)
    assert not np.allclose(m1.p_y, m2.p_y)
    # reverse channel coincides on paired symbols
    cond1 = m1.probs / m1.p_y
    cond2 = m2.probs / m2.p_y
    assert np.allclose(cond1, cond2, atol=1e-12)


def test_are_equivalent_basic():
    a = bsc_family_source(0.5, 0.1)
    assert are_equivalent(a, a, 1e-12)
    assert not are_equivalent(a, bsc_family_source(0.5, 0.2), 1e-9)


def test_degrade_identity_and_composition():
    s = parse_source(UNIFORM_BSC01_TEXT)
    ident = StochasticMap(np.eye(2))
    assert np.allclose(degrade_source(s, ident).probs, s.probs)
    comp = degrade_source(s, StochasticMap([[0.9, 0.1], [0.1, 0.9]]))
    assert conditional_entropy(comp) == pytest.approx(0.6800770457282798, abs=1e-12)
    assert np.allclose(comp.p_x, s.p_x, atol=1e-12)


def test_degrade_destroying_side_information():
    s = bsc_family_source(0.4, 0.1)
    dead = degrade_source(s, StochasticMap([[1.0, 0.0], [1.0, 0.0]]))
    hx = -(0.4 * math.log2(0.4) + 0.6 * math.log2(0.6))
    assert conditional_entropy(dead) == pytest.approx(hx, abs=1e-12)


def test_degrade_dimension_mismatch():
    s = bsc_family_source(0.4, 0.1)
    with pytest.raises(ValueError, match="alphabet|row count"):
        degrade_source(s, StochasticMap(np.eye(3)))


def test_is_degraded_verdicts():
    a = source_to_channel(bsc_family_source(0.5, 0.1))
    b = source_to_channel(degrade_source(bsc_family_source(0.5, 0.1),
                                         StochasticMap([[0.9, 0.1], [0.1, 0.9]])))
    assert is_degraded(a, b, 1e-9)
    assert is_degraded(a, a, 1e-9)
    assert not is_degraded(BiosChannel.bec(0.3), BiosChannel.bec(0.2), 1e-9)
    assert is_degraded(BiosChannel.bec(0.2), BiosChannel.bec(0.3), 1e-9)


def test_is_degraded_matches_linprog(rng):
    scipy_opt = pytest.importorskip("scipy.optimize")
    for _ in range(6):
        a = source_to_channel(random_source(rng, ny=3))
        b = source_to_channel(random_source(rng, ny=2))
        ours = is_degraded(a, b, 1e-9)
        na, nb = a.n_outputs, b.n_outputs
        pa = np.vstack([a.p_given_0, a.p_given_1])
        pb = np.vstack([b.p_given_0, b.p_given_1])
        a_eq = []
        b_eq = []
        for x in (0, 1):
            for j in range(nb):
                row = np.zeros(na * nb)
                for i in range(na):
                    row[i * nb + j] = pa[x, i]
                a_eq.append(row)
                b_eq.append(pb[x, j])
        for i in range(na):
            row = np.zeros(na * nb)
            row[i * nb:(i + 1) * nb] = 1.0
            a_eq.append(row)
            b_eq.append(1.0)
        res = scipy_opt.linprog(np.zeros(na * nb), A_eq=np.asarray(a_eq),
                                b_eq=np.asarray(b_eq), bounds=(0, None),
                                method="highs")
        assert ours == res.success


def test_ml_mismatch_source_uniformizes_prior():
    s = bsc_family_source(0.4, 0.1)
    est = ml_mismatch_source(s)
    assert np.allclose(est.p_x, [0.5, 0.5], atol=1e-12)
    # conditional P(y|x) is untouched
    assert np.allclose(est.probs / est.p_x[:, None], s.probs / s.p_x[:, None])


def test_parse_stochastic_map():
    smap = parse_stochastic_map("0 0 0.9\n0 1 0.1\n1 0 0.1\n1 1 0.9\n")
    assert np.allclose(smap.rows, [[0.9, 0.1], [0.1, 0.9]])
    with pytest.raises(ValueError, match="sum to 1"):
        parse_stochastic_map("0 0 0.9\n")


def test_density_text_roundtrip():
    from swldpc.source_model import format_density, parse_density
    d = initial_density(erasure_source(0.25))
    d2 = parse_density(format_density(d))
    assert np.array_equal(d2.llrs, d.llrs)
    assert np.array_equal(d2.masses, d.masses)
    assert d2.mass_pos_inf == d.mass_pos_inf
