"""Joint source distributions, LLR message densities, and channel conversion.

A source here is a joint probability table P(x, y) with binary x and a finite
side-information alphabet.  The decoder-facing statistics of such a source are
fully captured by its initial message density: the distribution of the
posterior log-likelihood ratio ln(P(x=0,y)/P(x=1,y)), folded so that
realizations with x=1 enter with reversed sign.  That density is always
symmetric (Q(-m) = e^{-m} Q(m)), and it determines a unique binary-input
output-symmetric channel with the same message density, for which
H(X|Y) + C = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LLR_MERGE_TOL = 1e-12
_POS_MATCH_TOL = 1e-9  # absolute slack when pairing atom locations


class SolverError(RuntimeError):
    """The feasibility solver hit its pivot cap without a verdict."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


class DiscreteLlrDensity:
    """A finite LLR distribution: sorted atoms plus masses at +/-infinity.

    Atoms closer than LLR_MERGE_TOL are combined at construction (at their
    mass-weighted mean location); zero-mass atoms are dropped.
    """

    def __init__(self, llrs, masses, mass_pos_inf=0.0, mass_neg_inf=0.0):
        llrs = np.asarray(llrs, dtype=np.float64)
        masses = np.asarray(masses, dtype=np.float64)
        if llrs.shape != masses.shape or llrs.ndim != 1:
            raise ValueError("llrs and masses must be 1-d arrays of equal length")
        if np.any(masses < 0) or mass_pos_inf < 0 or mass_neg_inf < 0:
            raise ValueError("negative mass")
        if not np.all(np.isfinite(llrs)):
            raise ValueError("atom locations must be finite; use the infinity masses")
        keep = masses > 0
        llrs, masses = _merge_atoms(llrs[keep], masses[keep])
        total = masses.sum() + mass_pos_inf + mass_neg_inf
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass {total!r} is not 1 within 1e-12")
        self.llrs = llrs
        self.masses = masses
        self.mass_pos_inf = float(mass_pos_inf)
        self.mass_neg_inf = float(mass_neg_inf)

    def __repr__(self):
        return (f"DiscreteLlrDensity({len(self.llrs)} atoms, "
                f"pinf={self.mass_pos_inf:.6g}, ninf={self.mass_neg_inf:.6g})")

    def error_probability(self):
        """Mass strictly below zero plus half the mass at zero."""
        neg = self.masses[self.llrs < 0].sum() + self.mass_neg_inf
        at_zero = self.masses[self.llrs == 0.0].sum()
        return float(neg + 0.5 * at_zero)


def _merge_atoms(llrs, masses, tol=LLR_MERGE_TOL):
    order = np.argsort(llrs, kind="stable")
    llrs = llrs[order]
    masses = masses[order]
    out_l: list[float] = []
    out_m: list[float] = []
    for loc, q in zip(llrs, masses):
        if out_l and loc - out_l[-1] < tol:
            tot = out_m[-1] + q
            out_l[-1] = (out_l[-1] * out_m[-1] + loc * q) / tot
            out_m[-1] = tot
        else:
            out_l.append(float(loc))
            out_m.append(float(q))
    return np.asarray(out_l), np.asarray(out_m)


class JointSource:
    """A joint table P(x, y) on {0,1} x Y with at least two y symbols.

    Entries are nonnegative, sum to one (1e-12), and every y symbol carries
    positive total probability.  Instances are immutable by convention; all
    operations on them are pure functions.
    """

    def __init__(self, probs, y_labels=None):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] != 2:
            raise ValueError("probs must have shape (2, |Y|)")
        ny = probs.shape[1]
        if ny < 2:
            raise ValueError("need at least two y symbols")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        col = probs.sum(axis=0)
        if np.any(col <= 0):
            raise ValueError("zero-probability y symbol")
        if y_labels is None:
            y_labels = list(range(ny))
        else:
            y_labels = list(y_labels)
        if len(y_labels) != ny:
            raise ValueError("label count does not match table width")
        if len(set(y_labels)) != ny:
            raise ValueError("duplicate y label")
        self.probs = probs.copy()
        self.probs.setflags(write=False)
        self.y_labels = y_labels
        self._index = {lab: k for k, lab in enumerate(y_labels)}

    @property
    def ny(self):
        return self.probs.shape[1]

    @property
    def p_x(self):
        return self.probs.sum(axis=1)

    @property
    def p_y(self):
        return self.probs.sum(axis=0)

    def y_index(self, y):
        try:
            return self._index[y]
        except KeyError:
            raise ValueError(f"unknown y symbol {y!r}") from None

    def __repr__(self):
        return f"JointSource(|Y|={self.ny}, p0={self.p_x[0]:.6g})"


class BiosChannel:
    """A binary-input output-symmetric channel.

    ``p_given_0[k]`` is the probability of output k under input 0; the
    probability under input 1 is ``p_given_0[pairing[k]]`` where ``pairing``
    is an involution on the outputs.
    """

    def __init__(self, outputs, p_given_0, pairing):
        p_given_0 = np.asarray(p_given_0, dtype=np.float64)
        pairing = np.asarray(pairing, dtype=np.int64)
        n = p_given_0.shape[0]
        if len(outputs) != n or pairing.shape[0] != n:
            raise ValueError("outputs, p_given_0 and pairing must have equal length")
        if np.any(p_given_0 < 0):
            raise ValueError("negative output probability")
        if abs(p_given_0.sum() - 1.0) > 1e-12:
            raise ValueError("output probabilities do not sum to 1")
        if not np.array_equal(pairing[pairing], np.arange(n)):
            raise ValueError("pairing is not an involution")
        self.outputs = list(outputs)
        self.p_given_0 = p_given_0.copy()
        self.p_given_0.setflags(write=False)
        self.pairing = pairing.copy()
        self.pairing.setflags(write=False)

    @property
    def n_outputs(self):
        return len(self.outputs)

    @property
    def p_given_1(self):
        return self.p_given_0[self.pairing]

    @classmethod
    def bec(cls, epsilon):
        """Binary erasure channel with outputs labeled by their LLR."""
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("erasure probability out of range")
        return cls([-math.inf, 0.0, math.inf],
                   [0.0, epsilon, 1.0 - epsilon],
                   [2, 1, 0])

    def message_density(self):
        """Initial LLR density under input 0 (the all-zero-input density).

        LLRs are evaluated once per output pair so that paired outputs get
        exactly negated locations.
        """
        llrs: list[float] = []
        masses: list[float] = []
        pinf = 0.0
        for i, j in self._pairs():
            pi = self.p_given_0[i]
            pj = self.p_given_0[j]
            if i == j:
                if pi > 0:
                    llrs.append(0.0)
                    masses.append(pi)
                continue
            if pi == 0.0 and pj == 0.0:
                continue
            if pj == 0.0:
                pinf += pi
            elif pi == 0.0:
                pinf += pj
            else:
                m = _pair_llr(pi, pj)
                llrs.append(m)
                masses.append(pi)
                llrs.append(-m)
                masses.append(pj)
        return DiscreteLlrDensity(llrs, masses, mass_pos_inf=pinf)

    def _pairs(self):
        seen = set()
        for i in range(self.n_outputs):
            j = int(self.pairing[i])
            if i in seen or j in seen:
                continue
            seen.add(i)
            seen.add(j)
            yield i, j

    def __repr__(self):
        return f"BiosChannel({self.n_outputs} outputs)"


class StochasticMap:
    """A row-stochastic matrix used to degrade a source's side information."""

    def __init__(self, rows, in_labels=None, out_labels=None):
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be a 2-d matrix")
        if np.any(rows < 0):
            raise ValueError("negative transition probability")
        if np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("rows must each sum to 1")
        self.rows = rows.copy()
        self.rows.setflags(write=False)
        self.in_labels = list(in_labels) if in_labels is not None else list(range(rows.shape[0]))
        self.out_labels = list(out_labels) if out_labels is not None else list(range(rows.shape[1]))
        if len(self.in_labels) != rows.shape[0] or len(self.out_labels) != rows.shape[1]:
            raise ValueError("label counts do not match matrix shape")


# ---------------------------------------------------------------------------
# construction and parsing
# ---------------------------------------------------------------------------


def _finalize_joint(probs, labels):
    """Drop zero-probability symbols; split a lone survivor into two halves.

    The split relabels to 0..n-1 and leaves the induced message density and
    H(X|Y) unchanged, so the result is an equivalent source that satisfies
    the |Y| >= 2 invariant.
    """
    probs = np.asarray(probs, dtype=np.float64)
    keep = probs.sum(axis=0) > 0
    probs = probs[:, keep]
    labels = [lab for lab, k in zip(labels, keep) if k]
    if probs.shape[1] == 1:
        probs = np.column_stack([probs[:, 0] / 2.0, probs[:, 0] / 2.0])
        labels = [0, 1]
    return JointSource(probs, labels)


def parse_source(text):
    """Parse the line-oriented source format: '# comment' and 'x y prob' lines."""
    table: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'x y prob', got {raw!r}")
        try:
            x = int(parts[0])
            y = int(parts[1])
            prob = float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed entry {raw!r}") from None
        if x not in (0, 1):
            raise ValueError(f"line {lineno}: x must be 0 or 1")
        if prob < 0:
            raise ValueError(f"line {lineno}: negative probability")
        if (x, y) in table:
            raise ValueError(f"line {lineno}: duplicate entry for x={x} y={y}")
        table[(x, y)] = prob
    if not table:
        raise ValueError("empty source file")
    ys = sorted({y for (_, y) in table})
    probs = np.zeros((2, len(ys)))
    for k, y in enumerate(ys):
        probs[0, k] = table.get((0, y), 0.0)
        probs[1, k] = table.get((1, y), 0.0)
    total = probs.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total:.12g}, not 1 (tolerance 1e-9)")
    return JointSource(probs / total, ys)


def format_source(source):
    """Inverse of parse_source."""
    lines = []
    for x in (0, 1):
        for k, y in enumerate(source.y_labels):
            lines.append(f"{x} {y} {float(source.probs[x, k])!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# message densities
# ---------------------------------------------------------------------------


def _pair_llr(p0, p1):
    """ln(p0/p1) for positive arguments, evaluated so that swapping the
    arguments negates the result bit-for-bit."""
    if p0 >= p1:
        return math.log(p0 / p1)
    return -math.log(p1 / p0)


def initial_llr(source, y):
    """Posterior LLR ln(P(x=0,y)/P(x=1,y)) of a single symbol."""
    k = source.y_index(y)
    p0 = source.probs[0, k]
    p1 = source.probs[1, k]
    if p1 == 0.0:
        return math.inf
    if p0 == 0.0:
        return -math.inf
    return _pair_llr(p0, p1)


def initial_llr_vector(source, y_values):
    """Vectorized initial_llr over an array of y labels."""
    per_symbol = np.array([initial_llr(source, y) for y in source.y_labels])
    idx = np.array([source.y_index(y) for y in np.asarray(y_values).tolist()])
    return per_symbol[idx]


def initial_density(source):
    """The sign-folded density of initial messages.

    Each symbol y contributes an atom at +m0(y) with mass P(0,y) and an atom
    at -m0(y) with mass P(1,y); coinciding locations merge.  Symbols with a
    vanishing joint put their mass on +infinity (the surviving hypothesis is
    then certain).  The result is symmetric for every source.
    """
    llrs: list[float] = []
    masses: list[float] = []
    pinf = 0.0
    for k in range(source.ny):
        p0 = source.probs[0, k]
        p1 = source.probs[1, k]
        if p1 == 0.0:
            pinf += p0
        elif p0 == 0.0:
            pinf += p1
        else:
            m0 = _pair_llr(p0, p1)
            llrs.append(m0)
            masses.append(p0)
            llrs.append(-m0)
            masses.append(p1)
    return DiscreteLlrDensity(llrs, masses, mass_pos_inf=pinf)


def mismatch_initial_density(true_source, est_source):
    """Initial message density when decoding with an estimated source model.

    Locations come from the estimate's LLRs, masses from the true joint.
    The result is generally not symmetric.
    """
    if set(true_source.y_labels) != set(est_source.y_labels):
        raise ValueError("sources must share the same y alphabet")
    llrs: list[float] = []
    masses: list[float] = []
    pinf = 0.0
    ninf = 0.0
    for k, y in enumerate(true_source.y_labels):
        p0 = true_source.probs[0, k]
        p1 = true_source.probs[1, k]
        m_es = initial_llr(est_source, y)
        if m_es == math.inf:
            pinf += p0
            ninf += p1
        elif m_es == -math.inf:
            ninf += p0
            pinf += p1
        else:
            if p0 > 0:
                llrs.append(m_es)
                masses.append(p0)
            if p1 > 0:
                llrs.append(-m_es)
                masses.append(p1)
    return DiscreteLlrDensity(llrs, masses, mass_pos_inf=pinf, mass_neg_inf=ninf)


def ml_mismatch_source(source):
    """The estimate whose LLRs are the pure channel likelihood ratios.

    Replaces the prior with the uniform one: P_es(x, y) = P(y|x)/2.  Decoding
    with it reproduces plain channel-code decoding of the coset.
    """
    px = source.p_x
    if np.any(px <= 0):
        raise ValueError("degenerate x marginal")
    probs = source.probs / (2.0 * px[:, None])
    return JointSource(probs, source.y_labels)


def check_symmetry(d, tol):
    """Whether Q(-m) = e^{-m} Q(m) holds within tol.

    Each mass comparison is scaled by the larger mass of the pair, so pairs
    whose expected counterpart is below tol relative to the atom itself (for
    example beyond a grid boundary) pass.  Mass at -infinity must vanish at
    the same scale.
    """
    llrs = d.llrs
    masses = d.masses
    if d.mass_neg_inf > tol * max(d.mass_pos_inf, d.mass_neg_inf):
        return False
    i, j = 0, len(llrs) - 1
    while i <= j:
        if i == j:
            m = llrs[i]
            if abs(m) <= _POS_MATCH_TOL:
                break
            # lone atom: its mirror has zero mass
            if m < 0 or math.exp(-m) > tol:
                return False
            break
        gap = llrs[i] + llrs[j]
        if gap > _POS_MATCH_TOL:
            # llrs[j] has no mirror
            if math.exp(-llrs[j]) > tol:
                return False
            j -= 1
            continue
        if gap < -_POS_MATCH_TOL:
            return False  # negative-side atom with no mirror
        m = llrs[j]
        q_pos = masses[j]
        q_neg = masses[i]
        if abs(q_neg - q_pos * math.exp(-m)) > tol * max(q_pos, q_neg):
            return False
        i += 1
        j -= 1
    return True


def densities_close(a, b, tol):
    """Atom-by-atom comparison of two discrete densities."""
    if abs(a.mass_pos_inf - b.mass_pos_inf) > tol:
        return False
    if abs(a.mass_neg_inf - b.mass_neg_inf) > tol:
        return False
    i = j = 0
    la, ma = a.llrs, a.masses
    lb, mb = b.llrs, b.masses
    while i < len(la) or j < len(lb):
        if i < len(la) and j < len(lb):
            pos_tol = tol * max(1.0, abs(la[i]), abs(lb[j]))
            if abs(la[i] - lb[j]) <= pos_tol:
                if abs(ma[i] - mb[j]) > tol:
                    return False
                i += 1
                j += 1
                continue
            if la[i] < lb[j]:
                if ma[i] > tol:
                    return False
                i += 1
            else:
                if mb[j] > tol:
                    return False
                j += 1
        elif i < len(la):
            if ma[i] > tol:
                return False
            i += 1
        else:
            if mb[j] > tol:
                return False
            j += 1
    return True


# ---------------------------------------------------------------------------
# information quantities and the channel conversion
# ---------------------------------------------------------------------------


def conditional_entropy(source):
    """H(X|Y) in bits."""
    p = source.probs
    py = source.p_y
    h = 0.0
    for x in (0, 1):
        for k in range(source.ny):
            if p[x, k] > 0:
                h -= p[x, k] * math.log2(p[x, k] / py[k])
    return float(h)


def channel_capacity(ch):
    """Capacity in bits under the uniform input, which is optimal for a
    binary-input output-symmetric channel."""
    p0 = ch.p_given_0
    p1 = ch.p_given_1
    q = 0.5 * (p0 + p1)
    c = 0.0
    for k in range(ch.n_outputs):
        for p in (p0[k], p1[k]):
            if p > 0:
                c += 0.5 * p * math.log2(p / q[k])
    return float(c)


def source_to_channel(source):
    """The unique output-symmetric channel matching the source's message density.

    One output per atom location of the initial density, closed under
    negation (zero-probability mirror outputs are materialized so the
    pairing is total), ordered by LLR ascending.  The channel's own message
    density under input 0 reproduces the source density.
    """
    d = initial_density(source)
    if d.mass_neg_inf > 0:
        raise ValueError("source density has mass at -infinity")  # cannot happen
    pos_locs: list[float] = []
    pos_mass: list[float] = []
    zero_mass = 0.0
    mirror: dict[int, float] = {}
    for loc, q in zip(d.llrs, d.masses):
        if loc == 0.0:
            zero_mass += q
        elif loc > 0:
            pos_locs.append(loc)
            pos_mass.append(q)
    # attach each negative atom to its positive partner (mass 0 if absent)
    neg_mass = {}
    for loc, q in zip(d.llrs, d.masses):
        if loc < 0:
            neg_mass[-loc] = q
    for loc, q in list(neg_mass.items()):
        matched = False
        for idx, ploc in enumerate(pos_locs):
            if abs(ploc - loc) <= _POS_MATCH_TOL:
                mirror[idx] = q
                matched = True
                break
        if not matched:
            pos_locs.append(loc)
            pos_mass.append(0.0)
            mirror[len(pos_locs) - 1] = q

    order = np.argsort(pos_locs)
    outputs: list[float] = []
    p0: list[float] = []
    for idx in order[::-1]:
        outputs.append(-pos_locs[idx])
        p0.append(mirror.get(int(idx), 0.0))
    if zero_mass > 0:
        outputs.append(0.0)
        p0.append(zero_mass)
    for idx in order:
        outputs.append(pos_locs[idx])
        p0.append(pos_mass[idx])
    if d.mass_pos_inf > 0:
        outputs = [-math.inf] + outputs + [math.inf]
        p0 = [0.0] + p0 + [d.mass_pos_inf]
    n = len(outputs)
    pairing = np.arange(n)[::-1].copy()
    return BiosChannel(outputs, p0, pairing)


# ---------------------------------------------------------------------------
# equivalence classes and degradation
# ---------------------------------------------------------------------------


def equivalence_class_source(q, alphas, sym_tol=1e-9):
    """Build the source with P(y) weights `alphas` whose message density is q.

    Atom locations of a symmetric density come in +/-m pairs (plus an
    optional self-paired atom at zero and an infinity pair); each pair of
    total mass a+ + a- spawns two y symbols, with alphas splitting P(y)
    between them.  Paired alphas must sum to one; a self-paired slot is
    forced to one half.  Every member of the family has the same reverse
    channel P(x|y) and the same message density.
    """
    if not check_symmetry(q, sym_tol):
        raise ValueError("density is not symmetric")
    slots = [(loc, mass) for loc, mass in zip(q.llrs, q.masses)]
    has_inf = (q.mass_pos_inf + q.mass_neg_inf) > 0
    if has_inf:
        slots = [(-math.inf, q.mass_neg_inf)] + slots + [(math.inf, q.mass_pos_inf)]
    n = len(slots)
    alphas = np.asarray(alphas, dtype=np.float64)
    if alphas.shape != (n,):
        raise ValueError(f"expected {n} alphas, got {alphas.shape}")
    if np.any(alphas < 0) or np.any(alphas > 1):
        raise ValueError("alphas must lie in [0, 1]")
    probs = np.zeros((2, n))
    for i in range(n):
        j = n - 1 - i
        loc_i = slots[i][0]
        loc_j = slots[j][0]
        if i == j:
            if abs(loc_i) > _POS_MATCH_TOL:
                raise ValueError("unpaired atom location in symmetric density")
            if abs(alphas[i] - 0.5) > 1e-9:
                raise ValueError("self-paired slot requires alpha = 1/2")
            alpha = 0.5
        else:
            if math.isinf(loc_i) != math.isinf(loc_j) or (
                not math.isinf(loc_i) and abs(loc_i + loc_j) > _POS_MATCH_TOL
            ):
                raise ValueError("slot pairing does not mirror")
            if abs(alphas[i] + alphas[j] - 1.0) > 1e-9:
                raise ValueError("paired alphas must sum to 1")
            alpha = alphas[i]
        probs[0, i] = alpha * slots[i][1]
        probs[1, i] = alpha * slots[j][1]
    return _finalize_joint(probs, list(range(n)))


def are_equivalent(a, b, tol=1e-9):
    """Whether two sources induce the same initial message density."""
    return densities_close(initial_density(a), initial_density(b), tol)


def degrade_source(source, smap):
    """Pass the side information through a stochastic map.

    P'(x, y') = sum_y P(x, y) W[y, y']; the x marginal is preserved.
    """
    if isinstance(smap, StochasticMap):
        rows = smap.rows
        if smap.in_labels != source.y_labels:
            if set(smap.in_labels) != set(source.y_labels):
                raise ValueError("map input alphabet does not match the source")
            perm = [smap.in_labels.index(y) for y in source.y_labels]
            rows = rows[perm]
        out_labels = smap.out_labels
    else:
        rows = np.asarray(smap, dtype=np.float64)
        out_labels = list(range(rows.shape[1]))
    if rows.shape[0] != source.ny:
        raise ValueError("map row count does not match the source alphabet")
    probs = source.probs @ rows
    return _finalize_joint(probs, out_labels)


def is_degraded(a, b, tol=1e-9):
    """Whether channel b is a stochastically degraded version of channel a.

    Decided by a phase-1 simplex feasibility solve for a row-stochastic W
    with P_b(.|x) = P_a(.|x) W for both inputs.  Raises SolverError if the
    solver fails to terminate (distinct from infeasibility).
    """
    na = a.n_outputs
    nb = b.n_outputs
    pa = np.vstack([a.p_given_0, a.p_given_1])
    pb = np.vstack([b.p_given_0, b.p_given_1])
    n_vars = na * nb
    rows = []
    rhs = []
    # channel-matching constraints: for each x and each output of b
    for x in (0, 1):
        for j in range(nb):
            r = np.zeros(n_vars)
            for i in range(na):
                r[i * nb + j] = pa[x, i]
            rows.append(r)
            rhs.append(pb[x, j])
    # row-stochasticity of W
    for i in range(na):
        r = np.zeros(n_vars)
        r[i * nb:(i + 1) * nb] = 1.0
        rows.append(r)
        rhs.append(1.0)
    residual = _phase1_residual(np.asarray(rows), np.asarray(rhs))
    return residual <= tol * len(rhs)


def _phase1_residual(A, b, max_pivots=50000):
    """Minimal total L1 infeasibility of {A w = b, w >= 0} via phase-1 simplex.

    Bland's rule guards against cycling; exceeding the pivot cap raises
    SolverError.
    """
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = A
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -A.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):
            if tab[m, j] < -1e-12:
                enter = j
                break
        if enter < 0:
            return max(0.0, -tab[m, -1])
        col = tab[:m, enter]
        best = math.inf
        leave = -1
        for i in range(m):
            if col[i] > 1e-12:
                ratio = tab[i, -1] / col[i]
                if ratio < best - 1e-15 or (
                    abs(ratio - best) <= 1e-15 and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return max(0.0, -tab[m, -1])  # cannot improve further
        piv = tab[leave, enter]
        tab[leave] /= piv
        for i in range(m + 1):
            if i != leave and tab[i, enter] != 0.0:
                tab[i] -= tab[i, enter] * tab[leave]
        basis[leave] = enter
    raise SolverError("feasibility solve exceeded the pivot cap")


# ---------------------------------------------------------------------------
# file formats for auxiliary inputs
# ---------------------------------------------------------------------------


def parse_stochastic_map(text):
    """Parse 'y y_out prob' lines into a StochasticMap."""
    entries: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'y y_out prob'")
        try:
            yi = int(parts[0])
            yo = int(parts[1])
            prob = float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed entry {raw!r}") from None
        if (yi, yo) in entries:
            raise ValueError(f"line {lineno}: duplicate entry")
        entries[(yi, yo)] = prob
    ins = sorted({y for y, _ in entries})
    outs = sorted({y for _, y in entries})
    rows = np.zeros((len(ins), len(outs)))
    for (yi, yo), prob in entries.items():
        rows[ins.index(yi), outs.index(yo)] = prob
    return StochasticMap(rows, ins, outs)


def parse_density(text):
    """Parse 'llr mass' lines plus optional '+inf mass' / '-inf mass' lines."""
    llrs: list[float] = []
    masses: list[float] = []
    pinf = 0.0
    ninf = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'llr mass'")
        loc, mass = parts
        try:
            q = float(mass)
        except ValueError:
            raise ValueError(f"line {lineno}: malformed mass") from None
        if loc == "+inf":
            pinf += q
        elif loc == "-inf":
            ninf += q
        else:
            llrs.append(float(loc))
            masses.append(q)
    return DiscreteLlrDensity(llrs, masses, mass_pos_inf=pinf, mass_neg_inf=ninf)


def format_density(d):
    lines = [f"{float(loc)!r} {float(q)!r}" for loc, q in zip(d.llrs, d.masses)]
    if d.mass_pos_inf:
        lines.append(f"+inf {d.mass_pos_inf!r}")
    if d.mass_neg_inf:
        lines.append(f"-inf {d.mass_neg_inf!r}")
    return "\n".join(lines) + "\n"
