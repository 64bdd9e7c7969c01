"""Degree distributions, ensemble graph sampling, and GF(2) syndrome encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective degree distribution pair.

    `lam[k] = (degree, coeff)` gives the fraction of edges incident to
    variable nodes of that degree (and `rho` likewise for checks); each
    coefficient list sums to one.
    """

    lam: tuple[tuple[int, float], ...]
    rho: tuple[tuple[int, float], ...]

    def __post_init__(self):
        for name, pairs in (("lambda", self.lam), ("rho", self.rho)):
            degrees = [d for d, _ in pairs]
            coeffs = [c for _, c in pairs]
            if not pairs:
                raise ValueError(f"{name} is empty")
            if any(d < 2 for d in degrees):
                raise ValueError(f"{name} degrees must be >= 2")
            if sorted(set(degrees)) != degrees:
                raise ValueError(f"{name} degrees must be distinct and sorted")
            if any(c < 0 for c in coeffs):
                raise ValueError(f"{name} coefficients must be nonnegative")
            if abs(sum(coeffs) - 1.0) > 1e-9:
                raise ValueError(f"{name} coefficients must sum to 1")
        object.__setattr__(self, "lam", tuple((int(d), float(c)) for d, c in self.lam))
        object.__setattr__(self, "rho", tuple((int(d), float(c)) for d, c in self.rho))

    @classmethod
    def regular(cls, dv, dc):
        return cls(((dv, 1.0),), ((dc, 1.0),))

    @property
    def is_regular(self):
        return len(self.lam) == 1 and len(self.rho) == 1

    def lam_eval(self, x):
        return sum(c * x ** (d - 1) for d, c in self.lam)

    def rho_eval(self, x):
        return sum(c * x ** (d - 1) for d, c in self.rho)

    def label(self):
        if self.is_regular:
            return f"regular({self.lam[0][0]},{self.rho[0][0]})"
        lam = "+".join(f"{c:g}x^{d - 1}" for d, c in self.lam)
        rho = "+".join(f"{c:g}x^{d - 1}" for d, c in self.rho)
        return f"irregular[{lam};{rho}]"


def design_rates(dd):
    """(code_rate, syndrome_rate) of the ensemble.

    syndrome_rate = (sum_j rho_j/j) / (sum_i lambda_i/i); the code rate is
    its complement.
    """
    inv_v = sum(c / d for d, c in dd.lam)
    inv_c = sum(c / d for d, c in dd.rho)
    syndrome_rate = inv_c / inv_v
    return 1.0 - syndrome_rate, syndrome_rate


# Rate-one-half irregular pair originally optimized for the binary-input
# AWGN channel; used here as a stock irregular benchmark code.
AWGN_IRREGULAR_R12 = DegreeDistribution(
    lam=((2, 0.234029), (3, 0.212425), (6, 0.146898), (7, 0.102840), (20, 0.303808)),
    rho=((8, 0.71875), (9, 0.28125)),
)


class TannerGraph:
    """A bipartite variable/check graph stored as flat edge arrays.

    `edge_var[e]` / `edge_chk[e]` give the endpoints of edge e; CSR-style
    adjacency (`var_ptr`/`var_adj`, `chk_ptr`/`chk_adj`, entries are edge
    ids in ascending order) is built once and shared read-only.
    """

    def __init__(self, n, m, edge_var, edge_chk):
        edge_var = np.asarray(edge_var, dtype=np.int64)
        edge_chk = np.asarray(edge_chk, dtype=np.int64)
        if edge_var.shape != edge_chk.shape or edge_var.ndim != 1:
            raise ValueError("edge arrays must be 1-d and of equal length")
        if edge_var.size == 0:
            raise ValueError("graph has no edges")
        if edge_var.min() < 0 or edge_var.max() >= n:
            raise ValueError("variable index out of range")
        if edge_chk.min() < 0 or edge_chk.max() >= m:
            raise ValueError("check index out of range")
        codes = edge_var * m + edge_chk
        if np.unique(codes).size != codes.size:
            raise ValueError("duplicate edges")
        vdeg = np.bincount(edge_var, minlength=n)
        cdeg = np.bincount(edge_chk, minlength=m)
        if np.any(vdeg == 0) or np.any(cdeg == 0):
            raise ValueError("isolated node")
        self.n = int(n)
        self.m = int(m)
        self.edge_var = edge_var
        self.edge_chk = edge_chk
        self.var_ptr, self.var_adj = _csr(edge_var, n)
        self.chk_ptr, self.chk_adj = _csr(edge_chk, m)
        for arr in (self.edge_var, self.edge_chk, self.var_ptr, self.var_adj,
                    self.chk_ptr, self.chk_adj):
            arr.setflags(write=False)

    @property
    def n_edges(self):
        return self.edge_var.shape[0]

    @property
    def var_degrees(self):
        return np.bincount(self.edge_var, minlength=self.n)

    @property
    def chk_degrees(self):
        return np.bincount(self.edge_chk, minlength=self.m)

    def __repr__(self):
        return f"TannerGraph(n={self.n}, m={self.m}, edges={self.n_edges})"


def _csr(node_of_edge, count):
    order = np.argsort(node_of_edge, kind="stable").astype(np.int64)
    ptr = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(np.bincount(node_of_edge, minlength=count), out=ptr[1:])
    return ptr, order


@dataclass(frozen=True)
class Syndrome:
    """GF(2) check values s = Hx for a specific graph."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or np.any(bits > 1):
            raise ValueError("syndrome must be a 1-d 0/1 vector")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return self.bits.shape[0]


# ---------------------------------------------------------------------------
# ensemble sampling (configuration model)
# ---------------------------------------------------------------------------


def _largest_remainder(targets, total):
    """Integer counts summing to `total`, proportional to `targets`."""
    base = np.floor(targets).astype(np.int64)
    short = total - base.sum()
    if short < 0:
        raise ValueError("targets exceed the total")
    order = np.argsort(targets - base)[::-1]
    for k in range(int(short)):
        base[order[k % len(base)]] += 1
    return base


def node_degree_counts(n, dd):
    """Node-perspective degree counts for n variables, plus the check side.

    Variable counts come from largest-remainder rounding; the check side is
    rounded the same way and then one check absorbs the residual edge
    mismatch (a single off-spec degree).
    """
    inv_v = sum(c / d for d, c in dd.lam)
    var_frac = np.array([c / d for d, c in dd.lam]) / inv_v
    var_counts = _largest_remainder(var_frac * n, n)
    if np.any(var_counts == 0):
        raise ValueError("n too small to realize every variable degree")
    e_total = int(sum(cnt * d for cnt, (d, _) in zip(var_counts, dd.lam)))

    inv_c = sum(c / d for d, c in dd.rho)
    m = int(round(e_total * inv_c))
    if m < 1:
        raise ValueError("degree distribution yields no checks")
    chk_frac = np.array([c / d for d, c in dd.rho]) / inv_c
    chk_counts = _largest_remainder(chk_frac * m, m)
    chk_degrees = [d for d, _ in dd.rho]
    delta = int(sum(cnt * d for cnt, d in zip(chk_counts, chk_degrees))) - e_total
    odd_degree = None
    if delta != 0:
        k = int(np.argmax(chk_counts))
        if chk_counts[k] == 0 or chk_degrees[k] - delta < 1:
            raise ValueError("cannot integerize the check side")
        chk_counts[k] -= 1
        odd_degree = chk_degrees[k] - delta
    return var_counts, chk_counts, odd_degree, e_total, m


def sample_graph(n, dd, seed):
    """Sample from the configuration-model ensemble, deterministically in seed.

    Socket lists on both sides are matched by a uniform random permutation;
    duplicate edges are removed by redrawing the permutation (up to 100
    times) and then by degree-preserving pairwise swaps.
    """
    rng = np.random.default_rng(seed)
    var_counts, chk_counts, odd_degree, e_total, m = node_degree_counts(n, dd)

    var_deg = np.repeat([d for d, _ in dd.lam], var_counts)
    chk_deg_list = list(np.repeat([d for d, _ in dd.rho], chk_counts))
    if odd_degree is not None:
        chk_deg_list.append(odd_degree)
    chk_deg = np.asarray(chk_deg_list, dtype=np.int64)
    m = chk_deg.shape[0]
    assert int(chk_deg.sum()) == e_total

    var_sockets = np.repeat(np.arange(n, dtype=np.int64), var_deg)
    chk_sockets = np.repeat(np.arange(m, dtype=np.int64), chk_deg)

    edge_var = var_sockets
    edge_chk = None
    for _ in range(100):
        perm = rng.permutation(e_total)
        candidate = chk_sockets[perm]
        if not _has_duplicates(edge_var, candidate, m):
            edge_chk = candidate
            break
        edge_chk = candidate
    if _has_duplicates(edge_var, edge_chk, m):
        edge_chk = _swap_out_duplicates(edge_var, edge_chk.copy(), m, rng)
    return TannerGraph(n, m, edge_var, edge_chk)


def _has_duplicates(ev, ec, m):
    codes = np.sort(ev * m + ec)
    return bool(np.any(codes[1:] == codes[:-1]))


def _swap_out_duplicates(ev, ec, m, rng, max_rounds=20000):
    e_total = ev.shape[0]
    for _ in range(max_rounds):
        codes = ev * m + ec
        order = np.argsort(codes, kind="stable")
        sorted_codes = codes[order]
        dup_mask = np.zeros(e_total, dtype=bool)
        dup_mask[1:] = sorted_codes[1:] == sorted_codes[:-1]
        dup_edges = order[dup_mask]
        if dup_edges.size == 0:
            return ec
        for e in dup_edges:
            f = int(rng.integers(e_total))
            ec[e], ec[f] = ec[f], ec[e]
    raise RuntimeError("could not remove duplicate edges; graph too constrained")


# ---------------------------------------------------------------------------
# encoding and sampling
# ---------------------------------------------------------------------------


def syndrome_encode(g, x):
    """s_c = XOR of x over the variables incident to check c."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (g.n,):
        raise ValueError(f"expected {g.n} bits, got {x.shape}")
    bits = np.bincount(g.edge_chk[x[g.edge_var] == 1], minlength=g.m).astype(np.uint8) & 1
    return Syndrome(bits)


def sample_source_pairs(source, n, seed):
    """n i.i.d. draws (x, y) from the joint table, deterministic in seed."""
    rng = np.random.default_rng(seed)
    flat = source.probs.reshape(-1)
    idx = rng.choice(flat.size, size=n, p=flat)
    x = (idx // source.ny).astype(np.uint8)
    y_idx = idx % source.ny
    labels = np.asarray(source.y_labels)
    return x, labels[y_idx]


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def parse_degree_distribution(text):
    """Parse 'L degree coeff' / 'R degree coeff' lines."""
    lam: list[tuple[int, float]] = []
    rho: list[tuple[int, float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] not in ("L", "R"):
            raise ValueError(f"line {lineno}: expected 'L|R degree coeff'")
        try:
            d = int(parts[1])
            c = float(parts[2])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed entry") from None
        (lam if parts[0] == "L" else rho).append((d, c))
    lam.sort()
    rho.sort()
    return DegreeDistribution(tuple(lam), tuple(rho))


def format_degree_distribution(dd):
    lines = [f"L {d} {c!r}" for d, c in dd.lam]
    lines += [f"R {d} {c!r}" for d, c in dd.rho]
    return "\n".join(lines) + "\n"


def write_adjacency(g):
    """Adjacency text: one line per check, 'c v1 v2 ...'."""
    lines = []
    for c in range(g.m):
        edges = g.chk_adj[g.chk_ptr[c]:g.chk_ptr[c + 1]]
        vs = " ".join(str(int(g.edge_var[e])) for e in edges)
        lines.append(f"{c} {vs}")
    return "\n".join(lines) + "\n"


def read_adjacency(text):
    ev: list[int] = []
    ec: list[int] = []
    checks = set()
    max_var = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            c = int(parts[0])
            vs = [int(p) for p in parts[1:]]
        except ValueError:
            raise ValueError(f"line {lineno}: malformed adjacency row") from None
        if c in checks:
            raise ValueError(f"line {lineno}: duplicate check row {c}")
        checks.add(c)
        for v in vs:
            ev.append(v)
            ec.append(c)
            max_var = max(max_var, v)
    if not ev:
        raise ValueError("empty adjacency file")
    return TannerGraph(max_var + 1, max(checks) + 1, ev, ec)


def parse_bits(text):
    s = "".join(text.split())
    if not s or any(ch not in "01" for ch in s):
        raise ValueError("bit string must be nonempty and contain only 0/1")
    return np.frombuffer(s.encode(), dtype=np.uint8) - ord("0")


def format_bits(bits):
    return "".join("1" if b else "0" for b in np.asarray(bits))
