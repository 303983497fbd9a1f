"""Exact rational linear programming for fractional clique decompositions.

Feasibility of {sum of weights through each edge = 1, weights >= 0 (<= cap)}
is decided by a phase-1 simplex over Fractions with Bland's rule, so
verdicts are exact: feasibility comes with the weighting itself, and
infeasibility comes with a Farkas certificate that is re-verified before
being returned.  A Fourier-Motzkin eliminator doubles as an independent
oracle for small instances.
"""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Union

from .errors import CapacityError, ParameterError
from .hypercore import AnyGraph, Hypergraph, clique_edges, enumerate_cliques

VARIABLE_CAP = 20000


@dataclass
class FractionalWeighting:
    """Nonnegative rational clique weights with unit sums along every edge."""

    psi: Dict[tuple, Fraction]
    host: Hypergraph
    q: int

    def __post_init__(self):
        sums: Dict[tuple, Fraction] = {e: Fraction(0) for e in self.host.edges}
        for c, w in self.psi.items():
            if w < 0:
                raise ParameterError(f"negative weight on {c!r}")
            for e in clique_edges(c, self.host.r):
                if e not in sums:
                    raise ParameterError(f"clique {c!r} uses a non-edge {e!r}")
                sums[e] += w
        bad = [e for e, s in sums.items() if s != 1]
        if bad:
            raise ParameterError(f"edge sums differ from 1 at {bad[:3]!r}")


@dataclass
class SimplexOutcome:
    feasible: bool
    weighting: Optional[FractionalWeighting]
    farkas: Optional[List[Fraction]]   # infeasibility prices, edge-row order
    rows: List[tuple]                  # row labels: ("edge", e) / ("cap", c)
    pivots: int


@dataclass
class BoostFamily:
    cliques: List[tuple]
    edge_counts: Counter
    c_hat: float
    gamma_hat: float
    clamped: int
    seed: int


def _phase1(rows: List[List[Fraction]], b: List[Fraction], n_struct: int) -> tuple:
    """Minimize the artificial sum for {Ax = b, x >= 0}; returns
    (objective, x, y, pivots).  One artificial per row; b must be >= 0."""
    m = len(rows)
    ncols = n_struct + m
    T = [row[:] + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [b[i]]
         for i, row in enumerate(rows)]
    basis = [n_struct + i for i in range(m)]
    # reduced costs: c_j - sum of column entries (artificial costs are 1)
    obj = [Fraction(0)] * (ncols + 1)
    for j in range(ncols):
        col = sum(T[i][j] for i in range(m))
        cj = Fraction(1) if j >= n_struct else Fraction(0)
        obj[j] = cj - col
    obj[ncols] = -sum(b)
    pivots = 0
    stalled = 0
    bland_after = 4 * (m + ncols)
    while True:
        # Dantzig pricing normally; permanent Bland switch once the
        # objective stalls long enough to suspect cycling
        if stalled <= bland_after:
            enter, best = None, Fraction(0)
            for j in range(ncols):
                if obj[j] < best:
                    enter, best = j, obj[j]
        else:
            enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            break
        ratio, leave = None, None
        for i in range(m):
            if T[i][enter] > 0:
                r = T[i][ncols] / T[i][enter]
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                    ratio, leave = r, i
        if leave is None:
            raise ParameterError("phase-1 unbounded; the instance is malformed")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter]:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], T[leave])]
        if obj[enter]:
            f = obj[enter]
            before = obj[ncols]
            obj = [a - f * c for a, c in zip(obj, T[leave])]
            stalled = stalled + 1 if obj[ncols] == before else 0
        basis[leave] = enter
        pivots += 1
    objective = -obj[ncols]
    x = [Fraction(0)] * n_struct
    for i, bi in enumerate(basis):
        if bi < n_struct:
            x[bi] = T[i][ncols]
    # row prices: y_i = 1 - reduced cost of artificial i
    y = [Fraction(1) - obj[n_struct + i] for i in range(m)]
    return objective, x, y, pivots


def solve_fractional(G: AnyGraph, q: int,
                     weight_cap: Optional[Union[Fraction, int, str]] = None,
                     restrict: Optional[Sequence[tuple]] = None) -> SimplexOutcome:
    """Full-output LP solve; `fractional_decomposition` is the thin wrapper."""
    if isinstance(G, Hypergraph):
        host = G
    else:
        host = G.simple()
    if q <= host.r:
        raise ParameterError(f"need q > r, got q={q}, r={host.r}")
    cliques = list(restrict) if restrict is not None else enumerate_cliques(host, q)
    cliques = sorted(tuple(sorted(c)) for c in cliques)
    if len(cliques) > VARIABLE_CAP:
        raise CapacityError(f"{len(cliques)} cliques exceeds the solver cap {VARIABLE_CAP}")
    cap = Fraction(weight_cap) if weight_cap is not None else None
    edges = sorted(host.edges)
    if not edges:
        w = FractionalWeighting(psi={}, host=host, q=q)
        return SimplexOutcome(True, w, None, [], 0)
    cidx = {c: j for j, c in enumerate(cliques)}
    nv = len(cliques)
    row_labels: List[tuple] = [("edge", e) for e in edges]
    n_struct = nv + (nv if cap is not None else 0)
    rows: List[List[Fraction]] = []
    b: List[Fraction] = []
    for e in edges:
        row = [Fraction(0)] * n_struct
        for c in cliques:
            if set(e) <= set(c):
                row[cidx[c]] = Fraction(1)
        rows.append(row)
        b.append(Fraction(1))
    if cap is not None:
        for j, c in enumerate(cliques):
            row = [Fraction(0)] * n_struct
            row[j] = Fraction(1)
            row[nv + j] = Fraction(1)      # slack
            rows.append(row)
            b.append(cap)
            row_labels.append(("cap", c))
    objective, x, y, pivots = _phase1(rows, b, n_struct)
    if objective == 0:
        psi = {c: x[cidx[c]] for c in cliques if x[cidx[c]] != 0}
        w = FractionalWeighting(psi=psi, host=host, q=q)
        if cap is not None:
            assert all(v <= cap for v in psi.values()), "cap violated post-solve"
        return SimplexOutcome(True, w, None, row_labels, pivots)
    # Farkas: y*A <= 0 on every structural column and y*b > 0; verify exactly
    for j in range(n_struct):
        col = sum(y[i] * rows[i][j] for i in range(len(rows)))
        assert col <= 0, "Farkas certificate failed column check"
    assert sum(yi * bi for yi, bi in zip(y, b)) > 0, "Farkas certificate failed rhs check"
    return SimplexOutcome(False, None, y, row_labels, pivots)


def fractional_decomposition(G: AnyGraph, q: int,
                             weight_cap: Optional[Union[Fraction, int, str]] = None
                             ) -> Optional[FractionalWeighting]:
    out = solve_fractional(G, q, weight_cap=weight_cap)
    return out.weighting if out.feasible else None


def low_weight_check(psi: FractionalWeighting, C: Union[int, Fraction]) -> bool:
    """Every positive weight is at most C / n^(q-2)."""
    n = psi.host.n
    cap = Fraction(C) / (n ** (psi.q - 2))
    return all(w <= cap for w in psi.psi.values())


def fm_feasible(G: Hypergraph, q: int, restrict: Optional[Sequence[tuple]] = None,
                clique_cap: int = 12) -> bool:
    """Independent feasibility oracle for {M psi = 1, psi >= 0}.

    Vertex-enumeration style: by Caratheodory the system is feasible iff
    some linearly independent subset of columns carries a nonnegative exact
    solution, so all column subsets are tried with rational elimination.
    Small instances only.
    """
    cliques = list(restrict) if restrict is not None else enumerate_cliques(G, q)
    cliques = sorted(tuple(sorted(c)) for c in cliques)
    if len(cliques) > clique_cap:
        raise CapacityError(f"{len(cliques)} cliques exceeds the oracle cap {clique_cap}")
    edges = sorted(G.edges)
    if not edges:
        return True
    if not cliques:
        return False
    cols = [[Fraction(1) if set(e) <= set(c) else Fraction(0) for e in edges]
            for c in cliques]
    m = len(edges)
    b = [Fraction(1)] * m
    for k in range(1, min(len(cliques), m) + 1):
        for sub in itertools.combinations(range(len(cliques)), k):
            lam = _solve_exact([cols[j] for j in sub], b)
            if lam is not None and all(v >= 0 for v in lam):
                return True
    return False


def _solve_exact(cols: List[List[Fraction]], b: List[Fraction]):
    """Unique exact solution of cols * lam = b, or None when the columns are
    dependent or the system is inconsistent."""
    m, k = len(b), len(cols)
    M = [[cols[j][i] for j in range(k)] + [b[i]] for i in range(m)]
    row = 0
    piv_cols = []
    for col in range(k):
        sel = next((i for i in range(row, m) if M[i][col] != 0), None)
        if sel is None:
            return None  # dependent columns; a smaller subset covers this case
        M[row], M[sel] = M[sel], M[row]
        pv = M[row][col]
        M[row] = [v / pv for v in M[row]]
        for i in range(m):
            if i != row and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[row])]
        piv_cols.append(col)
        row += 1
    for i in range(row, m):
        if M[i][k] != 0:
            return None
    return [M[i][k] for i in range(k)]


def boost_sample(psi: FractionalWeighting, multiplier: Optional[Fraction] = None,
                 seed: int = 0) -> BoostFamily:
    """Include each clique independently with probability min(1, m * psi);
    report per-edge counts and their normalized spread."""
    host, q = psi.host, psi.q
    n, r = host.n, host.r
    denom = comb(n - r, q - r)
    if multiplier is None:
        multiplier = Fraction(denom, 2)
    multiplier = Fraction(multiplier)
    rng = random.Random(seed)
    chosen: List[tuple] = []
    clamped = 0
    for c in sorted(psi.psi):
        p = multiplier * psi.psi[c]
        if p > 1:
            clamped += 1
            p = Fraction(1)
        if rng.random() < float(p):
            chosen.append(c)
    counts: Counter = Counter({e: 0 for e in host.edges})
    for c in chosen:
        for e in clique_edges(c, r):
            counts[e] += 1
    if counts:
        mean = sum(counts.values()) / len(counts)
        c_hat = mean / denom if denom else 0.0
        gamma_hat = max(abs(v / denom - c_hat) for v in counts.values()) if denom else 0.0
    else:
        c_hat = gamma_hat = 0.0
    return BoostFamily(cliques=chosen, edge_counts=counts, c_hat=c_hat,
                       gamma_hat=gamma_hat, clamped=clamped, seed=seed)


def inheritance_stats(G: Hypergraph, s: int, m: int, M: Sequence[int],
                      trials: int, seed: int = 0,
                      threshold: Optional[Callable[[int], float]] = None) -> dict:
    """Sample s-sets containing M; report how often the induced subgraph
    keeps minimum degree above the caller's threshold."""
    if G.r != 2:
        raise ParameterError("inheritance sampling is implemented for graphs")
    M = tuple(sorted(set(M)))
    if len(M) != m or m > s or s > G.n:
        raise ParameterError(f"need |M| = m <= s <= n, got m={m}, s={s}, n={G.n}")
    if trials <= 0:
        return {"trials": 0, "hits": 0, "fraction": None, "min_seen": None}
    if threshold is None:
        threshold = lambda size: 0.0
    adj: Dict[int, set] = {v: set() for v in range(G.n)}
    for a, bb in G.edges:
        adj[a].add(bb)
        adj[bb].add(a)
    pool = [v for v in range(G.n) if v not in M]
    rng = random.Random(seed)
    hits = 0
    min_seen = None
    for _ in range(trials):
        S = set(M) | set(rng.sample(pool, s - m))
        mindeg = min(len(adj[v] & S) for v in S)
        if min_seen is None or mindeg < min_seen:
            min_seen = mindeg
        if mindeg >= threshold(s):
            hits += 1
    return {"trials": trials, "hits": hits, "fraction": hits / trials,
            "min_seen": min_seen, "threshold": threshold(s)}
