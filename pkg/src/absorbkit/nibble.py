"""Randomized packing engines and their analyzers.

Plain random greedy (bite = 1) is the default engine; the bite-rounds
variant exists for experiments.  Every engine returns its packing together
with the uncovered leftover and asserts exact conservation.  Girth and
configuration counting are exhaustive with union-size pruning plus a
pair-index shortcut, and agree with naive enumeration on small inputs.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from math import comb, inf
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import (BudgetError, CapacityError, ParameterError, ReliabilityError)
from .exactcover import solve_cover
from .hypercore import (Hypergraph, Packing, clique_edges, enumerate_cliques,
                        max_level_degree)


@dataclass
class NibbleParams:
    """Engine knobs; the analysis-style constants are experiment inputs,
    never hard-coded."""

    bite: float = 1.0
    seed: int = 0
    max_rounds: int = 10 ** 6
    clique_source: Optional[List[tuple]] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    eps: Optional[float] = None
    rho: Optional[float] = None
    D: Optional[float] = None
    p: Optional[float] = None

    def __post_init__(self):
        if not (0 < self.bite <= 1):
            raise ParameterError(f"bite must lie in (0, 1], got {self.bite}")


@dataclass
class ReserveSet:
    X: Hypergraph
    p: float
    counts: Dict[tuple, int]
    flags: Dict[str, object]
    host: Hypergraph


def _clique_pool(G: Hypergraph, q: int, params: NibbleParams) -> List[tuple]:
    if params.clique_source is not None:
        pool = [tuple(sorted(c)) for c in params.clique_source]
        for c in pool:
            for e in clique_edges(c, G.r):
                if e not in G.edges:
                    raise ParameterError(f"source clique {c!r} leaves the host")
        return pool
    return enumerate_cliques(G, q)


def random_greedy_pack(G: Hypergraph, q: int,
                       params: Optional[NibbleParams] = None) -> Tuple[Packing, Hypergraph]:
    """Random greedy / bite-rounds packing; returns (packing, leftover)."""
    params = params or NibbleParams()
    rng = random.Random(params.seed)
    pool = _clique_pool(G, q, params)
    covered: set = set()
    chosen: List[tuple] = []

    def try_commit(c: tuple) -> bool:
        es = list(clique_edges(c, G.r))
        if any(e in covered for e in es):
            return False
        covered.update(es)
        chosen.append(c)
        return True

    if params.bite >= 1:
        order = pool[:]
        rng.shuffle(order)
        for c in order:
            try_commit(c)
    else:
        rounds = 0
        live = pool[:]
        while live and rounds < params.max_rounds:
            remaining = G.m - len(covered)
            k = max(1, math.ceil(params.bite * remaining / comb(q, G.r)))
            bite = rng.sample(live, min(k, len(live)))
            rng.shuffle(bite)
            for c in bite:
                try_commit(c)
            live = [c for c in live
                    if not any(e in covered for e in clique_edges(c, G.r))]
            rounds += 1
    packing = Packing(G, chosen, q)
    leftover = Hypergraph(G.n, G.r, G.edges - covered)
    assert len(covered) + leftover.m == G.m, "edge conservation violated"
    return packing, leftover


def generate_reserves(n: int, q: int, r: int, p: float, seed: int = 0,
                      host: Optional[Hypergraph] = None) -> ReserveSet:
    """Sample each host edge into X independently with probability p and
    count, exactly, the reserve cliques available to every remaining edge."""
    if not (0 <= p < 1):
        raise ParameterError(f"p must lie in [0, 1), got {p}")
    if host is None:
        host = Hypergraph.complete(n, r)
    if host.n != n or host.r != r:
        raise ParameterError("host does not match (n, r)")
    rng = random.Random(seed)
    x_edges = {e for e in sorted(host.edges) if rng.random() < p}
    X = Hypergraph(n, r, x_edges)
    counts: Dict[tuple, int] = {}
    for e in sorted(host.edges - x_edges):
        cnt = 0
        others = [v for v in range(n) if v not in e]
        for extra in itertools.combinations(others, q - r):
            Q = tuple(sorted(e + extra))
            ok = True
            for f in clique_edges(Q, r):
                if f != e and f not in x_edges:
                    ok = False
                    break
            if ok:
                cnt += 1
        counts[e] = cnt
    max_deg = max_level_degree(X, r - 1) if X.m else 0
    mn = min(counts.values()) if counts else 0
    thr_specialized = 0.5 * p ** (comb(q, r) - 1) * comb(n - r, q - r)
    thr_verbatim = 0.5 * p ** (comb(q, r) - 1) * comb(n, q - r)
    flags = {
        "max_degree": max_deg,
        "degree_ok": max_deg <= 2 * p * n,
        "min_count": mn,
        "count_ok": mn >= thr_specialized,
        "count_threshold": thr_specialized,
        "count_ok_verbatim": mn >= thr_verbatim,
        "count_threshold_verbatim": thr_verbatim,
    }
    if r == 2:
        thr_mindeg = p ** (comb(q, 2) - 1) / (q + 1) ** q * comb(n, q - 2)
        flags["count_ok_high_min_degree"] = mn >= thr_mindeg
        flags["count_threshold_high_min_degree"] = thr_mindeg
    return ReserveSet(X=X, p=p, counts=counts, flags=flags, host=host)


def reserve_candidates(e: tuple, G: Hypergraph, X_avail: set, q: int) -> List[tuple]:
    """Cliques through e whose other edges all lie in the available reserve;
    such a clique meets E(G) exactly in e."""
    others = [v for v in range(G.n) if v not in e]
    out = []
    for extra in itertools.combinations(others, q - G.r):
        Q = tuple(sorted(e + extra))
        if all(f == e or f in X_avail for f in clique_edges(Q, G.r)):
            out.append(Q)
    return out


def complete_with_reserves(G: Hypergraph, X: Hypergraph, partial: Packing,
                           q: int, seed: int = 0, retries: int = 5,
                           fallback_budget: int = 200_000,
                           stats: Optional[dict] = None) -> Optional[Packing]:
    """Cover the leftover of a partial packing of G using cliques with one
    foot in G and the rest in X; random greedy with resampling, then an
    exact cover fallback on the conflict instance (None once the fallback
    budget is gone)."""
    if set(X.edges) & set(G.edges):
        raise ParameterError("X must be edge-disjoint from G")
    if partial.host is not G and partial.host.edges != G.edges:
        raise ParameterError("partial must pack G")
    leftover = sorted(G.edges - partial.covered_edges())
    union_host = Hypergraph(max(G.n, X.n), G.r, set(G.edges) | set(X.edges))
    rng = random.Random(seed)
    all_cands = {e: reserve_candidates(e, G, set(X.edges), q) for e in leftover}
    if stats is not None:
        usage: Counter = Counter()
        for cands in all_cands.values():
            for Q in cands:
                for f in clique_edges(Q, G.r):
                    if f in X.edges:
                        usage[f] += 1
        stats["max_reserve_edge_usage"] = max(usage.values(), default=0)
        stats["min_candidates"] = min((len(v) for v in all_cands.values()), default=0)
    if any(not v for v in all_cands.values()):
        return None  # some edge has no reserve clique at all
    for _ in range(retries):
        order = leftover[:]
        rng.shuffle(order)
        avail = set(X.edges)
        chosen: List[tuple] = []
        ok = True
        for e in order:
            cands = [Q for Q in all_cands[e]
                     if all(f == e or f in avail for f in clique_edges(Q, G.r))]
            if not cands:
                ok = False
                break
            Q = cands[rng.randrange(len(cands))]
            chosen.append(Q)
            for f in clique_edges(Q, G.r):
                if f != e:
                    avail.discard(f)
        if ok:
            if stats is not None:
                stats["fallback_used"] = False
            return Packing(union_host, list(partial.cliques) + chosen, q)
    # exact cover over the conflict instance: leftover edges are demands,
    # reserve edges are at-most-once side constraints
    options = []
    for e in leftover:
        for Q in all_cands[e]:
            side = [f for f in clique_edges(Q, G.r) if f != e]
            options.append((Q, [e] + side))
    secondary = {f for _, cov in options for f in cov[1:]}
    if stats is not None:
        stats["fallback_used"] = True
    try:
        sol = solve_cover(leftover, options, secondary=secondary,
                          budget=fallback_budget)
    except BudgetError:
        sol = None
    if sol is None:
        return None
    return Packing(union_host, list(partial.cliques) + sol, q)


# ---------------------------------------------------------------------------
# configurations and girth
# ---------------------------------------------------------------------------

CONFIG_I_CAP = 6


def configurations(P: Sequence[Sequence[int]], i: int, j: int,
                   witness_cap: int = 10, stop_at: Optional[int] = None) -> Tuple[int, List[tuple]]:
    """Exact count of i-subsets of P spanning at most j vertices, plus
    witnesses up to a cap."""
    cliques = [tuple(sorted(c)) for c in (P.cliques if isinstance(P, Packing) else P)]
    if i < 1:
        raise ParameterError("need i >= 1")
    if i > CONFIG_I_CAP:
        raise CapacityError(f"i = {i} exceeds the exhaustive cap {CONFIG_I_CAP}")
    n_cl = len(cliques)
    if i > n_cl:
        return 0, []
    by_pair: dict = defaultdict(list)
    by_vertex: dict = defaultdict(list)
    for idx, c in enumerate(cliques):
        for v in c:
            by_vertex[v].append(idx)
        for pr in itertools.combinations(c, 2):
            by_pair[pr].append(idx)
    count = 0
    witnesses: List[tuple] = []

    def candidates(union: set, start: int) -> Sequence[int]:
        budget = j - len(union)
        sz = len(cliques[start]) if start < n_cl else 0
        # cliques must keep the union within budget; when the budget forces
        # overlap, pull candidates from the vertex/pair indexes
        if union and sz and sz - budget >= 2:
            got: set = set()
            for pr in itertools.combinations(sorted(union), 2):
                got.update(idx for idx in by_pair.get(pr, ()) if idx >= start)
            return sorted(got)
        if union and sz and sz - budget >= 1:
            got = set()
            for v in union:
                got.update(idx for idx in by_vertex.get(v, ()) if idx >= start)
            return sorted(got)
        return range(start, n_cl)

    def rec(start: int, chosen: list, union: set):
        nonlocal count
        if stop_at is not None and count >= stop_at:
            return
        if len(chosen) == i:
            count += 1
            if len(witnesses) < witness_cap:
                witnesses.append(tuple(cliques[t] for t in chosen))
            return
        for t in candidates(union, start):
            u2 = union | set(cliques[t])
            if len(u2) > j:
                continue
            rec(t + 1, chosen + [t], u2)

    rec(0, [], set())
    return count, witnesses


def girth(P: Sequence[Sequence[int]], q: int, r: int, g_max: int = 6):
    """Smallest g in [2, g_max] with a ((q-r)g + r, g)-configuration, else inf."""
    for g in range(2, g_max + 1):
        cnt, _ = configurations(P, g, (q - r) * g + r, stop_at=1)
        if cnt > 0:
            return g
    return inf


def _creates_config(cand: tuple, accepted: List[tuple], by_vertex: dict,
                    by_pair: dict, q: int, r: int, g: int) -> bool:
    """Does accepting cand create a ((q-r)g' + r, g')-configuration for some
    2 <= g' <= g?  Exact DFS over accepted cliques, seeded with cand."""
    for gp in range(2, g + 1):
        j = (q - r) * gp + r

        def rec(start: int, chosen: int, union: frozenset) -> bool:
            if chosen == gp:
                return len(union) <= j
            budget = j - len(union)
            if budget < 0:
                return False
            need_overlap = q - budget
            if need_overlap >= 2:
                cand_idx: set = set()
                for pr in itertools.combinations(sorted(union), 2):
                    cand_idx.update(i for i in by_pair.get(pr, ()) if i >= start)
                iterable = sorted(cand_idx)
            elif need_overlap >= 1:
                cand_idx = set()
                for v in union:
                    cand_idx.update(i for i in by_vertex.get(v, ()) if i >= start)
                iterable = sorted(cand_idx)
            else:
                iterable = range(start, len(accepted))
            for t in iterable:
                u2 = union | frozenset(accepted[t])
                if len(u2) <= j and rec(t + 1, chosen + 1, u2):
                    return True
            return False

        if rec(0, 1, frozenset(cand)):
            return True
    return False


def high_girth_pack(G: Hypergraph, q: int, g: int,
                    params: Optional[NibbleParams] = None) -> Tuple[Packing, Hypergraph]:
    """Random greedy that accepts a clique only if no forbidden
    configuration appears; the output's girth is re-checked."""
    if g > 6:
        raise CapacityError("g <= 6 for the exhaustive configuration check")
    params = params or NibbleParams()
    rng = random.Random(params.seed)
    pool = _clique_pool(G, q, params)
    rng.shuffle(pool)
    covered: set = set()
    accepted: List[tuple] = []
    accepted_set: set = set()
    by_vertex: dict = defaultdict(list)
    by_pair: dict = defaultdict(list)
    for c in pool:
        es = list(clique_edges(c, G.r))
        if any(e in covered for e in es):
            continue
        if g >= 2 and accepted and _creates_config(
                c, accepted, by_vertex, by_pair, q, G.r, g):
            continue
        idx = len(accepted)
        accepted.append(c)
        accepted_set.add(c)
        for v in c:
            by_vertex[v].append(idx)
        for pr in itertools.combinations(c, 2):
            by_pair[pr].append(idx)
        covered.update(es)
    packing = Packing(G, accepted, q)
    leftover = Hypergraph(G.n, G.r, G.edges - covered)
    assert girth(accepted, q, G.r, g_max=g) > g, "forbidden configuration slipped in"
    return packing, leftover


# ---------------------------------------------------------------------------
# spread estimation
# ---------------------------------------------------------------------------

def spread_estimate(sampler: Callable[[int], Sequence[tuple]], sizes: Sequence[int],
                    trials: int, seed: int = 0,
                    exact_decompositions: Optional[Sequence[Sequence[tuple]]] = None,
                    subsets_per_sample: int = 20) -> Dict[int, dict]:
    """Estimate the spread exponent: for each requested packing size s,
    sigma-hat = max over observed s-packings S of Prob[S in H]^(1/s).

    With `exact_decompositions` the probabilities are exact over the given
    uniform family; Monte Carlo results report a 95% interval.
    """
    rng = random.Random(seed)
    out: Dict[int, dict] = {}
    if exact_decompositions is not None:
        family = [frozenset(tuple(sorted(c)) for c in d) for d in exact_decompositions]
        T = len(family)
        for s in sizes:
            best, best_S = -1.0, None
            seen: set = set()
            for d in family:
                for S in itertools.combinations(sorted(d), s):
                    if S in seen:
                        continue
                    seen.add(S)
                    prob = sum(1 for f in family if set(S) <= f) / T
                    if prob > best:
                        best, best_S = prob, S
            out[s] = {"sigma_hat": best ** (1 / s) if best > 0 else 0.0,
                      "prob": best, "packing": best_S, "mode": "exact"}
        return out

    samples: List[frozenset] = []
    failures = 0
    for t in range(trials):
        try:
            d = sampler(rng.randrange(2 ** 31))
        except Exception:  # noqa: BLE001 - sampler failures are data
            d = None
        if not d:
            failures += 1
            continue
        samples.append(frozenset(tuple(sorted(c)) for c in d))
    if failures > trials / 2:
        raise ReliabilityError(f"sampler failed {failures}/{trials} times")
    T = len(samples)
    for s in sizes:
        cand: set = set()
        for d in samples:
            ds = sorted(d)
            if len(ds) < s:
                continue
            if s == 1:
                cand.update((c,) for c in ds)
            else:
                for _ in range(subsets_per_sample):
                    cand.add(tuple(sorted(rng.sample(ds, s))))
        best, best_S = -1.0, None
        for S in sorted(cand):
            prob = sum(1 for f in samples if set(S) <= f) / T
            if prob > best:
                best, best_S = prob, S
        if best <= 0:
            out[s] = {"sigma_hat": 0.0, "prob": 0.0, "packing": None,
                      "mode": "monte-carlo", "samples": T}
            continue
        se = math.sqrt(best * (1 - best) / T)
        lo, hi = max(best - 1.96 * se, 0.0), min(best + 1.96 * se, 1.0)
        out[s] = {"sigma_hat": best ** (1 / s), "prob": best, "packing": best_S,
                  "ci95": (lo ** (1 / s), hi ** (1 / s)),
                  "mode": "monte-carlo", "samples": T}
    return out
