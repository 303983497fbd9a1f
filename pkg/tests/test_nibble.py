import itertools
import random
from math import inf

import pytest

from absorbkit.errors import CapacityError, ParameterError
from absorbkit.hypercore import Hypergraph, Packing, clique_edges
from absorbkit.nibble import (NibbleParams, complete_with_reserves,
                              configurations, generate_reserves, girth,
                              high_girth_pack, random_greedy_pack,
                              reserve_candidates, spread_estimate)

PASCH = [(0, 1, 2), (0, 3, 4), (1, 3, 5), (2, 4, 5)]


class TestRandomGreedy:
    def test_conservation_k7(self):
        P, left = random_greedy_pack(Hypergraph.complete(7, 2), 3,
                                     NibbleParams(seed=1))
        assert len(P) <= 7
        assert P.covered_edges() | left.edges == Hypergraph.complete(7, 2).edges
        assert not P.covered_edges() & left.edges

    def test_boost_family_containment(self):
        G = Hypergraph.complete(9, 2)
        fam = [c for c in itertools.combinations(range(9), 3) if 0 in c or 1 in c]
        P, _ = random_greedy_pack(G, 3, NibbleParams(seed=2, clique_source=fam))
        assert set(P.cliques) <= set(fam)

    def test_determinism(self):
        a, _ = random_greedy_pack(Hypergraph.complete(13, 2), 3, NibbleParams(seed=5))
        b, _ = random_greedy_pack(Hypergraph.complete(13, 2), 3, NibbleParams(seed=5))
        assert a.cliques == b.cliques

    def test_bite_rounds_engine(self):
        G = Hypergraph.complete(13, 2)
        P, left = random_greedy_pack(G, 3, NibbleParams(seed=3, bite=0.2))
        assert P.covered_edges() | left.edges == G.edges

    def test_leftover_small_at_n51(self):
        G = Hypergraph.complete(51, 2)
        _, left = random_greedy_pack(G, 3, NibbleParams(seed=7))
        assert left.m / G.m < 0.2


class TestReserves:
    def test_p_zero(self):
        rs = generate_reserves(10, 3, 2, 0.0, seed=1)
        assert rs.X.m == 0
        assert all(v == 0 for v in rs.counts.values())

    def test_counts_exact_small(self):
        rs = generate_reserves(8, 3, 2, 0.5, seed=3)
        for e, cnt in rs.counts.items():
            want = 0
            for w in range(8):
                if w in e:
                    continue
                if all(tuple(sorted((v, w))) in rs.X.edges for v in e):
                    want += 1
            assert cnt == want

    def test_flags_present(self):
        rs = generate_reserves(20, 3, 2, 0.3, seed=4)
        for key in ("degree_ok", "count_ok", "count_ok_verbatim",
                    "count_ok_high_min_degree"):
            assert key in rs.flags


class TestCompletion:
    def test_empty_leftover_identity(self):
        G = Hypergraph(6, 2, list(clique_edges((0, 1, 2), 2)) +
                       list(clique_edges((3, 4, 5), 2)))
        partial = Packing(G, [(0, 1, 2), (3, 4, 5)])
        X = Hypergraph(6, 2, [])
        out = complete_with_reserves(G, X, partial, 3, seed=1)
        assert out is not None and set(out.cliques) == set(partial.cliques)

    def test_single_edge_completion(self):
        G = Hypergraph(4, 2, [(0, 1)])
        X = Hypergraph(4, 2, [(0, 2), (1, 2), (0, 3), (1, 3)])
        partial = Packing(G, [], q=3)
        out = complete_with_reserves(G, X, partial, 3, seed=2)
        assert out is not None and len(out) == 1
        (Q,) = out.cliques
        assert (0, 1) in clique_edges(Q, 2)

    def test_exact_cover_fallback(self):
        # (0,1) can go through apex 4 or 5, but (0,2) must use 4: only the
        # assignment (0,1)->5, (0,2)->4 works, and with retries=0 the greedy
        # phase is skipped so the exact cover fallback must find it
        G = Hypergraph(6, 2, [(0, 1), (0, 2)])
        X = Hypergraph(6, 2, [(0, 4), (1, 4), (0, 5), (1, 5), (2, 4)])
        partial = Packing(G, [], q=3)
        stats = {}
        out = complete_with_reserves(G, X, partial, 3, seed=0, retries=0,
                                     stats=stats)
        assert out is not None
        assert stats["fallback_used"]
        assert {tuple(sorted(c)) for c in out.cliques} == {(0, 1, 5), (0, 2, 4)}

    def test_impossible_none(self):
        G = Hypergraph(5, 2, [(0, 1)])
        X = Hypergraph(5, 2, [(0, 2)])  # no completing pair
        partial = Packing(G, [], q=3)
        assert complete_with_reserves(G, X, partial, 3, seed=1) is None

    def test_one_foot_property(self):
        rs = generate_reserves(25, 3, 2, 0.4, seed=9)
        G = Hypergraph(25, 2, Hypergraph.complete(25, 2).edges - rs.X.edges)
        partial, _ = random_greedy_pack(G, 3, NibbleParams(seed=9))
        out = complete_with_reserves(G, rs.X, partial, 3, seed=9)
        if out is not None:
            new = set(out.cliques) - set(partial.cliques)
            for Q in new:
                in_g = [e for e in clique_edges(Q, 2) if e in G.edges]
                assert len(in_g) == 1


class TestConfigurations:
    def test_two_triangles_sharing_vertex(self):
        cnt, wit = configurations([(0, 1, 2), (0, 3, 4)], 2, 5)
        assert cnt == 1 and len(wit) == 1

    def test_no_42_in_packing(self):
        cnt, _ = configurations([(0, 1, 2), (0, 3, 4), (1, 3, 5)], 2, 4)
        assert cnt == 0

    def test_pasch_is_unique_64(self):
        cnt, wit = configurations(PASCH, 4, 6)
        assert cnt == 1
        assert set(wit[0]) == set(PASCH)

    def test_matches_naive_oracle(self):
        rng = random.Random(20)
        for _ in range(50):
            cl = set()
            while len(cl) < rng.randint(3, 12):
                cl.add(tuple(sorted(rng.sample(range(10), 3))))
            cl = sorted(cl)
            i = rng.randint(1, 4)
            j = rng.randint(3, 9)
            cnt, _ = configurations(cl, i, j)
            naive = sum(1 for sub in itertools.combinations(cl, i)
                        if len({v for c in sub for v in c}) <= j)
            assert cnt == naive, (cl, i, j)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            configurations(PASCH, 7, 10)


class TestGirth:
    def test_pasch_packing_girth_4(self):
        assert girth(PASCH, 3, 2) == 4

    def test_triangle_packing_never_2(self):
        rng = random.Random(6)
        for _ in range(10):
            G = Hypergraph.complete(9, 2)
            P, _ = random_greedy_pack(G, 3, NibbleParams(seed=rng.randrange(999)))
            cnt, _ = configurations(P.cliques, 2, 4)
            assert cnt == 0

    def test_empty_packing(self):
        assert girth([], 3, 2) is inf

    def test_sts7_girth(self):
        from absorbkit.exactcover import find_decomposition
        D = find_decomposition(Hypergraph.complete(7, 2), 3)
        g = girth(D.cliques, 3, 2, g_max=4)
        assert g in (4, inf) or g > 2


class TestHighGirth:
    def test_g2_equals_plain_packing(self):
        G = Hypergraph.complete(10, 2)
        P, left = high_girth_pack(G, 3, 2, NibbleParams(seed=4))
        assert P.covered_edges() | left.edges == G.edges
        cnt, _ = configurations(P.cliques, 2, 4)
        assert cnt == 0

    def test_pasch_free_k15(self):
        G = Hypergraph.complete(15, 2)
        P, left = high_girth_pack(G, 3, 4, NibbleParams(seed=1))
        assert girth(P.cliques, 3, 2, g_max=4) is inf
        assert P.covered_edges() | left.edges == G.edges


class TestSpread:
    def test_deterministic_sampler_sigma_one(self):
        fixed = [(0, 1, 2), (3, 4, 5)]
        res = spread_estimate(lambda s: fixed, [1], trials=50, seed=1)
        assert res[1]["sigma_hat"] == 1.0

    def test_exact_sts7(self):
        from absorbkit.exactcover import enumerate_decompositions
        sols = enumerate_decompositions(Hypergraph.complete(7, 2), 3)
        res = spread_estimate(None, [1], trials=0, exact_decompositions=sols)
        assert abs(res[1]["prob"] - 1 / 5) < 1e-12

    def test_unreliable_sampler_rejected(self):
        from absorbkit.errors import ReliabilityError
        with pytest.raises(ReliabilityError):
            spread_estimate(lambda s: None, [1], trials=20, seed=2)

    def test_monte_carlo_consistency(self):
        from absorbkit.exactcover import enumerate_decompositions
        sols = enumerate_decompositions(Hypergraph.complete(7, 2), 3)

        def sampler(seed):
            return sols[random.Random(seed).randrange(len(sols))]

        a = spread_estimate(sampler, [1], trials=400, seed=3)
        b = spread_estimate(sampler, [1], trials=800, seed=4)
        assert abs(a[1]["sigma_hat"] - b[1]["sigma_hat"]) < 0.12
