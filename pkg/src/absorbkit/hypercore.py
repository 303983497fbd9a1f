"""Core r-uniform hypergraph and multihypergraph representation.

Vertices are dense integer indices 0..n-1.  Edges and cliques are strictly
increasing tuples of vertex ids.  Hypergraphs are immutable after
construction and safe to share across tasks; "mutation" helpers return new
objects.  Clique enumeration is lexicographic so downstream seeded sampling
is reproducible.
"""
from __future__ import annotations

import itertools
import os
from collections import Counter
from math import comb
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import ParameterError, ParseError

Edge = tuple          # sorted tuple of r vertex ids
Clique = tuple        # sorted tuple of q vertex ids


def _as_edge(verts: Iterable[int], r: int, n: int) -> Edge:
    e = tuple(sorted(verts))
    if len(e) != r or len(set(e)) != r:
        raise ParameterError(f"edge {verts!r} is not a {r}-set")
    if e and (e[0] < 0 or e[-1] >= n):
        raise ParameterError(f"edge {e!r} has a vertex outside 0..{n - 1}")
    return e


class Hypergraph:
    """Simple r-uniform hypergraph on vertex set 0..n-1."""

    __slots__ = ("n", "r", "edges", "_masks")

    def __init__(self, n: int, r: int, edges: Iterable[Iterable[int]] = ()):
        if r < 1 or n < 0:
            raise ParameterError(f"bad uniformity/order r={r}, n={n}")
        self.n = n
        self.r = r
        self.edges = frozenset(_as_edge(e, r, n) for e in edges)
        self._masks = None  # lazy bitset cache, (r-1)-set -> vertex bitmask

    @classmethod
    def complete(cls, n: int, r: int) -> "Hypergraph":
        return cls(n, r, itertools.combinations(range(n), r))

    @classmethod
    def empty(cls, n: int, r: int) -> "Hypergraph":
        return cls(n, r)

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_complete(self) -> bool:
        return self.m == comb(self.n, self.r)

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self.edges

    def support(self) -> frozenset:
        """Vertices incident to at least one edge."""
        return frozenset(v for e in self.edges for v in e)

    def with_edges(self, extra: Iterable[Iterable[int]]) -> "Hypergraph":
        return Hypergraph(self.n, self.r, set(self.edges) | {tuple(sorted(e)) for e in extra})

    def without_edges(self, gone: Iterable[Iterable[int]]) -> "Hypergraph":
        return Hypergraph(self.n, self.r, set(self.edges) - {tuple(sorted(e)) for e in gone})

    def relabeled(self, phi: Mapping[int, int], n: int | None = None) -> "Hypergraph":
        """Image under a vertex map; must stay injective on each edge."""
        new = [tuple(sorted(phi[v] for v in e)) for e in self.edges]
        return Hypergraph(self.n if n is None else n, self.r, new)

    def multi(self) -> "MultiHypergraph":
        return MultiHypergraph(self.n, self.r, {e: 1 for e in self.edges})

    def simple(self) -> "Hypergraph":
        return self

    def neighbor_mask(self, T: tuple) -> int:
        """Bitmask of vertices v with T | {v} an edge, for an (r-1)-set T."""
        if self._masks is None:
            masks: dict = {}
            for e in self.edges:
                for i in range(self.r):
                    sub = e[:i] + e[i + 1:]
                    masks[sub] = masks.get(sub, 0) | (1 << e[i])
            self._masks = masks
        return self._masks.get(T, 0)

    def __contains__(self, e) -> bool:
        return tuple(e) in self.edges

    def __eq__(self, other) -> bool:
        return (isinstance(other, Hypergraph)
                and (self.n, self.r, self.edges) == (other.n, other.r, other.edges))

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, r={self.r}, m={self.m})"


class MultiHypergraph:
    """r-uniform multihypergraph: edge -> multiplicity >= 1."""

    __slots__ = ("n", "r", "mult")

    def __init__(self, n: int, r: int, mult: Mapping[tuple, int] | None = None):
        if r < 1 or n < 0:
            raise ParameterError(f"bad uniformity/order r={r}, n={n}")
        self.n = n
        self.r = r
        m: dict = {}
        for e, k in (mult or {}).items():
            if k < 0:
                raise ParameterError(f"negative multiplicity for {e!r}")
            if k == 0:
                continue
            m[_as_edge(e, r, n)] = int(k)
        self.mult = m

    @property
    def m(self) -> int:
        """Edge count with multiplicity."""
        return sum(self.mult.values())

    def multiplicity(self, e: Iterable[int]) -> int:
        return self.mult.get(tuple(sorted(e)), 0)

    def simple(self) -> Hypergraph:
        """Support set Simple(J)."""
        return Hypergraph(self.n, self.r, self.mult.keys())

    def edge_multiset(self) -> Counter:
        return Counter(self.mult)

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiHypergraph)
                and (self.n, self.r, self.mult) == (other.n, other.r, other.mult))

    def __repr__(self) -> str:
        return f"MultiHypergraph(n={self.n}, r={self.r}, m={self.m})"


AnyGraph = Union[Hypergraph, MultiHypergraph]


def level_degree(G: AnyGraph, S: Iterable[int]) -> int:
    """Number of edges containing S, with multiplicity for multigraphs."""
    S = frozenset(S)
    for v in S:
        if not (0 <= v < G.n):
            raise ParameterError(f"vertex {v} outside 0..{G.n - 1}")
    if len(S) > G.r:
        raise ParameterError(f"|S|={len(S)} exceeds uniformity r={G.r}")
    if isinstance(G, MultiHypergraph):
        return sum(k for e, k in G.mult.items() if S.issubset(e))
    return sum(1 for e in G.edges if S.issubset(e))


def max_level_degree(G: AnyGraph, j: int) -> int:
    """Max of level_degree over j-subsets occurring in some edge."""
    if not (0 <= j <= G.r - 1):
        raise ParameterError(f"j={j} outside 0..r-1")
    counts: Counter = Counter()
    if isinstance(G, MultiHypergraph):
        items = G.mult.items()
    else:
        items = ((e, 1) for e in G.edges)
    for e, k in items:
        for sub in itertools.combinations(e, j):
            counts[sub] += k
    return max(counts.values(), default=0)


def enumerate_cliques(G: AnyGraph, q: int) -> list:
    """All q-sets whose every r-subset is an edge of G, in lex order.

    For multihypergraphs the support Simple(G) is used.
    """
    if isinstance(G, MultiHypergraph):
        G = G.simple()
    if q <= G.r:
        raise ParameterError(f"need q > r, got q={q}, r={G.r}")
    if G.n < q or not G.edges:
        return []
    if G.is_complete():
        return list(itertools.combinations(range(G.n), q))

    # r = 1 special case: cliques are q-subsets of the support
    if G.r == 1:
        sup = sorted(G.support())
        return list(itertools.combinations(sup, q))

    full = (1 << G.n) - 1
    out = []

    def extend(partial: list, cand: int, lo: int):
        if len(partial) == q:
            out.append(tuple(partial))
            return
        v = lo
        rest = cand >> lo
        while rest:
            if rest & 1:
                # candidates after v must complete every r-set through v
                newcand = cand
                for sub in itertools.combinations(partial, G.r - 2):
                    newcand &= G.neighbor_mask(tuple(sorted(sub + (v,))))
                extend(partial + [v], newcand, v + 1)
            rest >>= 1
            v += 1

    extend([], full, 0)
    return out


def clique_edges(C: Sequence[int], r: int) -> Iterator[tuple]:
    """The binom(|C|, r) r-subsets covered by a clique."""
    return itertools.combinations(tuple(sorted(C)), r)


def is_clique_of(G: AnyGraph, C: Sequence[int]) -> bool:
    if isinstance(G, MultiHypergraph):
        G = G.simple()
    return all(e in G.edges for e in clique_edges(C, G.r))


class Packing:
    """Pairwise edge-disjoint family of q-cliques of a host hypergraph."""

    __slots__ = ("host", "q", "cliques")

    def __init__(self, host: Hypergraph, cliques: Iterable[Sequence[int]], q: int | None = None):
        self.host = host
        cl = sorted(tuple(sorted(c)) for c in cliques)
        if q is None:
            if not cl:
                raise ParameterError("empty packing needs an explicit q")
            q = len(cl[0])
        self.q = q
        seen: set = set()
        for c in cl:
            if len(c) != q or len(set(c)) != q:
                raise ParameterError(f"{c!r} is not a {q}-set")
            if not is_clique_of(host, c):
                raise ParameterError(f"{c!r} is not a clique of the host")
            for e in clique_edges(c, host.r):
                if e in seen:
                    raise ParameterError(f"edge {e!r} covered twice")
                seen.add(e)
        self.cliques = tuple(cl)

    def covered_edges(self) -> frozenset:
        out = set()
        for c in self.cliques:
            out.update(clique_edges(c, self.host.r))
        return frozenset(out)

    def leftover(self) -> Hypergraph:
        return Hypergraph(self.host.n, self.host.r, self.host.edges - self.covered_edges())

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def __repr__(self) -> str:
        return f"Packing(q={self.q}, size={len(self.cliques)})"


def decomposition_valid(target: AnyGraph, cliques: Iterable[Sequence[int]], q: int) -> bool:
    """Exact multiset test: clique edges partition the target edge set."""
    want = target.edge_multiset() if isinstance(target, MultiHypergraph) else Counter(target.edges)
    got: Counter = Counter()
    r = target.r
    for c in cliques:
        c = tuple(sorted(c))
        if len(c) != q or len(set(c)) != q:
            return False
        for e in clique_edges(c, r):
            got[e] += 1
    return got == want


class Decomposition:
    """Clique family whose edges exactly partition a target edge (multi)set.

    Members may repeat when the target is a multihypergraph.
    """

    __slots__ = ("target", "q", "cliques")

    def __init__(self, target: AnyGraph, cliques: Iterable[Sequence[int]], q: int | None = None):
        cl = sorted(tuple(sorted(c)) for c in cliques)
        if q is None:
            if not cl:
                if (target.m if isinstance(target, MultiHypergraph) else len(target.edges)):
                    raise ParameterError("empty clique list cannot decompose a nonempty target")
                q = target.r + 1
            else:
                q = len(cl[0])
        if not decomposition_valid(target, cl, q):
            raise ParameterError("cliques do not partition the target edge set")
        self.target = target
        self.q = q
        self.cliques = tuple(cl)

    def as_packing(self) -> Packing:
        if isinstance(self.target, MultiHypergraph):
            raise ParameterError("multigraph decompositions are not packings")
        return Packing(self.target, self.cliques, self.q)

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def __repr__(self) -> str:
        return f"Decomposition(q={self.q}, size={len(self.cliques)})"


# ---------------------------------------------------------------------------
# Text formats.
#
# Graph file: header "r n m", then m lines of r ascending ids; a multigraph
# line appends "x k" for multiplicity k > 1.
# Packing file: header "q n m", then m lines of q ids, then "host <path>".
# ---------------------------------------------------------------------------

def write_graph(G: AnyGraph, path: str) -> None:
    lines = []
    if isinstance(G, MultiHypergraph):
        m = len(G.mult)
        lines.append(f"{G.r} {G.n} {m}")
        for e in sorted(G.mult):
            k = G.mult[e]
            suffix = f" x {k}" if k > 1 else ""
            lines.append(" ".join(map(str, e)) + suffix)
    else:
        lines.append(f"{G.r} {G.n} {G.m}")
        for e in sorted(G.edges):
            lines.append(" ".join(map(str, e)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path: str) -> AnyGraph:
    """Read a graph file; returns a MultiHypergraph iff a multiplicity > 1 occurs."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ParseError(1, "empty file")
    head = raw[0].split()
    if len(head) != 3:
        raise ParseError(1, f"expected header 'r n m', got {raw[0]!r}")
    try:
        r, n, m = (int(t) for t in head)
    except ValueError:
        raise ParseError(1, f"non-integer header field in {raw[0]!r}") from None
    if r < 1 or n < 0 or m < 0:
        raise ParseError(1, f"bad header values r={r} n={n} m={m}")
    mult: dict = {}
    any_multi = False
    for i in range(m):
        ln = i + 2
        if i + 1 >= len(raw) or not raw[i + 1].strip():
            raise ParseError(ln, "missing edge line")
        toks = raw[i + 1].split()
        k = 1
        if len(toks) == r + 2 and toks[r] == "x":
            try:
                k = int(toks[r + 1])
            except ValueError:
                raise ParseError(ln, f"bad multiplicity {toks[r + 1]!r}") from None
            if k < 1:
                raise ParseError(ln, f"multiplicity {k} < 1")
            toks = toks[:r]
            if k > 1:
                any_multi = True
        if len(toks) != r:
            raise ParseError(ln, f"expected {r} vertex ids, got {len(toks)}")
        try:
            verts = tuple(int(t) for t in toks)
        except ValueError:
            raise ParseError(ln, f"non-integer vertex id in {raw[i + 1]!r}") from None
        if list(verts) != sorted(set(verts)):
            raise ParseError(ln, f"edge {verts!r} not strictly increasing")
        if verts[0] < 0 or verts[-1] >= n:
            raise ParseError(ln, f"vertex outside 0..{n - 1}")
        if verts in mult:
            raise ParseError(ln, f"duplicate edge {verts!r}")
        mult[verts] = k
    if any_multi:
        return MultiHypergraph(n, r, mult)
    return Hypergraph(n, r, mult.keys())


def write_packing(P: Union[Packing, Decomposition], path: str, host_path: str) -> None:
    host = P.host if isinstance(P, Packing) else P.target
    lines = [f"{P.q} {host.n} {len(P.cliques)}"]
    for c in P.cliques:
        lines.append(" ".join(map(str, c)))
    lines.append(f"host {host_path}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_packing(path: str, as_decomposition: bool = False):
    """Read a packing file; the host graph is loaded from its trailing path
    (relative paths resolve against the packing file's directory)."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise ParseError(1, "empty file")
    head = raw[0].split()
    if len(head) != 3:
        raise ParseError(1, f"expected header 'q n m', got {raw[0]!r}")
    try:
        q, n, m = (int(t) for t in head)
    except ValueError:
        raise ParseError(1, f"non-integer header field in {raw[0]!r}") from None
    cliques = []
    for i in range(m):
        ln = i + 2
        if i + 1 >= len(raw):
            raise ParseError(ln, "missing clique line")
        toks = raw[i + 1].split()
        if len(toks) != q:
            raise ParseError(ln, f"expected {q} vertex ids, got {len(toks)}")
        try:
            verts = tuple(int(t) for t in toks)
        except ValueError:
            raise ParseError(ln, f"non-integer vertex id in {raw[i + 1]!r}") from None
        if list(verts) != sorted(set(verts)) or verts[0] < 0 or verts[-1] >= n:
            raise ParseError(ln, f"bad clique {verts!r}")
        cliques.append(verts)
    if m + 1 >= len(raw) or not raw[m + 1].startswith("host "):
        raise ParseError(m + 2, "missing trailing 'host <path>' line")
    host_path = raw[m + 1][5:].strip()
    if not os.path.isabs(host_path):
        host_path = os.path.join(os.path.dirname(os.path.abspath(path)), host_path)
    host = read_graph(host_path)
    if as_decomposition:
        return Decomposition(host, cliques, q)
    if isinstance(host, MultiHypergraph):
        host = host.simple()
    return Packing(host, cliques, q)
