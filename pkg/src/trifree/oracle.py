"""Exact ground truth for small instances, by branch and bound.

The oracle enumerates decisions edge by edge in id order, include-branch
first, so the first solution reaching the best objective is the
lexicographically smallest one.  Greedy passes seed only a size floor; the
search itself proves optimality, so results never depend on the heuristics
being right.
"""

from __future__ import annotations

from .graph import EdgeSet, Graph, is_feasible

DEFAULT_MAX_EDGES = 30
DEFAULT_ENUM_MAX_EDGES = 20


class OracleGuardError(ValueError):
    """Instance exceeds the oracle's size guard.

    The guard is an explicit error rather than a silent truncation: an oracle
    must never be approximate.
    """


def _tri_pairs(g: Graph) -> list[tuple[tuple[int, int], ...]]:
    """For each edge {u,v}: the (eid_uw, eid_vw) pairs over common neighbors w.

    Including edge e closes a triangle iff both ids of some pair are chosen.
    """
    out = []
    for u, v in g.edges:
        nbr_v = g.neighbors(v)
        pairs = []
        for w, eid_uw in g.neighbors(u).items():
            if w == v:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is not None:
                pairs.append((eid_uw, eid_vw))
        out.append(tuple(pairs))
    return out


def _greedy_floor(g: Graph) -> int:
    """Size of a maximal solution built by two deterministic greedy passes."""
    best = 0
    m = g.edge_count
    tri_pairs = _tri_pairs(g)
    for order in (range(m), range(m - 1, -1, -1)):
        chosen = 0
        deg = [0] * g.node_count
        size = 0
        for eid in order:
            u, v = g.edges[eid]
            if deg[u] >= 2 or deg[v] >= 2:
                continue
            if any(chosen >> a & 1 and chosen >> b & 1 for a, b in tri_pairs[eid]):
                continue
            chosen |= 1 << eid
            deg[u] += 1
            deg[v] += 1
            size += 1
        best = max(best, size)
    return best


class _Search:
    """Shared branch-and-bound core.

    Maximizes (|S|, |S & apx|) with apx empty for the plain oracle; ties are
    resolved to the lexicographically smallest edge set by the search order.
    """

    def __init__(self, g: Graph, apx_bits: int, size_floor: int):
        self.g = g
        self.m = g.edge_count
        self.apx_bits = apx_bits
        self.tri_pairs = _tri_pairs(g)
        self.ends = g.edges
        # live_at[i][u]: edges with id >= i incident to u, for capacity bounds
        live = [0] * g.node_count
        live_at = [tuple(live)]
        for eid in range(self.m - 1, -1, -1):
            u, v = g.edges[eid]
            live[u] += 1
            live[v] += 1
            live_at.append(tuple(live))
        live_at.reverse()
        self.live_at = live_at
        self.apx_suffix = [0] * (self.m + 1)
        for eid in range(self.m - 1, -1, -1):
            self.apx_suffix[eid] = self.apx_suffix[eid + 1] + (apx_bits >> eid & 1)
        self.size_floor = size_floor
        self.best_bits: int | None = None
        self.best_size = -1
        self.best_inter = -1
        self.size_cap = min(self.m, g.node_count)

    def _capacity_bound(self, i: int, deg: list[int]) -> int:
        live = self.live_at[i]
        cap = 0
        for u in range(self.g.node_count):
            cap += min(2 - deg[u], live[u]) if deg[u] < 2 else 0
        return cap // 2

    def _improves(self, size: int, inter: int) -> bool:
        if self.best_bits is None:
            return size >= self.size_floor
        return size > self.best_size or (
            size == self.best_size and inter > self.best_inter
        )

    def _may_improve(self, ub_size: int, ub_inter: int) -> bool:
        if self.best_bits is None:
            return ub_size >= self.size_floor
        return ub_size > self.best_size or (
            ub_size >= self.best_size and ub_inter > self.best_inter
        )

    def run(self) -> int:
        self._recurse(0, 0, [0] * self.g.node_count, 0, 0)
        assert self.best_bits is not None
        return self.best_bits

    def _recurse(self, i: int, chosen: int, deg: list[int], size: int, inter: int) -> None:
        if i == self.m:
            if self._improves(size, inter):
                self.best_bits = chosen
                self.best_size = size
                self.best_inter = inter
            return
        ub_size = min(size + self.m - i, self.size_cap, size + self._capacity_bound(i, deg))
        ub_inter = inter + self.apx_suffix[i]
        if not self._may_improve(ub_size, ub_inter):
            return
        u, v = self.ends[i]
        if deg[u] < 2 and deg[v] < 2 and not any(
            chosen >> a & 1 and chosen >> b & 1 for a, b in self.tri_pairs[i]
        ):
            deg[u] += 1
            deg[v] += 1
            self._recurse(
                i + 1,
                chosen | 1 << i,
                deg,
                size + 1,
                inter + (self.apx_bits >> i & 1),
            )
            deg[u] -= 1
            deg[v] -= 1
        self._recurse(i + 1, chosen, deg, size, inter)


def _check_guard(g: Graph, max_edges: int) -> None:
    if g.edge_count > max_edges:
        raise OracleGuardError(
            f"instance has {g.edge_count} edges, oracle guard is {max_edges}"
        )


def exact_max(g: Graph, *, max_edges: int = DEFAULT_MAX_EDGES) -> EdgeSet:
    """Maximum-cardinality feasible edge set; lexicographically smallest
    optimum, deterministic."""
    _check_guard(g, max_edges)
    if g.edge_count == 0:
        return EdgeSet.empty(g)
    search = _Search(g, 0, _greedy_floor(g))
    return EdgeSet(g, search.run())


def exact_max_tiebreak(
    g: Graph, apx: EdgeSet, *, max_edges: int = DEFAULT_MAX_EDGES
) -> EdgeSet:
    """Among maximum-cardinality feasible sets, one maximizing the overlap
    with apx; remaining ties resolved lexicographically."""
    _check_guard(g, max_edges)
    if not is_feasible(g, apx):
        raise ValueError("apx is not a feasible solution")
    if g.edge_count == 0:
        return EdgeSet.empty(g)
    search = _Search(g, apx.bits, _greedy_floor(g))
    return EdgeSet(g, search.run())


def enumerate_maximum(
    g: Graph, *, max_edges: int = DEFAULT_ENUM_MAX_EDGES
) -> list[EdgeSet]:
    """All maximum-cardinality feasible sets, sorted by edge ids."""
    _check_guard(g, max_edges)
    opt_size = len(exact_max(g, max_edges=max_edges))
    tri_pairs = _tri_pairs(g)
    m = g.edge_count
    live = [0] * g.node_count
    live_at = [tuple(live)]
    for eid in range(m - 1, -1, -1):
        u, v = g.edges[eid]
        live[u] += 1
        live[v] += 1
        live_at.append(tuple(live))
    live_at.reverse()
    results: list[int] = []

    def capacity(i: int, deg: list[int]) -> int:
        row = live_at[i]
        return sum(min(2 - deg[u], row[u]) for u in range(g.node_count) if deg[u] < 2) // 2

    def recurse(i: int, chosen: int, deg: list[int], size: int) -> None:
        if size + min(m - i, capacity(i, deg)) < opt_size:
            return
        if i == m:
            if size == opt_size:
                results.append(chosen)
            return
        u, v = g.edges[i]
        if deg[u] < 2 and deg[v] < 2 and not any(
            chosen >> a & 1 and chosen >> b & 1 for a, b in tri_pairs[i]
        ):
            deg[u] += 1
            deg[v] += 1
            recurse(i + 1, chosen | 1 << i, deg, size + 1)
            deg[u] -= 1
            deg[v] -= 1
        recurse(i + 1, chosen, deg, size)

    recurse(0, 0, [0] * g.node_count, 0)
    results.sort(key=lambda bits: tuple(EdgeSet(g, bits)))
    return [EdgeSet(g, bits) for bits in results]
