"""Local-search solvers: bounded augmenting-trail search and the greedy
maximal baseline.

The scheme: starting from the empty solution, repeatedly flip any augmenting
trail of at most 2/epsilon edges until none exists.  The returned solution is
feasible and within a (1 - epsilon) factor of optimal; the greedy maximal
baseline guarantees a factor 1/2.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .graph import EdgeSet, Graph, is_feasible
from .trails import Trail, is_augmenting


def max_trail_length(epsilon: float | Fraction) -> int:
    """Largest odd integer <= floor(2 / epsilon), minimum 1.

    epsilon must lie in (0, 1]; out-of-range values are rejected rather than
    clamped.
    """
    eps = Fraction(epsilon)
    if not 0 < eps <= 1:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    length = floor(Fraction(2) / eps)
    if length % 2 == 0:
        length -= 1
    return max(length, 1)


@dataclass(frozen=True)
class SearchConfig:
    """Parameters for the local-search solver.

    ``max_trail_len`` is derived from epsilon; ``node_order`` seeds the edge
    permutation used to order the search (0 keeps input order).
    """

    epsilon: float | Fraction
    node_order: int = 0
    verify_flips: bool = True
    max_trail_len: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "max_trail_len", max_trail_length(self.epsilon))


@dataclass
class SolveReport:
    """What a solver run did: sizes, flip count, trail lengths, timing."""

    algorithm: str
    epsilon: float | None
    size: int
    flips: int
    trail_lengths: dict[int, int]
    micros: int
    verified: bool

    SCHEMA = 1

    def to_dict(self) -> dict:
        return {
            "schema": self.SCHEMA,
            "algorithm": self.algorithm,
            "epsilon": None if self.epsilon is None else float(self.epsilon),
            "size": self.size,
            "flips": self.flips,
            "trail_lengths": {str(k): v for k, v in sorted(self.trail_lengths.items())},
            "micros": self.micros,
            "verified": self.verified,
        }


def _edge_rank(g: Graph, seed: int) -> list[int]:
    """Total order on edge ids: identity for seed 0, else a seeded shuffle."""
    order = list(range(g.edge_count))
    if seed:
        random.Random(seed).shuffle(order)
    rank = [0] * g.edge_count
    for r, eid in enumerate(order):
        rank[eid] = r
    return rank


def find_augmenting_trail(
    g: Graph, m: EdgeSet, max_len: int, *, node_order: int = 0
) -> Trail | None:
    """First augmenting trail of odd length <= max_len in depth-first order,
    or None if none exists.

    The search is exhaustive over alternating trails with distinct edges:
    start edges outside m in ascending order (under the seeded edge order),
    extensions in ascending order, both orientations of the start edge, with
    the flip tested at every odd prefix length.  The first augmenting prefix
    found is the lexicographically smallest by edge-id sequence.
    """
    if max_len < 1 or max_len % 2 == 0:
        raise ValueError("max_len must be a positive odd integer")
    if not is_feasible(g, m):
        raise ValueError("m is not a feasible solution")
    if g.edge_count == 0:
        return None

    rank = _edge_rank(g, node_order)
    bits_m = m.bits
    n = g.node_count

    # Per-node extension lists split by membership, pre-sorted by rank.
    adj_in: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    adj_out: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(g.edges):
        tgt = adj_in if bits_m >> eid & 1 else adj_out
        tgt[u].append((rank[eid], eid, v))
        tgt[v].append((rank[eid], eid, u))
    for lst in adj_in:
        lst.sort()
    for lst in adj_out:
        lst.sort()

    # Degrees in the flipped set m^p, kept incrementally; "over" counts the
    # nodes currently above degree 2.
    deg = [(g.incidence_mask(u) & bits_m).bit_count() for u in range(n)]
    neighbors = g.neighbors

    walk = [0, 0]
    edges_seq: list[int] = []
    used = 0
    state = {"over": 0}

    def flip_feasible(p_bits: int) -> bool:
        # Degrees already verified via the counter; triangles in the flipped
        # set must involve an added (non-m) edge since m itself is feasible.
        flipped = bits_m ^ p_bits
        added = p_bits & ~bits_m
        while added:
            low = added & -added
            added ^= low
            a, b = g.edges[low.bit_length() - 1]
            nbr_b = neighbors(b)
            for w, eid_aw in neighbors(a).items():
                if w == b:
                    continue
                if flipped >> eid_aw & 1:
                    eid_bw = nbr_b.get(w)
                    if eid_bw is not None and flipped >> eid_bw & 1:
                        return False
        return True

    def push(eid: int, a: int, b: int) -> None:
        nonlocal used
        used |= 1 << eid
        edges_seq.append(eid)
        delta = -1 if bits_m >> eid & 1 else 1
        for node in (a, b):
            deg[node] += delta
            if delta == 1 and deg[node] == 3:
                state["over"] += 1
            elif delta == -1 and deg[node] == 2:
                state["over"] -= 1

    def pop(eid: int, a: int, b: int) -> None:
        nonlocal used
        used ^= 1 << eid
        edges_seq.pop()
        delta = 1 if bits_m >> eid & 1 else -1
        for node in (a, b):
            deg[node] += delta
            if delta == 1 and deg[node] == 3:
                state["over"] += 1
            elif delta == -1 and deg[node] == 2:
                state["over"] -= 1

    def extend(last: int, want_in_m: bool, length: int) -> Trail | None:
        if length % 2 == 1 and state["over"] == 0 and flip_feasible(used):
            return Trail(tuple(edges_seq), tuple(walk))
        if length == max_len:
            return None
        for _, eid, nxt in (adj_in if want_in_m else adj_out)[last]:
            if used >> eid & 1:
                continue
            push(eid, last, nxt)
            walk.append(nxt)
            found = extend(nxt, not want_in_m, length + 1)
            if found is not None:
                return found
            walk.pop()
            pop(eid, last, nxt)
        return None

    starts = sorted(
        (rank[eid], eid) for eid in range(g.edge_count) if not bits_m >> eid & 1
    )
    base_deg = list(deg)
    for _, eid in starts:
        # Within one orientation, depth-first preorder visits edge sequences
        # in lexicographic order, so the first find is that orientation's
        # minimum; return the smaller of the two orientations' finds.
        best: Trail | None = None
        u, v = g.edges[eid]
        for a, b in ((u, v), (v, u)):
            walk[0], walk[1] = a, b
            del walk[2:]
            edges_seq.clear()
            deg[:] = base_deg
            state["over"] = 0
            used = 0
            push(eid, a, b)
            found = extend(b, True, 1)
            if found is not None and (
                best is None
                or [rank[e] for e in found.edge_ids] < [rank[e] for e in best.edge_ids]
            ):
                best = found
        if best is not None:
            return best
    return None


def ptas_solve(
    g: Graph, cfg: SearchConfig, *, initial: EdgeSet | None = None
) -> tuple[EdgeSet, SolveReport]:
    """Run the local-search loop from the empty solution (or a feasible warm
    start) until no augmenting trail of length <= max_trail_len remains.

    Each flip grows the solution by exactly one edge, so there are at most n
    flips; the result is feasible and at least (1 - epsilon) times the size
    of an optimal solution.
    """
    start_ns = time.perf_counter_ns()
    m = EdgeSet.empty(g) if initial is None else initial
    if initial is not None and not is_feasible(g, m):
        raise ValueError("warm start is not a feasible solution")
    flips = 0
    hist: dict[int, int] = {}
    verified = True
    while True:
        trail = find_augmenting_trail(
            g, m, cfg.max_trail_len, node_order=cfg.node_order
        )
        if trail is None:
            break
        if cfg.verify_flips:
            if not is_augmenting(g, trail, m):
                raise AssertionError(
                    f"search returned a non-augmenting trail {trail.format_walk()}"
                )
        m = EdgeSet(g, m.bits ^ trail.bits())
        flips += 1
        hist[len(trail)] = hist.get(len(trail), 0) + 1
        if flips > g.node_count:
            raise AssertionError("more flips than nodes; search is broken")
    if cfg.verify_flips and not is_feasible(g, m):
        raise AssertionError("final solution infeasible")
    micros = (time.perf_counter_ns() - start_ns) // 1000
    report = SolveReport(
        algorithm="ptas",
        epsilon=float(cfg.epsilon),
        size=len(m),
        flips=flips,
        trail_lengths=hist,
        micros=micros,
        verified=cfg.verify_flips,
    )
    return m, report


def maximal_solve(g: Graph, order_seed: int = 0) -> EdgeSet:
    """Greedy baseline: insert edges in a seeded order whenever feasibility
    is preserved.

    The result admits no single-edge augmentation, hence is at least half
    the optimal size.
    """
    order = list(range(g.edge_count))
    random.Random(order_seed).shuffle(order)
    chosen = 0
    deg = [0] * g.node_count
    for eid in order:
        u, v = g.edges[eid]
        if deg[u] >= 2 or deg[v] >= 2:
            continue
        nbr_v = g.neighbors(v)
        closes_triangle = False
        for w, eid_uw in g.neighbors(u).items():
            if w == v or not chosen >> eid_uw & 1:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is not None and chosen >> eid_vw & 1:
                closes_triangle = True
                break
        if closes_triangle:
            continue
        chosen |= 1 << eid
        deg[u] += 1
        deg[v] += 1
    return EdgeSet(g, chosen)
