"""Immutable simple graphs, edge-id sets, and triangle/feasibility queries.

A solution to the triangle-free 2-matching problem is a subset of edges in
which every node has degree at most two and no three chosen edges form a
triangle.  Everything downstream (search, oracle, trail construction) speaks
in terms of the types defined here: an immutable :class:`Graph` with dense
integer edge ids, and :class:`EdgeSet` values holding a bitmask over those
ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple


class GraphParseError(ValueError):
    """Raised on malformed graph or solution text; carries the line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Triangle(NamedTuple):
    """Three mutually adjacent nodes (sorted) and their edge ids.

    ``edge_ids`` is ordered (ab, bc, ca) for nodes (a, b, c).
    """

    nodes: tuple[int, int, int]
    edge_ids: tuple[int, int, int]


class Graph:
    """Simple undirected graph with stable, dense edge ids.

    Edges are numbered 0..m-1 in the order they were supplied.  Instances are
    immutable after construction and safe to share; all mutable solver state
    lives in :class:`EdgeSet` and trail values.
    """

    __slots__ = (
        "node_count",
        "edges",
        "adjacency",
        "_pair_to_id",
        "_incidence",
        "_neighbor_maps",
    )

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        self.node_count = node_count
        normalized: list[tuple[int, int]] = []
        pair_to_id: dict[tuple[int, int], int] = {}
        for u, v in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) has a node index out of range")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            pair = (u, v) if u < v else (v, u)
            if pair in pair_to_id:
                raise ValueError(f"duplicate edge ({pair[0]}, {pair[1]})")
            pair_to_id[pair] = len(normalized)
            normalized.append(pair)
        self.edges: tuple[tuple[int, int], ...] = tuple(normalized)
        self._pair_to_id = pair_to_id
        adjacency: list[list[tuple[int, int]]] = [[] for _ in range(node_count)]
        incidence = [0] * node_count
        neighbor_maps: list[dict[int, int]] = [{} for _ in range(node_count)]
        for eid, (u, v) in enumerate(self.edges):
            adjacency[u].append((v, eid))
            adjacency[v].append((u, eid))
            incidence[u] |= 1 << eid
            incidence[v] |= 1 << eid
            neighbor_maps[u][v] = eid
            neighbor_maps[v][u] = eid
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(a) for a in adjacency
        )
        self._incidence = tuple(incidence)
        self._neighbor_maps = tuple(neighbor_maps)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int | None:
        """Id of edge {u, v}, or None if absent."""
        pair = (u, v) if u < v else (v, u)
        return self._pair_to_id.get(pair)

    def incidence_mask(self, u: int) -> int:
        """Bitmask over edge ids incident to node u."""
        return self._incidence[u]

    def neighbors(self, u: int) -> dict[int, int]:
        """Mapping neighbor -> edge id for node u."""
        return self._neighbor_maps[u]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


@dataclass(frozen=True)
class EdgeSet:
    """Subset of a graph's edges, stored as a bitmask over edge ids.

    Set algebra is defined only between sets owned by the same graph; the
    operators raise ``ValueError`` on an owner mismatch.
    """

    owner: Graph
    bits: int

    @classmethod
    def empty(cls, g: Graph) -> EdgeSet:
        return cls(g, 0)

    @classmethod
    def full(cls, g: Graph) -> EdgeSet:
        return cls(g, (1 << g.edge_count) - 1)

    @classmethod
    def of(cls, g: Graph, edge_ids: Iterable[int]) -> EdgeSet:
        bits = 0
        for eid in edge_ids:
            if not 0 <= eid < g.edge_count:
                raise ValueError(f"edge id {eid} out of range")
            bits |= 1 << eid
        return cls(g, bits)

    def _check_owner(self, other: EdgeSet) -> None:
        if self.owner is not other.owner and self.owner != other.owner:
            raise ValueError("edge sets belong to different graphs")

    def __contains__(self, eid: int) -> bool:
        return bool(self.bits >> eid & 1)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        bits = self.bits
        while bits:
            low = bits & -bits
            yield low.bit_length() - 1
            bits ^= low

    def __or__(self, other: EdgeSet) -> EdgeSet:
        self._check_owner(other)
        return EdgeSet(self.owner, self.bits | other.bits)

    def __and__(self, other: EdgeSet) -> EdgeSet:
        self._check_owner(other)
        return EdgeSet(self.owner, self.bits & other.bits)

    def __sub__(self, other: EdgeSet) -> EdgeSet:
        self._check_owner(other)
        return EdgeSet(self.owner, self.bits & ~other.bits)

    def __xor__(self, other: EdgeSet) -> EdgeSet:
        self._check_owner(other)
        return EdgeSet(self.owner, self.bits ^ other.bits)

    def ids(self) -> tuple[int, ...]:
        return tuple(self)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.owner.edges[eid] for eid in self)


def symmetric_difference(a: EdgeSet, b: EdgeSet) -> EdgeSet:
    """Edges in exactly one of the two sets."""
    return a ^ b


def degree_in(g: Graph, u: int, s: EdgeSet) -> int:
    """Number of edges of s incident to node u."""
    if not 0 <= u < g.node_count:
        raise ValueError(f"node {u} out of range")
    if s.owner is not g and s.owner != g:
        raise ValueError("edge set belongs to a different graph")
    return (g.incidence_mask(u) & s.bits).bit_count()


def _degree_bits(g: Graph, u: int, bits: int) -> int:
    return (g.incidence_mask(u) & bits).bit_count()


def _triangles_bits(g: Graph, bits: int, first_only: bool = False) -> list[Triangle]:
    """Triangles whose three edges all lie in ``bits``.

    Each triangle is reported once, at its lexicographically smallest edge
    pair; with ``first_only`` the scan stops at the first hit.
    """
    out: list[Triangle] = []
    rem = bits
    while rem:
        low = rem & -rem
        eid = low.bit_length() - 1
        rem ^= low
        u, v = g.edges[eid]
        nbr_u = g.neighbors(u)
        nbr_v = g.neighbors(v)
        for w, eid_uw in nbr_u.items():
            if w <= v:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is None:
                continue
            if bits >> eid_uw & 1 and bits >> eid_vw & 1:
                # nodes sorted: u < v < w, edge order (uv, vw, uw)
                out.append(Triangle((u, v, w), (eid, eid_vw, eid_uw)))
                if first_only:
                    return out
    return out


def list_triangles(g: Graph, s: EdgeSet) -> list[Triangle]:
    """All triangles induced by s, sorted by node triple."""
    tris = _triangles_bits(g, s.bits)
    tris.sort(key=lambda t: t.nodes)
    return tris


def first_triangle(g: Graph, s: EdgeSet) -> Triangle | None:
    tris = _triangles_bits(g, s.bits, first_only=True)
    return tris[0] if tris else None


def triangles_containing_edge(g: Graph, s: EdgeSet, eid: int) -> list[Triangle]:
    """Triangles of s that include the given edge."""
    if not 0 <= eid < g.edge_count:
        raise ValueError(f"edge id {eid} out of range")
    bits = s.bits
    if not bits >> eid & 1:
        return []
    u, v = g.edges[eid]
    out: list[Triangle] = []
    nbr_v = g.neighbors(v)
    for w, eid_uw in g.neighbors(u).items():
        if w == v:
            continue
        eid_vw = nbr_v.get(w)
        if eid_vw is None:
            continue
        if bits >> eid_uw & 1 and bits >> eid_vw & 1:
            a, b, c = sorted((u, v, w))
            nbr_a = g.neighbors(a)
            out.append(
                Triangle((a, b, c), (nbr_a[b], g.neighbors(b)[c], nbr_a[c]))
            )
    out.sort(key=lambda t: t.nodes)
    return out


def is_two_matching(g: Graph, m: EdgeSet) -> bool:
    """True iff every node is incident to at most two edges of m."""
    bits = m.bits
    return all(_degree_bits(g, u, bits) <= 2 for u in range(g.node_count))


def is_triangle_free(g: Graph, m: EdgeSet) -> bool:
    return not _triangles_bits(g, m.bits, first_only=True)


def is_feasible(g: Graph, m: EdgeSet) -> bool:
    """True iff m is a 2-matching inducing no triangle."""
    return is_two_matching(g, m) and is_triangle_free(g, m)


def feasibility_violation(
    g: Graph, m: EdgeSet
) -> tuple[str, int] | tuple[str, tuple[int, int, int]] | None:
    """First violated constraint, for diagnostics: ("degree", node) or
    ("triangle", (a, b, c)); None when feasible."""
    bits = m.bits
    for u in range(g.node_count):
        if _degree_bits(g, u, bits) > 2:
            return ("degree", u)
    tri = first_triangle(g, m)
    if tri is not None:
        return ("triangle", tri.nodes)
    return None


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: '#' comments, a "n m" header, then m lines
    "u v" with 0 <= u, v < n and u != v.

    Raises :class:`GraphParseError` (with the offending line number) on a
    malformed header, out-of-range node, self-loop, or duplicate edge.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    n = 0
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphParseError("expected header 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError("expected header 'n m'", lineno) from None
            if n < 0 or m < 0:
                raise GraphParseError("header counts must be nonnegative", lineno)
            header = (n, m)
            continue
        if len(parts) != 2:
            raise GraphParseError("expected edge 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError("expected edge 'u v'", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"node index out of range in edge ({u}, {v})", lineno)
        if u == v:
            raise GraphParseError(f"self-loop at node {u}", lineno)
        pair = (u, v) if u < v else (v, u)
        if pair in seen:
            raise GraphParseError(f"duplicate edge ({pair[0]}, {pair[1]})", lineno)
        seen.add(pair)
        edges.append((u, v))
    if header is None:
        raise GraphParseError("missing header 'n m'", 1)
    if len(edges) != header[1]:
        raise GraphParseError(
            f"header declares {header[1]} edges, found {len(edges)}",
            len(text.splitlines()) or 1,
        )
    return Graph(header[0], edges)


def render_graph(g: Graph) -> str:
    """Inverse of :func:`parse_graph`; edge order preserves edge ids."""
    lines = [f"{g.node_count} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def parse_edge_set(g: Graph, text: str) -> EdgeSet:
    """Parse a solution file: one "u v" edge per line ('#' comments allowed).

    Every pair must name an existing edge of g.
    """
    bits = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError("expected edge 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError("expected edge 'u v'", lineno) from None
        eid = g.edge_id(u, v) if 0 <= u < g.node_count and 0 <= v < g.node_count else None
        if eid is None:
            raise GraphParseError(f"unknown edge ({u}, {v})", lineno)
        bits |= 1 << eid
    return EdgeSet(g, bits)


def render_edge_set(s: EdgeSet) -> str:
    lines = [f"{u} {v}" for u, v in s.pairs()]
    return "\n".join(lines) + ("\n" if lines else "")
