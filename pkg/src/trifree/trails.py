"""Trails (edge-distinct walks) and their alternation/augmentation semantics.

A trail is an ordered sequence of distinct edges in which consecutive edges
share a node; nodes may repeat and the walk may be closed.  A trail augments
a solution when it alternates between solution and non-solution edges and
flipping it (symmetric difference) yields a feasible solution exactly one
edge larger.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import EdgeSet, Graph, is_feasible


@dataclass(frozen=True)
class Trail:
    """Walk through distinct edges.  ``nodes`` is the node walk, one longer
    than ``edge_ids``; the empty trail has no nodes and acts as the identity
    for concatenation.

    The walk is carried explicitly: with repeated nodes or a closed trail the
    edge sequence alone does not determine which incidence each edge uses.
    """

    edge_ids: tuple[int, ...]
    nodes: tuple[int, ...]

    @classmethod
    def empty(cls) -> Trail:
        return cls((), ())

    @classmethod
    def from_walk(cls, g: Graph, nodes: tuple[int, ...] | list[int]) -> Trail:
        """Build a trail from its node walk, resolving edge ids against g."""
        nodes = tuple(nodes)
        if len(nodes) == 0:
            return cls.empty()
        if len(nodes) == 1:
            raise ValueError("a walk needs either zero or at least two nodes")
        edge_ids = []
        for a, b in zip(nodes, nodes[1:]):
            eid = g.edge_id(a, b)
            if eid is None:
                raise ValueError(f"no edge ({a}, {b}) in graph")
            edge_ids.append(eid)
        if len(set(edge_ids)) != len(edge_ids):
            raise ValueError("trail repeats an edge")
        return cls(tuple(edge_ids), nodes)

    def __len__(self) -> int:
        return len(self.edge_ids)

    @property
    def first_node(self) -> int:
        return self.nodes[0]

    @property
    def last_node(self) -> int:
        return self.nodes[-1]

    @property
    def is_closed(self) -> bool:
        return len(self.edge_ids) > 0 and self.nodes[0] == self.nodes[-1]

    def bits(self) -> int:
        mask = 0
        for eid in self.edge_ids:
            mask |= 1 << eid
        return mask

    def format_walk(self) -> str:
        """Serialize as dash-separated walk nodes, e.g. "2-0-1-2"."""
        return "-".join(str(u) for u in self.nodes)

    @classmethod
    def parse_walk(cls, g: Graph, text: str) -> Trail:
        parts = text.strip().split("-")
        if parts == [""]:
            return cls.empty()
        try:
            nodes = [int(p) for p in parts]
        except ValueError:
            raise ValueError(f"malformed walk {text!r}") from None
        return cls.from_walk(g, nodes)


def concat(p1: Trail, p2: Trail) -> Trail:
    """Concatenate two trails sharing an endpoint and no edges."""
    if len(p1) == 0:
        return p2
    if len(p2) == 0:
        return p1
    if p1.last_node != p2.first_node:
        raise ValueError(
            f"cannot concatenate: trail ends at {p1.last_node}, "
            f"next starts at {p2.first_node}"
        )
    if set(p1.edge_ids) & set(p2.edge_ids):
        raise ValueError("cannot concatenate: trails share an edge")
    return Trail(p1.edge_ids + p2.edge_ids, p1.nodes + p2.nodes[1:])


def is_alternating(g: Graph, p: Trail, m: EdgeSet) -> bool:
    """True iff no two consecutive edges of p are both in m or both outside.

    The membership of the first edge is not constrained here; augmenting
    trails force it through the size condition.
    """
    bits = m.bits
    memb = [bool(bits >> eid & 1) for eid in p.edge_ids]
    return all(a != b for a, b in zip(memb, memb[1:]))


def apply_trail(m: EdgeSet, p: Trail) -> EdgeSet:
    """Flip the trail: m triangle-symmetric-difference the trail's edges.

    Applying the same trail twice returns the original set.
    """
    for eid in p.edge_ids:
        if not 0 <= eid < m.owner.edge_count:
            raise ValueError(f"edge id {eid} not in the owner graph")
    return EdgeSet(m.owner, m.bits ^ p.bits())


def is_augmenting(g: Graph, p: Trail, m: EdgeSet) -> bool:
    """True iff p alternates w.r.t. m and flipping it yields a feasible
    solution of size exactly |m| + 1.

    Consequently an augmenting trail has odd length and its first and last
    edges lie outside m.
    """
    if len(p) == 0:
        return False
    if not is_alternating(g, p, m):
        return False
    flipped = apply_trail(m, p)
    if len(flipped) != len(m) + 1:
        return False
    return is_feasible(g, flipped)
