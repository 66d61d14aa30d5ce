"""Chunk-by-chunk construction of edge-disjoint augmenting trails.

Given a feasible solution ``apx`` and a larger feasible solution ``opt`` that
dominates it degree-wise at every node, this module builds exactly
``|opt| - |apx|`` edge-disjoint augmenting trails inside their symmetric
difference.  Trails grow by appending *chunks*: alternating trails of one to
three edges in which every two consecutive edges close a triangle of
``apx | opt``.

The construction maintains five state properties at all times:

1. every trail is a concatenation of edge-disjoint chunks;
2. every trail uses only symmetric-difference edges not used by earlier
   trails;
3. finished trails are augmenting with deficient first and last nodes
   (w.r.t. the edges used before them); the trail under construction starts
   at a deficient node with an opt-only edge;
4. flipping the current trail leaves ``apx`` triangle-free;
5. flipping all used edges leaves ``opt`` triangle-free.

Candidate chunks are filtered declaratively against these properties rather
than by transcribing case analyses; the guarantee that at least one candidate
always survives is checked at runtime and a failure - which the underlying
theory rules out - is reported as a bug with a full state dump.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graph import EdgeSet, Graph, degree_in, is_feasible
from .trails import Trail, concat, is_augmenting

TIEBREAK_FIRST_EDGE = "first_edge"
TIEBREAK_WHOLE_CHUNK = "whole_chunk"


class PreconditionError(ValueError):
    """Inputs do not satisfy the construction's entry conditions."""


class ConstructionError(RuntimeError):
    """A property the theory guarantees failed to hold; indicates a bug (or a
    violated precondition) and carries a serialized state dump."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}

    def __str__(self) -> str:
        base = super().__str__()
        if self.dump:
            return f"{base}\nstate dump: {json.dumps(self.dump, sort_keys=True)}"
        return base


@dataclass(frozen=True)
class Chunk:
    """One to three alternating symmetric-difference edges whose consecutive
    pairs close triangles of ``apx | opt``; ``sides[i]`` is True when edge i
    lies on the apx side."""

    trail: Trail
    sides: tuple[bool, ...]

    @property
    def first_edge(self) -> int:
        return self.trail.edge_ids[0]

    @property
    def last_edge(self) -> int:
        return self.trail.edge_ids[-1]

    def sort_key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return (self.trail.edge_ids, self.trail.nodes)


@dataclass(frozen=True)
class Rejection:
    """A structurally valid chunk eliminated by a state property."""

    chunk: Chunk
    reason: str  # "apx-triangle" | "opt-triangle"


class ConstructionState:
    """Mutable construction state: finished trails (as chunk lists), the trail
    under construction, and the used-edge bookkeeping."""

    def __init__(self, g: Graph, apx: EdgeSet, opt: EdgeSet):
        self.g = g
        self.apx = apx
        self.opt = opt
        self.apx_bits = apx.bits
        self.opt_bits = opt.bits
        self.sym = apx.bits ^ opt.bits
        self.both = apx.bits | opt.bits
        self.q = len(opt) - len(apx)
        self.finished: list[list[Chunk]] = []
        self.finished_trails: list[Trail] = []
        # used-edge prefix after each finished trail, for per-trail checks
        self.finished_used: list[int] = []
        self.current: list[Chunk] = []
        self.current_trail: Trail = Trail.empty()
        self.used_before = 0  # edges of finished trails
        self.used = 0  # used_before plus the current trail

    @classmethod
    def begin(cls, g: Graph, apx: EdgeSet, opt: EdgeSet) -> ConstructionState:
        if not is_feasible(g, apx):
            raise PreconditionError("apx is not a feasible solution")
        if not is_feasible(g, opt):
            raise PreconditionError("opt is not a feasible solution")
        return cls(g, apx, opt)

    # -- queries ----------------------------------------------------------

    def is_deficient(self, u: int, used_bits: int) -> bool:
        inc = self.g.incidence_mask(u)
        return (inc & self.apx_bits & ~used_bits).bit_count() < (
            inc & self.opt_bits & ~used_bits
        ).bit_count()

    def deficient_nodes_wrt(self, used_bits: int) -> set[int]:
        return {
            u
            for u in range(self.g.node_count)
            if self.is_deficient(u, used_bits)
        }

    def edge_side_apx(self, eid: int) -> bool:
        return bool(self.apx_bits >> eid & 1)

    # -- transitions ------------------------------------------------------

    def start_trail(self, chunk: Chunk) -> None:
        if self.current:
            raise ValueError("a trail is already under construction")
        if len(self.finished) >= self.q:
            raise ValueError("all trails already constructed")
        reason = _invariant_rejection(self, chunk)
        if reason is not None:
            raise ConstructionError(
                f"starting chunk violates the {reason} property", dump_state(self)
            )
        self.current = [chunk]
        self.current_trail = chunk.trail
        self.used |= chunk.trail.bits()

    def extend_trail(self, chunk: Chunk) -> None:
        if not self.current:
            raise ValueError("no trail under construction")
        reason = _invariant_rejection(self, chunk)
        if reason is not None:
            raise ConstructionError(
                f"extension chunk violates the {reason} property", dump_state(self)
            )
        self.current_trail = concat(self.current_trail, chunk.trail)
        self.current.append(chunk)
        self.used |= chunk.trail.bits()

    def close_trail(self, *, final: bool = False) -> None:
        trail = self.current_trail
        if not self.current:
            raise ValueError("no trail under construction")
        if not is_augmenting(self.g, trail, self.apx):
            raise ConstructionError(
                "attempt to close a non-augmenting trail", dump_state(self)
            )
        if not final and not self.is_deficient(trail.last_node, self.used_before):
            raise ConstructionError(
                "attempt to close a trail whose last node is not deficient",
                dump_state(self),
            )
        self.finished.append(self.current)
        self.finished_trails.append(trail)
        self.used_before = self.used_before | trail.bits()
        self.finished_used.append(self.used_before)
        self.current = []
        self.current_trail = Trail.empty()
        self.used = self.used_before


def dump_state(state: ConstructionState, extra: dict | None = None) -> dict:
    """JSON-serializable snapshot for error reports and shrinking."""
    dump = {
        "node_count": state.g.node_count,
        "edges": [list(e) for e in state.g.edges],
        "apx": sorted(state.apx),
        "opt": sorted(state.opt),
        "finished": [t.format_walk() for t in state.finished_trails],
        "current": state.current_trail.format_walk(),
        "target_trails": state.q,
    }
    if extra:
        dump.update(extra)
    return dump


def check_preconditions(g: Graph, apx: EdgeSet, opt: EdgeSet) -> bool:
    """True iff opt is strictly larger than apx and dominates its degree at
    every node.  Raises on infeasible inputs."""
    if not is_feasible(g, apx):
        raise PreconditionError("apx is not a feasible solution")
    if not is_feasible(g, opt):
        raise PreconditionError("opt is not a feasible solution")
    if len(opt) <= len(apx):
        return False
    return all(
        degree_in(g, u, apx) <= degree_in(g, u, opt) for u in range(g.node_count)
    )


def deficient_nodes(state: ConstructionState, used: EdgeSet | int) -> set[int]:
    """Nodes with strictly fewer apx- than opt-edges once ``used`` edges are
    deleted from both sides."""
    used_bits = used if isinstance(used, int) else used.bits
    return state.deficient_nodes_wrt(used_bits)


def _triangle_probe(g: Graph, set_bits: int, probe_bits: int) -> tuple[int, int, int] | None:
    """A triangle of ``set_bits`` containing a probe edge, if any.

    Probe edges are the ones just added, so scanning them is a complete
    triangle check whenever the pre-update set was triangle-free.
    """
    rem = probe_bits
    while rem:
        low = rem & -rem
        rem ^= low
        u, v = g.edges[low.bit_length() - 1]
        nbr_v = g.neighbors(v)
        for w, eid_uw in g.neighbors(u).items():
            if w == v or not set_bits >> eid_uw & 1:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is not None and set_bits >> eid_vw & 1:
                return tuple(sorted((u, v, w)))  # type: ignore[return-value]
    return None


def _invariant_rejection(state: ConstructionState, chunk: Chunk) -> str | None:
    """Which state property (if any) rules the chunk out.

    Structural requirements (free edges, alternation, chunk triangles,
    endpoint chaining) are enforced by the enumerator; here the two
    triangle-freeness properties are evaluated.
    """
    cb = chunk.trail.bits()
    trail_after = state.current_trail.bits() | cb
    apx_view = state.apx_bits ^ trail_after
    if _triangle_probe(state.g, apx_view, cb & state.opt_bits) is not None:
        return "apx-triangle"
    opt_view = state.opt_bits ^ (state.used | cb)
    if _triangle_probe(state.g, opt_view, cb & state.apx_bits) is not None:
        return "opt-triangle"
    return None


def _make_chunk(state: ConstructionState, walk: tuple[int, ...]) -> Chunk:
    trail = Trail.from_walk(state.g, walk)
    sides = tuple(state.edge_side_apx(eid) for eid in trail.edge_ids)
    return Chunk(trail, sides)


def _enumerate_chunks(
    state: ConstructionState, start: int, first_side_apx: bool
) -> list[Chunk]:
    """All structurally valid chunks of free edges starting at ``start`` with
    the given first-edge side: one to three alternating free edges, every
    consecutive pair closing a triangle of ``apx | opt``."""
    g = state.g
    free = state.sym & ~state.used
    both = state.both
    side0 = state.apx_bits if first_side_apx else state.opt_bits
    side1 = state.opt_bits if first_side_apx else state.apx_bits
    out: list[Chunk] = []
    for a, e1 in g.adjacency[start]:
        if not (free >> e1 & 1 and side0 >> e1 & 1):
            continue
        out.append(_make_chunk(state, (start, a)))
        for b, e2 in g.adjacency[a]:
            if e2 == e1 or not (free >> e2 & 1 and side1 >> e2 & 1):
                continue
            closing = g.edge_id(start, b)
            if closing is None or not both >> closing & 1:
                continue
            out.append(_make_chunk(state, (start, a, b)))
            for c, e3 in g.adjacency[b]:
                if e3 in (e1, e2) or not (free >> e3 & 1 and side0 >> e3 & 1):
                    continue
                closing2 = g.edge_id(a, c)
                if closing2 is None or not both >> closing2 & 1:
                    continue
                out.append(_make_chunk(state, (start, a, b, c)))
    return out


def filter_first_chunks(
    state: ConstructionState,
) -> tuple[list[Chunk], list[Rejection]]:
    """Candidate chunks opening a new trail, plus the rejected ones.

    A candidate starts with an opt-only free edge at a node deficient w.r.t.
    the used set and keeps both triangle-freeness properties intact.
    """
    accepted: list[Chunk] = []
    rejected: list[Rejection] = []
    for start in sorted(state.deficient_nodes_wrt(state.used)):
        for chunk in _enumerate_chunks(state, start, first_side_apx=False):
            reason = _invariant_rejection(state, chunk)
            if reason is None:
                accepted.append(chunk)
            else:
                rejected.append(Rejection(chunk, reason))
    accepted.sort(key=Chunk.sort_key)
    return accepted, rejected


def filter_extension_chunks(
    state: ConstructionState,
) -> tuple[list[Chunk], list[Rejection]]:
    """Candidate chunks extending the current trail, plus the rejected ones.

    Candidates chain onto the trail's last node, alternate across the seam,
    use free edges only, and keep both triangle-freeness properties intact.
    """
    trail = state.current_trail
    last_side_apx = state.edge_side_apx(trail.edge_ids[-1])
    accepted: list[Chunk] = []
    rejected: list[Rejection] = []
    for chunk in _enumerate_chunks(
        state, trail.last_node, first_side_apx=not last_side_apx
    ):
        reason = _invariant_rejection(state, chunk)
        if reason is None:
            accepted.append(chunk)
        else:
            rejected.append(Rejection(chunk, reason))
    accepted.sort(key=Chunk.sort_key)
    return accepted, rejected


def _nonempty_or_raise(
    state: ConstructionState, accepted: list[Chunk], rejected: list[Rejection], what: str
) -> list[Chunk]:
    if accepted:
        return accepted
    raise ConstructionError(
        f"no {what} chunk exists; this contradicts the construction guarantee "
        "(implementation bug or violated precondition)",
        dump_state(
            state,
            {
                "rejected_candidates": [
                    {"walk": r.chunk.trail.format_walk(), "reason": r.reason}
                    for r in rejected
                ]
            },
        ),
    )


def candidate_first_chunks(state: ConstructionState) -> list[Chunk]:
    """All valid opening chunks; never empty when the preconditions hold."""
    if state.current:
        raise ValueError("a trail is already under construction")
    if len(state.finished) >= state.q:
        raise PreconditionError("no surplus left: all trails constructed")
    accepted, rejected = filter_first_chunks(state)
    return _nonempty_or_raise(state, accepted, rejected, "opening")


def candidate_extension_chunks(state: ConstructionState) -> list[Chunk]:
    """All valid extension chunks; never empty when the preconditions hold."""
    if not state.current:
        raise ValueError("no trail under construction")
    trail = state.current_trail
    if is_augmenting(state.g, trail, state.apx) and state.is_deficient(
        trail.last_node, state.used_before
    ):
        raise ValueError(
            "trail is augmenting with a deficient last node; close it instead"
        )
    accepted, rejected = filter_extension_chunks(state)
    return _nonempty_or_raise(state, accepted, rejected, "extension")


def _shares_triangle(state: ConstructionState, e1: int, e2: int) -> bool:
    """True iff some triangle of ``apx | opt`` contains both edges."""
    if e1 == e2:
        return False
    a, b = state.g.edges[e1]
    c, d = state.g.edges[e2]
    common = {a, b} & {c, d}
    if len(common) != 1:
        return False
    p = a if b in common else b
    r = c if d in common else d
    closing = state.g.edge_id(p, r)
    return closing is not None and bool(state.both >> closing & 1)


def _count_two_side_triangles(
    state: ConstructionState, eid: int, side_bits: int
) -> int:
    """Triangles of ``apx | opt`` containing the edge with exactly two edges
    on the given side."""
    g = state.g
    both = state.both
    u, v = g.edges[eid]
    nbr_v = g.neighbors(v)
    count = 0
    base = 1 if side_bits >> eid & 1 else 0
    for w, eid_uw in g.neighbors(u).items():
        if w == v or not both >> eid_uw & 1:
            continue
        eid_vw = nbr_v.get(w)
        if eid_vw is None or not both >> eid_vw & 1:
            continue
        side = base + (side_bits >> eid_uw & 1) + (side_bits >> eid_vw & 1)
        if side == 2:
            count += 1
    return count


def _chunk_triangle_count(
    state: ConstructionState, chunk: Chunk, side_bits: int, mode: str
) -> int:
    if mode == TIEBREAK_FIRST_EDGE:
        return _count_two_side_triangles(state, chunk.first_edge, side_bits)
    # whole-chunk variant: distinct qualifying triangles touching any edge
    g = state.g
    seen: set[tuple[int, int, int]] = set()
    for eid in chunk.trail.edge_ids:
        u, v = g.edges[eid]
        nbr_v = g.neighbors(v)
        base = 1 if side_bits >> eid & 1 else 0
        for w, eid_uw in g.neighbors(u).items():
            if w == v or not state.both >> eid_uw & 1:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is None or not state.both >> eid_vw & 1:
                continue
            if base + (side_bits >> eid_uw & 1) + (side_bits >> eid_vw & 1) == 2:
                seen.add(tuple(sorted((u, v, w))))  # type: ignore[arg-type]
    return len(seen)


def _tiebreak(
    state: ConstructionState, candidates: list[Chunk], mode: str
) -> tuple[Chunk, dict]:
    """Select one candidate by the three-rule filter pipeline.

    Rule 1 keeps candidates whose first edge shares an ``apx | opt`` triangle
    with the last committed edge; failing that, rule 2 (after an apx-side
    edge) or rule 3 (after an opt-side edge) keeps the candidates whose first
    edge lies in the fewest triangles with exactly two opt-side (resp.
    apx-side) edges.  Remaining ties go to the smallest edge-id sequence.
    """
    if not candidates:
        raise ValueError("no candidates to choose from")
    trace: dict = {"candidates": len(candidates)}
    pool = candidates
    if state.current:
        last_eid = state.current[-1].trail.edge_ids[-1]
        sharing = [c for c in pool if _shares_triangle(state, c.first_edge, last_eid)]
        if sharing:
            pool = sharing
            trace["rule"] = 1
        else:
            last_is_apx = state.edge_side_apx(last_eid)
            side_bits = state.opt_bits if last_is_apx else state.apx_bits
            counts = [_chunk_triangle_count(state, c, side_bits, mode) for c in pool]
            best = min(counts)
            pool = [c for c, k in zip(pool, counts) if k == best]
            trace["rule"] = 2 if last_is_apx else 3
            trace["min_count"] = best
    else:
        trace["rule"] = "fresh"
    trace["kept"] = len(pool)
    chosen = min(pool, key=Chunk.sort_key)
    trace["chosen"] = chosen.trail.format_walk()
    return chosen, trace


def apply_tiebreak(
    state: ConstructionState,
    candidates: list[Chunk],
    *,
    count_mode: str = TIEBREAK_FIRST_EDGE,
) -> Chunk:
    """Public tie-break entry point; see :func:`_tiebreak` for the rules."""
    chosen, _ = _tiebreak(state, candidates, count_mode)
    return chosen


def check_state_properties(
    state: ConstructionState, *, exempt_last_close: bool = False
) -> list[str]:
    """Re-derive all five maintained properties from scratch.

    Returns human-readable violations (must be empty).  With
    ``exempt_last_close`` the last finished trail's final node may be
    non-deficient, matching the construction's stop condition.
    """
    g = state.g
    violations: list[str] = []
    trails = list(state.finished_trails)
    chunk_lists = list(state.finished)
    if state.current:
        trails.append(state.current_trail)
        chunk_lists.append(state.current)
    prior = 0
    for j, (trail, chunks) in enumerate(zip(trails, chunk_lists)):
        rebuilt = Trail.empty()
        for chunk in chunks:
            ct = chunk.trail
            if not 1 <= len(ct) <= 3:
                violations.append(f"trail {j}: chunk of length {len(ct)}")
            sides = [state.edge_side_apx(e) for e in ct.edge_ids]
            if any(a == b for a, b in zip(sides, sides[1:])):
                violations.append(f"trail {j}: chunk {ct.format_walk()} not alternating")
            for i in range(len(ct) - 1):
                closing = g.edge_id(ct.nodes[i], ct.nodes[i + 2])
                if closing is None or not state.both >> closing & 1:
                    violations.append(
                        f"trail {j}: chunk {ct.format_walk()} pair {i} closes no triangle"
                    )
            try:
                rebuilt = concat(rebuilt, ct)
            except ValueError as exc:
                violations.append(f"trail {j}: chunk concatenation broken: {exc}")
                break
        if rebuilt != trail:
            violations.append(f"trail {j}: stored trail differs from its chunks")
        bits = trail.bits()
        sides = [state.edge_side_apx(e) for e in trail.edge_ids]
        if any(a == b for a, b in zip(sides, sides[1:])):
            violations.append(f"trail {j}: not alternating at a chunk seam")
        if bits & ~state.sym or bits & prior:
            violations.append(f"trail {j}: uses non-free edges")
        is_last = j == len(trails) - 1
        is_current = is_last and bool(state.current)
        if is_current:
            if state.edge_side_apx(trail.edge_ids[0]):
                violations.append("current trail starts with an apx-side edge")
            if not state.is_deficient(trail.first_node, prior):
                violations.append("current trail's first node is not deficient")
        else:
            if not is_augmenting(g, trail, state.apx):
                violations.append(f"trail {j}: finished but not augmenting")
            if not state.is_deficient(trail.first_node, prior):
                violations.append(f"trail {j}: first node not deficient")
            if not (is_last and exempt_last_close) and not state.is_deficient(
                trail.last_node, prior
            ):
                violations.append(f"trail {j}: last node not deficient")
        if _triangles_in(g, state.apx_bits ^ bits):
            violations.append(f"trail {j}: apx^trail contains a triangle")
        prior |= bits
        if _triangles_in(g, state.opt_bits ^ prior):
            violations.append(f"trail {j}: opt^used contains a triangle")
    return violations


def _triangles_in(g: Graph, bits: int) -> bool:
    rem = bits
    while rem:
        low = rem & -rem
        rem ^= low
        u, v = g.edges[low.bit_length() - 1]
        nbr_v = g.neighbors(v)
        for w, eid_uw in g.neighbors(u).items():
            if w == v or not bits >> eid_uw & 1:
                continue
            eid_vw = nbr_v.get(w)
            if eid_vw is not None and bits >> eid_vw & 1:
                return True
    return False


def assert_parity_and_uniqueness(state: ConstructionState) -> list[str]:
    """Diagnostics for the degree and unique-triangle bounds the construction
    relies on; the returned list must stay empty.

    Checks, for every node except the current trail's last node, degree at
    most 2 in both flipped views; the same bound at all nodes for every
    finished trail; and that each current-trail edge lies in at most one
    triangle of either flipped view.
    """
    g = state.g
    violations: list[str] = []
    cur_bits = state.current_trail.bits()
    apx_view = state.apx_bits ^ cur_bits
    opt_view = state.opt_bits ^ state.used
    skip = state.current_trail.last_node if state.current else None
    for u in range(g.node_count):
        if u == skip:
            continue
        if (g.incidence_mask(u) & apx_view).bit_count() > 2:
            violations.append(f"degree of node {u} exceeds 2 in apx^current")
        if (g.incidence_mask(u) & opt_view).bit_count() > 2:
            violations.append(f"degree of node {u} exceeds 2 in opt^used")
    for j, trail in enumerate(state.finished_trails):
        apx_j = state.apx_bits ^ trail.bits()
        opt_j = state.opt_bits ^ state.finished_used[j]
        for u in range(g.node_count):
            if (g.incidence_mask(u) & apx_j).bit_count() > 2:
                violations.append(
                    f"degree of node {u} exceeds 2 in apx^trail[{j}]"
                )
            if (g.incidence_mask(u) & opt_j).bit_count() > 2:
                violations.append(
                    f"degree of node {u} exceeds 2 in opt^used[{j}]"
                )
    for eid in state.current_trail.edge_ids:
        for label, view in (("apx^current", apx_view), ("opt^used", opt_view)):
            if not view >> eid & 1:
                continue
            u, v = g.edges[eid]
            nbr_v = g.neighbors(v)
            tris = 0
            for w, eid_uw in g.neighbors(u).items():
                if w == v or not view >> eid_uw & 1:
                    continue
                eid_vw = nbr_v.get(w)
                if eid_vw is not None and view >> eid_vw & 1:
                    tris += 1
            if tris > 1:
                violations.append(
                    f"edge {eid} lies in {tris} triangles of {label}"
                )
    return violations


def _check_deficiency_persistence(state: ConstructionState, used_bits: int) -> None:
    base = state.deficient_nodes_wrt(0)
    drifted = state.deficient_nodes_wrt(used_bits) - base
    if drifted:
        raise ConstructionError(
            f"nodes {sorted(drifted)} are deficient w.r.t. the used set but "
            "not overall; deficiency persistence is violated",
            dump_state(state),
        )


def _check_parity(state: ConstructionState, *, exempt_last_close: bool = False) -> None:
    violations = assert_parity_and_uniqueness(state)
    violations += check_state_properties(state, exempt_last_close=exempt_last_close)
    if violations:
        raise ConstructionError(
            "maintained-property violation: " + "; ".join(violations),
            dump_state(state, {"violations": violations}),
        )


def construct_trails(
    g: Graph,
    apx: EdgeSet,
    opt: EdgeSet,
    *,
    count_mode: str = TIEBREAK_FIRST_EDGE,
    verify: bool = True,
    on_chunk=None,
) -> list[Trail]:
    """Build ``|opt| - |apx|`` edge-disjoint augmenting trails for apx inside
    ``apx ^ opt``.

    Preconditions: both inputs feasible and opt degree-dominating (checked);
    equal sizes yield the empty list.  ``on_chunk`` receives one dict per
    committed chunk (trail index, chunk edges, filter counts, deficient nodes
    before the commit).  With ``verify`` the degree/unique-triangle bounds
    and deficiency persistence are asserted at every step, and the final
    trails are re-checked independently.
    """
    state = ConstructionState.begin(g, apx, opt)
    if state.q < 0:
        raise PreconditionError("opt is smaller than apx")
    if state.q == 0:
        return []
    if not check_preconditions(g, apx, opt):
        raise PreconditionError("opt does not degree-dominate apx at every node")

    max_steps = 2 * (state.sym.bit_count() + state.q + 1)
    steps = 0
    while True:
        steps += 1
        if steps > max_steps:
            raise ConstructionError(
                "construction did not terminate within the edge budget",
                dump_state(state),
            )
        if not state.current:
            if len(state.finished) == state.q:
                break
            _check_deficiency_persistence(state, state.used)
            deficient_before = sorted(state.deficient_nodes_wrt(state.used))
            candidates = candidate_first_chunks(state)
            chunk, trace = _tiebreak(state, candidates, count_mode)
            state.start_trail(chunk)
        else:
            trail = state.current_trail
            if is_augmenting(g, trail, apx):
                last_deficient = state.is_deficient(
                    trail.last_node, state.used_before
                )
                if len(state.finished) + 1 == state.q:
                    # the stop condition: the final trail closes as soon as
                    # it augments, deficient last node or not
                    _check_deficiency_persistence(state, state.used_before)
                    state.close_trail(final=True)
                    continue
                if last_deficient:
                    _check_deficiency_persistence(state, state.used_before)
                    state.close_trail()
                    continue
            deficient_before = sorted(state.deficient_nodes_wrt(state.used))
            candidates = candidate_extension_chunks(state)
            chunk, trace = _tiebreak(state, candidates, count_mode)
            state.extend_trail(chunk)
        if verify:
            _check_parity(state)
        if on_chunk is not None:
            on_chunk(
                {
                    "trail_index": len(state.finished) + 1,
                    "chunk_edges": list(chunk.trail.edge_ids),
                    "chunk_walk": chunk.trail.format_walk(),
                    "filter_counts": trace,
                    "deficient_nodes_before": deficient_before,
                }
            )

    trails = state.finished_trails
    if verify:
        _check_parity(state, exempt_last_close=True)
        _verify_result(state, trails)
    return trails


def _verify_result(state: ConstructionState, trails: list[Trail]) -> None:
    """Independent re-check of the construction's promises."""
    g = state.g
    if len(trails) != state.q:
        raise ConstructionError(
            f"built {len(trails)} trails, expected {state.q}", dump_state(state)
        )
    seen = 0
    for trail in trails:
        bits = trail.bits()
        if bits & seen:
            raise ConstructionError("trails are not edge-disjoint", dump_state(state))
        seen |= bits
        if bits & ~state.sym:
            raise ConstructionError(
                "a trail leaves the symmetric difference", dump_state(state)
            )
        if not is_augmenting(g, trail, state.apx):
            raise ConstructionError(
                f"constructed trail {trail.format_walk()} is not augmenting",
                dump_state(state),
            )
