import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trifree.construct import (
    ConstructionState,
    PreconditionError,
    TIEBREAK_WHOLE_CHUNK,
    _make_chunk,
    _tiebreak,
    apply_tiebreak,
    assert_parity_and_uniqueness,
    candidate_extension_chunks,
    candidate_first_chunks,
    check_preconditions,
    check_state_properties,
    construct_trails,
    deficient_nodes,
    filter_extension_chunks,
)
from trifree.graph import EdgeSet, Graph, is_feasible
from trifree.oracle import exact_max_tiebreak
from trifree.search import maximal_solve
from trifree.trails import is_augmenting
from trifree.generate import gnp


def pendants_pair():
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])
    apx = EdgeSet.of(g, [3, 0, 4])
    opt = EdgeSet.of(g, [1, 2, 3, 4])
    return g, apx, opt


def k4_dead_end_pair():
    """K4-based state where a 1-edge extension would re-create a triangle in
    the flipped opt view; only the longer chunk survives the filter."""
    g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    apx = EdgeSet.of(g, [3, 4])  # {12, 13}
    opt = EdgeSet.of(g, [0, 4, 5])  # {01, 13, 23}
    return g, apx, opt


def tiebreak_pair():
    """Six-node configuration where the trail ends at node 3 after an
    apx-side edge and two opt-side continuations exist: edge 3-1 closes a
    triangle with two opt edges, edge 3-5 closes none."""
    g = Graph(6, [(1, 3), (3, 5), (1, 2), (2, 3), (2, 4), (0, 4), (3, 4)])
    apx = EdgeSet.of(g, [6, 3])  # {34, 23}
    opt = EdgeSet.of(g, [5, 0, 1, 2, 4])  # {04, 13, 35, 12, 24}
    return g, apx, opt


def joint_flip_pair():
    """Triangle {0,1,2} with apx = {02} and opt threading 0-1, 1-2 plus two
    pendants; flipping the first two constructed trails together closes the
    triangle."""
    g = Graph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (2, 4)])
    apx = EdgeSet.of(g, [2])
    opt = EdgeSet.of(g, [0, 1, 3, 4])
    return g, apx, opt


class TestPreconditions:
    def test_empty_vs_single_edge(self):
        g = Graph(2, [(0, 1)])
        assert check_preconditions(g, EdgeSet.empty(g), EdgeSet.full(g))

    def test_equal_sets_fail(self, k3):
        m = EdgeSet.of(k3, [0])
        assert not check_preconditions(k3, m, m)

    def test_pendants(self):
        g, apx, opt = pendants_pair()
        assert check_preconditions(g, apx, opt)

    def test_infeasible_raises(self, k3):
        with pytest.raises(PreconditionError):
            check_preconditions(k3, EdgeSet.full(k3), EdgeSet.empty(k3))


class TestDeficientNodes:
    def test_equal_sets(self, k3):
        m = EdgeSet.of(k3, [0])
        state = ConstructionState.begin(k3, m, m)
        assert deficient_nodes(state, EdgeSet.empty(k3)) == set()

    def test_single_opt_edge(self):
        g = Graph(2, [(0, 1)])
        state = ConstructionState.begin(g, EdgeSet.empty(g), EdgeSet.full(g))
        assert deficient_nodes(state, EdgeSet.empty(g)) == {0, 1}

    def test_pendants_only_c(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        assert deficient_nodes(state, EdgeSet.empty(g)) == {2}


class TestFirstChunks:
    def test_single_opt_edge(self):
        g = Graph(2, [(0, 1)])
        state = ConstructionState.begin(g, EdgeSet.empty(g), EdgeSet.full(g))
        walks = [c.trail.nodes for c in candidate_first_chunks(state)]
        assert (0, 1) in walks

    def test_pendants_start_at_c(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        chunks = candidate_first_chunks(state)
        assert all(c.trail.first_node == 2 for c in chunks)
        assert all(c.trail.edge_ids[0] in (1, 2) for c in chunks)
        # the three-edge chunk 2-0-1-2 (edges ca, ab, bc) qualifies
        assert (2, 0, 1) in {c.trail.edge_ids for c in chunks}

    def test_no_surplus_rejected(self, k3):
        m = EdgeSet.of(k3, [0])
        state = ConstructionState.begin(k3, m, m)
        with pytest.raises(PreconditionError):
            candidate_first_chunks(state)


class TestExtensionChunks:
    def test_augmenting_deficient_trail_rejected(self):
        g = Graph(2, [(0, 1)])
        state = ConstructionState.begin(g, EdgeSet.empty(g), EdgeSet.full(g))
        state.start_trail(_make_chunk(state, (0, 1)))
        with pytest.raises(ValueError):
            candidate_extension_chunks(state)

    def test_alternating_c4_opposite_edge(self):
        # alternating square plus a pendant opt edge to leave a surplus;
        # after the opt edge 1-0 the apx edge 0-3 continues the trail
        g = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)])
        apx = EdgeSet.of(g, [1, 3])
        opt = EdgeSet.of(g, [0, 2, 4])
        state = ConstructionState.begin(g, apx, opt)
        state.start_trail(_make_chunk(state, (1, 0)))
        chunks = candidate_extension_chunks(state)
        assert (0, 3) in {c.trail.nodes for c in chunks}

    def test_k4_dead_end_excludes_single_edge(self):
        g, apx, opt = k4_dead_end_pair()
        state = ConstructionState.begin(g, apx, opt)
        state.start_trail(_make_chunk(state, (0, 1)))
        accepted, rejected = filter_extension_chunks(state)
        assert [c.trail.nodes for c in accepted] == [(1, 2, 3)]
        assert [(r.chunk.trail.nodes, r.reason) for r in rejected] == [
            ((1, 2), "opt-triangle")
        ]
        trails = construct_trails(g, apx, opt)
        assert [t.format_walk() for t in trails] == ["0-1-2-3"]


class TestTiebreak:
    def test_single_candidate(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        chunks = candidate_first_chunks(state)
        assert apply_tiebreak(state, chunks[:1]) == chunks[0]

    def test_empty_candidates_rejected(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        with pytest.raises(ValueError):
            apply_tiebreak(state, [])

    def test_triangle_sharing_wins(self):
        # pendants after the first chunk 2-0: both extensions start with edge
        # 0-1 which shares triangle {0,1,2} with the last edge; rule 1 holds
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        state.start_trail(_make_chunk(state, (2, 0)))
        chunks = candidate_extension_chunks(state)
        chosen, trace = _tiebreak(state, chunks, "first_edge")
        assert trace["rule"] == 1
        assert chosen.trail.nodes == (0, 1)

    def test_fewest_two_opt_triangles_wins(self):
        # after ...-4-3 (apx side), candidates 3-1 and 3-5: edge 1-3 lies in
        # the 2-opt-edge triangle {1,2,3}, edge 3-5 in none, so 3-5 wins even
        # though 1-3 has the smaller id
        g, apx, opt = tiebreak_pair()
        state = ConstructionState.begin(g, apx, opt)
        state.start_trail(_make_chunk(state, (0, 4)))
        state.extend_trail(_make_chunk(state, (4, 3)))
        chunks = candidate_extension_chunks(state)
        assert {c.trail.nodes for c in chunks} == {(3, 1), (3, 5)}
        chosen, trace = _tiebreak(state, chunks, "first_edge")
        assert chosen.trail.nodes == (3, 5)
        assert trace["rule"] == 2 and trace["min_count"] == 0

    def test_whole_chunk_mode_also_completes(self):
        for g, apx, opt in (pendants_pair(), tiebreak_pair(), k4_dead_end_pair()):
            trails = construct_trails(g, apx, opt, count_mode=TIEBREAK_WHOLE_CHUNK)
            assert len(trails) == len(opt) - len(apx)


class TestConstructTrails:
    def test_perfect_matching_from_empty(self):
        g = Graph(6, [(0, 1), (2, 3), (4, 5)])
        trails = construct_trails(g, EdgeSet.empty(g), EdgeSet.full(g))
        assert len(trails) == 3
        assert all(len(t) == 1 for t in trails)

    def test_pendants_single_closed_trail(self):
        g, apx, opt = pendants_pair()
        trails = construct_trails(g, apx, opt)
        assert len(trails) == 1
        assert trails[0].is_closed
        assert sorted(trails[0].edge_ids) == [0, 1, 2]

    def test_no_surplus_yields_empty(self, k3):
        apx = maximal_solve(k3, 0)
        opt = exact_max_tiebreak(k3, apx)
        assert construct_trails(k3, apx, opt) == []

    def test_non_dominating_opt_rejected(self):
        # opt larger but moving the degree off node 0
        g = Graph(4, [(0, 1), (1, 2), (2, 3)])
        apx = EdgeSet.of(g, [0])
        opt = EdgeSet.of(g, [1, 2])
        with pytest.raises(PreconditionError):
            construct_trails(g, apx, opt)

    def test_trace_events(self):
        g, apx, opt = pendants_pair()
        events = []
        construct_trails(g, apx, opt, on_chunk=events.append)
        assert len(events) >= 2
        assert events[0]["trail_index"] == 1
        assert events[0]["deficient_nodes_before"] == [2]
        assert all(
            set(e) >= {"trail_index", "chunk_edges", "filter_counts"} for e in events
        )

    def test_joint_flip_can_be_infeasible(self):
        # trails flip individually but not jointly: the witness instance
        g, apx, opt = joint_flip_pair()
        trails = construct_trails(g, apx, opt)
        assert len(trails) == 3
        for t in trails:
            assert is_augmenting(g, t, apx)
        joint = [
            (t1, t2)
            for t1, t2 in itertools.combinations(trails, 2)
            if not is_feasible(g, EdgeSet(g, apx.bits ^ t1.bits() ^ t2.bits()))
        ]
        assert joint, "expected at least one infeasible pairwise flip"

    @pytest.mark.parametrize("seed", range(15))
    def test_postconditions_on_random_instances(self, seed):
        g = gnp(7, 0.5, seed + 100)
        apx = maximal_solve(g, seed) if seed % 3 else EdgeSet.empty(g)
        opt = exact_max_tiebreak(g, apx)
        q = len(opt) - len(apx)
        trails = construct_trails(g, apx, opt)
        assert len(trails) == q
        seen = 0
        for t in trails:
            assert is_augmenting(g, t, apx)
            assert not (t.bits() & seen)
            assert not (t.bits() & ~(apx.bits ^ opt.bits))
            seen |= t.bits()

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_postconditions_on_arbitrary_feasible_apx(self, data):
        # apx need not be maximal: any feasible set with a dominating optimum
        # must yield a full trail family without tripping an assertion
        n = data.draw(st.integers(min_value=2, max_value=7))
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        edges = [p for p in pairs if data.draw(st.booleans())]
        g = Graph(n, edges)
        deg = [0] * n
        chosen = []
        for eid in range(g.edge_count):
            u, v = g.edges[eid]
            if deg[u] < 2 and deg[v] < 2 and data.draw(st.booleans()):
                candidate = EdgeSet.of(g, chosen + [eid])
                if is_feasible(g, candidate):
                    chosen.append(eid)
                    deg[u] += 1
                    deg[v] += 1
        apx = EdgeSet.of(g, chosen)
        opt = exact_max_tiebreak(g, apx)
        q = len(opt) - len(apx)
        trails = construct_trails(g, apx, opt)
        assert len(trails) == q
        seen = 0
        for t in trails:
            assert is_augmenting(g, t, apx)
            assert not (t.bits() & seen)
            seen |= t.bits()


class TestParityDiagnostics:
    def test_fresh_single_edge_trail(self):
        g = Graph(2, [(0, 1)])
        state = ConstructionState.begin(g, EdgeSet.empty(g), EdgeSet.full(g))
        state.start_trail(_make_chunk(state, (0, 1)))
        assert assert_parity_and_uniqueness(state) == []

    def test_pendants_mid_construction(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        state.start_trail(_make_chunk(state, (2, 1)))
        assert assert_parity_and_uniqueness(state) == []

    def test_corrupted_state_reports_violation(self):
        # inject a used edge that no legitimate trail could have taken:
        # the spurious apx edge at node 1 pushes its flipped-opt degree to 3
        g = Graph(5, [(0, 1), (1, 2), (1, 4), (2, 3)])
        apx = EdgeSet.of(g, [2])
        opt = EdgeSet.of(g, [0, 1, 3])
        state = ConstructionState.begin(g, apx, opt)
        state.used_before = state.used = 1 << 2
        violations = assert_parity_and_uniqueness(state)
        assert violations and "node 1" in violations[0]


class TestStateProperties:
    def test_clean_states_pass(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        assert check_state_properties(state) == []
        state.start_trail(_make_chunk(state, (2, 1)))
        assert check_state_properties(state) == []

    def test_apx_side_start_detected(self):
        # force the current trail to open with an apx-side edge
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        chunk = _make_chunk(state, (1, 0))  # edge 0-1 lies in apx
        state.current = [chunk]
        state.current_trail = chunk.trail
        state.used |= chunk.trail.bits()
        violations = check_state_properties(state)
        assert any("apx-side edge" in v for v in violations)

    def test_non_deficient_start_detected(self):
        g, apx, opt = pendants_pair()
        state = ConstructionState.begin(g, apx, opt)
        chunk = _make_chunk(state, (1, 2))  # opt-side edge but node 1 not deficient
        state.current = [chunk]
        state.current_trail = chunk.trail
        state.used |= chunk.trail.bits()
        violations = check_state_properties(state)
        assert any("not deficient" in v for v in violations)
