import io

import numpy as np
import pytest

from seedwalk import Graph, ParseError, check_seed_reachability, load_edge_list, write_edge_list

from conftest import random_connected_graph


def test_load_path_of_three():
    g = load_edge_list(io.StringIO("0 1\n1 2\n"))
    assert g.n == 3
    assert g.m == 2
    assert [g.degree(v) for v in range(3)] == [1, 2, 1]


def test_duplicate_edges_collapse():
    g = load_edge_list(io.StringIO("a b\nb a\n"))
    assert g.n == 2
    assert g.m == 1
    assert g.duplicates_collapsed == 1


def test_self_loop_rejected():
    with pytest.raises(ParseError, match="self-loop"):
        load_edge_list(io.StringIO("x x\n"))


def test_malformed_line_reports_number():
    with pytest.raises(ParseError, match="line 3"):
        load_edge_list(io.StringIO("a b\nb c\na b c\n"))


def test_empty_input_rejected():
    with pytest.raises(ParseError, match="empty"):
        load_edge_list(io.StringIO("# only a comment\n\n"))


def test_comments_and_blank_lines_skipped():
    g = load_edge_list(io.StringIO("# header\na b\n\nb c\n"))
    assert g.n == 3
    assert g.m == 2


def test_complete_graph_degrees():
    edges = [(u, w) for u in range(4) for w in range(u + 1, 4)]
    g = Graph.from_edges(4, edges)
    assert all(g.degree(v) == 3 for v in range(4))


def test_degree_out_of_range():
    g = load_edge_list(io.StringIO("a b\n"))
    with pytest.raises(ValueError, match="out of range"):
        g.degree(2)
    with pytest.raises(ValueError, match="out of range"):
        g.degree(-1)


def test_from_edges_rejects_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        Graph.from_edges(3, [(0, 0)])


def test_reachability_connected():
    g = load_edge_list(io.StringIO("a b\nb c\nc d\n"))
    assert check_seed_reachability(g, {0}).size == 0


def test_reachability_two_components():
    g = load_edge_list(io.StringIO("a b\nc d\n"))
    unreachable = check_seed_reachability(g, {g.id_of("a")})
    assert sorted(unreachable.tolist()) == [g.id_of("c"), g.id_of("d")]


def test_reachability_isolated_node():
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    assert check_seed_reachability(g, {0}).tolist() == [3]


def test_reachability_empty_seeds():
    g = load_edge_list(io.StringIO("a b\n"))
    with pytest.raises(ValueError, match="empty"):
        check_seed_reachability(g, set())


def test_round_trip_preserves_adjacency():
    rng = np.random.default_rng(3)
    g = random_connected_graph(rng, 60)
    buf = io.StringIO()
    write_edge_list(g, buf)
    g2 = load_edge_list(io.StringIO(buf.getvalue()))
    assert g2.n == g.n
    assert g2.m == g.m
    before = {frozenset((g.labels[u], g.labels[w])) for u in range(g.n) for w in g.neighbors(u)}
    after = {frozenset((g2.labels[u], g2.labels[w])) for u in range(g2.n) for w in g2.neighbors(u)}
    assert before == after


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_random_graph_invariants(seed):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, 80)
    g.validate()
    deg = g.degrees()
    assert deg.sum() == 2 * g.m
    # symmetry by direct scan
    for v in range(g.n):
        for w in g.neighbors(v):
            assert v in g.neighbors(w)


def test_seed_file_sparse_community_indices():
    from seedwalk import load_seed_file

    g = load_edge_list(io.StringIO("a b\nb c\n"))
    s = load_seed_file(io.StringIO("a 0 1\nc 2 0.5\n"), g)
    assert s.l == 3
    assert s.row(g.id_of("a")).tolist() == [1.0, 0.0, 0.0]
    assert s.row(g.id_of("c")).tolist() == [0.0, 0.0, 0.5]


def test_seed_file_errors():
    from seedwalk import load_seed_file

    g = load_edge_list(io.StringIO("a b\n"))
    with pytest.raises(ParseError, match="not in graph"):
        load_seed_file(io.StringIO("zz 0 1\n"), g)
    with pytest.raises(ParseError, match="outside"):
        load_seed_file(io.StringIO("a 0 1.5\n"), g)
    with pytest.raises(ParseError, match="duplicate"):
        load_seed_file(io.StringIO("a 0 1\na 0 0.5\n"), g)
    with pytest.raises(ParseError, match="empty"):
        load_seed_file(io.StringIO("# nothing\n"), g)
