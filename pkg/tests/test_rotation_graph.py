import json
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from belyi_geodesics.rotation_graph import RotationGraph, degree_check, make_rng, sample_graph


def all_matchings(stubs):
    """Every perfect matching of a list of labels, by recursion on the first label."""
    if not stubs:
        yield ()
        return
    first, rest = stubs[0], stubs[1:]
    for i, other in enumerate(rest):
        for m in all_matchings(rest[:i] + rest[i + 1:]):
            yield ((first, other),) + m


def test_matching_oracle_sizes():
    assert len(list(all_matchings(list(range(6))))) == 15
    assert len(list(all_matchings(list(range(12))))) == 10395


def test_smallest_graph_is_cubic():
    g = sample_graph(1, seed=3)
    assert g.vertex_count == 2
    assert len(g.edges) == 3
    deg = Counter()
    for a, b in g.edges:
        deg[a // 3] += 1
        deg[b // 3] += 1
    assert deg == {0: 3, 1: 3}
    assert degree_check(g)


@pytest.mark.parametrize("n, samples", [(1, 100_000), (2, 100_000)])
def test_matching_is_uniform(n, samples):
    matchings = {m: i for i, m in enumerate(all_matchings(list(range(6 * n))))}
    counts = np.zeros(len(matchings), dtype=np.int64)
    for t in range(samples):
        g = sample_graph(n, rng=make_rng(11, t))
        counts[matchings[tuple(sorted(g.edges))]] += 1
    assert stats.chisquare(counts).pvalue > 0.01
    if n == 1:
        p = 1 / 15
        sigma = np.sqrt(samples * p * (1 - p))
        assert np.all(np.abs(counts - samples * p) < 3 * sigma)


def test_rotation_bit_is_fair():
    ones = 0
    total = 0
    for t in range(2000):
        g = sample_graph(5, rng=make_rng(2, t))
        ones += sum(r[1] != 3 * v + 1 for v, r in enumerate(g.rotation))
        total += g.vertex_count
    assert abs(ones / total - 0.5) < 3 * np.sqrt(0.25 / total)


def test_loops_and_parallel_edges_occur():
    loops = doubles = 0
    for t in range(500):
        g = sample_graph(3, rng=make_rng(4, t))
        pairs = [(a // 3, b // 3) for a, b in g.edges]
        loops += sum(u == v for u, v in pairs)
        doubles += len(pairs) - len(set(pairs))
    assert loops > 0 and doubles > 0


def test_same_seed_same_graph():
    a = sample_graph(100, seed=99)
    b = sample_graph(100, seed=99)
    assert a.edges == b.edges and a.rotation == b.rotation
    assert sample_graph(100, seed=100).edges != a.edges


@given(st.integers(1, 60), st.integers(0, 2**64 - 1))
@settings(max_examples=60, deadline=None)
def test_sampled_graph_invariants(n, seed):
    g = sample_graph(n, seed)
    assert degree_check(g)
    assert len(g.edges) == 3 * n
    assert sum(len(e) for e in g.edges) == 6 * n
    mate = g.mate
    assert all(mate[mate[s]] == s for s in range(6 * n))


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        sample_graph(0)
    with pytest.raises(ValueError):
        make_rng(-1)


def test_degree_check_two_stub_vertex():
    # vertex 1 has only two stubs matched
    g = RotationGraph(2, ((0, 3), (1, 4), (2, 2)), ((0, 1, 2), (3, 4, 5)))
    assert not degree_check(g)
    g = RotationGraph(2, ((0, 3), (1, 4)), ((0, 1, 2), (3, 4)))
    assert not degree_check(g)


def test_degree_check_bad_rotation():
    edges = ((0, 3), (1, 4), (2, 5))
    assert degree_check(RotationGraph(2, edges, ((0, 1, 2), (3, 5, 4))))
    assert not degree_check(RotationGraph(2, edges, ((0, 0, 1), (3, 4, 5))))
    assert not degree_check(RotationGraph(2, edges, ((0, 1, 5), (3, 4, 2))))
    assert not degree_check(RotationGraph(3, edges, ((0, 1, 2), (3, 4, 5))))


def test_json_round_trip(tmp_path):
    g = sample_graph(7, seed=5)
    path = tmp_path / "g.json"
    g.dump(path)
    h = RotationGraph.load(path)
    assert h == g
    assert h.mate == g.mate
    data = json.loads(path.read_text())
    assert set(data) == {"vertex_count", "edges", "rotation"}
    h.dump(tmp_path / "h.json")
    assert (tmp_path / "h.json").read_bytes() == path.read_bytes()


@given(st.integers(1, 40), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_faces_partition_stubs_and_genus(n, seed):
    g = sample_graph(n, seed)
    faces = g.faces()
    assert sorted(s for f in faces for s in f) == list(range(6 * n))
    if _connected(g):
        assert g.genus() >= 0 and g.genus() == int(g.genus())
    assert g.flipped().flipped() == g


def _connected(g):
    seen = {0}
    stack = [0]
    while stack:
        for w in g.neighbors[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == g.vertex_count


def test_k4_genus(k4):
    # planar rotation of K4 has 4 triangular faces; V - E + F = 2
    for flips in range(16):
        g = k4.with_rotation([(flips >> v) & 1 for v in range(4)])
        assert g.genus() in (0, 1)
        assert g.genus() == int(g.genus())
