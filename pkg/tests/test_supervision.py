import logging
import networkx as nx
import numpy as np
import pytest

from chunkgraph import EdgeAttributes, GraphError, ScorerError, generate_training_examples
from chunkgraph.scorer import truncate_path


def decisions(examples):
    return [(x.current_id, x.candidate_id, x.label) for x in examples]


def test_line_with_side_branch(make_graph):
    g = make_graph(
        ['A', 'B', 'C', 'D'],
        [('A', 'B'), ('B', 'C', EdgeAttributes(w_struc=1)), ('A', 'D')],
        texts={'A': 'alpha', 'B': 'beta', 'C': 'gamma', 'D': 'delta'},
        )
    examples = generate_training_examples(g, 'q?', ['A', 'C'])

    assert decisions(examples) == [
        ('A', 'B', 1), ('A', 'D', 0),
        ('B', 'C', 1),
        ('C', 'B', 1),
        ('B', 'A', 1),
        ]
    assert [x.path_text for x in examples] == ['alpha', 'alpha', 'alpha beta', 'gamma', 'gamma beta']
    assert examples[2].edge == EdgeAttributes(w_struc=1)
    assert all(x.query == 'q?' for x in examples)


def test_single_evidence_gives_no_examples(make_graph):
    g = make_graph(['A', 'B', 'C'], [('A', 'B'), ('B', 'C')])
    assert generate_training_examples(g, 'q?', ['A']) == []


def test_diamond_labels_both_branches(make_graph):
    g = make_graph(['A', 'B', 'C', 'D'], [('A', 'B'), ('A', 'C'), ('B', 'D'), ('C', 'D')])
    examples = generate_training_examples(g, 'q?', ['A', 'D'])

    assert all(x.label == 1 for x in examples)
    assert sorted((x.current_id, x.candidate_id) for x in examples) == sorted([
        ('A', 'B'), ('A', 'C'), ('B', 'D'), ('C', 'D'),
        ('D', 'B'), ('D', 'C'), ('B', 'A'), ('C', 'A'),
        ])


def test_negative_cap_samples_deterministically(make_graph):
    leaves = [f'L{i}' for i in range(10)]
    g = make_graph(['A', 'B'] + leaves, [('A', 'B')] + [('A', x) for x in leaves])
    capped = generate_training_examples(g, 'q?', ['A', 'B'], negative_cap=3, seed=1)
    at_a = [x for x in capped if x.current_id == 'A']
    assert [x.label for x in at_a] == [1, 0, 0, 0]
    assert capped == generate_training_examples(g, 'q?', ['A', 'B'], negative_cap=3, seed=1)

    uncapped = generate_training_examples(g, 'q?', ['A', 'B'], negative_cap=None)
    assert sum(x.current_id == 'A' and not x.label for x in uncapped) == 10


def test_random_graphs_match_all_shortest_paths(make_graph):
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 12))
        nodes = [f'n{i:02d}' for i in range(n)]
        nxg = nx.gnp_random_graph(n, 0.35, seed=seed)
        edges = [(nodes[a], nodes[b]) for a, b in nxg.edges()]
        g = make_graph(nodes, edges)
        s, t = sorted(rng.choice(nodes, size=2, replace=False).tolist())

        examples = generate_training_examples(g, 'q?', [s, t], negative_cap=None)
        graph = g.to_networkx()
        if not nx.has_path(graph, s, t):
            assert examples == []
            continue

        expected = set()
        for a, b in ((s, t), (t, s)):
            for path in nx.all_shortest_paths(graph, a, b):
                expected.update(zip(path, path[1:]))

        positives = {(x.current_id, x.candidate_id) for x in examples if x.label}
        assert positives == expected, seed
        for x in examples:
            assert x.edge is g.edge(x.current_id, x.candidate_id)
            assert x.path_text.endswith(g.nodes[x.current_id].text)


def test_unreachable_pair_is_skipped_with_warning(make_graph, caplog):
    g = make_graph(['A', 'B', 'C'], [('A', 'B')])
    with caplog.at_level(logging.WARNING):
        examples = generate_training_examples(g, 'q?', ['A', 'C'])
    assert examples == []
    assert any('unreachable' in r.getMessage() for r in caplog.records)


def test_invalid_evidence(make_graph):
    g = make_graph(['A', 'B'], [('A', 'B')])
    with pytest.raises(ScorerError):
        generate_training_examples(g, 'q?', [])
    with pytest.raises(GraphError):
        generate_training_examples(g, 'q?', ['A', 'Z'])


def test_truncate_path_keeps_recent_characters():
    assert truncate_path('abcdef', 4) == 'cdef'
    assert truncate_path('abc', 10) == 'abc'
