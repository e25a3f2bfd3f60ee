import logging
import pytest

from chunkgraph import ContextError, EvidenceChain, assemble_context, build_qa_prompt


@pytest.fixture
def chains():
    return [
        EvidenceChain('a', (('a', None), ('b', 0.5), ('c', 0.2)), 5),
        EvidenceChain('d', (('d', None), ('b', 0.1)), 5),
        ]


@pytest.fixture
def graph(make_graph):
    return make_graph(
        ['a', 'b', 'c', 'd', 'e'], [('a', 'b'), ('b', 'c'), ('b', 'd')],
        texts={'a': 'Alpha.', 'b': 'Beta.', 'c': 'Gamma.', 'd': 'Delta.', 'e': 'Epsilon.'},
        )


def test_chain_format(chains, graph):
    bundle = assemble_context(chains, graph, 'chain')
    assert bundle.blocks == ('Alpha. Beta. Gamma.', 'Delta.')
    assert bundle.chunk_ids == ['a', 'b', 'c', 'd']
    assert bundle.text == 'Alpha. Beta. Gamma.\nDelta.'


def test_iterative_format_groups_by_hop(chains, graph):
    bundle = assemble_context(chains, graph, 'iterative')
    assert bundle.block_chunk_ids == (('a', 'd'), ('b',), ('c',))
    assert bundle.blocks == ('Alpha. Delta.', 'Beta.', 'Gamma.')


def test_shuffle_format_is_a_seeded_permutation(chains, graph):
    first = assemble_context(chains, graph, 'shuffle', shuffle_seed=3)
    assert sorted(first.chunk_ids) == ['a', 'b', 'c', 'd']
    assert all(len(ids) == 1 for ids in first.block_chunk_ids)
    assert assemble_context(chains, graph, 'shuffle', shuffle_seed=3) == first


def test_formats_hold_the_same_chunks(chains, graph):
    ids = [sorted(assemble_context(chains, graph, f).chunk_ids) for f in ('chain', 'iterative', 'shuffle')]
    assert ids[0] == ids[1] == ids[2]


def test_shuffle_reorders_chain_chunks(make_graph):
    ids = [f'n{i}' for i in range(10)]
    g = make_graph(ids, list(zip(ids, ids[1:])))
    chains = [EvidenceChain('n0', tuple((x, None if i == 0 else 0.5) for i, x in enumerate(ids)), 10)]

    chain = assemble_context(chains, g, 'chain').chunk_ids
    shuffled = assemble_context(chains, g, 'shuffle', shuffle_seed=0).chunk_ids
    assert chain == ids
    assert sorted(shuffled) == sorted(chain)
    assert shuffled != chain


def test_token_budget_keeps_first_block(chains, graph, caplog):
    with caplog.at_level(logging.WARNING):
        bundle = assemble_context(chains, graph, 'chain', token_budget=1)
    assert bundle.blocks == ('Alpha. Beta. Gamma.',)
    assert any('trimmed' in r.getMessage() for r in caplog.records)
    assert assemble_context(chains, graph, 'chain', token_budget=100).blocks == ('Alpha. Beta. Gamma.', 'Delta.')


def test_empty_chains_give_empty_bundle(graph):
    bundle = assemble_context([], graph, 'iterative')
    assert not bundle
    assert bundle.text == ''


def test_context_errors(chains, graph):
    with pytest.raises(ContextError):
        assemble_context(chains, graph, 'sideways')
    with pytest.raises(ContextError):
        assemble_context([EvidenceChain('z', (('z', None),), 1)], graph)
    with pytest.raises(ContextError):
        build_qa_prompt('  ', assemble_context(chains, graph))


def test_qa_prompt_lists_blocks(chains, graph):
    prompt = build_qa_prompt('Which letter?', assemble_context(chains, graph))
    assert 'Question:\nWhich letter?\nContext:\nAlpha. Beta. Gamma.\nDelta.\nAnswer:' in prompt
