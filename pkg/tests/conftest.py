import os
import numpy as np
import pytest

from chunkgraph import Chunk, Cig, EdgeAttributes, GraphConfig, Providers, build_cig, ingest_corpus
from chunkgraph.graph import pair_key


FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

# one sentence per chunk for the bundled corpus
FIXTURE_CONFIG = GraphConfig(max_chunk_size=60)


@pytest.fixture
def corpus_path():
    return os.path.join(FIXTURES, 'corpus.jsonl')


@pytest.fixture
def dataset_path():
    return os.path.join(FIXTURES, 'dataset.jsonl')


@pytest.fixture
def providers():
    return Providers.offline(dim=64)


@pytest.fixture
def fixture_graph(corpus_path, providers):
    return build_cig(ingest_corpus(corpus_path), providers, FIXTURE_CONFIG)


@pytest.fixture
def make_chunk():
    def factory(chunk_id, text=None, keywords=(), embedding=None, doc_id=None, position=0):
        return Chunk(
            chunk_id, doc_id or chunk_id, position, text or f'text of {chunk_id}', 'untitled',
            tuple(keywords), None if embedding is None else tuple(float(x) for x in embedding))
    return factory


@pytest.fixture
def make_graph(make_chunk):
    '''
    Builds a Cig from node ids and (a, b) or (a, b, EdgeAttributes) tuples.
    Nodes get seeded random embeddings unless given explicitly.
    '''
    def factory(nodes, edges, dim=4, seed=0, embeddings=None, keywords=None, texts=None):
        rng = np.random.default_rng(seed)
        embeddings, keywords, texts = embeddings or {}, keywords or {}, texts or {}
        chunks = [
            make_chunk(
                x, texts.get(x), keywords.get(x, ()),
                embeddings[x] if x in embeddings else rng.standard_normal(dim))
            for x in nodes
            ]
        attrs = {}
        for edge in edges:
            a, b = edge[:2]
            attrs[pair_key(a, b)] = edge[2] if len(edge) > 2 else EdgeAttributes(w_sim=0.5)
        return Cig(chunks, dict(sorted(attrs.items())))
    return factory
