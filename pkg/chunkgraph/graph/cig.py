from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict
from types import MappingProxyType
import networkx as nx
import numpy as np

from .._corpus import Chunk, CorpusConfig, chunk_corpus
from ..logger import Logger, log
from ..utils import (
    GraphError,
    GraphFormatError,
    ProviderError,
    UsageError,
    read_container,
    write_container,
    )
from ._edges import (
    EdgeAttributes,
    build_keyword_edges,
    build_semantic_edges,
    build_structural_edges,
    merge_edges,
    pair_key,
    )


logger = Logger.load(__name__).logger

FORMAT_VERSION = 1



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class GraphConfig(object):
    '''
    Description
    --------------------
    graph construction parameters

    Instance Attributes
    --------------------
    semantic_top_k : int
        similarity neighbors selected per chunk (k)
    keyword_threshold : int
        a keyword edge needs more than this many shared keywords (T)
    keywords_per_chunk : int
        keywords extracted per chunk
    max_chunk_size : int
        chunking limit in characters
    '''

    semantic_top_k: int = 5
    keyword_threshold: int = 2
    keywords_per_chunk: int = 5
    max_chunk_size: int = 512

    def __post_init__(self):
        for name in ('semantic_top_k', 'keywords_per_chunk', 'max_chunk_size'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise UsageError(f'{name} must be a positive integer, not {value!r}')
        if not isinstance(self.keyword_threshold, int) or self.keyword_threshold < 0:
            raise UsageError(f'keyword_threshold must be a natural number, not {self.keyword_threshold!r}')

    @property
    def corpus_config(self):
        return CorpusConfig(max_chunk_size=self.max_chunk_size)

    def to_dict(self):
        return asdict(self)



class Cig(object):
    '''
    Description
    --------------------
    Immutable chunk-interaction graph. Nodes are chunks, each unordered pair
    of chunks has at most one EdgeAttributes record.

    Instance Attributes
    --------------------
    nodes : mappingproxy
        chunk_id -> Chunk, in corpus order
    edges : mappingproxy
        (chunk_id, chunk_id) sorted pair -> EdgeAttributes
    keyword_index : mappingproxy
        normalized keyword -> frozenset of chunk_ids
    embedding_index : mappingproxy
        chunk_id -> read-only numpy vector
    config : GraphConfig
        parameters the graph was built with
    provider : dict
        {endpoint, model_name, dim} of the providers used to build the graph
    '''

    #╭-------------------------------------------------------------------------╮
    #| Initialize Instance                                                     |
    #╰-------------------------------------------------------------------------╯

    def __init__(self, chunks, edges, config=None, provider=None):
        nodes = {}
        for chunk in chunks:
            if chunk.chunk_id in nodes:
                raise GraphError(f'duplicate chunk_id {chunk.chunk_id!r}')
            nodes[chunk.chunk_id] = chunk

        adjacency = defaultdict(list)
        checked = {}
        for (a, b), attrs in edges.items():
            if a not in nodes or b not in nodes:
                raise GraphError(f'edge ({a!r}, {b!r}) references a missing node')
            if pair_key(a, b) != (a, b):
                raise GraphError(f'edge ({a!r}, {b!r}) is not stored as a sorted pair')
            checked[(a, b)] = attrs
            adjacency[a].append(b)
            adjacency[b].append(a)

        keyword_index = defaultdict(set)
        embedding_index = {}
        for chunk_id, chunk in nodes.items():
            for keyword in chunk.keywords:
                keyword_index[keyword].add(chunk_id)
            if chunk.embedding is not None:
                vector = np.array(chunk.embedding, dtype=np.float64)
                vector.setflags(write=False)
                embedding_index[chunk_id] = vector

        dims = {v.size for v in embedding_index.values()}
        if len(dims) > 1:
            raise GraphError(f'embedding dimensions differ across chunks: {sorted(dims)}')

        self.nodes = MappingProxyType(nodes)
        self.edges = MappingProxyType(checked)
        self.keyword_index = MappingProxyType({k: frozenset(v) for k, v in sorted(keyword_index.items())})
        self.embedding_index = MappingProxyType(embedding_index)
        self.config = config or GraphConfig()
        self.provider = MappingProxyType(dict(provider or {}))
        self._adjacency = MappingProxyType({k: tuple(sorted(v)) for k, v in adjacency.items()})
        self._dim = dims.pop() if dims else None


    #╭-------------------------------------------------------------------------╮
    #| Properties                                                              |
    #╰-------------------------------------------------------------------------╯

    @property
    def dim(self):
        return self._dim

    @property
    def chunks(self):
        return list(self.nodes.values())

    @property
    def chunk_ids(self):
        return list(self.nodes)


    #╭-------------------------------------------------------------------------╮
    #| Instance Methods                                                        |
    #╰-------------------------------------------------------------------------╯

    def neighbors(self, chunk_id):
        ''' neighbor ids sorted ascending '''
        if chunk_id not in self.nodes:
            raise GraphError(f'unknown chunk_id {chunk_id!r}')
        return self._adjacency.get(chunk_id, ())


    def edge(self, a, b):
        ''' EdgeAttributes of (a, b), the same record as (b, a); None without an edge '''
        return self.edges.get(pair_key(a, b))


    def embedding(self, chunk_id):
        try:
            return self.embedding_index[chunk_id]
        except KeyError:
            raise GraphError(f'no embedding for chunk_id {chunk_id!r}') from None


    def edge_counts(self):
        ''' number of edges carrying each family, plus the total '''
        counts = {'structural': 0, 'semantic': 0, 'keyword': 0, 'total': len(self.edges)}
        for attrs in self.edges.values():
            counts['structural'] += bool(attrs.w_struc)
            counts['semantic'] += bool(attrs.w_sim)
            counts['keyword'] += bool(attrs.w_keyword)
        return counts


    def density(self):
        n = len(self.nodes)
        return 0.0 if n < 2 else 2 * len(self.edges) / (n * (n - 1))


    def to_networkx(self):
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        for (a, b), attrs in self.edges.items():
            graph.add_edge(a, b, **attrs.to_dict())
        return graph


    #╭-------------------------------------------------------------------------╮
    #| Magic Methods                                                           |
    #╰-------------------------------------------------------------------------╯

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, chunk_id):
        return chunk_id in self.nodes

    def __eq__(self, other):
        if not isinstance(other, Cig):
            return NotImplemented
        return (
            list(self.nodes.items()) == list(other.nodes.items())
            and dict(self.edges) == dict(other.edges)
            and self.config == other.config
            and dict(self.provider) == dict(other.provider)
            )

    __hash__ = None

    def __repr__(self):
        return f'Cig(nodes={len(self.nodes)}, edges={len(self.edges)}, dim={self.dim})'



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def prepare_chunks(documents, providers, config=None, workers=1):
    '''
    Description
    ------------
    Chunks the documents, then extracts keywords and embeddings for every
    chunk. Provider calls may run on a thread pool; chunk order is kept.

    Parameters
    ------------
    documents : list
        Document objects
    providers : Providers
        backend bundle
    config : GraphConfig
        construction parameters
    workers : int
        provider calls in flight at once

    Returns
    ------------
    out : list
        Chunk objects carrying keywords and embeddings
    '''
    config = config or GraphConfig()
    if not documents:
        raise GraphError('cannot build a graph from zero documents')

    chunks = chunk_corpus(documents, config.corpus_config)
    extractor = providers.keywords.fitted([c.text for c in chunks])

    def enrich(chunk):
        try:
            keywords = extractor.chunk_keywords(chunk.text, config.keywords_per_chunk, title=chunk.title)
            embedding = providers.embedder.embed(chunk.text)
        except ProviderError as e:
            raise ProviderError(f'chunk {chunk.chunk_id}: {e}') from e
        return chunk.with_payload(keywords, embedding)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            out = list(executor.map(enrich, chunks))
    else:
        out = [enrich(c) for c in chunks]

    logger.info(f'prepared {len(out)} chunks from {len(documents)} documents')
    return out


def assemble_cig(chunks, config=None, provider=None):
    ''' builds the three edge families over prepared chunks and merges them '''
    config = config or GraphConfig()

    by_document = defaultdict(list)
    for chunk in chunks:
        by_document[chunk.doc_id].append(chunk)

    structural = []
    for members in by_document.values():
        structural.extend(build_structural_edges(sorted(members, key=lambda c: c.position)))

    semantic = build_semantic_edges(chunks, config.semantic_top_k)
    keyword = build_keyword_edges(chunks, config.keyword_threshold)
    g = Cig(chunks, merge_edges(structural, semantic, keyword), config, provider)

    logger.info(
        f'assembled graph: {len(g)} nodes, {len(structural)} structural, '
        f'{len(semantic)} semantic, {len(keyword)} keyword, {len(g.edges)} merged edges'
        )
    return g


@log()
def build_cig(documents, providers, config=None, workers=1):
    ''' chunks, keyword-extracts and embeds the documents, then assembles the graph '''
    config = config or GraphConfig()
    chunks = prepare_chunks(documents, providers, config, workers)
    return assemble_cig(chunks, config, providers.config.echo())


def save_cig(g, path):
    '''
    Description
    ------------
    Writes the graph as a checksummed container: a header line, one record
    per node in corpus order, then one record per edge in pair order.

    Parameters
    ------------
    g : Cig
        graph to save
    path : str
        destination file

    Returns
    ------------
    checksum : str
        hex SHA-256 of the record lines
    '''
    header = {'dim': g.dim, 'config': g.config.to_dict(), 'provider': dict(g.provider)}

    records = []
    for c in g.nodes.values():
        records.append({
            'type': 'node',
            'chunk_id': c.chunk_id,
            'doc_id': c.doc_id,
            'position': c.position,
            'title': c.title,
            'text': c.text,
            'keywords': list(c.keywords),
            'embedding': None if c.embedding is None else list(c.embedding),
            })
    for (a, b), attrs in g.edges.items():
        records.append(dict(attrs.to_dict(), type='edge', a=a, b=b))

    checksum = write_container(path, 'cig', FORMAT_VERSION, header, records)
    logger.info(f'saved graph to {path} ({len(g)} nodes, {len(g.edges)} edges)')
    return checksum


def load_cig(path):
    ''' reads a graph written by save_cig; the dimension D comes from the file '''
    header, records = read_container(path, 'cig', FORMAT_VERSION)

    try:
        config = GraphConfig(**header['config'])
        chunks, edges = [], {}
        for r in records:
            if r['type'] == 'node':
                embedding = r['embedding']
                chunks.append(Chunk(
                    r['chunk_id'], r['doc_id'], r['position'], r['text'], r['title'],
                    tuple(r['keywords']), None if embedding is None else tuple(float(x) for x in embedding),
                    ))
            elif r['type'] == 'edge':
                edges[(r['a'], r['b'])] = EdgeAttributes(
                    r['w_struc'], float(r['w_sim']), r['w_keyword'], tuple(r['shared_keywords']))
            else:
                raise GraphFormatError(f"{path}: unknown record type {r['type']!r}")
        g = Cig(chunks, edges, config, header.get('provider'))
    except (KeyError, TypeError, UsageError, GraphError) as e:
        raise GraphFormatError(f'{path}: inconsistent graph file ({e})') from e

    if g.dim != header.get('dim'):
        raise GraphFormatError(f"{path}: header dim {header.get('dim')} does not match embeddings ({g.dim})")

    logger.info(f'loaded graph from {path} ({len(g)} nodes, {len(g.edges)} edges, D={g.dim})')
    return g
