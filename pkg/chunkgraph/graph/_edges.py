from collections import defaultdict
from dataclasses import dataclass
import numpy as np

from ..utils import GraphError



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class EdgeAttributes(object):
    '''
    Description
    --------------------
    weights of the three interaction types between two chunks

    Instance Attributes
    --------------------
    w_struc : int
        1 when the chunks are consecutive in one document, else 0
    w_sim : float
        cosine similarity in [0, 1] when one chunk is among the other's top-k, else 0
    w_keyword : int
        number of shared keywords when above the threshold, else 0
    shared_keywords : tuple
        the shared keywords, sorted
    '''

    w_struc: int = 0
    w_sim: float = 0.0
    w_keyword: int = 0
    shared_keywords: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'shared_keywords', tuple(self.shared_keywords))
        if self.w_struc not in (0, 1):
            raise GraphError(f'w_struc must be 0 or 1, not {self.w_struc!r}')
        if self.w_sim < 0:
            raise GraphError(f'w_sim must be non-negative, not {self.w_sim!r}')
        if self.w_keyword != len(self.shared_keywords):
            raise GraphError('w_keyword must equal the number of shared keywords')
        if not (self.w_struc or self.w_sim or self.w_keyword):
            raise GraphError('an edge needs at least one non-zero weight')

    @property
    def weights(self):
        return (self.w_struc, self.w_sim, self.w_keyword)

    def merge(self, other):
        ''' combines records of two families for the same pair, each family keeps its own weight '''
        return EdgeAttributes(
            w_struc=max(self.w_struc, other.w_struc),
            w_sim=self.w_sim or other.w_sim,
            w_keyword=self.w_keyword or other.w_keyword,
            shared_keywords=self.shared_keywords or other.shared_keywords,
            )

    def to_dict(self):
        return {
            'w_struc': self.w_struc,
            'w_sim': self.w_sim,
            'w_keyword': self.w_keyword,
            'shared_keywords': list(self.shared_keywords),
            }



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def pair_key(a, b):
    ''' undirected pair, stored once '''
    if a == b:
        raise GraphError(f'self-loop on {a!r}')
    return (a, b) if a < b else (b, a)


def build_structural_edges(chunks_of_one_document):
    ''' links consecutive chunks of one document with w_struc=1 '''
    chunks = list(chunks_of_one_document)
    if not chunks:
        return []

    doc_ids = {c.doc_id for c in chunks}
    if len(doc_ids) > 1:
        raise GraphError(f'structural edges need chunks of one document, got {sorted(doc_ids)}')

    positions = [c.position for c in chunks]
    if any(a >= b for a, b in zip(positions, positions[1:])):
        raise GraphError(f'chunks of {chunks[0].doc_id!r} are not sorted by position')

    return [
        (pair_key(a.chunk_id, b.chunk_id), EdgeAttributes(w_struc=1))
        for a, b in zip(chunks, chunks[1:])
        ]


def embedding_matrix(chunks):
    '''
    Description
    ------------
    Stacks chunk embeddings into a row-normalized matrix.

    Parameters
    ------------
    chunks : list
        Chunk objects carrying embeddings

    Returns
    ------------
    out : numpy.ndarray
        (n, D) matrix of unit rows
    '''
    dims = set()
    for c in chunks:
        if c.embedding is None:
            raise GraphError(f'chunk {c.chunk_id!r} has no embedding')
        dims.add(len(c.embedding))
    if len(dims) > 1:
        raise GraphError(f'embedding dimensions differ across chunks: {sorted(dims)}')

    matrix = np.array([c.embedding for c in chunks], dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0):
        bad = [chunks[i].chunk_id for i in np.flatnonzero(norms == 0)]
        raise GraphError(f'zero embeddings cannot be compared: {bad}')
    return matrix / norms[:, None]


def build_semantic_edges(all_chunks, k):
    '''
    Description
    ------------
    Connects every chunk to its k most similar chunks by cosine similarity.
    Selections are directed; the result is their undirected union. Ties are
    broken by chunk_id. Non-positive similarities produce no edge.

    Parameters
    ------------
    all_chunks : list
        Chunk objects with embeddings of a common dimension
    k : int
        neighbors selected per chunk

    Returns
    ------------
    out : list
        (pair, EdgeAttributes) tuples sorted by pair
    '''
    if not isinstance(k, int) or k < 1:
        raise GraphError(f'semantic top-k must be a positive integer, not {k!r}')

    chunks = sorted(all_chunks, key=lambda c: c.chunk_id)
    if len(chunks) < 2:
        return []

    matrix = embedding_matrix(chunks)
    sims = matrix @ matrix.T
    np.fill_diagonal(sims, -np.inf)
    take = min(k, len(chunks) - 1)

    selected = set()
    for i in range(len(chunks)):
        # stable sort over ascending ids keeps the smaller chunk_id first on ties
        for j in np.argsort(-sims[i], kind='stable')[:take]:
            if sims[i, j] > 0:
                selected.add((min(i, int(j)), max(i, int(j))))

    return [
        (
            (chunks[i].chunk_id, chunks[j].chunk_id),
            EdgeAttributes(w_sim=float(min(sims[i, j], 1.0)))
        )
        for i, j in sorted(selected)
        ]


def build_keyword_edges(all_chunks, threshold):
    ''' connects chunks sharing more than threshold normalized keywords '''
    if not isinstance(threshold, int) or threshold < 0:
        raise GraphError(f'keyword threshold must be a natural number, not {threshold!r}')

    index = defaultdict(set)
    keywords = {}
    for c in all_chunks:
        keywords[c.chunk_id] = set(c.keywords)
        for keyword in c.keywords:
            index[keyword].add(c.chunk_id)

    counts = defaultdict(int)
    for members in index.values():
        members = sorted(members)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                counts[(a, b)] += 1

    out = []
    for (a, b), count in sorted(counts.items()):
        if count > threshold:
            shared = sorted(keywords[a] & keywords[b])
            out.append(((a, b), EdgeAttributes(w_keyword=len(shared), shared_keywords=shared)))
    return out


def merge_edges(*families):
    ''' merges coincident pairs across edge families into one record per pair '''
    merged = {}
    for family in families:
        for pair, attrs in family:
            merged[pair] = merged[pair].merge(attrs) if pair in merged else attrs
    return dict(sorted(merged.items()))
