from dataclasses import dataclass, field
import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer

from .logger import Logger
from .scorer import TextEncoder, score_candidate
from .utils import RetrievalError, UsageError


logger = Logger.load(__name__).logger



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class Query(object):
    '''
    Description
    --------------------
    question with its keywords (Q_K) and embedding

    Instance Attributes
    --------------------
    text : str
        question text
    keywords : tuple
        normalized question keywords, possibly empty
    embedding : numpy.ndarray
        question embedding in the graph's space
    '''

    text: str
    keywords: tuple
    embedding: np.ndarray = field(repr=False)

    @classmethod
    def from_text(cls, text, providers):
        if not text or not text.strip():
            raise RetrievalError('question must not be empty')
        return cls(
            text,
            tuple(providers.keywords.question_keywords(text)),
            providers.embedder.embed(text),
            )



@dataclass
class PathState(object):
    ''' the partial chain being expanded from one seed '''

    node_sequence: list
    visited: set
    path_text: str
    path_embedding: np.ndarray = field(default=None, repr=False)

    def append(self, chunk_id, text):
        if chunk_id in self.visited:
            raise RetrievalError(f'{chunk_id!r} is already on the path')
        self.node_sequence.append(chunk_id)
        self.visited.add(chunk_id)
        self.path_text = f'{self.path_text} {text}' if self.path_text else text

    @property
    def current(self):
        return self.node_sequence[-1]



@dataclass(frozen=True)
class EvidenceChain(object):
    '''
    Description
    --------------------
    ordered chunks retrieved from one seed

    Instance Attributes
    --------------------
    seed_id : str
        chunk_id of the seed
    hops : tuple
        (chunk_id, score at selection) pairs; the seed carries None
    max_len : int
        length limit the chain was expanded with
    '''

    seed_id: str
    hops: tuple
    max_len: int

    def __post_init__(self):
        object.__setattr__(self, 'hops', tuple(tuple(h) for h in self.hops))
        if not 1 <= len(self.hops) <= self.max_len:
            raise RetrievalError(f'chain length {len(self.hops)} outside 1..{self.max_len}')
        if self.hops[0] != (self.seed_id, None):
            raise RetrievalError('the first hop must be the seed with no score')

    @property
    def chunk_ids(self):
        return [chunk_id for chunk_id, _ in self.hops]

    @property
    def scores(self):
        return [score for _, score in self.hops]

    def __len__(self):
        return len(self.hops)

    def to_dict(self):
        return {'seed_id': self.seed_id, 'hops': [list(h) for h in self.hops], 'max_len': self.max_len}



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def cosine(a, b):
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    return 0.0 if denom == 0 else float(np.dot(a, b) / denom)


def select_seed_nodes(q, g):
    '''
    Description
    ------------
    Greedy keyword coverage: repeatedly picks the chunk covering the most
    question keywords not yet covered, preferring higher similarity to the
    question and then the smaller chunk_id. Stops once every keyword is
    covered or no chunk covers a remaining one. Without any match, the single
    most similar chunk is the seed.

    Parameters
    ------------
    q : Query
        question
    g : Cig
        chunk-interaction graph

    Returns
    ------------
    out : list
        seed chunk_ids in selection order
    '''
    if not len(g):
        raise RetrievalError('cannot select seeds in an empty graph')
    if g.dim is not None and np.asarray(q.embedding).shape != (g.dim,):
        raise RetrievalError(f'query dimension {np.asarray(q.embedding).shape} does not match graph dimension {g.dim}')

    sims = {chunk_id: cosine(q.embedding, g.embedding(chunk_id)) for chunk_id in g.nodes}
    remaining = set(q.keywords)
    seeds = []

    while remaining:
        coverage = {}
        for keyword in remaining:
            for chunk_id in g.keyword_index.get(keyword, ()):
                coverage.setdefault(chunk_id, set()).add(keyword)
        if not coverage:
            break
        best = min(coverage, key=lambda c: (-len(coverage[c]), -sims[c], c))
        seeds.append(best)
        remaining -= coverage[best]

    if not seeds:
        seeds = [min(sims, key=lambda c: (-sims[c], c))]
        logger.debug(f'no keyword match for {q.text!r}; falling back to the most similar chunk')

    return seeds


def expand_path(seed, q, g, model, max_len, embedder=None, score_fn=None, max_path_chars=2048):
    '''
    Description
    ------------
    Grows one chain from a seed: at every step each unvisited neighbor of the
    last chunk is scored, the best one is appended (first in chunk_id order on
    ties) and the path text is re-embedded.

    Parameters
    ------------
    seed : str
        seed chunk_id
    q : Query
        question
    g : Cig
        chunk-interaction graph
    model : ScorerModel | None
        scoring head, unused when score_fn is given
    max_len : int
        maximum chain length including the seed
    embedder : TextEncoder | Providers | callable | None
        re-embeds the path text; without it the seed's stored embedding is
        used and only a custom score_fn may expand further
    score_fn : callable | None
        score_fn(query_emb, path_emb, neighbour_emb, edge) -> float
    max_path_chars : int
        path text keeps its most recent characters up to this limit

    Returns
    ------------
    out : EvidenceChain
        the expanded chain
    '''
    if seed not in g:
        raise RetrievalError(f'seed {seed!r} is not in the graph')
    if not isinstance(max_len, int) or max_len < 1:
        raise UsageError(f'max_len must be a positive integer, not {max_len!r}')
    if score_fn is None and model is not None:
        score_fn = lambda qe, pe, ne, e: score_candidate(model, qe, pe, ne, e)

    encoder = None
    if embedder is not None:
        encoder = embedder if isinstance(embedder, TextEncoder) else TextEncoder(embedder, max_path_chars)

    def embed_path(state):
        if encoder is not None:
            return encoder.embed_path(state.path_text)
        if len(state.node_sequence) == 1:
            return g.embedding(state.current)
        return None

    state = PathState([seed], {seed}, g.nodes[seed].text)
    state.path_embedding = embed_path(state)
    hops = [(seed, None)]

    while len(hops) < max_len:
        candidates = [w for w in g.neighbors(state.current) if w not in state.visited]
        if not candidates:
            break
        if score_fn is None:
            raise UsageError('expanding past the seed needs a model or a score_fn')
        if state.path_embedding is None and model is not None:
            raise RetrievalError('an embedder is required to score multi-chunk paths')

        scores = [
            float(score_fn(q.embedding, state.path_embedding, g.embedding(w), g.edge(state.current, w)))
            for w in candidates
            ]
        best = int(np.argmax(scores))
        state.append(candidates[best], g.nodes[candidates[best]].text)
        state.path_embedding = embed_path(state)
        hops.append((candidates[best], scores[best]))

    return EvidenceChain(seed, tuple(hops), max_len)


def retrieve_chains(q_text, g, model, providers, max_len=5, max_path_chars=2048):
    ''' extracts Q_K, embeds the question, selects seeds and expands one independent chain per seed '''
    if model is not None and g.dim != model.dim:
        raise RetrievalError(f'graph dimension {g.dim} does not match model dimension {model.dim}')

    q = Query.from_text(q_text, providers)
    if q.embedding.shape != (g.dim,):
        raise RetrievalError(f'provider dimension {q.embedding.shape[0]} does not match graph dimension {g.dim}')

    encoder = TextEncoder(providers, max_path_chars)
    seeds = select_seed_nodes(q, g)
    chains = [expand_path(seed, q, g, model, max_len, embedder=encoder) for seed in seeds]
    logger.debug(f'{len(chains)} chain(s) for {q_text!r}: {[c.chunk_ids for c in chains]}')
    return chains


def tfidf_baseline_retrieve(q_text, chunks, top_n=5):
    '''
    Description
    ------------
    Ranks chunks by TF-IDF cosine similarity to the question, fitted on the
    chunk texts with scikit-learn defaults. Ties go to the smaller chunk_id.

    Parameters
    ------------
    q_text : str
        question
    chunks : list
        Chunk objects
    top_n : int
        number of chunk_ids returned

    Returns
    ------------
    out : list
        chunk_ids, best first
    '''
    chunks = list(chunks)
    if not chunks:
        raise RetrievalError('cannot rank an empty corpus')
    if not isinstance(top_n, int) or top_n < 1:
        raise UsageError(f'top_n must be a positive integer, not {top_n!r}')

    vectorizer = TfidfVectorizer()
    try:
        matrix = vectorizer.fit_transform([c.text for c in chunks])
        scores = (matrix @ vectorizer.transform([q_text]).T).toarray().ravel()
    except ValueError:
        # empty vocabulary
        scores = np.zeros(len(chunks))

    order = sorted(range(len(chunks)), key=lambda i: (-scores[i], chunks[i].chunk_id))
    return [chunks[i].chunk_id for i in order[:top_n]]


def tfidf_chains(q_text, chunks, top_n=5):
    ''' TF-IDF ranking wrapped as single-chunk chains for the shared downstream pipeline '''
    return [EvidenceChain(x, ((x, None),), 1) for x in tfidf_baseline_retrieve(q_text, chunks, top_n)]


def golden_chains(evidence_chunk_ids):
    ''' gold evidence as single-chunk chains, the upper bound of any retriever '''
    return [EvidenceChain(x, ((x, None),), 1) for x in sorted(evidence_chunk_ids)]
