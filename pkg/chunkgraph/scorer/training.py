from dataclasses import dataclass, asdict
import networkx as nx
import numpy as np

from ..graph import EdgeAttributes
from ..logger import Logger, log
from ..utils import GraphError, ScorerError, UsageError
from .scorer import ScorerModel


logger = Logger.load(__name__).logger



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class TrainingExample(object):
    '''
    Description
    --------------------
    one (path, candidate) decision with its label

    Instance Attributes
    --------------------
    query : str
        question text
    path_text : str
        traversed chunk texts joined in order
    candidate_text : str
        text of the neighbor being scored
    edge : EdgeAttributes
        edge between the path's last chunk and the candidate
    label : int
        1 if the candidate lies on a shortest path to the target evidence
    candidate_id : str
        chunk_id of the candidate
    current_id : str
        chunk_id of the path's last chunk
    '''

    query: str
    path_text: str
    candidate_text: str
    edge: EdgeAttributes
    label: int
    candidate_id: str = None
    current_id: str = None



@dataclass(frozen=True)
class TrainConfig(object):
    '''
    Description
    --------------------
    training hyperparameters

    Instance Attributes
    --------------------
    lr : float
        Adam step size
    epochs : int
        passes over the examples
    batch_size : int
        examples per update
    seed : int
        seeds initialization and shuffling
    hidden : int
        hidden width H of both networks
    keyword_norm_cap : int
        w_keyword normalization cap
    max_path_chars : int
        the path text keeps its most recent characters up to this limit
    '''

    lr: float = 1e-3
    epochs: int = 10
    batch_size: int = 32
    seed: int = 42
    hidden: int = 256
    keyword_norm_cap: int = 10
    max_path_chars: int = 2048

    def __post_init__(self):
        if self.lr < 0:
            raise UsageError(f'lr must be non-negative, not {self.lr!r}')
        for name in ('epochs', 'batch_size', 'hidden', 'keyword_norm_cap', 'max_path_chars'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise UsageError(f'{name} must be a positive integer, not {value!r}')

    def to_dict(self):
        return asdict(self)



class TextEncoder(object):
    '''
    Description
    --------------------
    Frozen text encoder with a per-instance cache. Accepts a Providers bundle,
    an embedder with an embed method, or a plain callable.

    Instance Attributes
    --------------------
    max_path_chars : int
        path texts keep their most recent characters up to this limit
    '''

    def __init__(self, encoder, max_path_chars=2048):
        if isinstance(encoder, TextEncoder):
            encoder = encoder.embed_fn
        elif hasattr(encoder, 'embedder'):
            encoder = encoder.embedder
        self.echo = {'model_name': getattr(encoder, 'model_name', getattr(encoder, '__name__', 'custom'))}
        self.embed_fn = encoder.embed if hasattr(encoder, 'embed') else encoder
        self.max_path_chars = max_path_chars
        self.cache = {}

    def embed(self, text):
        if text not in self.cache:
            self.cache[text] = np.asarray(self.embed_fn(text), dtype=np.float64)
        return self.cache[text]

    def embed_path(self, path_text):
        return self.embed(truncate_path(path_text, self.max_path_chars))



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def truncate_path(path_text, max_chars):
    ''' keeps the most recent max_chars characters '''
    return path_text[-max_chars:]


def canonical_prefix(g, dist, node):
    ''' shortest path from the seed to node choosing the smallest chunk_id parent at every step '''
    path = [node]
    while dist[path[-1]]:
        current = path[-1]
        path.append(min(v for v in g.neighbors(current) if dist.get(v) == dist[current] - 1))
    return path[::-1]


def generate_training_examples(g, question, evidence_node_ids, negative_cap=8, seed=42):
    '''
    Description
    ------------
    Builds labeled next-hop decisions from the shortest paths between every
    ordered pair of evidence chunks. Every chunk on any shortest path from s
    to t contributes one decision per outgoing shortest-path edge: on-path
    neighbors are positives, its other neighbors outside the current path are
    negatives. Unreachable pairs are skipped with a warning.

    Parameters
    ------------
    g : Cig
        chunk-interaction graph
    question : str
        question text
    evidence_node_ids : iterable
        chunk_ids of the supporting evidence
    negative_cap : int | None
        at most this many negatives per decision, sampled with the seed;
        None keeps them all
    seed : int
        negative sampling seed

    Returns
    ------------
    out : list
        TrainingExample objects, positives before negatives per decision
    '''
    evidence = sorted(set(evidence_node_ids))
    if not evidence:
        raise ScorerError('at least one evidence chunk is required')
    missing = [x for x in evidence if x not in g]
    if missing:
        raise GraphError(f'evidence chunks not in the graph: {missing}')
    if negative_cap is not None and negative_cap < 0:
        raise UsageError(f'negative_cap must be >= 0 or None, not {negative_cap!r}')

    graph = g.to_networkx()
    distances = {}

    def dist_from(node):
        if node not in distances:
            distances[node] = nx.single_source_shortest_path_length(graph, node)
        return distances[node]

    rng = np.random.default_rng(seed)
    decisions = {}

    for s in evidence:
        dist_s = dist_from(s)
        for t in evidence:
            if t == s:
                continue
            if t not in dist_s:
                logger.warning(f'evidence {t!r} is unreachable from {s!r}; pair skipped')
                continue

            dist_t = dist_from(t)
            length = dist_s[t]
            on_dag = sorted(
                (u for u in dist_s if u in dist_t and dist_s[u] + dist_t[u] == length and u != t),
                key=lambda u: (dist_s[u], u),
                )

            for u in on_dag:
                prefix = tuple(canonical_prefix(g, dist_s, u))
                neighbors = g.neighbors(u)
                positives = [w for w in neighbors if dist_s.get(w) == dist_s[u] + 1 and dist_t.get(w) == dist_t[u] - 1]
                negatives = [w for w in neighbors if w not in positives and w not in prefix]
                if negative_cap is not None and len(negatives) > negative_cap:
                    negatives = sorted(rng.choice(negatives, size=negative_cap, replace=False).tolist())

                candidates = decisions.setdefault(prefix, {})
                for w in positives:
                    candidates[w] = 1
                for w in negatives:
                    candidates.setdefault(w, 0)

    out = []
    for prefix, candidates in decisions.items():
        current = prefix[-1]
        path_text = ' '.join(g.nodes[x].text for x in prefix)
        for candidate, label in sorted(candidates.items(), key=lambda p: -p[1]):
            out.append(TrainingExample(
                query=question,
                path_text=path_text,
                candidate_text=g.nodes[candidate].text,
                edge=g.edge(current, candidate),
                label=label,
                candidate_id=candidate,
                current_id=current,
                ))

    logger.debug(f'{len(out)} training examples from {len(evidence)} evidence chunks')
    return out


def encode_examples(examples, encoder):
    ''' stacks (queries, paths, neighbours, features, labels) arrays '''
    queries = np.stack([encoder.embed(x.query) for x in examples])
    paths = np.stack([encoder.embed_path(x.path_text) for x in examples])
    neighbours = np.stack([encoder.embed(x.candidate_text) for x in examples])
    labels = np.array([x.label for x in examples], dtype=np.float64)
    return queries, paths, neighbours, [x.edge for x in examples], labels


def bce_loss(scores, labels):
    ''' mean binary cross-entropy of sigmoid(scores), computed stably '''
    return float(np.mean(np.logaddexp(0.0, scores) - labels * scores))


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def loss_and_gradients(model, queries, paths, neighbours, features, labels):
    scores, caches = model.forward(queries, paths, neighbours, features)
    grad_scores = (sigmoid(scores) - labels) / len(labels)
    return bce_loss(scores, labels), model.backward(caches, grad_scores)


class Adam(object):
    ''' Adam optimizer updating parameter arrays in place '''

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads):
        self.t += 1
        for k, p in self.params.items():
            g = grads[k]
            self.m[k] = self.beta1 * self.m[k] + (1 - self.beta1) * g
            self.v[k] = self.beta2 * self.v[k] + (1 - self.beta2) * g ** 2
            m_hat = self.m[k] / (1 - self.beta1 ** self.t)
            v_hat = self.v[k] / (1 - self.beta2 ** self.t)
            if self.lr:
                p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@log()
def train_scorer(examples, encoder, hyper=None):
    '''
    Description
    ------------
    Trains the scoring head by mini-batch Adam on binary cross-entropy.
    The encoder is frozen. Identical seed and data give bitwise-identical
    parameters.

    Parameters
    ------------
    examples : list
        TrainingExample objects with both labels present
    encoder : Providers | embedder | callable
        frozen text encoder
    hyper : TrainConfig
        hyperparameters

    Returns
    ------------
    model : ScorerModel
        trained model; model.loss_history holds the loss before training and after each epoch
    '''
    hyper = hyper or TrainConfig()
    examples = list(examples)
    if not examples:
        raise ScorerError('cannot train on zero examples')
    if len({x.label for x in examples}) < 2:
        raise ScorerError('training needs both positive and negative examples')

    encoder = TextEncoder(encoder, hyper.max_path_chars)
    queries, paths, neighbours, edges, labels = encode_examples(examples, encoder)

    model = ScorerModel.initialize(
        queries.shape[1], hyper.hidden, hyper.keyword_norm_cap, hyper.seed, encoder.echo)
    features = model.edge_features(edges)
    optimizer = Adam(model.params(), hyper.lr)
    rng = np.random.default_rng(hyper.seed)

    def full_loss():
        scores, _ = model.forward(queries, paths, neighbours, features)
        return bce_loss(scores, labels)

    history = [full_loss()]
    n = len(examples)

    for epoch in range(hyper.epochs):
        order = rng.permutation(n)
        for start in range(0, n, hyper.batch_size):
            batch = order[start:start + hyper.batch_size]
            _, grads = loss_and_gradients(
                model, queries[batch], paths[batch], neighbours[batch], features[batch], labels[batch])
            optimizer.step(grads)
        history.append(full_loss())
        logger.info(f'epoch {epoch + 1}/{hyper.epochs} loss {history[-1]:.6f}')

    model.loss_history = history
    model.check_finite()
    return model


def training_accuracy(model, examples, encoder, max_path_chars=2048):
    ''' share of examples where sign(score) agrees with the label '''
    examples = list(examples)
    if not examples:
        raise ScorerError('no examples to evaluate')
    encoder = TextEncoder(encoder, max_path_chars)
    queries, paths, neighbours, edges, labels = encode_examples(examples, encoder)
    scores, _ = model.forward(queries, paths, neighbours, model.edge_features(edges))
    return float(np.mean((scores > 0) == (labels == 1)))
