import numpy as np

from ..logger import Logger
from ..utils import ScorerError, read_container, write_container
from ._mlp import EdgeMlp, ScoreMlp


logger = Logger.load(__name__).logger

FORMAT_VERSION = 1



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

class ScorerModel(object):
    '''
    Description
    --------------------
    Neighbor scoring head over frozen text embeddings. The edge network maps
    the three edge weights into the embedding space; the score network reads
    the concatenation (E_Query, E_Path, E_Neighbour, E_Edge).

    Instance Attributes
    --------------------
    edge_mlp : EdgeMlp
        R^3 -> R^H -> R^D
    score_mlp : ScoreMlp
        R^4D -> R^H -> R^1
    dim : int
        encoder dimension D
    hidden : int
        hidden width H
    keyword_norm_cap : int
        w_keyword is fed as min(w_keyword, cap) / cap
    encoder : dict
        echo of the text encoder the model was trained with
    loss_history : list
        training loss before the first epoch, then after every epoch
    '''

    #╭-------------------------------------------------------------------------╮
    #| Initialize Instance                                                     |
    #╰-------------------------------------------------------------------------╯

    def __init__(self, edge_mlp, score_mlp, keyword_norm_cap=10, encoder=None, loss_history=None):
        if not isinstance(keyword_norm_cap, int) or keyword_norm_cap < 1:
            raise ScorerError(f'keyword_norm_cap must be a positive integer, not {keyword_norm_cap!r}')
        if edge_mlp.n_in != 3:
            raise ScorerError('the edge network takes exactly three inputs')
        if score_mlp.n_in != 4 * edge_mlp.n_out or score_mlp.n_out != 1:
            raise ScorerError('score network shape does not match the edge network')
        if edge_mlp.hidden != score_mlp.hidden:
            raise ScorerError('edge and score networks must share the hidden width')

        self.edge_mlp = edge_mlp
        self.score_mlp = score_mlp
        self.keyword_norm_cap = keyword_norm_cap
        self.encoder = dict(encoder or {})
        self.loss_history = list(loss_history or [])


    #╭-------------------------------------------------------------------------╮
    #| Class Methods                                                           |
    #╰-------------------------------------------------------------------------╯

    @classmethod
    def initialize(cls, dim, hidden=256, keyword_norm_cap=10, seed=42, encoder=None):
        rng = np.random.default_rng(seed)
        return cls(
            EdgeMlp.initialize(3, hidden, dim, rng),
            ScoreMlp.initialize(4 * dim, hidden, 1, rng),
            keyword_norm_cap,
            encoder,
            )


    @classmethod
    def zeros(cls, dim, hidden=256, keyword_norm_cap=10):
        return cls(EdgeMlp.zeros(3, hidden, dim), ScoreMlp.zeros(4 * dim, hidden, 1), keyword_norm_cap)


    @classmethod
    def from_params(cls, params, keyword_norm_cap=10, encoder=None, loss_history=None):
        try:
            edge = EdgeMlp(*(params[f'edge_{k}'] for k in EdgeMlp.names))
            score = ScoreMlp(*(params[f'score_{k}'] for k in ScoreMlp.names))
        except KeyError as e:
            raise ScorerError(f'missing parameter block {e}') from None
        return cls(edge, score, keyword_norm_cap, encoder, loss_history)


    #╭-------------------------------------------------------------------------╮
    #| Properties                                                              |
    #╰-------------------------------------------------------------------------╯

    @property
    def dim(self):
        return self.edge_mlp.n_out

    @property
    def hidden(self):
        return self.edge_mlp.hidden

    @property
    def final_loss(self):
        return self.loss_history[-1] if self.loss_history else None


    #╭-------------------------------------------------------------------------╮
    #| Instance Methods                                                        |
    #╰-------------------------------------------------------------------------╯

    def params(self):
        ''' parameter blocks by name; the arrays are the live parameters '''
        return {**self.edge_mlp.params(), **self.score_mlp.params()}


    def check_finite(self):
        bad = [k for k, v in self.params().items() if not np.all(np.isfinite(v))]
        if bad:
            raise ScorerError(f'non-finite parameters in {bad}')


    def edge_features(self, edges):
        ''' (n, 3) feature rows in the fixed order (w_struc, w_sim, w_keyword_normalized) '''
        cap = self.keyword_norm_cap
        return np.array(
            [[e.w_struc, e.w_sim, min(e.w_keyword, cap) / cap] for e in edges],
            dtype=np.float64,
            ).reshape(-1, 3)


    def forward(self, queries, paths, neighbours, features):
        ''' batched scores plus the caches needed by backward '''
        edge_out, edge_cache = self.edge_mlp.forward(features)
        z = np.concatenate([queries, paths, neighbours, edge_out], axis=1)
        scores, score_cache = self.score_mlp.forward(z)
        return scores.ravel(), (edge_cache, score_cache)


    def backward(self, caches, grad_scores):
        edge_cache, score_cache = caches
        grads, grad_z = self.score_mlp.backward(score_cache, grad_scores.reshape(-1, 1))
        edge_grads, _ = self.edge_mlp.backward(edge_cache, grad_z[:, 3 * self.dim:])
        grads.update(edge_grads)
        return grads


    def copy(self):
        return ScorerModel.from_params(
            {k: v.copy() for k, v in self.params().items()},
            self.keyword_norm_cap, self.encoder, self.loss_history)


    #╭-------------------------------------------------------------------------╮
    #| Magic Methods                                                           |
    #╰-------------------------------------------------------------------------╯

    def __repr__(self):
        return f'ScorerModel(dim={self.dim}, hidden={self.hidden}, keyword_norm_cap={self.keyword_norm_cap})'



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def check_vector(name, vector, dim):
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (dim,):
        raise ScorerError(f'{name} has shape {vector.shape}, the model expects ({dim},)')
    return vector


def embed_edge(model, e):
    ''' E_Edge: the edge network applied to one edge '''
    model.check_finite()
    out, _ = model.edge_mlp.forward(model.edge_features([e]))
    return out[0]


def score_candidate(model, query_emb, path_emb, neighbour_emb, e):
    '''
    Description
    ------------
    Scores one candidate neighbor of the current path.

    Parameters
    ------------
    model : ScorerModel
        scoring head
    query_emb : numpy.ndarray
        E_Query, shape (D,)
    path_emb : numpy.ndarray
        E_Path, shape (D,)
    neighbour_emb : numpy.ndarray
        E_Neighbour, shape (D,)
    e : EdgeAttributes
        edge between the current node and the candidate

    Returns
    ------------
    out : float
        unnormalized score, higher is better
    '''
    vectors = [
        check_vector(name, v, model.dim)
        for name, v in (('query', query_emb), ('path', path_emb), ('neighbour', neighbour_emb))
        ]
    model.check_finite()
    scores, _ = model.forward(*(v.reshape(1, -1) for v in vectors), model.edge_features([e]))
    return float(scores[0])


def save_model(model, path):
    ''' writes the model as a checksummed container with one record per parameter block '''
    model.check_finite()
    header = {
        'dim': model.dim,
        'hidden': model.hidden,
        'keyword_norm_cap': model.keyword_norm_cap,
        'encoder': model.encoder,
        'loss_history': [float(x) for x in model.loss_history],
        }
    records = [
        {'name': name, 'shape': list(value.shape), 'values': value.ravel().tolist()}
        for name, value in model.params().items()
        ]
    checksum = write_container(path, 'scorer', FORMAT_VERSION, header, records)
    logger.info(f'saved scorer to {path} (D={model.dim}, H={model.hidden})')
    return checksum


def load_model(path):
    header, records = read_container(path, 'scorer', FORMAT_VERSION)
    try:
        params = {r['name']: np.array(r['values'], dtype=np.float64).reshape(r['shape']) for r in records}
        model = ScorerModel.from_params(
            params, header['keyword_norm_cap'], header.get('encoder'), header.get('loss_history'))
    except (KeyError, ValueError, TypeError) as e:
        raise ScorerError(f'{path}: inconsistent model file ({e})') from e
    if model.dim != header.get('dim') or model.hidden != header.get('hidden'):
        raise ScorerError(f'{path}: header dimensions do not match the parameter blocks')
    model.check_finite()
    return model
