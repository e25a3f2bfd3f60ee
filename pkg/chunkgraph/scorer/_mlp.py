import numpy as np

from ..utils import ScorerError



class TwoLayerMlp(object):
    '''
    Description
    --------------------
    Dense network x -> tanh(x @ w1 + b1) @ w2 + b2 operating on row batches.

    Class Attributes
    --------------------
    prefix : str
        parameter name prefix ('edge' or 'score')

    Instance Attributes
    --------------------
    w1, b1, w2, b2 : numpy.ndarray
        layer parameters of shape (n_in, H), (H,), (H, n_out), (n_out,)
    '''

    prefix = 'mlp'
    names = ('w1', 'b1', 'w2', 'b2')

    def __init__(self, w1, b1, w2, b2):
        self.w1, self.b1, self.w2, self.b2 = (np.array(x, dtype=np.float64) for x in (w1, b1, w2, b2))
        if self.w1.ndim != 2 or self.w2.ndim != 2:
            raise ScorerError(f'{self.prefix} weights must be matrices')
        if self.b1.shape != (self.w1.shape[1],) or self.w2.shape[0] != self.w1.shape[1] or self.b2.shape != (self.w2.shape[1],):
            raise ScorerError(f'{self.prefix} parameter shapes are inconsistent')


    @classmethod
    def initialize(cls, n_in, hidden, n_out, rng):
        ''' scaled normal weights, zero biases '''
        return cls(
            rng.normal(0.0, 1.0 / np.sqrt(n_in), (n_in, hidden)),
            np.zeros(hidden),
            rng.normal(0.0, 1.0 / np.sqrt(hidden), (hidden, n_out)),
            np.zeros(n_out),
            )


    @classmethod
    def zeros(cls, n_in, hidden, n_out):
        return cls(np.zeros((n_in, hidden)), np.zeros(hidden), np.zeros((hidden, n_out)), np.zeros(n_out))


    @property
    def n_in(self):
        return self.w1.shape[0]

    @property
    def hidden(self):
        return self.w1.shape[1]

    @property
    def n_out(self):
        return self.w2.shape[1]


    def params(self):
        return {f'{self.prefix}_{k}': getattr(self, k) for k in self.names}


    def forward(self, x):
        ''' returns (output, cache) for a (batch, n_in) input '''
        h = np.tanh(x @ self.w1 + self.b1)
        return h @ self.w2 + self.b2, (x, h)


    def backward(self, cache, grad_out):
        ''' returns (parameter gradients keyed like params(), input gradient) '''
        x, h = cache
        grad_h = grad_out @ self.w2.T
        grad_a = grad_h * (1.0 - h ** 2)
        grads = {
            f'{self.prefix}_w1': x.T @ grad_a,
            f'{self.prefix}_b1': grad_a.sum(axis=0),
            f'{self.prefix}_w2': h.T @ grad_out,
            f'{self.prefix}_b2': grad_out.sum(axis=0),
            }
        return grads, grad_a @ self.w1.T



class EdgeMlp(TwoLayerMlp):
    ''' (w_struc, w_sim, w_keyword_normalized) -> R^D '''
    prefix = 'edge'



class ScoreMlp(TwoLayerMlp):
    ''' (E_Query, E_Path, E_Neighbour, E_Edge) concatenated -> scalar score '''
    prefix = 'score'
