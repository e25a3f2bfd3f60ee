import threading
import zlib
import numpy as np
from sklearn.feature_extraction.text import HashingVectorizer

from ._http import HttpClient
from ..utils import ProviderError



class EmbedderBase(object):
    '''
    Description
    --------------------
    Shared dimension bookkeeping. The first vector fixes D; any later vector
    of another length is an error.

    Instance Attributes
    --------------------
    model_name : str
        model identifier echoed into graph and model files
    dim : int | None
        embedding dimension D once known
    '''

    def __init__(self, model_name, dim=None):
        self.model_name = model_name
        self.dim = dim
        self._lock = threading.Lock()


    def embed(self, text):
        if not isinstance(text, str) or not text:
            raise ProviderError('cannot embed empty text')

        vector = np.asarray(self._embed(text), dtype=np.float64)

        if vector.ndim != 1 or vector.size == 0:
            raise ProviderError(f'{self.model_name} returned a malformed embedding')
        if not np.all(np.isfinite(vector)):
            raise ProviderError(f'{self.model_name} returned non-finite values')

        with self._lock:
            if self.dim is None:
                self.dim = vector.size
            elif vector.size != self.dim:
                raise ProviderError(
                    f'{self.model_name} returned dimension {vector.size}, '
                    f'previous vectors had {self.dim}')

        return vector


    def _embed(self, text):
        raise NotImplementedError



class OfflineEmbedder(EmbedderBase):
    '''
    Description
    --------------------
    Deterministic hash-projection embedder:

        counts = HashingVectorizer(analyzer='char_wb', ngram_range=(1, 3),
                                   n_features=4096, alternate_sign=False,
                                   norm=None, lowercase=False)
        matrix = numpy.random.default_rng(crc32(model_name)).standard_normal((4096, D))
        vector = counts @ matrix / ||counts @ matrix||

    Class Attributes
    --------------------
    n_features : int
        hashing buckets
    ngram_range : tuple
        character n-gram sizes
    '''

    n_features = 4096
    ngram_range = (1, 3)
    projections = {}

    def __init__(self, model_name='hash-ngram', dim=64):
        if dim is None or dim < 1:
            raise ProviderError(f'offline embedder needs a positive dimension, not {dim!r}')
        super().__init__(model_name, dim)
        self.vectorizer = self.make_vectorizer()
        self.matrix = self.projection(model_name, dim)


    @classmethod
    def make_vectorizer(cls):
        return HashingVectorizer(
            analyzer='char_wb',
            ngram_range=cls.ngram_range,
            n_features=cls.n_features,
            alternate_sign=False,
            norm=None,
            lowercase=False,
            )


    @classmethod
    def projection(cls, model_name, dim):
        key = (model_name, dim)
        if key not in cls.projections:
            rng = np.random.default_rng(zlib.crc32(model_name.encode('utf-8')))
            matrix = rng.standard_normal((cls.n_features, dim))
            matrix.setflags(write=False)
            cls.projections[key] = matrix
        return cls.projections[key]


    def _embed(self, text):
        counts = self.vectorizer.transform([text])
        vector = np.asarray(counts @ self.matrix).ravel()
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise ProviderError('cannot embed text without characters')
        return vector / norm



class HttpEmbedder(EmbedderBase):

    def __init__(self, cfg):
        super().__init__(cfg.model_name)
        self.client = HttpClient(cfg)

    def _embed(self, text):
        data = self.client.post('embeddings', {'model': self.model_name, 'input': text})
        try:
            if 'data' in data:
                return data['data'][0]['embedding']
            return data['embedding']
        except (KeyError, IndexError, TypeError) as e:
            raise ProviderError(f'unexpected embedding response shape: {str(data)[:200]}') from e
