import functools
from dataclasses import dataclass, asdict

from ._embedder import OfflineEmbedder, HttpEmbedder
from ._generator import OfflineGenerator, HttpGenerator
from ._keywords import OfflineKeywordExtractor, HttpKeywordExtractor
from ..utils import ProviderError, UsageError


OFFLINE = 'offline'



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class ProviderConfig(object):
    '''
    Description
    --------------------
    backend selection and transport settings

    Instance Attributes
    --------------------
    endpoint : str
        base URL of the model service, or 'offline' for the deterministic fallbacks
    model_name : str
        model identifier sent with every request; seeds the offline projection
    timeout : float
        per-request timeout in seconds
    max_retries : int
        retries after a failed request
    api_key_env : str
        environment variable holding the API key
    dim : int
        embedding dimension of the offline embedder
    backoff : float
        initial retry delay in seconds, doubled on every retry
    '''

    endpoint: str = OFFLINE
    model_name: str = 'hash-ngram'
    timeout: float = 30.0
    max_retries: int = 3
    api_key_env: str = 'CHUNKGRAPH_API_KEY'
    dim: int = 64
    backoff: float = 0.5

    def __post_init__(self):
        if not self.timeout or self.timeout <= 0:
            raise UsageError(f'timeout must be positive, not {self.timeout!r}')
        if self.max_retries < 0:
            raise UsageError(f'max_retries must be >= 0, not {self.max_retries!r}')
        if self.is_offline and (not isinstance(self.dim, int) or self.dim < 1):
            raise UsageError(f'dim must be a positive integer, not {self.dim!r}')

    @property
    def is_offline(self):
        return self.endpoint == OFFLINE

    def echo(self):
        ''' identifying fields stored in graph and model headers '''
        return {'endpoint': self.endpoint, 'model_name': self.model_name, 'dim': self.dim}

    def to_dict(self):
        return asdict(self)



class Providers(object):
    '''
    Description
    --------------------
    bundle of the three backends used by the pipeline

    Instance Attributes
    --------------------
    config : ProviderConfig
        configuration the backends were built from
    embedder : OfflineEmbedder | HttpEmbedder
        text -> numpy vector
    keywords : OfflineKeywordExtractor | HttpKeywordExtractor
        chunk and question keyword extraction
    generator : OfflineGenerator | HttpGenerator
        answer generation
    '''

    def __init__(self, config, embedder, keywords, generator):
        self.config = config
        self.embedder = embedder
        self.keywords = keywords
        self.generator = generator


    @classmethod
    def from_config(cls, cfg=None):
        cfg = cfg or ProviderConfig()
        if cfg.is_offline:
            return cls(cfg, OfflineEmbedder(cfg.model_name, cfg.dim), OfflineKeywordExtractor(), OfflineGenerator())
        return cls(cfg, HttpEmbedder(cfg), HttpKeywordExtractor(cfg), HttpGenerator(cfg))


    @classmethod
    def offline(cls, dim=64, model_name='hash-ngram'):
        return cls.from_config(ProviderConfig(model_name=model_name, dim=dim))


    @property
    def dim(self):
        return self.embedder.dim


    def __repr__(self):
        return f'Providers({self.config.endpoint!r}, model={self.config.model_name!r})'



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

@functools.lru_cache(maxsize=None)
def resolve(cfg):
    ''' one Providers bundle per configuration, so dimension checks span calls '''
    return Providers.from_config(cfg)


def embed_text(text, cfg=None):
    ''' returns the embedding of text as a numpy vector of dimension D '''
    return resolve(cfg or ProviderConfig()).embedder.embed(text)


def extract_chunk_keywords(chunk_text, n=5, cfg=None, title=None):
    '''
    Description
    ------------
    Extracts at most n normalized keywords from a chunk.

    Parameters
    ------------
    chunk_text : str
        chunk text
    n : int
        maximum number of keywords
    cfg : ProviderConfig
        backend configuration
    title : str | None
        title of the owning document, never returned as a keyword

    Returns
    ------------
    out : list
        normalized keywords
    '''
    if not chunk_text or not chunk_text.strip():
        raise ProviderError('cannot extract keywords from empty text')
    if n < 1:
        raise UsageError(f'n must be >= 1, not {n!r}')
    return resolve(cfg or ProviderConfig()).keywords.chunk_keywords(chunk_text, n, title=title)


def extract_question_keywords(question, cfg=None):
    ''' extracts every keyword of a question (Q_K); may be empty '''
    if not question or not question.strip():
        raise ProviderError('cannot extract keywords from an empty question')
    return resolve(cfg or ProviderConfig()).keywords.question_keywords(question)


def generate_answer(question, context, cfg=None):
    if not question or not question.strip():
        raise ProviderError('question must not be empty')
    return resolve(cfg or ProviderConfig()).generator.answer(question, context).strip()


def generate_answer_no_retrieval(question, cfg=None):
    if not question or not question.strip():
        raise ProviderError('question must not be empty')
    return resolve(cfg or ProviderConfig()).generator.answer_no_retrieval(question).strip()


def judge_answer(question, prediction, golds, cfg=None):
    ''' True/False from an LLM judge, or None when the backend has no judge '''
    return resolve(cfg or ProviderConfig()).generator.judge(question, prediction, golds)
