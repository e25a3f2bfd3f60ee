from .providers import *
from ._embedder import OfflineEmbedder, HttpEmbedder
from ._keywords import OfflineKeywordExtractor, HttpKeywordExtractor, normalize_keyword, parse_keyword_response
from ._generator import OfflineGenerator, HttpGenerator
from . import templates
