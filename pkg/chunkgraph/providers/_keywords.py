import ast
import math
import re
import string
from collections import Counter
from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

from . import templates
from ._http import HttpClient
from ..utils import KeywordParseError, ProviderError



#╭-------------------------------------------------------------------------╮
#| Normalization                                                           |
#╰-------------------------------------------------------------------------╯

STRIP_CHARS = string.punctuation + string.whitespace + '–—‘’“”'


def normalize_keyword(keyword):
    ''' lowercase, collapse internal whitespace, strip leading/trailing punctuation '''
    return ' '.join(keyword.lower().split()).strip(STRIP_CHARS)


def finalize_keywords(keywords, limit=None, title=None):
    '''
    Description
    ------------
    Normalizes, drops empties and the document title, deduplicates keeping
    the first occurrence, then truncates.

    Parameters
    ------------
    keywords : iterable
        raw keyword strings
    limit : int | None
        maximum number of keywords to keep
    title : str | None
        document title, never kept as a keyword

    Returns
    ------------
    out : list
        normalized keywords
    '''
    banned = normalize_keyword(title) if title else None
    out, seen = [], set()
    for keyword in keywords:
        keyword = normalize_keyword(keyword)
        if not keyword or keyword == banned or keyword in seen:
            continue
        seen.add(keyword)
        out.append(keyword)
    return out if limit is None else out[:limit]


def parse_keyword_response(raw):
    '''
    Description
    ------------
    Parses an LLM keyword answer such as "['Philipsburg', 'Malakoff']".
    A bracket-free answer is read as a comma separated line.

    Parameters
    ------------
    raw : str
        raw provider response

    Returns
    ------------
    out : list
        keyword strings, not yet normalized
    '''
    text = (raw or '').strip()
    if not text:
        return []

    start, stop = text.find('['), text.rfind(']')
    if start >= 0:
        if stop < start:
            raise KeywordParseError('unterminated keyword list', raw)
        try:
            value = ast.literal_eval(text[start:stop + 1])
        except (ValueError, SyntaxError) as e:
            raise KeywordParseError('unparsable keyword list', raw) from e
        if not isinstance(value, (list, tuple)) or not all(isinstance(x, str) for x in value):
            raise KeywordParseError('keyword list must contain strings only', raw)
        return list(value)

    if '\n' in text.strip():
        raise KeywordParseError('expected a single comma separated line', raw)
    return [x for x in (part.strip() for part in text.split(',')) if x]



#╭-------------------------------------------------------------------------╮
#| Offline Extraction                                                      |
#╰-------------------------------------------------------------------------╯

class OfflineKeywordExtractor(object):
    '''
    Description
    --------------------
    RAKE-style keyword heuristic returning verbatim phrases of the input.
    Candidates are capitalized phrases (names, titles such as
    "John Cecil, 6th Earl of Exeter") and runs of content words delimited by
    stop words and punctuation. Capitalized phrases score double; longer
    phrases score higher; rarer phrases across the fitted corpus score higher.

    Class Attributes
    --------------------
    stop_words : frozenset
        scikit-learn English stop words
    connectors : tuple
        lowercase words allowed inside a capitalized phrase

    Instance Attributes
    --------------------
    document_frequency : collections.Counter
        normalized phrase -> number of fitted texts containing it
    n_documents : int
        number of fitted texts
    '''

    #╭-------------------------------------------------------------------------╮
    #| Class Attributes                                                        |
    #╰-------------------------------------------------------------------------╯

    stop_words = ENGLISH_STOP_WORDS
    connectors = ('of', 'the', 'de', 'van', 'von', 'du', 'da', 'la', 'le')

    _cap = r"[A-Z][\w'\-]*"
    _joined = r'(?:\s+(?:(?:%s)\s+)?%s)*' % ('|'.join(connectors), _cap)
    _ordinal = r'(?:,\s+\d+(?:st|nd|rd|th)\s+%s%s)?' % (_cap, _joined)
    capitalized_pattern = re.compile(r'(?<![\w\-])%s%s%s' % (_cap, _joined, _ordinal))
    token_pattern = re.compile(r"[\w][\w'\-]*")
    boundary_pattern = re.compile(r'[^\w\s\'\-]')


    #╭-------------------------------------------------------------------------╮
    #| Initialize Instance                                                     |
    #╰-------------------------------------------------------------------------╯

    def __init__(self):
        self.document_frequency = Counter()
        self.n_documents = 0


    #╭-------------------------------------------------------------------------╮
    #| Instance Methods                                                        |
    #╰-------------------------------------------------------------------------╯

    def fitted(self, texts):
        ''' returns a new extractor holding corpus-level phrase frequencies; self is left untouched '''
        out = type(self)()
        for text in texts:
            out.n_documents += 1
            out.document_frequency.update({normalize_keyword(p) for p, _ in out.candidates(text)})
        return out


    def idf(self, phrase):
        if not self.n_documents:
            return 1.0
        df = self.document_frequency.get(normalize_keyword(phrase), 0)
        return math.log((1 + self.n_documents) / (1 + df)) + 1


    def is_stop(self, token):
        return token.lower() in self.stop_words


    def trim(self, start, tokens):
        ''' drops stop words at either end of a tokenized span; returns (start, stop) or None '''
        while tokens and self.is_stop(tokens[0].group()):
            tokens = tokens[1:]
        while tokens and self.is_stop(tokens[-1].group()):
            tokens = tokens[:-1]
        if not tokens:
            return None
        return start + tokens[0].start(), start + tokens[-1].end()


    def capitalized_phrases(self, text):
        out = []
        for match in self.capitalized_pattern.finditer(text):
            span = self.trim(match.start(), list(self.token_pattern.finditer(match.group())))
            if span is not None:
                out.append(span)
        return out


    def content_runs(self, text):
        out, pieces, start = [], [], 0
        for match in self.boundary_pattern.finditer(text):
            pieces.append((start, match.start()))
            start = match.end()
        pieces.append((start, len(text)))

        for lo, hi in pieces:
            run = []
            for token in self.token_pattern.finditer(text, lo, hi):
                if self.is_stop(token.group()):
                    if run: out.append((run[0].start(), run[-1].end()))
                    run = []
                else:
                    run.append(token)
            if run: out.append((run[0].start(), run[-1].end()))

        return [
            (lo, hi) for lo, hi in out
            if any(sum(ch.isalpha() for ch in word) >= 3 for word in text[lo:hi].split())
            ]


    def candidates(self, text, capitalized_only=False):
        ''' yields (verbatim phrase, is capitalized) pairs in order of first occurrence '''
        spans = {span: True for span in self.capitalized_phrases(text)}
        if not capitalized_only or not spans:
            for span in self.content_runs(text):
                spans.setdefault(span, False)

        seen = set()
        for (lo, hi), capitalized in sorted(spans.items()):
            phrase = text[lo:hi]
            key = normalize_keyword(phrase)
            if key and key not in seen:
                seen.add(key)
                yield phrase, capitalized


    def rank(self, text, capitalized_only=False):
        scored = []
        for order, (phrase, capitalized) in enumerate(self.candidates(text, capitalized_only)):
            score = (2.0 if capitalized else 1.0) * len(phrase.split()) * self.idf(phrase)
            scored.append((-score, order, phrase))
        return [phrase for _, _, phrase in sorted(scored)]


    def chunk_keywords(self, text, n, title=None):
        return finalize_keywords(self.rank(text), limit=n, title=title)


    def question_keywords(self, question):
        ''' keeps every keyword; question order is preserved '''
        return finalize_keywords(p for p, _ in self.candidates(question, capitalized_only=True))



class HttpKeywordExtractor(object):
    ''' prompts a completion endpoint with the keyword templates '''

    def __init__(self, cfg):
        self.model_name = cfg.model_name
        self.client = HttpClient(cfg)

    def complete(self, prompt):
        data = self.client.post('completions', {'model': self.model_name, 'prompt': prompt})
        return extract_completion_text(data)

    def fitted(self, texts):
        return self

    def chunk_keywords(self, text, n, title=None):
        raw = self.complete(templates.render_chunk_keywords(text))
        return finalize_keywords(parse_keyword_response(raw), limit=n, title=title)

    def question_keywords(self, question):
        raw = self.complete(templates.render_question_keywords(question))
        return finalize_keywords(parse_keyword_response(raw))



def extract_completion_text(data):
    ''' pulls the generated text out of a completion response '''
    try:
        if 'choices' in data:
            return data['choices'][0]['text']
        if 'text' in data:
            return data['text']
        return data['response']
    except (KeyError, IndexError, TypeError) as e:
        raise ProviderError(f'unexpected completion response shape: {str(data)[:200]}') from e
