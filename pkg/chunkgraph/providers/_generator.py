import re
from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

from . import templates
from ._http import HttpClient
from ._keywords import extract_completion_text
from ..utils import ProviderError


FRAGMENT_SPLIT = re.compile(r'(?<=[.!?])\s+|\n+')
WORD = re.compile(r'\w+')


def content_tokens(text):
    return {w for w in WORD.findall(text.lower()) if w not in ENGLISH_STOP_WORDS}



class OfflineGenerator(object):
    '''
    Description
    --------------------
    Extractive stand-in for an LLM. Answers with the context sentence sharing
    the most content words with the question (first one on ties); an empty
    context yields an empty answer.
    '''

    model_name = 'offline-extractive'
    unknown = 'unknown'

    def answer(self, question, context):
        fragments = [f.strip() for f in FRAGMENT_SPLIT.split(context or '') if f.strip()]
        if not fragments:
            return ''
        wanted = content_tokens(question)
        best = max(range(len(fragments)), key=lambda i: (len(wanted & content_tokens(fragments[i])), -i))
        return fragments[best]

    def answer_no_retrieval(self, question):
        return self.unknown

    def judge(self, question, prediction, golds):
        ''' no opinion; callers fall back to containment '''
        return None



class HttpGenerator(object):

    def __init__(self, cfg):
        self.model_name = cfg.model_name
        self.client = HttpClient(cfg)

    def complete(self, prompt):
        data = self.client.post('completions', {'model': self.model_name, 'prompt': prompt})
        text = (extract_completion_text(data) or '').strip()
        if not text:
            raise ProviderError(f'{self.model_name} returned an empty response')
        return text

    def answer(self, question, context):
        return self.complete(templates.render_qa(question, context))

    def answer_no_retrieval(self, question):
        return self.complete(templates.render_no_retrieval(question))

    def judge(self, question, prediction, golds):
        reply = self.complete(templates.render_judge(question, prediction, golds))
        return reply.lower().startswith('yes')
