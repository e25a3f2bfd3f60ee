import zlib
import numpy as np
import pytest
import requests
from sklearn.feature_extraction.text import HashingVectorizer

from chunkgraph import (
    KeywordParseError,
    ProviderConfig,
    ProviderError,
    Providers,
    UsageError,
    embed_text,
    extract_chunk_keywords,
    extract_question_keywords,
    generate_answer,
    generate_answer_no_retrieval,
    )
from chunkgraph.providers import OfflineEmbedder, normalize_keyword, parse_keyword_response, templates
from chunkgraph.providers._http import HttpClient


#╭-------------------------------------------------------------------------╮
#| Embeddings                                                              |
#╰-------------------------------------------------------------------------╯

def test_offline_embedding_matches_published_construction():
    text = 'The Varn Bridge crosses the Elmor River.'
    counts = HashingVectorizer(
        analyzer='char_wb', ngram_range=(1, 3), n_features=4096,
        alternate_sign=False, norm=None, lowercase=False).transform([text])
    matrix = np.random.default_rng(zlib.crc32(b'hash-ngram')).standard_normal((4096, 16))
    expected = np.asarray(counts @ matrix).ravel()
    expected /= np.linalg.norm(expected)

    out = OfflineEmbedder('hash-ngram', 16).embed(text)
    assert out.shape == (16,)
    np.testing.assert_allclose(out, expected, rtol=1e-12, atol=1e-12)


def test_offline_embedding_is_deterministic_and_unit_norm():
    a = embed_text('hello world', ProviderConfig(dim=32))
    b = OfflineEmbedder('hash-ngram', 32).embed('hello world')
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_model_name_changes_projection():
    a = OfflineEmbedder('one', 8).embed('same text')
    b = OfflineEmbedder('two', 8).embed('same text')
    assert not np.allclose(a, b)


def test_empty_text_cannot_be_embedded():
    with pytest.raises(ProviderError):
        embed_text('')
    with pytest.raises(ProviderError):
        OfflineEmbedder().embed('   ')


#╭-------------------------------------------------------------------------╮
#| Keywords                                                                |
#╰-------------------------------------------------------------------------╯

def test_normalize_keyword():
    assert normalize_keyword('  The   Grey Hall. ') == 'the grey hall'
    assert normalize_keyword('"Philipsburg",') == 'philipsburg'


def test_parse_keyword_response():
    assert parse_keyword_response("Answer: ['Philipsburg', 'Malakoff']") == ['Philipsburg', 'Malakoff']
    assert parse_keyword_response('Philipsburg, Malakoff') == ['Philipsburg', 'Malakoff']
    assert parse_keyword_response('') == []
    with pytest.raises(KeywordParseError) as e:
        parse_keyword_response("['unterminated'")
    assert e.value.raw == "['unterminated'"
    with pytest.raises(KeywordParseError):
        parse_keyword_response('[1, 2]')


def test_chunk_keywords_prefer_names():
    text = (
        'John Cecil, 6th Earl of Exeter (15 May 1674 – 24 December 1721), known as Lord Burleigh '
        'from 1678 to 1700, was a British peer and Member of Parliament.'
        )
    out = extract_chunk_keywords(text, n=5)
    assert len(out) <= 5
    assert 'john cecil, 6th earl of exeter' in out
    assert 'lord burleigh' in out
    assert all(k == normalize_keyword(k) for k in out)


def test_chunk_keywords_exclude_title():
    out = extract_chunk_keywords('Old Towns are near Marek Holt.', n=5, title='Old Towns')
    assert 'old towns' not in out
    assert 'marek holt' in out


def test_chunk_keywords_respect_n():
    text = 'Alpha Point met Beta Point and Gamma Point near Delta Point by Epsilon Point.'
    assert len(extract_chunk_keywords(text, n=2)) == 2
    with pytest.raises(UsageError):
        extract_chunk_keywords(text, n=0)


def test_question_keywords():
    assert extract_question_keywords('Who built the Grey Hall of Tessa?') == ['grey hall of tessa']
    assert extract_question_keywords('Which river does the Varn Bridge cross?') == ['varn bridge']
    # without a capitalized phrase the content runs are kept whole
    assert extract_question_keywords('what is copper?') == ['copper']
    assert extract_question_keywords('what is copper used for?') == ['copper used']
    assert extract_question_keywords('is it so?') == []


#╭-------------------------------------------------------------------------╮
#| Generation                                                              |
#╰-------------------------------------------------------------------------╯

def test_offline_answer_picks_overlapping_sentence():
    context = 'Tessa was founded by Marek Holt in 1642. Kestria exports copper.'
    assert generate_answer('Who founded Tessa?', context) == 'Tessa was founded by Marek Holt in 1642.'
    assert generate_answer('Who founded Tessa?', '') == ''


def test_offline_no_retrieval_answer():
    assert generate_answer_no_retrieval('Who founded Tessa?') == 'unknown'


def test_qa_template_shape():
    prompt = templates.render_qa('Q?', 'first\nsecond')
    assert prompt.startswith('Instruction: Given the following question and contexts')
    assert 'Please answer in less than 6 words.' in prompt
    assert prompt.endswith('Question:\nQ?\nContext:\nfirst\nsecond\nAnswer:')
    assert 'Context' not in templates.render_no_retrieval('Q?')


#╭-------------------------------------------------------------------------╮
#| HTTP                                                                    |
#╰-------------------------------------------------------------------------╯

class FakeResponse(object):

    def __init__(self, payload):
        self.payload = payload

    def raise_for_status(self):
        pass

    def json(self):
        return self.payload


def test_http_embedder_retries_then_succeeds(monkeypatch):
    calls = []

    def fake_post(url, json, headers, timeout):
        calls.append((url, json, headers))
        if len(calls) == 1:
            raise requests.ConnectionError('down')
        return FakeResponse({'data': [{'embedding': [0.5, 0.5, 0.0]}]})

    monkeypatch.setattr(requests, 'post', fake_post)
    monkeypatch.setattr('time.sleep', lambda s: None)
    monkeypatch.setenv('CHUNKGRAPH_API_KEY', 'secret')

    providers = Providers.from_config(ProviderConfig(endpoint='http://model.local/', model_name='m'))
    out = providers.embedder.embed('text')

    assert out.tolist() == [0.5, 0.5, 0.0]
    assert len(calls) == 2
    assert calls[-1][0] == 'http://model.local/embeddings'
    assert calls[-1][1] == {'model': 'm', 'input': 'text'}
    assert calls[-1][2] == {'Authorization': 'Bearer secret'}


def test_http_failure_raises_provider_error(monkeypatch):
    def fake_post(url, json, headers, timeout):
        raise requests.Timeout('slow')

    monkeypatch.setattr(requests, 'post', fake_post)
    monkeypatch.setattr('time.sleep', lambda s: None)

    client = HttpClient(ProviderConfig(endpoint='http://model.local', max_retries=2))
    with pytest.raises(ProviderError, match='3 attempt'):
        client.post('completions', {})


def test_http_keywords_and_dimension_check(monkeypatch):
    replies = iter([
        {'choices': [{'text': "['Philipsburg', 'Malakoff']"}]},
        {'embedding': [1.0, 0.0]},
        {'embedding': [1.0, 0.0, 0.0]},
        ])
    monkeypatch.setattr(requests, 'post', lambda url, json, headers, timeout: FakeResponse(next(replies)))

    providers = Providers.from_config(ProviderConfig(endpoint='http://model.local', model_name='m2'))
    assert providers.keywords.question_keywords('When did ...?') == ['philipsburg', 'malakoff']
    providers.embedder.embed('a')
    with pytest.raises(ProviderError, match='dimension'):
        providers.embedder.embed('b')


def test_invalid_provider_config():
    with pytest.raises(UsageError):
        ProviderConfig(timeout=0)
