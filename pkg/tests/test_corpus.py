import json
import pytest

from chunkgraph import CorpusConfig, CorpusError, Document, UsageError, chunk_corpus, chunk_document, ingest_corpus, load_documents


def test_ingest_fixture(corpus_path):
    docs = ingest_corpus(corpus_path)
    assert [d.doc_id for d in docs] == ['d1', 'd2', 'd3']
    assert docs[1].title == 'Old Towns'


def test_fixture_chunks_one_sentence_each(corpus_path):
    chunks = chunk_corpus(ingest_corpus(corpus_path), CorpusConfig(max_chunk_size=60))
    assert [c.chunk_id for c in chunks] == ['d1#0', 'd1#1', 'd1#2', 'd2#0', 'd2#1', 'd3#0', 'd3#1']
    assert chunks[4].text == 'Marek Holt also built the Grey Hall of Tessa.'
    assert all(c.title for c in chunks)


def test_chunk_splits_at_latest_punctuation():
    doc = Document('a', 't', 'One two. Three four five! Six.')
    chunks = chunk_document(doc, CorpusConfig(max_chunk_size=26))
    assert [c.text for c in chunks] == ['One two. Three four five!', 'Six.']
    assert [c.position for c in chunks] == [0, 1]


def test_chunk_hard_cut_without_punctuation():
    doc = Document('a', 't', 'abcdefghij')
    assert [c.text for c in chunk_document(doc, CorpusConfig(max_chunk_size=4))] == ['abcd', 'efgh', 'ij']


def test_short_document_is_one_chunk():
    chunks = chunk_document(Document('a', 't', '  Short body.  '))
    assert len(chunks) == 1
    assert chunks[0].text == 'Short body.'
    assert chunks[0].chunk_id == 'a#0'


def test_chunks_never_exceed_limit():
    body = ' '.join(f'Sentence number {i} has words.' for i in range(40))
    chunks = chunk_document(Document('a', 't', body), CorpusConfig(max_chunk_size=70))
    assert all(0 < len(c.text) <= 70 for c in chunks)
    assert ' '.join(c.text for c in chunks) == body


def test_empty_body_rejected():
    with pytest.raises(CorpusError):
        Document('a', 't', '   ')


def test_invalid_config():
    with pytest.raises(UsageError):
        CorpusConfig(max_chunk_size=0)


def test_load_documents_errors():
    with pytest.raises(CorpusError, match='missing'):
        load_documents([{'doc_id': 'a', 'title': 't'}])
    with pytest.raises(CorpusError, match=r"line 2: duplicate doc_id 'a' \(first seen on line 1\)"):
        load_documents([
            {'doc_id': 'a', 'title': 't', 'body': 'x'},
            {'doc_id': 'a', 'title': 't', 'body': 'y'},
            ])


def test_ingest_reports_line_numbers(tmp_path):
    path = tmp_path / 'corpus.jsonl'
    lines = [
        json.dumps({'doc_id': 'a', 'title': 't', 'body': 'x'}),
        json.dumps({'doc_id': 'b', 'title': 't', 'body': ''}),
        ]
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    with pytest.raises(CorpusError, match='line 2'):
        ingest_corpus(str(path))


def test_missing_corpus_file(tmp_path):
    with pytest.raises(CorpusError, match='not found'):
        ingest_corpus(str(tmp_path / 'nope.jsonl'))


def test_ingest_empty_corpus(tmp_path):
    path = tmp_path / 'empty.jsonl'
    path.write_text('', encoding='utf-8')
    assert ingest_corpus(str(path)) == []
    path.write_text('\n\n', encoding='utf-8')
    assert ingest_corpus(str(path)) == []
