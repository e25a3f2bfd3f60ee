from dataclasses import dataclass, field, replace

from .logger import Logger
from .utils import CorpusError, UsageError, read_jsonl


logger = Logger.load(__name__).logger



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class CorpusConfig(object):
    '''
    Description
    --------------------
    chunking parameters

    Instance Attributes
    --------------------
    max_chunk_size : int
        maximum chunk length in characters
    split_punctuation : tuple
        boundary characters, a chunk preferably ends right after one of them
    '''

    max_chunk_size: int = 512
    split_punctuation: tuple = ('.', '!', '?', '\n')

    def __post_init__(self):
        if not isinstance(self.max_chunk_size, int) or self.max_chunk_size < 1:
            raise UsageError(f'max_chunk_size must be a positive integer, not {self.max_chunk_size!r}')
        object.__setattr__(self, 'split_punctuation', tuple(self.split_punctuation))
        if not self.split_punctuation:
            raise UsageError('split_punctuation must not be empty')



@dataclass(frozen=True)
class Document(object):
    doc_id: str
    title: str
    body: str
    source_tag: str = None

    def __post_init__(self):
        if not self.body or not self.body.strip():
            raise CorpusError(f'document {self.doc_id!r} has an empty body')



@dataclass(frozen=True)
class Chunk(object):
    '''
    Description
    --------------------
    minimal retrievable text unit and graph node payload

    Instance Attributes
    --------------------
    chunk_id : str
        '<doc_id>#<position>'
    doc_id : str
        owning document
    position : int
        0-based order within the document
    text : str
        chunk text
    title : str
        title of the owning document
    keywords : tuple
        normalized keywords, filled in during graph construction
    embedding : tuple | None
        embedding values, filled in during graph construction
    '''

    chunk_id: str
    doc_id: str
    position: int
    text: str
    title: str
    keywords: tuple = ()
    embedding: tuple = field(default=None, repr=False)

    @property
    def dim(self):
        return None if self.embedding is None else len(self.embedding)

    def with_payload(self, keywords, embedding):
        return replace(self, keywords=tuple(keywords), embedding=tuple(float(x) for x in embedding))



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def make_chunk_id(doc_id, position):
    return f'{doc_id}#{position}'


def load_documents(records):
    '''
    Description
    ------------
    Builds documents from in-memory records carrying doc_id, title and body.

    Parameters
    ------------
    records : iterable
        dicts, or (line number, dict) pairs as yielded by utils.read_jsonl

    Returns
    ------------
    out : list
        Document objects in input order
    '''
    out, seen = [], {}

    for number, record in enumerate(records, 1):
        if isinstance(record, tuple):
            number, record = record

        missing = [k for k in ('doc_id', 'title', 'body') if k not in record]
        if missing:
            raise CorpusError(f"line {number}: missing field(s) {', '.join(missing)}")

        doc_id, title, body = record['doc_id'], record['title'], record['body']
        if not all(isinstance(x, str) for x in (doc_id, title, body)):
            raise CorpusError(f'line {number}: doc_id, title and body must be strings')

        if doc_id in seen:
            raise CorpusError(f'line {number}: duplicate doc_id {doc_id!r} (first seen on line {seen[doc_id]})')
        seen[doc_id] = number

        try:
            out.append(Document(doc_id, title, body, record.get('source_tag')))
        except CorpusError as e:
            raise CorpusError(f'line {number}: {e}') from e

    return out


def ingest_corpus(path, config=None):
    ''' reads a JSON Lines corpus file; one Document per record, file order kept '''
    documents = load_documents(read_jsonl(path, error=CorpusError))
    logger.info(f'ingested {len(documents)} documents from {path}')
    return documents


def chunk_document(doc, config=None):
    '''
    Description
    ------------
    Splits a document body into ordered chunks. A chunk ends right after the
    latest split character that keeps it within max_chunk_size, or at a hard
    cut of max_chunk_size characters when the window holds no split character.
    Whitespace at chunk boundaries is dropped.

    Parameters
    ------------
    doc : Document
        document to split
    config : CorpusConfig
        chunking parameters, defaults to CorpusConfig()

    Returns
    ------------
    out : list
        Chunk objects with positions 0..n-1
    '''
    config = config or CorpusConfig()
    body, size = doc.body, config.max_chunk_size
    punctuation = set(config.split_punctuation)

    texts, pos, end = [], 0, len(body)

    while pos < end:
        while pos < end and body[pos].isspace():
            pos += 1
        if pos == end:
            break

        if end - pos <= size:
            cut = end
        else:
            window = body[pos:pos + size]
            boundary = max((i for i, ch in enumerate(window) if ch in punctuation), default=-1)
            cut = pos + boundary + 1 if boundary >= 0 else pos + size

        text = body[pos:cut].strip()
        if text:
            texts.append(text)
        pos = cut

    return [
        Chunk(make_chunk_id(doc.doc_id, i), doc.doc_id, i, text, doc.title)
        for i, text in enumerate(texts)
        ]


def chunk_corpus(documents, config=None):
    ''' chunks every document, preserving document order '''
    out = []
    for doc in documents:
        out.extend(chunk_document(doc, config))
    return out
