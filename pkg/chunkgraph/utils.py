import hashlib
import json
import os
from textwrap3 import wrap as wrap_text



#╭-------------------------------------------------------------------------╮
#| Exceptions                                                              |
#╰-------------------------------------------------------------------------╯

class ChunkGraphError(Exception):
    ''' base class for every error raised by chunkgraph '''

    exit_code = 1

    def __init__(self, message):
        super().__init__(message)


class UsageError(ChunkGraphError):
    ''' invalid configuration or flag combination '''
    exit_code = 2


class ProviderError(ChunkGraphError):
    ''' embedding, keyword or generation backend failed '''
    exit_code = 3


class KeywordParseError(ProviderError):
    ''' keyword response could not be parsed into a list '''

    def __init__(self, message, raw):
        super().__init__(f'{message}: {raw!r}')
        self.raw = raw


class DataError(ChunkGraphError):
    ''' input data or artifact is unusable '''
    exit_code = 4


class CorpusError(DataError):
    pass


class DatasetError(DataError):
    pass


class GraphError(DataError):
    pass


class GraphFormatError(DataError):
    ''' graph or model file is corrupt or has an unsupported version '''
    pass


class ScorerError(DataError):
    pass


class RetrievalError(DataError):
    pass


class ContextError(DataError):
    pass


class EvaluationError(DataError):
    ''' evaluation inputs do not line up '''
    pass



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def elapsed_time(seconds):
    out = []
    for k,v in [('days', 86400), ('hours', 3600), ('minutes', 60)]:
        count = int(seconds / v)
        if count > 0:
            out.append(f'{count} {k}')
            seconds -= count * v
    out.append(f'{round(seconds, 2)} seconds')
    return ', '.join(out)


def add_border(text, width=100, fixed_width=False, align='left'):
    '''
    Description
    ----------
    Adds a border around text. Newlines in the text start new lines inside
    the border.

    Parameters
    ----------
    text : str
        text to encase
    width : int
        wrap_text width argument
    fixed_width : bool
        • True -> the width of the border will equal the 'width' argument value.
        • False -> the width of the border is capped at the length of the longest
                   line in the text.
    align : str
        • 'left' -> aligns text along the left margin
        • 'center' -> aligns text in the center between the left and right margins
        • 'right' -> aligns text along the right margin

    Returns
    ----------
    out : str
        text encased within a border
    '''
    lines = []
    for paragraph in text.split('\n'):
        lines.extend(wrap_text(' '.join(paragraph.split()), width) or [''])

    max_width = width if fixed_width else len(max(lines, key=len))
    border = ('-' * (max_width + 2)).join(['+'] * 2)

    if align == 'left':
        content = ['| ' + line.ljust(max_width) + ' |' for line in lines]
    elif align == 'right':
        content = ['| ' + line.rjust(max_width) + ' |' for line in lines]
    elif align == 'center':
        content = ['| ' + line.center(max_width) + ' |' for line in lines]
    else:
        raise ValueError(f"align must be 'left', 'center' or 'right', not {align!r}")

    return '\n'.join([border, '\n'.join(content), border])


def canonical_json(obj):
    ''' compact, key-sorted JSON used wherever bytes must be reproducible '''
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def sha256_text(text):
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


def read_jsonl(path, error=DataError):
    '''
    Description
    ------------
    Yields (line number, record) pairs from a JSON Lines file. Blank lines
    are skipped.

    Parameters
    ------------
    path : str
        file path
    error : type
        exception class raised for a missing file or a malformed line

    Returns
    ------------
    out : generator
        (int, dict) pairs, line numbers starting at 1
    '''
    if not os.path.isfile(path):
        raise error(f'file not found: {path}')

    with open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise error(f'{path} line {number}: malformed record ({e.msg})') from e
            if not isinstance(record, dict):
                raise error(f'{path} line {number}: record must be an object')
            yield number, record


def write_jsonl(path, records):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for record in records:
            f.write(canonical_json(record) + '\n')


def write_container(path, kind, format_version, header, records):
    '''
    Description
    ------------
    Writes a checksummed JSON Lines container. Line 1 is the header, every
    following line is one record. The checksum covers the record lines.

    Parameters
    ------------
    path : str
        destination file
    kind : str
        artifact kind recorded in the header (e.g. 'cig', 'scorer')
    format_version : int
        layout version recorded in the header
    header : dict
        additional header fields
    records : iterable
        JSON-serializable dicts

    Returns
    ------------
    checksum : str
        hex SHA-256 of the record lines
    '''
    lines = [canonical_json(record) for record in records]
    body = ''.join(line + '\n' for line in lines)
    checksum = sha256_text(body)
    head = dict(header, kind=kind, format_version=format_version, checksum=checksum)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(canonical_json(head) + '\n')
        f.write(body)
    return checksum


def read_container(path, kind, format_version):
    ''' inverse of write_container; verifies kind, version and checksum '''
    if not os.path.isfile(path):
        raise GraphFormatError(f'file not found: {path}')

    with open(path, encoding='utf-8') as f:
        first = f.readline()
        body = f.read()

    try:
        header = json.loads(first)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f'{path}: unreadable header') from e

    if not isinstance(header, dict) or header.get('kind') != kind:
        raise GraphFormatError(f'{path}: not a {kind} file')

    if header.get('format_version') != format_version:
        raise GraphFormatError(
            f"{path}: format version {header.get('format_version')} "
            f'is not supported (expected {format_version})')

    if sha256_text(body) != header.get('checksum'):
        raise GraphFormatError(f'{path}: checksum mismatch, file is corrupt')

    try:
        records = [json.loads(line) for line in body.splitlines() if line]
    except json.JSONDecodeError as e:
        raise GraphFormatError(f'{path}: corrupt record') from e

    return header, records
