from dataclasses import dataclass, replace
import numpy as np

from ..logger import Logger
from ..utils import DatasetError, read_jsonl, write_jsonl


logger = Logger.load(__name__).logger



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class QaExample(object):
    '''
    Description
    --------------------
    one multi-document question

    Instance Attributes
    --------------------
    question : str
        question text
    gold_answers : tuple
        accepted answers, none empty
    evidence_chunk_ids : frozenset
        supporting evidence chunks, empty when unknown
    topic_doc_ids : tuple
        documents relevant to the question, distractors included once extended
    '''

    question: str
    gold_answers: tuple
    evidence_chunk_ids: frozenset = frozenset()
    topic_doc_ids: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'gold_answers', tuple(self.gold_answers))
        object.__setattr__(self, 'evidence_chunk_ids', frozenset(self.evidence_chunk_ids or ()))
        object.__setattr__(self, 'topic_doc_ids', tuple(self.topic_doc_ids or ()))
        if not self.question or not self.question.strip():
            raise DatasetError('question must not be empty')
        if not self.gold_answers or not all(isinstance(a, str) and a.strip() for a in self.gold_answers):
            raise DatasetError(f'{self.question!r}: gold answers must be non-empty strings')

    @classmethod
    def from_record(cls, record):
        return cls(
            record['question'],
            record['answers'],
            record.get('evidence_chunk_ids') or (),
            record.get('topic_doc_ids') or (),
            )

    def to_record(self):
        return {
            'question': self.question,
            'answers': list(self.gold_answers),
            'evidence_chunk_ids': sorted(self.evidence_chunk_ids),
            'topic_doc_ids': list(self.topic_doc_ids),
            }



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def load_dataset(path):
    ''' reads question, answers, evidence_chunk_ids and topic_doc_ids records '''
    out = []
    for number, record in read_jsonl(path, error=DatasetError):
        try:
            out.append(QaExample.from_record(record))
        except KeyError as e:
            raise DatasetError(f'{path} line {number}: missing field {e}') from None
        except DatasetError as e:
            raise DatasetError(f'{path} line {number}: {e}') from e
    logger.info(f'loaded {len(out)} questions from {path}')
    return out


def save_dataset(examples, path):
    write_jsonl(path, (x.to_record() for x in examples))


def extend_dataset(examples, corpus_pool, target_topics=12, seed=0):
    '''
    Description
    ------------
    Pads every example's topic documents with randomly drawn distractor
    documents until it lists target_topics documents. True topics are never
    removed, reordered or duplicated.

    Parameters
    ------------
    examples : list
        QaExample objects
    corpus_pool : list
        Document objects to draw distractors from
    target_topics : int
        topic count after extension
    seed : int
        seeds the draws; the same seed gives the same assignment

    Returns
    ------------
    out : list
        extended QaExample objects, input order kept
    '''
    if not isinstance(target_topics, int) or target_topics < 1:
        raise DatasetError(f'target_topics must be a positive integer, not {target_topics!r}')

    pool = sorted({doc.doc_id for doc in corpus_pool})
    rng = np.random.default_rng(seed)
    out = []

    for example in examples:
        topics = list(dict.fromkeys(example.topic_doc_ids))
        needed = target_topics - len(topics)
        if needed <= 0:
            out.append(example)
            continue

        candidates = [doc_id for doc_id in pool if doc_id not in set(topics)]
        if len(candidates) < needed:
            raise DatasetError(
                f'{example.question!r}: needs {needed} distractors but the pool only has {len(candidates)}')

        drawn = rng.choice(len(candidates), size=needed, replace=False)
        out.append(replace(example, topic_doc_ids=tuple(topics + [candidates[i] for i in drawn])))

    return out
