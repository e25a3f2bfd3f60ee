''' SQuAD-style answer metrics and the supporting-evidence match rate. '''

import re
import string
from collections import Counter

from ..utils import EvaluationError


ARTICLES = re.compile(r'\b(a|an|the)\b')
PUNCTUATION = set(string.punctuation)



def normalize_answer(s):
    ''' lowercase, strip punctuation, drop articles a/an/the, collapse whitespace '''
    s = s.lower()
    s = ''.join(ch for ch in s if ch not in PUNCTUATION)
    s = ARTICLES.sub(' ', s)
    return ' '.join(s.split())


def _exact(prediction, gold):
    return int(normalize_answer(prediction) == normalize_answer(gold))


def _f1(prediction, gold):
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not pred_tokens or not gold_tokens:
        return float(pred_tokens == gold_tokens)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    num_same = sum(common.values())
    if num_same == 0:
        return 0.0
    precision = num_same / len(pred_tokens)
    recall = num_same / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def _contains(prediction, gold):
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    if not gold_tokens:
        return int(not pred_tokens)
    n = len(gold_tokens)
    return int(any(pred_tokens[i:i + n] == gold_tokens for i in range(len(pred_tokens) - n + 1)))


def max_over_golds(metric_fn, prediction, golds):
    golds = list(golds)
    if not golds:
        raise ValueError('at least one gold answer is required')
    return max(metric_fn(prediction, gold) for gold in golds)


def exact_match(prediction, golds):
    ''' 1 if the normalized prediction equals any normalized gold answer '''
    return max_over_golds(_exact, prediction, golds)


def f1_score(prediction, golds):
    ''' best token-level F1 against any gold answer '''
    return max_over_golds(_f1, prediction, golds)


def accuracy(prediction, golds):
    ''' 1 if any normalized gold answer occurs as a contiguous token run of the normalized prediction '''
    return max_over_golds(_contains, prediction, golds)


def example_match_rate(retrieved_ids, gold_ids):
    '''
    Description
    ------------
    share of the gold evidence chunks found among the retrieved chunks

    Parameters
    ------------
    retrieved_ids : iterable
        chunk_ids, duplicates allowed
    gold_ids : iterable
        gold evidence chunk_ids

    Returns
    ------------
    out : float | None
        None when there is no gold evidence
    '''
    gold = set(gold_ids)
    if not gold:
        return None
    return len(set(retrieved_ids) & gold) / len(gold)


def evidence_match_rate(retrieved_per_example, gold_per_example):
    '''
    Description
    ------------
    Mean per-example match rate. Each retrieved entry may be a list of
    EvidenceChain objects or a flat list of chunk_ids. Examples without gold
    evidence are left out of the mean.

    Parameters
    ------------
    retrieved_per_example : list
        retrieval output per example
    gold_per_example : list
        gold evidence chunk_ids per example

    Returns
    ------------
    out : float
        mean match rate, 0.0 when no example has gold evidence
    '''
    if len(retrieved_per_example) != len(gold_per_example):
        raise EvaluationError(
            f'{len(retrieved_per_example)} retrieval results for {len(gold_per_example)} gold evidence sets')

    rates = []
    for retrieved, gold in zip(retrieved_per_example, gold_per_example):
        ids = []
        for item in retrieved:
            ids.extend(item.chunk_ids if hasattr(item, 'chunk_ids') else [item])
        rate = example_match_rate(ids, gold)
        if rate is not None:
            rates.append(rate)
    return sum(rates) / len(rates) if rates else 0.0
