from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field, replace
import networkx as nx
import numpy as np
import pandas as pd
from iterlab import to_iter

from ..context import FORMATS, assemble_context
from ..graph import GraphConfig, assemble_cig
from ..logger import Logger, log
from ..retriever import golden_chains, retrieve_chains, tfidf_chains
from ..utils import ChunkGraphError, DatasetError, UsageError, write_jsonl
from .metrics import accuracy, evidence_match_rate, exact_match, example_match_rate, f1_score


logger = Logger.load(__name__).logger

BASELINES = ('none', 'tfidf', 'golden')



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class RunConfig(object):
    '''
    Description
    --------------------
    settings of one evaluation run

    Instance Attributes
    --------------------
    format : str
        context format: 'chain', 'iterative' or 'shuffle'
    max_len : int
        maximum chain length
    no_retrieval : bool
        answer from the question alone
    baseline : str
        'none' uses the graph retriever, 'tfidf' the TF-IDF ranking and
        'golden' the gold evidence chunks
    top_n : int
        chunks returned by the TF-IDF baseline
    shuffle_seed : int
        permutation seed of the shuffle format
    token_budget : int | None
        approximate context token limit
    concurrency : int
        examples evaluated at once, bounding concurrent provider calls
    judge : bool
        score accuracy with the provider's judge instead of containment
    records_path : str | None
        extra per-example record file
    max_path_chars : int
        path text limit used for re-embedding during expansion
    '''

    format: str = 'chain'
    max_len: int = 5
    no_retrieval: bool = False
    baseline: str = 'none'
    top_n: int = 5
    shuffle_seed: int = 0
    token_budget: int = None
    concurrency: int = 1
    judge: bool = False
    records_path: str = None
    max_path_chars: int = 2048

    def __post_init__(self):
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}, not {self.format!r}")
        if self.baseline not in BASELINES:
            raise UsageError(f"baseline must be one of {', '.join(BASELINES)}, not {self.baseline!r}")
        if self.no_retrieval and self.baseline != 'none':
            raise UsageError('no_retrieval cannot be combined with a retrieval baseline')
        for name in ('max_len', 'top_n', 'concurrency', 'max_path_chars'):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise UsageError(f'{name} must be a positive integer, not {value!r}')
        if self.token_budget is not None and (not isinstance(self.token_budget, int) or self.token_budget < 1):
            raise UsageError(f'token_budget must be a positive integer, not {self.token_budget!r}')

    @property
    def accuracy_mode(self):
        return 'judge' if self.judge else 'containment'

    def to_dict(self):
        return dict(asdict(self), accuracy_mode=self.accuracy_mode)



@dataclass
class EvalReport(object):
    '''
    Description
    --------------------
    aggregate metrics of one run; every aggregate is the mean of the records

    Instance Attributes
    --------------------
    accuracy : float
        mean accuracy
    em : float
        mean exact match
    f1 : float
        mean F1
    match_rate : float
        mean evidence match rate over examples with gold evidence
    records : list
        per-example dicts
    config : dict
        RunConfig echo including accuracy_mode
    '''

    accuracy: float
    em: float
    f1: float
    match_rate: float
    records: list = field(default_factory=list, repr=False)
    config: dict = field(default_factory=dict)

    @property
    def summary(self):
        return {
            'accuracy': self.accuracy,
            'em': self.em,
            'f1': self.f1,
            'match_rate': self.match_rate,
            'n_examples': len(self.records),
            'n_errors': sum(1 for r in self.records if r.get('error')),
            'config': self.config,
            }

    def to_frame(self):
        return pd.DataFrame(self.records)

    def save(self, path):
        ''' one summary line followed by one line per example '''
        write_jsonl(path, [dict(self.summary, type='summary')] + [dict(r, type='record') for r in self.records])



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def retrieve_for(example, g, model, providers, run_config):
    if run_config.no_retrieval:
        return []
    if run_config.baseline == 'tfidf':
        return tfidf_chains(example.question, g.chunks, run_config.top_n)
    if run_config.baseline == 'golden':
        return golden_chains(x for x in example.evidence_chunk_ids if x in g)
    return retrieve_chains(
        example.question, g, model, providers, run_config.max_len, run_config.max_path_chars)


def evaluate_example(example, g, model, providers, run_config):
    ''' one record; retrieval and provider failures are recorded, not raised '''
    chains, prediction, error, judged = [], '', None, None
    try:
        chains = retrieve_for(example, g, model, providers, run_config)
        if run_config.no_retrieval:
            prediction = providers.generator.answer_no_retrieval(example.question)
        else:
            bundle = assemble_context(
                chains, g, run_config.format, run_config.token_budget, run_config.shuffle_seed)
            prediction = providers.generator.answer(example.question, bundle.text)
        prediction = (prediction or '').strip()
        if run_config.judge:
            judged = providers.generator.judge(example.question, prediction, example.gold_answers)
    except ChunkGraphError as e:
        error = f'{type(e).__name__}: {e}'
        logger.warning(f'{example.question!r} failed: {error}')

    retrieved = list(dict.fromkeys(x for chain in chains for x in chain.chunk_ids))
    contained = accuracy(prediction, example.gold_answers)

    return {
        'question': example.question,
        'gold_answers': list(example.gold_answers),
        'prediction': prediction,
        'chains': [chain.chunk_ids for chain in chains],
        'retrieved_chunk_ids': retrieved,
        'evidence_chunk_ids': sorted(example.evidence_chunk_ids),
        'accuracy': int(judged) if judged is not None else contained,
        'em': exact_match(prediction, example.gold_answers),
        'f1': f1_score(prediction, example.gold_answers),
        'match_rate': example_match_rate(retrieved, example.evidence_chunk_ids),
        'error': error,
        }


@log()
def run_eval(dataset, g, model, providers, run_config=None):
    '''
    Description
    ------------
    Retrieves, assembles context and answers every question, then scores the
    answers. Examples run on a thread pool of run_config.concurrency workers;
    record order follows the dataset.

    Parameters
    ------------
    dataset : list
        QaExample objects
    g : Cig
        chunk-interaction graph
    model : ScorerModel | None
        scoring head; only the graph retriever needs it
    providers : Providers
        backend bundle
    run_config : RunConfig
        run settings

    Returns
    ------------
    out : EvalReport
        aggregate metrics and per-example records
    '''
    run_config = run_config or RunConfig()
    dataset = list(dataset)
    if not dataset:
        raise DatasetError('cannot evaluate an empty dataset')
    if model is None and not run_config.no_retrieval and run_config.baseline == 'none':
        raise UsageError('the graph retriever needs a scorer model')

    def worker(example):
        return evaluate_example(example, g, model, providers, run_config)

    if run_config.concurrency > 1:
        with ThreadPoolExecutor(max_workers=run_config.concurrency) as executor:
            records = list(executor.map(worker, dataset))
    else:
        records = [worker(x) for x in dataset]

    df = pd.DataFrame(records)
    rates = df['match_rate'].dropna()
    report = EvalReport(
        accuracy=float(df['accuracy'].mean()),
        em=float(df['em'].mean()),
        f1=float(df['f1'].mean()),
        match_rate=float(rates.mean()) if len(rates) else 0.0,
        records=records,
        config=run_config.to_dict(),
        )

    if run_config.records_path:
        write_jsonl(run_config.records_path, records)

    logger.info(
        f'accuracy {report.accuracy:.3f}, em {report.em:.3f}, f1 {report.f1:.3f}, '
        f'match rate {report.match_rate:.3f} over {len(records)} questions'
        )
    return report


def sweep_chain_length(dataset, g, model, providers, run_config=None, lengths=(1, 3, 5, 7)):
    ''' one report per maximum chain length '''
    run_config = run_config or RunConfig()
    return {n: run_eval(dataset, g, model, providers, replace(run_config, max_len=n)) for n in to_iter(lengths)}


def sweep_context_formats(dataset, g, model, providers, run_config=None, formats=FORMATS):
    ''' one report per context format '''
    run_config = run_config or RunConfig()
    return {f: run_eval(dataset, g, model, providers, replace(run_config, format=f)) for f in to_iter(formats)}


@log()
def sweep_graph_density(chunks, top_ks=(2, 5, 10), thresholds=(1, 2, 4), config=None,
                        dataset=None, model=None, providers=None, max_len=5):
    '''
    Description
    ------------
    Rebuilds the edges of prepared chunks for every (top-k, threshold)
    setting and tabulates the resulting graph.

    Parameters
    ------------
    chunks : list
        Chunk objects carrying keywords and embeddings
    top_ks : int | iterable
        semantic top-k values
    thresholds : int | iterable
        keyword thresholds
    config : GraphConfig
        base configuration for the remaining fields
    dataset : list | None
        QaExample objects; with model and providers, adds the evidence match rate
    model : ScorerModel | None
        scoring head
    providers : Providers | None
        backend bundle
    max_len : int
        chain length used for the match rate

    Returns
    ------------
    out : pandas.DataFrame
        one row per setting with edge counts per family, density, component
        count and match rate (NaN when not computed)
    '''
    config = config or GraphConfig()
    provider = providers.config.echo() if providers is not None else None
    rows = []

    for k in to_iter(top_ks):
        for t in to_iter(thresholds):
            g = assemble_cig(chunks, replace(config, semantic_top_k=k, keyword_threshold=t), provider)
            row = {'top_k': k, 'threshold': t, **g.edge_counts()}
            row['density'] = g.density()
            row['components'] = nx.number_connected_components(g.to_networkx())
            row['match_rate'] = np.nan
            if dataset and model is not None and providers is not None:
                row['match_rate'] = evidence_match_rate(
                    [retrieve_chains(x.question, g, model, providers, max_len) for x in dataset],
                    [x.evidence_chunk_ids for x in dataset],
                    )
            rows.append(row)

    return pd.DataFrame(rows)
