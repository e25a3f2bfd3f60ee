'''
Planted-evidence multi-document tasks.

Every task holds 12 documents: a seed document of two chunks, a one-chunk
evidence document and 10 distractors. The question names an entity found
only in the seed chunk; the answer sits in the evidence chunk, which shares
three names with the second seed chunk and is therefore exactly two hops
away from the seed through a keyword edge.
'''

from dataclasses import dataclass
import networkx as nx
import numpy as np

from .._corpus import Document
from ..graph import GraphConfig, assemble_cig, prepare_chunks
from ..logger import Logger
from ..providers import Providers
from ..retriever import retrieve_chains
from ..scorer import generate_training_examples
from ..utils import DatasetError
from .dataset import QaExample
from .metrics import evidence_match_rate


logger = Logger.load(__name__).logger

SYLLABLES = (
    'ka', 'vel', 'tor', 'mi', 'dra', 'sul', 'pen', 'ro', 'zan', 'qui',
    'bel', 'nor', 'tas', 'gri', 'lom', 'fen', 'wic', 'har', 'dun', 'yel',
    'os', 'brin', 'cal', 'mer', 'tiv', 'ulo', 'pra', 'sen', 'kor', 'vas',
    )

LANDMARKS = ('Bridge', 'Tower', 'Abbey', 'Harbor', 'Castle', 'Mill')

# every lowercase word below is an English stop word
DISTRACTOR_TEMPLATES = (
    '{0} is beside {1}.',
    '{0} was with {1} and {2}.',
    '{0} is from {1}.',
    '{0} was after {1} and before {2}.',
    '{0} is with {1} beside {2}.',
    '{0} was in {year}.',
    )

PLANTED_CONFIG = GraphConfig(semantic_top_k=2, keyword_threshold=2, keywords_per_chunk=5, max_chunk_size=80)



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class PlantedTask(object):
    '''
    Description
    --------------------
    one generated question with its own graph

    Instance Attributes
    --------------------
    documents : tuple
        the 12 documents, seed document first
    example : QaExample
        question, answer and gold evidence (the evidence chunk)
    graph : Cig
        graph over the task's documents
    seed_chunk_id : str
        chunk naming the question's entity
    bridge_chunk_id : str
        second seed chunk, keyword-linked to the evidence
    evidence_chunk_id : str
        chunk holding the answer
    '''

    documents: tuple
    example: QaExample
    graph: object
    seed_chunk_id: str
    bridge_chunk_id: str
    evidence_chunk_id: str

    @property
    def training_evidence(self):
        ''' supervision pairs run between the seed and the evidence '''
        return {self.seed_chunk_id, self.evidence_chunk_id}



class NameGenerator(object):
    ''' capitalized pseudo-words, never repeated within one generator '''

    def __init__(self, rng):
        self.rng = rng
        self.used = set()

    def __call__(self):
        while True:
            count = int(self.rng.integers(2, 4))
            name = ''.join(self.rng.choice(SYLLABLES, size=count)).capitalize()
            if name not in self.used:
                self.used.add(name)
                return name



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def draw_documents(prefix, rng):
    ''' returns (documents, question, answer) for one draw '''
    name = NameGenerator(rng)
    landmark = f'{name()} {rng.choice(LANDMARKS)}'
    keys = [name() for _ in range(3)]
    year = str(int(rng.integers(1700, 1990)))

    seed_sentence = f'{landmark} is beside {name()} and {name()} with {name()}.'
    bridge_sentence = f'{keys[0]} is with {keys[1]} and {keys[2]} beside {name()}.'
    evidence_sentence = f'{keys[0]} and {keys[1]} with {keys[2]} was in {year}.'

    documents = [
        Document(f'{prefix}-seed', f'Record {prefix} A', f'{seed_sentence} {bridge_sentence}'),
        Document(f'{prefix}-evidence', f'Record {prefix} B', evidence_sentence),
        ]

    for j in range(10):
        sentences = []
        for _ in range(int(rng.integers(1, 4))):
            template = DISTRACTOR_TEMPLATES[int(rng.integers(len(DISTRACTOR_TEMPLATES)))]
            sentences.append(template.format(name(), name(), name(), year=int(rng.integers(1700, 1990))))
        documents.append(Document(f'{prefix}-d{j:02d}', f'Record {prefix} D{j}', ' '.join(sentences)))

    return documents, f'In which year did {landmark} open?', year


def make_planted_tasks(n, seed=0, providers=None, config=None, max_attempts=100):
    '''
    Description
    ------------
    Generates planted-evidence tasks. A draw is kept only when the seed and
    the bridge chunk are distinct chunks and the bridge is the only common
    neighbor of a seed and evidence chunk that are not adjacent, so the
    evidence lies exactly two hops away along one path.

    Parameters
    ------------
    n : int
        number of tasks
    seed : int
        generation seed
    providers : Providers
        backends used to build each task graph, offline by default
    config : GraphConfig
        graph parameters, max_chunk_size must keep the two seed sentences apart
    max_attempts : int
        draws tried per task before giving up

    Returns
    ------------
    out : list
        PlantedTask objects
    '''
    providers = providers or Providers.offline()
    config = config or PLANTED_CONFIG
    out = []

    for i in range(n):
        rng = np.random.default_rng([seed, i])
        prefix = f'p{i:03d}'

        for attempt in range(max_attempts):
            documents, question, answer = draw_documents(prefix, rng)
            chunks = prepare_chunks(documents, providers, config)
            g = assemble_cig(chunks, config, providers.config.echo())

            s, b, e = f'{prefix}-seed#0', f'{prefix}-seed#1', f'{prefix}-evidence#0'
            if f'{prefix}-seed#2' in g or b not in g or f'{prefix}-evidence#1' in g:
                continue

            graph = g.to_networkx()
            if graph.has_edge(s, e) or set(nx.common_neighbors(graph, s, e)) != {b}:
                continue

            example = QaExample(question, (answer,), {e}, tuple(d.doc_id for d in documents))
            out.append(PlantedTask(tuple(documents), example, g, s, b, e))
            break
        else:
            raise DatasetError(f'task {i}: no valid draw in {max_attempts} attempts')

    logger.info(f'generated {n} planted tasks')
    return out


def planted_training_examples(tasks, negative_cap=8, seed=42):
    out = []
    for task in tasks:
        out.extend(generate_training_examples(
            task.graph, task.example.question, task.training_evidence, negative_cap, seed))
    return out


def planted_match_rate(tasks, model, providers, max_len=5):
    ''' mean evidence match rate of retrieve_chains over the tasks, each on its own graph '''
    return evidence_match_rate(
        [retrieve_chains(t.example.question, t.graph, model, providers, max_len) for t in tasks],
        [t.example.evidence_chunk_ids for t in tasks],
        )
