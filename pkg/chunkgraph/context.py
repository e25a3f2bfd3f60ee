import math
from dataclasses import dataclass
import numpy as np

from .logger import Logger
from .providers import templates
from .utils import ContextError, UsageError


logger = Logger.load(__name__).logger

FORMATS = ('chain', 'iterative', 'shuffle')



#╭-------------------------------------------------------------------------╮
#| Classes                                                                 |
#╰-------------------------------------------------------------------------╯

@dataclass(frozen=True)
class ContextBundle(object):
    '''
    Description
    --------------------
    retrieved text arranged for the answer prompt

    Instance Attributes
    --------------------
    format : str
        'chain', 'iterative' or 'shuffle'
    blocks : tuple
        text blocks in prompt order
    block_chunk_ids : tuple
        chunk_ids behind each block
    token_budget : int | None
        approximate token limit the blocks were trimmed to
    shuffle_seed : int
        permutation seed, used by the shuffle format only
    '''

    format: str
    blocks: tuple = ()
    block_chunk_ids: tuple = ()
    token_budget: int = None
    shuffle_seed: int = 0

    @property
    def chunk_ids(self):
        return [x for ids in self.block_chunk_ids for x in ids]

    @property
    def text(self):
        return '\n'.join(self.blocks)

    def __bool__(self):
        return bool(self.blocks)



#╭-------------------------------------------------------------------------╮
#| Functions                                                               |
#╰-------------------------------------------------------------------------╯

def estimate_tokens(text):
    ''' roughly four characters per token '''
    return math.ceil(len(text) / 4)


def first_occurrences(groups):
    ''' drops chunk_ids already seen in an earlier position, groups left empty are removed '''
    seen, out = set(), []
    for group in groups:
        kept = []
        for chunk_id in group:
            if chunk_id not in seen:
                seen.add(chunk_id)
                kept.append(chunk_id)
        if kept:
            out.append(kept)
    return out


def assemble_context(chains, g, format='chain', token_budget=None, shuffle_seed=0):
    '''
    Description
    ------------
    Arranges evidence chains into text blocks.

        chain     : one block per chain, chunk texts in hop order
        iterative : one block per hop index, chunks of all chains at that hop
        shuffle   : one block per chunk, order permuted by shuffle_seed

    Duplicate chunks keep their first occurrence. With a token budget,
    trailing blocks are dropped whole; the first block is always kept.

    Parameters
    ------------
    chains : list
        EvidenceChain objects in seed order
    g : Cig
        graph holding the chunk texts
    format : str
        block layout
    token_budget : int | None
        approximate token limit
    shuffle_seed : int
        permutation seed for the shuffle format

    Returns
    ------------
    out : ContextBundle
        assembled blocks
    '''
    if format not in FORMATS:
        raise ContextError(f"unknown context format {format!r}, expected one of {', '.join(FORMATS)}")
    if token_budget is not None and (not isinstance(token_budget, int) or token_budget < 1):
        raise UsageError(f'token_budget must be a positive integer, not {token_budget!r}')

    sequences = [chain.chunk_ids for chain in chains]
    unknown = sorted({x for ids in sequences for x in ids if x not in g})
    if unknown:
        raise ContextError(f'chains reference chunks missing from the graph: {unknown}')

    if format == 'chain':
        groups = first_occurrences(sequences)
    elif format == 'iterative':
        depth = max((len(ids) for ids in sequences), default=0)
        groups = first_occurrences([ids[i] for ids in sequences if i < len(ids)] for i in range(depth))
    else:
        flat = [x for group in first_occurrences(sequences) for x in group]
        order = np.random.default_rng(shuffle_seed).permutation(len(flat))
        groups = [[flat[i]] for i in order]

    blocks = [' '.join(g.nodes[x].text for x in group) for group in groups]

    if token_budget is not None and blocks:
        total, keep = 0, 0
        for block in blocks:
            total += estimate_tokens(block)
            if keep and total > token_budget:
                break
            keep += 1
        if keep < len(blocks):
            logger.warning(f'context trimmed to {keep} of {len(blocks)} blocks by token budget {token_budget}')
        blocks, groups = blocks[:keep], groups[:keep]

    return ContextBundle(format, tuple(blocks), tuple(tuple(x) for x in groups), token_budget, shuffle_seed)


def build_qa_prompt(question, bundle):
    ''' renders the question answering template with the bundle's blocks under Context '''
    if not question or not question.strip():
        raise ContextError('question must not be empty')
    return templates.render_qa(question, bundle.text)
