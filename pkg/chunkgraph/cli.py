'''
Command line entry point.

    chunkgraph build-graph   --corpus PATH --out PATH
    chunkgraph train-scorer  --graph PATH --dataset PATH --out PATH
    chunkgraph retrieve      --graph PATH --model PATH --question TEXT
    chunkgraph eval          --graph PATH --dataset PATH --out PATH [--model PATH]
    chunkgraph sweep-density --graph PATH --out PATH

Every command that writes an artifact also writes <artifact>.manifest.json.
Exit codes: 0 success, 2 usage error, 3 provider failure, 4 data error.
'''

import argparse
import datetime
import json
import os
import sys
from dataclasses import replace
from iterlab import to_iter

from . import __version__
from ._corpus import ingest_corpus
from .context import FORMATS, assemble_context, build_qa_prompt
from .evaluation import RunConfig, load_dataset, run_eval, sweep_graph_density
from .graph import GraphConfig, build_cig, load_cig, save_cig
from .logger import Logger, configure
from .providers import ProviderConfig, Providers
from .retriever import retrieve_chains
from .scorer import (
    TrainConfig,
    generate_training_examples,
    load_model,
    save_model,
    train_scorer,
    training_accuracy,
    )
from .utils import ChunkGraphError, DataError, DatasetError, UsageError, add_border, canonical_json, sha256_file


logger = Logger.load(__name__).logger



#╭-------------------------------------------------------------------------╮
#| Argument Types                                                          |
#╰-------------------------------------------------------------------------╯

def positive_int(value):
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f'{value!r} is not an integer') from None
    if number < 1:
        raise argparse.ArgumentTypeError(f'{value!r} must be >= 1')
    return number


def natural_int(value):
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f'{value!r} is not an integer') from None
    if number < 0:
        raise argparse.ArgumentTypeError(f'{value!r} must be >= 0')
    return number


def non_negative_float(value):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f'{value!r} is not a number') from None
    if number < 0:
        raise argparse.ArgumentTypeError(f'{value!r} must be >= 0')
    return number


def int_list(value):
    ''' "1,3,5,7" -> [1, 3, 5, 7] '''
    return [positive_int(x) for x in str(value).split(',') if x.strip()]


def natural_list(value):
    return [natural_int(x) for x in str(value).split(',') if x.strip()]



#╭-------------------------------------------------------------------------╮
#| Configuration                                                           |
#╰-------------------------------------------------------------------------╯

DEFAULTS = {
    'build-graph': {
        'corpus': None, 'out': None, 'max_chunk_size': 512, 'top_k': 5, 'keyword_threshold': 2,
        'keywords_per_chunk': 5, 'provider': 'offline', 'workers': 1,
        },
    'train-scorer': {
        'graph': None, 'dataset': None, 'out': None, 'lr': 1e-3, 'epochs': 10, 'batch_size': 32,
        'seed': 42, 'hidden': 256, 'keyword_norm_cap': 10, 'negative_cap': 8, 'max_path_chars': 2048,
        'provider': None,
        },
    'retrieve': {
        'graph': None, 'model': None, 'question': None, 'max_len': 5, 'format': 'chain', 'seed': 0,
        'token_budget': None, 'out': None, 'provider': None,
        },
    'eval': {
        'graph': None, 'model': None, 'dataset': None, 'out': None, 'format': 'chain', 'max_len': [5],
        'no_retrieval': False, 'baseline': 'none', 'top_n': 5, 'concurrency': 1, 'judge': False,
        'seed': 0, 'token_budget': None, 'records': None, 'provider': None,
        },
    'sweep-density': {
        'graph': None, 'out': None, 'top_k': [2, 5, 10], 'threshold': [1, 2, 4], 'dataset': None,
        'model': None, 'max_len': 5, 'provider': None,
        },
    }

REQUIRED = {
    'build-graph': ('corpus', 'out'),
    'train-scorer': ('graph', 'dataset', 'out'),
    'retrieve': ('graph', 'question'),
    'eval': ('graph', 'dataset', 'out'),
    'sweep-density': ('graph', 'out'),
    }


def load_config_file(path):
    ''' JSON object whose keys are flag names, dashes or underscores '''
    if path is None:
        return {}
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f'cannot read config file {path}: {e}') from e
    if not isinstance(data, dict):
        raise UsageError(f'config file {path} must hold a JSON object')
    return {k.replace('-', '_'): v for k, v in data.items()}


def resolve_options(args):
    ''' explicit flags win over the config file, which wins over defaults '''
    from_file = load_config_file(args.config)
    defaults = DEFAULTS[args.command]
    unknown = sorted(set(from_file) - set(defaults))
    if unknown:
        raise UsageError(f"unknown option(s) for {args.command} in config file: {', '.join(unknown)}")

    options = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        options[key] = value if value is not None else from_file.get(key, default)

    missing = [k for k in REQUIRED[args.command] if options.get(k) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join('--' + k.replace('_', '-') for k in missing)}")
    return options


def provider_config(value, graph=None):
    '''
    Description
    ------------
    Resolves the provider setting. 'offline', a JSON object, or a path to a
    JSON file are accepted. Without a setting, the providers recorded in the
    graph header are reused.

    Parameters
    ------------
    value : str | dict | None
        provider setting
    graph : Cig | None
        graph whose header provider echo is the fallback

    Returns
    ------------
    out : ProviderConfig
        resolved configuration
    '''
    if value is None:
        echo = dict(graph.provider) if graph is not None else {}
        return ProviderConfig(**echo) if echo else ProviderConfig()
    if isinstance(value, dict):
        fields = value
    elif value == 'offline':
        return ProviderConfig()
    elif value.lstrip().startswith('{'):
        try:
            fields = json.loads(value)
        except json.JSONDecodeError as e:
            raise UsageError(f'--provider is not valid JSON: {e}') from e
    else:
        fields = load_config_file(value)
    try:
        return ProviderConfig(**fields)
    except TypeError as e:
        raise UsageError(f'invalid provider configuration: {e}') from e



#╭-------------------------------------------------------------------------╮
#| Manifest                                                                |
#╰-------------------------------------------------------------------------╯

def timestamp():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec='seconds')


def write_manifest(output, command, options, inputs, outputs, seeds, started_at):
    '''
    Description
    ------------
    Writes <output>.manifest.json describing the run.

    Parameters
    ------------
    output : str
        primary output path
    command : str
        subcommand name
    options : dict
        fully resolved options
    inputs : dict
        role -> input path
    outputs : dict
        role -> output path
    seeds : dict
        seed name -> value
    started_at : str
        ISO timestamp of the start of the run

    Returns
    ------------
    path : str
        manifest path
    '''
    def checksums(paths):
        return {
            role: {'path': path, 'sha256': sha256_file(path) if os.path.isfile(path) else None}
            for role, path in paths.items() if path
            }

    manifest = {
        'command': command,
        'version': __version__,
        'config': options,
        'inputs': checksums(inputs),
        'outputs': checksums(outputs),
        'seeds': seeds,
        'started_at': started_at,
        'finished_at': timestamp(),
        }
    path = f'{output}.manifest.json'
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=str)
        f.write('\n')
    return path



#╭-------------------------------------------------------------------------╮
#| Commands                                                                |
#╰-------------------------------------------------------------------------╯

def cmd_build_graph(options):
    started_at = timestamp()
    config = GraphConfig(
        semantic_top_k=options['top_k'],
        keyword_threshold=options['keyword_threshold'],
        keywords_per_chunk=options['keywords_per_chunk'],
        max_chunk_size=options['max_chunk_size'],
        )
    cfg = provider_config(options['provider'])

    documents = ingest_corpus(options['corpus'], config.corpus_config)
    g = build_cig(documents, Providers.from_config(cfg), config, options['workers'])
    save_cig(g, options['out'])

    counts = g.edge_counts()
    print(add_border(
        f"graph: {options['out']}\n"
        f'nodes: {len(g)}\n'
        f"structural edges: {counts['structural']}\n"
        f"semantic edges: {counts['semantic']}\n"
        f"keyword edges: {counts['keyword']}\n"
        f"merged edges: {counts['total']}"
        ))

    write_manifest(
        options['out'], 'build-graph', dict(options, provider=cfg.to_dict()),
        {'corpus': options['corpus']}, {'graph': options['out']}, {}, started_at)
    return 0


def cmd_train_scorer(options):
    started_at = timestamp()
    hyper = TrainConfig(
        lr=options['lr'],
        epochs=options['epochs'],
        batch_size=options['batch_size'],
        seed=options['seed'],
        hidden=options['hidden'],
        keyword_norm_cap=options['keyword_norm_cap'],
        max_path_chars=options['max_path_chars'],
        )

    g = load_cig(options['graph'])
    dataset = load_dataset(options['dataset'])
    supervised = [x for x in dataset if x.evidence_chunk_ids]
    if not supervised:
        raise DatasetError('the dataset has no evidence_chunk_ids, supervision is impossible without them')

    examples = []
    for x in supervised:
        examples.extend(generate_training_examples(
            g, x.question, x.evidence_chunk_ids, options['negative_cap'], options['seed']))

    providers = Providers.from_config(provider_config(options['provider'], g))
    model = train_scorer(examples, providers, hyper)
    save_model(model, options['out'])

    positives = sum(x.label for x in examples)
    print(add_border(
        f"model: {options['out']}\n"
        f'questions with evidence: {len(supervised)} of {len(dataset)}\n'
        f'training examples: {len(examples)} ({positives} positive, {len(examples) - positives} negative)\n'
        f'final loss: {model.final_loss:.6f}\n'
        f'training accuracy: {training_accuracy(model, examples, providers, hyper.max_path_chars):.4f}'
        ))

    write_manifest(
        options['out'], 'train-scorer', dict(options, provider=providers.config.to_dict()),
        {'graph': options['graph'], 'dataset': options['dataset']},
        {'model': options['out']}, {'seed': options['seed']}, started_at)
    return 0


def cmd_retrieve(options):
    started_at = timestamp()
    if options['format'] not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
    if options['model'] is None and options['max_len'] > 1:
        raise UsageError('--model is required unless --max-len is 1')

    g = load_cig(options['graph'])
    model = load_model(options['model']) if options['model'] else None
    providers = Providers.from_config(provider_config(options['provider'], g))

    chains = retrieve_chains(options['question'], g, model, providers, options['max_len'])
    bundle = assemble_context(chains, g, options['format'], options['token_budget'], options['seed'])
    prompt = build_qa_prompt(options['question'], bundle)

    lines = []
    for i, chain in enumerate(chains, 1):
        lines.append(f'chain {i} (seed {chain.seed_id})')
        for chunk_id, score in chain.hops:
            label = 'seed' if score is None else f'{score:.6f}'
            lines.append(f'  {chunk_id} [{label}] {g.nodes[chunk_id].text}')
    print('\n'.join(lines))
    print()
    print(prompt)

    if options['out']:
        result = {
            'question': options['question'],
            'chains': [c.to_dict() for c in chains],
            'format': bundle.format,
            'blocks': list(bundle.blocks),
            'block_chunk_ids': [list(x) for x in bundle.block_chunk_ids],
            'prompt': prompt,
            }
        with open(options['out'], 'w', encoding='utf-8', newline='\n') as f:
            f.write(canonical_json(result) + '\n')
        write_manifest(
            options['out'], 'retrieve', options,
            {'graph': options['graph'], 'model': options['model']},
            {'result': options['out']}, {'shuffle_seed': options['seed']}, started_at)
    return 0


def cmd_eval(options):
    started_at = timestamp()
    lengths = [int(x) for x in to_iter(options['max_len'])]
    base = RunConfig(
        format=options['format'],
        max_len=lengths[0],
        no_retrieval=bool(options['no_retrieval']),
        baseline=options['baseline'],
        top_n=options['top_n'],
        shuffle_seed=options['seed'],
        token_budget=options['token_budget'],
        concurrency=options['concurrency'],
        judge=bool(options['judge']),
        )
    needs_model = not base.no_retrieval and base.baseline == 'none'
    if needs_model and options['model'] is None:
        raise UsageError('--model is required for graph retrieval')

    g = load_cig(options['graph'])
    model = load_model(options['model']) if needs_model else None
    dataset = load_dataset(options['dataset'])
    providers = Providers.from_config(provider_config(options['provider'], g))

    rows = []
    for n in lengths:
        suffix = f'.len{n}' if len(lengths) > 1 else ''
        out = f"{options['out']}{suffix}"
        records = f"{options['records']}{suffix}" if options['records'] else None
        run_config = replace(base, max_len=n, records_path=records)
        report = run_eval(dataset, g, model, providers, run_config)
        report.save(out)
        write_manifest(
            out, 'eval', dict(options, max_len=n),
            {'graph': options['graph'], 'model': options['model'], 'dataset': options['dataset']},
            {'report': out, 'records': records}, {'shuffle_seed': options['seed']}, started_at)
        rows.append(
            f'max_len {n}: accuracy {report.accuracy:.4f}  em {report.em:.4f}  '
            f'f1 {report.f1:.4f}  match rate {report.match_rate:.4f}  -> {out}')

    print(add_border('\n'.join(rows)))
    return 0


def cmd_sweep_density(options):
    started_at = timestamp()
    top_ks = [int(x) for x in to_iter(options['top_k'])]
    thresholds = [int(x) for x in to_iter(options['threshold'])]
    if min(top_ks) < 1 or min(thresholds) < 0:
        raise UsageError('--top-k values must be >= 1 and --threshold values >= 0')

    g = load_cig(options['graph'])
    dataset = load_dataset(options['dataset']) if options['dataset'] else None
    model = load_model(options['model']) if options['model'] else None
    providers = Providers.from_config(provider_config(options['provider'], g))

    table = sweep_graph_density(
        g.chunks, top_ks, thresholds, g.config, dataset, model, providers, options['max_len'])
    table.to_csv(options['out'], index=False, lineterminator='\n')
    print(table.to_string(index=False))

    write_manifest(
        options['out'], 'sweep-density', options,
        {'graph': options['graph'], 'dataset': options['dataset'], 'model': options['model']},
        {'table': options['out']}, {}, started_at)
    return 0



#╭-------------------------------------------------------------------------╮
#| Parser                                                                  |
#╰-------------------------------------------------------------------------╯

def build_parser():
    parser = argparse.ArgumentParser(
        prog='chunkgraph',
        description='Chunk-interaction graph construction, evidence chain retrieval and QA evaluation.',
        )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--config', help='JSON file supplying any flag; explicit flags override it')
    parser.add_argument('--log-dir', help='write chunkgraph.log into this folder')
    parser.add_argument('--verbose', action='store_true', help='log progress to stderr')
    subparsers = parser.add_subparsers(dest='command', required=True)

    p = subparsers.add_parser('build-graph', help='chunk, embed and link a corpus')
    p.add_argument('--corpus', help='JSON Lines corpus (doc_id, title, body)')
    p.add_argument('--out', help='graph file to write')
    p.add_argument('--max-chunk-size', type=positive_int)
    p.add_argument('--top-k', type=positive_int, help='semantic neighbors per chunk')
    p.add_argument('--keyword-threshold', type=natural_int, help='keyword edges need more shared keywords than this')
    p.add_argument('--keywords-per-chunk', type=positive_int)
    p.add_argument('--provider', help="'offline', a JSON object or a JSON file")
    p.add_argument('--workers', type=positive_int, help='provider calls in flight')
    p.set_defaults(func=cmd_build_graph)

    p = subparsers.add_parser('train-scorer', help='train the neighbor scoring head')
    p.add_argument('--graph')
    p.add_argument('--dataset')
    p.add_argument('--out', help='model file to write')
    p.add_argument('--lr', type=non_negative_float)
    p.add_argument('--epochs', type=positive_int)
    p.add_argument('--batch-size', type=positive_int)
    p.add_argument('--seed', type=int)
    p.add_argument('--hidden', type=positive_int)
    p.add_argument('--keyword-norm-cap', type=positive_int)
    p.add_argument('--negative-cap', type=natural_int)
    p.add_argument('--max-path-chars', type=positive_int)
    p.add_argument('--provider')
    p.set_defaults(func=cmd_train_scorer)

    p = subparsers.add_parser('retrieve', help='print evidence chains and the assembled prompt')
    p.add_argument('--graph')
    p.add_argument('--model')
    p.add_argument('--question')
    p.add_argument('--max-len', type=positive_int)
    p.add_argument('--format', choices=FORMATS)
    p.add_argument('--seed', type=int, help='shuffle seed')
    p.add_argument('--token-budget', type=positive_int)
    p.add_argument('--out', help='also write the result as JSON')
    p.add_argument('--provider')
    p.set_defaults(func=cmd_retrieve)

    p = subparsers.add_parser('eval', help='answer a dataset and score the answers')
    p.add_argument('--graph')
    p.add_argument('--model')
    p.add_argument('--dataset')
    p.add_argument('--out', help='report file; suffixed .len<N> when several lengths are given')
    p.add_argument('--format', choices=FORMATS)
    p.add_argument('--max-len', type=int_list, help='one length or a comma separated list')
    p.add_argument('--no-retrieval', action='store_true', default=None)
    p.add_argument('--baseline', choices=('none', 'tfidf', 'golden'))
    p.add_argument('--top-n', type=positive_int, help='chunks kept by the TF-IDF baseline')
    p.add_argument('--concurrency', type=positive_int)
    p.add_argument('--judge', action='store_true', default=None, help='LLM-judged accuracy')
    p.add_argument('--seed', type=int, help='shuffle seed')
    p.add_argument('--token-budget', type=positive_int)
    p.add_argument('--records', help='extra per-example record file')
    p.add_argument('--provider')
    p.set_defaults(func=cmd_eval)

    p = subparsers.add_parser('sweep-density', help='tabulate graph density over top-k and threshold')
    p.add_argument('--graph')
    p.add_argument('--out', help='CSV table to write')
    p.add_argument('--top-k', type=int_list)
    p.add_argument('--threshold', type=natural_list)
    p.add_argument('--dataset')
    p.add_argument('--model')
    p.add_argument('--max-len', type=positive_int)
    p.add_argument('--provider')
    p.set_defaults(func=cmd_sweep_density)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        options = resolve_options(args)
        configure(args.log_dir, args.verbose)
        return args.func(options)
    except ChunkGraphError as e:
        print(f'error: {e}', file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f'error: {e}', file=sys.stderr)
        return DataError.exit_code
