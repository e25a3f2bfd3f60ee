import json
import pandas as pd
import pytest

from chunkgraph import load_cig, load_model
from chunkgraph.cli import main
from chunkgraph.utils import sha256_file


@pytest.fixture
def graph_path(corpus_path, tmp_path):
    path = str(tmp_path / 'corpus.cig')
    assert main(['build-graph', '--corpus', corpus_path, '--out', path, '--max-chunk-size', '60']) == 0
    return path


@pytest.fixture
def model_path(graph_path, dataset_path, tmp_path):
    path = str(tmp_path / 'scorer.model')
    argv = ['train-scorer', '--graph', graph_path, '--dataset', dataset_path, '--out', path, '--hidden', '8', '--epochs', '3']
    assert main(argv) == 0
    return path


def test_build_graph_writes_graph_and_manifest(graph_path, corpus_path, capsys):
    g = load_cig(graph_path)
    assert len(g) == 7
    assert g.config.max_chunk_size == 60

    manifest = json.load(open(f'{graph_path}.manifest.json', encoding='utf-8'))
    assert manifest['command'] == 'build-graph'
    assert manifest['inputs']['corpus']['sha256'] == sha256_file(corpus_path)
    assert manifest['outputs']['graph']['sha256'] == sha256_file(graph_path)
    assert manifest['config']['provider']['endpoint'] == 'offline'


def test_build_graph_is_byte_identical(graph_path, corpus_path, tmp_path):
    again = str(tmp_path / 'again.cig')
    assert main(['build-graph', '--corpus', corpus_path, '--out', again, '--max-chunk-size', '60', '--workers', '2']) == 0
    assert sha256_file(again) == sha256_file(graph_path)


def test_bad_flag_value_is_a_usage_error(corpus_path, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(['build-graph', '--corpus', corpus_path, '--out', str(tmp_path / 'g'), '--top-k', '0'])
    assert e.value.code == 2


def test_missing_required_option(tmp_path):
    assert main(['build-graph', '--out', str(tmp_path / 'g')]) == 2


def test_missing_corpus_is_a_data_error(tmp_path):
    assert main(['build-graph', '--corpus', str(tmp_path / 'none.jsonl'), '--out', str(tmp_path / 'g')]) == 4


def test_config_file_and_flag_precedence(corpus_path, tmp_path):
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'max-chunk-size': 60, 'top_k': 1, 'keyword_threshold': 3}), encoding='utf-8')
    out = str(tmp_path / 'g.cig')
    assert main(['--config', str(config), 'build-graph', '--corpus', corpus_path, '--out', out, '--top-k', '2']) == 0
    g = load_cig(out)
    assert (g.config.max_chunk_size, g.config.semantic_top_k, g.config.keyword_threshold) == (60, 2, 3)

    config.write_text(json.dumps({'colour': 'blue'}), encoding='utf-8')
    assert main(['--config', str(config), 'build-graph', '--corpus', corpus_path, '--out', out]) == 2


def test_train_scorer_is_byte_identical(model_path, graph_path, dataset_path, tmp_path):
    again = str(tmp_path / 'again.model')
    argv = ['train-scorer', '--graph', graph_path, '--dataset', dataset_path, '--out', again, '--hidden', '8', '--epochs', '3']
    assert main(argv) == 0
    assert sha256_file(again) == sha256_file(model_path)

    model = load_model(model_path)
    assert (model.dim, model.hidden) == (64, 8)
    manifest = json.load(open(f'{model_path}.manifest.json', encoding='utf-8'))
    assert manifest['seeds'] == {'seed': 42}


def test_train_scorer_without_evidence(graph_path, tmp_path):
    dataset = tmp_path / 'plain.jsonl'
    dataset.write_text(json.dumps({'question': 'Who?', 'answers': ['x']}) + '\n', encoding='utf-8')
    argv = ['train-scorer', '--graph', graph_path, '--dataset', str(dataset), '--out', str(tmp_path / 'm')]
    assert main(argv) == 4


def test_corrupted_graph_is_a_data_error(graph_path, dataset_path, tmp_path):
    with open(graph_path, 'a', encoding='utf-8') as f:
        f.write('{"type":"node"}\n')
    argv = ['train-scorer', '--graph', graph_path, '--dataset', dataset_path, '--out', str(tmp_path / 'm')]
    assert main(argv) == 4


def test_retrieve_output_is_deterministic(graph_path, model_path, tmp_path, capsys):
    outputs = []
    for name in ('a.json', 'b.json'):
        out = str(tmp_path / name)
        argv = [
            'retrieve', '--graph', graph_path, '--model', model_path,
            '--question', 'What do the Dunmore Mines produce?', '--max-len', '3', '--out', out,
            ]
        assert main(argv) == 0
        outputs.append(sha256_file(out))
    assert outputs[0] == outputs[1]

    result = json.load(open(str(tmp_path / 'a.json'), encoding='utf-8'))
    assert result['format'] == 'chain'
    assert result['prompt'].endswith('Answer:')
    assert 'chain 1 (seed ' in capsys.readouterr().out


def test_retrieve_needs_model_beyond_one_hop(graph_path):
    assert main(['retrieve', '--graph', graph_path, '--question', 'Who?', '--max-len', '3']) == 2
    assert main(['retrieve', '--graph', graph_path, '--question', 'Who built the Grey Hall of Tessa?', '--max-len', '1']) == 0


def test_eval_writes_one_report_per_length(graph_path, model_path, dataset_path, tmp_path):
    out = str(tmp_path / 'report.jsonl')
    argv = ['eval', '--graph', graph_path, '--model', model_path, '--dataset', dataset_path, '--out', out, '--max-len', '1,3,5,7']
    assert main(argv) == 0
    for n in (1, 3, 5, 7):
        lines = open(f'{out}.len{n}', encoding='utf-8').read().splitlines()
        summary = json.loads(lines[0])
        assert summary['type'] == 'summary'
        assert summary['config']['max_len'] == n
        assert len(lines) == 4
        assert json.load(open(f'{out}.len{n}.manifest.json', encoding='utf-8'))['config']['max_len'] == n


def test_eval_baselines(graph_path, dataset_path, tmp_path):
    out = str(tmp_path / 'golden.jsonl')
    assert main(['eval', '--graph', graph_path, '--dataset', dataset_path, '--out', out, '--baseline', 'golden']) == 0
    assert json.loads(open(out, encoding='utf-8').readline())['accuracy'] == 1.0
    assert main(['eval', '--graph', graph_path, '--dataset', dataset_path, '--out', out]) == 2


def test_sweep_density_writes_table(graph_path, tmp_path):
    out = str(tmp_path / 'density.csv')
    assert main(['sweep-density', '--graph', graph_path, '--out', out, '--top-k', '1,3', '--threshold', '0,2']) == 0
    df = pd.read_csv(out)
    assert len(df) == 4
    assert list(df.columns[:6]) == ['top_k', 'threshold', 'structural', 'semantic', 'keyword', 'total']


def test_usage_error_leaves_log_dir_untouched(tmp_path):
    log_dir = tmp_path / 'logs'
    assert main(['--log-dir', str(log_dir), 'build-graph', '--out', str(tmp_path / 'g')]) == 2
    assert not log_dir.exists()
