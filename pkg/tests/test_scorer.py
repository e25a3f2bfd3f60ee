import numpy as np
import pytest

from chunkgraph import (
    EdgeAttributes,
    GraphFormatError,
    Providers,
    ScorerError,
    ScorerModel,
    TrainConfig,
    TrainingExample,
    embed_edge,
    load_model,
    save_model,
    score_candidate,
    train_scorer,
    training_accuracy,
    )
from chunkgraph.scorer import loss_and_gradients


STRUCTURAL = EdgeAttributes(w_struc=1)
SEMANTIC = EdgeAttributes(w_sim=0.3)


def separable_examples(n=20):
    ''' identical texts, only the edge type tells the labels apart '''
    out = []
    for i in range(n):
        out.append(TrainingExample(f'question {i}', f'path {i}', f'candidate {i}', STRUCTURAL, 1))
        out.append(TrainingExample(f'question {i}', f'path {i}', f'candidate {i}', SEMANTIC, 0))
    return out


def random_batch(rng, dim, n=5):
    return (
        rng.standard_normal((n, dim)),
        rng.standard_normal((n, dim)),
        rng.standard_normal((n, dim)),
        np.column_stack([rng.integers(0, 2, n), rng.random(n), rng.random(n)]).astype(float),
        rng.integers(0, 2, n).astype(float),
        )


#╭-------------------------------------------------------------------------╮
#| Forward                                                                 |
#╰-------------------------------------------------------------------------╯

def test_zero_model_embeds_edges_to_zero():
    model = ScorerModel.zeros(dim=6, hidden=4)
    assert np.array_equal(embed_edge(model, STRUCTURAL), np.zeros(6))
    assert score_candidate(model, np.ones(6), np.ones(6), np.ones(6), SEMANTIC) == 0.0


def test_forward_by_hand():
    params = {
        'edge_w1': [[1.0], [2.0], [3.0]], 'edge_b1': [0.1],
        'edge_w2': [[0.5]], 'edge_b2': [0.2],
        'score_w1': [[1.0], [-1.0], [0.5], [2.0]], 'score_b1': [0.0],
        'score_w2': [[1.5]], 'score_b2': [-0.3],
        }
    model = ScorerModel.from_params(params, keyword_norm_cap=4)
    e = EdgeAttributes(w_struc=1, w_sim=0.25, w_keyword=6, shared_keywords=tuple('abcdef'))

    # w_keyword is capped at 4 and scaled to 1
    edge_out = 0.5 * np.tanh(1 * 1.0 + 0.25 * 2.0 + 1.0 * 3.0 + 0.1) + 0.2
    assert embed_edge(model, e)[0] == pytest.approx(edge_out)

    hidden = np.tanh(0.4 * 1.0 + (-0.2) * (-1.0) + 0.7 * 0.5 + edge_out * 2.0)
    expected = 1.5 * hidden - 0.3
    assert score_candidate(model, [0.4], [-0.2], [0.7], e) == pytest.approx(expected)


def test_score_candidate_checks_shapes():
    model = ScorerModel.initialize(dim=3, hidden=2)
    with pytest.raises(ScorerError, match='path'):
        score_candidate(model, np.ones(3), np.ones(4), np.ones(3), SEMANTIC)


def test_non_finite_parameters_are_rejected():
    model = ScorerModel.initialize(dim=3, hidden=2)
    model.params()['score_b2'][0] = np.nan
    with pytest.raises(ScorerError):
        score_candidate(model, np.ones(3), np.ones(3), np.ones(3), SEMANTIC)


#╭-------------------------------------------------------------------------╮
#| Gradients                                                               |
#╰-------------------------------------------------------------------------╯

def test_gradients_match_finite_differences():
    eps = 1e-5
    for seed in range(100):
        rng = np.random.default_rng(seed)
        model = ScorerModel.initialize(dim=3, hidden=4, seed=seed)
        batch = random_batch(rng, 3)
        _, grads = loss_and_gradients(model, *batch)

        for name, param in model.params().items():
            numeric = np.zeros_like(param)
            for index in np.ndindex(param.shape):
                original = param[index]
                param[index] = original + eps
                upper, _ = loss_and_gradients(model, *batch)
                param[index] = original - eps
                lower, _ = loss_and_gradients(model, *batch)
                param[index] = original
                numeric[index] = (upper - lower) / (2 * eps)

            scale = np.maximum(np.maximum(np.abs(grads[name]), np.abs(numeric)), 1e-4)
            assert np.max(np.abs(grads[name] - numeric) / scale) < 1e-4, (seed, name)


#╭-------------------------------------------------------------------------╮
#| Training                                                                |
#╰-------------------------------------------------------------------------╯

def test_training_separates_edge_types():
    providers = Providers.offline(dim=8)
    examples = separable_examples()
    model = train_scorer(examples, providers, TrainConfig(lr=0.05, epochs=60, hidden=16))
    assert training_accuracy(model, examples, providers) == 1.0
    assert model.final_loss < model.loss_history[0]
    assert len(model.loss_history) == 61


def test_full_batch_training_lowers_loss():
    providers = Providers.offline(dim=8)
    examples = separable_examples(16)
    model = train_scorer(examples, providers, TrainConfig(epochs=10, hidden=16))
    assert model.loss_history[-1] < model.loss_history[0]


def test_zero_learning_rate_keeps_initialization():
    providers = Providers.offline(dim=8)
    hyper = TrainConfig(lr=0.0, epochs=3, hidden=8, seed=5)
    model = train_scorer(separable_examples(4), providers, hyper)
    start = ScorerModel.initialize(8, 8, seed=5)
    for name, value in start.params().items():
        assert np.array_equal(model.params()[name], value)
    assert len(set(model.loss_history)) == 1


def test_training_is_deterministic():
    providers = Providers.offline(dim=8)
    hyper = TrainConfig(lr=0.01, epochs=4, hidden=8, batch_size=8)
    a = train_scorer(separable_examples(10), providers, hyper)
    b = train_scorer(separable_examples(10), Providers.offline(dim=8), hyper)
    for name, value in a.params().items():
        assert np.array_equal(b.params()[name], value)
    assert a.loss_history == b.loss_history


def test_training_accepts_a_plain_callable():
    model = train_scorer(separable_examples(3), lambda text: np.full(2, float(len(text))), TrainConfig(epochs=1, hidden=4))
    assert model.dim == 2
    assert model.encoder == {'model_name': '<lambda>'}


def test_training_needs_both_labels():
    positives = [x for x in separable_examples(3) if x.label]
    with pytest.raises(ScorerError):
        train_scorer(positives, Providers.offline(dim=8))
    with pytest.raises(ScorerError):
        train_scorer([], Providers.offline(dim=8))


#╭-------------------------------------------------------------------------╮
#| Persistence                                                             |
#╰-------------------------------------------------------------------------╯

def test_save_load_round_trip(tmp_path):
    model = train_scorer(separable_examples(4), Providers.offline(dim=8), TrainConfig(epochs=2, hidden=4))
    path = str(tmp_path / 'scorer.model')
    checksum = save_model(model, path)
    assert save_model(model, str(tmp_path / 'again.model')) == checksum

    loaded = load_model(path)
    assert (loaded.dim, loaded.hidden, loaded.keyword_norm_cap) == (8, 4, 10)
    assert loaded.loss_history == model.loss_history
    assert loaded.encoder == model.encoder
    for name, value in model.params().items():
        assert np.array_equal(loaded.params()[name], value)


def test_load_rejects_corruption(tmp_path):
    path = tmp_path / 'scorer.model'
    save_model(ScorerModel.initialize(dim=2, hidden=2), str(path))
    lines = path.read_text(encoding='utf-8').splitlines()
    lines[1] = lines[1].replace('"values":[', '"values":[1.5,', 1)
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    with pytest.raises(GraphFormatError, match='checksum'):
        load_model(str(path))
