from ._mlp import EdgeMlp, ScoreMlp
from .scorer import ScorerModel, embed_edge, score_candidate, save_model, load_model
from .training import (
    TextEncoder,
    TrainConfig,
    TrainingExample,
    generate_training_examples,
    loss_and_gradients,
    train_scorer,
    training_accuracy,
    truncate_path,
    )
