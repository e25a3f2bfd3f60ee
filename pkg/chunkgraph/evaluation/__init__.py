from .metrics import (
    accuracy,
    evidence_match_rate,
    exact_match,
    example_match_rate,
    f1_score,
    normalize_answer,
    )
from .dataset import QaExample, extend_dataset, load_dataset, save_dataset
from .harness import (
    EvalReport,
    RunConfig,
    run_eval,
    sweep_chain_length,
    sweep_context_formats,
    sweep_graph_density,
    )
from .synthetic import PlantedTask, make_planted_tasks, planted_match_rate, planted_training_examples
