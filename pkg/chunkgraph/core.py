from ._corpus import (
    Chunk,
    CorpusConfig,
    Document,
    chunk_corpus,
    chunk_document,
    ingest_corpus,
    load_documents,
    )
from .providers import (
    ProviderConfig,
    Providers,
    embed_text,
    extract_chunk_keywords,
    extract_question_keywords,
    generate_answer,
    generate_answer_no_retrieval,
    judge_answer,
    )
from .graph import (
    Cig,
    EdgeAttributes,
    GraphConfig,
    assemble_cig,
    build_cig,
    build_keyword_edges,
    build_semantic_edges,
    build_structural_edges,
    load_cig,
    prepare_chunks,
    save_cig,
    )
from .scorer import (
    ScorerModel,
    TrainConfig,
    TrainingExample,
    embed_edge,
    generate_training_examples,
    load_model,
    save_model,
    score_candidate,
    train_scorer,
    training_accuracy,
    )
from .retriever import (
    EvidenceChain,
    PathState,
    Query,
    expand_path,
    retrieve_chains,
    select_seed_nodes,
    tfidf_baseline_retrieve,
    tfidf_chains,
    )
from .context import ContextBundle, assemble_context, build_qa_prompt
from .evaluation import (
    EvalReport,
    QaExample,
    RunConfig,
    accuracy,
    evidence_match_rate,
    exact_match,
    extend_dataset,
    f1_score,
    load_dataset,
    make_planted_tasks,
    normalize_answer,
    run_eval,
    save_dataset,
    sweep_chain_length,
    sweep_context_formats,
    sweep_graph_density,
    )
from .utils import (
    ChunkGraphError,
    ContextError,
    CorpusError,
    DataError,
    DatasetError,
    EvaluationError,
    GraphError,
    GraphFormatError,
    KeywordParseError,
    ProviderError,
    RetrievalError,
    ScorerError,
    UsageError,
    )
