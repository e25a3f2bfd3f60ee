from ._edges import (
    EdgeAttributes,
    build_keyword_edges,
    build_semantic_edges,
    build_structural_edges,
    merge_edges,
    pair_key,
    )
from .cig import (
    Cig,
    GraphConfig,
    assemble_cig,
    build_cig,
    load_cig,
    prepare_chunks,
    save_cig,
    )
