"""Graph representation learning for wireless-network knowledge graphs:
an adversarially regularized graph autoencoder plus downstream node
classification, relation prediction, and anomaly cause tracing."""

from .graph import (
    Graph,
    SparseAdjacency,
    DegreeDiagonal,
    build_adjacency,
    add_self_loops,
    degree_of,
    normalize_symmetric,
    normalized_adjacency,
    neighbors,
)
from .kg import (
    EntityCategory,
    RelationCategory,
    KgSchema,
    KnowledgeGraph,
    load_schema,
    schema_from_dict,
    build_kg,
    validate_kg,
    kg_features,
    load_bundled_kg,
    make_bundled_schema,
)
from .datasets import (
    DatasetBundle,
    load_citation_dataset,
    load_bundled_kg_dataset,
    resolve_dataset,
)
from .model import (
    EncoderConfig,
    ModelState,
    encode,
    decode,
    recon_loss,
    discriminate,
    gan_losses,
    train,
    save_model,
    load_model,
)
from .metrics import (
    kmeans,
    cluster_accuracy,
    split_edges,
    ap_auc,
    roc_auc,
    average_precision,
    export_embeddings,
)
from .tracer import (
    AssociationTree,
    TracePath,
    build_association_tree,
    trace_path,
    expand_node,
    tree_to_json,
    render_tree_text,
)

__version__ = "0.1.0"
