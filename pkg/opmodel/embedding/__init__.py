"""State maps between models: good embeddings, extensions and the canonical pure-state extension."""

from opmodel.embedding.maps import (
    AffineStateMap,
    EmbeddingReport,
    FiniteModelSpec,
    good_embedding_report,
    good_extension_report,
)

__all__ = [
    "AffineStateMap",
    "EmbeddingReport",
    "FiniteModelSpec",
    "good_embedding_report",
    "good_extension_report",
]
