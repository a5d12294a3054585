"""Fully visible Boltzmann machines on hardware graphs.

Models live directly on a qubit connectivity graph (Chimera lattices with
broken-qubit masks, or all-to-all layouts), dense problems are mapped onto
the hardware through chain embeddings, and the thermal sampling step is
served by exact enumeration, simulated annealing, or a dense transverse-
field thermal state at small sizes.
"""

__version__ = "0.1.0"

from .embedding import (
    Embedding,
    EmbeddingStats,
    clique_embed,
    embedding_stats,
    load_embedding,
    save_embedding,
)
from .errors import (
    EmbeddingError,
    EmboltError,
    InputError,
    ParamRangeError,
    ParseError,
    SizeLimitError,
)
from .model import (
    Checkpoint,
    IsingModel,
    MomentVector,
    init_model,
    load_checkpoint,
    save_checkpoint,
)
from .samplers import (
    SampleSet,
    SamplerConfig,
    clamp_fields,
    exact_log_z,
    exact_probabilities,
    exact_thermal,
    load_samples,
    negative_phase,
    quantum_thermal,
    sample,
    save_samples,
)
from .topology import (
    ChimeraSpec,
    HardwareGraph,
    build_chimera,
    complete_graph,
    load_graph,
)
from .training import RangeExit, TrainConfig, TrainResult, train

__all__ = [
    "Checkpoint",
    "ChimeraSpec",
    "Embedding",
    "EmbeddingError",
    "EmbeddingStats",
    "EmboltError",
    "HardwareGraph",
    "InputError",
    "IsingModel",
    "MomentVector",
    "ParamRangeError",
    "ParseError",
    "RangeExit",
    "SampleSet",
    "SamplerConfig",
    "SizeLimitError",
    "TrainConfig",
    "TrainResult",
    "__version__",
    "build_chimera",
    "clamp_fields",
    "clique_embed",
    "complete_graph",
    "embedding_stats",
    "exact_log_z",
    "exact_probabilities",
    "exact_thermal",
    "init_model",
    "load_checkpoint",
    "load_embedding",
    "load_graph",
    "load_samples",
    "negative_phase",
    "quantum_thermal",
    "sample",
    "save_checkpoint",
    "save_embedding",
    "save_samples",
    "train",
]
