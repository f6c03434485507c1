"""Prior word-sense disambiguation for compositional distributional models."""

from .composers import (
    CompositionParams,
    compose_additive,
    compose_multiplicative,
    compose_phrase,
    rae_gradients,
    rae_step,
    recnn_step,
    train_rae,
)
from .disambiguator import Mode, disambiguate_phrase, select_sense
from .evaluation import PhrasePair, binarize, cosine, crossval_logreg, run_experiment, spearman
from .senses import SenseInventory, build_inventory, cluster_contexts, collect_contexts, context_vector
from .vectorspace import VectorConfig, VectorSpace, build_vector_space, lookup, weight_ppmi

__version__ = "0.1.0"
