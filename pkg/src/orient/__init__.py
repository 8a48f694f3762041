"""Closed-form alignment of vector embeddings that share a vocabulary."""

from .align import (
    AffineTransform,
    SimilarityTransform,
    Variant,
    affine_baseline,
    affine_objective,
    align,
    align_contextual,
    all_pairs_cross_covariance,
    apply,
    ensemble_average,
    reference_matrix,
)
from .embedding import (
    AlignedPair,
    ContextualEmbedding,
    Embedding,
    collapse_means,
    intersect,
    load_text,
    save_text,
    top_k,
)
from .errors import InputError, NumericalError, OrientError
from .evaluation import (
    AnalogyDataset,
    EvalReport,
    NoiseSpec,
    SimilarityDataset,
    analogy_eval,
    gaussian_calibrate,
    mean_cosine,
    nearest_neighbors,
    rmse,
    similarity_eval,
    spearman,
)
from .linalg import SvdResult, centroid, cross_covariance, frobenius_sq, svd
from .procrustes import optimal_rotation, optimal_scale
from .translation import Lexicon, pivot_translate, train_translation, translation_eval

__version__ = "0.1.0"
