"""Class-conditional metric learning toolkit.

Learn a linear projection that maximizes each point's probability of being
surrounded by its own class's k nearest neighbours, classify with the
class-conditional k-NN rule, and compare against NCA and Euclidean baselines.
"""

from .ccml import (
    TrainConfig,
    TrainTrace,
    class_probs,
    correct_class_prob,
    gradient,
    objective,
    train,
)
from .classify import ClassScores, ccknn_classify, ccknn_posterior, knn_classify, uniform_priors
from .dataset import (
    LabeledDataset,
    MiniBatch,
    SplitSpec,
    generate_sandwich,
    load_csv,
    sample_minibatch,
    save_csv,
    split,
)
from .errors import (
    CcmlError,
    ConfigError,
    DataError,
    DegenerateDataError,
    FeasibilityError,
    ModelFormatError,
    ParseError,
    ShapeError,
    TrainingDivergedError,
)
from .evaluate import RetrievalCurve, error_rate, loo_knn_error, ndcg_at_k, retrieval_curve
from .knn import NeighborSet, knn_excluding_class, knn_own_and_rest, knn_per_class, pairwise_sqdist
from .metric import InitSpec, LinearMetric, embed, identity_metric, init_metric, sq_distance
from .modelfile import ModelFile, load_model, save_model
from .nca import nca_objective, nca_select_probs, nca_train
from .preprocess import PcaModel, apply_pca, fit_pca

__version__ = "0.1.0"

__all__ = [
    "CcmlError",
    "ClassScores",
    "ConfigError",
    "DataError",
    "DegenerateDataError",
    "FeasibilityError",
    "InitSpec",
    "LabeledDataset",
    "LinearMetric",
    "MiniBatch",
    "ModelFile",
    "ModelFormatError",
    "NeighborSet",
    "ParseError",
    "PcaModel",
    "RetrievalCurve",
    "ShapeError",
    "SplitSpec",
    "TrainConfig",
    "TrainTrace",
    "TrainingDivergedError",
    "apply_pca",
    "ccknn_classify",
    "ccknn_posterior",
    "class_probs",
    "correct_class_prob",
    "embed",
    "error_rate",
    "fit_pca",
    "generate_sandwich",
    "gradient",
    "identity_metric",
    "init_metric",
    "knn_classify",
    "knn_excluding_class",
    "knn_own_and_rest",
    "knn_per_class",
    "load_csv",
    "load_model",
    "loo_knn_error",
    "ndcg_at_k",
    "nca_objective",
    "nca_select_probs",
    "nca_train",
    "objective",
    "pairwise_sqdist",
    "retrieval_curve",
    "sample_minibatch",
    "save_csv",
    "save_model",
    "split",
    "sq_distance",
    "train",
    "uniform_priors",
]
