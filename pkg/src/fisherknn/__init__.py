"""PCA -> LDA feature extraction with k-nearest-neighbour identification."""

from fisherknn.errors import RecognitionError
from fisherknn.ingestion import ImageVector, LabeledGallery, data_matrix, load_gallery, load_pgm, write_pgm
from fisherknn.knn import DistanceReport, Verdict, classify, distance_report, euclidean_distance, suggest_threshold
from fisherknn.lda import FisherModel, between_class_scatter, fit_lda, project_fisher, within_class_scatter
from fisherknn.linalg import EigenPairs, generalized_symmetric_eigen, matmul, symmetric_eigen
from fisherknn.pca import PcaModel, fit_pca, project, project_matrix
from fisherknn.pipeline import (
    EvaluationSummary,
    RecognizerModel,
    ThresholdPolicy,
    evaluate,
    identify,
    load_model,
    save_model,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "DistanceReport",
    "EigenPairs",
    "EvaluationSummary",
    "FisherModel",
    "ImageVector",
    "LabeledGallery",
    "PcaModel",
    "RecognitionError",
    "RecognizerModel",
    "ThresholdPolicy",
    "Verdict",
    "between_class_scatter",
    "classify",
    "data_matrix",
    "distance_report",
    "euclidean_distance",
    "evaluate",
    "fit_lda",
    "fit_pca",
    "generalized_symmetric_eigen",
    "identify",
    "load_gallery",
    "load_model",
    "load_pgm",
    "matmul",
    "project",
    "project_fisher",
    "project_matrix",
    "save_model",
    "suggest_threshold",
    "symmetric_eigen",
    "train",
    "within_class_scatter",
    "write_pgm",
]
