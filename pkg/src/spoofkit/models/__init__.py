"""Bonafide-vs-spoof classifiers and their binary container."""

from .adaboost import AdaBoostEnsemble, adaboost_fit, ensemble_decision, stage_weight, weighted_error
from .gmm import GmmModel, GmmPairScorer, gmm_fit, gmm_loglik, kmeans, llr_score
from .io import decode_model, encode_model, load_model, save_model
from .svm import (BONAFIDE, SPOOF, LabeledDataset, SvmModel, dual_objective, rbf_kernel,
                  scale_gamma, smo_solve, svm_decision, svm_fit)

__all__ = [
    "AdaBoostEnsemble", "BONAFIDE", "GmmModel", "GmmPairScorer", "LabeledDataset", "SPOOF",
    "SvmModel", "adaboost_fit", "decode_model", "dual_objective", "encode_model",
    "ensemble_decision", "gmm_fit", "gmm_loglik", "kmeans", "llr_score", "load_model",
    "rbf_kernel", "save_model", "scale_gamma", "smo_solve", "stage_weight", "svm_decision",
    "svm_fit", "weighted_error",
]
