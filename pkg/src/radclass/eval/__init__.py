"""Evaluation: confusion metrics, ROC/AUC, cross-validation and t-tests."""

from .cv import CvReport, MetricSummary, kfold_cv, stratified_folds
from .metrics import ConfusionMatrix, MetricsReport, binary_metrics, confusion, f1_score, micro_macro
from .report import format_cv, format_metrics
from .roc import RocCurve, multiclass_roc, roc_auc
from .stats import TTestResult, betainc, t_cdf, t_sf_two_sided, welch_ttest

__all__ = [
    "ConfusionMatrix", "CvReport", "MetricSummary", "MetricsReport", "RocCurve", "TTestResult", "betainc",
    "binary_metrics", "confusion", "f1_score", "format_cv", "format_metrics", "kfold_cv", "micro_macro",
    "multiclass_roc", "roc_auc", "stratified_folds", "t_cdf", "t_sf_two_sided", "welch_ttest",
]
