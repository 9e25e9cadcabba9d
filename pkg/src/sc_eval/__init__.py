"""Selective classification evaluation: risk-coverage curves, AUGRC and
related metrics, and bootstrap ranking of confidence scoring functions."""

__version__ = "0.1.0"

from .analytic import (
    ClosedFormInputs,
    augrc_closed_form,
    augrc_gradients,
    f1_auc_star,
    f1_auc_star_argmax,
)
from .core import (
    EvaluationSet,
    RiskCoverageCurve,
    SampleRecord,
    generalized_risk_curve,
    make_evaluation_set,
    optimal_reordering,
    selective_risk_at_coverage,
    selective_risk_curve,
)
from .metrics import (
    METRICS,
    MetricResult,
    accuracy,
    augrc,
    aurc,
    auroc_f,
    e_augrc,
    e_aurc,
    f1_auc,
    failure_contribution,
    naurc,
    oc_auroc_f,
)
from .ranking import (
    BootstrapMatrix,
    ComparisonSummary,
    ExperimentGrid,
    RankingReport,
    compare_rankings,
    evaluate_bootstrap,
    rank,
    rank_then_aggregate,
    significance_map,
)
from .stats import BootstrapPlan, bootstrap_plan, wilcoxon_one_sided
