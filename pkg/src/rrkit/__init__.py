"""Randomized-response survey toolkit: device design, estimation, privacy
measures, and seeded Monte Carlo replication for discrete sensitive variables."""

from .design import (
    DesignCertificate,
    DesignTable,
    design_device,
    p0_all_stigmatizing,
    p0_nonstigmatizing,
    p0_table,
)
from .device import (
    ResponseKernel,
    draw_response,
    draw_responses,
    response_distribution,
    response_kernel,
)
from .estimation import (
    estimate_mean,
    estimate_proportions,
    estimate_report,
    total_variance_proportions_theoretical,
    variance_mean_plugin,
    variance_mean_theoretical,
)
from .model import (
    Device,
    EstimateReport,
    PolicyMode,
    PopulationModel,
    PrivacyPolicy,
    ResponseSample,
    SupportSpec,
    SurveyDefinition,
    ValidationError,
    load_survey,
    parse_survey_document,
    validate_policy,
)
from .privacy import (
    AlphaResult,
    BetaResult,
    PrivacyReport,
    alpha_measure,
    beta_measure,
    guaranteed_alpha_bound,
    guaranteed_beta_bound,
    privacy_report,
    report_for_policy,
    revealing_probabilities,
)
from .simulation import (
    ReplicateRecord,
    SimulationConfig,
    SimulationSummary,
    replicate_stream,
    run_replicates,
    sample_true_indices,
    simulate_survey,
)
from .verification import CheckResult, VerificationReport, run_verification

__all__ = [
    "AlphaResult",
    "BetaResult",
    "CheckResult",
    "DesignCertificate",
    "DesignTable",
    "Device",
    "EstimateReport",
    "PolicyMode",
    "PopulationModel",
    "PrivacyPolicy",
    "PrivacyReport",
    "ReplicateRecord",
    "ResponseKernel",
    "ResponseSample",
    "SimulationConfig",
    "SimulationSummary",
    "SupportSpec",
    "SurveyDefinition",
    "ValidationError",
    "VerificationReport",
    "alpha_measure",
    "beta_measure",
    "design_device",
    "draw_response",
    "draw_responses",
    "estimate_mean",
    "estimate_proportions",
    "estimate_report",
    "guaranteed_alpha_bound",
    "guaranteed_beta_bound",
    "load_survey",
    "p0_all_stigmatizing",
    "p0_nonstigmatizing",
    "p0_table",
    "parse_survey_document",
    "privacy_report",
    "replicate_stream",
    "report_for_policy",
    "response_distribution",
    "response_kernel",
    "revealing_probabilities",
    "run_replicates",
    "run_verification",
    "sample_true_indices",
    "simulate_survey",
    "total_variance_proportions_theoretical",
    "validate_policy",
    "variance_mean_plugin",
    "variance_mean_theoretical",
]
