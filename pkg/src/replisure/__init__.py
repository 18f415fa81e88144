"""Replication success of paired studies: two-trials rule and sceptical p-value."""

from .assessment import (
    AssessmentResult,
    ScepticalZ,
    assess_pair,
    box_tail_probability,
    controlled_threshold,
    sceptical_p_controlled,
    sceptical_p_nominal,
    sceptical_prior_variance,
    sceptical_z,
    t1e_sceptical,
    two_trials_p,
)
from .combined import CombinedCI, cochran_q, combined_ci, fixed_effect_meta, sceptical_ci_upper
from .power import (
    PowerResult,
    conditional_type1,
    replication_power,
    required_relative_sample_size,
    required_z_r,
    sceptical_conditional_power,
    sceptical_predictive_power,
    ttr_conditional_power,
    ttr_predictive_power,
)
from .studies import (
    Dataset,
    Design,
    NormalizedPair,
    StudyEffect,
    StudyPair,
    load_dataset,
    normalize_pair,
    p_to_z,
    se_from_ci,
    z_to_p,
)

__version__ = "0.1.0"
