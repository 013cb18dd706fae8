//! Desk-scale simulation of the random-codebook covert scheme: codebook
//! sampling, threshold decoding with a genie common message, exact induced
//! eavesdropper distributions and the associated bound calculators.

pub mod codebook;
pub mod decode;
pub mod resolvability;
pub mod rng;

pub use codebook::{generate_codebook, Codebook, CodebookSizes};
pub use decode::{
    decoding_score, estimate_error_probability, estimate_with_thresholds, wilson_interval,
    Direction, Score, SimReport, Thresholds,
};
pub use resolvability::{
    chaining_bound, exact_induced_distribution, exact_induced_distribution_with_cap,
    four_term_bound, rate_thresholds, resolvability_report, BlockStats, RateThresholds,
    ResolvabilityReport, DEFAULT_ENUM_CAP, ENUM_CAP_ENV,
};
