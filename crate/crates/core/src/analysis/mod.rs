//! Structural analysis of classes and learners.

mod cover;
mod oblivious;
mod restriction;
mod stability;

pub use cover::{cover_radius, uniform_marginal};
pub use oblivious::{
    estimate_f, exact_f_1d, oblivious_excess, oblivious_terms, FCache, FOracle, FTable,
    IdentityScheme, ObliviousExcess, ObliviousTerm, PoisoningScheme, EXACT_F_MAX_N,
};
pub use restriction::{
    restrict_dedupe, sauer_bound, sauer_exp_bound, vc_dimension, RestrictionClass, VC_MAX_DOMAIN,
};
pub use stability::{exact_prediction_stability, stability_certificate, StabilityReport};
