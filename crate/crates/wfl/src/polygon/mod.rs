//! The polygon Δ_{k,p} and γ_{k,p}, threshold formulas, and the dimension
//! bounds for general hypersurfaces.

pub mod appendix;
pub mod general;
pub mod hull;
pub mod thresholds;

pub use appendix::{appendix_verify, default_n, AppendixParams, AppendixReport, ReductionTally, SweepTally, WitnessTally};
pub use general::{e_threshold, expected_mor_dim, general_dim_bound_rhs, GeneralDimBound};
pub use hull::{gamma, gamma_bounds, initial_box, is_generator, GammaReport, LatticePolygon};
pub use thresholds::{
    ln_enclosure, log_ratio, next_integer_above, s_bound_gamma_upper, s_bound_large_p, s_bound_large_q, s_bound_minor,
    s_bound_poly, theta_bound, theta_strict_bound, thresholds, Enclosure, ThresholdReport,
};
