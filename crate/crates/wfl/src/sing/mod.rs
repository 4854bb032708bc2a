//! Singular loci of α and the bounds that depend on their dimension.

pub mod exists_c;
pub mod general;
pub mod katz;
pub mod locus;

pub use exists_c::{c_kernel, exists_c_check, solve_c, CKernel};
pub use general::{is_smooth_up_to, sing_general_f, HomogeneousForm};
pub use katz::{katz_bound, katz_bound_check, overall_dim_bound_check, KatzReport, KatzRow, OverallDimReport};
pub use locus::{
    in_sing, radical_dim, sing_dim_estimate, sing_points, Confidence, DimEstimate, SingInstance, SING_BUDGET,
};
