//! Linear forms on H^0(O(ke)), their divisors, and the exponential sums
//! S_1 and S_Z.

pub mod forms;
pub mod residue;
pub mod split;
pub mod sums;

pub use forms::{
    divisors_of_degree, factors_through, min_degree, nondegenerate_forms, restrict, DivisorCatalog, DivisorP1,
    LinearForm, LocalForm, RestrictedForm,
};
pub use residue::{tilde_alpha, ResidueForm};
pub use split::{arc_split, major_arc_sides, quadratic_decomposition, ArcRecord, ArcReport, QuadraticReport};
pub use sums::{circle_sums_all, s1_all, s1_direct, sz, sz_direct, sz_local, sz_local_direct, sz_local_direct_all};
