//! Local densities, the singular series and the main terms.

pub mod es;
pub mod local;
pub mod manin;
pub mod series;

pub use es::local_expansion_sides;
pub use local::{ell_infty, ell_v, ell_v_enumerated, ell_v_truncated, LocalContext, LocalDensity, Method};
pub use manin::{fermat_point_count, main_term_manin, manin_local_identity, ManinMainTerm};
pub use series::{
    main_term_sweep, main_term_waring, singular_series, waring_tail, MainTerm, MainTermSweep, SingularSeries,
    TailInterval, DEFAULT_DEGREE_CAP,
};
