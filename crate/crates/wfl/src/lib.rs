//! Exact computations around Waring's problem over F_q[T].

pub mod error;
pub mod ff;
pub mod fourier;
pub mod counting;
pub mod arcs;
pub mod densities;
pub mod sing;
pub mod polygon;

pub use error::{Error, Result};
