//! Finite fields, polynomials over them, and the local rings of P^1.

pub mod arith;
pub mod cyclo;
pub mod extension;
pub mod field;
pub mod linalg;
pub mod places;
pub mod poly;
pub mod quotient;

pub use cyclo::{char_psi, Cyc, CycQ, Cyclotomic};
pub use extension::{extend_field, Extension};
pub use field::{Field, FieldSpec, Fq, MAX_Q};
pub use places::{places_up_to, Place};
pub use poly::Poly;
pub use quotient::QuotientRing;
