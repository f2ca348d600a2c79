//! Symplectic (Faddeev-Jackiw) quantization of first-order systems with
//! fractional dynamics in the modified Riemann-Liouville calculus.

pub mod dynamics;
pub mod expr;
pub mod frac;
pub mod hall;
pub mod json;
pub(crate) mod linalg;
pub mod modelfile;
pub mod symplectic;
