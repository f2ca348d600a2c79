//! Faddeev-Jackiw symplectic analysis of first-order models.
//!
//! The two-form uses `f_ij = ∂a_j/∂η^i − ∂a_i/∂η^j` throughout, which gives
//! `{q, p}* = +1` for `a = (p, 0)`.

mod dirac;
mod fj;
mod form;
mod model;
mod table;

use thiserror::Error;

use crate::expr::ExprError;
use crate::frac::FracError;
use crate::linalg::RankDisagreement;

pub use dirac::{
    coarse_dirac_bracket, coarse_hamilton_jacobi, darboux_space, dirac_space, momentum_name, primary_constraints,
};
pub use fj::{extend_model, fj_iterate, ChainLevel, ConstraintChain, FjOutcome, Terminal};
pub use form::{
    assemble_form, constraints_from_zero_modes, form_times_inverse, fractional_equations_of_motion, invert_form,
    EquationsOfMotion, SymplecticForm, ZeroModeConstraints,
};
pub use model::{Alpha, Model, ModelError, ALPHA_NAME};
pub use table::{brackets_to_commutators, BracketTable, CONVENTION, HBAR_NAME};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Rank(#[from] RankDisagreement),
    #[error("symplectic form is singular; zero modes: {null_basis:?}")]
    SingularForm { null_basis: Vec<Vec<String>> },
    #[error("no constraints given")]
    EmptyConstraints,
    #[error("no terminal reached within {0} iterations")]
    IterationBudgetExceeded(usize),
    #[error("constraint matrix is not invertible at the evaluation point")]
    DegenerateConstraintMatrix,
    #[error("{constraints} constraints but {multipliers} multipliers")]
    MultiplierCount { constraints: usize, multipliers: usize },
    #[error("a numeric fractional order is required")]
    SymbolicOrder,
    #[error("{0}")]
    NotCanonical(String),
}
