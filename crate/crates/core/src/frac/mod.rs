//! Fractional calculus in the modified Riemann-Liouville (MRL) sense.
//!
//! All operators use the lower terminal 0 and act on `Δf = f(ξ) − f(0)`, so
//! constants have zero derivative. Two representations are supported: finite
//! sums of powers `c·x^β` (exact power rule) and functions sampled on a
//! uniform grid starting at 0 (product-integration quadrature).

pub mod gamma;
mod power;
mod sampled;

use thiserror::Error;

use crate::expr::{rational_approx, Binding, Expr, ExprError, Rational};

pub use gamma::{gamma, ln_gamma, PoleAtNonPositiveInteger, EULER_GAMMA};
pub use power::{frac_partial, mrl_derivative_power, PowerSum};
pub use sampled::{mrl_derivative_quadrature, mrl_derivative_sampled, SampledFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),
    #[error("{nodes} grid nodes precede x, need at least {needed}")]
    InsufficientGrid { nodes: usize, needed: usize },
    #[error("x = {0} is not a grid node")]
    OffGrid(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("(du/dx)^alpha needs du/dx >= 0, got {0}")]
    NegativeBase(f64),
    #[error("outside the power-law fragment: {0}")]
    OutsideFragment(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Pole(#[from] PoleAtNonPositiveInteger),
}

/// Order α of a fractional derivative, `0 < α ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub const CLASSICAL: FracOrder = FracOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self, FracError> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(FracError::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// Exact rational used as the exponent shift of the power rule.
    pub fn as_rational(self) -> Rational {
        rational_approx(self.0).expect("order is finite")
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = FracError;
    fn try_from(alpha: f64) -> Result<Self, FracError> {
        Self::new(alpha)
    }
}

/// Γ(1+α), the factor relating `D^α f ≈ Γ(1+α)·Df` on coarse-grained
/// scales. Its reciprocal is the `(α!)⁻¹` of the coarse-grained relations.
pub fn coarse_grained_factor(alpha: FracOrder) -> f64 {
    gamma(1.0 + alpha.value()).expect("1 + alpha is positive")
}

/// Either representation accepted by the chain rules.
#[derive(Debug, Clone)]
pub enum FracFunction {
    Power(PowerSum),
    Sampled(SampledFunction),
}

impl FracFunction {
    pub fn value_at(&self, x: f64) -> Result<f64, FracError> {
        match self {
            FracFunction::Power(p) => p.evaluate(x, &Binding::new()),
            FracFunction::Sampled(s) => Ok(s.values()[s.index_of(x)?]),
        }
    }

    /// `(D^α f)(x)`.
    pub fn mrl_derivative_at(&self, alpha: FracOrder, x: f64) -> Result<f64, FracError> {
        match self {
            FracFunction::Power(p) => mrl_derivative_power(p, alpha).evaluate(x, &Binding::new()),
            FracFunction::Sampled(s) => mrl_derivative_quadrature(s, alpha, x),
        }
    }
}

impl From<PowerSum> for FracFunction {
    fn from(p: PowerSum) -> Self {
        FracFunction::Power(p)
    }
}

impl From<SampledFunction> for FracFunction {
    fn from(s: SampledFunction) -> Self {
        FracFunction::Sampled(s)
    }
}

/// A real function with a known first derivative.
pub trait SmoothMap {
    fn value(&self, x: f64) -> Result<f64, FracError>;
    fn derivative(&self, x: f64) -> Result<f64, FracError>;
}

/// Single-variable expression, other names resolved through `binding`.
#[derive(Debug, Clone)]
pub struct ExprMap {
    expr: Expr,
    derivative: Expr,
    var: String,
    binding: Binding,
}

impl ExprMap {
    pub fn new(expr: Expr, var: &str, binding: Binding) -> Result<Self, FracError> {
        let derivative = expr.diff(var)?;
        Ok(Self {
            expr,
            derivative,
            var: var.to_string(),
            binding,
        })
    }

    fn at(&self, x: f64) -> Binding {
        self.binding.clone().with(self.var.clone(), x)
    }
}

impl SmoothMap for ExprMap {
    fn value(&self, x: f64) -> Result<f64, FracError> {
        Ok(self.expr.evaluate(&self.at(x))?)
    }

    fn derivative(&self, x: f64) -> Result<f64, FracError> {
        Ok(self.derivative.evaluate(&self.at(x))?)
    }
}

/// Function and derivative given as closures.
pub struct ClosureMap<F, D> {
    pub f: F,
    pub df: D,
}

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> SmoothMap for ClosureMap<F, D> {
    fn value(&self, x: f64) -> Result<f64, FracError> {
        Ok((self.f)(x))
    }

    fn derivative(&self, x: f64) -> Result<f64, FracError> {
        Ok((self.df)(x))
    }
}

/// `d^α f(u(x))/dx^α = (D^α_u f)(u(x)) · (u'(x))^α` for α-differentiable `f`
/// and differentiable `u`.
pub fn chain_rule_a(f_of_u: &FracFunction, u_of_x: &dyn SmoothMap, alpha: FracOrder, x: f64) -> Result<f64, FracError> {
    let du = u_of_x.derivative(x)?;
    if du < 0.0 {
        return Err(FracError::NegativeBase(du));
    }
    let u = u_of_x.value(x)?;
    Ok(f_of_u.mrl_derivative_at(alpha, u)? * du.powf(alpha.value()))
}

/// `d^α f(u(x))/dx^α = f'(u(x)) · (D^α_x u)(x)` for differentiable `f` and
/// α-differentiable `u`.
pub fn chain_rule_b(f: &dyn SmoothMap, u_of_x: &FracFunction, alpha: FracOrder, x: f64) -> Result<f64, FracError> {
    let u = u_of_x.value_at(x)?;
    Ok(f.derivative(u)? * u_of_x.mrl_derivative_at(alpha, x)?)
}

/// Canonical coordinate pairs `(q_i, p_i)` over which fractional Poisson
/// brackets are summed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    pairs: Vec<(String, String)>,
}

impl PhaseSpace {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        Self {
            pairs: pairs.into_iter().map(|(q, p)| (q.into(), p.into())).collect(),
        }
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn coordinates(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(q, _)| q.as_str())
    }

    pub fn momenta(&self) -> impl Iterator<Item = &str> {
        self.pairs.iter().map(|(_, p)| p.as_str())
    }
}

/// `{U,V}_α = Γ(1+α)⁻² Σ_i [D^α_{q_i}U · D^α_{p_i}V − D^α_{p_i}U · D^α_{q_i}V]`.
///
/// The second product takes the `q_i` derivative of `V`, which makes the
/// bracket antisymmetric.
pub fn fractional_poisson_bracket(
    u: &Expr,
    v: &Expr,
    space: &PhaseSpace,
    alpha: FracOrder,
    point: &Binding,
) -> Result<f64, FracError> {
    let mut acc = 0.0;
    for (q, p) in space.pairs() {
        let du_q = frac_partial(u, q, alpha)?.evaluate(point)?;
        let dv_p = frac_partial(v, p, alpha)?.evaluate(point)?;
        let du_p = frac_partial(u, p, alpha)?.evaluate(point)?;
        let dv_q = frac_partial(v, q, alpha)?.evaluate(point)?;
        acc += du_q * dv_p - du_p * dv_q;
    }
    Ok(acc / coarse_grained_factor(alpha).powi(2))
}
