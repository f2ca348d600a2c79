//! Time stepping for `D^α η = F(η)` in the modified Riemann-Liouville sense,
//! i.e. with the initial value subtracted before differentiating.

mod frequency;
mod landau;
mod trajectory;

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::expr::{Binding, Expr, ExprError};
use crate::frac::{FracError, FracOrder};
use crate::symplectic::EquationsOfMotion;

pub use frequency::{fit_circle, measure_frequency, measure_frequency_xy, CircleFit};
pub use landau::{simulate_landau, LandauRun};
pub use trajectory::{Trajectory, TrajectoryMeta};

/// Name under which the current time is bound while evaluating a right-hand side.
pub const TIME_NAME: &str = "t";

/// Default cap on stored samples, in bytes.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("step h = {h} and horizon T = {t_end} need h > 0 and T >= h")]
    InvalidStep { h: f64, t_end: f64 },
    #[error("expected {expected} initial values, got {got}")]
    StateLength { expected: usize, got: usize },
    #[error("non-finite state at t = {time}")]
    Overflow { time: f64 },
    #[error("trajectory needs {needed} bytes, budget is {budget}")]
    MemoryBudgetExceeded { needed: usize, budget: usize },
    #[error("sequential composition needs a second-order form: {0}")]
    NotSecondOrderForm(String),
    #[error("a numeric fractional order is required")]
    SymbolicOrder,
    #[error("trajectory covers {periods:.2} periods, at least 3 are needed")]
    InsufficientPeriods { periods: f64 },
    #[error("trajectory has fewer than two planar coordinates")]
    NotPlanar,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Explicit Grünwald-Letnikov; explicit Euler at α = 1.
    GrunwaldLetnikov,
    /// Grünwald-Letnikov predictor with one corrector pass that evaluates
    /// the field at `t_n − αh/2`; Heun at α = 1.
    PredictorCorrector,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::GrunwaldLetnikov => "grunwald-letnikov",
            Scheme::PredictorCorrector => "predictor-corrector",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Composition {
    SingleOrder,
    /// `D^α D^α r = G(r, D^α r)` written as `D^α r = u`, `D^α u = G`.
    SequentialAlphaAlpha,
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Composition::SingleOrder => "single-order",
            Composition::SequentialAlphaAlpha => "sequential-alpha-alpha",
        })
    }
}

/// Right-hand sides `F_i(η)` over named state variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprField {
    variables: Vec<String>,
    rhs: Vec<Expr>,
    constants: Binding,
}

impl ExprField {
    pub fn new(variables: Vec<String>, rhs: Vec<Expr>, constants: Binding) -> Result<Self, DynamicsError> {
        if variables.len() != rhs.len() {
            return Err(DynamicsError::StateLength {
                expected: variables.len(),
                got: rhs.len(),
            });
        }
        Ok(Self {
            variables,
            rhs,
            constants,
        })
    }

    pub fn from_equations(eom: &EquationsOfMotion, constants: Binding) -> Result<Self, DynamicsError> {
        let (variables, rhs) = eom.rhs.iter().cloned().unzip();
        Self::new(variables, rhs, constants)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn rhs(&self) -> &[Expr] {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<(), ExprError> {
        let mut b = self.constants.clone();
        b.set(TIME_NAME, t);
        for (v, x) in self.variables.iter().zip(y) {
            b.set(v.as_str(), *x);
        }
        for (o, e) in out.iter_mut().zip(&self.rhs) {
            *o = e.evaluate(&b)?;
        }
        Ok(())
    }

    fn digest(&self, alpha: FracOrder) -> String {
        let mut hasher = Sha256::new();
        for (v, e) in self.variables.iter().zip(&self.rhs) {
            hasher.update(format!("D^{} {v} = {e};", alpha.value()));
        }
        for (k, x) in self.constants.iter() {
            hasher.update(format!("{k}={x:e};"));
        }
        let hex = format!("{:x}", hasher.finalize());
        hex[..16].to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalIvp {
    pub field: ExprField,
    pub alpha: FracOrder,
    pub initial: Vec<f64>,
    pub t_end: f64,
    pub h: f64,
    pub scheme: Scheme,
    pub composition: Composition,
    /// Short-memory window: only the last `window` history terms are kept.
    pub window: Option<usize>,
    pub memory_budget: usize,
}

impl FractionalIvp {
    pub fn new(field: ExprField, alpha: FracOrder, initial: Vec<f64>, t_end: f64, h: f64) -> Self {
        Self {
            field,
            alpha,
            initial,
            t_end,
            h,
            scheme: Scheme::PredictorCorrector,
            composition: Composition::SingleOrder,
            window: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }

    /// Problem for the equations of motion of a model with numeric order.
    pub fn from_equations(
        eom: &EquationsOfMotion,
        constants: Binding,
        initial: Vec<f64>,
        t_end: f64,
        h: f64,
    ) -> Result<Self, DynamicsError> {
        let alpha = eom.alpha.order().ok_or(DynamicsError::SymbolicOrder)?;
        let field = ExprField::from_equations(eom, constants)?;
        Ok(Self::new(field, alpha, initial, t_end, h))
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_composition(mut self, composition: Composition) -> Self {
        self.composition = composition;
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window.max(1));
        self
    }

    pub fn with_memory_budget(mut self, bytes: usize) -> Self {
        self.memory_budget = bytes;
        self
    }

    /// Number of steps; the grid has `steps() + 1` points.
    pub fn steps(&self) -> usize {
        (self.t_end / self.h * (1.0 + 1e-12)).floor() as usize
    }

    fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.h > 0.0 && self.h.is_finite() && self.t_end.is_finite() && self.t_end >= self.h) {
            return Err(DynamicsError::InvalidStep {
                h: self.h,
                t_end: self.t_end,
            });
        }
        let dim = self.field.dim();
        if self.initial.len() != dim {
            return Err(DynamicsError::StateLength {
                expected: dim,
                got: self.initial.len(),
            });
        }
        if self.composition == Composition::SequentialAlphaAlpha {
            let half = dim / 2;
            if !dim.is_multiple_of(2) || dim == 0 {
                return Err(DynamicsError::NotSecondOrderForm(format!("odd state dimension {dim}")));
            }
            for i in 0..half {
                let u = Expr::var(&self.field.variables[half + i]);
                if self.field.rhs[i].simplify() != u {
                    return Err(DynamicsError::NotSecondOrderForm(format!(
                        "D^alpha {} must equal {}",
                        self.field.variables[i],
                        self.field.variables[half + i]
                    )));
                }
            }
        }
        let needed = (self.steps() + 1)
            .saturating_mul(dim + 1)
            .saturating_mul(std::mem::size_of::<f64>());
        if needed > self.memory_budget {
            return Err(DynamicsError::MemoryBudgetExceeded {
                needed,
                budget: self.memory_budget,
            });
        }
        Ok(())
    }
}

/// `w_0 = 1`, `w_k = w_{k−1} (1 − (α+1)/k)`, cut after the last nonzero
/// weight (a single step at α = 1).
pub fn grunwald_weights(alpha: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for k in 1..=n {
        let next = w[k - 1] * (1.0 - (alpha + 1.0) / k as f64);
        if next == 0.0 {
            break;
        }
        w.push(next);
    }
    w
}

pub fn integrate(p: &FractionalIvp) -> Result<Trajectory, DynamicsError> {
    p.validate()?;
    let n = p.steps();
    let dim = p.field.dim();
    let a = p.alpha.value();
    let h = p.h;
    let ha = h.powf(a);
    let w = grunwald_weights(a, n);
    let memory = p.window.unwrap_or(usize::MAX).min(w.len() - 1);
    let y0 = &p.initial;

    // dev[i][k] = y_i(t_k) − y_i(0)
    let mut dev: Vec<Vec<f64>> = (0..dim).map(|_| Vec::with_capacity(n + 1)).collect();
    for d in dev.iter_mut() {
        d.push(0.0);
    }
    let mut prev = y0.clone();
    let mut f_prev = vec![0.0; dim];
    let mut f_pred = vec![0.0; dim];
    let mut pred = vec![0.0; dim];
    let mut base = vec![0.0; dim];
    for step in 1..=n {
        let t_prev = (step - 1) as f64 * h;
        let t = step as f64 * h;
        p.field.eval(t_prev, &prev, &mut f_prev)?;
        let m = memory.min(step);
        for i in 0..dim {
            let hist: f64 = w[1..=m]
                .iter()
                .zip(dev[i][step - m..step].iter().rev())
                .map(|(wk, d)| wk * d)
                .sum();
            base[i] = -hist;
            pred[i] = y0[i] + base[i] + ha * f_prev[i];
        }
        let next: Vec<f64> = match p.scheme {
            Scheme::GrunwaldLetnikov => pred.clone(),
            Scheme::PredictorCorrector => {
                p.field.eval(t, &pred, &mut f_pred)?;
                (0..dim)
                    .map(|i| y0[i] + base[i] + ha * ((1.0 - a / 2.0) * f_pred[i] + a / 2.0 * f_prev[i]))
                    .collect()
            }
        };
        if next.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::Overflow { time: t });
        }
        for i in 0..dim {
            dev[i].push(next[i] - y0[i]);
        }
        prev = next;
    }
    let states = dev
        .into_iter()
        .zip(y0)
        .map(|(d, y)| d.into_iter().map(|x| x + y).collect())
        .collect();
    let meta = TrajectoryMeta {
        scheme: p.scheme,
        composition: p.composition,
        alpha: a,
        h,
        t_end: p.t_end,
        window: p.window,
        model_hash: p.field.digest(p.alpha),
    };
    Ok(Trajectory::new(p.field.variables.clone(), h, n, states, meta))
}
