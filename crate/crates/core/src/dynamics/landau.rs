use num_complex::Complex64;

use crate::expr::{parse_expr, Binding};
use crate::frac::{gamma, FracError, FracOrder};

use super::{integrate, Composition, DynamicsError, ExprField, FractionalIvp, Scheme, Trajectory};

/// Planar charge in a perpendicular field, `z = x + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauRun {
    pub e: f64,
    pub b: f64,
    pub m: f64,
    pub alpha: FracOrder,
    pub z0: Complex64,
    pub v0: Complex64,
    pub t_end: f64,
    pub h: f64,
    pub scheme: Scheme,
    pub composition: Composition,
}

impl LandauRun {
    pub fn new(e: f64, b: f64, m: f64, alpha: FracOrder, t_end: f64, h: f64) -> Self {
        Self {
            e,
            b,
            m,
            alpha,
            z0: Complex64::new(0.0, 0.0),
            v0: Complex64::new(0.0, 1.0),
            t_end,
            h,
            scheme: Scheme::PredictorCorrector,
            composition: Composition::SingleOrder,
        }
    }

    pub fn with_initial(mut self, z0: Complex64, v0: Complex64) -> Self {
        self.z0 = z0;
        self.v0 = v0;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_composition(mut self, composition: Composition) -> Self {
        self.composition = composition;
        self
    }

    /// Cyclotron frequency `ω = eB/m`.
    pub fn omega(&self) -> f64 {
        self.e * self.b / self.m
    }
}

/// Integrates the Landau problem.
///
/// `SingleOrder` uses the integer-order reduction
/// `z̈ = (iω/Γ(1+α)) ż` as a first-order system in `(x, y, vx, vy)`.
/// `SequentialAlphaAlpha` integrates `D^α z = u`, `D^α u = iω u` in
/// `(x, y, ux, uy)` with `u(0) = Γ(1+α) v0`.
pub fn simulate_landau(run: &LandauRun) -> Result<Trajectory, DynamicsError> {
    if run.b == 0.0 || !run.b.is_finite() {
        return Err(DynamicsError::InvalidParameter(format!(
            "B = {} must be nonzero",
            run.b
        )));
    }
    if !(run.m > 0.0 && run.m.is_finite()) {
        return Err(DynamicsError::InvalidParameter(format!(
            "m = {} must be positive",
            run.m
        )));
    }
    let g = gamma(1.0 + run.alpha.value()).map_err(FracError::from)?;
    let (vars, order, w, u0) = match run.composition {
        Composition::SingleOrder => (["x", "y", "vx", "vy"], FracOrder::CLASSICAL, run.omega() / g, run.v0),
        Composition::SequentialAlphaAlpha => (["x", "y", "ux", "uy"], run.alpha, run.omega(), run.v0 * g),
    };
    let rhs = [
        vars[2].to_string(),
        vars[3].to_string(),
        format!("-w*{}", vars[3]),
        format!("w*{}", vars[2]),
    ];
    let field = ExprField::new(
        vars.iter().map(|v| v.to_string()).collect(),
        rhs.iter()
            .map(|r| parse_expr(r, &vars))
            .collect::<Result<_, _>>()
            .expect("static right-hand sides parse"),
        Binding::new().with("w", w),
    )?;
    let ivp = FractionalIvp::new(field, order, vec![run.z0.re, run.z0.im, u0.re, u0.im], run.t_end, run.h)
        .with_scheme(run.scheme)
        .with_composition(run.composition);
    let mut t = integrate(&ivp)?;
    t.meta_mut().alpha = run.alpha.value();
    Ok(t)
}
