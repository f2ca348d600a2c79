use nalgebra::DMatrix;

use crate::expr::{Binding, Expr};
use crate::frac::{frac_partial, fractional_poisson_bracket, FracOrder, PhaseSpace};

use super::{Alpha, Model, SymplecticError, ALPHA_NAME};

/// Momentum conjugate to `var` in the doubled phase space.
pub fn momentum_name(var: &str) -> String {
    format!("pi_{var}")
}

/// Canonical pairs when the kinetic sector is already in Darboux form:
/// every variable is either some `q` with `a_q = p` (another variable) or
/// such a `p` with `a_p = 0`.
pub fn darboux_space(m: &Model) -> Option<PhaseSpace> {
    let vars = m.variables();
    let kinetic: Vec<Expr> = m.kinetic().iter().map(Expr::simplify).collect();
    let mut paired = vec![false; vars.len()];
    let mut pairs = Vec::new();
    for (i, a) in kinetic.iter().enumerate() {
        if let Expr::Var(n) = a {
            let j = m.index_of(n)?;
            if j == i || paired[i] || paired[j] || !kinetic[j].is_zero() {
                return None;
            }
            paired[i] = true;
            paired[j] = true;
            pairs.push((vars[i].clone(), vars[j].clone()));
        }
    }
    paired.iter().all(|&p| p).then(|| PhaseSpace::new(pairs))
}

/// Doubled phase space `(η_i, π_i)` with primary constraints
/// `Ω_i = π_i − a_i(η)`.
pub fn primary_constraints(m: &Model) -> (PhaseSpace, Vec<Expr>) {
    let space = PhaseSpace::new(m.variables().iter().map(|v| (v.clone(), momentum_name(v))));
    let constraints = m
        .variables()
        .iter()
        .zip(m.kinetic())
        .map(|(v, a)| (Expr::var(&momentum_name(v)) - a.clone()).simplify())
        .collect();
    (space, constraints)
}

/// Phase space used for brackets of `m`: Darboux pairs when available,
/// otherwise the doubled space of [`primary_constraints`].
pub fn dirac_space(m: &Model) -> PhaseSpace {
    darboux_space(m).unwrap_or_else(|| primary_constraints(m).0)
}

fn order_of(m: &Model, point: &Binding) -> Result<FracOrder, SymplecticError> {
    match m.alpha() {
        Alpha::Numeric(a) => Ok(a),
        Alpha::Symbolic => {
            let a = point.get(ALPHA_NAME).ok_or(SymplecticError::SymbolicOrder)?;
            Ok(FracOrder::new(a)?)
        }
    }
}

/// `{U,V}*_α = {U,V}_α − {U,φ_i}_α [C⁻¹]_ij {φ_j,V}_α` with
/// `C_ij = {φ_i, φ_j}_α`, evaluated at `point` in [`dirac_space`].
pub fn coarse_dirac_bracket(
    u: &Expr,
    v: &Expr,
    m: &Model,
    constraints: &[Expr],
    point: &Binding,
) -> Result<f64, SymplecticError> {
    let alpha = order_of(m, point)?;
    let space = dirac_space(m);
    let point = m.binding().merged(point);
    let pb = |a: &Expr, b: &Expr| fractional_poisson_bracket(a, b, &space, alpha, &point);
    let base = pb(u, v)?;
    if constraints.is_empty() {
        return Ok(base);
    }
    let n = constraints.len();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = pb(&constraints[i], &constraints[j])?;
        }
    }
    let singular = c.clone().svd(false, false).singular_values;
    let largest = singular.max();
    if !(largest > 0.0) || singular.min() <= 1e-12 * largest {
        return Err(SymplecticError::DegenerateConstraintMatrix);
    }
    let cinv = c.try_inverse().ok_or(SymplecticError::DegenerateConstraintMatrix)?;
    let left: Vec<f64> = constraints.iter().map(|phi| pb(u, phi)).collect::<Result<_, _>>()?;
    let right: Vec<f64> = constraints.iter().map(|phi| pb(phi, v)).collect::<Result<_, _>>()?;
    let mut correction = 0.0;
    for i in 0..n {
        for j in 0..n {
            correction += left[i] * cinv[(i, j)] * right[j];
        }
    }
    Ok(base - correction)
}

/// Coarse-grained Hamilton equations of a Darboux model under
/// `H̃ = H + λ_m φ_m`:
/// `D^α q = (α!)⁻¹ ∂^α_p H̃`, `D^α p = −(α!)⁻¹ ∂^α_q H̃`.
pub fn coarse_hamilton_jacobi(
    m: &Model,
    constraints: &[Expr],
    multipliers: &[f64],
) -> Result<Vec<(String, Expr)>, SymplecticError> {
    if constraints.len() != multipliers.len() {
        return Err(SymplecticError::MultiplierCount {
            constraints: constraints.len(),
            multipliers: multipliers.len(),
        });
    }
    let alpha = m.alpha().order().ok_or(SymplecticError::SymbolicOrder)?;
    let space = darboux_space(m)
        .ok_or_else(|| SymplecticError::NotCanonical("kinetic sector is not in Darboux form".into()))?;
    let inv_factor = m.alpha().gamma_factor().recip();
    let partial = |var: &str| -> Result<Expr, SymplecticError> {
        let mut terms = vec![frac_partial(m.potential(), var, alpha)?];
        for (phi, lam) in constraints.iter().zip(multipliers) {
            terms.push(Expr::real(*lam) * frac_partial(phi, var, alpha)?);
        }
        Ok((inv_factor.clone() * Expr::Sum(terms)).simplify())
    };
    let mut rhs = Vec::new();
    for v in m.variables() {
        let pair = space
            .pairs()
            .iter()
            .find(|(q, p)| q == v || p == v)
            .expect("every variable paired");
        let e = if &pair.0 == v {
            partial(&pair.1)?
        } else {
            (-partial(&pair.0)?).simplify()
        };
        rhs.push((v.clone(), e));
    }
    Ok(rhs)
}
