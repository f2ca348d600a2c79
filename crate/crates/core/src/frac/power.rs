//! Exact MRL derivatives of finite power sums.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::expr::poly::{Atom, Monomial, NameKind, Poly};
use crate::expr::{pow_f64, Assumptions, Binding, Expr, Rational};

use super::{FracError, FracOrder};

/// `Σ c_β · x^β` with rational `β ≥ 0` and `x`-free coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    var: Expr,
    terms: BTreeMap<Rational, Expr>,
}

impl PowerSum {
    /// Reads `e` as a power sum in `var`; every other name is a constant.
    /// `var` is taken positive, so `(x^2)^(1/2)` reads as `x`.
    pub fn from_expr(e: &Expr, var: &str) -> Result<Self, FracError> {
        let poly = Poly::from_expr(e, &Assumptions::positive([var]));
        let mut kind = NameKind::Var;
        let mut grouped: BTreeMap<Rational, Poly> = BTreeMap::new();
        for (m, c) in poly.terms() {
            let mut beta = Rational::zero();
            let mut rest = Monomial::new();
            for (a, exp) in m {
                match a {
                    Atom::Name(n, k) if &**n == var => {
                        kind = *k;
                        beta = exp.clone();
                    }
                    other => {
                        if let Atom::Gamma(p) | Atom::Opaque(p) = other {
                            if p.depends_on(var) {
                                return Err(FracError::OutsideFragment(format!(
                                    "`{e}` is not a sum of powers of {var}"
                                )));
                            }
                        }
                        rest.insert(other.clone(), exp.clone());
                    }
                }
            }
            if beta.is_negative() {
                return Err(FracError::OutsideFragment(format!("negative power of {var} in `{e}`")));
            }
            let slot = grouped.entry(beta).or_default();
            *slot = slot.add(&Poly::from_term(c.clone(), rest));
        }
        let var = match kind {
            NameKind::Var => Expr::var(var),
            NameKind::Symbol => Expr::sym(var),
        };
        Ok(Self {
            var,
            terms: grouped
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(b, c)| (b, c.to_expr()))
                .collect(),
        })
    }

    /// Exponents with their coefficients, ascending in the exponent.
    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Expr)> {
        self.terms.iter()
    }

    pub fn to_expr(&self) -> Expr {
        let parts: Vec<Expr> = self
            .terms
            .iter()
            .map(|(b, c)| c.clone() * self.var.clone().pow(b.clone()))
            .collect();
        Expr::Sum(parts).simplify()
    }

    /// Value at `x`, with coefficient symbols taken from `binding`.
    pub fn evaluate(&self, x: f64, binding: &Binding) -> Result<f64, FracError> {
        let mut acc = 0.0;
        for (b, c) in &self.terms {
            acc += c.evaluate(binding)? * pow_f64(x, b);
        }
        Ok(acc)
    }
}

/// Term-by-term power rule `D^α x^β = Γ(β+1)/Γ(β+1−α) · x^(β−α)`;
/// constants are annihilated.
pub fn mrl_derivative_power(f: &PowerSum, alpha: FracOrder) -> PowerSum {
    let a = alpha.as_rational();
    let one = Rational::one();
    let terms = f
        .terms
        .iter()
        .filter(|(b, _)| !b.is_zero())
        .map(|(b, c)| {
            let ratio = Expr::gamma(Expr::Const(b + &one)) * Expr::gamma(Expr::Const(b + &one - &a)).recip();
            (b - &a, (c.clone() * ratio).simplify())
        })
        .filter(|(_, c)| !c.is_zero())
        .collect();
    PowerSum {
        var: f.var.clone(),
        terms,
    }
}

/// Partial MRL derivative of `e` in `var`, other names held fixed.
/// At α = 1 this is the ordinary partial derivative.
pub fn frac_partial(e: &Expr, var: &str, alpha: FracOrder) -> Result<Expr, FracError> {
    if alpha.is_classical() {
        return Ok(e.diff(var)?);
    }
    Ok(mrl_derivative_power(&PowerSum::from_expr(e, var)?, alpha).to_expr())
}
