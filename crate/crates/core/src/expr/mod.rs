//! Symbolic expressions with exact rational coefficients.
//!
//! An [`Expr`] is an immutable tree. Construction through the operator
//! overloads never simplifies; call [`Expr::simplify`] (or
//! [`Expr::simplify_with`] when some names are known to be positive) to
//! obtain the canonical sum-of-products form. Floats only enter through
//! [`Expr::evaluate`].

mod parse;
pub(crate) mod poly;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frac::gamma;

pub use parse::{parse_expr, ParseError};
pub(crate) use poly::Poly;

/// Exact rational number used for coefficients and exponents.
pub type Rational = BigRational;

/// Shared, cheaply clonable symbol name.
pub type Name = Arc<str>;

/// Name of the Euler-Mascheroni constant in expression text.
pub const EULER_GAMMA_NAME: &str = "gamma_ec";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("symbol `{0}` is not bound")]
    UnboundSymbol(String),
    #[error("Gamma factor depends on `{0}` and cannot be differentiated")]
    NonDifferentiable(String),
    #[error("Gamma function pole at {0}")]
    GammaPole(f64),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    /// Named constant such as `e`, `B`, `hbar` or `alpha`.
    Symbol(Name),
    /// Dynamical variable (one of a model's coordinates, or `t`).
    Var(Name),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Gamma(Box<Expr>),
}

/// Names known to take strictly positive values.
///
/// Rational powers only fold `(x^a)^b` into `x^(ab)` when this is valid, which
/// for even roots requires `x > 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    positive: BTreeSet<String>,
}

impl Assumptions {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn positive<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            positive: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_positive(&self, name: &str) -> bool {
        self.positive.contains(name)
    }

    pub fn insert(&mut self, name: impl Into<String>) {
        self.positive.insert(name.into());
    }
}

/// Assignment of real values to symbol names.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    values: BTreeMap<String, f64>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.values.insert(name.into(), value);
        self
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.values.insert(name.into(), value);
    }

    /// Looks up `name`, falling back to built-in constants.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied().or(match name {
            EULER_GAMMA_NAME => Some(gamma::EULER_GAMMA),
            _ => None,
        })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    /// Entries of `other` override entries of `self`.
    pub fn merged(&self, other: &Binding) -> Binding {
        let mut out = self.clone();
        out.values.extend(other.values.iter().map(|(k, v)| (k.clone(), *v)));
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Binding {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Self {
            values: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }
}

pub(crate) fn rational_from_f64(x: f64) -> Option<Rational> {
    BigRational::from_float(x)
}

/// Shortest small-denominator rational that converts back to exactly `x`,
/// falling back to the exact binary expansion.
pub fn rational_approx(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if let Some(r) = num_rational::Ratio::<i64>::approximate_float(x) {
        let (n, d) = (*r.numer() as f64, *r.denom() as f64);
        if n / d == x {
            return Some(BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())));
        }
    }
    rational_from_f64(x)
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn rational(numer: i64, denom: i64) -> Expr {
        Expr::Const(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Exact constant closest in spirit to `x` (see [`rational_approx`]).
    pub fn real(x: f64) -> Expr {
        Expr::Const(rational_approx(x).expect("finite constant"))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Arc::from(name))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::Symbol(Arc::from(name))
    }

    pub fn gamma(arg: Expr) -> Expr {
        Expr::Gamma(Box::new(arg))
    }

    pub fn pow(self, exponent: Rational) -> Expr {
        Expr::Pow(Box::new(self), exponent)
    }

    pub fn powi(self, exponent: i64) -> Expr {
        self.pow(BigRational::from_integer(exponent.into()))
    }

    pub fn recip(self) -> Expr {
        self.powi(-1)
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        Expr::Sum(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        Expr::Product(factors)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True only for the literal constant zero; simplify first for a
    /// structural zero test.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    pub fn simplify(&self) -> Expr {
        self.simplify_with(&Assumptions::none())
    }

    pub fn simplify_with(&self, assumptions: &Assumptions) -> Expr {
        Poly::from_expr(self, assumptions).to_expr()
    }

    /// All symbol and variable names occurring in the tree.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Symbol(n) | Expr::Var(n) => {
                out.insert(n.to_string());
            }
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_names(out)),
            Expr::Pow(b, _) => b.collect_names(out),
            Expr::Gamma(a) => a.collect_names(out),
        }
    }

    pub fn depends_on(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Symbol(n) | Expr::Var(n) => &**n == name,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().any(|x| x.depends_on(name)),
            Expr::Pow(b, _) => b.depends_on(name),
            Expr::Gamma(a) => a.depends_on(name),
        }
    }

    /// Names in `vars` become variables and every other name a symbol.
    pub fn retag(&self, vars: &BTreeSet<String>) -> Expr {
        match self {
            Expr::Symbol(n) | Expr::Var(n) => {
                if vars.contains(&**n) {
                    Expr::Var(n.clone())
                } else {
                    Expr::Symbol(n.clone())
                }
            }
            Expr::Const(_) => self.clone(),
            Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| x.retag(vars)).collect()),
            Expr::Product(xs) => Expr::Product(xs.iter().map(|x| x.retag(vars)).collect()),
            Expr::Pow(b, k) => Expr::Pow(Box::new(b.retag(vars)), k.clone()),
            Expr::Gamma(a) => Expr::Gamma(Box::new(a.retag(vars))),
        }
    }

    /// Replaces every occurrence of `name` by `value` (no simplification).
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        match self {
            Expr::Symbol(n) | Expr::Var(n) if &**n == name => value.clone(),
            Expr::Const(_) | Expr::Symbol(_) | Expr::Var(_) => self.clone(),
            Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| x.substitute(name, value)).collect()),
            Expr::Product(xs) => Expr::Product(xs.iter().map(|x| x.substitute(name, value)).collect()),
            Expr::Pow(b, k) => Expr::Pow(Box::new(b.substitute(name, value)), k.clone()),
            Expr::Gamma(a) => Expr::Gamma(Box::new(a.substitute(name, value))),
        }
    }

    /// Symbolic partial derivative with respect to the name `v`, simplified.
    pub fn diff(&self, v: &str) -> Result<Expr, ExprError> {
        Ok(self.diff_raw(v)?.simplify())
    }

    pub fn diff_with(&self, v: &str, assumptions: &Assumptions) -> Result<Expr, ExprError> {
        Ok(self.diff_raw(v)?.simplify_with(assumptions))
    }

    fn diff_raw(&self, v: &str) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Symbol(n) | Expr::Var(n) => {
                if &**n == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| x.diff_raw(v)).collect::<Result<Vec<_>, _>>()?),
            Expr::Product(xs) => {
                let mut terms = Vec::new();
                for (i, x) in xs.iter().enumerate() {
                    if !x.depends_on(v) {
                        continue;
                    }
                    let mut factors = Vec::with_capacity(xs.len());
                    for (j, y) in xs.iter().enumerate() {
                        factors.push(if i == j { x.diff_raw(v)? } else { y.clone() });
                    }
                    terms.push(Expr::Product(factors));
                }
                Expr::Sum(terms)
            }
            Expr::Pow(b, k) => {
                if !b.depends_on(v) {
                    return Ok(Expr::zero());
                }
                Expr::Product(vec![
                    Expr::Const(k.clone()),
                    Expr::Pow(b.clone(), k - BigRational::one()),
                    b.diff_raw(v)?,
                ])
            }
            Expr::Gamma(a) => {
                if a.depends_on(v) {
                    return Err(ExprError::NonDifferentiable(v.to_string()));
                }
                Expr::zero()
            }
        })
    }

    /// Floating-point evaluation under `b`.
    pub fn evaluate(&self, b: &Binding) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Const(c) => rational_to_f64(c),
            Expr::Symbol(n) | Expr::Var(n) => b.get(n).ok_or_else(|| ExprError::UnboundSymbol(n.to_string()))?,
            Expr::Sum(xs) => {
                let mut acc = 0.0;
                for x in xs {
                    acc += x.evaluate(b)?;
                }
                acc
            }
            Expr::Product(xs) => {
                let mut acc = 1.0;
                for x in xs {
                    acc *= x.evaluate(b)?;
                }
                acc
            }
            Expr::Pow(base, k) => {
                let x = base.evaluate(b)?;
                pow_f64(x, k)
            }
            Expr::Gamma(a) => {
                let x = a.evaluate(b)?;
                gamma::gamma(x).map_err(|_| ExprError::GammaPole(x))?
            }
        })
    }
}

pub(crate) fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 only fails on overflow of both parts.
        let n = c.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = c.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub(crate) fn pow_f64(x: f64, k: &Rational) -> f64 {
    if k.is_integer() {
        if let Some(n) = k.to_integer().to_i32() {
            return x.powi(n);
        }
    }
    x.powf(rational_to_f64(k))
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs.recip()])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Product(vec![Expr::int(-1), self])
    }
}

// Printing follows the grammar accepted by `parse_expr`, so canonical forms
// survive a print/parse round trip.

fn fmt_rational(c: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn is_atomic(e: &Expr) -> bool {
    match e {
        Expr::Symbol(_) | Expr::Var(_) | Expr::Gamma(_) => true,
        Expr::Const(c) => c.is_integer() && !c.is_negative(),
        _ => false,
    }
}

/// Splits a leading negative sign off a term for `a - b` style printing.
fn negated_term(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Product(xs) => match xs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let c = -c;
                let mut rest: Vec<Expr> = xs[1..].to_vec();
                if !c.is_one() {
                    rest.insert(0, Expr::Const(c));
                }
                Some(match rest.len() {
                    0 => Expr::one(),
                    1 => rest.pop().unwrap(),
                    _ => Expr::Product(rest),
                })
            }
            _ => None,
        },
        _ => None,
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => fmt_rational(c, f),
            Expr::Symbol(n) | Expr::Var(n) => write!(f, "{n}"),
            Expr::Sum(xs) => {
                if xs.is_empty() {
                    return write!(f, "0");
                }
                for (i, x) in xs.iter().enumerate() {
                    match (i, negated_term(x)) {
                        (0, _) => write!(f, "{x}")?,
                        (_, Some(neg)) => write!(f, " - {neg}")?,
                        (_, None) => write!(f, " + {x}")?,
                    }
                }
                Ok(())
            }
            Expr::Product(xs) => {
                if xs.is_empty() {
                    return write!(f, "1");
                }
                let mut first = true;
                for (i, x) in xs.iter().enumerate() {
                    if i == 0 && xs.len() > 1 {
                        if let Expr::Const(c) = x {
                            if (-c).is_one() {
                                write!(f, "-")?;
                                continue;
                            }
                        }
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    match x {
                        Expr::Sum(_) => write!(f, "({x})")?,
                        Expr::Const(c) if i > 0 && c.is_negative() => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
            Expr::Pow(b, k) => {
                if is_atomic(b) {
                    write!(f, "{b}")?;
                } else {
                    write!(f, "({b})")?;
                }
                if k.is_integer() && !k.is_negative() {
                    write!(f, "^{}", k.numer())
                } else {
                    write!(f, "^(")?;
                    fmt_rational(k, f)?;
                    write!(f, ")")
                }
            }
            Expr::Gamma(a) => write!(f, "Gamma({a})"),
        }
    }
}
