use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::expr::{Assumptions, Binding, Expr, EULER_GAMMA_NAME};
use crate::frac::FracOrder;

/// Name of the fractional order inside expressions.
pub const ALPHA_NAME: &str = "alpha";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{variables} variables but {kinetic} kinetic coefficients")]
    LengthMismatch { variables: usize, kinetic: usize },
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("`{0}` is reserved")]
    ReservedName(String),
    #[error("`{name}` in {context} is neither a variable nor a declared constant")]
    UndeclaredName { name: String, context: String },
    #[error("positivity declared for unknown variable `{0}`")]
    UnknownVariable(String),
}

/// Fractional order of a model: a number, or the symbol `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Symbolic,
    Numeric(FracOrder),
}

impl Alpha {
    pub fn classical() -> Self {
        Alpha::Numeric(FracOrder::CLASSICAL)
    }

    pub fn order(&self) -> Option<FracOrder> {
        match self {
            Alpha::Symbolic => None,
            Alpha::Numeric(a) => Some(*a),
        }
    }

    /// `alpha` as an expression: the symbol, or its exact rational value.
    pub fn as_expr(&self) -> Expr {
        match self {
            Alpha::Symbolic => Expr::sym(ALPHA_NAME),
            Alpha::Numeric(a) => Expr::Const(a.as_rational()),
        }
    }

    /// `Γ(1+α)`, folded to a number for integer arguments.
    pub fn gamma_factor(&self) -> Expr {
        Expr::gamma(Expr::one() + self.as_expr()).simplify()
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Symbolic => write!(f, "symbolic"),
            Alpha::Numeric(a) => write!(f, "{}", a.value()),
        }
    }
}

/// First-order system `L = a_i(η) η̇^i − V(η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    variables: Vec<String>,
    kinetic: Vec<Expr>,
    potential: Expr,
    alpha: Alpha,
    constants: BTreeMap<String, Option<f64>>,
    positive: BTreeSet<String>,
    gauge: Vec<Expr>,
}

impl Model {
    /// Builds a model; `constants` maps every non-variable name to its value,
    /// or `None` to keep it symbolic.
    pub fn new(
        variables: Vec<String>,
        kinetic: Vec<Expr>,
        potential: Expr,
        constants: BTreeMap<String, Option<f64>>,
    ) -> Result<Self, ModelError> {
        if variables.len() != kinetic.len() {
            return Err(ModelError::LengthMismatch {
                variables: variables.len(),
                kinetic: kinetic.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if v == ALPHA_NAME || v == EULER_GAMMA_NAME {
                return Err(ModelError::ReservedName(v.clone()));
            }
            if !seen.insert(v.clone()) {
                return Err(ModelError::DuplicateVariable(v.clone()));
            }
        }
        for c in constants.keys() {
            if seen.contains(c) {
                return Err(ModelError::DuplicateVariable(c.clone()));
            }
            if c == ALPHA_NAME {
                return Err(ModelError::ReservedName(c.clone()));
            }
        }
        let m = Self {
            kinetic: kinetic.iter().map(|a| a.retag(&seen)).collect(),
            potential: potential.retag(&seen),
            variables,
            alpha: Alpha::classical(),
            constants,
            positive: BTreeSet::new(),
            gauge: Vec::new(),
        };
        for (i, a) in m.kinetic.iter().enumerate() {
            m.check_names(a, &format!("kinetic coefficient of {}", m.variables[i]))?;
        }
        m.check_names(&m.potential, "potential")?;
        Ok(m)
    }

    fn check_names(&self, e: &Expr, context: &str) -> Result<(), ModelError> {
        for name in e.free_names() {
            let known = self.variables.contains(&name)
                || self.constants.contains_key(&name)
                || name == ALPHA_NAME
                || name == EULER_GAMMA_NAME;
            if !known {
                return Err(ModelError::UndeclaredName {
                    name,
                    context: context.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: Alpha) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_positive<I, S>(mut self, names: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for n in names {
            let n = n.into();
            if !self.variables.contains(&n) {
                return Err(ModelError::UnknownVariable(n));
            }
            self.positive.insert(n);
        }
        Ok(self)
    }

    /// Gauge-fixing conditions imposed when the iteration finds zero modes
    /// without constraints.
    pub fn with_gauge(mut self, gauge: Vec<Expr>) -> Result<Self, ModelError> {
        let vars: BTreeSet<String> = self.variables.iter().cloned().collect();
        let gauge: Vec<Expr> = gauge.iter().map(|g| g.retag(&vars)).collect();
        for g in &gauge {
            self.check_names(g, "gauge condition")?;
        }
        self.gauge = gauge;
        Ok(self)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn kinetic(&self) -> &[Expr] {
        &self.kinetic
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn constants(&self) -> &BTreeMap<String, Option<f64>> {
        &self.constants
    }

    pub fn positive(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn gauge(&self) -> &[Expr] {
        &self.gauge
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    pub fn assumptions(&self) -> Assumptions {
        Assumptions::positive(self.positive.iter().cloned())
    }

    /// Values of all numeric constants, plus `alpha` when numeric.
    pub fn binding(&self) -> Binding {
        let mut b: Binding = self
            .constants
            .iter()
            .filter_map(|(k, v)| v.map(|v| (k.clone(), v)))
            .collect();
        if let Alpha::Numeric(a) = self.alpha {
            b.set(ALPHA_NAME, a.value());
        }
        b
    }

    /// Same model with a different kinetic sector and potential; names are
    /// re-validated.
    pub(crate) fn rebuild(
        &self,
        variables: Vec<String>,
        kinetic: Vec<Expr>,
        potential: Expr,
    ) -> Result<Model, ModelError> {
        let mut m = Model::new(variables, kinetic, potential, self.constants.clone())?;
        m.alpha = self.alpha;
        m.positive = self.positive.clone();
        m.gauge = self.gauge.clone();
        Ok(m)
    }

    /// Multiplies the Lagrangian by `k`.
    pub fn scaled(&self, k: &Expr) -> Model {
        let kinetic = self
            .kinetic
            .iter()
            .map(|a| (k.clone() * a.clone()).simplify())
            .collect();
        let potential = (k.clone() * self.potential.clone()).simplify();
        self.rebuild(self.variables.clone(), kinetic, potential)
            .expect("scaling keeps names valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn e(text: &str) -> Expr {
        parse_expr(text, &[]).unwrap()
    }

    #[test]
    fn validates_shape_and_names() {
        let vars = vec!["q".to_string(), "p".to_string()];
        assert!(matches!(
            Model::new(vars.clone(), vec![e("p")], e("0"), BTreeMap::new()),
            Err(ModelError::LengthMismatch { .. })
        ));
        assert!(matches!(
            Model::new(vars.clone(), vec![e("p"), e("0")], e("w*q"), BTreeMap::new()),
            Err(ModelError::UndeclaredName { .. })
        ));
        let m = Model::new(
            vars,
            vec![e("p"), e("0")],
            e("w*q"),
            BTreeMap::from([("w".to_string(), Some(2.0))]),
        )
        .unwrap();
        assert_eq!(m.kinetic()[0], Expr::var("p"));
        assert_eq!(m.binding().get("w"), Some(2.0));
        assert_eq!(m.binding().get(ALPHA_NAME), Some(1.0));
    }

    #[test]
    fn gamma_factor_folds_at_one() {
        assert_eq!(Alpha::classical().gamma_factor(), Expr::one());
        assert_eq!(
            Alpha::Symbolic.gamma_factor(),
            Expr::gamma(Expr::one() + Expr::sym(ALPHA_NAME)).simplify()
        );
    }
}
