//! Plain-text model files.
//!
//! A model file is a TOML document:
//!
//! ```text
//! variables = ["q", "p"]          # ordered symplectic variables
//! positive = ["p"]                # optional positivity flags
//! kinetic = ["p", "0"]            # a_i, one per variable
//! potential = "1/2*p^2"
//! alpha = 1.0                     # or "symbolic"
//! constraints_gauge = []          # optional gauge-fixing conditions
//!
//! [constants]
//! m = 1.0                         # or "symbolic"
//! ```
//!
//! Unknown keys are rejected. Expressions are stored simplified, so
//! [`to_text`] followed by [`parse_model`] reproduces the model exactly.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::expr::{parse_expr, Expr};
use crate::frac::FracOrder;
use crate::symplectic::{Alpha, Model, ModelError};

const SYMBOLIC: &str = "symbolic";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ModelFileError {
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrWord {
    Number(f64),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    variables: Spanned<Vec<String>>,
    #[serde(default)]
    positive: Option<Spanned<Vec<String>>>,
    kinetic: Spanned<Vec<Spanned<String>>>,
    potential: Spanned<String>,
    alpha: Spanned<NumberOrWord>,
    #[serde(default)]
    constants: BTreeMap<String, Spanned<NumberOrWord>>,
    #[serde(default)]
    constraints_gauge: Vec<Spanned<String>>,
}

#[derive(Serialize)]
struct CanonicalModel {
    variables: Vec<String>,
    positive: Vec<String>,
    kinetic: Vec<String>,
    potential: String,
    alpha: CanonicalNumber,
    constraints_gauge: Vec<String>,
    constants: BTreeMap<String, CanonicalNumber>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum CanonicalNumber {
    Number(f64),
    Word(&'static str),
}

struct Source<'a>(&'a str);

impl Source<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        self.0[..span.start.min(self.0.len())].matches('\n').count() + 1
    }

    fn err(&self, span: Range<usize>, message: impl Into<String>) -> ModelFileError {
        ModelFileError {
            line: self.line(span),
            message: message.into(),
        }
    }

    fn expr(&self, s: &Spanned<String>, vars: &[&str], what: &str) -> Result<Expr, ModelFileError> {
        parse_expr(s.get_ref(), vars)
            .map(|e| e.simplify())
            .map_err(|e| self.err(s.span(), format!("{what}: column {}: {}", e.column, e.message)))
    }

    fn number(&self, v: &Spanned<NumberOrWord>, what: &str) -> Result<Option<f64>, ModelFileError> {
        match v.get_ref() {
            NumberOrWord::Number(x) if x.is_finite() => Ok(Some(*x)),
            NumberOrWord::Word(w) if w == SYMBOLIC => Ok(None),
            _ => Err(self.err(v.span(), format!("{what} must be a finite number or \"{SYMBOLIC}\""))),
        }
    }
}

/// Parses a model file; errors carry the 1-based line of the offending key.
pub fn parse_model(text: &str) -> Result<Model, ModelFileError> {
    let src = Source(text);
    let raw: RawModel = toml::from_str(text).map_err(|e| ModelFileError {
        line: e.span().map_or(1, |s| src.line(s)),
        message: e.message().to_string(),
    })?;
    let variables = raw.variables.get_ref().clone();
    let vars: Vec<&str> = variables.iter().map(String::as_str).collect();
    let kinetic = raw
        .kinetic
        .get_ref()
        .iter()
        .enumerate()
        .map(|(i, k)| src.expr(k, &vars, &format!("kinetic[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let potential = src.expr(&raw.potential, &vars, "potential")?;
    let gauge = raw
        .constraints_gauge
        .iter()
        .map(|g| src.expr(g, &vars, "constraints_gauge"))
        .collect::<Result<Vec<_>, _>>()?;
    let constants = raw
        .constants
        .iter()
        .map(|(k, v)| Ok((k.clone(), src.number(v, k)?)))
        .collect::<Result<BTreeMap<_, _>, ModelFileError>>()?;
    let alpha = match src.number(&raw.alpha, "alpha")? {
        None => Alpha::Symbolic,
        Some(a) => Alpha::Numeric(FracOrder::new(a).map_err(|e| src.err(raw.alpha.span(), e.to_string()))?),
    };

    let model_err = |e: ModelError| {
        let span = match &e {
            ModelError::UndeclaredName { context, .. } if context.starts_with("kinetic") => raw.kinetic.span(),
            ModelError::UndeclaredName { context, .. } if context.starts_with("potential") => raw.potential.span(),
            ModelError::UndeclaredName { .. } => raw.constraints_gauge.first().map_or(0..0, |g| g.span()),
            ModelError::LengthMismatch { .. } => raw.kinetic.span(),
            ModelError::UnknownVariable(_) => raw.positive.as_ref().map_or(0..0, |p| p.span()),
            _ => raw.variables.span(),
        };
        src.err(span, e.to_string())
    };
    Model::new(variables, kinetic, potential, constants)
        .and_then(|m| m.with_positive(raw.positive.as_ref().map(|p| p.get_ref().clone()).unwrap_or_default()))
        .and_then(|m| m.with_gauge(gauge))
        .map(|m| m.with_alpha(alpha))
        .map_err(model_err)
}

/// Canonical text of a model, accepted by [`parse_model`].
pub fn to_text(m: &Model) -> String {
    let number = |v: Option<f64>| v.map_or(CanonicalNumber::Word(SYMBOLIC), CanonicalNumber::Number);
    let canonical = CanonicalModel {
        variables: m.variables().to_vec(),
        positive: m.positive().iter().cloned().collect(),
        kinetic: m.kinetic().iter().map(|k| k.simplify().to_string()).collect(),
        potential: m.potential().simplify().to_string(),
        alpha: number(m.alpha().order().map(FracOrder::value)),
        constraints_gauge: m.gauge().iter().map(|g| g.simplify().to_string()).collect(),
        constants: m.constants().iter().map(|(k, v)| (k.clone(), number(*v))).collect(),
    };
    toml::to_string(&canonical).expect("model serializes")
}
