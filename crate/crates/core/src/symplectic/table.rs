use serde::Serialize;

use crate::expr::{Binding, Expr, ExprError};
use crate::json::{to_pretty, Sig17};

use super::Alpha;

pub const CONVENTION: &str =
    "f_ij = d(a_j)/d(eta_i) - d(a_i)/d(eta_j); {eta_i, eta_j}* = (f^-1)_ij; [eta_i, eta_j] = i*hbar*{eta_i, eta_j}*";

/// Name of Planck's constant in commutator expressions.
pub const HBAR_NAME: &str = "hbar";

/// Pairwise brackets `{η_i, η_j}*` with their coarse-grained and commutator
/// forms.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketTable {
    variables: Vec<String>,
    alpha: Alpha,
    brackets: Vec<Vec<Expr>>,
    hbar: Expr,
    binding: Binding,
    notes: Vec<String>,
}

impl BracketTable {
    pub fn new(variables: Vec<String>, brackets: Vec<Vec<Expr>>, alpha: Alpha, binding: Binding) -> Self {
        Self {
            variables,
            alpha,
            brackets,
            hbar: Expr::sym(HBAR_NAME),
            binding,
            notes: Vec::new(),
        }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    /// `{η_i, η_j}* = (f⁻¹)_ij`.
    pub fn brackets(&self) -> &[Vec<Expr>] {
        &self.brackets
    }

    pub fn get(&self, a: &str, b: &str) -> Option<&Expr> {
        let i = self.variables.iter().position(|v| v == a)?;
        let j = self.variables.iter().position(|v| v == b)?;
        Some(&self.brackets[i][j])
    }

    /// `(α!)⁻² = Γ(1+α)⁻²`, carried as a separate factor.
    pub fn prefactor(&self) -> Expr {
        self.alpha.gamma_factor().powi(-2).simplify()
    }

    pub fn is_coarse_grained(&self) -> bool {
        self.alpha != Alpha::classical()
    }

    fn map(&self, factor: &Expr) -> Vec<Vec<Expr>> {
        self.brackets
            .iter()
            .map(|row| row.iter().map(|b| (factor.clone() * b.clone()).simplify()).collect())
            .collect()
    }

    /// `(α!)⁻² (f⁻¹)_ij`.
    pub fn coarse_grained(&self) -> Vec<Vec<Expr>> {
        self.map(&self.prefactor())
    }

    /// `c_ij` with `[η_i, η_j] = i c_ij`, `c_ij = ħ {η_i, η_j}*`.
    pub fn commutators(&self) -> Vec<Vec<Expr>> {
        self.map(&self.hbar)
    }

    /// Numeric brackets under the table's constants overridden by `extra`.
    pub fn evaluate(&self, extra: &Binding) -> Result<Vec<Vec<f64>>, ExprError> {
        let b = self.binding.merged(extra);
        self.brackets
            .iter()
            .map(|row| row.iter().map(|e| e.evaluate(&b)).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        to_pretty(&TableJson::from(self))
    }
}

/// Replaces the symbol `hbar` in the commutator column by a number.
pub fn brackets_to_commutators(t: &BracketTable, hbar: f64) -> BracketTable {
    let mut out = t.clone();
    out.hbar = Expr::real(hbar);
    out
}

#[derive(Serialize)]
#[serde(untagged)]
enum AlphaJson {
    Symbolic(&'static str),
    Value(Sig17),
}

#[derive(Serialize)]
struct Normalizations {
    /// `f⁻¹`, as printed for the worked Hall example.
    direct: Vec<Vec<String>>,
    /// `(α!)⁻² f⁻¹`, as required by the constraint-matrix relation.
    coarse_grained: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct NumericJson {
    direct: Vec<Vec<Sig17>>,
    coarse_grained: Vec<Vec<Sig17>>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    variables: &'a [String],
    alpha: AlphaJson,
    convention: &'static str,
    prefactor: String,
    brackets: Vec<Vec<String>>,
    commutators: Vec<Vec<String>>,
    normalizations: Normalizations,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<NumericJson>,
    notes: &'a [String],
}

fn strings(m: &[Vec<Expr>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(Expr::to_string).collect()).collect()
}

impl<'a> From<&'a BracketTable> for TableJson<'a> {
    fn from(t: &'a BracketTable) -> Self {
        let coarse = t.coarse_grained();
        let numeric = |m: &[Vec<Expr>]| -> Option<Vec<Vec<Sig17>>> {
            m.iter()
                .map(|r| r.iter().map(|e| e.evaluate(&t.binding).ok().map(Sig17)).collect())
                .collect()
        };
        let values = match (numeric(&t.brackets), numeric(&coarse)) {
            (Some(direct), Some(coarse_grained)) => Some(NumericJson { direct, coarse_grained }),
            _ => None,
        };
        TableJson {
            variables: &t.variables,
            alpha: match t.alpha {
                Alpha::Symbolic => AlphaJson::Symbolic("symbolic"),
                Alpha::Numeric(a) => AlphaJson::Value(Sig17(a.value())),
            },
            convention: CONVENTION,
            prefactor: t.prefactor().to_string(),
            brackets: strings(&t.brackets),
            commutators: strings(&t.commutators()),
            normalizations: Normalizations {
                direct: strings(&t.brackets),
                coarse_grained: strings(&coarse),
            },
            values,
            notes: &t.notes,
        }
    }
}
