//! Planar charge in a strong perpendicular field: the Landau model, its
//! fractional brackets, cyclotron corrections and estimates of α.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{Binding, Expr};
use crate::frac::{gamma, FracError, FracOrder, EULER_GAMMA};
use crate::json::{to_pretty, Sig17};
use crate::symplectic::{fj_iterate, Alpha, BracketTable, Model, SymplecticError, Terminal, ALPHA_NAME};

/// Euler-Mascheroni constant truncated to five digits, printed next to the
/// full value for comparison.
pub const EULER_GAMMA_5: f64 = 0.57721;

/// Upper end of the relative-shift range accepted by the estimators.
pub const MAX_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HallError {
    #[error("delta = {delta} is outside [0, {MAX_DELTA})")]
    OutOfRegime { delta: f64 },
    #[error("no root of Gamma(1 + alpha) = {target} in ({lo}, {hi})")]
    NoRootInBracket { target: f64, lo: f64, hi: f64 },
    #[error("alpha = {0} is outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("{0}")]
    WrongRegime(&'static str),
    #[error("a numeric alpha is required")]
    SymbolicOrder,
    #[error("fj iteration ended in {0}")]
    NotRegular(&'static str),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HallRegime {
    FullDynamics,
    /// Drops `½m (D^α r)²`, leaving a first-order Lagrangian.
    StrongFieldMasslessLimit,
}

/// Order of a scenario. Unlike [`FracOrder`], 0 is allowed: it is the
/// reference point of the small-α expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HallAlpha {
    Symbolic,
    Value(f64),
}

impl HallAlpha {
    pub fn value(self) -> Option<f64> {
        match self {
            HallAlpha::Symbolic => None,
            HallAlpha::Value(a) => Some(a),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HallScenario {
    pub e: f64,
    pub b: f64,
    pub m: f64,
    pub hbar: f64,
    pub alpha: HallAlpha,
    pub regime: HallRegime,
}

impl HallScenario {
    pub fn new(e: f64, b: f64, m: f64, hbar: f64, alpha: HallAlpha, regime: HallRegime) -> Result<Self, HallError> {
        if let HallAlpha::Value(a) = alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(HallError::InvalidAlpha(a));
            }
        }
        Ok(Self {
            e,
            b,
            m,
            hbar,
            alpha,
            regime,
        })
    }

    /// Strong-field scenario with unit `m` and `ħ`.
    pub fn strong_field(e: f64, b: f64, alpha: HallAlpha) -> Result<Self, HallError> {
        Self::new(e, b, 1.0, 1.0, alpha, HallRegime::StrongFieldMasslessLimit)
    }

    fn model_alpha(&self) -> Result<(Alpha, Expr), HallError> {
        match self.alpha {
            HallAlpha::Symbolic => Ok((Alpha::Symbolic, Expr::sym(ALPHA_NAME))),
            HallAlpha::Value(a) => Ok((Alpha::Numeric(FracOrder::new(a)?), Expr::real(a))),
        }
    }
}

fn constants(s: &HallScenario) -> BTreeMap<String, Option<f64>> {
    let mut c = BTreeMap::from([("e".to_string(), Some(s.e)), ("B".to_string(), Some(s.b))]);
    if s.regime == HallRegime::FullDynamics {
        c.insert("m".into(), Some(s.m));
    }
    c
}

/// Landau model in the symmetric gauge.
///
/// Strong field: `η = (r1, r2)`, `a_i = ½ eB Γ(1+α) ε_ij r_j`, `V = 0`.
/// Full dynamics: `η = (r1, r2, v1, v2)` with `a_r = m v + eA`, `a_v = 0`
/// and `V = ½ m v²`, whose equations are `D^α r = v`, `D^α v = (eB/m) ε v`.
pub fn build_landau_model(s: &HallScenario) -> Result<Model, HallError> {
    let (alpha, alpha_expr) = s.model_alpha()?;
    let e = Expr::sym("e");
    let b = Expr::sym("B");
    let half = Expr::rational(1, 2);
    let m = match s.regime {
        HallRegime::StrongFieldMasslessLimit => {
            let k = half * e * b * Expr::gamma(Expr::one() + alpha_expr);
            Model::new(
                vec!["r1".into(), "r2".into()],
                vec![
                    (k.clone() * Expr::var("r2")).simplify(),
                    (-(k * Expr::var("r1"))).simplify(),
                ],
                Expr::zero(),
                constants(s),
            )
        }
        HallRegime::FullDynamics => {
            let mass = Expr::sym("m");
            let eb2 = half.clone() * e * b;
            let kinetic = vec![
                (mass.clone() * Expr::var("v1") + eb2.clone() * Expr::var("r2")).simplify(),
                (mass.clone() * Expr::var("v2") - eb2 * Expr::var("r1")).simplify(),
                Expr::zero(),
                Expr::zero(),
            ];
            let potential = (half * mass * (Expr::var("v1").powi(2) + Expr::var("v2").powi(2))).simplify();
            Model::new(
                ["r1", "r2", "v1", "v2"].map(String::from).to_vec(),
                kinetic,
                potential,
                constants(s),
            )
        }
    }
    .map_err(SymplecticError::from)?;
    Ok(m.with_alpha(alpha))
}

/// Brackets of the strong-field model; `{r1, r2}* = 1/(eB Γ(1+α))`.
pub fn quantize_strong_field(s: &HallScenario) -> Result<BracketTable, HallError> {
    if s.regime != HallRegime::StrongFieldMasslessLimit {
        return Err(HallError::WrongRegime(
            "strong-field quantization needs the massless limit",
        ));
    }
    let out = fj_iterate(&build_landau_model(s)?)?;
    match (out.chain.terminal, out.table) {
        (Terminal::Regular, Some(t)) => Ok(t),
        (terminal, _) => Err(HallError::NotRegular(terminal.name())),
    }
}

/// `(1 + αγ)/(eB)`, the first-order expansion of `1/(eB Γ(1+α))`.
pub fn first_order_bracket(e: f64, b: f64, alpha: f64) -> f64 {
    (1.0 + alpha * EULER_GAMMA) / (e * b)
}

/// `ω/Γ(1+α)`.
pub fn cyclotron_correction(omega: f64, alpha: FracOrder) -> f64 {
    omega / gamma(1.0 + alpha.value()).expect("1 + alpha is positive")
}

/// `ω(1 + αγ)`, first order in α.
pub fn cyclotron_correction_first_order(omega: f64, alpha: f64) -> f64 {
    omega * (1.0 + alpha * EULER_GAMMA)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EstimateRegime {
    #[serde(rename = "small")]
    SmallAlpha,
    #[serde(rename = "near-one")]
    NearOne,
}

impl fmt::Display for EstimateRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateRegime::SmallAlpha => "small",
            EstimateRegime::NearOne => "near-one",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalityEstimate {
    pub regime: EstimateRegime,
    pub delta: f64,
    pub alpha_estimate: f64,
    pub method: String,
}

impl FractionalityEstimate {
    /// Relative frequency shift implied by the estimate, in the model the
    /// estimator inverts.
    pub fn implied_delta(&self) -> f64 {
        match self.regime {
            EstimateRegime::SmallAlpha => self.alpha_estimate * EULER_GAMMA,
            EstimateRegime::NearOne => 1.0 / gamma(1.0 + self.alpha_estimate).expect("positive argument") - 1.0,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            regime: EstimateRegime,
            delta: Sig17,
            alpha_estimate: Sig17,
            euler_gamma: Sig17,
            euler_gamma_5_digits: Sig17,
            #[serde(skip_serializing_if = "Option::is_none")]
            alpha_estimate_5_digit_gamma: Option<Sig17>,
            #[serde(skip_serializing_if = "Option::is_none")]
            order_of_magnitude: Option<Sig17>,
            method: &'a str,
        }
        let small = self.regime == EstimateRegime::SmallAlpha;
        to_pretty(&Out {
            regime: self.regime,
            delta: Sig17(self.delta),
            alpha_estimate: Sig17(self.alpha_estimate),
            euler_gamma: Sig17(EULER_GAMMA),
            euler_gamma_5_digits: Sig17(EULER_GAMMA_5),
            alpha_estimate_5_digit_gamma: small.then(|| Sig17(self.delta / EULER_GAMMA_5)),
            order_of_magnitude: (small && self.alpha_estimate > 0.0)
                .then(|| Sig17(10f64.powf(self.alpha_estimate.log10().floor()))),
            method: &self.method,
        })
    }
}

fn check_delta(delta: f64) -> Result<(), HallError> {
    if (0.0..MAX_DELTA).contains(&delta) {
        Ok(())
    } else {
        Err(HallError::OutOfRegime { delta })
    }
}

/// Solves `αγ = δ`, the first-order relative shift of `ω/Γ(1+α)` near 0.
pub fn estimate_alpha_small(delta: f64) -> Result<FractionalityEstimate, HallError> {
    check_delta(delta)?;
    let alpha = delta / EULER_GAMMA;
    let method = format!(
        "alpha = delta / gamma from omega_alpha = omega (1 + alpha gamma); only the order of magnitude ({:.0e}) is meaningful",
        if alpha > 0.0 { 10f64.powf(alpha.log10().floor()) } else { 0.0 }
    );
    Ok(FractionalityEstimate {
        regime: EstimateRegime::SmallAlpha,
        delta,
        alpha_estimate: alpha,
        method,
    })
}

/// Solves `Γ(1+α) = 1/(1+δ)` on `(0.99, 1)` by bisection to 1e-14.
pub fn estimate_alpha_near_one(delta: f64) -> Result<FractionalityEstimate, HallError> {
    check_delta(delta)?;
    let target = 1.0 / (1.0 + delta);
    let (mut lo, mut hi) = (0.99, 1.0);
    let f = |a: f64| gamma(1.0 + a).expect("positive argument") - target;
    let alpha = if delta == 0.0 {
        1.0
    } else {
        if f(lo) > 0.0 || f(hi) < 0.0 {
            return Err(HallError::NoRootInBracket { target, lo, hi });
        }
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(FractionalityEstimate {
        regime: EstimateRegime::NearOne,
        delta,
        alpha_estimate: alpha,
        method: "bisection of Gamma(1 + alpha) = 1/(1 + delta) on (0.99, 1) to 1e-14".into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoncommutativityReport {
    pub alpha: f64,
    pub hbar: f64,
    pub eb: f64,
    /// `ħ/(eB)`.
    pub theta_classical: f64,
    /// `ħ(1 + αγ)/(eB)`.
    pub theta_fractional: f64,
    /// `ħ/(eB Γ(1+α))`.
    pub theta_exact: f64,
    /// `αγ`.
    pub relative_correction: f64,
    /// `{r1, r2}* = 1/(eB Γ(1+α))`.
    pub bracket_direct: f64,
    /// `(α!)⁻² {r1, r2}*`.
    pub bracket_coarse_grained: f64,
    pub notes: Vec<String>,
}

/// `θ_12` of `[r1, r2] = iθ_12` with and without the fractional correction.
pub fn noncommutativity_report(s: &HallScenario) -> Result<NoncommutativityReport, HallError> {
    let alpha = s.alpha.value().ok_or(HallError::SymbolicOrder)?;
    let eb = s.e * s.b;
    let g = gamma(1.0 + alpha).expect("1 + alpha is positive");
    let theta_classical = s.hbar / eb;
    Ok(NoncommutativityReport {
        alpha,
        hbar: s.hbar,
        eb,
        theta_classical,
        theta_fractional: theta_classical * (1.0 + alpha * EULER_GAMMA),
        theta_exact: theta_classical / g,
        relative_correction: alpha * EULER_GAMMA,
        bracket_direct: 1.0 / (eb * g),
        bracket_coarse_grained: 1.0 / (eb * g * g * g),
        notes: vec![
            "theta_fractional is first order in alpha; theta_exact keeps the full Gamma(1 + alpha)".into(),
            "for small alpha the correction alpha*gamma and alpha share an order of magnitude; no identity between alpha and theta is implied".into(),
        ],
    })
}

impl NoncommutativityReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Normalizations {
            direct: Sig17,
            coarse_grained: Sig17,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            theta_classical: Sig17,
            theta_fractional: Sig17,
            theta_exact: Sig17,
            alpha: Sig17,
            hbar: Sig17,
            eb: Sig17,
            relative_correction: Sig17,
            bracket_normalizations: Normalizations,
            notes: &'a [String],
        }
        to_pretty(&Out {
            theta_classical: Sig17(self.theta_classical),
            theta_fractional: Sig17(self.theta_fractional),
            theta_exact: Sig17(self.theta_exact),
            alpha: Sig17(self.alpha),
            hbar: Sig17(self.hbar),
            eb: Sig17(self.eb),
            relative_correction: Sig17(self.relative_correction),
            bracket_normalizations: Normalizations {
                direct: Sig17(self.bracket_direct),
                coarse_grained: Sig17(self.bracket_coarse_grained),
            },
            notes: &self.notes,
        })
    }
}

/// Bracket table evaluated under the scenario constants.
pub fn evaluate_table(t: &BracketTable, s: &HallScenario) -> Result<Vec<Vec<f64>>, HallError> {
    let mut b = Binding::new().with("e", s.e).with("B", s.b);
    if let HallAlpha::Value(a) = s.alpha {
        b.set(ALPHA_NAME, a);
    }
    t.evaluate(&b).map_err(|e| HallError::Symplectic(e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::symplectic::{assemble_form, fractional_equations_of_motion};

    #[test]
    fn strong_field_forms() {
        let s = HallScenario::strong_field(1.3, 0.7, HallAlpha::Value(1.0)).unwrap();
        let f = assemble_form(&build_landau_model(&s).unwrap()).unwrap();
        assert_eq!(f.entry(1, 0), &parse_expr("e*B", &[]).unwrap().simplify());

        let s = HallScenario::strong_field(1.3, 0.7, HallAlpha::Symbolic).unwrap();
        let f = assemble_form(&build_landau_model(&s).unwrap()).unwrap();
        assert_eq!(
            f.entry(1, 0),
            &parse_expr("e*B*Gamma(1 + alpha)", &[]).unwrap().simplify()
        );
    }

    #[test]
    fn full_dynamics_reduces_to_lorentz_force() {
        let s = HallScenario::new(2.0, 3.0, 1.5, 1.0, HallAlpha::Value(1.0), HallRegime::FullDynamics).unwrap();
        let eom = fractional_equations_of_motion(&build_landau_model(&s).unwrap()).unwrap();
        let vars = ["r1", "r2", "v1", "v2"];
        let want = ["v1", "v2", "-e*B/m*v2", "e*B/m*v1"];
        for ((name, rhs), w) in eom.rhs.iter().zip(want) {
            assert_eq!(rhs, &parse_expr(w, &vars).unwrap().simplify(), "{name}");
        }
    }

    #[test]
    fn strong_field_brackets() {
        let s = HallScenario::strong_field(1.0, 1.0, HallAlpha::Value(1.0)).unwrap();
        let t = quantize_strong_field(&s).unwrap();
        assert_eq!(
            t.get("r1", "r2").unwrap(),
            &parse_expr("1/(e*B)", &[]).unwrap().simplify()
        );
        assert_eq!(evaluate_table(&t, &s).unwrap()[0][1], 1.0);

        let s = HallScenario::strong_field(1.0, 1.0, HallAlpha::Symbolic).unwrap();
        let t = quantize_strong_field(&s).unwrap();
        assert_eq!(
            t.get("r1", "r2").unwrap(),
            &parse_expr("1/(e*B*Gamma(1 + alpha))", &[]).unwrap().simplify()
        );

        let s = HallScenario::strong_field(1.0, 1.0, HallAlpha::Value(1e-8)).unwrap();
        let v = evaluate_table(&quantize_strong_field(&s).unwrap(), &s).unwrap()[0][1];
        assert!((v - 1.000_000_005_772_1).abs() < 1e-12);
        assert!((v - first_order_bracket(1.0, 1.0, 1e-8)).abs() < 1e-15);

        let full = HallScenario::new(1.0, 1.0, 1.0, 1.0, HallAlpha::Value(1.0), HallRegime::FullDynamics).unwrap();
        assert!(matches!(quantize_strong_field(&full), Err(HallError::WrongRegime(_))));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn cyclotron() {
        assert_eq!(cyclotron_correction(2.5, FracOrder::CLASSICAL), 2.5);
        let half = cyclotron_correction(1.0, FracOrder::new(0.5).unwrap());
        assert!((half - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((half - 1.1283791671).abs() < 1e-10);
        let tiny = cyclotron_correction(1.0, FracOrder::new(1e-8).unwrap());
        assert!((tiny - (1.0 + 5.7721566490153286e-9)).abs() < 1e-15);
        assert!((cyclotron_correction_first_order(1.0, 1e-8) - tiny).abs() < 1e-15);
    }

    #[test]
    fn small_alpha_estimates() {
        let e = estimate_alpha_small(1e-8).unwrap();
        assert!((e.alpha_estimate - 1.7324547146e-8).abs() < 1e-17);
        assert_eq!(estimate_alpha_small(0.0).unwrap().alpha_estimate, 0.0);
        let e = estimate_alpha_small(EULER_GAMMA * 1e-6).unwrap();
        assert!((e.alpha_estimate - 1e-6).abs() < 1e-20);
        assert!((e.implied_delta() - EULER_GAMMA * 1e-6).abs() < 1e-20);
        assert!(matches!(estimate_alpha_small(-1.0), Err(HallError::OutOfRegime { .. })));
        assert!(matches!(estimate_alpha_small(1e-3), Err(HallError::OutOfRegime { .. })));
    }

    #[test]
    fn near_one_estimates() {
        let e = estimate_alpha_near_one(1e-8).unwrap();
        assert!((e.alpha_estimate - 0.9999999763473).abs() < 1e-12);
        assert!((e.implied_delta() - 1e-8).abs() < 1e-12);
        assert_eq!(estimate_alpha_near_one(0.0).unwrap().alpha_estimate, 1.0);
        let e = estimate_alpha_near_one(1e-10).unwrap();
        assert!((e.alpha_estimate - (1.0 - 1e-10 / (1.0 - EULER_GAMMA))).abs() < 1e-12);
        assert!(estimate_alpha_near_one(-1e-9).is_err());
    }

    #[test]
    fn noncommutativity() {
        let zero = HallScenario::strong_field(2.0, 0.25, HallAlpha::Value(0.0)).unwrap();
        let r = noncommutativity_report(&zero).unwrap();
        assert_eq!(r.theta_fractional, 2.0);
        assert_eq!(r.theta_classical, 2.0);

        let s = HallScenario::strong_field(1.0, 1.0, HallAlpha::Value(1e-8)).unwrap();
        let r = noncommutativity_report(&s).unwrap();
        assert!((r.theta_fractional - (1.0 + 5.7721e-9)).abs() < 1e-13);
        for a in [1e-9, 1e-7, 1e-5] {
            let s = HallScenario::strong_field(1.0, 1.0, HallAlpha::Value(a)).unwrap();
            let r = noncommutativity_report(&s).unwrap();
            assert!((r.relative_correction / a - EULER_GAMMA).abs() < 1e-15);
        }
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for key in [
            "theta_classical",
            "theta_fractional",
            "alpha",
            "relative_correction",
            "bracket_normalizations",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        assert!(matches!(
            HallScenario::strong_field(1.0, 1.0, HallAlpha::Value(1.5)),
            Err(HallError::InvalidAlpha(_))
        ));
    }
}
