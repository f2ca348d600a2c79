use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::expr::poly::{Atom, Monomial};
use crate::expr::{Expr, Poly};
use crate::linalg;

use super::form::{assemble_form, constraints_from_zero_modes, invert_polys, to_expr_matrix};
use super::{Alpha, BracketTable, Model, SymplecticError};

/// How the iteration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Terminal {
    /// Invertible form; brackets available.
    Regular,
    /// Zero modes remain that produce no new constraint; gauge conditions
    /// are needed for these directions.
    GaugeTheory { unconstrained_modes: Vec<Vec<Expr>> },
    /// A constraint reduced to a nonzero constant.
    Inconsistent { constraint: Expr },
}

impl Terminal {
    pub fn name(&self) -> &'static str {
        match self {
            Terminal::Regular => "Regular",
            Terminal::GaugeTheory { .. } => "GaugeTheory",
            Terminal::Inconsistent { .. } => "Inconsistent",
        }
    }
}

/// One extension step.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLevel {
    pub constraints: Vec<Expr>,
    /// Multiplier attached to each constraint, in order.
    pub multipliers: Vec<String>,
    /// Model after the extension.
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintChain {
    pub initial: Model,
    pub levels: Vec<ChainLevel>,
    pub terminal: Terminal,
    pub notes: Vec<String>,
}

impl ConstraintChain {
    pub fn extensions(&self) -> usize {
        self.levels.len()
    }

    pub fn final_model(&self) -> &Model {
        self.levels.last().map_or(&self.initial, |l| &l.model)
    }

    /// Human-readable account of every step.
    pub fn log(&self) -> String {
        let mut out = String::new();
        let describe = |out: &mut String, m: &Model| {
            let _ = writeln!(out, "  variables: {}", m.variables().join(", "));
            for (v, a) in m.variables().iter().zip(m.kinetic()) {
                let _ = writeln!(out, "  a[{v}] = {a}");
            }
            let _ = writeln!(out, "  V = {}", m.potential());
        };
        let _ = writeln!(out, "initial model");
        describe(&mut out, &self.initial);
        for (k, level) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "extension {}", k + 1);
            for (c, l) in level.constraints.iter().zip(&level.multipliers) {
                let _ = writeln!(out, "  constraint {c} = 0 with multiplier {l}");
            }
            describe(&mut out, &level.model);
        }
        let _ = writeln!(out, "terminal: {}", self.terminal.name());
        match &self.terminal {
            Terminal::GaugeTheory { unconstrained_modes } => {
                let _ = writeln!(
                    out,
                    "  {} gauge condition(s) required, one per zero mode:",
                    unconstrained_modes.len()
                );
                for nu in unconstrained_modes {
                    let parts: Vec<String> = nu.iter().map(Expr::to_string).collect();
                    let _ = writeln!(out, "    ({})", parts.join(", "));
                }
            }
            Terminal::Inconsistent { constraint } => {
                let _ = writeln!(out, "  constraint reduces to {constraint} = 0");
            }
            Terminal::Regular => {}
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FjOutcome {
    pub chain: ConstraintChain,
    /// Brackets of the original variables; present for `Regular` only.
    pub table: Option<BracketTable>,
}

fn fresh_name(m: &Model, taken: &BTreeSet<String>) -> String {
    (1..)
        .map(|k| format!("lambda{k}"))
        .find(|n| m.index_of(n).is_none() && !m.constants().contains_key(n) && !taken.contains(n))
        .expect("unbounded name supply")
}

/// Solves `omega = 0` for `x` when `omega = c·x + r` with `c` free of
/// variables and `r` free of `x`.
fn solve_linear(omega: &Poly, x: &str, variables: &[String]) -> Option<Poly> {
    let mut coef = Poly::zero();
    let mut rest = Poly::zero();
    for (m, c) in omega.terms() {
        let mut reduced = Monomial::new();
        let mut power = None;
        for (a, e) in m {
            match a {
                Atom::Name(n, _) if &**n == x => power = Some(e.clone()),
                Atom::Gamma(p) | Atom::Opaque(p) if p.depends_on(x) => return None,
                _ => {
                    reduced.insert(a.clone(), e.clone());
                }
            }
        }
        let term = Poly::from_term(c.clone(), reduced);
        match power {
            None => rest = rest.add(&term),
            Some(e) if e == num_traits::One::one() => coef = coef.add(&term),
            Some(_) => return None,
        }
    }
    if coef.is_zero() || variables.iter().any(|v| coef.depends_on(v)) {
        return None;
    }
    Some(linalg::quotient(&rest.neg(), &coef))
}

/// Extends `m` by the given constraints. A constraint paired with
/// `Some(z)` reuses the variable `z` as its multiplier (and drops the
/// `z`-linear part of the potential); `None` appends a fresh multiplier.
/// Constraints that are linear in a non-multiplier variable are then
/// substituted into the potential.
fn extend(
    m: &Model,
    items: &[(Expr, Option<String>)],
    multipliers: &BTreeSet<String>,
) -> Result<(Model, Vec<String>), SymplecticError> {
    let asm = m.assumptions();
    let mut variables = m.variables().to_vec();
    let mut kinetic = m.kinetic().to_vec();
    let mut potential = m.potential().clone();
    let mut names = Vec::new();
    let mut taken = multipliers.clone();
    for (omega, reuse) in items {
        let lambda = match reuse {
            Some(z) => {
                potential = potential.substitute(z, &Expr::zero()).simplify_with(&asm);
                z.clone()
            }
            None => {
                let l = fresh_name(m, &taken);
                variables.push(l.clone());
                kinetic.push(Expr::zero());
                l
            }
        };
        taken.insert(lambda.clone());
        let lam = Expr::var(&lambda);
        for (i, v) in m.variables().iter().enumerate() {
            let d = omega.diff_with(v, &asm)?;
            if !d.is_zero() {
                kinetic[i] = (kinetic[i].clone() + lam.clone() * d).simplify_with(&asm);
            }
        }
        names.push(lambda);
    }
    for (omega, _) in items {
        let p = Poly::from_expr(omega, &asm);
        let candidates: Vec<&String> = m.variables().iter().filter(|v| !taken.contains(*v)).collect();
        for x in candidates {
            if let Some(sol) = solve_linear(&p, x, m.variables()) {
                potential = potential.substitute(x, &sol.to_expr()).simplify_with(&asm);
                break;
            }
        }
    }
    Ok((m.rebuild(variables, kinetic, potential)?, names))
}

/// Appends a fresh multiplier `λ_m` per constraint with
/// `a_i → a_i + λ_m ∂_i Ω_m`, and restricts the potential to the constraint
/// surface where a constraint is linear in some variable.
pub fn extend_model(m: &Model, constraints: &[Expr]) -> Result<Model, SymplecticError> {
    if constraints.is_empty() {
        return Err(SymplecticError::EmptyConstraints);
    }
    let items: Vec<(Expr, Option<String>)> = constraints.iter().map(|c| (c.clone(), None)).collect();
    Ok(extend(m, &items, &BTreeSet::new())?.0)
}

/// A zero mode along a single coordinate `z` that no kinetic coefficient
/// mentions, with the potential affine in `z`: then `z` already plays the
/// role of a Lagrange multiplier.
fn reusable_multiplier(m: &Model, nu: &[Poly], taken: &BTreeSet<String>) -> Result<Option<String>, SymplecticError> {
    let nonzero: Vec<usize> = (0..nu.len()).filter(|&i| !nu[i].is_zero()).collect();
    let [z] = nonzero[..] else {
        return Ok(None);
    };
    let name = &m.variables()[z];
    if taken.contains(name) || m.kinetic().iter().any(|a| a.depends_on(name)) {
        return Ok(None);
    }
    let asm = m.assumptions();
    let second = m.potential().diff_with(name, &asm)?.diff_with(name, &asm)?;
    Ok(second.is_zero().then(|| name.clone()))
}

fn span_basis(prior: &[Poly], m: &Model) -> Result<Vec<Poly>, SymplecticError> {
    let asm = m.assumptions();
    let mut out = prior.to_vec();
    for p in prior {
        let e = p.to_expr();
        for v in m.variables() {
            let d = Poly::from_expr(&e.diff_with(v, &asm)?, &asm);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// Runs the symplectic algorithm to one of its terminals.
pub fn fj_iterate(m: &Model) -> Result<FjOutcome, SymplecticError> {
    let guard = 2 * m.dim().max(1);
    let mut current = m.clone();
    let mut levels: Vec<ChainLevel> = Vec::new();
    let mut notes = Vec::new();
    let mut multipliers: BTreeSet<String> = BTreeSet::new();
    let mut prior: Vec<Poly> = Vec::new();
    let mut gauge_imposed = false;
    if m.alpha() != Alpha::classical() {
        notes.push(
            "Gamma(1 + alpha) factors are treated as exact constants, not as the small-increment approximation they stand for"
                .to_string(),
        );
    }
    let finish = |levels, terminal, notes| ConstraintChain {
        initial: m.clone(),
        levels,
        terminal,
        notes,
    };
    for step in 0..=guard {
        let f = assemble_form(&current)?;
        if f.is_regular() {
            let inv = to_expr_matrix(&invert_polys(&f)?);
            let keep: Vec<usize> = m
                .variables()
                .iter()
                .filter(|v| !multipliers.contains(*v))
                .map(|v| current.index_of(v).expect("original variables persist"))
                .collect();
            for v in m.variables().iter().filter(|v| multipliers.contains(*v)) {
                notes.push(format!(
                    "{v} acts as a Lagrange multiplier and is left out of the bracket table"
                ));
            }
            let table = BracketTable::new(
                keep.iter().map(|&i| current.variables()[i].clone()).collect(),
                keep.iter()
                    .map(|&i| keep.iter().map(|&j| inv[i][j].clone()).collect())
                    .collect(),
                current.alpha(),
                current.binding(),
            )
            .with_notes(notes.clone());
            return Ok(FjOutcome {
                chain: finish(levels, Terminal::Regular, notes),
                table: Some(table),
            });
        }
        if step == guard {
            break;
        }
        let asm = current.assumptions();
        let zm = constraints_from_zero_modes(&f, &current)?;
        let mut unconstrained: Vec<usize> = zm.identically_zero.clone();
        let mut items: Vec<(Expr, Option<String>)> = Vec::new();
        for (k, omega) in &zm.constraints {
            let p = Poly::from_expr(omega, &asm);
            if let Some(c) = p.as_constant() {
                if !num_traits::Zero::is_zero(&c) {
                    let terminal = Terminal::Inconsistent {
                        constraint: omega.clone(),
                    };
                    return Ok(FjOutcome {
                        chain: finish(levels, terminal, notes),
                        table: None,
                    });
                }
            }
            if linalg::in_rational_span(&p, &span_basis(&prior, &current)?) {
                notes.push(format!(
                    "constraint {omega} = 0 lies in the span of earlier constraints and their derivatives"
                ));
                unconstrained.push(*k);
                continue;
            }
            let reuse = reusable_multiplier(&current, &f.null_polys()[*k], &multipliers)?;
            prior.push(p);
            items.push((omega.clone(), reuse));
        }
        if items.is_empty() {
            if !gauge_imposed && !current.gauge().is_empty() {
                gauge_imposed = true;
                notes.push(format!(
                    "zero modes without constraints; imposing {} gauge condition(s)",
                    current.gauge().len()
                ));
                for g in current.gauge() {
                    prior.push(Poly::from_expr(g, &asm));
                    items.push((g.clone(), None));
                }
            } else {
                unconstrained.sort_unstable();
                let terminal = Terminal::GaugeTheory {
                    unconstrained_modes: unconstrained.iter().map(|&k| f.null_basis()[k].clone()).collect(),
                };
                return Ok(FjOutcome {
                    chain: finish(levels, terminal, notes),
                    table: None,
                });
            }
        }
        let (next, names) = extend(&current, &items, &multipliers)?;
        multipliers.extend(names.iter().cloned());
        levels.push(ChainLevel {
            constraints: items.into_iter().map(|(c, _)| c).collect(),
            multipliers: names,
            model: next.clone(),
        });
        current = next;
    }
    Err(SymplecticError::IterationBudgetExceeded(guard))
}
