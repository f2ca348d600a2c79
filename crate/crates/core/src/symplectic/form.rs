use crate::expr::{Expr, Poly};
use crate::linalg::{self, PolyMatrix};

use super::{Model, SymplecticError};

/// The two-form `f_ij = ∂_i a_j − ∂_j a_i` of a model, with its generic rank
/// and a basis of zero modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    variables: Vec<String>,
    entries: Vec<Vec<Expr>>,
    polys: PolyMatrix,
    rank: usize,
    null_basis: Vec<Vec<Expr>>,
    null_polys: Vec<Vec<Poly>>,
}

impl SymplecticForm {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn entries(&self) -> &[Vec<Expr>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.entries[i][j]
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_regular(&self) -> bool {
        self.rank == self.dim()
    }

    pub fn null_basis(&self) -> &[Vec<Expr>] {
        &self.null_basis
    }

    pub(crate) fn null_polys(&self) -> &[Vec<Poly>] {
        &self.null_polys
    }
}

pub(crate) fn to_expr_matrix(m: &PolyMatrix) -> Vec<Vec<Expr>> {
    m.iter().map(|row| row.iter().map(Poly::to_expr).collect()).collect()
}

/// Gradient of the potential as canonical polynomials.
pub(crate) fn potential_gradient(m: &Model) -> Result<Vec<Poly>, SymplecticError> {
    let asm = m.assumptions();
    m.variables()
        .iter()
        .map(|v| {
            let d = m.potential().diff_with(v, &asm)?;
            Ok(Poly::from_expr(&d, &asm))
        })
        .collect()
}

pub fn assemble_form(m: &Model) -> Result<SymplecticForm, SymplecticError> {
    let asm = m.assumptions();
    let n = m.dim();
    // d[i][j] = ∂_i a_j
    let mut d = vec![vec![Poly::zero(); n]; n];
    for (i, v) in m.variables().iter().enumerate() {
        for (j, a) in m.kinetic().iter().enumerate() {
            d[i][j] = Poly::from_expr(&a.diff_with(v, &asm)?, &asm);
        }
    }
    let polys: PolyMatrix = (0..n)
        .map(|i| (0..n).map(|j| d[i][j].sub(&d[j][i]).reduce()).collect())
        .collect();
    let rank = linalg::generic_rank(&polys)?;
    let null_polys = if rank < n {
        linalg::null_space(&polys)
    } else {
        Vec::new()
    };
    Ok(SymplecticForm {
        variables: m.variables().to_vec(),
        entries: to_expr_matrix(&polys),
        rank,
        null_basis: to_expr_matrix(&null_polys),
        null_polys,
        polys,
    })
}

pub(crate) fn invert_polys(f: &SymplecticForm) -> Result<PolyMatrix, SymplecticError> {
    if !f.is_regular() {
        return Err(SymplecticError::SingularForm {
            null_basis: f
                .null_basis
                .iter()
                .map(|v| v.iter().map(Expr::to_string).collect())
                .collect(),
        });
    }
    linalg::inverse(&f.polys).ok_or_else(|| SymplecticError::SingularForm { null_basis: Vec::new() })
}

/// Exact inverse `f⁻¹`, whose entries are the brackets `{η_i, η_j}*`.
pub fn invert_form(f: &SymplecticForm) -> Result<Vec<Vec<Expr>>, SymplecticError> {
    Ok(to_expr_matrix(&invert_polys(f)?))
}

/// `f · f⁻¹`, simplified; the identity for a regular form.
pub fn form_times_inverse(f: &SymplecticForm, inv: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let asm = crate::expr::Assumptions::none();
    let inv: PolyMatrix = inv
        .iter()
        .map(|r| r.iter().map(|e| Poly::from_expr(e, &asm)).collect())
        .collect();
    to_expr_matrix(&linalg::mat_mul(&f.polys, &inv))
}

/// Candidate constraints `Ω_n = ν_n · ∇V` of a singular form.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroModeConstraints {
    /// Nonzero constraints with the index of the zero mode producing each.
    pub constraints: Vec<(usize, Expr)>,
    /// Zero modes whose contraction with `∇V` vanishes identically.
    pub identically_zero: Vec<usize>,
}

impl ZeroModeConstraints {
    pub fn expressions(&self) -> Vec<Expr> {
        self.constraints.iter().map(|(_, c)| c.clone()).collect()
    }

    /// No constraint arises although the form is singular.
    pub fn is_gauge(&self) -> bool {
        self.constraints.is_empty() && !self.identically_zero.is_empty()
    }
}

pub fn constraints_from_zero_modes(f: &SymplecticForm, m: &Model) -> Result<ZeroModeConstraints, SymplecticError> {
    let grad = potential_gradient(m)?;
    let mut out = ZeroModeConstraints {
        constraints: Vec::new(),
        identically_zero: Vec::new(),
    };
    for (k, nu) in f.null_polys().iter().enumerate() {
        let mut omega = Poly::zero();
        for (c, g) in nu.iter().zip(&grad) {
            omega = omega.add(&c.mul(g));
        }
        let omega = omega.reduce();
        if omega.is_zero() {
            out.identically_zero.push(k);
        } else {
            out.constraints.push((k, omega.to_expr()));
        }
    }
    Ok(out)
}

/// Right-hand sides of `D^α η^i = Σ_j (f⁻¹)_ij ∂_j V`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationsOfMotion {
    pub alpha: super::Alpha,
    pub rhs: Vec<(String, Expr)>,
}

pub fn fractional_equations_of_motion(m: &Model) -> Result<EquationsOfMotion, SymplecticError> {
    let f = assemble_form(m)?;
    let inv = invert_polys(&f)?;
    let grad = potential_gradient(m)?;
    let rhs = m
        .variables()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut acc = Poly::zero();
            for (j, g) in grad.iter().enumerate() {
                acc = acc.add(&inv[i][j].mul(g));
            }
            (v.clone(), acc.reduce().to_expr())
        })
        .collect();
    Ok(EquationsOfMotion { alpha: m.alpha(), rhs })
}
