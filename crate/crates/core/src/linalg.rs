//! Exact linear algebra over canonical polynomials.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::poly::Atom;
use crate::expr::{Poly, Rational};

pub(crate) type PolyMatrix = Vec<Vec<Poly>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rank differs between evaluation points ({first} vs {second})")]
pub struct RankDisagreement {
    pub first: usize,
    pub second: usize,
}

const RANK_SEEDS: [u64; 2] = [0x5eed_0001, 0x5eed_0002];

/// Determinant by Bareiss elimination, falling back to expansion by minors
/// when an intermediate division is not exact in the canonical form.
pub(crate) fn det(m: &PolyMatrix) -> Poly {
    bareiss(m).unwrap_or_else(|| det_minors(m))
}

fn bareiss(m: &PolyMatrix) -> Option<Poly> {
    let n = m.len();
    if n == 0 {
        return Some(Poly::one());
    }
    let mut a = m.clone();
    let mut prev = Poly::one();
    let mut negate = false;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Some(Poly::zero());
            };
            a.swap(k, i);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j])).reduce();
                a[i][j] = num.try_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Some(if negate { d.neg() } else { d })
}

fn det_minors(m: &PolyMatrix) -> Poly {
    fn go(m: &PolyMatrix, row: usize, cols: u32, memo: &mut HashMap<u32, Poly>) -> Poly {
        if row == m.len() {
            return Poly::one();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = Poly::zero();
        let mut sign_neg = false;
        for c in 0..m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            if !m[row][c].is_zero() {
                let t = m[row][c].mul(&go(m, row + 1, cols & !(1 << c), memo));
                acc = if sign_neg { acc.sub(&t) } else { acc.add(&t) };
            }
            sign_neg = !sign_neg;
        }
        let acc = acc.reduce();
        memo.insert(cols, acc.clone());
        acc
    }
    let n = m.len();
    assert!(n < 32, "matrix too large for expansion by minors");
    go(m, 0, (1u32 << n) - 1, &mut HashMap::new())
}

fn submatrix(m: &PolyMatrix, rows: &[usize], cols: &[usize]) -> PolyMatrix {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j].clone()).collect())
        .collect()
}

pub(crate) fn adjugate(m: &PolyMatrix) -> PolyMatrix {
    let n = m.len();
    let all: Vec<usize> = (0..n).collect();
    let mut adj = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = all.iter().copied().filter(|&r| r != j).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&c| c != i).collect();
            let minor = det(&submatrix(m, &rows, &cols));
            adj[i][j] = if (i + j) % 2 == 1 { minor.neg() } else { minor };
        }
    }
    adj
}

/// `a / d` in the simplest exact shape available.
pub(crate) fn quotient(a: &Poly, d: &Poly) -> Poly {
    if a.is_zero() {
        return Poly::zero();
    }
    if let Some(q) = a.try_div(d) {
        return q;
    }
    if let Some(q) = d.try_div(a) {
        return q.recip();
    }
    a.mul(&d.recip()).reduce()
}

/// Exact inverse as `adj(m) / det(m)`, or `None` when singular.
pub(crate) fn inverse(m: &PolyMatrix) -> Option<PolyMatrix> {
    let d = det(m);
    if d.is_zero() {
        return None;
    }
    let adj = adjugate(m);
    Some(
        adj.iter()
            .map(|row| row.iter().map(|a| quotient(a, &d)).collect())
            .collect(),
    )
}

pub(crate) fn mat_mul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for l in 0..k {
                        acc = acc.add(&a[i][l].mul(&b[l][j]));
                    }
                    acc.reduce()
                })
                .collect()
        })
        .collect()
}

/// Random positive rational value for every atom, raised to the lcm of the
/// atom's exponent denominators so evaluation stays rational.
fn random_point(m: &PolyMatrix, seed: u64) -> BTreeMap<Atom, (Rational, BigInt)> {
    let mut atoms = BTreeMap::new();
    for row in m {
        for p in row {
            p.collect_atoms(&mut atoms);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    atoms
        .into_iter()
        .map(|(a, l)| {
            let r = BigRational::new(rng.gen_range(2..500).into(), rng.gen_range(1..50).into());
            (a, (r, l))
        })
        .collect()
}

fn evaluate_at(m: &PolyMatrix, point: &BTreeMap<Atom, (Rational, BigInt)>) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|p| p.eval_exact(point).expect("every atom is assigned"))
                .collect()
        })
        .collect()
}

/// Row echelon form over the rationals; returns the pivot columns.
fn pivot_columns(mut a: Vec<Vec<Rational>>) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] / &a[r][c];
            for j in c..cols {
                let t = &factor * &a[r][j];
                a[i][j] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Generic rank: exact rank at two independent random rational points,
/// which must agree.
pub(crate) fn generic_rank(m: &PolyMatrix) -> Result<usize, RankDisagreement> {
    let ranks: Vec<usize> = RANK_SEEDS
        .iter()
        .map(|&s| pivot_columns(evaluate_at(m, &random_point(m, s))).len())
        .collect();
    if ranks[0] != ranks[1] {
        return Err(RankDisagreement {
            first: ranks[0],
            second: ranks[1],
        });
    }
    Ok(ranks[0])
}

/// Whether `target` is a rational linear combination of `basis`, decided
/// by comparing ranks at `basis.len() + 3` random points.
pub(crate) fn in_rational_span(target: &Poly, basis: &[Poly]) -> bool {
    if target.is_zero() {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let mut row: Vec<Poly> = basis.to_vec();
    row.push(target.clone());
    let all = vec![row];
    let samples: Vec<Vec<Rational>> = (0..basis.len() as u64 + 3)
        .map(|s| evaluate_at(&all, &random_point(&all, RANK_SEEDS[0] ^ (s << 32))).remove(0))
        .collect();
    let without: Vec<Vec<Rational>> = samples.iter().map(|r| r[..basis.len()].to_vec()).collect();
    pivot_columns(without).len() == pivot_columns(samples).len()
}

/// Basis of the right null space, one vector per non-pivot column.
///
/// With `M` a generically invertible `r×r` block on pivot rows `R` and
/// columns `P`, the vector for free column `c` is `ν_P = −adj(M)·m[R][c]`,
/// `ν_c = det(M)`, divided through by `det(M)` when that is exact.
pub(crate) fn null_space(m: &PolyMatrix) -> Vec<Vec<Poly>> {
    let n = m.first().map_or(0, Vec::len);
    let point = random_point(m, RANK_SEEDS[0]);
    let numeric = evaluate_at(m, &point);
    let cols = pivot_columns(numeric.clone());
    let rows = pivot_columns(transpose(&numeric));
    let block = submatrix(m, &rows, &cols);
    let d = det(&block);
    let adj = adjugate(&block);
    let mut basis = Vec::new();
    for c in (0..n).filter(|c| !cols.contains(c)) {
        let mut v = vec![Poly::zero(); n];
        for (a, &pc) in cols.iter().enumerate() {
            let mut acc = Poly::zero();
            for (b, &pr) in rows.iter().enumerate() {
                acc = acc.add(&adj[a][b].mul(&m[pr][c]));
            }
            v[pc] = acc.neg().reduce();
        }
        v[c] = d.clone();
        let divided: Option<Vec<Poly>> = v.iter().map(|x| x.try_div(&d)).collect();
        basis.push(divided.unwrap_or(v));
    }
    basis
}
