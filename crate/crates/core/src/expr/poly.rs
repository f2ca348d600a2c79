//! Canonical sum-of-products representation backing `Expr::simplify`.
//!
//! A [`Poly`] maps monomials to nonzero rational coefficients. A monomial maps
//! atoms to nonzero rational exponents, so negative and fractional powers of
//! names are ordinary (Laurent) monomials. Sums raised to a negative or
//! fractional power become `Opaque` atoms; quotients by such atoms are reduced
//! by exact polynomial division where possible.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Assumptions, Expr, Name, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum NameKind {
    Symbol,
    Var,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Name(Name, NameKind),
    Gamma(Poly),
    /// Positive rational base with a fractional exponent in (0, 1).
    Radical(Rational),
    /// Base that a power cannot be distributed over.
    Opaque(Poly),
}

impl Atom {
    fn depends_on(&self, name: &str) -> bool {
        match self {
            Atom::Name(n, _) => &**n == name,
            Atom::Gamma(p) | Atom::Opaque(p) => p.depends_on(name),
            Atom::Radical(_) => false,
        }
    }

    fn is_positive(&self, asm: &Assumptions) -> bool {
        match self {
            Atom::Name(n, _) => asm.is_positive(n),
            Atom::Radical(_) => true,
            Atom::Gamma(arg) => arg.as_constant().is_some_and(|c| c.is_positive()),
            Atom::Opaque(_) => false,
        }
    }

    fn to_expr(&self) -> Expr {
        match self {
            Atom::Name(n, NameKind::Var) => Expr::Var(n.clone()),
            Atom::Name(n, NameKind::Symbol) => Expr::Symbol(n.clone()),
            Atom::Gamma(p) => Expr::Gamma(Box::new(p.to_expr())),
            Atom::Radical(b) => Expr::Const(b.clone()),
            Atom::Opaque(p) => p.to_expr(),
        }
    }
}

pub(crate) type Monomial = BTreeMap<Atom, Rational>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

fn rint(n: i64) -> Rational {
    BigRational::from_integer(n.into())
}

fn pow_int_signed(c: &Rational, n: &BigInt) -> Option<Rational> {
    let n = n.to_i32()?;
    if n < 0 && c.is_zero() {
        return None;
    }
    Some(num_traits::Pow::pow(c, n))
}

fn exact_root(x: &BigInt, d: u32) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.nth_root(d);
    (num_traits::Pow::pow(&r, d) == *x).then_some(r)
}

/// `c^k` when it is rational; `c` must be positive for fractional `k`.
pub(crate) fn exact_pow(c: &Rational, k: &Rational) -> Option<Rational> {
    if k.is_integer() {
        return pow_int_signed(c, k.numer());
    }
    if !c.is_positive() {
        return None;
    }
    let d = k.denom().to_u32()?;
    let rn = exact_root(c.numer(), d)?;
    let rd = exact_root(c.denom(), d)?;
    pow_int_signed(&BigRational::new(rn, rd), k.numer())
}

/// Prime factorization by trial division; a cofactor without small factors
/// is kept whole.
fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    const TRIAL_LIMIT: u32 = 100_000;
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut d = 2u32;
    while d <= TRIAL_LIMIT && BigInt::from(d) * BigInt::from(d) <= n {
        let mut k = 0;
        while (&n % d).is_zero() {
            n /= d;
            k += 1;
        }
        if k > 0 {
            out.push((BigInt::from(d), k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Pure lexicographic order on exponent vectors, atoms in ascending order
/// being most significant. Compatible with monomial multiplication.
pub(crate) fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let zero = Rational::zero();
    let mut ia = a.iter().peekable();
    let mut ib = b.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return (*ea).cmp(&zero),
            (None, Some((_, eb))) => return zero.cmp(eb),
            (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb) {
                Ordering::Equal => {
                    if ea != eb {
                        return (*ea).cmp(eb);
                    }
                    ia.next();
                    ib.next();
                }
                Ordering::Less => return (*ea).cmp(&zero),
                Ordering::Greater => return zero.cmp(eb),
            },
        }
    }
}

fn monomial_quotient(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (atom, e) in b {
        let slot = out.entry(atom.clone()).or_insert_with(Rational::zero);
        *slot -= e;
        if slot.is_zero() {
            out.remove(atom);
        }
    }
    out
}

/// Brings a single term into canonical shape: integer parts of radicals are
/// folded into the coefficient and opaque bases with positive integer
/// exponents are expanded again.
pub(crate) fn normalize_term(coef: Rational, m: Monomial) -> Poly {
    let mut coef = coef;
    let mut mono = Monomial::new();
    let mut expand: Vec<(Poly, u64)> = Vec::new();
    let mut primes: BTreeMap<BigInt, Rational> = BTreeMap::new();
    for (atom, e) in m {
        if e.is_zero() {
            continue;
        }
        match atom {
            Atom::Radical(b) => {
                for (p, k) in factor(b.numer()) {
                    *primes.entry(p).or_insert_with(Rational::zero) += &e * BigInt::from(k);
                }
                for (p, k) in factor(b.denom()) {
                    *primes.entry(p).or_insert_with(Rational::zero) -= &e * BigInt::from(k);
                }
            }
            Atom::Opaque(base) if e.is_integer() && e.is_positive() => match e.to_integer().to_u64() {
                Some(k) => expand.push((base, k)),
                None => {
                    mono.insert(Atom::Opaque(base), e);
                }
            },
            other => {
                mono.insert(other, e);
            }
        }
    }
    for (p, e) in primes {
        let whole = e.floor();
        let frac = &e - &whole;
        let base = BigRational::from_integer(p);
        coef *= pow_int_signed(&base, &whole.to_integer()).expect("prime base is nonzero");
        if !frac.is_zero() {
            mono.insert(Atom::Radical(base), frac);
        }
    }
    let mut out = Poly::from_term(coef, mono);
    for (base, k) in expand {
        out = out.mul(&base.pow_int(k));
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_term(c, Monomial::new())
    }

    pub fn from_term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn atom(a: Atom, e: Rational) -> Self {
        let mut m = Monomial::new();
        m.insert(a, e);
        normalize_term(Rational::one(), m)
    }

    pub fn name(n: &Name, kind: NameKind) -> Self {
        Self::atom(Atom::Name(n.clone(), kind), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(&Monomial, &Rational)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    pub fn depends_on(&self, name: &str) -> bool {
        self.terms.keys().any(|m| m.keys().any(|a| a.depends_on(name)))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                let mut needs_normalizing = false;
                for (a, e) in m2 {
                    match m.get_mut(a) {
                        Some(slot) => {
                            *slot += e;
                            needs_normalizing = true;
                        }
                        None => {
                            m.insert(a.clone(), e.clone());
                        }
                    }
                }
                if needs_normalizing {
                    out.add_assign(&normalize_term(c1 * c2, m));
                } else {
                    out.add_term(m, c1 * c2);
                }
            }
        }
        out
    }

    pub fn pow_int(&self, k: u64) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Rational content and, when `full`, sign and common monomial factor,
    /// so that `self = content * factor * primitive`.
    fn primitive_parts(&self, full: bool) -> (Rational, Monomial, Poly) {
        let mut common = Monomial::new();
        if full {
            // Minimum exponent of each name over all terms, absent counting as 0.
            let names: BTreeSet<&Atom> = self
                .terms
                .keys()
                .flat_map(|m| m.keys())
                .filter(|a| matches!(a, Atom::Name(..)))
                .collect();
            let lows = names.into_iter().map(|a| {
                let low = self
                    .terms
                    .keys()
                    .map(|m| m.get(a).cloned().unwrap_or_else(Rational::zero))
                    .min()
                    .expect("nonempty");
                (a.clone(), low)
            });
            common = lows.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        let mut shifted = Poly::zero();
        for (m, c) in &self.terms {
            shifted.add_term(monomial_quotient(m, &common), c.clone());
        }
        if full {
            if let Some((_, lead)) = shifted.terms.iter().next() {
                if lead.is_negative() {
                    content = -content;
                }
            }
        }
        let prim = shifted.scale_by(&content.recip());
        (content, common, prim)
    }

    fn scale_by(&self, k: &Rational) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow_rational(&self, k: &Rational, asm: &Assumptions) -> Poly {
        if k.is_integer() && !k.is_negative() {
            if let Some(n) = k.to_integer().to_u64() {
                return self.pow_int(n);
            }
        }
        if self.is_zero() {
            return Poly::atom(Atom::Opaque(Poly::zero()), k.clone());
        }
        if let Some((m, c)) = self.single_term() {
            let mut coef = Rational::one();
            let mut mono = Monomial::new();
            let mut stuck = Monomial::new();
            let mut stuck_coef = Rational::one();
            let bump = |mono: &mut Monomial, a: Atom, e: Rational| {
                let slot = mono.entry(a).or_insert_with(Rational::zero);
                *slot += e;
            };
            if c.is_positive() {
                match exact_pow(c, k) {
                    Some(v) => coef = v,
                    None => bump(&mut mono, Atom::Radical(c.clone()), k.clone()),
                }
            } else if let Some(v) = k.is_integer().then(|| exact_pow(c, k)).flatten() {
                coef = v;
            } else {
                stuck_coef = c.clone();
            }
            for (a, e) in m {
                if k.is_integer() || e.is_one() || !e.is_integer() || a.is_positive(asm) {
                    bump(&mut mono, a.clone(), e * k);
                } else {
                    stuck.insert(a.clone(), e.clone());
                }
            }
            if !stuck.is_empty() || !stuck_coef.is_one() {
                let base = Poly::from_term(stuck_coef, stuck);
                bump(&mut mono, Atom::Opaque(base), k.clone());
            }
            return normalize_term(coef, mono);
        }
        let (content, common, prim) = self.primitive_parts(k.is_integer());
        let mut out = Poly::constant(content).pow_rational(k, asm);
        if !common.is_empty() {
            out = out.mul(&Poly::from_term(Rational::one(), common).pow_rational(k, asm));
        }
        out.mul(&Poly::atom(Atom::Opaque(prim), k.clone()))
    }

    pub fn recip(&self) -> Poly {
        self.pow_rational(&rint(-1), &Assumptions::none())
    }

    fn gamma_of(arg: Poly) -> Poly {
        if let Some(c) = arg.as_constant() {
            if c.is_integer() && c.is_positive() {
                if let Some(n) = c.to_integer().to_u32().filter(|n| *n <= 171) {
                    return Poly::constant(BigRational::from_integer(factorial(n - 1)));
                }
            }
        }
        Poly::atom(Atom::Gamma(arg), Rational::one())
    }

    pub fn from_expr(e: &Expr, asm: &Assumptions) -> Poly {
        match e {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Symbol(n) => Poly::name(n, NameKind::Symbol),
            Expr::Var(n) => Poly::name(n, NameKind::Var),
            Expr::Sum(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc.add_assign(&Poly::from_expr(x, asm));
                }
                acc.reduce()
            }
            Expr::Product(xs) => {
                let mut acc = Poly::one();
                for x in xs {
                    acc = acc.mul(&Poly::from_expr(x, asm));
                    if acc.is_zero() {
                        break;
                    }
                }
                acc.reduce()
            }
            Expr::Pow(b, k) => Poly::from_expr(b, asm).pow_rational(k, asm),
            Expr::Gamma(a) => Poly::gamma_of(Poly::from_expr(a, asm)),
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_empty() {
                    return Expr::Const(c.clone());
                }
                let mut factors = Vec::with_capacity(m.len() + 1);
                if !c.is_one() {
                    factors.push(Expr::Const(c.clone()));
                }
                for (a, e) in m {
                    let base = a.to_expr();
                    let plain = e.is_one() && matches!(a, Atom::Name(..) | Atom::Gamma(_));
                    factors.push(if plain {
                        base
                    } else {
                        Expr::Pow(Box::new(base), e.clone())
                    });
                }
                if factors.len() == 1 {
                    factors.pop().unwrap()
                } else {
                    Expr::Product(factors)
                }
            })
            .collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    fn is_denominator(a: &Atom, e: &Rational) -> bool {
        matches!(a, Atom::Opaque(b) if b.len() >= 2) && e.is_integer() && e.is_negative()
    }

    /// Divides numerators by opaque denominators wherever the division is exact.
    pub fn reduce(self) -> Poly {
        let has_denominators = self
            .terms
            .keys()
            .any(|m| m.iter().any(|(a, e)| Self::is_denominator(a, e)));
        if !has_denominators {
            return self;
        }
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in self.terms {
            let (sig, rest): (Monomial, Monomial) = m.into_iter().partition(|(a, e)| Self::is_denominator(a, e));
            groups.entry(sig).or_default().add_term(rest, c);
        }
        let mut out = Poly::zero();
        for (sig, mut numer) in groups {
            let mut remaining = Monomial::new();
            for (atom, e) in sig {
                let Atom::Opaque(base) = &atom else {
                    unreachable!("denominator atoms are opaque")
                };
                let mut k = -e;
                while k.is_positive() {
                    match numer.try_div(base) {
                        Some(q) => {
                            numer = q;
                            k -= Rational::one();
                        }
                        None => break,
                    }
                }
                if k.is_positive() {
                    remaining.insert(atom, -k);
                }
            }
            out.add_assign(&numer.mul(&Poly::from_term(Rational::one(), remaining)));
        }
        match out.combined() {
            Some(c) if c.len() < out.len() => c,
            _ => out,
        }
    }

    /// All denominator groups over one common denominator, with exact
    /// divisions applied to the joint numerator.
    fn combined(&self) -> Option<Poly> {
        let mut denom = Monomial::new();
        let mut signatures = BTreeSet::new();
        for m in self.terms.keys() {
            let sig: Vec<(&Atom, &Rational)> = m.iter().filter(|(a, e)| Self::is_denominator(a, e)).collect();
            for &(a, e) in &sig {
                let slot = denom.entry(a.clone()).or_insert_with(Rational::zero);
                if e < slot {
                    *slot = e.clone();
                }
            }
            if !sig.is_empty() {
                signatures.insert(sig);
            }
        }
        if signatures.len() < 2 {
            return None;
        }
        // numer = self * Π base^k
        let mut numer = Poly::zero();
        for (m, c) in &self.terms {
            let mut t = Poly::from_term(c.clone(), Monomial::new());
            let mut rest = Monomial::new();
            for (a, e) in m {
                if Self::is_denominator(a, e) {
                    continue;
                }
                rest.insert(a.clone(), e.clone());
            }
            t = t.mul(&Poly::from_term(Rational::one(), rest));
            for (a, k) in &denom {
                let Atom::Opaque(base) = a else { unreachable!() };
                let own = m.get(a).cloned().unwrap_or_else(Rational::zero);
                let lift = (own - k).to_integer().to_u64()?;
                if lift > 0 {
                    t = t.mul(&base.pow_int(lift));
                }
            }
            numer.add_assign(&t);
        }
        let mut remaining = Monomial::new();
        for (atom, e) in denom {
            let Atom::Opaque(base) = &atom else { unreachable!() };
            let mut k = -e;
            while k.is_positive() {
                match numer.try_div(base) {
                    Some(q) => {
                        numer = q;
                        k -= Rational::one();
                    }
                    None => break,
                }
            }
            if k.is_positive() {
                remaining.insert(atom, -k);
            }
        }
        Some(numer.mul(&Poly::from_term(Rational::one(), remaining)))
    }

    fn lead(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    /// Exact quotient `self / d`, if one exists.
    pub fn try_div(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some((m, c)) = d.single_term() {
            let inv: Monomial = m.iter().map(|(a, e)| (a.clone(), -e)).collect();
            return Some(self.mul(&normalize_term(c.recip(), inv)));
        }
        const MAX_STEPS: usize = 10_000;
        // Shift both sides to nonnegative exponents; a quotient term with a
        // negative exponent then proves the division inexact.
        let (s_low, d_low) = (self.low_monomial(), d.low_monomial());
        let num = self.shifted(&s_low);
        let den = d.shifted(&d_low);
        let (ld_m, ld_c) = den.lead()?;
        let mut r = num.clone();
        let mut q = Poly::zero();
        for _ in 0..MAX_STEPS {
            let Some((lm, lc)) = r.lead() else {
                let q = q.mul(&Poly::from_term(Rational::one(), monomial_quotient(&s_low, &d_low)));
                return (q.mul(d) == *self).then_some(q);
            };
            let tm = monomial_quotient(lm, ld_m);
            if tm.values().any(|e| e.is_negative()) {
                return None;
            }
            let t = normalize_term(lc / ld_c, tm);
            r = r.sub(&t.mul(&den));
            q.add_assign(&t);
        }
        None
    }

    /// Per-atom minimum exponent over all terms, absent atoms counting as 0.
    fn low_monomial(&self) -> Monomial {
        let atoms: BTreeSet<&Atom> = self.terms.keys().flat_map(|m| m.keys()).collect();
        atoms
            .into_iter()
            .filter_map(|a| {
                let low = self
                    .terms
                    .keys()
                    .map(|m| m.get(a).cloned().unwrap_or_else(Rational::zero))
                    .min()?;
                (!low.is_zero()).then(|| (a.clone(), low))
            })
            .collect()
    }

    fn shifted(&self, low: &Monomial) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(monomial_quotient(m, low), c.clone());
        }
        out
    }

    /// Every atom with the lcm of the denominators of its exponents.
    pub fn collect_atoms(&self, out: &mut BTreeMap<Atom, BigInt>) {
        for m in self.terms.keys() {
            for (a, e) in m {
                let slot = out.entry(a.clone()).or_insert_with(BigInt::one);
                *slot = slot.lcm(e.denom());
            }
        }
    }

    /// Exact value when each atom `a` is replaced by `r_a^{L_a}` (entries of
    /// `values` are `(r_a, L_a)`), which makes every exponent integral.
    pub fn eval_exact(&self, values: &BTreeMap<Atom, (Rational, BigInt)>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (a, e) in m {
                let (r, l) = values.get(a)?;
                let scaled = e * BigRational::from_integer(l.clone());
                if !scaled.is_integer() {
                    return None;
                }
                t *= pow_int_signed(r, scaled.numer())?;
            }
            acc += t;
        }
        Some(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn poly(text: &str) -> Poly {
        Poly::from_expr(&parse_expr(text, &["q", "p", "z"]).unwrap(), &Assumptions::none())
    }

    #[test]
    fn expansion_is_canonical() {
        assert_eq!(poly("(q + p)^2"), poly("q^2 + 2*q*p + p^2"));
        assert_eq!(poly("(q + p)*(q - p)"), poly("q^2 - p^2"));
    }

    #[test]
    fn radicals_fold() {
        assert_eq!(poly("2^(1/2)*2^(1/2)"), poly("2"));
        assert_eq!(poly("4^(1/2)"), poly("2"));
        assert_eq!(poly("8^(1/2)"), poly("2*2^(1/2)"));
    }

    #[test]
    fn exact_division() {
        let n = poly("q^3 - p^3");
        let d = poly("q - p");
        assert_eq!(n.try_div(&d).unwrap(), poly("q^2 + q*p + p^2"));
        assert!(poly("q^2 + 1").try_div(&d).is_none());
    }

    #[test]
    fn denominators_cancel() {
        assert_eq!(poly("(q^2 - 1)*(q + 1)^(-1)"), poly("q - 1"));
        assert_eq!(poly("(1 + q^2)*(1 + q^2)^(-1)"), Poly::one());
        assert_eq!(poly("(2*q + 2*p)^(-1)*(q + p)"), poly("1/2"));
    }

    #[test]
    fn opaque_roots_recombine() {
        assert_eq!(poly("(q + p)^(1/2)*(q + p)^(1/2)"), poly("q + p"));
    }

    #[test]
    fn gamma_of_integers_folds() {
        assert_eq!(poly("Gamma(5)"), poly("24"));
        assert_eq!(poly("Gamma(1 + 1)"), Poly::one());
    }

    #[test]
    fn lex_order_respects_multiplication() {
        let a = poly("q").terms.into_keys().next().unwrap();
        let b = poly("p").terms.into_keys().next().unwrap();
        let z = poly("z^2").terms.into_keys().next().unwrap();
        let ord = lex_cmp(&a, &b);
        let az = poly("q*z^2").terms.into_keys().next().unwrap();
        let bz = poly("p*z^2").terms.into_keys().next().unwrap();
        assert_eq!(lex_cmp(&az, &bz), ord);
        assert_ne!(lex_cmp(&a, &z), Ordering::Equal);
    }
}
