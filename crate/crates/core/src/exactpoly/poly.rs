use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rational::{to_f64, Rational};
use crate::error::{Error, Result};

/// A phase-space variable. Indices are zero-based: `X(0)` is the first
/// ambient coordinate, `P(0)` its conjugate momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    P(usize),
}

/// Exponent vector of length `2(n+1)`: X-slots first, then P-slots.
///
/// The derived ordering compares total degree first and then the exponent
/// vectors lexicographically, which is graded-lex with `X1 > X2 > ... > P1 > ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u16>,
}

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial { degree: 0, exps: vec![0; num_vars] }
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { degree, exps }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Degree in the momentum block.
    pub fn p_degree(&self) -> u32 {
        let half = self.exps.len() / 2;
        self.exps[half..].iter().map(|&e| e as u32).sum()
    }

    pub fn x_degree(&self) -> u32 {
        self.degree - self.p_degree()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { degree: self.degree + other.degree, exps }
    }
}

/// Sparse polynomial over the rationals in `X1..X_{n+1}, P1..P_{n+1}`.
///
/// Terms are kept in monomial order with no zero coefficients, so the zero
/// polynomial is exactly the empty map and structural equality is value
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePoly {
    n: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn arith(f: &PhasePoly, g: &PhasePoly, op: ArithOp) -> Result<PhasePoly> {
    match op {
        ArithOp::Add => f.try_add(g),
        ArithOp::Sub => f.try_sub(g),
        ArithOp::Mul => f.try_mul(g),
    }
}

impl PhasePoly {
    pub fn zero(n: usize) -> Self {
        PhasePoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Rational) -> Self {
        let mut p = PhasePoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(2 * (n + 1)), c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        PhasePoly::constant(n, Rational::one())
    }

    /// The coordinate function of `var`. Panics if the index exceeds `n`.
    pub fn var(n: usize, var: Var) -> Self {
        let slot = slot_of(n, var).expect("variable index out of range");
        let mut exps = vec![0u16; 2 * (n + 1)];
        exps[slot] = 1;
        let mut p = PhasePoly::zero(n);
        p.terms.insert(Monomial::from_exponents(exps), Rational::one());
        p
    }

    pub fn x(n: usize, i: usize) -> Self {
        PhasePoly::var(n, Var::X(i))
    }

    pub fn p(n: usize, i: usize) -> Self {
        PhasePoly::var(n, Var::P(i))
    }

    /// Builds a polynomial from raw terms; duplicates are summed and zeros dropped.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Result<Self> {
        let mut p = PhasePoly::zero(n);
        for (m, c) in terms {
            if m.exps.len() != p.num_vars() {
                return Err(Error::InvalidInput(format!(
                    "exponent vector of length {} for n = {n}",
                    m.exps.len()
                )));
            }
            accumulate(&mut p.terms, m, c);
        }
        p.terms.retain(|_, c| !c.is_zero());
        Ok(p)
    }

    /// Sphere dimension; the ambient space is `R^{n+1}`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vars(&self) -> usize {
        2 * (self.n + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the monomial with the given exponents (zero if absent).
    pub fn coeff_of(&self, exps: &[u16]) -> Rational {
        self.coeff(&Monomial::from_exponents(exps.to_vec()))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Smallest and largest momentum degree over all terms.
    pub fn p_degree_range(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(Monomial::p_degree);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), d| (lo.min(d), hi.max(d))))
    }

    /// Component of fixed momentum degree.
    pub fn p_homogeneous_part(&self, p_degree: u32) -> PhasePoly {
        PhasePoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.p_degree() == p_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into components graded by momentum degree; absent grades are omitted.
    pub fn split_by_p_degree(&self) -> BTreeMap<u32, PhasePoly> {
        let mut out: BTreeMap<u32, PhasePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.p_degree())
                .or_insert_with(|| PhasePoly::zero(self.n))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    fn check_same(&self, other: &PhasePoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &PhasePoly) -> Result<PhasePoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), c.clone());
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn try_sub(&self, other: &PhasePoly) -> Result<PhasePoly> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            accumulate(&mut out.terms, m.clone(), -c.clone());
        }
        out.terms.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn try_mul(&self, other: &PhasePoly) -> Result<PhasePoly> {
        self.check_same(other)?;
        let (fa, da) = self.integer_form();
        let (fb, db) = other.integer_form();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (ma, ca) in &fa {
            for (mb, cb) in &fb {
                let v = ca * cb;
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += v;
            }
        }
        Ok(PhasePoly::from_integer_form(self.n, acc, da * db))
    }

    pub fn scale(&self, c: &Rational) -> PhasePoly {
        if c.is_zero() {
            return PhasePoly::zero(self.n);
        }
        PhasePoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> PhasePoly {
        let mut out = PhasePoly::one(self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Formal partial derivative with respect to `var`.
    pub fn partial(&self, var: Var) -> Result<PhasePoly> {
        let slot = slot_of(self.n, var)?;
        let mut out = PhasePoly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.exps[slot];
            if e == 0 {
                continue;
            }
            let mut exps = m.exps.clone();
            exps[slot] -= 1;
            let coeff = c * Rational::from_integer(BigInt::from(e));
            out.terms.insert(Monomial::from_exponents(exps), coeff);
        }
        Ok(out)
    }

    /// Canonical bracket `{f,g} = sum_i df/dX_i dg/dP_i - df/dP_i dg/dX_i`.
    ///
    /// Both products in the summand land on the same monomial, so each pair
    /// of terms contributes one integer multiple of `c_f c_g` per coordinate.
    pub fn poisson_bracket(&self, other: &PhasePoly) -> Result<PhasePoly> {
        self.check_same(other)?;
        let d = self.n + 1;
        let (fa, da) = self.integer_form();
        let (fb, db) = other.integer_form();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (ma, ca) in &fa {
            for (mb, cb) in &fb {
                let mut prod: Option<BigInt> = None;
                for i in 0..d {
                    let (xi, pi) = (i, d + i);
                    let k = ma.exps[xi] as i64 * mb.exps[pi] as i64
                        - ma.exps[pi] as i64 * mb.exps[xi] as i64;
                    if k == 0 {
                        continue;
                    }
                    let prod = prod.get_or_insert_with(|| ca * cb);
                    let mut m = ma.mul(mb);
                    m.exps[xi] -= 1;
                    m.exps[pi] -= 1;
                    m.degree -= 2;
                    *acc.entry(m).or_insert_with(BigInt::zero) += &*prod * k;
                }
            }
        }
        Ok(PhasePoly::from_integer_form(self.n, acc, da * db))
    }

    /// Direct term-by-term evaluation in floating point.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        self.check_point_len(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| to_f64(c) * monomial_value(&m.exps, point))
            .sum())
    }

    pub fn evaluate_exact(&self, point: &[Rational]) -> Result<Rational> {
        self.check_point_len(point.len())?;
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (&e, x) in m.exps.iter().zip(point) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    fn check_point_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars() {
            return Err(Error::InvalidInput(format!(
                "point has {len} coordinates, expected {}",
                self.num_vars()
            )));
        }
        Ok(())
    }

    /// Floating-point copy for repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            num_vars: self.num_vars(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let factors = m
                        .exps
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(i, &e)| (i as u16, e as i32))
                        .collect();
                    (to_f64(c), factors)
                })
                .collect(),
        }
    }

    /// Applies `X -> QX`, `P -> QP + s`.
    pub fn substitute_linear(&self, map: &LinearSubstitution) -> Result<PhasePoly> {
        if map.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: map.n });
        }
        let d = self.n + 1;
        let mut images = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut img = PhasePoly::zero(self.n);
            for (j, q) in map.q[i].iter().enumerate() {
                if !q.is_zero() {
                    img = &img + &PhasePoly::x(self.n, j).scale(q);
                }
            }
            images.push(img);
        }
        for i in 0..d {
            let mut img = map.shift[i].clone();
            for (j, q) in map.q[i].iter().enumerate() {
                if !q.is_zero() {
                    img = &img + &PhasePoly::p(self.n, j).scale(q);
                }
            }
            images.push(img);
        }

        let mut powers: HashMap<(usize, u16), PhasePoly> = HashMap::new();
        let mut out = PhasePoly::zero(self.n);
        for (m, c) in &self.terms {
            let mut term = PhasePoly::constant(self.n, c.clone());
            for (slot, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((slot, e))
                    .or_insert_with(|| images[slot].pow(e as u32));
                term = &term * &*pw;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Coefficients over a common denominator: `self = (sum c_m m) / den`.
    fn integer_form(&self) -> (Vec<(&Monomial, BigInt)>, BigInt) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&den / c.denom())))
            .collect();
        (terms, den)
    }

    fn from_integer_form(n: usize, acc: HashMap<Monomial, BigInt>, den: BigInt) -> PhasePoly {
        PhasePoly {
            n,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Rational::new(c, den.clone())))
                .collect(),
        }
    }
}

fn accumulate(terms: &mut BTreeMap<Monomial, Rational>, m: Monomial, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
        }
    }
}

pub(crate) fn slot_of(n: usize, var: Var) -> Result<usize> {
    let d = n + 1;
    match var {
        Var::X(i) if i < d => Ok(i),
        Var::P(i) if i < d => Ok(d + i),
        Var::X(i) | Var::P(i) => Err(Error::IndexOutOfRange { index: i, limit: d }),
    }
}

fn monomial_value(exps: &[u16], point: &[f64]) -> f64 {
    exps.iter()
        .zip(point)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, &x)| x.powi(e as i32))
        .product()
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        /// Panics on dimension mismatch; use the `try_*` form for untrusted input.
        impl<'a> $tr<&'a PhasePoly> for &'a PhasePoly {
            type Output = PhasePoly;
            fn $method(self, rhs: &'a PhasePoly) -> PhasePoly {
                self.$inner(rhs).expect("polynomials over different phase spaces")
            }
        }
        impl $tr<PhasePoly> for PhasePoly {
            type Output = PhasePoly;
            fn $method(self, rhs: PhasePoly) -> PhasePoly {
                (&self).$inner(&rhs).expect("polynomials over different phase spaces")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        PhasePoly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        -&self
    }
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let d = self.n + 1;
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (slot, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = if slot < d { format!("X{}", slot + 1) } else { format!("P{}", slot - d + 1) };
                if e == 1 {
                    write!(f, "*{name}")?;
                } else {
                    write!(f, "*{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Affine change of variables `X -> QX`, `P -> QP + shift`.
#[derive(Debug, Clone)]
pub struct LinearSubstitution {
    pub n: usize,
    pub q: Vec<Vec<Rational>>,
    pub shift: Vec<PhasePoly>,
}

impl LinearSubstitution {
    pub fn identity(n: usize) -> Self {
        let d = n + 1;
        let q = (0..d)
            .map(|i| (0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        LinearSubstitution { n, q, shift: vec![PhasePoly::zero(n); d] }
    }

    pub fn new(q: Vec<Vec<Rational>>, shift: Vec<PhasePoly>) -> Result<Self> {
        let d = q.len();
        if d < 2 {
            return Err(Error::InvalidInput("substitution needs at least 2 coordinates".into()));
        }
        let n = d - 1;
        if q.iter().any(|row| row.len() != d) || shift.len() != d {
            return Err(Error::InvalidInput("substitution matrix must be square and match the shift".into()));
        }
        if let Some(bad) = shift.iter().find(|s| s.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.n() });
        }
        Ok(LinearSubstitution { n, q, shift })
    }

    /// Momentum shift only: `P -> P + shift`.
    pub fn momentum_shift(shift: Vec<PhasePoly>) -> Result<Self> {
        let d = shift.len();
        if d < 2 {
            return Err(Error::InvalidInput("substitution needs at least 2 coordinates".into()));
        }
        let mut s = LinearSubstitution::identity(d - 1);
        s.shift = shift;
        LinearSubstitution::new(s.q, s.shift)
    }
}

/// Floating-point evaluator for a fixed polynomial.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    num_vars: usize,
    terms: Vec<(f64, Vec<(u16, i32)>)>,
}

impl CompiledPoly {
    /// Panics if `point` has the wrong length.
    pub fn eval(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.num_vars, "point length");
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors
                    .iter()
                    .fold(*c, |acc, &(i, e)| acc * point[i as usize].powi(e))
            })
            .sum()
    }

    /// Sum of absolute term values; a scale for rounding-error bounds.
    pub fn abs_eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, factors)| {
                factors
                    .iter()
                    .fold(c.abs(), |acc, &(i, e)| acc * point[i as usize].abs().powi(e))
            })
            .sum()
    }
}

/// Compiled ambient gradient (all `2(n+1)` partials).
#[derive(Debug, Clone)]
pub struct CompiledGradient {
    partials: Vec<CompiledPoly>,
}

impl CompiledGradient {
    pub fn new(f: &PhasePoly) -> Self {
        let d = f.n() + 1;
        let partials = (0..d)
            .map(Var::X)
            .chain((0..d).map(Var::P))
            .map(|v| f.partial(v).expect("in range").compile())
            .collect();
        CompiledGradient { partials }
    }

    pub fn eval(&self, point: &[f64]) -> Vec<f64> {
        self.partials.iter().map(|p| p.eval(point)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rational::{frac, int};

    fn m12(n: usize) -> PhasePoly {
        &PhasePoly::x(n, 0) * &PhasePoly::p(n, 1) - &PhasePoly::x(n, 1) * &PhasePoly::p(n, 0)
    }

    #[test]
    fn cancellation_and_absorption() {
        let n = 2;
        let (x1, p1) = (PhasePoly::x(n, 0), PhasePoly::p(n, 0));
        let s = (&x1 + &p1) + (&x1 - &p1);
        assert_eq!(s, x1.scale(&int(2)));
        assert!((&x1 * &PhasePoly::zero(n)).is_zero());
    }

    #[test]
    fn square_of_rotation_generator() {
        let n = 2;
        let m = m12(n);
        let x = |i| PhasePoly::x(n, i);
        let p = |i| PhasePoly::p(n, i);
        let expected = &(&x(0) * &x(0)) * &(&p(1) * &p(1))
            - (&(&x(0) * &x(1)) * &(&p(0) * &p(1))).scale(&int(2))
            + &(&x(1) * &x(1)) * &(&p(0) * &p(0));
        assert_eq!(&m * &m, expected);
    }

    #[test]
    fn mismatched_dimensions_are_input_errors() {
        let a = PhasePoly::x(2, 0);
        let b = PhasePoly::x(3, 0);
        assert!(matches!(a.try_add(&b), Err(Error::DimensionMismatch { .. })));
        assert!(arith(&a, &b, ArithOp::Mul).is_err());
        assert!(a.poisson_bracket(&b).is_err());
    }

    #[test]
    fn partial_derivatives() {
        let n = 2;
        let x1 = PhasePoly::x(n, 0);
        let f = &(&x1 * &x1) * &PhasePoly::p(n, 1);
        assert_eq!(f.partial(Var::X(0)).unwrap(), (&x1 * &PhasePoly::p(n, 1)).scale(&int(2)));
        assert!((&x1 * &x1).partial(Var::P(0)).unwrap().is_zero());
        assert_eq!(m12(n).partial(Var::P(1)).unwrap(), x1);
        assert!(matches!(f.partial(Var::X(3)), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn canonical_pairing() {
        let n = 3;
        for i in 0..=n {
            for j in 0..=n {
                let xp = PhasePoly::x(n, i).poisson_bracket(&PhasePoly::p(n, j)).unwrap();
                let expect = if i == j { PhasePoly::one(n) } else { PhasePoly::zero(n) };
                assert_eq!(xp, expect);
                assert!(PhasePoly::x(n, i).poisson_bracket(&PhasePoly::x(n, j)).unwrap().is_zero());
                assert!(PhasePoly::p(n, i).poisson_bracket(&PhasePoly::p(n, j)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn rotation_preserves_radius() {
        let n = 2;
        let r = &PhasePoly::x(n, 0) * &PhasePoly::x(n, 0) + &PhasePoly::x(n, 1) * &PhasePoly::x(n, 1);
        assert!(m12(n).poisson_bracket(&r).unwrap().is_zero());
    }

    #[test]
    fn evaluation() {
        let n = 2;
        let v = m12(n).evaluate(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(PhasePoly::zero(n).evaluate(&[0.3; 6]).unwrap(), 0.0);
        let x1 = PhasePoly::x(n, 0);
        let pt = [frac(3, 5), frac(4, 5), int(0), int(0), int(0), int(0)];
        assert_eq!((&x1 * &x1).evaluate_exact(&pt).unwrap(), frac(9, 25));
        assert!(x1.evaluate(&[0.0; 5]).is_err());
    }

    #[test]
    fn identity_and_shift_substitution() {
        let n = 2;
        let f = &m12(n) * &PhasePoly::x(n, 2) + PhasePoly::p(n, 2);
        assert_eq!(f.substitute_linear(&LinearSubstitution::identity(n)).unwrap(), f);

        let mut shift = vec![PhasePoly::zero(n); 3];
        shift[0] = PhasePoly::x(n, 1);
        let sub = LinearSubstitution::momentum_shift(shift).unwrap();
        let p1 = PhasePoly::p(n, 0);
        assert_eq!(p1.substitute_linear(&sub).unwrap(), &p1 + &PhasePoly::x(n, 1));
    }

    #[test]
    fn display_is_readable() {
        let s = m12(2).to_string();
        assert!(s.contains("X1") && s.contains("P2"), "{s}");
        assert_eq!(PhasePoly::zero(2).to_string(), "0");
    }
}
