//! Problem instances: a constant magnetic 2-form on `R^{n+1}` in normal form
//! `sum_i alpha_i dX_{2i-1} ^ dX_{2i}`, its gauge potential, and the
//! canonical-picture Hamiltonian.

mod normal_form;

pub use normal_form::{block_diagonal, omega_from_rows, skew_normal_form, OmegaJson, SkewNormalForm, SkewNormalFormJson};

use serde::{Deserialize, Serialize};

use num_traits::{Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::exactpoly::{
    format_rational, frac, parse_rational, radial_momentum, radius_squared, to_f64, PhasePoly, Rational,
    MAX_SPHERE_DIM,
};

/// Sphere dimension, pair strengths and the derived Neumann data.
///
/// Indices are zero-based: pair `i` occupies coordinates `2i` and `2i+1`;
/// for even `n` the last coordinate `n` is unpaired with Neumann coefficient 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagneticModel {
    n: usize,
    alphas: Vec<Rational>,
    a: Vec<Rational>,
    blocks: Vec<Vec<usize>>,
}

impl MagneticModel {
    pub fn new(n: usize, alphas: Vec<Rational>) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("sphere dimension must be at least 2, got {n}")));
        }
        if n > MAX_SPHERE_DIM {
            return Err(invalid(format!("sphere dimension {n} above {MAX_SPHERE_DIM}")));
        }
        let m = n.div_ceil(2);
        if alphas.len() != m {
            return Err(invalid(format!("n = {n} needs {m} alpha values, got {}", alphas.len())));
        }
        if let Some(neg) = alphas.iter().find(|a| a.is_negative()) {
            return Err(invalid(format!("alpha values must be nonnegative, got {neg}")));
        }
        let mut a = vec![Rational::zero(); n + 1];
        for (i, alpha) in alphas.iter().enumerate() {
            let v = alpha * alpha * frac(1, 8);
            a[2 * i] = v.clone();
            a[2 * i + 1] = v;
        }

        // Blocks of equal Neumann coefficient, ordered by ascending value.
        let mut values: Vec<Rational> = a.clone();
        values.sort();
        values.dedup();
        let blocks = values
            .iter()
            .map(|v| (0..=n).filter(|&k| &a[k] == v).collect())
            .collect();
        Ok(MagneticModel { n, alphas, a, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rotation planes, `floor((n+1)/2)`.
    pub fn pair_count(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[Rational] {
        &self.alphas
    }

    /// Neumann coefficients `a_k` (`alpha_i^2 / 8` on both coordinates of pair `i`).
    pub fn neumann_coefficients(&self) -> &[Rational] {
        &self.a
    }

    /// Index partition by equal Neumann coefficient.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Rotation pairs and the unpaired coordinate inside a block, each as a unit.
    pub fn units(&self, block: usize) -> Vec<Vec<usize>> {
        units_of(self.n, &self.blocks[block])
    }

    /// Short stable identifier, e.g. `n4_a1,1`.
    pub fn id(&self) -> String {
        let alphas: Vec<String> = self.alphas.iter().map(format_rational).collect();
        format!("n{}_a{}", self.n, alphas.join(","))
    }

    pub fn alphas_f64(&self) -> Vec<f64> {
        self.alphas.iter().map(to_f64).collect()
    }
}

/// Splits a set of coordinate indices into rotation pairs `{2i, 2i+1}` and
/// leftover singletons. Pairs lying only partly in `group` become singletons.
pub(crate) fn units_of(n: usize, group: &[usize]) -> Vec<Vec<usize>> {
    let mut units = Vec::new();
    let mut k = 0;
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    while k < sorted.len() {
        let i = sorted[k];
        if i.is_multiple_of(2) && i < n && k + 1 < sorted.len() && sorted[k + 1] == i + 1 {
            units.push(vec![i, i + 1]);
            k += 2;
        } else {
            units.push(vec![i]);
            k += 1;
        }
    }
    units
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub n: usize,
    pub alphas: Vec<String>,
}

impl From<&MagneticModel> for ModelJson {
    fn from(m: &MagneticModel) -> Self {
        ModelJson { n: m.n, alphas: m.alphas.iter().map(format_rational).collect() }
    }
}

impl TryFrom<&ModelJson> for MagneticModel {
    type Error = Error;
    fn try_from(j: &ModelJson) -> Result<Self> {
        let alphas = j.alphas.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        MagneticModel::new(j.n, alphas)
    }
}

impl Serialize for MagneticModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for MagneticModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ModelJson::deserialize(d)?;
        MagneticModel::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// Rotation generator `X_i P_j - X_j P_i` as a phase function.
pub fn rotation_generator(n: usize, i: usize, j: usize) -> PhasePoly {
    &PhasePoly::x(n, i) * &PhasePoly::p(n, j) - &PhasePoly::x(n, j) * &PhasePoly::p(n, i)
}

/// Momentum function of the dual field of the gauge 1-form,
/// `S = 1/2 sum_i alpha_i (X_{2i-1} P_{2i} - X_{2i} P_{2i-1})`.
pub fn sigma_linear(model: &MagneticModel) -> PhasePoly {
    let n = model.n;
    model
        .alphas
        .iter()
        .enumerate()
        .fold(PhasePoly::zero(n), |acc, (i, alpha)| {
            acc + rotation_generator(n, 2 * i, 2 * i + 1).scale(&(alpha * frac(1, 2)))
        })
}

/// `U = 1/8 sum_i alpha_i^2 (X_{2i-1}^2 + X_{2i}^2) = sum_k a_k X_k^2`.
pub fn potential(model: &MagneticModel) -> PhasePoly {
    let n = model.n;
    model.a.iter().enumerate().fold(PhasePoly::zero(n), |acc, (k, a)| {
        let x = PhasePoly::x(n, k);
        acc + (&x * &x).scale(a)
    })
}

/// Homogeneous kinetic energy `K = 1/2 (|X|^2 |P|^2 - <X,P>^2) = 1/2 sum_{i<j} M_ij^2`.
pub fn kinetic(n: usize) -> PhasePoly {
    let p2 = (0..=n).fold(PhasePoly::zero(n), |acc, i| {
        let p = PhasePoly::p(n, i);
        acc + &p * &p
    });
    let xp = radial_momentum(n);
    (&radius_squared(n) * &p2 - &xp * &xp).scale(&frac(1, 2))
}

/// Canonical-picture Hamiltonian `H_pert = K - S + U`.
///
/// The linear term carries a minus sign, as in `1/2 |p - sigma|^2`; the
/// magnetic picture is reached with `P -> P - sigma(X)` (see [`gauge_shift`]).
pub fn hamiltonian_pert(model: &MagneticModel) -> PhasePoly {
    kinetic(model.n) - sigma_linear(model) + potential(model)
}

/// Coefficients `J` of the gauge 1-form `sum_k (J X)_k dX_k`; also the
/// ambient vector field `sigma(X) = J X`.
pub fn sigma_matrix(model: &MagneticModel) -> Vec<Vec<Rational>> {
    let d = model.n + 1;
    let mut j = vec![vec![Rational::zero(); d]; d];
    for (i, alpha) in model.alphas.iter().enumerate() {
        let half = alpha * frac(1, 2);
        j[2 * i + 1][2 * i] = half.clone();
        j[2 * i][2 * i + 1] = -half;
    }
    j
}

/// Antisymmetric coefficient matrix `W` of the 2-form `sum_{k<l} W_kl dX_k ^ dX_l`.
pub fn two_form_matrix(model: &MagneticModel) -> Vec<Vec<Rational>> {
    let d = model.n + 1;
    let mut w = vec![vec![Rational::zero(); d]; d];
    for (i, alpha) in model.alphas.iter().enumerate() {
        w[2 * i][2 * i + 1] = alpha.clone();
        w[2 * i + 1][2 * i] = -alpha.clone();
    }
    w
}

/// Exterior derivative of the linear 1-form `sum_k (J X)_k dX_k`, as the
/// antisymmetric matrix `W_lk = J_kl - J_lk`.
pub fn exterior_derivative(j: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = j.len();
    (0..d)
        .map(|l| (0..d).map(|k| &j[k][l] - &j[l][k]).collect())
        .collect()
}

/// Ambient gauge vector field `sigma(X)` at a point.
pub fn sigma_vector(model: &MagneticModel, x: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; model.n + 1];
    for (i, alpha) in model.alphas_f64().into_iter().enumerate() {
        s[2 * i] = -0.5 * alpha * x[2 * i + 1];
        s[2 * i + 1] = 0.5 * alpha * x[2 * i];
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    Plus,
    Minus,
}

impl ShiftDirection {
    fn sign(self) -> f64 {
        match self {
            ShiftDirection::Plus => 1.0,
            ShiftDirection::Minus => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            ShiftDirection::Plus => ShiftDirection::Minus,
            ShiftDirection::Minus => ShiftDirection::Plus,
        }
    }
}

/// `P -> P +/- sigma(X)` at a point `(X, P)` of `T*S^n`. `X` must be unit.
pub fn gauge_shift(point: &[f64], direction: ShiftDirection, model: &MagneticModel) -> Result<Vec<f64>> {
    let d = model.n + 1;
    if point.len() != 2 * d {
        return Err(invalid(format!("point has {} coordinates, expected {}", point.len(), 2 * d)));
    }
    let (x, p) = point.split_at(d);
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (r - 1.0).abs() > 1e-9 {
        let tangential = x.iter().zip(p).map(|(a, b)| a * b).sum();
        return Err(Error::OffConstraint { radial: r * r - 1.0, tangential });
    }
    let s = sigma_vector(model, x);
    let sign = direction.sign();
    let mut out = point.to_vec();
    for k in 0..d {
        out[d + k] += sign * s[k];
    }
    Ok(out)
}
