//! Uhlenbeck-type quadratic integrals of the (degenerate) Neumann system,
//! their limits inside blocks of equal coefficients, and the commuting basis
//! of quadratic and linear integrals for a magnetic model.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactpoly::{frac, int, serde_rational_vec, PhasePoly, Rational};
use crate::magnetic_model::{rotation_generator, units_of, MagneticModel, ModelJson};

/// `M_ij = X_i P_j - X_j P_i` for zero-based `i < j <= n`.
pub fn killing(i: usize, j: usize, n: usize) -> Result<PhasePoly> {
    if j > n {
        return Err(Error::IndexOutOfRange { index: j, limit: n + 1 });
    }
    if i >= j {
        return Err(invalid(format!("killing field needs i < j, got ({i}, {j})")));
    }
    Ok(rotation_generator(n, i, j))
}

fn sphere_dim(a: &[Rational], b: &[Rational]) -> Result<usize> {
    if a.len() < 2 {
        return Err(invalid("need at least two ambient coordinates"));
    }
    if a.len() != b.len() {
        return Err(invalid(format!("A has {} entries but B has {}", a.len(), b.len())));
    }
    Ok(a.len() - 1)
}

fn squared_generator(n: usize, i: usize, j: usize) -> PhasePoly {
    let m = rotation_generator(n, i, j);
    &m * &m
}

fn quadratic_potential(n: usize, b: &[Rational]) -> PhasePoly {
    b.iter().enumerate().fold(PhasePoly::zero(n), |acc, (k, bk)| {
        let x = PhasePoly::x(n, k);
        acc + (&x * &x).scale(bk)
    })
}

/// `F_B = 1/2 sum_{i<j} (b_i - b_j)/(a_i - a_j) M_ij^2 + sum_i b_i X_i^2`
/// for pairwise distinct `a`.
pub fn uhlenbeck_f(a: &[Rational], b: &[Rational]) -> Result<PhasePoly> {
    let n = sphere_dim(a, b)?;
    for i in 0..=n {
        for j in i + 1..=n {
            if a[i] == a[j] {
                return Err(invalid(format!(
                    "a[{i}] = a[{j}] = {}; repeated coefficients need the degenerate form",
                    a[i]
                )));
            }
        }
    }
    degenerate_f(a, b)
}

/// Degenerate form: pairs with `a_i = a_j` are dropped from the kinetic part.
/// `b` must be constant wherever `a` is.
pub fn degenerate_f(a: &[Rational], b: &[Rational]) -> Result<PhasePoly> {
    let n = sphere_dim(a, b)?;
    let half = frac(1, 2);
    let mut out = quadratic_potential(n, b);
    for i in 0..=n {
        for j in i + 1..=n {
            if a[i] == a[j] {
                if b[i] != b[j] {
                    return Err(invalid(format!(
                        "B is not constant on the block containing {i} and {j} ({} vs {})",
                        b[i], b[j]
                    )));
                }
                continue;
            }
            let c = (&b[i] - &b[j]) / (&a[i] - &a[j]) * &half;
            if !c.is_zero() {
                out = out + squared_generator(n, i, j).scale(&c);
            }
        }
    }
    Ok(out)
}

/// `F_{I,mu} = 1/2 sum_{l<m in I, lambda_l != lambda_m} (mu_l - mu_m)/(lambda_l - lambda_m) M_lm^2`.
///
/// `lambda` and `mu` run parallel to `group`; both must agree on the two
/// coordinates of a rotation pair, and `lambda` must separate distinct units.
pub fn limit_integral(n: usize, group: &[usize], lambda: &[Rational], mu: &[Rational]) -> Result<PhasePoly> {
    if lambda.len() != group.len() || mu.len() != group.len() {
        return Err(invalid("lambda and mu must have one entry per group index"));
    }
    if let Some(&bad) = group.iter().find(|&&g| g > n) {
        return Err(Error::IndexOutOfRange { index: bad, limit: n + 1 });
    }
    let mut sorted = group.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != group.len() {
        return Err(invalid("group indices must be distinct"));
    }
    let pos = |idx: usize| group.iter().position(|&g| g == idx).expect("member");

    let units = units_of(n, group);
    for u in &units {
        if let [l, m] = u[..] {
            let (pl, pm) = (pos(l), pos(m));
            if lambda[pl] != lambda[pm] || mu[pl] != mu[pm] {
                return Err(invalid(format!("lambda and mu must agree on the pair ({l}, {m})")));
            }
        }
    }
    for (ua, u) in units.iter().enumerate() {
        for v in &units[ua + 1..] {
            if lambda[pos(u[0])] == lambda[pos(v[0])] {
                return Err(invalid(format!(
                    "lambda takes the value {} on two distinct units {u:?} and {v:?}",
                    lambda[pos(u[0])]
                )));
            }
        }
    }

    let half = frac(1, 2);
    let mut out = PhasePoly::zero(n);
    for (x, &l) in group.iter().enumerate() {
        for (y, &m) in group.iter().enumerate() {
            if l >= m || lambda[x] == lambda[y] {
                continue;
            }
            let c = (&mu[x] - &mu[y]) / (&lambda[x] - &lambda[y]) * &half;
            if !c.is_zero() {
                out = out + squared_generator(n, l, m).scale(&c);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralKind {
    #[serde(rename = "quad")]
    Quadratic,
    #[serde(rename = "linear")]
    Linear,
}

/// How a family member was built. Indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Degenerate `F_B` with `B` the indicator of one block.
    Indicator {
        block: usize,
        #[serde(with = "serde_rational_vec")]
        b: Vec<Rational>,
    },
    /// Limit integral inside a block holding several units.
    Limit {
        block: usize,
        group: Vec<usize>,
        #[serde(with = "serde_rational_vec")]
        lambda: Vec<Rational>,
        #[serde(with = "serde_rational_vec")]
        mu: Vec<Rational>,
    },
    /// Rotation generator `M_ij`.
    Rotation { i: usize, j: usize },
    /// Supplied from outside; no construction recorded.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integral {
    #[serde(rename = "tag")]
    pub kind: IntegralKind,
    pub provenance: Provenance,
    pub poly: PhasePoly,
}

/// `n` integrals for a model: quadratic members first, then the linear ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralFamily {
    pub model: MagneticModel,
    pub members: Vec<Integral>,
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    model: ModelJson,
    integrals: Vec<Integral>,
}

impl IntegralFamily {
    /// Checks member count and that every polynomial lives over the model's space.
    pub fn new(model: MagneticModel, members: Vec<Integral>) -> Result<Self> {
        let n = model.n();
        if members.len() != n {
            return Err(invalid(format!("family for n = {n} needs {n} integrals, got {}", members.len())));
        }
        if let Some(bad) = members.iter().find(|m| m.poly.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.poly.n() });
        }
        Ok(IntegralFamily { model, members })
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn polys(&self) -> Vec<&PhasePoly> {
        self.members.iter().map(|m| &m.poly).collect()
    }

    pub fn count(&self, kind: IntegralKind) -> usize {
        self.members.iter().filter(|m| m.kind == kind).count()
    }

    pub fn linears(&self) -> impl Iterator<Item = &Integral> {
        self.members.iter().filter(|m| m.kind == IntegralKind::Linear)
    }

    pub fn quads(&self) -> impl Iterator<Item = &Integral> {
        self.members.iter().filter(|m| m.kind == IntegralKind::Quadratic)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(FamilyJson { model: ModelJson::from(&self.model), integrals: self.members.clone() })
            .expect("family serializes")
    }

    /// Parses a family document; unknown top-level fields (metadata) are ignored.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: FamilyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let model = MagneticModel::try_from(&j.model)?;
        IntegralFamily::new(model, j.integrals)
    }
}

fn indicator(len: usize, on: &[usize]) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    for &k in on {
        v[k] = Rational::one();
    }
    v
}

/// Commuting basis: block-indicator `F_B` for all but the last block, the
/// within-block limit integrals (pair-ordinal `lambda` ladder, unit-indicator
/// `mu`), then the rotation generators `M_{2i-1,2i}`.
pub fn commuting_basis(model: &MagneticModel) -> IntegralFamily {
    let n = model.n();
    let a = model.neumann_coefficients();
    let blocks = model.blocks();
    let mut members = Vec::with_capacity(n);

    for (r, block) in blocks.iter().enumerate().take(blocks.len() - 1) {
        let b = indicator(n + 1, block);
        let poly = degenerate_f(a, &b).expect("indicator vectors are block-constant");
        members.push(Integral {
            kind: IntegralKind::Quadratic,
            provenance: Provenance::Indicator { block: r, b },
            poly,
        });
    }

    for (r, block) in blocks.iter().enumerate() {
        let units = model.units(r);
        if units.len() < 2 {
            continue;
        }
        let group: Vec<usize> = units.iter().flatten().copied().collect();
        let lambda: Vec<Rational> = units
            .iter()
            .enumerate()
            .flat_map(|(k, u)| std::iter::repeat_n(int(k as i64 + 1), u.len()))
            .collect();
        for t in 0..units.len() - 1 {
            let mu: Vec<Rational> = units
                .iter()
                .enumerate()
                .flat_map(|(k, u)| std::iter::repeat_n(if k == t { Rational::one() } else { Rational::zero() }, u.len()))
                .collect();
            let poly = limit_integral(n, &group, &lambda, &mu).expect("ladder separates units");
            members.push(Integral {
                kind: IntegralKind::Quadratic,
                provenance: Provenance::Limit { block: r, group: group.clone(), lambda: lambda.clone(), mu },
                poly,
            });
        }
        debug_assert!(block.len() == group.len());
    }

    for i in 0..model.pair_count() {
        members.push(Integral {
            kind: IntegralKind::Linear,
            provenance: Provenance::Rotation { i: 2 * i, j: 2 * i + 1 },
            poly: rotation_generator(n, 2 * i, 2 * i + 1),
        });
    }

    IntegralFamily::new(model.clone(), members).expect("basis has n members")
}
