//! Per-instance checks of the integrability claims: exact pairwise
//! commutation, functional independence on `T*S^n`, membership of the
//! Hamiltonian in the span of the family, and the extra integrals that
//! appear when pair strengths coincide.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exactpoly::{format_rational, radius_squared, CompiledGradient, Monomial, PhasePoly, Rational};
use crate::integral_family::{IntegralFamily, IntegralKind, Provenance};
use crate::magnetic_model::{hamiltonian_pert, rotation_generator, MagneticModel};
use crate::sampling::{constrained_point, task_rng};

/// Points per pair used to classify a nonzero bracket.
pub const CONSTRAINT_SAMPLES: usize = 50;
/// Relative size under which a bracket value counts as zero on `T*S^n`.
pub const CONSTRAINT_RTOL: f64 = 1e-10;
/// Singular values below this fraction of the largest are dropped.
pub const RANK_RTOL: f64 = 1e-8;
/// Fraction of samples that must reach full rank.
pub const FULL_RANK_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    ZeroPolynomial,
    ZeroOnConstraints,
    Nonzero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub left: String,
    pub right: String,
    pub status: PairStatus,
    /// Number of terms of the bracket polynomial.
    pub witness_terms: usize,
}

fn member_label(k: usize) -> String {
    format!("F{}", k + 1)
}

/// Exact bracket, then a sampled check on the constraint set when it is not
/// identically zero.
pub fn classify_pair(f: &PhasePoly, g: &PhasePoly, seed: u64, stream: u64) -> Result<(PairStatus, usize)> {
    let br = f.poisson_bracket(g)?;
    if br.is_zero() {
        return Ok((PairStatus::ZeroPolynomial, 0));
    }
    let n = f.n();
    let (gf, gg, cb) = (CompiledGradient::new(f), CompiledGradient::new(g), br.compile());
    let mut rng = task_rng(seed, stream);
    let vanishes = (0..CONSTRAINT_SAMPLES).all(|_| {
        let z = constrained_point(&mut rng, n);
        let scale = norm(&gf.eval(&z)) * norm(&gg.eval(&z));
        let scale = scale.max(cb.abs_eval(&z));
        cb.eval(&z).abs() <= CONSTRAINT_RTOL * scale
    });
    let status = if vanishes { PairStatus::ZeroOnConstraints } else { PairStatus::Nonzero };
    Ok((status, br.len()))
}

/// All pairs `i <= j` of family members, plus `(F_k, H)` when requested.
pub fn check_commutation(family: &IntegralFamily, include_hamiltonian: bool, seed: u64) -> Result<Vec<PairResult>> {
    let polys = family.polys();
    let h = hamiltonian_pert(&family.model);
    let mut jobs: Vec<(usize, Option<usize>)> = Vec::new();
    for i in 0..polys.len() {
        for j in i..polys.len() {
            jobs.push((i, Some(j)));
        }
    }
    if include_hamiltonian {
        jobs.extend((0..polys.len()).map(|i| (i, None)));
    }
    jobs.par_iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let (g, right) = match j {
                Some(j) => (polys[j], member_label(j)),
                None => (&h, "H".to_string()),
            };
            let (status, witness_terms) = classify_pair(polys[i], g, seed, k as u64)?;
            Ok(PairResult { left: member_label(i), right, status, witness_terms })
        })
        .collect()
}

fn check_p_profile(p: &PhasePoly, want: u32, what: &str) -> Result<()> {
    match p.p_degree_range() {
        None => Ok(()),
        Some((lo, hi)) if lo == want && hi == want => Ok(()),
        Some((lo, hi)) => Err(invalid(format!("{what} must have momentum degree {want}, found {lo}..={hi}"))),
    }
}

/// `{K1, U2} + {U1, K2} = 0` exactly: the momentum-degree-1 piece of
/// `{K1 + U1, K2 + U2}`, i.e. the compatibility of potentials with the
/// kinetic parts.
pub fn potential_compatibility(k1: &PhasePoly, u1: &PhasePoly, k2: &PhasePoly, u2: &PhasePoly) -> Result<bool> {
    check_p_profile(k1, 2, "K1")?;
    check_p_profile(k2, 2, "K2")?;
    check_p_profile(u1, 0, "U1")?;
    check_p_profile(u2, 0, "U2")?;
    let mixed = k1.poisson_bracket(u2)?.try_add(&u1.poisson_bracket(k2)?)?;
    Ok(mixed.is_zero())
}

/// Brackets of the momentum-graded pieces of `f` and `g`, collected by the
/// momentum degree they land in.
pub fn graded_brackets(f: &PhasePoly, g: &PhasePoly) -> Result<BTreeMap<u32, PhasePoly>> {
    let mut out: BTreeMap<u32, PhasePoly> = BTreeMap::new();
    for (df, pf) in f.split_by_p_degree() {
        for (dg, pg) in g.split_by_p_degree() {
            if df + dg == 0 {
                continue;
            }
            let grade = df + dg - 1;
            let piece = pf.poisson_bracket(&pg)?;
            let slot = out.entry(grade).or_insert_with(|| PhasePoly::zero(f.n()));
            *slot = slot.try_add(&piece)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowRankPoint {
    pub sample: usize,
    pub rank: usize,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankStats {
    pub samples: usize,
    pub seed: u64,
    pub target_rank: usize,
    /// rank -> number of samples
    pub histogram: BTreeMap<usize, usize>,
    pub full_rank_samples: usize,
    /// Samples below target rank (first few only).
    pub low_rank_points: Vec<LowRankPoint>,
}

impl RankStats {
    pub fn full_rank_fraction(&self) -> f64 {
        if self.samples == 0 {
            return 0.0;
        }
        self.full_rank_samples as f64 / self.samples as f64
    }

    pub fn passes(&self) -> bool {
        self.samples > 0 && self.full_rank_fraction() >= FULL_RANK_FRACTION
    }

    /// Most frequent rank.
    pub fn modal_rank(&self) -> usize {
        self.histogram
            .iter()
            .max_by_key(|(r, c)| (**c, **r))
            .map(|(r, _)| *r)
            .unwrap_or(0)
    }
}

const MAX_LOW_RANK_REPORTED: usize = 10;

/// Rank of the differentials of `polys` restricted to `T(T*S^n)` at `z`.
///
/// Ambient gradients are projected off the normals of `|X|^2 = 1` and
/// `<X,P> = 0`, i.e. off `span{(X, 0), (P, X)}`.
pub fn constrained_rank(grads: &[CompiledGradient], z: &[f64]) -> usize {
    let dim = z.len();
    let d = dim / 2;
    let mut n1 = vec![0.0; dim];
    n1[..d].copy_from_slice(&z[..d]);
    let mut n2 = vec![0.0; dim];
    n2[..d].copy_from_slice(&z[d..]);
    n2[d..].copy_from_slice(&z[..d]);
    let normals = orthonormal(vec![n1, n2]);

    let rows: Vec<Vec<f64>> = grads
        .iter()
        .map(|g| {
            let mut r = g.eval(z);
            for nv in &normals {
                let c = dot(&r, nv);
                r.iter_mut().zip(nv).for_each(|(a, b)| *a -= c * b);
            }
            r
        })
        .collect();
    if rows.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * top).count()
}

fn orthonormal(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for o in &out {
            let c = dot(&v, o);
            v.iter_mut().zip(o).for_each(|(a, b)| *a -= c * b);
        }
        let nv = norm(&v);
        if nv > 1e-14 {
            v.iter_mut().for_each(|a| *a /= nv);
            out.push(v);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Numerical rank of the constrained differentials at `samples` seeded points.
pub fn functional_independence(polys: &[&PhasePoly], samples: usize, seed: u64) -> Result<RankStats> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    let n = match polys.first() {
        Some(p) => p.n(),
        None => return Err(invalid("no functions to test")),
    };
    if let Some(bad) = polys.iter().find(|p| p.n() != n) {
        return Err(crate::Error::DimensionMismatch { expected: n, found: bad.n() });
    }
    let grads: Vec<CompiledGradient> = polys.iter().map(|p| CompiledGradient::new(p)).collect();
    let target = polys.len();
    let ranks: Vec<(usize, Vec<f64>)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let z = constrained_point(&mut task_rng(seed, k as u64), n);
            (constrained_rank(&grads, &z), z)
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut low_rank_points = Vec::new();
    for (k, (r, z)) in ranks.into_iter().enumerate() {
        *histogram.entry(r).or_insert(0) += 1;
        if r < target && low_rank_points.len() < MAX_LOW_RANK_REPORTED {
            low_rank_points.push(LowRankPoint { sample: k, rank: r, point: z });
        }
    }
    let full_rank_samples = histogram.get(&target).copied().unwrap_or(0);
    Ok(RankStats { samples, seed, target_rank: target, histogram, full_rank_samples, low_rank_points })
}

/// `H = sum_k c_k F_k + sum_i s_i L_i^2 + c_r |X|^2 + c_0` with `L_i` the
/// linear members; squares of linear integrals are quadratic integrals in
/// their own right and carry the within-pair kinetic terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member_coeffs: Vec<Rational>,
    /// `(member index, coefficient)` for each squared linear member.
    pub square_coeffs: Vec<(usize, Rational)>,
    pub radius_coeff: Rational,
    pub constant: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipOutcome {
    Representable(Membership),
    NotRepresentable { residual_terms: usize },
}

impl MembershipOutcome {
    pub fn is_representable(&self) -> bool {
        matches!(self, MembershipOutcome::Representable(_))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum MembershipJson {
    Representable {
        members: Vec<String>,
        squares: Vec<(String, String)>,
        radius: String,
        constant: String,
    },
    NotRepresentable {
        residual_terms: usize,
    },
}

impl Serialize for MembershipOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let j = match self {
            MembershipOutcome::Representable(m) => MembershipJson::Representable {
                members: m.member_coeffs.iter().map(format_rational).collect(),
                squares: m
                    .square_coeffs
                    .iter()
                    .map(|(k, c)| (member_label(*k), format_rational(c)))
                    .collect(),
                radius: format_rational(&m.radius_coeff),
                constant: format_rational(&m.constant),
            },
            MembershipOutcome::NotRepresentable { residual_terms } => {
                MembershipJson::NotRepresentable { residual_terms: *residual_terms }
            }
        };
        j.serialize(s)
    }
}

/// Solves `sum_j c_j columns[j] = rhs` exactly in coefficient space; free
/// unknowns are set to zero. `None` when inconsistent.
pub fn solve_in_span(columns: &[PhasePoly], rhs: &PhasePoly) -> Option<Vec<Rational>> {
    let mut index: HashMap<&Monomial, usize> = HashMap::new();
    for p in columns.iter().chain(std::iter::once(rhs)) {
        for (m, _) in p.terms() {
            let next = index.len();
            index.entry(m).or_insert(next);
        }
    }
    let ncols = columns.len();
    let mut rows = vec![vec![Rational::zero(); ncols + 1]; index.len()];
    for (j, p) in columns.iter().enumerate() {
        for (m, c) in p.terms() {
            rows[index[m]][j] = c.clone();
        }
    }
    for (m, c) in rhs.terms() {
        rows[index[m]][ncols] = c.clone();
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, piv);
        let inv = Rational::one() / &rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in c..=ncols {
                    let sub = &f * &rows[r][k];
                    rows[i][k] -= sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); ncols];
    for (row, col) in pivots {
        sol[col] = rows[row][ncols].clone();
    }
    Some(sol)
}

pub fn hamiltonian_membership(family: &IntegralFamily, h: &PhasePoly) -> Result<MembershipOutcome> {
    let n = family.n();
    if h.n() != n {
        return Err(crate::Error::DimensionMismatch { expected: n, found: h.n() });
    }
    let mut columns: Vec<PhasePoly> = family.polys().into_iter().cloned().collect();
    let linear_idx: Vec<usize> = family
        .members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.kind == IntegralKind::Linear)
        .map(|(k, _)| k)
        .collect();
    for &k in &linear_idx {
        let l = &family.members[k].poly;
        columns.push(l * l);
    }
    columns.push(radius_squared(n));
    columns.push(PhasePoly::one(n));

    let Some(sol) = solve_in_span(&columns, h) else {
        // inconsistent system: no exact decomposition, report the size of h itself
        return Ok(MembershipOutcome::NotRepresentable { residual_terms: h.len() });
    };
    let combo = columns
        .iter()
        .zip(&sol)
        .fold(PhasePoly::zero(n), |acc, (p, c)| acc + p.scale(c));
    let residual = h.try_sub(&combo)?;
    if !residual.is_zero() {
        return Ok(MembershipOutcome::NotRepresentable { residual_terms: residual.len() });
    }
    let nm = family.members.len();
    Ok(MembershipOutcome::Representable(Membership {
        member_coeffs: sol[..nm].to_vec(),
        square_coeffs: linear_idx.iter().zip(&sol[nm..]).map(|(&k, c)| (k, c.clone())).collect(),
        radius_coeff: sol[nm + linear_idx.len()].clone(),
        constant: sol[nm + linear_idx.len() + 1].clone(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// A single rotation generator `M_lm` joining two units of a block.
    Generator,
    /// `M_pq + M_{p+1,q+1}` or `M_{p,q+1} - M_{p+1,q}` for two rotation pairs
    /// of a block: the combinations that also commute with the in-pair
    /// rotations carried by the linear term of `H_pert`.
    UnitaryCombination,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub block: usize,
    pub kind: CandidateKind,
    /// One-based label, e.g. `M13` or `M13+M24`.
    pub label: String,
    /// `(sign, l, m)` with zero-based indices.
    pub terms: Vec<(i8, usize, usize)>,
    pub in_family: bool,
    pub commutes_with_hamiltonian: bool,
    pub commutes_with_indicator_integrals: bool,
    /// Modal rank of the family together with this candidate.
    pub extended_rank: usize,
    pub independent_of_family: bool,
}

impl ProbeResult {
    /// Commutes with `H_pert` and raises the rank of the family.
    pub fn is_extra_integral(&self) -> bool {
        self.commutes_with_hamiltonian && self.independent_of_family
    }
}

fn candidate_label(terms: &[(i8, usize, usize)]) -> String {
    terms
        .iter()
        .enumerate()
        .map(|(k, &(s, l, m))| {
            let sign = match (k, s < 0) {
                (_, true) => "-",
                (0, false) => "",
                _ => "+",
            };
            format!("{sign}M{}{}", l + 1, m + 1)
        })
        .collect()
}

/// `(block, kind, signed generator terms)`.
type Candidate = (usize, CandidateKind, Vec<(i8, usize, usize)>);

fn probe_candidates(model: &MagneticModel) -> Vec<Candidate> {
    let mut out = Vec::new();
    for r in 0..model.blocks().len() {
        let units = model.units(r);
        if units.len() < 2 {
            continue;
        }
        for (a, ua) in units.iter().enumerate() {
            for ub in &units[a + 1..] {
                for &l in ua {
                    for &m in ub {
                        let (l, m) = (l.min(m), l.max(m));
                        out.push((r, CandidateKind::Generator, vec![(1, l, m)]));
                    }
                }
                if let ([p, _], [q, _]) = (ua.as_slice(), ub.as_slice()) {
                    let (p, q) = (*p.min(q), *p.max(q));
                    out.push((r, CandidateKind::UnitaryCombination, vec![(1, p, q), (1, p + 1, q + 1)]));
                    out.push((r, CandidateKind::UnitaryCombination, vec![(1, p, q + 1), (-1, p + 1, q)]));
                }
            }
        }
    }
    out
}

/// For every block holding at least two units, brackets each cross-unit
/// generator `M_lm` (and, between rotation pairs, the unitary combinations)
/// with `H_pert` and the indicator-built quadratic members, and tests whether
/// it raises the rank of the family.
pub fn superintegrability_probe(family: &IntegralFamily, samples: usize, seed: u64) -> Result<Vec<ProbeResult>> {
    let model = &family.model;
    let n = model.n();
    let h = hamiltonian_pert(model);
    let indicator_quads: Vec<&PhasePoly> = family
        .members
        .iter()
        .filter(|m| matches!(m.provenance, Provenance::Indicator { .. }))
        .map(|m| &m.poly)
        .collect();
    probe_candidates(model)
        .into_par_iter()
        .enumerate()
        .map(|(k, (block, kind, terms))| {
            let g = terms.iter().fold(PhasePoly::zero(n), |acc, &(s, l, m)| {
                let gen = rotation_generator(n, l, m);
                if s < 0 { acc - gen } else { acc + gen }
            });
            let in_family = family.polys().iter().any(|p| **p == g || **p == -&g);
            let commutes_with_hamiltonian = g.poisson_bracket(&h)?.is_zero();
            let mut commutes_with_indicator_integrals = true;
            for q in &indicator_quads {
                commutes_with_indicator_integrals &= g.poisson_bracket(q)?.is_zero();
            }
            let mut ext = family.polys();
            ext.push(&g);
            let stats = functional_independence(&ext, samples, seed.wrapping_add(0x9e37_79b9).wrapping_add(k as u64))?;
            Ok(ProbeResult {
                block,
                kind,
                label: candidate_label(&terms),
                terms,
                in_family,
                commutes_with_hamiltonian,
                commutes_with_indicator_integrals,
                extended_rank: stats.modal_rank(),
                independent_of_family: stats.passes(),
            })
        })
        .collect()
}

/// Central-difference approximation of `{f, g}` at `point` from evaluations only.
pub fn fd_bracket_oracle(f: &PhasePoly, g: &PhasePoly, point: &[f64], h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(invalid("finite-difference step must be positive"));
    }
    if f.n() != g.n() {
        return Err(crate::Error::DimensionMismatch { expected: f.n(), found: g.n() });
    }
    let (cf, cg) = (f.compile(), g.compile());
    if point.len() != f.num_vars() {
        return Err(invalid("point length does not match the phase space"));
    }
    let grad = |c: &crate::exactpoly::CompiledPoly| -> Vec<f64> {
        let mut z = point.to_vec();
        (0..point.len())
            .map(|k| {
                let orig = z[k];
                z[k] = orig + h;
                let up = c.eval(&z);
                z[k] = orig - h;
                let down = c.eval(&z);
                z[k] = orig;
                (up - down) / (2.0 * h)
            })
            .collect()
    };
    let (df, dg) = (grad(&cf), grad(&cg));
    let d = point.len() / 2;
    Ok((0..d).map(|i| df[i] * dg[d + i] - df[d + i] * dg[i]).sum())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub quadratic: usize,
    pub linear: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub model_id: String,
    pub model: MagneticModel,
    pub seed: u64,
    pub counts: FamilyCounts,
    pub pair_results: Vec<PairResult>,
    pub rank_stats: RankStats,
    pub membership: MembershipOutcome,
    pub probe_results: Vec<ProbeResult>,
    pub pass: bool,
    /// Kept out of the serialized report so reports stay byte-reproducible.
    #[serde(skip)]
    pub wall_times: Vec<(&'static str, Duration)>,
}

impl VerificationReport {
    pub fn all_pairs_zero(&self) -> bool {
        self.pair_results.iter().all(|p| p.status == PairStatus::ZeroPolynomial)
    }
}

/// Runs every check; PASS needs identically vanishing brackets, full rank on
/// enough samples, and an exact membership decomposition.
pub fn verify_family(family: &IntegralFamily, samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut wall_times = Vec::new();
    let t = Instant::now();
    let pair_results = check_commutation(family, true, seed)?;
    wall_times.push(("commutation", t.elapsed()));

    let t = Instant::now();
    let rank_stats = functional_independence(&family.polys(), samples, seed)?;
    wall_times.push(("independence", t.elapsed()));

    let t = Instant::now();
    let membership = hamiltonian_membership(family, &hamiltonian_pert(&family.model))?;
    wall_times.push(("membership", t.elapsed()));

    let t = Instant::now();
    let probe_results = superintegrability_probe(family, samples, seed)?;
    wall_times.push(("probe", t.elapsed()));

    let mut report = VerificationReport {
        model_id: family.model.id(),
        model: family.model.clone(),
        seed,
        counts: FamilyCounts {
            quadratic: family.count(IntegralKind::Quadratic),
            linear: family.count(IntegralKind::Linear),
        },
        pair_results,
        rank_stats,
        membership,
        probe_results,
        pass: false,
        wall_times,
    };
    report.pass = report.all_pairs_zero() && report.rank_stats.passes() && report.membership.is_representable();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{frac, int};
    use crate::integral_family::{commuting_basis, degenerate_f, uhlenbeck_f, Integral};
    use crate::magnetic_model::kinetic;
    use crate::sampling::ambient_point;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn model(n: usize, a: &[i64]) -> MagneticModel {
        MagneticModel::new(n, ints(a)).unwrap()
    }

    #[test]
    fn self_pairs_and_two_sphere() {
        let fam = commuting_basis(&model(2, &[1]));
        let res = check_commutation(&fam, true, 0).unwrap();
        assert_eq!(res.len(), 3 + 2);
        assert!(res.iter().all(|p| p.status == PairStatus::ZeroPolynomial));
    }

    #[test]
    fn nonzero_and_constraint_tiers() {
        let n = 2;
        let x1p1 = &PhasePoly::x(n, 0) * &PhasePoly::p(n, 0);
        let m12 = rotation_generator(n, 0, 1);
        assert_eq!(classify_pair(&x1p1, &m12, 1, 0).unwrap().0, PairStatus::Nonzero);
        // {|X|^2, <X,P>} = 2|X|^2, not zero on the sphere
        let r = radius_squared(n);
        let xp = crate::exactpoly::radial_momentum(n);
        assert_eq!(classify_pair(&r, &xp, 1, 0).unwrap().0, PairStatus::Nonzero);
        // {|X|^2 / 2, <X,P>^2 / 2} = 2 |X|^2 <X,P>: zero on T*S^n but not identically
        let f = r.scale(&frac(1, 2));
        let g = (&xp * &xp).scale(&frac(1, 2));
        assert_eq!(classify_pair(&f, &g, 1, 0).unwrap().0, PairStatus::ZeroOnConstraints);
    }

    #[test]
    fn compatibility_examples() {
        let n = 2;
        let a = ints(&[1, 2, 3]);
        let e = |k: usize| {
            let mut b = ints(&[0, 0, 0]);
            b[k] = int(1);
            uhlenbeck_f(&a, &b).unwrap()
        };
        let (f1, f2) = (e(0), e(1));
        let (k1, u1) = (f1.p_homogeneous_part(2), f1.p_homogeneous_part(0));
        let (k2, u2) = (f2.p_homogeneous_part(2), f2.p_homogeneous_part(0));
        assert!(potential_compatibility(&k1, &u1, &k1, &u1).unwrap());
        assert!(potential_compatibility(&k1, &u1, &k2, &u2).unwrap());
        let graded = graded_brackets(&f1, &f2).unwrap();
        assert!(graded.values().all(PhasePoly::is_zero));
        assert!(graded.contains_key(&1) && graded.contains_key(&3));

        // M12^2 with the degenerate Neumann potential
        let a2 = vec![int(1), int(1), int(4)];
        let ua: PhasePoly = degenerate_f(&a2, &a2).unwrap().p_homogeneous_part(0);
        let m = rotation_generator(n, 0, 1);
        assert!(potential_compatibility(&kinetic(n), &ua, &(&m * &m), &PhasePoly::zero(n)).unwrap());

        // wrong degrees are input errors
        assert!(potential_compatibility(&u1, &u1, &k2, &u2).is_err());
        // incompatible potential
        let bad = &PhasePoly::x(n, 0) * &PhasePoly::x(n, 0);
        assert!(!potential_compatibility(&k1, &u1, &k2, &bad).unwrap());
    }

    #[test]
    fn rank_detects_repeated_member() {
        let fam = commuting_basis(&model(3, &[1, 2]));
        let mut polys = fam.polys();
        polys[1] = polys[0];
        let stats = functional_independence(&polys, 20, 5).unwrap();
        assert!(stats.histogram.keys().all(|&r| r <= 2));
        assert!(!stats.passes());
    }

    #[test]
    fn two_sphere_rank_matches_minor() {
        let fam = commuting_basis(&model(2, &[1]));
        let stats = functional_independence(&fam.polys(), 100, 42).unwrap();
        assert!(stats.full_rank_samples >= 95);

        // one sample by hand: some 2x2 minor of the projected gradients is nonzero
        let z = constrained_point(&mut task_rng(42, 0), 2);
        let grads: Vec<Vec<f64>> = fam.polys().iter().map(|p| CompiledGradient::new(p).eval(&z)).collect();
        let normals = orthonormal(vec![
            [&z[..3], &[0.0; 3][..]].concat(),
            [&z[3..], &z[..3]].concat(),
        ]);
        let proj: Vec<Vec<f64>> = grads
            .into_iter()
            .map(|mut r| {
                for nv in &normals {
                    let c = dot(&r, nv);
                    r.iter_mut().zip(nv).for_each(|(a, b)| *a -= c * b);
                }
                r
            })
            .collect();
        let mut best: f64 = 0.0;
        for i in 0..6 {
            for j in i + 1..6 {
                best = best.max((proj[0][i] * proj[1][j] - proj[0][j] * proj[1][i]).abs());
            }
        }
        assert!(best > 1e-6);
    }

    #[test]
    fn membership_examples() {
        // pure geodesic flow: H = K
        let fam = commuting_basis(&model(2, &[0]));
        let out = hamiltonian_membership(&fam, &kinetic(2)).unwrap();
        assert!(out.is_representable());

        let m = model(2, &[1]);
        let fam = commuting_basis(&m);
        let h = hamiltonian_pert(&m);
        let MembershipOutcome::Representable(c) = hamiltonian_membership(&fam, &h).unwrap() else {
            panic!("not representable")
        };
        // By hand: K - S + U with a = (1/8, 1/8, 0) and F_B = 4(M13^2 + M23^2) + X1^2 + X2^2,
        // B = indicator of {3}: F_B = -4(M13^2 + M23^2) + X3^2, so
        // H = -1/8 F_B + 1/2 M12^2 - 1/2 M12 + 1/8 |X|^2.
        assert_eq!(c.member_coeffs, vec![frac(-1, 8), frac(-1, 2)]);
        assert_eq!(c.square_coeffs, vec![(1, frac(1, 2))]);
        assert_eq!(c.radius_coeff, frac(1, 8));
        assert_eq!(c.constant, int(0));

        let generic = model(3, &[1, 2]);
        let fam = commuting_basis(&generic);
        let x1 = PhasePoly::x(3, 0);
        let perturbed = hamiltonian_pert(&generic) + &x1 * &x1;
        assert!(!hamiltonian_membership(&fam, &perturbed).unwrap().is_representable());
    }

    #[test]
    fn linear_span_alone_does_not_hold_the_hamiltonian() {
        // The within-pair kinetic terms need the squared linear integrals.
        let m = model(3, &[1, 2]);
        let fam = commuting_basis(&m);
        let mut cols: Vec<PhasePoly> = fam.polys().into_iter().cloned().collect();
        cols.push(radius_squared(3));
        cols.push(PhasePoly::one(3));
        assert!(solve_in_span(&cols, &hamiltonian_pert(&m)).is_none());
    }

    #[test]
    fn probe_examples() {
        let fam = commuting_basis(&model(4, &[1, 1]));
        let res = superintegrability_probe(&fam, 20, 42).unwrap();
        let find = |label: &str| res.iter().find(|r| r.label == label).unwrap();
        // Single cross-pair generators commute with the Neumann part but not
        // with the in-pair rotations -(M12 + M34)/2 of the linear term.
        for label in ["M13", "M14", "M23", "M24"] {
            let r = find(label);
            assert_eq!(r.kind, CandidateKind::Generator);
            assert!(r.commutes_with_indicator_integrals, "{label}");
            assert!(!r.commutes_with_hamiltonian, "{label}");
        }
        for label in ["M13+M24", "M14-M23"] {
            let r = find(label);
            assert!(r.commutes_with_hamiltonian, "{label}");
            assert!(r.commutes_with_indicator_integrals, "{label}");
            assert_eq!(r.extended_rank, 5);
            assert!(r.is_extra_integral());
        }
        assert_eq!(find("M13").extended_rank, 5);

        let fam = commuting_basis(&model(4, &[1, 2]));
        assert!(superintegrability_probe(&fam, 20, 42).unwrap().is_empty());
    }

    #[test]
    fn probe_generators_commute_without_magnetic_rotation() {
        // alpha = 0 pairs share the zero block with the singleton: plain generators work.
        let fam = commuting_basis(&model(4, &[0, 2]));
        let res = superintegrability_probe(&fam, 20, 1).unwrap();
        let r = res.iter().find(|r| r.label == "M15").unwrap();
        assert!(r.commutes_with_hamiltonian && r.is_extra_integral());
    }

    #[test]
    fn hand_expanded_cross_bracket() {
        // {M13, M12 + M34} = M23 + M14 (one-based), expanded by hand
        let n = 4;
        let g = rotation_generator(n, 0, 2);
        let s = rotation_generator(n, 0, 1) + rotation_generator(n, 2, 3);
        let want = -(rotation_generator(n, 1, 2) + rotation_generator(n, 0, 3));
        assert_eq!(g.poisson_bracket(&s).unwrap(), want);
    }

    #[test]
    fn oracle_basics() {
        let n = 2;
        let (x1, p1) = (PhasePoly::x(n, 0), PhasePoly::p(n, 0));
        let z = [0.3, -0.2, 0.5, 0.7, 0.1, -0.4];
        assert!((fd_bracket_oracle(&x1, &p1, &z, 1e-5).unwrap() - 1.0).abs() < 1e-9);
        let r = &x1 * &x1 + &PhasePoly::x(n, 1) * &PhasePoly::x(n, 1);
        let m12 = rotation_generator(n, 0, 1);
        assert!(fd_bracket_oracle(&m12, &r, &z, 1e-5).unwrap().abs() < 1e-8);
        assert!(fd_bracket_oracle(&m12, &r, &z, 0.0).is_err());
    }

    #[test]
    fn oracle_matches_symbolic_bracket_on_uhlenbeck_pair() {
        let a = ints(&[1, 2, 3]);
        let f1 = uhlenbeck_f(&a, &ints(&[1, 0, 0])).unwrap();
        let f2 = uhlenbeck_f(&a, &ints(&[0, 1, 0])).unwrap();
        let mut rng = task_rng(11, 0);
        for _ in 0..10 {
            let z = ambient_point(&mut rng, 2, 1.5);
            let fd = fd_bracket_oracle(&f1, &f2, &z, 1e-5).unwrap();
            assert!(fd.abs() < 1e-7, "{fd}");
        }
        assert!(f1.poisson_bracket(&f2).unwrap().is_zero());
    }

    #[test]
    fn tampered_family_fails() {
        let m = model(2, &[1]);
        let mut fam = commuting_basis(&m);
        fam.members[1] = Integral {
            kind: IntegralKind::Linear,
            provenance: Provenance::External,
            poly: &PhasePoly::x(2, 0) * &PhasePoly::p(2, 0),
        };
        let rep = verify_family(&fam, 30, 1).unwrap();
        assert!(!rep.pass);
        assert!(rep.pair_results.iter().any(|p| p.status == PairStatus::Nonzero));
    }

    #[test]
    fn report_for_small_model_passes() {
        let rep = verify_family(&commuting_basis(&model(3, &[1, 1])), 40, 3).unwrap();
        assert!(rep.pass, "{:?}", rep.rank_stats);
        assert_eq!(rep.wall_times.len(), 4);
    }
}
