//! Orthogonal reduction of a real skew-symmetric matrix to
//! `Q^T Omega Q = blockdiag([[0, a_1], [-a_1, 0]], ..., [0])`.

use nalgebra::{DMatrix, DVector, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative width under which eigenvalues of `Omega^T Omega` share a cluster.
const CLUSTER_RTOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SkewNormalForm {
    /// Columns are the new basis; pair `i` spans columns `2i, 2i+1`.
    pub q: DMatrix<f64>,
    /// Block strengths, nonnegative and descending.
    pub alphas: Vec<f64>,
    /// `||Q^T Omega Q - blockdiag(alphas)||_F`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OmegaJson {
    pub omega: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkewNormalFormJson {
    pub omega: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub residual: f64,
}

impl SkewNormalForm {
    pub fn to_json(&self, omega: &DMatrix<f64>) -> SkewNormalFormJson {
        SkewNormalFormJson {
            omega: rows(omega),
            q: rows(&self.q),
            alphas: self.alphas.clone(),
            residual: self.residual,
        }
    }

    pub fn block_diagonal(&self) -> DMatrix<f64> {
        block_diagonal(self.q.nrows(), &self.alphas)
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Validates a nested-row matrix and converts it.
pub fn omega_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let d = rows.len();
    if d < 2 {
        return Err(invalid("matrix must be at least 2x2"));
    }
    if rows.iter().any(|r| r.len() != d) {
        return Err(invalid("matrix must be square"));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("matrix entries must be finite"));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

pub fn block_diagonal(d: usize, alphas: &[f64]) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(d, d);
    for (i, &a) in alphas.iter().enumerate() {
        b[(2 * i, 2 * i + 1)] = a;
        b[(2 * i + 1, 2 * i)] = -a;
    }
    b
}

type Plane = (f64, DVector<f64>, DVector<f64>);

/// Real Schur decomposition `Omega = Q_s T Q_s^T`; for a skew matrix `T` is
/// block diagonal up to rounding, with oriented 2x2 blocks and 1x1 zeros.
/// Planes of (numerically) equal strength are then re-paired inside their
/// common invariant subspace, starting from the coordinate axes with the
/// largest components, so an input that is already canonical comes back
/// with `Q = I`. The re-paired basis is kept only when it is as accurate as
/// the raw Schur basis.
pub fn skew_normal_form(omega: &DMatrix<f64>) -> Result<SkewNormalForm> {
    let d = omega.nrows();
    if d < 2 || omega.ncols() != d {
        return Err(invalid("matrix must be square and at least 2x2"));
    }
    let norm = omega.norm();
    let asymmetry = (omega + omega.transpose()).norm();
    if asymmetry > 1e-12 * norm || !norm.is_finite() {
        return Err(Error::NotSkew { asymmetry, norm });
    }
    if norm == 0.0 {
        return assemble(omega, Vec::new(), (0..d).map(|i| unit(d, i)).collect());
    }

    let (qs, t) = Schur::try_new(omega.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| invalid("Schur iteration did not converge"))?
        .unpack();
    let mut raw_planes: Vec<Plane> = Vec::new();
    let mut raw_kernel: Vec<DVector<f64>> = Vec::new();
    let mut i = 0;
    while i < d {
        if i + 1 < d && t[(i + 1, i)] != 0.0 {
            let alpha = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
            let (u, v) = (qs.column(i).into_owned(), qs.column(i + 1).into_owned());
            raw_planes.push(if alpha >= 0.0 { (alpha, u, v) } else { (-alpha, v, u) });
            i += 2;
        } else {
            raw_kernel.push(qs.column(i).into_owned());
            i += 1;
        }
    }
    let top = raw_planes.iter().map(|p| p.0).fold(0.0, f64::max);
    let (tiny, mut planes): (Vec<Plane>, Vec<Plane>) = raw_planes.into_iter().partition(|p| p.0 <= CLUSTER_RTOL * top);
    for (_, u, v) in tiny {
        raw_kernel.push(u);
        raw_kernel.push(v);
    }
    planes.sort_by(|a, b| b.0.total_cmp(&a.0));

    let raw = assemble(omega, planes.clone(), raw_kernel.clone())?;

    let mut repaired: Vec<Plane> = Vec::new();
    let mut kernel = raw_kernel;
    let mut k = 0;
    while k < planes.len() {
        let mut end = k + 1;
        while end < planes.len() && planes[k].0 - planes[end].0 <= CLUSTER_RTOL * top {
            end += 1;
        }
        let span: Vec<DVector<f64>> = planes[k..end].iter().flat_map(|(_, u, v)| [u.clone(), v.clone()]).collect();
        pair_up(omega, span, &mut repaired, &mut kernel);
        k = end;
    }
    let kernel = canonical_basis(d, &kernel);
    match assemble(omega, repaired, kernel) {
        Ok(nice) if nice.residual <= (4.0 * raw.residual).max(1e-14 * norm) => Ok(nice),
        _ => Ok(raw),
    }
}

/// Orders planes by decreasing strength, fills missing planes from the
/// kernel and reads strengths and residual off `Q^T Omega Q`.
fn assemble(omega: &DMatrix<f64>, mut planes: Vec<Plane>, kernel: Vec<DVector<f64>>) -> Result<SkewNormalForm> {
    let d = omega.nrows();
    let pairs = d / 2;
    let mut kernel_iter = kernel.into_iter();
    while planes.len() < pairs {
        let (u, v) = match (kernel_iter.next(), kernel_iter.next()) {
            (Some(u), Some(v)) => (u, v),
            _ => return Err(invalid("rank bookkeeping failed; matrix is too ill-conditioned")),
        };
        planes.push((0.0, u, v));
    }
    planes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut q = DMatrix::zeros(d, d);
    for (i, (_, u, v)) in planes.iter().enumerate() {
        q.set_column(2 * i, u);
        q.set_column(2 * i + 1, v);
    }
    if d % 2 == 1 {
        let last = kernel_iter
            .next()
            .ok_or_else(|| invalid("rank bookkeeping failed; matrix is too ill-conditioned"))?;
        q.set_column(d - 1, &last);
    }
    let reduced = q.transpose() * omega * &q;
    let alphas: Vec<f64> = (0..pairs).map(|i| reduced[(2 * i, 2 * i + 1)]).collect();
    let residual = (&reduced - block_diagonal(d, &alphas)).norm();
    Ok(SkewNormalForm { q, alphas, residual })
}

fn unit(d: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(d);
    e[i] = 1.0;
    e
}

/// Orthonormal basis of `span(vectors)` built from projected unit vectors,
/// each time taking the axis with the largest remaining component.
fn canonical_basis(d: usize, vectors: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut span: Vec<DVector<f64>> = vectors.to_vec();
    orthonormalize(&mut span);
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(span.len());
    for _ in 0..span.len() {
        let project = |v: &DVector<f64>| -> DVector<f64> {
            let mut p = DVector::zeros(d);
            for b in &span {
                p += b * b.dot(v);
            }
            for o in &out {
                p -= o * o.dot(&p);
            }
            p
        };
        let mut best = (0, -1.0);
        for i in 0..d {
            let nrm = project(&unit(d, i)).norm();
            if nrm > best.1 + 1e-12 {
                best = (i, nrm);
            }
        }
        let mut v = project(&unit(d, best.0));
        v /= v.norm();
        out.push(v);
    }
    out
}

fn orthonormalize(vs: &mut Vec<DVector<f64>>) {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vs.len());
    for v in vs.iter() {
        let mut w = v.clone();
        for _ in 0..2 {
            for o in &out {
                w -= o * o.dot(&w);
            }
        }
        let nrm = w.norm();
        if nrm > 1e-6 {
            out.push(w / nrm);
        }
    }
    *vs = out;
}

/// Splits one eigenspace of `Omega^T Omega` into invariant oriented planes.
fn pair_up(
    omega: &DMatrix<f64>,
    basis: Vec<DVector<f64>>,
    planes: &mut Vec<(f64, DVector<f64>, DVector<f64>)>,
    kernel: &mut Vec<DVector<f64>>,
) {
    let d = omega.nrows();
    let mut remaining = basis;
    while remaining.len() >= 2 {
        let picked = canonical_basis(d, &remaining);
        let u = picked[0].clone();
        let mut v = -(omega * &u);
        // keep v inside the eigenspace and orthogonal to u
        let mut proj = DVector::zeros(d);
        for b in &picked {
            proj += b * b.dot(&v);
        }
        v = proj;
        v -= &u * u.dot(&v);
        let alpha = v.norm();
        v /= alpha;
        planes.push((alpha, u.clone(), v.clone()));

        let mut rest: Vec<DVector<f64>> = picked
            .into_iter()
            .map(|b| {
                let b = &b - &u * u.dot(&b);
                &b - &v * v.dot(&b)
            })
            .collect();
        orthonormalize(&mut rest);
        remaining = rest;
    }
    kernel.extend(remaining);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_input_is_fixed() {
        let omega = block_diagonal(3, &[1.0]);
        let nf = skew_normal_form(&omega).unwrap();
        assert_eq!(nf.alphas, vec![1.0]);
        assert!((nf.q.clone() - DMatrix::identity(3, 3)).norm() < 1e-14);
        assert!(nf.residual < 1e-14);
    }

    #[test]
    fn zero_matrix() {
        let nf = skew_normal_form(&DMatrix::zeros(5, 5)).unwrap();
        assert_eq!(nf.alphas, vec![0.0, 0.0]);
        assert_eq!(nf.q, DMatrix::identity(5, 5));
    }

    #[test]
    fn negative_orientation_is_flipped() {
        let omega = block_diagonal(2, &[-2.0]);
        let nf = skew_normal_form(&omega).unwrap();
        assert!((nf.alphas[0] - 2.0).abs() < 1e-14);
        assert!(nf.residual < 1e-14);
    }

    #[test]
    fn rejects_non_skew() {
        let mut m = block_diagonal(3, &[1.0]);
        m[(0, 0)] = 0.5;
        assert!(matches!(skew_normal_form(&m), Err(Error::NotSkew { .. })));
        assert!(omega_from_rows(&[vec![0.0, 1.0], vec![-1.0]]).is_err());
        assert!(omega_from_rows(&[vec![0.0, f64::NAN], vec![-1.0, 0.0]]).is_err());
    }

    #[test]
    fn equal_strengths_keep_orthogonality() {
        // Two equal planes mixed by a rotation.
        let c = (0.3f64).cos();
        let s = (0.3f64).sin();
        let r = DMatrix::from_row_slice(4, 4, &[c, 0.0, -s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, s, 0.0, c]);
        let omega = &r * block_diagonal(4, &[1.5, 1.5]) * r.transpose();
        let nf = skew_normal_form(&omega).unwrap();
        let qtq = nf.q.transpose() * &nf.q;
        assert!((qtq - DMatrix::identity(4, 4)).norm() < 1e-12);
        assert!((nf.alphas[0] - 1.5).abs() < 1e-12 && (nf.alphas[1] - 1.5).abs() < 1e-12);
        assert!(nf.residual < 1e-12);
    }
}
