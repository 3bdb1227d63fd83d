//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use magneflow::exactpoly::{int, PhasePoly, Rational};
use magneflow::magnetic_model::MagneticModel;

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

pub fn model(n: usize, alphas: &[i64]) -> MagneticModel {
    MagneticModel::new(n, ints(alphas)).unwrap()
}

/// The CI matrix of models.
pub const CI_MODELS: &[(usize, &[i64])] = &[
    (2, &[1]),
    (3, &[1, 2]),
    (3, &[1, 1]),
    (4, &[1, 2]),
    (4, &[1, 1]),
    (5, &[1, 2, 3]),
    (5, &[1, 1, 2]),
    (5, &[1, 1, 1]),
    (6, &[1, 1, 1]),
    (7, &[1, 2, 3, 4]),
    (7, &[1, 1, 2, 2]),
];

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let d = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..d).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Block strengths of a skew matrix from the spectrum of `Omega^T Omega`:
/// eigenvalues come in equal pairs `alpha^2`; descending, one per pair.
pub fn oracle_alphas(omega: &[Vec<f64>]) -> Vec<f64> {
    let d = omega.len();
    let ata: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| omega[k][i] * omega[k][j]).sum()).collect())
        .collect();
    let mut ev = jacobi_eigenvalues(ata);
    ev.reverse();
    ev.chunks(2).filter(|c| c.len() == 2).map(|c| (0.5 * (c[0] + c[1])).max(0.0).sqrt()).collect()
}

/// `M_ij^2` expanded monomial by monomial, without the polynomial multiply.
pub fn killing_squared_by_hand(n: usize, i: usize, j: usize) -> PhasePoly {
    let d = n + 1;
    let mono = |xs: &[(usize, u16)], ps: &[(usize, u16)]| {
        let mut e = vec![0u16; 2 * d];
        for &(k, p) in xs {
            e[k] += p;
        }
        for &(k, p) in ps {
            e[d + k] += p;
        }
        magneflow::exactpoly::Monomial::from_exponents(e)
    };
    // (X_i P_j - X_j P_i)^2 = X_i^2 P_j^2 - 2 X_i X_j P_i P_j + X_j^2 P_i^2
    PhasePoly::from_terms(
        n,
        [
            (mono(&[(i, 2)], &[(j, 2)]), int(1)),
            (mono(&[(i, 1), (j, 1)], &[(i, 1), (j, 1)]), int(-2)),
            (mono(&[(j, 2)], &[(i, 2)]), int(1)),
        ],
    )
    .unwrap()
}
