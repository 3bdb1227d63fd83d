//! Reproducible random points on `T*S^n`.
//!
//! Every task draws from its own ChaCha stream keyed by `(seed, stream)`, so
//! results do not depend on how tasks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn task_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `X` uniform on the unit sphere; `P` Gaussian, projected tangent to the
/// sphere at `X` and normalized to `|P| = 1`. Returns `[X, P]`.
pub fn constrained_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let d = n + 1;
    loop {
        let mut x = gaussian_vec(rng, d);
        let rx = norm(&x);
        if rx < 1e-12 {
            continue;
        }
        x.iter_mut().for_each(|v| *v /= rx);
        let mut p = gaussian_vec(rng, d);
        let dot: f64 = x.iter().zip(&p).map(|(a, b)| a * b).sum();
        p.iter_mut().zip(&x).for_each(|(pv, xv)| *pv -= dot * xv);
        let rp = norm(&p);
        if rp < 1e-12 {
            continue;
        }
        p.iter_mut().for_each(|v| *v /= rp);
        x.extend(p);
        return x;
    }
}

/// Gaussian point in the full ambient phase space, scaled to norm `radius`.
pub fn ambient_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    let mut z = gaussian_vec(rng, 2 * (n + 1));
    let r = norm(&z).max(1e-300);
    z.iter_mut().for_each(|v| *v *= radius / r);
    z
}
