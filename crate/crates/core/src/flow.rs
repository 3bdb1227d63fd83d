//! Structure-preserving integration of the canonical-picture flow of
//! `H_pert = K - S + U` on `T*S^n`.
//!
//! One step is the Strang composition
//! `rotate(dt/2) . rattle(dt) . rotate(dt/2)`: the flow of `-S` is an exact
//! rotation of every pair plane (it commutes with `K + U`), and RATTLE
//! integrates `1/2 |P|^2 + U` under `|X| = 1`, `<X, P> = 0`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exactpoly::{to_f64, CompiledPoly, PhasePoly};
use crate::integral_family::IntegralFamily;
use crate::magnetic_model::{gauge_shift, hamiltonian_pert, MagneticModel, ShiftDirection};
use crate::sampling::{constrained_point, task_rng};

/// Initial conditions further than this from `T*S^n` are rejected rather
/// than projected.
pub const INIT_PROJECTION_TOL: f64 = 1e-6;

/// Canonical momentum to magnetic-picture velocity: `p = P - sigma(X)`.
/// With `H_pert = K - S + U` one has `dX/dt = P - sigma(X)` on `T*S^n`.
pub const MAGNETIC_PICTURE: ShiftDirection = ShiftDirection::Minus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

impl State {
    pub fn from_point(z: &[f64]) -> Result<Self> {
        if !z.len().is_multiple_of(2) || z.len() < 6 {
            return Err(invalid(format!("phase point of length {} is not (X, P) on T*S^n, n >= 2", z.len())));
        }
        let (x, p) = z.split_at(z.len() / 2);
        Ok(State { x: x.to_vec(), p: p.to_vec() })
    }

    pub fn to_point(&self) -> Vec<f64> {
        [self.x.as_slice(), self.p.as_slice()].concat()
    }

    /// `(|X|^2 - 1, <X, P>)`.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        (dot(&self.x, &self.x) - 1.0, dot(&self.x, &self.p))
    }

    /// Parses `{"x": [...], "p": [...]}`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let st: State = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if st.x.len() != st.p.len() {
            return Err(Error::DimensionMismatch { expected: st.x.len(), found: st.p.len() });
        }
        if st.x.iter().chain(&st.p).any(|v| !v.is_finite()) {
            return Err(invalid("initial condition has non-finite entries"));
        }
        Ok(st)
    }
}

/// Checks that `init` lies within [`INIT_PROJECTION_TOL`] of `T*S^n`,
/// projects it exactly onto it and optionally rescales to `|P| = 1`.
pub fn prepare_initial(model: &MagneticModel, init: &State, normalize_momentum: bool) -> Result<State> {
    let d = model.n() + 1;
    for v in [&init.x, &init.p] {
        if v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: v.len() });
        }
    }
    if init.x.iter().chain(&init.p).any(|v| !v.is_finite()) {
        return Err(invalid("initial condition has non-finite entries"));
    }
    let (radial, tangential) = init.constraint_residuals();
    if radial.abs() > INIT_PROJECTION_TOL || tangential.abs() > INIT_PROJECTION_TOL {
        return Err(Error::OffConstraint { radial, tangential });
    }
    let r = dot(&init.x, &init.x).sqrt();
    let x: Vec<f64> = init.x.iter().map(|v| v / r).collect();
    let xp = dot(&x, &init.p);
    let mut p: Vec<f64> = init.p.iter().zip(&x).map(|(pv, xv)| pv - xp * xv).collect();
    if normalize_momentum {
        let s = dot(&p, &p).sqrt();
        if s == 0.0 {
            return Err(invalid("cannot normalize a zero momentum"));
        }
        p.iter_mut().for_each(|v| *v /= s);
    }
    Ok(State { x, p })
}

/// Seeded random point of `T*S^n` with `|P| = 1`.
pub fn random_initial(model: &MagneticModel, seed: u64) -> State {
    let z = constrained_point(&mut task_rng(seed, 0), model.n());
    State::from_point(&z).expect("sampled point has the right shape")
}

/// Split-step integrator for one model.
#[derive(Debug, Clone)]
pub struct Integrator {
    alphas: Vec<f64>,
    a: Vec<f64>,
}

impl Integrator {
    pub fn new(model: &MagneticModel) -> Self {
        Integrator { alphas: model.alphas_f64(), a: model.neumann_coefficients().iter().map(to_f64).collect() }
    }

    /// Exact flow of `-S` for time `tau`: each plane `(X_{2i}, X_{2i+1})`,
    /// and likewise `P`, turns by the angle `-alpha_i tau / 2`.
    pub fn rotate(&self, s: &mut State, tau: f64) {
        for (i, &alpha) in self.alphas.iter().enumerate() {
            let (sin, cos) = (0.5 * alpha * tau).sin_cos();
            for v in [&mut s.x, &mut s.p] {
                let (u, w) = (v[2 * i], v[2 * i + 1]);
                v[2 * i] = cos * u + sin * w;
                v[2 * i + 1] = -sin * u + cos * w;
            }
        }
    }

    fn grad_u(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.a).map(|(v, a)| 2.0 * a * v).collect()
    }

    /// One RATTLE step of length `h` for `1/2 |P|^2 + U` on the sphere.
    pub fn rattle(&self, s: &mut State, h: f64) -> std::result::Result<(), String> {
        let c = 0.5 * h * h;
        let g = self.grad_u(&s.x);
        let y: Vec<f64> = (0..s.x.len()).map(|k| s.x[k] + h * s.p[k] - c * g[k]).collect();
        // |Y - c lambda X|^2 = 1, smaller-magnitude root
        let qa = c * c * dot(&s.x, &s.x);
        let qb = -2.0 * c * dot(&s.x, &y);
        let qc = dot(&y, &y) - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc.is_nan() || disc < 0.0 {
            return Err(format!("position constraint has no real multiplier (discriminant {disc:e})"));
        }
        let q = -0.5 * (qb + qb.signum() * disc.sqrt());
        let lambda = if q != 0.0 { qc / q } else { 0.0 };
        if !lambda.is_finite() {
            return Err("position multiplier is not finite".into());
        }
        let x_new: Vec<f64> = y.iter().zip(&s.x).map(|(yv, xv)| yv - c * lambda * xv).collect();
        let p_half: Vec<f64> = x_new.iter().zip(&s.x).map(|(a, b)| (a - b) / h).collect();
        let g_new = self.grad_u(&x_new);
        let r2 = dot(&x_new, &x_new);
        let mu = (2.0 / h) * dot(&x_new, &p_half) / r2 - dot(&x_new, &g_new) / r2;
        let p_new: Vec<f64> = (0..x_new.len())
            .map(|k| p_half[k] - 0.5 * h * (g_new[k] + mu * x_new[k]))
            .collect();
        if p_new.iter().chain(&x_new).any(|v| !v.is_finite()) {
            return Err("state became non-finite".into());
        }
        s.x = x_new;
        s.p = p_new;
        Ok(())
    }

    pub fn step(&self, s: &mut State, dt: f64) -> std::result::Result<(), String> {
        self.rotate(s, 0.5 * dt);
        self.rattle(s, dt)?;
        self.rotate(s, 0.5 * dt);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
    pub normalize_momentum: bool,
}

impl IntegrationConfig {
    pub fn new(dt: f64, steps: usize) -> Self {
        IntegrationConfig { dt, steps, record_every: 1, normalize_momentum: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub integrals: Vec<f64>,
    pub h: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Recorded states with the family members and the Hamiltonian evaluated
/// on each; `c1`, `c2` are the constraint residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub labels: Vec<String>,
    pub samples: Vec<Sample>,
}

struct Observables {
    integrals: Vec<CompiledPoly>,
    h: CompiledPoly,
}

impl Observables {
    fn sample(&self, t: f64, s: &State) -> Sample {
        let z = s.to_point();
        let (c1, c2) = s.constraint_residuals();
        Sample {
            t,
            x: s.x.clone(),
            p: s.p.clone(),
            integrals: self.integrals.iter().map(|f| f.eval(&z)).collect(),
            h: self.h.eval(&z),
            c1,
            c2,
        }
    }
}

/// Integrates from `init` (projected onto `T*S^n`, see [`prepare_initial`]).
/// States are recorded at step 0, every `record_every` steps and at the end.
pub fn integrate(family: &IntegralFamily, init: &State, config: &IntegrationConfig) -> Result<TrajectoryRecord> {
    let model = &family.model;
    if !config.dt.is_finite() || config.dt == 0.0 {
        return Err(invalid("time step must be finite and nonzero"));
    }
    if config.record_every == 0 {
        return Err(invalid("record_every must be at least 1"));
    }
    let mut state = prepare_initial(model, init, config.normalize_momentum)?;
    let obs = Observables {
        integrals: family.polys().iter().map(|p| p.compile()).collect(),
        h: hamiltonian_pert(model).compile(),
    };
    let integrator = Integrator::new(model);
    let mut samples = vec![obs.sample(0.0, &state)];
    for k in 1..=config.steps {
        integrator
            .step(&mut state, config.dt)
            .map_err(|reason| Error::StepFailure { step: k, reason })?;
        if k % config.record_every == 0 || k == config.steps {
            samples.push(obs.sample(k as f64 * config.dt, &state));
        }
    }
    Ok(TrajectoryRecord {
        n: model.n(),
        labels: (1..=family.members.len()).map(|k| format!("F{k}")).collect(),
        samples,
    })
}

/// Values of an arbitrary function along the recorded states.
pub fn evaluate_along(traj: &TrajectoryRecord, f: &PhasePoly) -> Vec<f64> {
    let c = f.compile();
    traj.samples
        .iter()
        .map(|s| c.eval(&[s.x.as_slice(), s.p.as_slice()].concat()))
        .collect()
}

/// Shifts every recorded momentum by `sigma` in the given direction and sets
/// `h` to the unperturbed kinetic energy `1/2 |p|^2` of the shifted momenta.
/// Integral columns are dropped: they are functions of the canonical state.
pub fn picture_map_with(traj: &TrajectoryRecord, model: &MagneticModel, direction: ShiftDirection) -> Result<TrajectoryRecord> {
    if traj.n != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), found: traj.n });
    }
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let z = gauge_shift(&[s.x.as_slice(), s.p.as_slice()].concat(), direction, model)?;
            let st = State::from_point(&z)?;
            let (c1, c2) = st.constraint_residuals();
            Ok(Sample { t: s.t, h: 0.5 * dot(&st.p, &st.p), x: st.x, p: st.p, integrals: Vec::new(), c1, c2 })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryRecord { n: traj.n, labels: Vec::new(), samples })
}

/// Canonical trajectory seen in the magnetic picture.
pub fn picture_map(traj: &TrajectoryRecord, model: &MagneticModel) -> Result<TrajectoryRecord> {
    picture_map_with(traj, model, MAGNETIC_PICTURE)
}

/// How well a magnetic-picture record obeys `dX/dt = p` and the Lorentz law
/// `dp/dt = W p + lambda X` (normal force along `X`), by central differences
/// over consecutive recorded states. Both are relative to `max |p|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzResidual {
    pub velocity: f64,
    pub force: f64,
}

pub fn lorentz_residual(magnetic: &TrajectoryRecord, model: &MagneticModel) -> Result<LorentzResidual> {
    let s = &magnetic.samples;
    if s.len() < 3 {
        return Err(invalid("need at least three recorded states"));
    }
    let alphas = model.alphas_f64();
    let force = |p: &[f64]| {
        let mut f = vec![0.0; p.len()];
        for (i, a) in alphas.iter().enumerate() {
            f[2 * i] = a * p[2 * i + 1];
            f[2 * i + 1] = -a * p[2 * i];
        }
        f
    };
    let scale = s.iter().map(|v| dot(&v.p, &v.p).sqrt()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let (mut vel, mut frc) = (0.0f64, 0.0f64);
    for w in s.windows(3) {
        let dt = w[2].t - w[0].t;
        let xdot: Vec<f64> = w[2].x.iter().zip(&w[0].x).map(|(a, b)| (a - b) / dt).collect();
        let pdot: Vec<f64> = w[2].p.iter().zip(&w[0].p).map(|(a, b)| (a - b) / dt).collect();
        let mid = &w[1];
        let dv: Vec<f64> = xdot.iter().zip(&mid.p).map(|(a, b)| a - b).collect();
        vel = vel.max(dot(&dv, &dv).sqrt());
        let mut r: Vec<f64> = pdot.iter().zip(force(&mid.p)).map(|(a, b)| a - b).collect();
        let along = dot(&r, &mid.x);
        r.iter_mut().zip(&mid.x).for_each(|(v, xv)| *v -= along * xv);
        frc = frc.max(dot(&r, &r).sqrt());
    }
    Ok(LorentzResidual { velocity: vel / scale, force: frc / scale })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftStats {
    pub label: String,
    pub initial: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
    pub final_drift: f64,
}

/// Drift against the initial value, relative to `max(|f(0)|, 1)`.
pub fn drift_of(label: &str, values: &[f64]) -> DriftStats {
    let initial = values.first().copied().unwrap_or(0.0);
    let scale = initial.abs().max(1.0);
    let max_abs_drift = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
    DriftStats {
        label: label.to_string(),
        initial,
        max_abs_drift,
        max_rel_drift: max_abs_drift / scale,
        final_drift: values.last().map_or(0.0, |v| v - initial),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub integrals: Vec<DriftStats>,
    pub hamiltonian: DriftStats,
    pub max_rel_drift: f64,
    pub max_radial_residual: f64,
    pub max_tangential_residual: f64,
}

impl DriftReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_rel_drift <= tol
    }
}

pub fn drift_report(traj: &TrajectoryRecord) -> DriftReport {
    let integrals: Vec<DriftStats> = traj
        .labels
        .iter()
        .enumerate()
        .map(|(k, label)| {
            let v: Vec<f64> = traj.samples.iter().map(|s| s.integrals[k]).collect();
            drift_of(label, &v)
        })
        .collect();
    let h: Vec<f64> = traj.samples.iter().map(|s| s.h).collect();
    let hamiltonian = drift_of("H", &h);
    let max_rel_drift = integrals
        .iter()
        .chain(std::iter::once(&hamiltonian))
        .map(|d| d.max_rel_drift)
        .fold(0.0, f64::max);
    DriftReport {
        integrals,
        hamiltonian,
        max_rel_drift,
        max_radial_residual: traj.samples.iter().map(|s| s.c1.abs()).fold(0.0, f64::max),
        max_tangential_residual: traj.samples.iter().map(|s| s.c2.abs()).fold(0.0, f64::max),
    }
}

/// CSV with header `t,X1..,P1..,F1..,H,c1,c2`; floats carry 17 significant digits.
pub fn write_csv<W: Write>(traj: &TrajectoryRecord, mut out: W) -> std::io::Result<()> {
    let d = traj.n + 1;
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|i| format!("X{i}")));
    header.extend((1..=d).map(|i| format!("P{i}")));
    header.extend(traj.labels.iter().cloned());
    header.extend(["H", "c1", "c2"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for s in &traj.samples {
        let row: Vec<String> = std::iter::once(s.t)
            .chain(s.x.iter().copied())
            .chain(s.p.iter().copied())
            .chain(s.integrals.iter().copied())
            .chain([s.h, s.c1, s.c2])
            .map(|v| format!("{v:.16e}"))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
