//! Fixed-step RK4 integration of polynomial vector fields.
//!
//! Fields are evaluated term by term in canonical order, so a run is
//! bit-reproducible. Integration aborts when a state component leaves
//! `[-1e12, 1e12]` or stops being finite.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::geometry::{RkMap, VectorField};
use crate::poly::Polynomial;

pub const BLOW_UP: f64 = 1e12;
pub const MAX_STEPS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("state has {got} components, field has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("blow-up at t = {time}: component {component} = {value}")]
    BlowUp { time: f64, component: usize, value: f64 },
    #[error("{0} steps exceed the limit of {MAX_STEPS}")]
    TooManySteps(usize),
    #[error("scale vanishes or changes sign on the trajectory at t = {time}")]
    ScaleVanishes { time: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    field_id: String,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn field_id(&self) -> &str {
        &self.field_id
    }

    pub fn with_field_id(mut self, id: impl Into<String>) -> Self {
        self.field_id = id.into();
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// CSV with header `t,<names>` and 17 significant digits per value.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("t");
        for name in names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t:.16e}");
            for v in state {
                let _ = write!(out, ",{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path, names: &[String]) -> io::Result<()> {
        std::fs::write(path, self.to_csv(names))
    }
}

fn eval_field(x: &VectorField, state: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.dim()];
    for (i, c) in x.iter() {
        out[i] = c.eval(state).expect("state length checked");
    }
    out
}

fn axpy(state: &[f64], a: f64, d: &[f64]) -> Vec<f64> {
    state.iter().zip(d).map(|(s, v)| s + a * v).collect()
}

fn rk4_step(x: &VectorField, state: &[f64], h: f64) -> Vec<f64> {
    let k1 = eval_field(x, state);
    let k2 = eval_field(x, &axpy(state, h / 2.0, &k1));
    let k3 = eval_field(x, &axpy(state, h / 2.0, &k2));
    let k4 = eval_field(x, &axpy(state, h, &k3));
    (0..state.len())
        .map(|i| state[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

fn guard(state: &[f64], time: f64) -> Result<(), DynamicsError> {
    match state
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || v.abs() > BLOW_UP)
    {
        Some((component, &value)) => Err(DynamicsError::BlowUp { time, component, value }),
        None => Ok(()),
    }
}

/// Step count and the time grid `t0 + i·h`, the last point being `t1`.
fn grid(t0: f64, t1: f64, h: f64) -> Result<Vec<f64>, DynamicsError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(DynamicsError::InvalidStep(format!("h = {h} must be positive")));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(DynamicsError::InvalidStep(format!("need t0 < t1, got [{t0}, {t1}]")));
    }
    let ratio = (t1 - t0) / h;
    // a hair below an exact multiple of h should not add a sliver step
    let steps = (ratio - 1e-9).ceil().max(1.0);
    if steps > MAX_STEPS as f64 {
        return Err(DynamicsError::TooManySteps(steps as usize));
    }
    let steps = steps as usize;
    let mut times: Vec<f64> = (0..steps).map(|i| t0 + i as f64 * h).collect();
    times.push(t1);
    Ok(times)
}

/// Classical fixed-step RK4 from `t0` to `t1`; the final step is shortened
/// so the last sample lands on `t1`.
pub fn rk4_integrate(x: &VectorField, x0: &[f64], t0: f64, t1: f64, h: f64) -> Result<Trajectory, DynamicsError> {
    if x0.len() != x.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: x.dim(),
            got: x0.len(),
        });
    }
    let times = grid(t0, t1, h)?;
    guard(x0, t0)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(x0.to_vec());
    for w in times.windows(2) {
        let next = rk4_step(x, states.last().expect("non-empty"), w[1] - w[0]);
        guard(&next, w[1])?;
        states.push(next);
    }
    Ok(Trajectory {
        field_id: "field".into(),
        times,
        states,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    /// `max_t |H^p(x(t)) − H^p(x(t₀))|` per component.
    pub drift: Vec<f64>,
}

impl ConservationReport {
    pub fn max_drift(&self) -> f64 {
        self.drift.iter().copied().fold(0.0, f64::max)
    }
}

pub fn conservation_report(h: &RkMap, traj: &Trajectory) -> Result<ConservationReport, DynamicsError> {
    let dim = traj.final_state().len();
    if h.nvars() != dim {
        return Err(DynamicsError::DimensionMismatch {
            expected: h.nvars(),
            got: dim,
        });
    }
    let eval = |p: &Polynomial, s: &[f64]| p.eval(s).expect("dimension checked");
    let drift = h
        .components()
        .iter()
        .map(|hp| {
            let start = eval(hp, &traj.states[0]);
            traj.states
                .iter()
                .map(|s| (eval(hp, s) - start).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(ConservationReport { drift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowComparison {
    /// `max ‖Xa − s·Xb‖∞` over the samples of the `Xa` trajectory.
    pub residual: f64,
    /// Same, divided by `max(‖Xa‖∞, ‖s·Xb‖∞)` at each sample.
    pub relative_residual: f64,
    /// `τ(t1) = ∫ s dt` along the `Xa` trajectory.
    pub tau: f64,
    /// `‖φ^b_τ(x0) − φ^a_{t1−t0}(x0)‖∞`, the time-reparametrized mismatch.
    pub reparam_error: f64,
}

fn sup_norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(f64::abs).fold(0.0, f64::max)
}

/// Integrates `Xa` and, in reparametrized time `dτ/dt = scale`, `Xb`;
/// reports how far `Xa` is from `scale·Xb` along the way.
///
/// The scale must keep a strict sign on every sample of the `Xa`
/// trajectory.
pub fn compare_flows(
    xa: &VectorField,
    xb: &VectorField,
    scale: &Polynomial,
    x0: &[f64],
    t0: f64,
    t1: f64,
    h: f64,
) -> Result<FlowComparison, DynamicsError> {
    let dim = xa.dim();
    if xb.dim() != dim || scale.nvars() != dim {
        return Err(DynamicsError::DimensionMismatch {
            expected: dim,
            got: xb.dim().max(scale.nvars()),
        });
    }
    // augmented system (state, τ) with τ' = scale(state)
    let mut comps = xa.to_dense();
    comps.iter_mut().for_each(|c| *c = extend(c, dim + 1));
    comps.push(extend(scale, dim + 1));
    let augmented = VectorField::from_components(comps);
    let mut start = x0.to_vec();
    start.push(0.0);
    let traj = rk4_integrate(&augmented, &start, t0, t1, h)?;

    let s0 = scale.eval(x0).map_err(|_| DynamicsError::DimensionMismatch {
        expected: dim,
        got: x0.len(),
    })?;
    let mut residual: f64 = 0.0;
    let mut relative: f64 = 0.0;
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let s = &state[..dim];
        let sv = scale.eval(s).expect("dimension checked");
        if sv == 0.0 || sv.signum() != s0.signum() {
            return Err(DynamicsError::ScaleVanishes { time: *t });
        }
        let a = eval_field(xa, s);
        let b: Vec<f64> = eval_field(xb, s).into_iter().map(|v| sv * v).collect();
        let diff = sup_norm(a.iter().zip(&b).map(|(p, q)| p - q));
        let size = sup_norm(a.iter().chain(&b).copied());
        residual = residual.max(diff);
        if diff > 0.0 {
            relative = relative.max(diff / size);
        }
    }
    let end = traj.final_state();
    let tau = end[dim];
    let target = &end[..dim];
    let reached = if tau > 0.0 {
        rk4_integrate(xb, x0, 0.0, tau, h)?.final_state().to_vec()
    } else {
        let back = xb.scale_by(&Polynomial::from_int(dim, -1));
        rk4_integrate(&back, x0, 0.0, -tau, h)?.final_state().to_vec()
    };
    Ok(FlowComparison {
        residual,
        relative_residual: relative,
        tau,
        reparam_error: sup_norm(reached.iter().zip(target).map(|(p, q)| p - q)),
    })
}

/// Same polynomial on `nvars ≥ p.nvars()` variables; the new ones unused.
fn extend(p: &Polynomial, nvars: usize) -> Polynomial {
    let terms = p.terms().map(|(exps, c)| {
        let mut e = exps.clone();
        e.resize(nvars, 0);
        (e, c.clone())
    });
    Polynomial::from_terms(nvars, terms.collect::<Vec<_>>()).expect("widened exponents")
}
