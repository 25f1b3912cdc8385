//! Dormand-Prince 5(4) with step-size control and the implicit midpoint rule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::record::{Termination, TrajectoryRecord};
use super::systems::VectorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Embedded Runge-Kutta 5(4) of Dormand and Prince.
    #[default]
    DormandPrince,
    /// Fixed-step implicit midpoint rule (symplectic, symmetric).
    ImplicitMidpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the step; the step of the implicit midpoint rule.
    pub max_step: f64,
    /// Record every this many accepted steps (the end point is always recorded).
    pub monitor_every: usize,
    /// Stop after this many accepted steps.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::DormandPrince,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            monitor_every: 1,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn adaptive(tol: f64) -> Self {
        Self { abs_tol: tol, rel_tol: tol, ..Self::default() }
    }

    pub fn midpoint(step: f64) -> Self {
        Self { method: Method::ImplicitMidpoint, max_step: step, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_step > 0.0 && self.monitor_every > 0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid integrator configuration {self:?}")));
        }
        if self.method == Method::ImplicitMidpoint && !self.max_step.is_finite() {
            return Err(Error::InvalidParameter("implicit midpoint needs a finite max_step".into()));
        }
        Ok(())
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Outcome of one attempted step.
enum Attempt {
    Accepted { y: Vec<f64>, f: Vec<f64>, err: f64 },
    Rejected { err: f64 },
    OutOfDomain(Error),
}

fn dopri_step(field: &dyn VectorField, y: &[f64], f0: &[f64], h: f64, cfg: &IntegratorConfig) -> Attempt {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = vec![f0.to_vec()];
    let mut tmp = vec![0.0; n];
    for s in 1..7 {
        for i in 0..n {
            tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
        }
        let mut ks = vec![0.0; n];
        if let Err(e) = field.evaluate(&tmp, &mut ks) {
            return Attempt::OutOfDomain(e);
        }
        if ks.iter().any(|v| !v.is_finite()) {
            return Attempt::OutOfDomain(Error::ChartSingular("non-finite vector field"));
        }
        k.push(ks);
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let y1 = tmp;
    let mut acc = 0.0;
    for i in 0..n {
        let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        let sc = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y1[i].abs());
        acc += (e / sc).powi(2);
    }
    let err = (acc / n as f64).sqrt();
    if err <= 1.0 {
        Attempt::Accepted { y: y1, f: k.pop().unwrap(), err }
    } else {
        Attempt::Rejected { err }
    }
}

/// One implicit midpoint step `y1 = y0 + h f((y0 + y1)/2)` by fixed-point
/// iteration.
pub fn midpoint_step(field: &dyn VectorField, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = y.len();
    let mut f = vec![0.0; n];
    field.evaluate(y, &mut f)?;
    let mut y1: Vec<f64> = (0..n).map(|i| y[i] + h * f[i]).collect();
    let mut mid = vec![0.0; n];
    for _ in 0..100 {
        for i in 0..n {
            mid[i] = 0.5 * (y[i] + y1[i]);
        }
        field.evaluate(&mid, &mut f)?;
        let mut change: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..n {
            let next = y[i] + h * f[i];
            change = change.max((next - y1[i]).abs());
            scale = scale.max(next.abs());
            y1[i] = next;
        }
        if change <= 4.0 * f64::EPSILON * (1.0 + scale) {
            return Ok(y1);
        }
    }
    Err(Error::NoConvergence { iterations: 100, decrement: f64::NAN })
}

fn initial_step(y: &[f64], f: &[f64], cfg: &IntegratorConfig) -> f64 {
    let norm = |v: &[f64]| {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(a, b)| (a / (cfg.abs_tol + cfg.rel_tol * b.abs())).powi(2))
            .sum();
        (s / v.len() as f64).sqrt()
    };
    let (d0, d1) = (norm(y), norm(f));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0.min(cfg.max_step)
}

/// Integrates `field` from `start` over `[0, t_end]`, recording at every
/// `monitor_every`-th step and at the end.
pub fn integrate(field: &dyn VectorField, start: &[f64], t_end: f64, cfg: &IntegratorConfig) -> Result<TrajectoryRecord> {
    integrate_at(field, start, &[t_end], cfg)
}

/// Integrates through the increasing sample times `samples`, landing on each
/// of them exactly. Intermediate steps are recorded every `monitor_every`
/// steps; sample times are always recorded.
///
/// Leaving the domain of the field is not an error: the record ends at the
/// last good point with [`Termination::DomainExit`].
pub fn integrate_at(field: &dyn VectorField, start: &[f64], samples: &[f64], cfg: &IntegratorConfig) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    if start.len() != field.dimension() {
        return Err(Error::InvalidParameter(format!(
            "start has {} components, field expects {}",
            start.len(),
            field.dimension()
        )));
    }
    if samples.is_empty() || samples.windows(2).any(|w| !(w[1] > w[0])) || !(samples[0] >= 0.0) {
        return Err(Error::InvalidParameter("sample times must be non-negative and strictly increasing".into()));
    }
    let mut rec = TrajectoryRecord::new(field.state_names(), field.monitor_names());
    let mut y = start.to_vec();
    let mut f = vec![0.0; y.len()];
    if let Err(e) = field.evaluate(&y, &mut f) {
        rec.push(0.0, y.clone(), field.monitors(&y));
        rec.termination = Termination::DomainExit { reason: e.to_string(), time: 0.0 };
        return Ok(rec);
    }
    rec.push(0.0, y.clone(), field.monitors(&y));
    let mut t = 0.0;
    let mut h = match cfg.method {
        Method::DormandPrince => initial_step(&y, &f, cfg),
        Method::ImplicitMidpoint => cfg.max_step,
    };
    let mut since_record = 0;
    for &target in samples {
        if target == 0.0 {
            continue;
        }
        while t < target {
            if rec.steps_accepted >= cfg.max_steps {
                rec.termination = Termination::StepLimit;
                record_if_new(&mut rec, field, t, &y);
                return Ok(rec);
            }
            let remaining = target - t;
            let landing = h >= remaining * (1.0 - 1e-12);
            let step = if landing { remaining } else { h };
            let min_step = 1e-14 * t.abs().max(1.0);
            match cfg.method {
                Method::DormandPrince => match dopri_step(field, &y, &f, step, cfg) {
                    Attempt::Accepted { y: y1, f: f1, err } => {
                        y = y1;
                        f = f1;
                        t = if landing { target } else { t + step };
                        rec.steps_accepted += 1;
                        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                        h = if landing { h.min(step * fac) } else { step * fac }.min(cfg.max_step);
                    }
                    Attempt::Rejected { err } => {
                        rec.steps_rejected += 1;
                        h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                        if h < min_step {
                            rec.termination = Termination::DomainExit {
                                reason: "step size underflow".into(),
                                time: t,
                            };
                            record_if_new(&mut rec, field, t, &y);
                            return Ok(rec);
                        }
                        continue;
                    }
                    Attempt::OutOfDomain(e) => {
                        // bisect the step towards the boundary of the domain
                        rec.steps_rejected += 1;
                        h = 0.5 * step;
                        if h < min_step {
                            rec.termination = Termination::DomainExit { reason: e.to_string(), time: t };
                            record_if_new(&mut rec, field, t, &y);
                            return Ok(rec);
                        }
                        continue;
                    }
                },
                Method::ImplicitMidpoint => match midpoint_step(field, &y, step) {
                    Ok(y1) => {
                        y = y1;
                        t = if landing { target } else { t + step };
                        rec.steps_accepted += 1;
                    }
                    Err(e) => {
                        rec.termination = Termination::DomainExit { reason: e.to_string(), time: t };
                        record_if_new(&mut rec, field, t, &y);
                        return Ok(rec);
                    }
                },
            }
            since_record += 1;
            if t == target || since_record >= cfg.monitor_every {
                rec.push(t, y.clone(), field.monitors(&y));
                since_record = 0;
            }
        }
        record_if_new(&mut rec, field, t, &y);
    }
    Ok(rec)
}

fn record_if_new(rec: &mut TrajectoryRecord, field: &dyn VectorField, t: f64, y: &[f64]) {
    if rec.times.last().is_none_or(|last| *last < t) {
        rec.push(t, y.to_vec(), field.monitors(y));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::systems::GradientField;
    use std::f64::consts::PI;

    /// Planar Kepler problem `H = |p|^2/2 - 1/|q|`.
    fn kepler() -> impl VectorField {
        GradientField::new(4, |z: &[f64], g: &mut [f64]| {
            let r3 = (z[0] * z[0] + z[1] * z[1]).powf(1.5);
            if r3 < 1e-30 {
                return Err(Error::Collision { pair: "(1,2)", dist2: 0.0 });
            }
            g[0] = z[0] / r3;
            g[1] = z[1] / r3;
            g[2] = z[2];
            g[3] = z[3];
            Ok(())
        })
    }

    #[test]
    fn circular_kepler_orbit() {
        let field = kepler();
        let rec = integrate(&field, &[1.0, 0.0, 0.0, 1.0], 2.0 * PI, &IntegratorConfig::adaptive(1e-12)).unwrap();
        for s in &rec.states {
            assert!(((s[0] * s[0] + s[1] * s[1]).sqrt() - 1.0).abs() < 1e-7);
        }
        let last = rec.states.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-7 && last[1].abs() < 1e-7);
        assert_eq!(*rec.times.last().unwrap(), 2.0 * PI);
    }

    #[test]
    fn zero_field_is_constant() {
        let field = GradientField::new(2, |_: &[f64], g: &mut [f64]| {
            g.fill(0.0);
            Ok(())
        });
        for cfg in [IntegratorConfig::adaptive(1e-8), IntegratorConfig::midpoint(0.1)] {
            let rec = integrate(&field, &[0.3, -2.0], 5.0, &cfg).unwrap();
            assert!(rec.states.iter().all(|s| s == &[0.3, -2.0]));
        }
    }

    #[test]
    fn midpoint_preserves_quadratic_energy() {
        // harmonic oscillator: the midpoint rule conserves quadratic invariants exactly
        let field = GradientField::new(2, |z: &[f64], g: &mut [f64]| {
            g[0] = z[0];
            g[1] = z[1];
            Ok(())
        });
        let rec = integrate(&field, &[1.0, 0.0], 100.0, &IntegratorConfig::midpoint(0.1)).unwrap();
        for s in &rec.states {
            assert!((s[0] * s[0] + s[1] * s[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn collision_is_a_domain_exit() {
        let field = kepler();
        // radial infall
        let rec = integrate(&field, &[1.0, 0.0, 0.0, 0.0], 10.0, &IntegratorConfig::adaptive(1e-10)).unwrap();
        assert!(matches!(rec.termination, Termination::DomainExit { .. }), "{:?}", rec.termination);
        let t_exit = *rec.times.last().unwrap();
        // free-fall time pi / (2 sqrt 2)
        assert!((t_exit - PI / 8f64.sqrt()).abs() < 1e-3, "{t_exit}");
    }

    #[test]
    fn forward_then_backward() {
        let field = kepler();
        let start = [1.0, 0.0, 0.1, 1.1];
        let cfg = IntegratorConfig::adaptive(1e-11);
        let fwd = integrate(&field, &start, 3.0, &cfg).unwrap();
        let mut back = fwd.states.last().unwrap().clone();
        back[2] = -back[2];
        back[3] = -back[3];
        let rev = integrate(&field, &back, 3.0, &cfg).unwrap();
        let end = rev.states.last().unwrap();
        let err = (0..2).map(|k| (end[k] - start[k]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn sample_times_are_hit() {
        let field = kepler();
        let samples = [0.5, 1.0, 1.7];
        let cfg = IntegratorConfig { monitor_every: usize::MAX, ..IntegratorConfig::adaptive(1e-10) };
        let rec = integrate_at(&field, &[1.0, 0.0, 0.0, 1.0], &samples, &cfg).unwrap();
        assert_eq!(rec.times, vec![0.0, 0.5, 1.0, 1.7]);
    }

    #[test]
    fn rejects_bad_config() {
        let field = kepler();
        let cfg = IntegratorConfig { abs_tol: 0.0, ..Default::default() };
        assert!(integrate(&field, &[1.0, 0.0, 0.0, 1.0], 1.0, &cfg).is_err());
        assert!(integrate(&field, &[1.0, 0.0, 0.0, 1.0], 1.0, &IntegratorConfig::midpoint(f64::INFINITY)).is_err());
    }
}
