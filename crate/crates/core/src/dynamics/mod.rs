//! Hamiltonian vector fields, integrators and the full-versus-reduced
//! trajectory comparison.

mod integrators;
mod record;
mod systems;

pub use integrators::{integrate, integrate_at, midpoint_step, IntegratorConfig, Method};
pub use record::{format_number, Termination, TrajectoryRecord};
pub use systems::{gradient_reduced, FullSystem, GradientField, PartialSystem, ReducedSystem, VectorField};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{FullState, ScalarPotential, ThreeBody};
use crate::reduction::{
    embed_reduced, invariant_set_residual, lift_to_full, project_to_partial_oriented, Orientation, ReducedState,
};

/// Deviation between the translation-reduced flow (projected to the chart)
/// and the reduced flow started at the same point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub samples: usize,
    pub max_q_deviation: f64,
    pub max_p_deviation: f64,
    /// Largest `|c_i|` of the projected full trajectory.
    pub max_invariant_residual: f64,
    /// `max |mu_i(t) - mu_i(0)|` along the full trajectory.
    pub mu_drift: [f64; 2],
    /// `max |s_ij(t) - s_ij(0)|` of the scalar products along the full trajectory.
    pub scalar_product_drift: f64,
    pub full_termination: Termination,
    pub reduced_termination: Termination,
}

impl ComparisonReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_q_deviation.max(self.max_p_deviation)
    }
}

/// Integrates the 16-dimensional system from the lift of the embedded point
/// and the 8-dimensional reduced system, and compares them at `samples`
/// equally spaced times in `(0, t_end]`.
///
/// The projection back to the chart is ambiguous up to the sheet
/// `theta -> theta + pi, (q, p) -> -(q, p)`; the nearer sheet is used.
pub fn compare_full_vs_reduced<P: ScalarPotential + Clone>(
    body: &ThreeBody<P>,
    start: &ReducedState,
    t_end: f64,
    samples: usize,
    config: &IntegratorConfig,
) -> Result<ComparisonReport> {
    let times: Vec<f64> = (1..=samples.max(1)).map(|k| t_end * k as f64 / samples.max(1) as f64).collect();
    let cfg = IntegratorConfig { monitor_every: usize::MAX, ..*config };
    let full0 = lift_to_full(&embed_reduced(start)?)?;
    let full_sys = FullSystem { body: body.clone() };
    let reduced_sys = ReducedSystem { body: body.clone(), mu1: start.mu1, mu2: start.mu2 };
    let full = integrate_at(&full_sys, &full0.to_array(), &times, &cfg)?;
    let reduced = integrate_at(&reduced_sys, &start.to_array(), &times, &cfg)?;

    let orientation = if start.area() > 0.0 { Orientation::PositiveArea } else { Orientation::NegativeArea };
    let s0 = full0.scalar_products();
    let mut report = ComparisonReport {
        samples: 0,
        max_q_deviation: 0.0,
        max_p_deviation: 0.0,
        max_invariant_residual: 0.0,
        mu_drift: [0.0; 2],
        scalar_product_drift: 0.0,
        full_termination: full.termination.clone(),
        reduced_termination: reduced.termination.clone(),
    };
    let mu0 = (full.monitors[0][1], full.monitors[0][2]);
    for (k, t) in full.times.iter().enumerate() {
        let Some(j) = reduced.times.iter().position(|s| s == t) else { continue };
        let fs = FullState::from_slice(&full.states[k]);
        let m = &full.monitors[k];
        report.mu_drift[0] = report.mu_drift[0].max((m[1] - mu0.0).abs());
        report.mu_drift[1] = report.mu_drift[1].max((m[2] - mu0.1).abs());
        let s = fs.scalar_products();
        report.scalar_product_drift = report
            .scalar_product_drift
            .max((s.s11 - s0.s11).abs())
            .max((s.s22 - s0.s22).abs())
            .max((s.s12 - s0.s12).abs());
        let projected = project_to_partial_oriented(&fs, orientation)?;
        let target = &reduced.states[j];
        let distance = |z: &crate::reduction::PartialState| {
            let dq = (0..4).fold(0.0_f64, |a, i| a.max((z.q[i] - target[i]).abs()));
            let dp = (0..4).fold(0.0_f64, |a, i| a.max((z.p[i] - target[4 + i]).abs()));
            (dq, dp)
        };
        let other = projected.other_sheet();
        let (a, b) = (distance(&projected), distance(&other));
        let (dq, dp) = if a.0.max(a.1) <= b.0.max(b.1) { a } else { b };
        report.max_q_deviation = report.max_q_deviation.max(dq);
        report.max_p_deviation = report.max_p_deviation.max(dp);
        let c = invariant_set_residual(&projected, start.mu1, start.mu2);
        report.max_invariant_residual = c.iter().fold(report.max_invariant_residual, |a, v| a.max(v.abs()));
        report.samples += 1;
    }
    Ok(report)
}
