//! Seeded numerical checks of the reduction: symplecticity of the lift,
//! the Hamiltonian composition chain, the restriction matrix on the
//! invariant set and invariance of that set under the flow.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorConfig, PartialSystem};
use crate::error::Result;
use crate::model::{MassTriple, ThreeBody};
use crate::reduction::{
    embed_reduced_at, lift_to_full, restriction_matrix_numeric, symplecticity_defect, PartialState,
};
use crate::sampling::{random_chart_point, random_momenta, random_reduced_point, seeded_rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub points: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, points: usize, max_error: f64, tolerance: f64) -> Self {
        Self { name: name.into(), points, max_error, tolerance, passed: max_error < tolerance }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `max |D^T J D - J|` of the lift Jacobian at `points` chart points.
pub fn symplecticity_check(masses: &MassTriple, seed: u64, points: usize) -> Result<CheckOutcome> {
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..points {
        worst = worst.max(symplecticity_defect(&random_chart_point(&mut rng, masses))?);
    }
    Ok(CheckOutcome::new("symplectic", points, worst, 1e-9))
}

/// `H_full(lift(z)) = H_partial(z)` and `H_partial(embed(w)) = H_reduced(w)`.
pub fn composition_check(masses: &MassTriple, seed: u64, points: usize) -> Result<[CheckOutcome; 2]> {
    let body = ThreeBody::newtonian(*masses);
    let mut rng = seeded_rng(seed);
    let (mut lift_err, mut embed_err) = (0.0_f64, 0.0_f64);
    for _ in 0..points {
        let z = random_chart_point(&mut rng, masses);
        lift_err = lift_err.max(rel(body.hamiltonian_full(&lift_to_full(&z)?)?, body.hamiltonian_partial(&z)?));
        let (mu1, mu2) = random_momenta(&mut rng);
        let w = random_reduced_point(&mut rng, masses, mu1, mu2);
        let embedded = embed_reduced_at(&w, rng.random_range(0.0..6.0), rng.random_range(0.0..6.0))?;
        embed_err = embed_err.max(rel(body.hamiltonian_partial(&embedded)?, body.hamiltonian_reduced(&w)?));
    }
    Ok([
        CheckOutcome::new("composition-lift", points, lift_err, 1e-10),
        CheckOutcome::new("composition-embed", points, embed_err, 1e-10),
    ])
}

/// On the invariant set the brackets are `{p_psi, l} = +-mu` and
/// `det = (mu1^2 - mu2^2)^2`. Brackets come from finite differences.
pub fn restriction_check(masses: &MassTriple, seed: u64, points: usize) -> Result<[CheckOutcome; 2]> {
    let mut rng = seeded_rng(seed);
    let (mut det_err, mut entry_err) = (0.0_f64, 0.0_f64);
    for _ in 0..points {
        let (mu1, mu2) = random_momenta(&mut rng);
        let w = random_reduced_point(&mut rng, masses, mu1, mu2);
        let z = embed_reduced_at(&w, rng.random_range(0.0..6.0), rng.random_range(0.0..6.0))?;
        let a = restriction_matrix_numeric(&z, 1e-3)?;
        det_err = det_err.max(rel(a.determinant, (mu1 * mu1 - mu2 * mu2).powi(2)));
        #[rustfmt::skip]
        let expect = nalgebra::Matrix4::new(
            0.0, 0.0, mu1, mu2,
            0.0, 0.0, -mu2, -mu1,
            -mu1, mu2, 0.0, 0.0,
            -mu2, mu1, 0.0, 0.0,
        );
        entry_err = entry_err.max((a.matrix - expect).amax() / mu1);
    }
    Ok([
        CheckOutcome::new("amatrix-determinant", points, det_err, 1e-9),
        CheckOutcome::new("amatrix-entries", points, entry_err, 1e-9),
    ])
}

/// Largest invariant-set residual and `p_theta` drift along partial
/// trajectories started on the invariant set.
pub fn invariant_set_check(masses: &MassTriple, seed: u64, points: usize, steps: usize) -> Result<[CheckOutcome; 2]> {
    let body = ThreeBody::newtonian(*masses);
    let mut rng = seeded_rng(seed);
    let (mut c_max, mut p_drift) = (0.0_f64, 0.0_f64);
    let cfg = IntegratorConfig { max_steps: steps, ..IntegratorConfig::adaptive(1e-11) };
    for _ in 0..points {
        let (mu1, mu2) = random_momenta(&mut rng);
        let w = random_reduced_point(&mut rng, masses, mu1, mu2);
        let z: PartialState = embed_reduced_at(&w, rng.random_range(0.0..6.0), rng.random_range(0.0..6.0))?;
        let sys = PartialSystem { body, mu: (mu1, mu2) };
        let rec = integrate(&sys, &z.to_array(), 1e6, &cfg)?;
        for name in ["c1", "c2", "c3", "c4"] {
            let v = rec.monitor(name).unwrap_or_default();
            c_max = v.iter().fold(c_max, |a, x| a.max(x.abs()));
        }
        for name in ["p_theta1", "p_theta2"] {
            p_drift = p_drift.max(rec.monitor_drift(name).unwrap_or(0.0));
        }
    }
    Ok([
        CheckOutcome::new("invariant-residual", points, c_max, 1e-7),
        CheckOutcome::new("invariant-p-theta", points, p_drift, 1e-9),
    ])
}
