use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_positive_definite, symmetric_eigenvalues};
use crate::model::{MassTriple, ScalarPotential, ThreeBody};

use super::effective::Mat4x4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Both the `q` and the `p` block of the Hessian are positive definite.
    Minimum,
    /// The effective kinetic energy is positive definite but `V_eff` is not.
    Saddle,
    /// The momentum block is not positive definite.
    IndefiniteKinetic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Minimum => "minimum",
            Self::Saddle => "saddle",
            Self::IndefiniteKinetic => "indefinite-K",
        })
    }
}

/// Rotation frequencies in the two eigenplanes of the angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    /// `mu1 / (nu2 q4^2 + nu1 q2^2)`.
    pub omega1: f64,
    /// `mu2 / (nu1 q1^2 + nu2 q3^2)`.
    pub omega2: f64,
    /// `omega1^2 q4^3 / M`, tends to 1 in the collision limit.
    pub kepler1: f64,
    /// `omega2^2 q1^3 / (m2 + m3)`, tends to 1 in the collision limit.
    pub kepler2: f64,
}

pub fn frequencies_at(masses: &MassTriple, q: &[f64; 4], mu1: f64, mu2: f64) -> Frequencies {
    let (n1, n2) = (masses.nu1(), masses.nu2());
    let omega1 = mu1 / (n2 * q[3] * q[3] + n1 * q[1] * q[1]);
    let omega2 = mu2 / (n1 * q[0] * q[0] + n2 * q[2] * q[2]);
    Frequencies {
        omega1,
        omega2,
        kepler1: omega1 * omega1 * q[3].powi(3) / masses.total(),
        kepler2: omega2 * omega2 * q[0].powi(3) / (masses.m2 + masses.m3),
    }
}

pub fn frequencies(masses: &MassTriple, report: &EquilibriumReport) -> Frequencies {
    frequencies_at(masses, &report.q, report.mu1, report.mu2)
}

/// `((mu1 + mu2)^2 H, mu1 mu2 / (mu1 + mu2)^2)`.
pub fn scaled_energy_momentum(energy: f64, mu1: f64, mu2: f64) -> (f64, f64) {
    let s = mu1 + mu2;
    (s * s * energy, mu1 * mu2 / (s * s))
}

/// A relative equilibrium (`p = 0`) of the reduced Hamiltonian and its
/// second-order analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub masses: MassTriple,
    pub q: [f64; 4],
    pub mu1: f64,
    pub mu2: f64,
    /// Value of the reduced Hamiltonian, i.e. `V_eff(q)`.
    pub energy: f64,
    /// Rows of the 8x8 Hessian in `(q1..q4, p1..p4)`.
    pub hessian: Vec<Vec<f64>>,
    /// Ascending eigenvalues of the `q` block followed by those of the `p` block.
    pub eigenvalues: [f64; 8],
    pub classification: Classification,
    pub potential_block_positive: bool,
    pub momentum_block_positive: bool,
    /// Coefficient of `L3^2` in `K_eff`; positive is sufficient for a
    /// positive definite momentum block.
    pub keff_coefficient: f64,
    pub frequencies: Frequencies,
    pub h: f64,
    pub b: f64,
    pub neg_inv_h: f64,
    /// `max |dV_eff/dq|`.
    pub gradient_norm: f64,
    /// `sqrt(|g^T H^-1 g| / |V_eff|)`, the scale-free convergence measure;
    /// `None` where the `q` block is singular (e.g. at `mu1 = mu2`).
    pub newton_decrement: Option<f64>,
    /// `q1 q2 nu1 + q3 q4 nu2`.
    pub solvability_residual: f64,
    pub iterations: usize,
}

impl EquilibriumReport {
    /// Builds the report from the two diagonal blocks of the Hessian.
    pub fn from_blocks<P: ScalarPotential>(
        body: &ThreeBody<P>,
        q: [f64; 4],
        mu1: f64,
        mu2: f64,
        hq: &Mat4x4,
        hp: &Mat4x4,
        iterations: usize,
    ) -> Result<Self> {
        let split = body.effective_split(&q, mu1, mu2)?;
        let g = body.effective_gradient(&q, mu1, mu2)?;
        let newton_decrement = newton_decrement(&g, hq, split.v_eff).ok();
        let dq = DMatrix::from_fn(4, 4, |i, j| hq[(i, j)]);
        let dp = DMatrix::from_fn(4, 4, |i, j| hp[(i, j)]);
        let mut eigenvalues = [0.0; 8];
        eigenvalues[..4].copy_from_slice(&symmetric_eigenvalues(&dq));
        eigenvalues[4..].copy_from_slice(&symmetric_eigenvalues(&dp));
        let potential_block_positive = is_positive_definite(&dq);
        let momentum_block_positive = is_positive_definite(&dp);
        let classification = if !momentum_block_positive {
            Classification::IndefiniteKinetic
        } else if !potential_block_positive {
            Classification::Saddle
        } else {
            Classification::Minimum
        };
        let mut hessian = vec![vec![0.0; 8]; 8];
        for i in 0..4 {
            for j in 0..4 {
                hessian[i][j] = hq[(i, j)];
                hessian[4 + i][4 + j] = hp[(i, j)];
            }
        }
        let (h, b) = scaled_energy_momentum(split.v_eff, mu1, mu2);
        let m = &body.masses;
        Ok(Self {
            masses: *m,
            q,
            mu1,
            mu2,
            energy: split.v_eff,
            hessian,
            eigenvalues,
            classification,
            potential_block_positive,
            momentum_block_positive,
            keff_coefficient: split.keff_coefficient,
            frequencies: frequencies_at(m, &q, mu1, mu2),
            h,
            b,
            neg_inv_h: -1.0 / h,
            gradient_norm: g.iter().fold(0.0, |a, v| a.max(v.abs())),
            newton_decrement,
            solvability_residual: q[0] * q[1] * m.nu1() + q[2] * q[3] * m.nu2(),
            iterations,
        })
    }

    /// Report with the analytic Hessian of the reduced Hamiltonian.
    pub fn analyze<P: ScalarPotential>(body: &ThreeBody<P>, q: [f64; 4], mu1: f64, mu2: f64, iterations: usize) -> Result<Self> {
        let hq = body.effective_hessian(&q, mu1, mu2)?;
        let hp = body.momentum_hessian(&q, mu1, mu2)?;
        Self::from_blocks(body, q, mu1, mu2, &hq, &hp, iterations)
    }

    pub fn is_minimum(&self) -> bool {
        self.classification == Classification::Minimum
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Solves `H x = g` after the symmetric diagonal scaling `D^-1/2 H D^-1/2`,
/// which tames Hessians whose entries span many decades.
pub(crate) fn scaled_solve(h: &Mat4x4, g: &[f64; 4]) -> Result<[f64; 4]> {
    let d: Vec<f64> = (0..4).map(|k| 1.0 / h[(k, k)].abs().max(f64::MIN_POSITIVE).sqrt()).collect();
    let hs = DMatrix::from_fn(4, 4, |i, j| h[(i, j)] * d[i] * d[j]);
    let rhs = DVector::from_fn(4, |i, _| g[i] * d[i]);
    let lu = hs.clone().lu();
    let ev = symmetric_eigenvalues(&hs);
    let (lo, hi) = (ev.iter().fold(f64::INFINITY, |a, v| a.min(v.abs())), ev.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    if !(lo > 1e-14 * hi) {
        return Err(Error::DegenerateHessian(lo / hi.max(f64::MIN_POSITIVE)));
    }
    let x = lu.solve(&rhs).ok_or(Error::DegenerateHessian(0.0))?;
    Ok([x[0] * d[0], x[1] * d[1], x[2] * d[2], x[3] * d[3]])
}

pub(crate) fn newton_decrement(g: &[f64; 4], h: &Mat4x4, scale: f64) -> Result<f64> {
    let x = scaled_solve(h, g)?;
    let quad: f64 = (0..4).map(|k| g[k] * x[k]).sum();
    Ok((quad.abs() / scale.abs()).sqrt())
}
