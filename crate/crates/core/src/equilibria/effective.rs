//! Effective potential `V_eff = (mu1^2 / I1 + mu2^2 / I2)/2 + V` and the
//! second-order part of the effective kinetic energy.

use nalgebra::{Matrix4, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat8;
use crate::model::{MassTriple, ScalarPotential, ThreeBody};
use crate::reduction::{oriented_area, AREA_TOLERANCE};

pub type Mat4x4 = Matrix4<f64>;

/// Split of the reduced Hamiltonian at `p = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSplit {
    pub v_eff: f64,
    /// Coefficient of `L3^2` in `K_eff`.
    pub keff_coefficient: f64,
    /// `1 / I1 = (q1^2/nu2 + q3^2/nu1) / (4 A^2)`.
    pub inv_i1: f64,
    /// `1 / I2 = (q2^2/nu2 + q4^2/nu1) / (4 A^2)`.
    pub inv_i2: f64,
}

impl EffectiveSplit {
    pub fn i1(&self) -> f64 {
        1.0 / self.inv_i1
    }

    pub fn i2(&self) -> f64 {
        1.0 / self.inv_i2
    }

    /// Sufficient condition for a positive definite momentum block.
    pub fn keff_positive(&self) -> bool {
        self.keff_coefficient > 0.0
    }
}

fn checked_area(q: &[f64; 4]) -> Result<f64> {
    let a = oriented_area(q);
    let scale = q.iter().map(|v| v * v).sum::<f64>();
    if !(a.abs() > AREA_TOLERANCE * scale) {
        return Err(Error::ChartSingular("oriented area A vanishes"));
    }
    Ok(a)
}

/// Weights `w` with `mu1^2 / I1 + mu2^2 / I2 = sum w_k q_k^2 / (4 A^2)`.
fn centrifugal_weights(masses: &MassTriple, mu1: f64, mu2: f64) -> [f64; 4] {
    let (n1, n2) = (masses.nu1(), masses.nu2());
    let (a, b) = (mu1 * mu1, mu2 * mu2);
    [a / n2, b / n2, a / n1, b / n1]
}

/// `1/I1`, `1/I2`.
pub fn inverse_inertia(masses: &MassTriple, q: &[f64; 4]) -> Result<(f64, f64)> {
    let a = checked_area(q)?;
    let (n1, n2) = (masses.nu1(), masses.nu2());
    let s = 4.0 * a * a;
    Ok(((q[0] * q[0] / n2 + q[2] * q[2] / n1) / s, (q[1] * q[1] / n2 + q[3] * q[3] / n1) / s))
}

impl<P: ScalarPotential> ThreeBody<P> {
    pub fn effective_split(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<EffectiveSplit> {
        let (inv_i1, inv_i2) = inverse_inertia(&self.masses, q)?;
        let v_eff = 0.5 * (mu1 * mu1 * inv_i1 + mu2 * mu2 * inv_i2) + self.shape_potential(q)?;
        let keff_coefficient = keff_coefficient(inv_i1, inv_i2, mu1, mu2)?;
        Ok(EffectiveSplit { v_eff, keff_coefficient, inv_i1, inv_i2 })
    }

    pub fn effective_potential(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<f64> {
        let (inv_i1, inv_i2) = inverse_inertia(&self.masses, q)?;
        Ok(0.5 * (mu1 * mu1 * inv_i1 + mu2 * mu2 * inv_i2) + self.shape_potential(q)?)
    }

    pub fn effective_gradient(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<[f64; 4]> {
        let a = checked_area(q)?;
        let w = centrifugal_weights(&self.masses, mu1, mu2);
        let weighted: f64 = (0..4).map(|k| w[k] * q[k] * q[k]).sum();
        let da = area_gradient(q);
        let gv = self.shape_potential_gradient(q)?;
        // K = W / (8 A^2)
        let mut g = [0.0; 4];
        for k in 0..4 {
            g[k] = (2.0 * w[k] * q[k] / (a * a) - 2.0 * weighted * da[k] / (a * a * a)) / 8.0 + gv[k];
        }
        Ok(g)
    }

    pub fn effective_hessian(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<Mat4x4> {
        let a = checked_area(q)?;
        let w = centrifugal_weights(&self.masses, mu1, mu2);
        let weighted: f64 = (0..4).map(|k| w[k] * q[k] * q[k]).sum();
        let da = area_gradient(q);
        let dw: Vec<f64> = (0..4).map(|k| 2.0 * w[k] * q[k]).collect();
        let hv = self.shape_potential_hessian(q)?;
        let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
        let mut h = Mat4x4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut k = -2.0 * (dw[i] * da[j] + da[i] * dw[j]) / a3 + 6.0 * weighted * da[i] * da[j] / a4;
                if i == j {
                    k += 2.0 * w[i] / a2;
                }
                k -= 2.0 * weighted * area_hessian(i, j) / a3;
                h[(i, j)] = k / 8.0 + hv[i][j];
            }
        }
        Ok(h)
    }

    /// Hessian of the reduced Hamiltonian in `p` at `p = 0`:
    /// `diag(1/nu1, 1/nu1, 1/nu2, 1/nu2) + 2 c g g^T` with `g = dL3/dp`.
    pub fn momentum_hessian(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<Mat4x4> {
        let (inv_i1, inv_i2) = inverse_inertia(&self.masses, q)?;
        let c = keff_coefficient(inv_i1, inv_i2, mu1, mu2)?;
        let g = [-q[1], q[0], -q[3], q[2]];
        let (w1, w2) = (1.0 / self.masses.nu1(), 1.0 / self.masses.nu2());
        let diag = [w1, w1, w2, w2];
        Ok(Mat4x4::from_fn(|i, j| 2.0 * c * g[i] * g[j] + if i == j { diag[i] } else { 0.0 }))
    }

    /// The 8x8 Hessian of the reduced Hamiltonian at `(q, p = 0)`; the mixed
    /// block vanishes there.
    pub fn hessian_at_rest(&self, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<Mat8> {
        let hq = self.effective_hessian(q, mu1, mu2)?;
        let hp = self.momentum_hessian(q, mu1, mu2)?;
        let mut h = SMatrix::<f64, 8, 8>::zeros();
        h.fixed_view_mut::<4, 4>(0, 0).copy_from(&hq);
        h.fixed_view_mut::<4, 4>(4, 4).copy_from(&hp);
        Ok(h)
    }
}

fn area_gradient(q: &[f64; 4]) -> [f64; 4] {
    [0.5 * q[3], -0.5 * q[2], -0.5 * q[1], 0.5 * q[0]]
}

fn area_hessian(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 3) | (3, 0) => 0.5,
        (1, 2) | (2, 1) => -0.5,
        _ => 0.0,
    }
}

fn keff_coefficient(inv_i1: f64, inv_i2: f64, mu1: f64, mu2: f64) -> Result<f64> {
    let gap = mu1 * mu1 - mu2 * mu2;
    if gap == 0.0 {
        return Err(Error::DegenerateMomenta(mu1));
    }
    Ok((-mu1 * mu1 * inv_i1 + mu2 * mu2 * inv_i2) / (2.0 * gap))
}

pub fn effective_potential(masses: &MassTriple, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<f64> {
    ThreeBody::newtonian(*masses).effective_potential(q, mu1, mu2)
}

/// Coefficient of `L3^2` in the effective kinetic energy,
/// `(-mu1^2/I1 + mu2^2/I2) / (2 (mu1^2 - mu2^2))`.
pub fn keff_correction(masses: &MassTriple, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<f64> {
    let (i1, i2) = inverse_inertia(masses, q)?;
    keff_coefficient(i1, i2, mu1, mu2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::{kinetic_f_taylor, ReducedState};

    fn setup() -> (ThreeBody, [f64; 4], f64, f64) {
        (ThreeBody::newtonian(MassTriple::new(1.0, 2.0, 3.0).unwrap()), [0.7, 0.15, -0.2, 1.1], 1.3, 0.4)
    }

    #[test]
    fn equals_reduced_hamiltonian_at_rest() {
        let (body, q, mu1, mu2) = setup();
        let z = ReducedState::at_rest(q, mu1, mu2).unwrap();
        let h = body.hamiltonian_reduced(&z).unwrap();
        let v = body.effective_potential(&q, mu1, mu2).unwrap();
        assert!(((h - v) / v).abs() < 1e-12);
    }

    #[test]
    fn gradient_and_hessian_match_differences() {
        let (body, q, mu1, mu2) = setup();
        let g = body.effective_gradient(&q, mu1, mu2).unwrap();
        let hs = body.effective_hessian(&q, mu1, mu2).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let (mut a, mut b) = (q, q);
            a[k] += h;
            b[k] -= h;
            let fd = (body.effective_potential(&a, mu1, mu2).unwrap()
                - body.effective_potential(&b, mu1, mu2).unwrap())
                / (2.0 * h);
            assert!(((fd - g[k]) / g[k]).abs() < 1e-7, "{k}");
            let ga = body.effective_gradient(&a, mu1, mu2).unwrap();
            let gb = body.effective_gradient(&b, mu1, mu2).unwrap();
            for j in 0..4 {
                let fd = (ga[j] - gb[j]) / (2.0 * h);
                assert!((fd - hs[(j, k)]).abs() < 1e-6 * (1.0 + hs[(j, k)].abs()), "{j}{k}");
            }
        }
    }

    #[test]
    fn momentum_block_matches_reduced_hamiltonian() {
        let (body, q, mu1, mu2) = setup();
        let hp = body.momentum_hessian(&q, mu1, mu2).unwrap();
        let h = 1e-4;
        let e = |p: [f64; 4]| body.hamiltonian_reduced(&ReducedState::new(q, p, mu1, mu2).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut pp = [0.0; 4];
                let mut pm = [0.0; 4];
                let mut mp = [0.0; 4];
                let mut mm = [0.0; 4];
                pp[i] += h;
                pp[j] += h;
                pm[i] += h;
                pm[j] -= h;
                mp[i] -= h;
                mp[j] += h;
                mm[i] -= h;
                mm[j] -= h;
                let fd = (e(pp) - e(pm) - e(mp) + e(mm)) / (4.0 * h * h);
                assert!((fd - hp[(i, j)]).abs() < 1e-5 * (1.0 + hp[(i, j)].abs()), "{i}{j} {fd} {}", hp[(i, j)]);
            }
        }
    }

    #[test]
    fn coefficient_is_taylor_weighted() {
        let (body, q, mu1, mu2) = setup();
        let m = body.masses;
        let a = oriented_area(&q);
        let c34 = kinetic_f_taylor(q[2], q[3], a, mu1, mu2).unwrap().1;
        let c12 = kinetic_f_taylor(q[0], q[1], a, mu1, mu2).unwrap().1;
        let expect = c34 / (2.0 * m.nu1()) + c12 / (2.0 * m.nu2());
        let got = keff_correction(&m, &q, mu1, mu2).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-13);
    }

    #[test]
    fn coefficient_without_second_momentum() {
        let (body, q, mu1, _) = setup();
        let (i1, _) = inverse_inertia(&body.masses, &q).unwrap();
        let c = keff_correction(&body.masses, &q, mu1, 0.0).unwrap();
        assert!((c + 0.5 * i1).abs() < 1e-15 && c < 0.0);
        assert!(matches!(keff_correction(&body.masses, &q, 1.0, 1.0), Err(Error::DegenerateMomenta(_))));
    }
}
