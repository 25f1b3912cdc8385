//! General-mass relative equilibria near the limit where bodies 2 and 3
//! form a tight binary orbited by body 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MassTriple, ScalarPotential, ScalarProducts, ThreeBody};

use super::report::{scaled_solve, EquilibriumReport};

pub const NEWTON_TOLERANCE: f64 = 1e-12;
pub const NEWTON_MAX_ITERATIONS: usize = 100;

/// Expansion parameters of the general-mass family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralSeriesParams {
    /// `M / (m1^2 (m2 + m3)^2)`.
    pub kappa: f64,
    pub u: f64,
    /// `mu2 / mu1 = u m2 m3 sqrt(kappa / (m2 + m3))`.
    pub mu: f64,
}

impl GeneralSeriesParams {
    pub fn new(masses: &MassTriple, u: f64) -> Self {
        let s = masses.m2 + masses.m3;
        let kappa = masses.total() / (masses.m1 * masses.m1 * s * s);
        Self { kappa, u, mu: u * masses.m2 * masses.m3 * (kappa / s).sqrt() }
    }

    /// Inverse of the `mu` relation.
    pub fn from_ratio(masses: &MassTriple, mu: f64) -> Self {
        let s = masses.m2 + masses.m3;
        let kappa = masses.total() / (masses.m1 * masses.m1 * s * s);
        Self { kappa, u: mu / (masses.m2 * masses.m3 * (kappa / s).sqrt()), mu }
    }

    /// `(mu1, mu2)` normalised by `kappa mu1^2 = 1`.
    pub fn momenta(&self) -> (f64, f64) {
        let mu1 = 1.0 / self.kappa.sqrt();
        (mu1, self.mu * mu1)
    }
}

/// Series prediction of `q / (kappa mu1^2)`.
pub fn general_series_equilibrium(masses: &MassTriple, u: f64) -> [f64; 4] {
    let (m1, m2, m3) = (masses.m1, masses.m2, masses.m3);
    let s = m2 + m3;
    let (s2, u2) = (s * s, u * u);
    let u4 = u2 * u2;
    let d = m2 - m3;
    let q1 = u2 - m1 / s * u4 * u4;
    let q2 = 1.5 * u4 * u4 * u2 * m1 * d / s2 * (1.0 - u4 * (5.0 * m2 * m2 + 24.0 * m2 * m3 + 5.0 * m3 * m3) / (4.0 * s2));
    let q3 = -1.5 * u4 * u4 * u4 * masses.total() * m2 * m3 * d / (s2 * s2)
        * (1.0 - 5.0 * u4 * (m2 * m2 + 6.0 * m2 * m3 + m3 * m3) / (4.0 * s2));
    let q4 = 1.0 + 1.5 * u4 * m2 * m3 / s2;
    [q1, q2, q3, q4]
}

/// `q1 q2 nu1 + q3 q4 nu2`, which vanishes at every equilibrium.
pub fn solvability_residual(masses: &MassTriple, q: &[f64; 4]) -> f64 {
    q[0] * q[1] * masses.nu1() + q[2] * q[3] * masses.nu2()
}

/// The equilibrium equations with `I1 = nu2 q4^2 + nu1 q2^2`,
/// `I2 = nu1 q1^2 + nu2 q3^2`, i.e. the centrifugal terms
/// `+- I mu^2 q / (8 A^3 nu1 nu2)` balanced against `(2 q_i V1 + q_j V3, ...)`.
/// All four vanish at an equilibrium.
pub fn simplified_equations(masses: &MassTriple, q: &[f64; 4], mu1: f64, mu2: f64) -> Result<[f64; 4]> {
    simplified_equations_with(&ThreeBody::newtonian(*masses), q, mu1, mu2)
}

pub fn simplified_equations_with<P: ScalarPotential>(
    body: &ThreeBody<P>,
    q: &[f64; 4],
    mu1: f64,
    mu2: f64,
) -> Result<[f64; 4]> {
    let m = &body.masses;
    let (n1, n2) = (m.nu1(), m.nu2());
    let a = crate::reduction::oriented_area(q);
    if a == 0.0 {
        return Err(Error::ChartSingular("oriented area A vanishes"));
    }
    let [v1, v2, v3] = body.potential.gradient(&ScalarProducts::from_shape(q))?;
    let i1 = n2 * q[3] * q[3] + n1 * q[1] * q[1];
    let i2 = n1 * q[0] * q[0] + n2 * q[2] * q[2];
    let k = 8.0 * a * a * a * n1 * n2;
    let (c1, c2) = (i1 * mu2 * mu2 / k, i2 * mu1 * mu1 / k);
    Ok([
        c1 * q[3] - (2.0 * q[0] * v1 + q[2] * v3),
        -c2 * q[2] - (2.0 * q[1] * v1 + q[3] * v3),
        -c1 * q[1] - (2.0 * q[2] * v2 + q[0] * v3),
        c2 * q[0] - (2.0 * q[3] * v2 + q[1] * v3),
    ])
}

/// Diagonally scaled size of the gradient, used as the line-search merit.
fn merit(g: &[f64; 4], h: &super::effective::Mat4x4) -> f64 {
    (0..4).map(|k| g[k] * g[k] / h[(k, k)].abs().max(f64::MIN_POSITIVE)).sum()
}

impl<P: ScalarPotential> ThreeBody<P> {
    /// Damped Newton iteration on `grad V_eff = 0` with the analytic Hessian.
    pub fn newton_equilibrium(&self, mu1: f64, mu2: f64, seed: [f64; 4]) -> Result<EquilibriumReport> {
        let mut q = seed;
        let mut decrement = f64::INFINITY;
        for it in 0..NEWTON_MAX_ITERATIONS {
            let g = self.effective_gradient(&q, mu1, mu2)?;
            let h = self.effective_hessian(&q, mu1, mu2)?;
            let v = self.effective_potential(&q, mu1, mu2)?;
            let step = scaled_solve(&h, &g)?;
            let quad: f64 = (0..4).map(|k| g[k] * step[k]).sum();
            decrement = (quad.abs() / v.abs()).sqrt();
            if decrement < NEWTON_TOLERANCE {
                return EquilibriumReport::analyze(self, q, mu1, mu2, it);
            }
            let m0 = merit(&g, &h);
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let trial = [q[0] - alpha * step[0], q[1] - alpha * step[1], q[2] - alpha * step[2], q[3] - alpha * step[3]];
                if let Ok(gt) = self.effective_gradient(&trial, mu1, mu2) {
                    if merit(&gt, &h) < m0 || alpha == 1.0 && decrement < 1e-6 {
                        q = trial;
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Err(Error::NoConvergence { iterations: NEWTON_MAX_ITERATIONS, decrement })
    }
}

pub fn newton_equilibrium(masses: &MassTriple, mu1: f64, mu2: f64, seed: [f64; 4]) -> Result<EquilibriumReport> {
    ThreeBody::newtonian(*masses).newton_equilibrium(mu1, mu2, seed)
}

/// Equilibrium of the family with expansion parameter `u`, normalised by
/// `kappa mu1^2 = 1` and seeded from the series.
pub fn general_equilibrium(masses: &MassTriple, u: f64) -> Result<EquilibriumReport> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("u must be positive, got {u}")));
    }
    let params = GeneralSeriesParams::new(masses, u);
    let (mu1, mu2) = params.momenta();
    newton_equilibrium(masses, mu1, mu2, general_series_equilibrium(masses, u))
}

/// As [`general_equilibrium`] with bodies `i`, `j` (1-based) as the binary.
pub fn general_equilibrium_pair(masses: &MassTriple, u: f64, pair: (usize, usize)) -> Result<EquilibriumReport> {
    general_equilibrium(&masses.with_binary(pair.0, pair.1)?, u)
}

/// Predicted eigenvalues of the `V_eff` Hessian divided by `m2 m3 / q4^3`.
pub fn general_hessian_eigen_asymptotics(masses: &MassTriple, u: f64) -> [f64; 4] {
    let (m1, m2, m3) = (masses.m1, masses.m2, masses.m3);
    let s = m2 + m3;
    let p = m2 * m3;
    let (u2, u4, u6) = (u * u, u.powi(4), u.powi(6));
    [
        m1 * s / p,
        m1 * m1 * s.powi(3) / (p * p * masses.total() * u4) - 1.0 / u2,
        1.0 / u6 + (1.0 + 11.0 * p / (2.0 * s * s) + p / (m1 * s)) / u2,
        1.0 / u6 + 9.0 * p / (2.0 * s * s * u2) + 7.0 * m1 / s,
    ]
}

/// `u` of the isosceles equilibrium with shape `t`: `u^2 = 4t + 28t^3 + 128 n t^4`.
pub fn u_from_t(n: f64, t: f64) -> f64 {
    (4.0 * t + 28.0 * t.powi(3) + 128.0 * n * t.powi(4)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m123() -> MassTriple {
        MassTriple::new(1.0, 2.0, 3.0).unwrap()
    }

    #[test]
    fn kappa_has_two_forms() {
        let m = m123();
        let p = GeneralSeriesParams::new(&m, 0.1);
        assert!((p.kappa - m.nu1() / (m.nu2() * m.m1 * m.m2 * m.m3)).abs() < 1e-15);
        let back = GeneralSeriesParams::from_ratio(&m, p.mu);
        assert!((back.u - 0.1).abs() < 1e-15);
    }

    #[test]
    fn symmetric_binary_has_no_asymmetric_terms() {
        let q = general_series_equilibrium(&MassTriple::new(2.0, 1.5, 1.5).unwrap(), 0.1);
        assert_eq!((q[1], q[2]), (0.0, 0.0));
    }

    #[test]
    fn newton_converges_and_satisfies_simplified_equations() {
        let m = m123();
        let r = general_equilibrium(&m, 1e-2).unwrap();
        assert!(r.newton_decrement.unwrap() < NEWTON_TOLERANCE);
        let e = simplified_equations(&m, &r.q, r.mu1, r.mu2).unwrap();
        let g = ThreeBody::newtonian(m).effective_gradient(&r.q, r.mu1, r.mu2).unwrap();
        let scale = ThreeBody::newtonian(m).shape_potential_gradient(&r.q).unwrap().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        for k in 0..4 {
            assert!(e[k].abs() < 1e-9 * scale, "equation {k}: {e:?} (grad {g:?})");
        }
        assert!(solvability_residual(&m, &r.q).abs() < 1e-10);
    }

    #[test]
    fn simplified_equations_vanish_on_isosceles_family() {
        use super::super::isosceles::{isosceles_momenta, IsoscelesParams};
        let p = IsoscelesParams::new(1.5, 0.2).unwrap();
        let (a, b) = isosceles_momenta(&p).unwrap();
        let e = simplified_equations(&p.masses(), &p.shape(), a.sqrt(), b.sqrt()).unwrap();
        assert!(e.iter().all(|v| v.abs() < 1e-12), "{e:?}");
    }

    #[test]
    fn equal_binary_converges_to_isosceles() {
        let m = MassTriple::equal();
        let r = general_equilibrium(&m, 0.05).unwrap();
        assert!(r.q[1].abs() < 1e-10 && r.q[2].abs() < 1e-10, "{:?}", r.q);
    }

    #[test]
    fn pair_relabelling_flips_asymmetric_components() {
        let m = m123();
        let a = general_equilibrium_pair(&m, 1e-2, (2, 3)).unwrap();
        let b = general_equilibrium_pair(&m, 1e-2, (3, 2)).unwrap();
        assert!((a.q[0] - b.q[0]).abs() < 1e-12 * a.q[0].abs());
        assert!((a.q[3] - b.q[3]).abs() < 1e-12);
        assert!((a.q[1] + b.q[1]).abs() < 1e-9 * a.q[1].abs());
        assert!((a.q[2] + b.q[2]).abs() < 1e-9 * a.q[2].abs());
        assert!((a.energy - b.energy).abs() < 1e-12 * a.energy.abs());
    }

    #[test]
    fn isosceles_u_link() {
        assert!((u_from_t(1.0, 0.0)).abs() < 1e-300);
        assert!((u_from_t(2.0, 0.01).powi(2) - (0.04 + 28e-6 + 256e-8)).abs() < 1e-15);
    }
}
