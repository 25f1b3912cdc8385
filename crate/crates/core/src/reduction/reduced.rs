//! The fully reduced four degree of freedom Hamiltonian on the invariant set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{shape_gradient, MassTriple, ScalarProducts, ScalarPotential, ThreeBody};

use super::chart::{oriented_area, planar_momentum, PartialState, RotationAngles, AREA_TOLERANCE};

/// Relative slack on `L3^2 <= Delta^2, Sigma^2` before a point is rejected.
const DOMAIN_SLACK: f64 = 1e-14;

/// A point `(q, p)` of the reduced space at fixed momenta `(mu1, mu2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub q: [f64; 4],
    pub p: [f64; 4],
    pub mu1: f64,
    pub mu2: f64,
}

impl ReducedState {
    /// Requires finite entries, `mu1, mu2 >= 0` and `mu1 != mu2`.
    pub fn new(q: [f64; 4], p: [f64; 4], mu1: f64, mu2: f64) -> Result<Self> {
        validate_momenta(mu1, mu2)?;
        if !q.iter().chain(&p).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite reduced state".into()));
        }
        Ok(Self { q, p, mu1, mu2 })
    }

    pub fn at_rest(q: [f64; 4], mu1: f64, mu2: f64) -> Result<Self> {
        Self::new(q, [0.0; 4], mu1, mu2)
    }

    pub fn area(&self) -> f64 {
        oriented_area(&self.q)
    }

    pub fn l3(&self) -> f64 {
        planar_momentum(&self.q, &self.p)
    }

    /// Layout `(q1..q4, p1..p4)`.
    pub fn to_array(&self) -> [f64; 8] {
        let (q, p) = (self.q, self.p);
        [q[0], q[1], q[2], q[3], p[0], p[1], p[2], p[3]]
    }

    pub fn with_array(&self, z: &[f64]) -> Self {
        Self { q: [z[0], z[1], z[2], z[3]], p: [z[4], z[5], z[6], z[7]], ..*self }
    }

    fn check_area(&self) -> Result<f64> {
        let a = self.area();
        let scale = self.q.iter().map(|v| v * v).sum::<f64>();
        if !(a.abs() > AREA_TOLERANCE * scale) {
            return Err(Error::ChartSingular("oriented area A vanishes"));
        }
        Ok(a)
    }
}

/// Rejects negative, non-finite or equal momenta.
pub fn validate_momenta(mu1: f64, mu2: f64) -> Result<()> {
    if !(mu1 >= 0.0 && mu2 >= 0.0) || !mu1.is_finite() || !mu2.is_finite() {
        return Err(Error::InvalidParameter(format!("momenta must be finite and non-negative, got ({mu1}, {mu2})")));
    }
    if mu1 == mu2 {
        return Err(Error::DegenerateMomenta(mu1));
    }
    Ok(())
}

/// `(L_d + L_s)^2`, `(L_d - L_s)^2` and their `L3` derivatives, with
/// `L_d = sign(Delta) sqrt(Delta^2 - L3^2)`, `L_s = sqrt(Sigma^2 - L3^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticWeights {
    pub plus_sq: f64,
    pub minus_sq: f64,
    pub d_plus_sq: f64,
    pub d_minus_sq: f64,
}

impl KineticWeights {
    pub fn new(l3: f64, mu1: f64, mu2: f64) -> Result<Self> {
        let sigma = mu1 + mu2;
        let delta = mu1 - mu2;
        let l3_sq = l3 * l3;
        let bound = delta.abs().min(sigma.abs());
        let bound_sq = bound * bound;
        if l3_sq > bound_sq * (1.0 + DOMAIN_SLACK) {
            return Err(Error::KineticDomain { l3_sq, bound: bound_sq });
        }
        let ld = delta.signum() * (delta * delta - l3_sq).max(0.0).sqrt();
        let ls = (sigma * sigma - l3_sq).max(0.0).sqrt();
        let plus_sq = (ld + ls).powi(2);
        let minus_sq = (ld - ls).powi(2);
        let (d_plus_sq, d_minus_sq) = if l3 == 0.0 {
            (0.0, 0.0)
        } else if ld == 0.0 || ls == 0.0 {
            return Err(Error::KineticDomain { l3_sq, bound: bound_sq });
        } else {
            let r = 2.0 * l3 / (ld * ls);
            (-r * plus_sq, r * minus_sq)
        };
        Ok(Self { plus_sq, minus_sq, d_plus_sq, d_minus_sq })
    }
}

/// `f(qi, qj) = ((L_d + L_s)^2 qi^2 + (L_d - L_s)^2 qj^2) / (16 A^2)`.
pub fn kinetic_f(qi: f64, qj: f64, area: f64, l3: f64, mu1: f64, mu2: f64) -> Result<f64> {
    let w = KineticWeights::new(l3, mu1, mu2)?;
    Ok((w.plus_sq * qi * qi + w.minus_sq * qj * qj) / (16.0 * area * area))
}

/// Taylor coefficients `(c0, c2)` of `f = c0 + c2 L3^2 + O(L3^4)`.
pub fn kinetic_f_taylor(qi: f64, qj: f64, area: f64, mu1: f64, mu2: f64) -> Result<(f64, f64)> {
    validate_momenta(mu1, mu2)?;
    let (a, b) = (mu1 * mu1 * qi * qi, mu2 * mu2 * qj * qj);
    let s = 4.0 * area * area;
    Ok(((a + b) / s, (b - a) / (s * (mu1 * mu1 - mu2 * mu2))))
}

impl<P: ScalarPotential> ThreeBody<P> {
    /// `(p1^2 + p2^2 + f(q3,q4))/(2 nu1) + (p3^2 + p4^2 + f(q1,q2))/(2 nu2) + V`.
    pub fn hamiltonian_reduced(&self, z: &ReducedState) -> Result<f64> {
        let area = z.check_area()?;
        let [q1, q2, q3, q4] = z.q;
        let [p1, p2, p3, p4] = z.p;
        let l3 = z.l3();
        let f34 = kinetic_f(q3, q4, area, l3, z.mu1, z.mu2)?;
        let f12 = kinetic_f(q1, q2, area, l3, z.mu1, z.mu2)?;
        Ok((p1 * p1 + p2 * p2 + f34) / (2.0 * self.masses.nu1())
            + (p3 * p3 + p4 * p4 + f12) / (2.0 * self.masses.nu2())
            + self.shape_potential(&z.q)?)
    }

    /// `(dH/dq, dH/dp)`.
    pub fn gradient_reduced(&self, z: &ReducedState) -> Result<[f64; 8]> {
        let area = z.check_area()?;
        let [q1, q2, q3, q4] = z.q;
        let [p1, p2, p3, p4] = z.p;
        let (w1, w2) = (1.0 / self.masses.nu1(), 1.0 / self.masses.nu2());
        let l3 = z.l3();
        let kw = KineticWeights::new(l3, z.mu1, z.mu2)?;
        // centrifugal part F = (P N1 + Q N2) / (32 A^2)
        let n1 = q1 * q1 * w2 + q3 * q3 * w1;
        let n2 = q2 * q2 * w2 + q4 * q4 * w1;
        let s = 1.0 / (32.0 * area * area);
        let f = (kw.plus_sq * n1 + kw.minus_sq * n2) * s;
        let df_dl3 = (kw.d_plus_sq * n1 + kw.d_minus_sq * n2) * s;
        let dn1 = [2.0 * q1 * w2, 0.0, 2.0 * q3 * w1, 0.0];
        let dn2 = [0.0, 2.0 * q2 * w2, 0.0, 2.0 * q4 * w1];
        let d_area = [0.5 * q4, -0.5 * q3, -0.5 * q2, 0.5 * q1];
        let dl3_dq = [p2, -p1, p4, -p3];
        let dl3_dp = [-q2, q1, -q4, q3];
        let vg = self.potential.gradient(&ScalarProducts::from_shape(&z.q))?;
        let gv = shape_gradient(&z.q, vg);
        let mut g = [0.0; 8];
        for i in 0..4 {
            g[i] = (kw.plus_sq * dn1[i] + kw.minus_sq * dn2[i]) * s - 2.0 * f * d_area[i] / area
                + df_dl3 * dl3_dq[i]
                + gv[i];
        }
        let pw = [p1 * w1, p2 * w1, p3 * w2, p4 * w2];
        for i in 0..4 {
            g[4 + i] = pw[i] + df_dl3 * dl3_dp[i];
        }
        Ok(g)
    }
}

pub fn hamiltonian_reduced(masses: &MassTriple, z: &ReducedState) -> Result<f64> {
    ThreeBody::newtonian(*masses).hamiltonian_reduced(z)
}

/// Embeds a reduced state into the invariant set with `theta = 0`.
pub fn embed_reduced(z: &ReducedState) -> Result<PartialState> {
    embed_reduced_at(z, 0.0, 0.0)
}

/// Embeds a reduced state into the invariant set: `p_psi = 0`,
/// `p_theta = (mu1, mu2)`, `cos delta = -L3/Sigma`, `cos sigma = -L3/Delta`
/// with `delta, sigma in (0, pi)`. The torus angles are free.
pub fn embed_reduced_at(z: &ReducedState, theta1: f64, theta2: f64) -> Result<PartialState> {
    validate_momenta(z.mu1, z.mu2)?;
    let l3 = z.l3();
    let sigma_m = z.mu1 + z.mu2;
    let delta_m = z.mu1 - z.mu2;
    let bound = delta_m.abs().min(sigma_m);
    if !(l3.abs() < bound) {
        return Err(Error::KineticDomain { l3_sq: l3 * l3, bound: bound * bound });
    }
    let delta = (-l3 / sigma_m).acos();
    let sigma = (-l3 / delta_m).acos();
    Ok(PartialState {
        q: z.q,
        p: z.p,
        angles: RotationAngles::new(0.5 * (sigma + delta), 0.5 * (sigma - delta), theta1, theta2),
        p_psi: [0.0; 2],
        p_theta: [z.mu1, z.mu2],
    })
}
