//! Canonical vector fields of the full, partial and reduced Hamiltonians.

use crate::error::Result;
use crate::model::{angular_momentum, FullState, ScalarPotential, ThreeBody};
use crate::reduction::{invariant_set_residual, PartialState, ReducedState};

/// An autonomous vector field on `R^n`.
pub trait VectorField: Send + Sync {
    fn dimension(&self) -> usize;

    /// Writes the tangent vector at `z` into `dz`. Errors mark points
    /// outside the domain of the field.
    fn evaluate(&self, z: &[f64], dz: &mut [f64]) -> Result<()>;

    fn state_names(&self) -> Vec<String> {
        (0..self.dimension()).map(|k| format!("z{k}")).collect()
    }

    fn monitor_names(&self) -> Vec<String> {
        Vec::new()
    }

    /// Conserved or diagnostic quantities sampled along trajectories.
    fn monitors(&self, _z: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// `dz = (dH/dP, -dH/dQ)` for a gradient in the layout `(Q, P)`.
fn canonical(grad: &[f64], dz: &mut [f64]) {
    let n = grad.len() / 2;
    for k in 0..n {
        dz[k] = grad[n + k];
        dz[n + k] = -grad[k];
    }
}

fn names(prefix: &[&str], count: usize) -> Vec<String> {
    prefix.iter().flat_map(|p| (1..=count).map(move |k| format!("{p}{k}"))).collect()
}

/// Canonical field of a Hamiltonian given by its gradient.
pub struct GradientField<F> {
    dim: usize,
    gradient: F,
}

impl<F> GradientField<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    /// `dim` is the phase-space dimension; `gradient` writes `(dH/dQ, dH/dP)`.
    pub fn new(dim: usize, gradient: F) -> Self {
        Self { dim, gradient }
    }
}

impl<F> VectorField for GradientField<F>
where
    F: Fn(&[f64], &mut [f64]) -> Result<()> + Send + Sync,
{
    fn dimension(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, z: &[f64], dz: &mut [f64]) -> Result<()> {
        let mut g = vec![0.0; self.dim];
        (self.gradient)(z, &mut g)?;
        canonical(&g, dz);
        Ok(())
    }
}

/// The translation-reduced system on `(x1, x2, y1, y2)`.
pub struct FullSystem<P> {
    pub body: ThreeBody<P>,
}

impl<P: ScalarPotential> VectorField for FullSystem<P> {
    fn dimension(&self) -> usize {
        16
    }

    fn evaluate(&self, z: &[f64], dz: &mut [f64]) -> Result<()> {
        canonical(&self.body.gradient_full(&FullState::from_slice(z))?, dz);
        Ok(())
    }

    fn state_names(&self) -> Vec<String> {
        let mut v = Vec::new();
        for vec in ["x1", "x2", "y1", "y2"] {
            v.extend((1..=4).map(|k| format!("{vec}_{k}")));
        }
        v
    }

    fn monitor_names(&self) -> Vec<String> {
        ["H", "mu1", "mu2"].map(String::from).to_vec()
    }

    fn monitors(&self, z: &[f64]) -> Vec<f64> {
        let s = FullState::from_slice(z);
        let l = angular_momentum(&s);
        vec![self.body.hamiltonian_full(&s).unwrap_or(f64::NAN), l.mu1, l.mu2]
    }
}

/// The partially reduced system on the chart. `mu` fixes the momenta used
/// in the invariant-set residual monitors.
pub struct PartialSystem<P> {
    pub body: ThreeBody<P>,
    pub mu: (f64, f64),
}

impl<P: ScalarPotential> VectorField for PartialSystem<P> {
    fn dimension(&self) -> usize {
        16
    }

    fn evaluate(&self, z: &[f64], dz: &mut [f64]) -> Result<()> {
        canonical(&self.body.gradient_partial(&PartialState::from_slice(z))?, dz);
        Ok(())
    }

    fn state_names(&self) -> Vec<String> {
        let mut v = names(&["q"], 4);
        v.extend(["psi1", "psi2", "theta1", "theta2"].map(String::from));
        v.extend(names(&["p"], 4));
        v.extend(["p_psi1", "p_psi2", "p_theta1", "p_theta2"].map(String::from));
        v
    }

    fn monitor_names(&self) -> Vec<String> {
        ["H", "p_theta1", "p_theta2", "c1", "c2", "c3", "c4"].map(String::from).to_vec()
    }

    fn monitors(&self, z: &[f64]) -> Vec<f64> {
        let s = PartialState::from_slice(z);
        let c = invariant_set_residual(&s, self.mu.0, self.mu.1);
        let h = self.body.hamiltonian_partial(&s).unwrap_or(f64::NAN);
        vec![h, s.p_theta[0], s.p_theta[1], c[0], c[1], c[2], c[3]]
    }
}

/// The fully reduced system on `(q, p)` at fixed `(mu1, mu2)`.
pub struct ReducedSystem<P> {
    pub body: ThreeBody<P>,
    pub mu1: f64,
    pub mu2: f64,
}

impl<P: ScalarPotential> ReducedSystem<P> {
    pub fn state(&self, z: &[f64]) -> ReducedState {
        ReducedState {
            q: [z[0], z[1], z[2], z[3]],
            p: [z[4], z[5], z[6], z[7]],
            mu1: self.mu1,
            mu2: self.mu2,
        }
    }
}

impl<P: ScalarPotential> VectorField for ReducedSystem<P> {
    fn dimension(&self) -> usize {
        8
    }

    fn evaluate(&self, z: &[f64], dz: &mut [f64]) -> Result<()> {
        canonical(&self.body.gradient_reduced(&self.state(z))?, dz);
        Ok(())
    }

    fn state_names(&self) -> Vec<String> {
        names(&["q", "p"], 4)
    }

    fn monitor_names(&self) -> Vec<String> {
        ["H", "A", "L3"].map(String::from).to_vec()
    }

    fn monitors(&self, z: &[f64]) -> Vec<f64> {
        let s = self.state(z);
        vec![self.body.hamiltonian_reduced(&s).unwrap_or(f64::NAN), s.area(), s.l3()]
    }
}

/// Analytic `(dH/dq, dH/dp)` of the reduced Hamiltonian.
pub fn gradient_reduced<P: ScalarPotential>(body: &ThreeBody<P>, state: &ReducedState) -> Result<[f64; 8]> {
    body.gradient_reduced(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MassTriple;
    use crate::reduction::embed_reduced;

    #[test]
    fn reduced_field_is_restriction_of_partial_field() {
        let body = ThreeBody::newtonian(MassTriple::new(1.0, 2.0, 3.0).unwrap());
        let z = ReducedState::new([1.1, 0.2, -0.3, 0.9], [0.3, -0.2, 0.5, 0.1], 1.7, 0.6).unwrap();
        let e = embed_reduced(&z).unwrap();
        let partial = PartialSystem { body, mu: (z.mu1, z.mu2) };
        let reduced = ReducedSystem { body, mu1: z.mu1, mu2: z.mu2 };
        let mut dp = [0.0; 16];
        let mut dr = [0.0; 8];
        partial.evaluate(&e.to_array(), &mut dp).unwrap();
        reduced.evaluate(&z.to_array(), &mut dr).unwrap();
        for k in 0..4 {
            assert!((dp[k] - dr[k]).abs() < 1e-10, "q{k}");
            assert!((dp[8 + k] - dr[4 + k]).abs() < 1e-10, "p{k}");
        }
        // the invariant-set constraints are stationary
        assert!(dp[12].abs() < 1e-10 && dp[13].abs() < 1e-10 && dp[14].abs() < 1e-12 && dp[15].abs() < 1e-12);
    }
}
