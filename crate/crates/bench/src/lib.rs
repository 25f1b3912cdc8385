//! Fixtures shared by the benchmarks.

use threebody4d::equilibria::{isosceles_equilibrium, IsoscelesParams};
use threebody4d::sampling::{random_chart_point, random_momenta, random_reduced_point, seeded_rng};
use threebody4d::{MassTriple, PartialState, ReducedState};

pub fn masses() -> MassTriple {
    MassTriple::new(1.0, 2.0, 3.0).expect("positive masses")
}

pub fn chart_point() -> PartialState {
    random_chart_point(&mut seeded_rng(0), &masses())
}

pub fn reduced_point() -> ReducedState {
    let mut rng = seeded_rng(0);
    let (mu1, mu2) = random_momenta(&mut rng);
    random_reduced_point(&mut rng, &masses(), mu1, mu2)
}

/// Isosceles equilibrium with a small shape perturbation.
pub fn near_equilibrium() -> (MassTriple, ReducedState) {
    let r = isosceles_equilibrium(&IsoscelesParams::new(1.0, 0.1).expect("valid parameters")).expect("solvable");
    let mut q = r.q;
    q[0] += 1e-3;
    (r.masses, ReducedState::at_rest(q, r.mu1, r.mu2).expect("valid momenta"))
}
