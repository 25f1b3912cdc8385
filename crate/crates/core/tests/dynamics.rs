use std::f64::consts::PI;

use threebody4d::dynamics::{
    compare_full_vs_reduced, integrate, FullSystem, IntegratorConfig, ReducedSystem, Termination, VectorField,
};
use threebody4d::equilibria::{isosceles_equilibrium, IsoscelesParams};
use threebody4d::reduction::{embed_reduced, lift_to_full};
use threebody4d::{MassTriple, ReducedState, ThreeBody};

fn equilibrium() -> threebody4d::equilibria::EquilibriumReport {
    isosceles_equilibrium(&IsoscelesParams::new(1.0, 0.1).unwrap()).unwrap()
}

#[test]
fn reduced_state_stays_at_the_equilibrium() {
    let r = equilibrium();
    let sys = ReducedSystem { body: ThreeBody::newtonian(r.masses), mu1: r.mu1, mu2: r.mu2 };
    let start = ReducedState::at_rest(r.q, r.mu1, r.mu2).unwrap();
    let mut dz = [0.0; 8];
    sys.evaluate(&start.to_array(), &mut dz).unwrap();
    assert!(dz.iter().all(|v| v.abs() < 1e-9), "{dz:?}");
    let t_end = 2.0 * PI / r.frequencies.omega1;
    let rec = integrate(&sys, &start.to_array(), t_end, &IntegratorConfig::adaptive(1e-12)).unwrap();
    for s in &rec.states {
        for k in 0..8 {
            assert!((s[k] - start.to_array()[k]).abs() < 1e-8);
        }
    }
}

#[test]
fn full_trajectory_stays_on_the_group_orbit() {
    let r = equilibrium();
    let start = ReducedState::at_rest(r.q, r.mu1, r.mu2).unwrap();
    let rep = compare_full_vs_reduced(
        &ThreeBody::newtonian(r.masses),
        &start,
        2.0 * PI / r.frequencies.omega1,
        10,
        &IntegratorConfig::adaptive(1e-12),
    )
    .unwrap();
    assert!(rep.scalar_product_drift < 1e-8, "{rep:?}");
    assert!(rep.mu_drift[0] < 1e-9 && rep.mu_drift[1] < 1e-9, "{rep:?}");
    assert!(rep.max_deviation() < 1e-8);
}

#[test]
fn full_system_conserves_energy_and_momenta() {
    let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
    let z = ReducedState::new([1.1, 0.2, -0.3, 0.9], [0.1, -0.05, 0.02, 0.08], 1.7, 0.6).unwrap();
    let full = lift_to_full(&embed_reduced(&z).unwrap()).unwrap();
    let sys = FullSystem { body: ThreeBody::newtonian(m) };
    let cfg = IntegratorConfig { max_steps: 1000, ..IntegratorConfig::adaptive(1e-10) };
    let rec = integrate(&sys, &full.to_array(), 1e6, &cfg).unwrap();
    assert_eq!(rec.termination, Termination::StepLimit);
    let h0 = rec.monitor("H").unwrap()[0];
    assert!(rec.monitor_drift("H").unwrap() / h0.abs() < 1e-8);
    assert!(rec.monitor_drift("mu1").unwrap() < 1e-9);
    assert!(rec.monitor_drift("mu2").unwrap() < 1e-9);
}

#[test]
fn head_on_collision_is_a_domain_exit() {
    let m = MassTriple::equal();
    // zero angular momentum, bodies 2 and 3 falling towards each other
    let z = ReducedState::new([0.05, 0.0, 0.0, 2.0], [0.0; 4], 1e-3, 0.0).unwrap();
    let sys = ReducedSystem { body: ThreeBody::newtonian(m), mu1: z.mu1, mu2: z.mu2 };
    let rec = integrate(&sys, &z.to_array(), 10.0, &IntegratorConfig::adaptive(1e-10)).unwrap();
    assert!(matches!(rec.termination, Termination::DomainExit { .. }), "{:?}", rec.termination);
    assert!(!rec.is_empty());
}
