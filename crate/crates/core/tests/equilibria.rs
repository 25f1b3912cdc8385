use threebody4d::equilibria::{
    effective_potential, general_equilibrium, general_hessian_eigen_asymptotics, isosceles_equilibrium,
    isosceles_frequency_ratio_sq, isosceles_scan, keff_correction, log_grid, p2_root, region_classification,
    u_from_t, Classification, GeneralSeriesParams, IsoscelesParams,
};
use threebody4d::reduction::hamiltonian_reduced;
use threebody4d::{MassTriple, ReducedState, ScalarProducts, ThreeBody};

fn m123() -> MassTriple {
    MassTriple::new(1.0, 2.0, 3.0).unwrap()
}

#[test]
fn effective_potential_is_the_reduced_hamiltonian_at_rest() {
    let m = m123();
    let q = [1.1, 0.2, -0.3, 0.9];
    let v = effective_potential(&m, &q, 1.7, 0.6).unwrap();
    let h = hamiltonian_reduced(&m, &ReducedState::at_rest(q, 1.7, 0.6).unwrap()).unwrap();
    assert!(((v - h) / h).abs() < 1e-12);
}

#[test]
fn near_axis_isosceles_point_is_a_minimum() {
    let r = isosceles_equilibrium(&IsoscelesParams::new(1.0, 0.01).unwrap()).unwrap();
    assert_eq!(r.classification, Classification::Minimum);
    assert!(r.eigenvalues.iter().all(|e| *e > 0.0));
    assert!(region_classification(1.0, 0.01).is_minimum());
    let above = isosceles_equilibrium(&IsoscelesParams::new(1.0, 0.9).unwrap()).unwrap();
    assert!(!above.is_minimum());
}

#[test]
fn isosceles_hessian_is_block_diagonal_and_the_gradient_vanishes() {
    let p = IsoscelesParams::new(2.0, 0.2).unwrap();
    let r = isosceles_equilibrium(&p).unwrap();
    let body = ThreeBody::newtonian(p.masses());
    let h = body.hessian_at_rest(&r.q, r.mu1, r.mu2).unwrap();
    for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (4, 6), (5, 7), (6, 7)] {
        assert!(h[(i, j)].abs() < 1e-9 * (h[(i, i)] * h[(j, j)]).abs().sqrt());
    }
    let z = ReducedState::at_rest(r.q, r.mu1, r.mu2).unwrap();
    assert!(body.gradient_reduced(&z).unwrap().iter().all(|g| g.abs() < 1e-9));
}

#[test]
fn frequency_ratio_closed_form() {
    for (n, t) in [(0.5, 0.05), (1.0, 0.2), (3.0, 0.6)] {
        let r = isosceles_equilibrium(&IsoscelesParams::new(n, t).unwrap()).unwrap();
        let ratio = (r.frequencies.omega2 / r.frequencies.omega1).powi(2);
        assert!((ratio / isosceles_frequency_ratio_sq(n, t) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn energy_momentum_curve_is_single_humped() {
    let ts = log_grid(1e-3, 0.99, 400).unwrap();
    let table = isosceles_scan(1.0, &ts).unwrap();
    let bs: Vec<f64> = table.solved().map(|(_, v)| v.b).collect();
    assert_eq!(bs.len(), ts.len());
    let peak = bs.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    assert!(bs[..=peak].windows(2).all(|w| w[1] >= w[0]));
    assert!(bs[peak..].windows(2).all(|w| w[1] <= w[0]));
    assert!(bs[peak] < 0.25);
    // the maximum sits where mu1 = mu2
    let t_star = p2_root(1.0).unwrap();
    assert!((ts[peak] / t_star).ln().abs() < 2.0 * (ts[1] / ts[0]).ln());
    let at_root = isosceles_equilibrium(&IsoscelesParams::new(1.0, t_star * (1.0 + 1e-9)).unwrap()).unwrap();
    assert!((at_root.b - 0.25).abs() < 1e-12);
    // both ends of the family approach b = 0
    assert!(bs[0] < 0.05 && *bs.last().unwrap() < 0.05);
}

#[test]
fn equal_binary_gives_the_isosceles_solution() {
    let r = general_equilibrium(&MassTriple::equal(), 1e-2).unwrap();
    assert!(r.q[1].abs() < 1e-10 && r.q[2].abs() < 1e-10);
}

#[test]
fn keff_correction_positive_for_small_mu2() {
    let m = m123();
    let r = general_equilibrium(&m, 1e-2).unwrap();
    assert!(r.keff_coefficient > 0.0);
    assert_eq!(keff_correction(&m, &r.q, r.mu1, r.mu2).unwrap(), r.keff_coefficient);
    // mu2 = 0 leaves only the negative I1 term
    let (i1_inv, _) = threebody4d::equilibria::inverse_inertia(&m, &r.q).unwrap();
    let c = keff_correction(&m, &r.q, r.mu1, 0.0).unwrap();
    assert!((c + 0.5 * i1_inv).abs() < 1e-12 * i1_inv);
}

#[test]
fn kernel_direction_is_orthogonal_to_the_gradient() {
    let m = m123();
    let r = general_equilibrium(&m, 0.05).unwrap();
    let body = ThreeBody::newtonian(m);
    let g = body.effective_gradient(&r.q, r.mu1, r.mu2).unwrap();
    let k = [-r.q[1], r.q[0], -r.q[3], r.q[2]];
    let dot: f64 = (0..4).map(|i| g[i] * k[i]).sum();
    assert!(dot.abs() < 1e-9);
}

#[test]
fn binary_separation_follows_the_series() {
    let m = m123();
    for u in [1e-2, 3e-2] {
        let r = general_equilibrium(&m, u).unwrap();
        let kappa = GeneralSeriesParams::new(&m, u).kappa;
        let d = ScalarProducts::from_shape(&r.q).squared_distances(&m)[0].sqrt();
        let lead = kappa * r.mu1 * r.mu1 * u * u;
        assert!((d / lead - 1.0).abs() < 10.0 * u.powi(4));
    }
}

#[test]
fn general_eigenvalue_series_matches_the_solver() {
    let m = m123();
    let u = 1e-2;
    let r = general_equilibrium(&m, u).unwrap();
    let scale = m.m2 * m.m3 / r.q[3].powi(3);
    let mut pred: Vec<f64> = general_hessian_eigen_asymptotics(&m, u).iter().map(|e| e * scale).collect();
    pred.sort_by(f64::total_cmp);
    for k in 0..4 {
        assert!((r.eigenvalues[k] / pred[k] - 1.0).abs() < 1e-2, "{k}: {} vs {}", r.eigenvalues[k], pred[k]);
    }
}

#[test]
fn general_series_reduces_to_the_isosceles_one() {
    let t = 1e-3;
    for n in [0.5, 1.0, 2.0] {
        let r = isosceles_equilibrium(&IsoscelesParams::new(n, t).unwrap()).unwrap();
        let m = MassTriple::isosceles(n).unwrap();
        let mut pred = general_hessian_eigen_asymptotics(&m, u_from_t(n, t)).to_vec();
        pred.sort_by(f64::total_cmp);
        for k in 0..4 {
            assert!((r.eigenvalues[k] / pred[k] - 1.0).abs() < 1e-2, "n={n} {k}: {} vs {}", r.eigenvalues[k], pred[k]);
        }
    }
}

#[test]
fn minimum_across_the_mass_grid() {
    for m in [(0.5, 1.0, 2.0), (2.0, 0.5, 1.0), (1.0, 2.0, 0.5)] {
        let m = MassTriple::new(m.0, m.1, m.2).unwrap();
        let pred = general_hessian_eigen_asymptotics(&m, 1e-2);
        assert!(pred.iter().all(|e| *e > 0.0));
        assert!(general_equilibrium(&m, 1e-2).unwrap().is_minimum());
    }
}
