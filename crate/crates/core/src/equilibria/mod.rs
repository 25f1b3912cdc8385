//! Relative equilibria (`p = 0` critical points of the reduced Hamiltonian),
//! their Hessians and the parameter scans built on them.

mod effective;
mod general;
mod isosceles;
mod report;
mod scan;

pub use effective::{effective_potential, inverse_inertia, keff_correction, EffectiveSplit, Mat4x4};
pub use general::{
    general_equilibrium, general_equilibrium_pair, general_hessian_eigen_asymptotics, general_series_equilibrium,
    newton_equilibrium, simplified_equations, simplified_equations_with, solvability_residual, u_from_t,
    GeneralSeriesParams, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE,
};
pub use isosceles::{
    isosceles_asymptotics, isosceles_blocks_at, isosceles_conditions, isosceles_equilibrium, isosceles_frequencies,
    isosceles_frequency_ratio_sq, isosceles_hessian_blocks, isosceles_momenta, p2_root, region_classification,
    region_classification_tol, stability_polynomials, IsoscelesAsymptotics, IsoscelesBlocks, IsoscelesParams, Region,
    RegionLabel, T_EQUILATERAL,
};
pub use report::{frequencies, frequencies_at, scaled_energy_momentum, Classification, EquilibriumReport, Frequencies};
pub use scan::{
    general_scan, isosceles_scan, linear_grid, log_grid, region_map, region_map_csv, RegionRow, ScanRow, ScanTable,
    ScanValues, REGION_HEADER, SCAN_HEADER,
};
