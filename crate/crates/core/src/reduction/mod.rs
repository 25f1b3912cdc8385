//! Rotation reduction: the chart on the translation-reduced phase space, the
//! partially reduced Hamiltonian, the invariant set and the fully reduced
//! Hamiltonian.

mod chart;
mod partial;
mod reduced;

pub use chart::{
    configuration_jacobian, configuration_jacobian_determinant, lift_to_full, oriented_area,
    planar_momentum, project_to_partial, project_to_partial_oriented, rotation_matrix, Orientation,
    PartialState, RotationAngles, ANGLE_TOLERANCE, AREA_TOLERANCE,
};
pub use partial::{
    angular_momentum_partial, hamiltonian_partial, invariant_set_residual, kinetic_f_tilde,
    momentum_constraints, restriction_determinant_formula, restriction_matrix_a, restriction_matrix_numeric,
    RestrictionMatrix,
};
pub use reduced::{
    embed_reduced, embed_reduced_at, hamiltonian_reduced, kinetic_f, kinetic_f_taylor, KineticWeights,
    validate_momenta, ReducedState,
};

use crate::error::Result;
use crate::linalg::Mat16;

/// Numerical Jacobian of [`lift_to_full`] in the layouts of
/// [`PartialState::to_array`] and [`crate::model::FullState::to_array`],
/// by the fourth-order central stencil with step `h`.
pub fn lift_jacobian(z: &PartialState, h: f64) -> Result<Mat16> {
    let base = z.to_array();
    let mut jac = Mat16::zeros();
    let eval = |k: usize, step: f64| {
        let mut a = base;
        a[k] += step;
        lift_to_full(&PartialState::from_slice(&a)).map(|f| f.to_array())
    };
    for k in 0..16 {
        let (f2, f1, b1, b2) = (eval(k, 2.0 * h)?, eval(k, h)?, eval(k, -h)?, eval(k, -2.0 * h)?);
        for r in 0..16 {
            jac[(r, k)] = (-f2[r] + 8.0 * f1[r] - 8.0 * b1[r] + b2[r]) / (12.0 * h);
        }
    }
    Ok(jac)
}

/// `max |D^T J D - J|` for the lift Jacobian `D` at `z`.
pub fn symplecticity_defect(z: &PartialState) -> Result<f64> {
    let d = lift_jacobian(z, 3e-4)?;
    let mut j = Mat16::zeros();
    for k in 0..8 {
        j[(k, 8 + k)] = 1.0;
        j[(8 + k, k)] = -1.0;
    }
    Ok((d.transpose() * j * d - j).amax())
}
