//! The partially reduced Hamiltonian on the chart, the body-frame angular
//! momentum and the constraints cutting out the invariant set.

use crate::error::{Error, Result};
use crate::linalg::{plane_generator, Mat4};
use crate::model::{shape_gradient, AngularMomentum, MassTriple, ScalarProducts, ScalarPotential, ThreeBody};

use super::chart::{lift_momenta, PartialState};

/// Threshold on `|sin sigma|`, `|sin delta|` for the body-frame formulas.
const SINE_TOLERANCE: f64 = 1e-12;

/// The two chart kinetic terms `(alpha1^2 + alpha2^2, alpha3^2 + alpha4^2)`,
/// i.e. `f~(q3, q4)` and `f~(q1, q2)`.
pub fn kinetic_f_tilde(z: &PartialState) -> Result<(f64, f64)> {
    let a = lift_momenta(z)?.alpha;
    Ok((a[0] * a[0] + a[1] * a[1], a[2] * a[2] + a[3] * a[3]))
}

impl<P: ScalarPotential> ThreeBody<P> {
    /// `(p1^2 + p2^2 + f~(q3,q4))/(2 nu1) + (p3^2 + p4^2 + f~(q1,q2))/(2 nu2) + V`.
    pub fn hamiltonian_partial(&self, z: &PartialState) -> Result<f64> {
        let (f34, f12) = kinetic_f_tilde(z)?;
        let [p1, p2, p3, p4] = z.p;
        let v = self.shape_potential(&z.q)?;
        Ok((p1 * p1 + p2 * p2 + f34) / (2.0 * self.masses.nu1())
            + (p3 * p3 + p4 * p4 + f12) / (2.0 * self.masses.nu2())
            + v)
    }

    /// Analytic gradient of [`Self::hamiltonian_partial`] in the layout of
    /// [`PartialState::to_array`].
    pub fn gradient_partial(&self, z: &PartialState) -> Result<[f64; 16]> {
        let lm = lift_momenta(z)?;
        let [q1, q2, q3, q4] = z.q;
        let [p1, p2, p3, p4] = z.p;
        let (ps1, ps2) = (z.angles.psi1, z.angles.psi2);
        let [pt1, pt2] = z.p_theta;
        let [pp1, pp2] = z.p_psi;
        let (s1, c1) = ps1.sin_cos();
        let (s2, c2) = ps2.sin_cos();
        let (area, l3, b, c) = (lm.area, lm.l3, lm.b, lm.c);
        let den_d = z.angles.chart_denominator();

        let e = |k: usize| {
            let mut v = [0.0; 16];
            v[k] = 1.0;
            v
        };
        let axpy = |acc: &mut [f64; 16], s: f64, x: &[f64; 16]| {
            for k in 0..16 {
                acc[k] += s * x[k];
            }
        };

        let mut d_area = [0.0; 16];
        d_area[0] = 0.5 * q4;
        d_area[1] = -0.5 * q3;
        d_area[2] = -0.5 * q2;
        d_area[3] = 0.5 * q1;
        let mut d_l3 = [0.0; 16];
        d_l3[0] = p2;
        d_l3[1] = -p1;
        d_l3[2] = p4;
        d_l3[3] = -p3;
        d_l3[8] = -q2;
        d_l3[9] = q1;
        d_l3[10] = -q4;
        d_l3[11] = q3;
        let mut d_den = [0.0; 16];
        d_den[4] = -2.0 * (2.0 * ps1).sin();
        d_den[5] = 2.0 * (2.0 * ps2).sin();

        let cross = pt1 * c1 * c2 - pt2 * s1 * s2;
        let skew = -pt1 * s1 * s2 + pt2 * c1 * c2;
        let mut d_nb = [0.0; 16];
        axpy(&mut d_nb, (2.0 * ps1).sin(), &d_l3);
        d_nb[4] += 2.0 * l3 * (2.0 * ps1).cos() + 2.0 * cross;
        d_nb[5] += 2.0 * skew;
        d_nb[14] += 2.0 * s1 * c2;
        d_nb[15] += 2.0 * c1 * s2;
        let mut d_nc = [0.0; 16];
        axpy(&mut d_nc, (2.0 * ps2).sin(), &d_l3);
        d_nc[4] += 2.0 * skew;
        d_nc[5] += 2.0 * l3 * (2.0 * ps2).cos() + 2.0 * cross;
        d_nc[14] += 2.0 * c1 * s2;
        d_nc[15] += 2.0 * s1 * c2;

        // B = nB / (2 A D): dB = dnB / (2 A D) - B (dA / A + dD / D)
        let inv = 1.0 / (2.0 * area * den_d);
        let quotient = |dn: &[f64; 16], val: f64| {
            let mut d = [0.0; 16];
            for k in 0..16 {
                d[k] = dn[k] * inv - val * (d_area[k] / area + d_den[k] / den_d);
            }
            d
        };
        let d_b = quotient(&d_nb, b);
        let d_c = quotient(&d_nc, c);
        let k = 0.5 / area;
        let d_k = d_area.map(|v| -k * v / area);

        let mut d_alpha = [[0.0; 16]; 4];
        // alpha1 = q3 B - q4 pp1 k
        axpy(&mut d_alpha[0], q3, &d_b);
        axpy(&mut d_alpha[0], b, &e(2));
        axpy(&mut d_alpha[0], -pp1 * q4, &d_k);
        axpy(&mut d_alpha[0], -pp1 * k, &e(3));
        axpy(&mut d_alpha[0], -q4 * k, &e(12));
        // alpha2 = -q4 C + q3 pp2 k
        axpy(&mut d_alpha[1], -q4, &d_c);
        axpy(&mut d_alpha[1], -c, &e(3));
        axpy(&mut d_alpha[1], pp2 * q3, &d_k);
        axpy(&mut d_alpha[1], pp2 * k, &e(2));
        axpy(&mut d_alpha[1], q3 * k, &e(13));
        // alpha3 = -q1 B + q2 pp1 k
        axpy(&mut d_alpha[2], -q1, &d_b);
        axpy(&mut d_alpha[2], -b, &e(0));
        axpy(&mut d_alpha[2], pp1 * q2, &d_k);
        axpy(&mut d_alpha[2], pp1 * k, &e(1));
        axpy(&mut d_alpha[2], q2 * k, &e(12));
        // alpha4 = q2 C - q1 pp2 k
        axpy(&mut d_alpha[3], q2, &d_c);
        axpy(&mut d_alpha[3], c, &e(1));
        axpy(&mut d_alpha[3], -pp2 * q1, &d_k);
        axpy(&mut d_alpha[3], -pp2 * k, &e(0));
        axpy(&mut d_alpha[3], -q1 * k, &e(13));

        let (w1, w2) = (1.0 / self.masses.nu1(), 1.0 / self.masses.nu2());
        let weights = [w1, w1, w2, w2];
        let mut grad = [0.0; 16];
        for j in 0..4 {
            axpy(&mut grad, weights[j] * lm.alpha[j], &d_alpha[j]);
        }
        grad[8] += p1 * w1;
        grad[9] += p2 * w1;
        grad[10] += p3 * w2;
        grad[11] += p4 * w2;
        let vg = self.potential.gradient(&ScalarProducts::from_shape(&z.q))?;
        let gq = shape_gradient(&z.q, vg);
        for i in 0..4 {
            grad[i] += gq[i];
        }
        Ok(grad)
    }
}

pub fn hamiltonian_partial(masses: &MassTriple, z: &PartialState) -> Result<f64> {
    ThreeBody::newtonian(*masses).hamiltonian_partial(z)
}

/// `(sin sigma, sin delta)` or `ChartSingular` when either vanishes.
fn body_frame_sines(z: &PartialState) -> Result<(f64, f64)> {
    let ss = z.angles.sigma().sin();
    let sd = z.angles.delta().sin();
    if !(ss.abs() > SINE_TOLERANCE) || !(sd.abs() > SINE_TOLERANCE) {
        return Err(Error::ChartSingular("sin sigma or sin delta vanishes"));
    }
    Ok((ss, sd))
}

/// Coefficients `(l23, l14)` of `B23`, `B14` in `M_theta^T L M_theta`.
fn off_plane_components(z: &PartialState) -> Result<(f64, f64)> {
    let (ss, sd) = body_frame_sines(z)?;
    let l3 = z.l3();
    let u1 = l3 + z.sigma_momentum() * z.angles.delta().cos();
    let u2 = l3 + z.delta_momentum() * z.angles.sigma().cos();
    let x = u1 / sd;
    let y = u2 / ss;
    Ok((0.5 * (x + y), 0.5 * (x - y)))
}

/// Angular momentum in the frame rotated by `M_theta`:
///
/// `M_theta^T L M_theta = -p_th1 B12 - p_th2 B34 - p_ps1 B13 - p_ps2 B24 + l23 B23 + l14 B14`
///
/// with `l23 = u1/(2 sin delta) + u2/(2 sin sigma)`, `l14 = u1/(2 sin delta) - u2/(2 sin sigma)`,
/// `u1 = L3 + Sigma cos delta`, `u2 = L3 + Delta cos sigma`.
pub fn angular_momentum_partial(z: &PartialState) -> Result<AngularMomentum> {
    let (l23, l14) = off_plane_components(z)?;
    let b = plane_generator;
    let m: Mat4 = -b(0, 1) * z.p_theta[0] - b(2, 3) * z.p_theta[1] - b(0, 2) * z.p_psi[0]
        - b(1, 3) * z.p_psi[1]
        + b(1, 2) * l23
        + b(0, 3) * l14;
    Ok(AngularMomentum::from_matrix(m))
}

/// `(c1, c2, c3, c4) = (p_psi1, p_psi2, Sigma cos delta + L3, Delta cos sigma + L3)`
/// with `Sigma = mu1 + mu2`, `Delta = mu1 - mu2`.
pub fn invariant_set_residual(z: &PartialState, mu1: f64, mu2: f64) -> [f64; 4] {
    let l3 = z.l3();
    [
        z.p_psi[0],
        z.p_psi[1],
        (mu1 + mu2) * z.angles.delta().cos() + l3,
        (mu1 - mu2) * z.angles.sigma().cos() + l3,
    ]
}

/// The constraint functions `(p_psi1, p_psi2, l23, l14)` whose common zero
/// set (at `p_theta = (mu1, mu2)`) is the invariant set.
pub fn momentum_constraints(z: &PartialState) -> Result<[f64; 4]> {
    let (l23, l14) = off_plane_components(z)?;
    Ok([z.p_psi[0], z.p_psi[1], l23, l14])
}

/// Matrix of Poisson brackets `{c_i, c_j}` of [`momentum_constraints`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionMatrix {
    pub matrix: Mat4,
    pub determinant: f64,
}

/// Brackets of `(p_psi1, p_psi2, l23, l14)`.
///
/// With `X = (Sigma + L3 cos delta)/sin^2 delta` and
/// `Y = (Delta + L3 cos sigma)/sin^2 sigma` the only non-zero brackets are
/// `{p_psi_k, l}` and the determinant is `X^2 Y^2`.
pub fn restriction_matrix_a(z: &PartialState) -> Result<RestrictionMatrix> {
    z.check_chart()?;
    let (ss, sd) = body_frame_sines(z)?;
    let l3 = z.l3();
    let x = (z.sigma_momentum() + l3 * z.angles.delta().cos()) / (sd * sd);
    let y = (z.delta_momentum() + l3 * z.angles.sigma().cos()) / (ss * ss);
    let (a, b) = (0.5 * (x + y), 0.5 * (x - y));
    let (c, d) = (0.5 * (y - x), -0.5 * (x + y));
    #[rustfmt::skip]
    let matrix = Mat4::new(
        0.0, 0.0, a, b,
        0.0, 0.0, c, d,
        -a, -c, 0.0, 0.0,
        -b, -d, 0.0, 0.0,
    );
    Ok(RestrictionMatrix { matrix, determinant: matrix.determinant() })
}

/// Brackets of [`momentum_constraints`] from fourth-order central
/// differences with step `h`, independent of the closed form.
pub fn restriction_matrix_numeric(z: &PartialState, h: f64) -> Result<RestrictionMatrix> {
    z.check_chart()?;
    // {f, g} = sum_k df/dQ_k dg/dP_k - df/dP_k dg/dQ_k
    let base = z.to_array();
    let eval = |k: usize, step: f64| {
        let mut a = base;
        a[k] += step;
        momentum_constraints(&PartialState::from_slice(&a))
    };
    let mut grads = [[0.0; 16]; 4];
    for k in 0..16 {
        let (f2, f1, b1, b2) = (eval(k, 2.0 * h)?, eval(k, h)?, eval(k, -h)?, eval(k, -2.0 * h)?);
        for i in 0..4 {
            grads[i][k] = (-f2[i] + 8.0 * f1[i] - 8.0 * b1[i] + b2[i]) / (12.0 * h);
        }
    }
    let matrix = Mat4::from_fn(|i, j| {
        (0..8).map(|k| grads[i][k] * grads[j][8 + k] - grads[i][8 + k] * grads[j][k]).sum()
    });
    Ok(RestrictionMatrix { matrix, determinant: matrix.determinant() })
}

/// Closed form `[(Sigma + L3 cos delta)(Delta + L3 cos sigma)]^2 / (sin^4 sigma sin^4 delta)`.
pub fn restriction_determinant_formula(z: &PartialState) -> f64 {
    let l3 = z.l3();
    let (ss, sd) = (z.angles.sigma().sin(), z.angles.delta().sin());
    let num = (z.sigma_momentum() + l3 * z.angles.delta().cos())
        * (z.delta_momentum() + l3 * z.angles.sigma().cos());
    num * num / (ss.powi(4) * sd.powi(4))
}
