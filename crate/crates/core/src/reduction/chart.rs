//! The local symplectic chart `(q, psi, theta; p, p_psi, p_theta)` on the
//! translation-reduced phase space and its cotangent-lifted map to
//! `(x1, x2, y1, y2)`.

use crate::error::{Error, Result};
use crate::linalg::{plane_rotation, plane_rotation_derivative, wedge, Mat4, Mat8, Vec4};
use crate::model::FullState;

/// Chart validity thresholds for `|A|` (relative to `|q|^2`) and for
/// `|cos 2 psi1 - cos 2 psi2|`.
pub const AREA_TOLERANCE: f64 = 1e-12;
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// The four rotation angles of `M = exp(B12 th1) exp(B34 th2) exp(B13 ps1) exp(B24 ps2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RotationAngles {
    pub psi1: f64,
    pub psi2: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl RotationAngles {
    pub fn new(psi1: f64, psi2: f64, theta1: f64, theta2: f64) -> Self {
        Self { psi1, psi2, theta1, theta2 }
    }

    /// `psi1 + psi2`.
    pub fn sigma(&self) -> f64 {
        self.psi1 + self.psi2
    }

    /// `psi1 - psi2`.
    pub fn delta(&self) -> f64 {
        self.psi1 - self.psi2
    }

    /// `cos 2 psi1 - cos 2 psi2 = -2 sin sigma sin delta`.
    pub fn chart_denominator(&self) -> f64 {
        (2.0 * self.psi1).cos() - (2.0 * self.psi2).cos()
    }

    pub fn is_chart_valid(&self) -> bool {
        self.chart_denominator().abs() > ANGLE_TOLERANCE
    }

    pub fn theta_rotation(&self) -> Mat4 {
        plane_rotation(0, 1, self.theta1) * plane_rotation(2, 3, self.theta2)
    }

    pub fn psi_rotation(&self) -> Mat4 {
        plane_rotation(0, 2, self.psi1) * plane_rotation(1, 3, self.psi2)
    }
}

/// `M = M_theta M_psi`.
pub fn rotation_matrix(angles: &RotationAngles) -> Mat4 {
    angles.theta_rotation() * angles.psi_rotation()
}

/// A point of the partially reduced (12 + 4)-dimensional phase space.
///
/// Canonical pairs are `(q_k, p_k)`, `(psi_k, p_psi_k)`, `(theta_k, p_theta_k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialState {
    pub q: [f64; 4],
    pub p: [f64; 4],
    pub angles: RotationAngles,
    pub p_psi: [f64; 2],
    pub p_theta: [f64; 2],
}

impl PartialState {
    /// Oriented area `A = (q1 q4 - q2 q3) / 2`.
    pub fn area(&self) -> f64 {
        oriented_area(&self.q)
    }

    /// `L3 = q1 p2 - q2 p1 + q3 p4 - q4 p3`.
    pub fn l3(&self) -> f64 {
        planar_momentum(&self.q, &self.p)
    }

    /// `Sigma = p_theta1 + p_theta2`.
    pub fn sigma_momentum(&self) -> f64 {
        self.p_theta[0] + self.p_theta[1]
    }

    /// `Delta = p_theta1 - p_theta2`.
    pub fn delta_momentum(&self) -> f64 {
        self.p_theta[0] - self.p_theta[1]
    }

    /// Layout `(q1..q4, psi1, psi2, theta1, theta2, p1..p4, p_psi1, p_psi2, p_theta1, p_theta2)`.
    pub fn to_array(&self) -> [f64; 16] {
        let a = &self.angles;
        [
            self.q[0], self.q[1], self.q[2], self.q[3], a.psi1, a.psi2, a.theta1, a.theta2,
            self.p[0], self.p[1], self.p[2], self.p[3], self.p_psi[0], self.p_psi[1],
            self.p_theta[0], self.p_theta[1],
        ]
    }

    pub fn from_slice(z: &[f64]) -> Self {
        Self {
            q: [z[0], z[1], z[2], z[3]],
            angles: RotationAngles::new(z[4], z[5], z[6], z[7]),
            p: [z[8], z[9], z[10], z[11]],
            p_psi: [z[12], z[13]],
            p_theta: [z[14], z[15]],
        }
    }

    /// Checks `A != 0` and `cos 2 psi1 != cos 2 psi2`.
    pub fn check_chart(&self) -> Result<()> {
        let scale = self.q.iter().map(|v| v * v).sum::<f64>();
        if !(self.area().abs() > AREA_TOLERANCE * scale) {
            return Err(Error::ChartSingular("oriented area A vanishes"));
        }
        if !self.angles.is_chart_valid() {
            return Err(Error::ChartSingular("cos 2 psi1 = cos 2 psi2"));
        }
        Ok(())
    }

    /// The same point of phase space on the other `theta` sheet:
    /// `theta -> theta + pi`, `(q, p) -> (-q, -p)`.
    pub fn other_sheet(&self) -> Self {
        let mut s = *self;
        s.q = self.q.map(|v| -v);
        s.p = self.p.map(|v| -v);
        s.angles.theta1 += std::f64::consts::PI;
        s.angles.theta2 += std::f64::consts::PI;
        s
    }
}

pub fn oriented_area(q: &[f64; 4]) -> f64 {
    0.5 * (q[0] * q[3] - q[1] * q[2])
}

pub fn planar_momentum(q: &[f64; 4], p: &[f64; 4]) -> f64 {
    q[0] * p[1] - q[1] * p[0] + q[2] * p[3] - q[3] * p[2]
}

/// The momentum-dependent pieces of the lift: `B`, `C` and `alpha_1..4`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LiftMomenta {
    pub area: f64,
    pub l3: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: [f64; 4],
}

pub(crate) fn lift_momenta(z: &PartialState) -> Result<LiftMomenta> {
    z.check_chart()?;
    let [q1, q2, q3, q4] = z.q;
    let (ps1, ps2) = (z.angles.psi1, z.angles.psi2);
    let [pt1, pt2] = z.p_theta;
    let [pp1, pp2] = z.p_psi;
    let area = z.area();
    let l3 = z.l3();
    let (s1, c1) = ps1.sin_cos();
    let (s2, c2) = ps2.sin_cos();
    let den = 2.0 * area * z.angles.chart_denominator();
    let b = (l3 * (2.0 * ps1).sin() + 2.0 * (pt1 * s1 * c2 + pt2 * c1 * s2)) / den;
    let c = (l3 * (2.0 * ps2).sin() + 2.0 * (pt1 * c1 * s2 + pt2 * s1 * c2)) / den;
    let k = 0.5 / area;
    let alpha = [
        q3 * b - q4 * pp1 * k,
        -q4 * c + q3 * pp2 * k,
        -q1 * b + q2 * pp1 * k,
        q2 * c - q1 * pp2 * k,
    ];
    Ok(LiftMomenta { area, l3, b, c, alpha })
}

/// Maps a chart point to `(x1, x2, y1, y2)`.
///
/// `x1 = M (q1, q2, 0, 0)`, `x2 = M (q3, q4, 0, 0)`, and the momenta are the
/// cotangent lift `y1 = M (p1, p2, alpha1, alpha2)`, `y2 = M (p3, p4, alpha3, alpha4)`.
pub fn lift_to_full(z: &PartialState) -> Result<FullState> {
    let lm = lift_momenta(z)?;
    let m = rotation_matrix(&z.angles);
    let [q1, q2, q3, q4] = z.q;
    let [p1, p2, p3, p4] = z.p;
    let a = lm.alpha;
    Ok(FullState {
        x1: m * Vec4::new(q1, q2, 0.0, 0.0),
        x2: m * Vec4::new(q3, q4, 0.0, 0.0),
        y1: m * Vec4::new(p1, p2, a[0], a[1]),
        y2: m * Vec4::new(p3, p4, a[2], a[3]),
    })
}

/// Jacobian of `(q, psi, theta) -> (x1, x2)`, rows `(x1, x2)`, columns
/// `(q1..q4, psi1, psi2, theta1, theta2)`.
pub fn configuration_jacobian(q: &[f64; 4], angles: &RotationAngles) -> Mat8 {
    let r12 = plane_rotation(0, 1, angles.theta1);
    let r34 = plane_rotation(2, 3, angles.theta2);
    let r13 = plane_rotation(0, 2, angles.psi1);
    let r24 = plane_rotation(1, 3, angles.psi2);
    let m = r12 * r34 * r13 * r24;
    let d_angle = [
        r12 * r34 * plane_rotation_derivative(0, 2, angles.psi1) * r24,
        r12 * r34 * r13 * plane_rotation_derivative(1, 3, angles.psi2),
        plane_rotation_derivative(0, 1, angles.theta1) * r34 * r13 * r24,
        r12 * plane_rotation_derivative(2, 3, angles.theta2) * r13 * r24,
    ];
    let v12 = Vec4::new(q[0], q[1], 0.0, 0.0);
    let v34 = Vec4::new(q[2], q[3], 0.0, 0.0);
    let mut jac = Mat8::zeros();
    for r in 0..4 {
        jac[(r, 0)] = m[(r, 0)];
        jac[(r, 1)] = m[(r, 1)];
        jac[(4 + r, 2)] = m[(r, 0)];
        jac[(4 + r, 3)] = m[(r, 1)];
    }
    for (k, dm) in d_angle.iter().enumerate() {
        let c1 = dm * v12;
        let c2 = dm * v34;
        for r in 0..4 {
            jac[(r, 4 + k)] = c1[r];
            jac[(4 + r, 4 + k)] = c2[r];
        }
    }
    jac
}

/// `det U = 2 A^2 (cos 2 psi1 - cos 2 psi2)`.
pub fn configuration_jacobian_determinant(q: &[f64; 4], angles: &RotationAngles) -> f64 {
    let a = oriented_area(q);
    2.0 * a * a * angles.chart_denominator()
}

/// Which of the two orientations of the `(x1, x2)` plane the chart frame uses.
/// The frame orientation fixes the sign of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    PositiveArea,
    NegativeArea,
}

/// Inverse chart with `A > 0`, `sin delta > 0`, `sin sigma > 0`.
pub fn project_to_partial(state: &FullState) -> Result<PartialState> {
    project_to_partial_oriented(state, Orientation::PositiveArea)
}

/// Inverse chart: recovers `(q, psi, theta)` from the plane spanned by
/// `x1, x2`, and the new momenta as `p_new = DF^T (y1, y2)`.
///
/// Angles are taken on the strip `delta, sigma in (0, pi)`. When the chart
/// is singular the configuration is still returned in normal form provided
/// the momenta vanish.
pub fn project_to_partial_oriented(state: &FullState, orientation: Orientation) -> Result<PartialState> {
    let s = state.scalar_products();
    let gram = s.s11 * s.s22 - s.s12 * s.s12;
    if !(gram > 1e-24 * s.s11 * s.s22) || !(s.s11 > 0.0) {
        return Err(Error::DegeneratePlane(gram.max(0.0).sqrt()));
    }
    let sign = match orientation {
        Orientation::PositiveArea => 1.0,
        Orientation::NegativeArea => -1.0,
    };
    // unit Pluecker coordinates of the frame m1 ^ m2
    let w = wedge(&state.x1, &state.x2) * (sign / gram.sqrt());
    let p = |i: usize, j: usize| w[(i, j)];
    let cos_delta = (p(0, 1) + p(2, 3)).clamp(-1.0, 1.0);
    let cos_sigma = (p(0, 1) - p(2, 3)).clamp(-1.0, 1.0);
    let delta = cos_delta.acos();
    let sigma = cos_sigma.acos();
    // sin(delta) cos(t1 + t2) = p23 + p14, sin(delta) sin(t1 + t2) = p13 - p24,
    // sin(sigma) cos(t1 - t2) = p23 - p14, sin(sigma) sin(t1 - t2) = p13 + p24
    let atan_or_zero = |y: f64, x: f64| if x.hypot(y) < 1e-12 { 0.0 } else { y.atan2(x) };
    let t_plus = atan_or_zero(p(0, 2) - p(1, 3), p(1, 2) + p(0, 3));
    let t_minus = atan_or_zero(p(0, 2) + p(1, 3), p(1, 2) - p(0, 3));
    let angles = RotationAngles::new(
        0.5 * (sigma + delta),
        0.5 * (sigma - delta),
        0.5 * (t_plus + t_minus),
        0.5 * (t_plus - t_minus),
    );
    let m = rotation_matrix(&angles);
    let (m1, m2) = (m.column(0).into_owned(), m.column(1).into_owned());
    let q = [m1.dot(&state.x1), m2.dot(&state.x1), m1.dot(&state.x2), m2.dot(&state.x2)];

    let y = state.to_array();
    let momenta_vanish = y[8..].iter().all(|v| *v == 0.0);
    if !angles.is_chart_valid() && !momenta_vanish {
        return Err(Error::ChartSingular("cos 2 psi1 = cos 2 psi2"));
    }
    let jac = configuration_jacobian(&q, &angles);
    let mut p_new = [0.0; 8];
    for k in 0..8 {
        p_new[k] = (0..8).map(|r| jac[(r, k)] * y[8 + r]).sum();
    }
    Ok(PartialState {
        q,
        p: [p_new[0], p_new[1], p_new[2], p_new[3]],
        angles,
        p_psi: [p_new[4], p_new[5]],
        p_theta: [p_new[6], p_new[7]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PartialState {
        PartialState {
            q: [1.1, 0.2, -0.3, 0.9],
            p: [0.3, -0.2, 0.5, 0.1],
            angles: RotationAngles::new(0.9, 0.4, 0.3, -1.2),
            p_psi: [0.2, -0.4],
            p_theta: [1.3, 0.5],
        }
    }

    #[test]
    fn zero_angles_give_identity() {
        assert_eq!(rotation_matrix(&RotationAngles::default()), Mat4::identity());
    }

    #[test]
    fn theta_factors_commute() {
        let a = RotationAngles::new(0.0, 0.0, 0.7, -1.9);
        let swapped = plane_rotation(2, 3, a.theta2) * plane_rotation(0, 1, a.theta1);
        assert!((a.theta_rotation() - swapped).amax() < 1e-14);
        let b = RotationAngles::new(0.3, 1.1, 0.0, 0.0);
        let swapped = plane_rotation(1, 3, b.psi2) * plane_rotation(0, 2, b.psi1);
        assert!((b.psi_rotation() - swapped).amax() < 1e-14);
    }

    #[test]
    fn rotation_is_special_orthogonal() {
        let m = rotation_matrix(&sample().angles);
        assert!((m.transpose() * m - Mat4::identity()).amax() < 1e-13);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_momenta_lift() {
        let mut z = sample();
        z.p = [0.0; 4];
        z.p_psi = [0.0; 2];
        z.p_theta = [0.0; 2];
        let f = lift_to_full(&z).unwrap();
        assert_eq!(f.y1, Vec4::zeros());
        assert_eq!(f.y2, Vec4::zeros());
        let m = rotation_matrix(&z.angles);
        assert!((f.x1 - m * Vec4::new(z.q[0], z.q[1], 0.0, 0.0)).amax() < 1e-15);
        assert!((f.x2 - m * Vec4::new(z.q[2], z.q[3], 0.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn lift_rejects_singular_chart() {
        let mut z = sample();
        z.q = [1.0, 2.0, 2.0, 4.0];
        assert!(matches!(lift_to_full(&z), Err(Error::ChartSingular(_))));
        let mut z = sample();
        z.angles.psi2 = z.angles.psi1;
        assert!(matches!(lift_to_full(&z), Err(Error::ChartSingular(_))));
        z.angles.psi2 = -z.angles.psi1;
        assert!(matches!(lift_to_full(&z), Err(Error::ChartSingular(_))));
    }

    #[test]
    fn jacobian_matches_differences() {
        let z = sample();
        let jac = configuration_jacobian(&z.q, &z.angles);
        let h = 1e-6;
        let config = |v: &[f64; 8]| {
            let a = RotationAngles::new(v[4], v[5], v[6], v[7]);
            let m = rotation_matrix(&a);
            let x1 = m * Vec4::new(v[0], v[1], 0.0, 0.0);
            let x2 = m * Vec4::new(v[2], v[3], 0.0, 0.0);
            [x1[0], x1[1], x1[2], x1[3], x2[0], x2[1], x2[2], x2[3]]
        };
        let arr = z.to_array();
        let mut base = [0.0; 8];
        base.copy_from_slice(&arr[..8]);
        for k in 0..8 {
            let (mut a, mut b) = (base, base);
            a[k] += h;
            b[k] -= h;
            let (fa, fb) = (config(&a), config(&b));
            for r in 0..8 {
                assert!(((fa[r] - fb[r]) / (2.0 * h) - jac[(r, k)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn determinant_of_configuration_jacobian() {
        let z = sample();
        let det = configuration_jacobian(&z.q, &z.angles).determinant();
        let closed = configuration_jacobian_determinant(&z.q, &z.angles);
        assert!(((det - closed) / closed).abs() < 1e-10, "{det} {closed}");
    }

    #[test]
    fn projection_round_trip() {
        let z = sample();
        let f = lift_to_full(&z).unwrap();
        let back = project_to_partial(&f).unwrap();
        let g = lift_to_full(&back).unwrap();
        let err = (0..16).map(|k| (f.to_array()[k] - g.to_array()[k]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        // same chart point up to the theta sheet
        let a = back.to_array();
        let b = back.other_sheet().to_array();
        let zz = z.to_array();
        let d = |x: &[f64; 16]| (0..16).filter(|k| *k != 6 && *k != 7).map(|k| (x[k] - zz[k]).abs()).fold(0.0, f64::max);
        assert!(d(&a).min(d(&b)) < 1e-10);
    }

    #[test]
    fn normal_form_projection() {
        let state = FullState {
            x1: Vec4::new(1.5, 0.0, 0.0, 0.0),
            x2: Vec4::new(0.0, 0.7, 0.0, 0.0),
            ..FullState::zeros()
        };
        let z = project_to_partial(&state).unwrap();
        assert_eq!(z.angles, RotationAngles::default());
        assert!((z.q[0] - 1.5).abs() < 1e-15 && (z.q[3] - 0.7).abs() < 1e-15);
        assert!(z.q[1].abs() < 1e-15 && z.q[2].abs() < 1e-15);
        assert!(z.p.iter().chain(&z.p_psi).chain(&z.p_theta).all(|v| *v == 0.0));
    }

    #[test]
    fn collinear_projection_fails() {
        let x1 = Vec4::new(0.3, -0.2, 0.5, 1.0);
        let state = FullState { x1, x2: x1 * 2.0, ..FullState::zeros() };
        assert!(matches!(project_to_partial(&state), Err(Error::DegeneratePlane(_))));
    }

    #[test]
    fn negative_orientation() {
        let mut z = sample();
        z.q = [0.2, 1.1, 0.9, -0.3];
        assert!(z.area() < 0.0);
        let f = lift_to_full(&z).unwrap();
        let back = project_to_partial_oriented(&f, Orientation::NegativeArea).unwrap();
        assert!(back.area() < 0.0);
        let g = lift_to_full(&back).unwrap();
        let e = f.to_array().iter().zip(g.to_array()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(e < 1e-10);
    }
}
