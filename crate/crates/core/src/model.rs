//! Masses, Jacobi coordinates and the translation-reduced Hamiltonian.
//!
//! After removing the centre of mass the configuration is described by two
//! Jacobi vectors `x1 = r2 - r3` and `x2 = r1 - (m2 r2 + m3 r3)/(m2 + m3)`
//! with conjugate momenta `y1 = nu1 * dx1/dt`, `y2 = nu2 * dx2/dt`. The
//! potential only sees the scalar products `x_i . x_j`, which is what makes
//! the rotation reduction possible for any distance-dependent interaction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pfaffian, spectral_pair, wedge, Mat4, Vec4};

/// Squared distances at or below this value are treated as collisions.
pub const COLLISION_TOLERANCE: f64 = 1e-24;

/// Three positive point masses, gravitational constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassTriple {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MassTriple {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        for (name, m) in [("m1", m1), ("m2", m2), ("m3", m3)] {
            if !(m > 0.0) || !m.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {m}")));
            }
        }
        Ok(Self { m1, m2, m3 })
    }

    pub fn equal() -> Self {
        Self { m1: 1.0, m2: 1.0, m3: 1.0 }
    }

    /// Two equal masses `m2 = m3 = 1` and `m1 = n`.
    pub fn isosceles(n: f64) -> Result<Self> {
        Self::new(n, 1.0, 1.0)
    }

    /// Reduced mass of the `x1` pair, `m2 m3 / (m2 + m3)`.
    pub fn nu1(&self) -> f64 {
        self.m2 * self.m3 / (self.m2 + self.m3)
    }

    /// Reduced mass of `m1` against the pair, `m1 (m2 + m3) / M`.
    pub fn nu2(&self) -> f64 {
        self.m1 * (self.m2 + self.m3) / self.total()
    }

    pub fn a2(&self) -> f64 {
        self.m2 / (self.m2 + self.m3)
    }

    pub fn a3(&self) -> f64 {
        self.m3 / (self.m2 + self.m3)
    }

    pub fn total(&self) -> f64 {
        self.m1 + self.m2 + self.m3
    }

    /// `m1 / m` when `m2 = m3 = m`.
    pub fn isosceles_ratio(&self) -> Option<f64> {
        (self.m2 == self.m3).then(|| self.m1 / self.m2)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }

    /// Relabels the bodies so that bodies `i` and `j` (1-based) form the
    /// `x1` pair. The remaining body becomes body 1.
    pub fn with_binary(&self, i: usize, j: usize) -> Result<Self> {
        let m = self.as_array();
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
            return Err(Error::InvalidParameter(format!("invalid binary pair ({i}, {j})")));
        }
        let k = 6 - i - j;
        Self::new(m[k - 1], m[i - 1], m[j - 1])
    }
}

/// Translation-reduced phase point `(x1, x2, y1, y2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState {
    pub x1: Vec4,
    pub x2: Vec4,
    pub y1: Vec4,
    pub y2: Vec4,
}

impl FullState {
    pub fn zeros() -> Self {
        Self { x1: Vec4::zeros(), x2: Vec4::zeros(), y1: Vec4::zeros(), y2: Vec4::zeros() }
    }

    /// Flat layout `(x1, x2, y1, y2)`: positions first, then momenta.
    pub fn to_array(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for k in 0..4 {
            out[k] = self.x1[k];
            out[4 + k] = self.x2[k];
            out[8 + k] = self.y1[k];
            out[12 + k] = self.y2[k];
        }
        out
    }

    pub fn from_slice(z: &[f64]) -> Self {
        let v = |o: usize| Vec4::new(z[o], z[o + 1], z[o + 2], z[o + 3]);
        Self { x1: v(0), x2: v(4), y1: v(8), y2: v(12) }
    }

    /// Applies the same rotation to all four vectors.
    pub fn rotated(&self, m: &Mat4) -> Self {
        Self { x1: m * self.x1, x2: m * self.x2, y1: m * self.y1, y2: m * self.y2 }
    }

    /// Kepler scaling `r -> s r`, `t -> s^{3/2} t`: momenta scale by `s^{-1/2}`
    /// and the energy by `1/s`.
    pub fn scaled(&self, s: f64) -> Self {
        let k = s.powf(-0.5);
        Self { x1: self.x1 * s, x2: self.x2 * s, y1: self.y1 * k, y2: self.y2 * k }
    }

    pub fn scalar_products(&self) -> ScalarProducts {
        ScalarProducts {
            s11: self.x1.norm_squared(),
            s22: self.x2.norm_squared(),
            s12: self.x1.dot(&self.x2),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// `(|x1|^2, |x2|^2, x1 . x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarProducts {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
}

impl ScalarProducts {
    /// Scalar products of `x1 = (q1, q2, 0, 0)`, `x2 = (q3, q4, 0, 0)`.
    pub fn from_shape(q: &[f64; 4]) -> Self {
        Self {
            s11: q[0] * q[0] + q[1] * q[1],
            s22: q[2] * q[2] + q[3] * q[3],
            s12: q[0] * q[2] + q[1] * q[3],
        }
    }

    /// Squared mutual distances `(|r2-r3|^2, |r3-r1|^2, |r1-r2|^2)`.
    pub fn squared_distances(&self, masses: &MassTriple) -> [f64; 3] {
        let (a2, a3) = (masses.a2(), masses.a3());
        [
            self.s11,
            a2 * a2 * self.s11 + 2.0 * a2 * self.s12 + self.s22,
            a3 * a3 * self.s11 - 2.0 * a3 * self.s12 + self.s22,
        ]
    }
}

/// A pair potential expressed through the Jacobi scalar products.
///
/// The reduction never looks inside the potential, so any interaction that
/// depends on mutual distances only can be plugged in here.
pub trait ScalarPotential: Send + Sync {
    fn value(&self, s: &ScalarProducts) -> Result<f64>;
    /// `(dV/ds11, dV/ds22, dV/ds12)`.
    fn gradient(&self, s: &ScalarProducts) -> Result<[f64; 3]>;
    fn hessian(&self, s: &ScalarProducts) -> Result<[[f64; 3]; 3]>;
}

/// `V = -m2 m3 / d1 - m3 m1 / d2 - m1 m2 / d3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Newtonian {
    masses: MassTriple,
}

impl Newtonian {
    pub fn new(masses: MassTriple) -> Self {
        Self { masses }
    }

    /// Pair strengths and the coefficients of `d_k^2` in `(s11, s22, s12)`.
    fn pairs(&self, s: &ScalarProducts) -> Result<[(f64, f64, [f64; 3]); 3]> {
        let m = &self.masses;
        let (a2, a3) = (m.a2(), m.a3());
        let d2 = s.squared_distances(m);
        const NAMES: [&str; 3] = ["(2,3)", "(3,1)", "(1,2)"];
        for (k, d) in d2.iter().enumerate() {
            if !(*d > COLLISION_TOLERANCE) {
                return Err(Error::Collision { pair: NAMES[k], dist2: *d });
            }
        }
        Ok([
            (m.m2 * m.m3, d2[0], [1.0, 0.0, 0.0]),
            (m.m3 * m.m1, d2[1], [a2 * a2, 1.0, 2.0 * a2]),
            (m.m1 * m.m2, d2[2], [a3 * a3, 1.0, -2.0 * a3]),
        ])
    }
}

impl ScalarPotential for Newtonian {
    fn value(&self, s: &ScalarProducts) -> Result<f64> {
        Ok(self.pairs(s)?.iter().map(|(k, d2, _)| -k / d2.sqrt()).sum())
    }

    fn gradient(&self, s: &ScalarProducts) -> Result<[f64; 3]> {
        let mut g = [0.0; 3];
        for (k, d2, e) in self.pairs(s)? {
            let w = 0.5 * k / (d2 * d2.sqrt());
            for i in 0..3 {
                g[i] += w * e[i];
            }
        }
        Ok(g)
    }

    fn hessian(&self, s: &ScalarProducts) -> Result<[[f64; 3]; 3]> {
        let mut h = [[0.0; 3]; 3];
        for (k, d2, e) in self.pairs(s)? {
            let w = -0.75 * k / (d2 * d2 * d2.sqrt());
            for i in 0..3 {
                for j in 0..3 {
                    h[i][j] += w * e[i] * e[j];
                }
            }
        }
        Ok(h)
    }
}

/// Value and `(V1, V2, V3)` of the Newtonian potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialEval {
    pub value: f64,
    pub gradient: [f64; 3],
}

pub fn newtonian_potential(masses: &MassTriple, s: &ScalarProducts) -> Result<PotentialEval> {
    let v = Newtonian::new(*masses);
    Ok(PotentialEval { value: v.value(s)?, gradient: v.gradient(s)? })
}

/// Jacobi decomposition of three bodies including the dropped centre-of-mass
/// part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiDecomposition {
    pub state: FullState,
    /// `x3`, the centre of mass.
    pub center_of_mass: Vec4,
    /// `y3`, the total linear momentum.
    pub total_momentum: Vec4,
}

impl JacobiDecomposition {
    /// True when `x3` and `y3` vanish, i.e. the input was already in the
    /// centre-of-mass frame.
    pub fn in_center_of_mass_frame(&self, tol: f64) -> bool {
        self.center_of_mass.amax() <= tol && self.total_momentum.amax() <= tol
    }
}

/// Jacobi vectors and conjugate momenta from body positions and velocities.
pub fn jacobi_from_positions(masses: &MassTriple, r: [Vec4; 3], v: [Vec4; 3]) -> JacobiDecomposition {
    let (m1, m2, m3) = (masses.m1, masses.m2, masses.m3);
    let pair = m2 + m3;
    let total = masses.total();
    let x1 = r[1] - r[2];
    let x2 = r[0] - (r[1] * m2 + r[2] * m3) / pair;
    let x3 = (r[0] * m1 + r[1] * m2 + r[2] * m3) / total;
    let y1 = (v[1] - v[2]) * masses.nu1();
    let y2 = (v[0] - (v[1] * m2 + v[2] * m3) / pair) * masses.nu2();
    let y3 = v[0] * m1 + v[1] * m2 + v[2] * m3;
    JacobiDecomposition {
        state: FullState { x1, x2, y1, y2 },
        center_of_mass: x3,
        total_momentum: y3,
    }
}

/// Inverse of [`jacobi_from_positions`] in the centre-of-mass frame:
/// returns body positions and velocities.
pub fn bodies_from_jacobi(masses: &MassTriple, state: &FullState) -> ([Vec4; 3], [Vec4; 3]) {
    let total = masses.total();
    let (a2, a3) = (masses.a2(), masses.a3());
    let w1 = (masses.m2 + masses.m3) / total;
    let w2 = masses.m1 / total;
    let place = |x1: Vec4, x2: Vec4| [x2 * w1, x1 * a3 - x2 * w2, -x1 * a2 - x2 * w2];
    let r = place(state.x1, state.x2);
    let v = place(state.y1 / masses.nu1(), state.y2 / masses.nu2());
    (r, v)
}

/// The translation-reduced three-body system with an arbitrary scalar-product
/// potential.
#[derive(Debug, Clone, Copy)]
pub struct ThreeBody<P = Newtonian> {
    pub masses: MassTriple,
    pub potential: P,
}

impl ThreeBody<Newtonian> {
    pub fn newtonian(masses: MassTriple) -> Self {
        Self { masses, potential: Newtonian::new(masses) }
    }
}

impl<P: ScalarPotential> ThreeBody<P> {
    pub fn with_potential(masses: MassTriple, potential: P) -> Self {
        Self { masses, potential }
    }

    /// `|y1|^2/(2 nu1) + |y2|^2/(2 nu2) + V`.
    pub fn hamiltonian_full(&self, state: &FullState) -> Result<f64> {
        let kin = state.y1.norm_squared() / (2.0 * self.masses.nu1())
            + state.y2.norm_squared() / (2.0 * self.masses.nu2());
        Ok(kin + self.potential.value(&state.scalar_products())?)
    }

    /// `(dH/dx1, dH/dx2, dH/dy1, dH/dy2)`.
    pub fn gradient_full(&self, state: &FullState) -> Result<[f64; 16]> {
        let [v1, v2, v3] = self.potential.gradient(&state.scalar_products())?;
        let gx1 = state.x1 * (2.0 * v1) + state.x2 * v3;
        let gx2 = state.x2 * (2.0 * v2) + state.x1 * v3;
        let gy1 = state.y1 / self.masses.nu1();
        let gy2 = state.y2 / self.masses.nu2();
        Ok(FullState { x1: gx1, x2: gx2, y1: gy1, y2: gy2 }.to_array())
    }

    /// Potential as a function of the planar shape `q`.
    pub fn shape_potential(&self, q: &[f64; 4]) -> Result<f64> {
        self.potential.value(&ScalarProducts::from_shape(q))
    }

    /// Gradient of the potential with respect to `q`:
    /// `(2 q1 V1 + q3 V3, 2 q2 V1 + q4 V3, 2 q3 V2 + q1 V3, 2 q4 V2 + q2 V3)`.
    pub fn shape_potential_gradient(&self, q: &[f64; 4]) -> Result<[f64; 4]> {
        let [v1, v2, v3] = self.potential.gradient(&ScalarProducts::from_shape(q))?;
        Ok(shape_gradient(q, [v1, v2, v3]))
    }

    /// Hessian of the potential with respect to `q`.
    pub fn shape_potential_hessian(&self, q: &[f64; 4]) -> Result<[[f64; 4]; 4]> {
        let s = ScalarProducts::from_shape(q);
        let g = self.potential.gradient(&s)?;
        let h = self.potential.hessian(&s)?;
        // ds_k/dq_i
        let jac = [
            [2.0 * q[0], 2.0 * q[1], 0.0, 0.0],
            [0.0, 0.0, 2.0 * q[2], 2.0 * q[3]],
            [q[2], q[3], q[0], q[1]],
        ];
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        acc += jac[a][i] * h[a][b] * jac[b][j];
                    }
                }
                out[i][j] = acc;
            }
        }
        for k in 0..2 {
            out[k][k] += 2.0 * g[0];
            out[2 + k][2 + k] += 2.0 * g[1];
            out[k][2 + k] += g[2];
            out[2 + k][k] += g[2];
        }
        Ok(out)
    }
}

pub(crate) fn shape_gradient(q: &[f64; 4], [v1, v2, v3]: [f64; 3]) -> [f64; 4] {
    [
        2.0 * q[0] * v1 + q[2] * v3,
        2.0 * q[1] * v1 + q[3] * v3,
        2.0 * q[2] * v2 + q[0] * v3,
        2.0 * q[3] * v2 + q[1] * v3,
    ]
}

pub fn hamiltonian_full(masses: &MassTriple, state: &FullState) -> Result<f64> {
    ThreeBody::newtonian(*masses).hamiltonian_full(state)
}

/// The angular momentum tensor and its invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularMomentum {
    pub matrix: Mat4,
    pub mu1: f64,
    pub mu2: f64,
    pub pfaffian: f64,
    pub trace_sq: f64,
}

impl AngularMomentum {
    pub fn from_matrix(matrix: Mat4) -> Self {
        let pf = pfaffian(&matrix);
        let trace_sq = (matrix * matrix).trace();
        let (mu1, mu2) = spectral_pair(trace_sq, pf);
        Self { matrix, mu1, mu2, pfaffian: pf, trace_sq }
    }

    /// Largest deviation from antisymmetry.
    pub fn antisymmetry_defect(&self) -> f64 {
        (self.matrix + self.matrix.transpose()).amax()
    }
}

/// `L = x1 ^ y1 + x2 ^ y2`.
pub fn angular_momentum(state: &FullState) -> AngularMomentum {
    AngularMomentum::from_matrix(wedge(&state.x1, &state.y1) + wedge(&state.x2, &state.y2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(k: usize) -> Vec4 {
        let mut v = Vec4::zeros();
        v[k] = 1.0;
        v
    }

    #[test]
    fn reduced_masses() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        assert!((m.nu1() - 1.2).abs() < 1e-15);
        assert!((m.nu2() - 5.0 / 6.0).abs() < 1e-15);
        assert!((m.a2() + m.a3() - 1.0).abs() < 1e-15);
        assert!(MassTriple::new(1.0, 0.0, 1.0).is_err());
        assert!(MassTriple::new(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn binary_relabelling() {
        let m = MassTriple::new(1.0, 2.0, 3.0).unwrap();
        assert_eq!(m.with_binary(2, 3).unwrap().as_array(), [1.0, 2.0, 3.0]);
        assert_eq!(m.with_binary(1, 3).unwrap().as_array(), [2.0, 1.0, 3.0]);
        assert_eq!(m.with_binary(1, 2).unwrap().as_array(), [3.0, 1.0, 2.0]);
        assert!(m.with_binary(2, 2).is_err());
    }

    #[test]
    fn zero_configuration() {
        let z = [Vec4::zeros(); 3];
        let jd = jacobi_from_positions(&MassTriple::equal(), z, z);
        assert_eq!(jd.state, FullState::zeros());
        assert!(jd.in_center_of_mass_frame(0.0));
    }

    #[test]
    fn jacobi_example() {
        let r = [e(1), e(0), -e(0)];
        let jd = jacobi_from_positions(&MassTriple::equal(), r, [Vec4::zeros(); 3]);
        assert_eq!(jd.state.x1, Vec4::new(2.0, 0.0, 0.0, 0.0));
        assert_eq!(jd.state.x2, Vec4::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(jd.state.y1, Vec4::zeros());
        assert_eq!(jd.state.y2, Vec4::zeros());
        assert!((jd.center_of_mass - Vec4::new(0.0, 1.0 / 3.0, 0.0, 0.0)).amax() < 1e-16);
    }

    #[test]
    fn unit_equilateral_potential() {
        // x1 = (1,0), x2 = (0, sqrt(3)/2)
        let s = ScalarProducts { s11: 1.0, s22: 0.75, s12: 0.0 };
        let v = newtonian_potential(&MassTriple::equal(), &s).unwrap();
        assert!((v.value + 3.0).abs() < 1e-15);
        let state = FullState { x1: e(0), x2: e(1) * 0.75_f64.sqrt(), ..FullState::zeros() };
        assert!((hamiltonian_full(&MassTriple::equal(), &state).unwrap() + 3.0).abs() < 1e-15);
    }

    #[test]
    fn example_distances() {
        let s = ScalarProducts { s11: 4.0, s22: 1.0, s12: 0.0 };
        let d = s.squared_distances(&MassTriple::equal());
        assert_eq!(d, [4.0, 2.0, 2.0]);
        let v = newtonian_potential(&MassTriple::equal(), &s).unwrap();
        let expect = -(0.5 + 2.0 / 2.0_f64.sqrt());
        assert!((v.value - expect).abs() < 1e-15);
    }

    #[test]
    fn collision_is_reported() {
        let s = ScalarProducts { s11: 0.0, s22: 1.0, s12: 0.0 };
        assert!(matches!(
            newtonian_potential(&MassTriple::equal(), &s),
            Err(Error::Collision { pair: "(2,3)", .. })
        ));
        // r1 on top of r3: a2 x1 + x2 = 0
        let s = ScalarProducts { s11: 4.0, s22: 1.0, s12: -2.0 };
        assert!(matches!(
            newtonian_potential(&MassTriple::equal(), &s),
            Err(Error::Collision { pair: "(3,1)", .. })
        ));
    }

    #[test]
    fn zero_momenta_zero_angular_momentum() {
        let state = FullState { x1: e(0), x2: e(2), ..FullState::zeros() };
        let l = angular_momentum(&state);
        assert_eq!(l.matrix, Mat4::zeros());
        assert_eq!((l.mu1, l.mu2), (0.0, 0.0));
    }

    #[test]
    fn shape_hessian_matches_differences() {
        let model = ThreeBody::newtonian(MassTriple::new(1.3, 0.7, 2.1).unwrap());
        let q = [0.8, 0.1, -0.2, 1.1];
        let h = model.shape_potential_hessian(&q).unwrap();
        let step = 1e-6;
        for j in 0..4 {
            let mut qp = q;
            let mut qm = q;
            qp[j] += step;
            qm[j] -= step;
            let gp = model.shape_potential_gradient(&qp).unwrap();
            let gm = model.shape_potential_gradient(&qm).unwrap();
            for i in 0..4 {
                let fd = (gp[i] - gm[i]) / (2.0 * step);
                assert!((fd - h[i][j]).abs() < 1e-7 * (1.0 + h[i][j].abs()), "{i}{j}");
            }
        }
    }
}
