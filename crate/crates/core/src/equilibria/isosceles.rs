//! Isosceles relative equilibria for `m2 = m3 = 1`, `m1 = n`.
//!
//! The shape is `q = (q1, 0, 0, q4)` with `q1 / q4 = rho = 4 t / (1 - t^2)`;
//! `t = 2 - sqrt(3)` is the equilateral triangle.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MassTriple, ThreeBody};

use super::effective::Mat4x4;
use super::report::EquilibriumReport;

/// `t` of the equilateral triangle.
pub const T_EQUILATERAL: f64 = 0.267_949_192_431_122_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesParams {
    /// `m1 / m`.
    pub n: f64,
    /// Shape parameter in `(0, 1)`.
    pub t: f64,
    /// Length scale `q4`.
    pub q4: f64,
}

impl IsoscelesParams {
    pub fn new(n: f64, t: f64) -> Result<Self> {
        Self::with_scale(n, t, 1.0)
    }

    pub fn with_scale(n: f64, t: f64, q4: f64) -> Result<Self> {
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!("mass ratio n must be positive, got {n}")));
        }
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::InvalidParameter(format!("shape parameter t must lie in (0, 1), got {t}")));
        }
        if !(q4 > 0.0) || !q4.is_finite() {
            return Err(Error::InvalidParameter(format!("scale q4 must be positive, got {q4}")));
        }
        Ok(Self { n, t, q4 })
    }

    pub fn rho(&self) -> f64 {
        4.0 * self.t / (1.0 - self.t * self.t)
    }

    pub fn q1(&self) -> f64 {
        self.rho() * self.q4
    }

    pub fn masses(&self) -> MassTriple {
        MassTriple { m1: self.n, m2: 1.0, m3: 1.0 }
    }

    pub fn shape(&self) -> [f64; 4] {
        [self.q1(), 0.0, 0.0, self.q4]
    }
}

/// `(mu1^2, mu2^2)` solving the two equilibrium conditions.
pub fn isosceles_momenta(params: &IsoscelesParams) -> Result<(f64, f64)> {
    let m = params.masses();
    let (q1, q4, n) = (params.q1(), params.q4, params.n);
    let r3 = (q1 * q1 + 4.0 * q4 * q4).powf(1.5);
    let mu2_sq = m.nu1() * q1.powi(3) * (1.0 / (q1 * q1) + 4.0 * n * q1 / r3);
    let mu1_sq = m.nu2() * q4.powi(3) * (16.0 * n * q4 / r3);
    if !(mu1_sq > 0.0 && mu2_sq > 0.0) || !mu1_sq.is_finite() || !mu2_sq.is_finite() {
        return Err(Error::NoRealMomenta { mu1_sq, mu2_sq });
    }
    Ok((mu1_sq, mu2_sq))
}

/// Left-hand sides of the two equilibrium conditions
/// `m^2/q1^2 + 4 m m1 q1/r^3 - mu2^2/(nu1 q1^3)` and `16 m m1 q4/r^3 - mu1^2/(nu2 q4^3)`,
/// each divided by its largest term.
pub fn isosceles_conditions(params: &IsoscelesParams, mu1_sq: f64, mu2_sq: f64) -> [f64; 2] {
    let m = params.masses();
    let (q1, q4, n) = (params.q1(), params.q4, params.n);
    let r3 = (q1 * q1 + 4.0 * q4 * q4).powf(1.5);
    let (a, b, c) = (1.0 / (q1 * q1), 4.0 * n * q1 / r3, mu2_sq / (m.nu1() * q1.powi(3)));
    let (d, e) = (16.0 * n * q4 / r3, mu1_sq / (m.nu2() * q4.powi(3)));
    [(a + b - c) / a.max(b).max(c), (d - e) / d.max(e)]
}

/// The three non-trivial 2x2 blocks of the Hessian and the two explicit
/// eigenvalues `1/nu1` (for `p1`) and `1/nu2` (for `p4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesBlocks {
    pub q23: [[f64; 2]; 2],
    pub q14: [[f64; 2]; 2],
    pub p23: [[f64; 2]; 2],
    pub p1: f64,
    pub p4: f64,
}

impl IsoscelesBlocks {
    /// Ascending eigenvalues of each 2x2 block.
    pub fn eigenvalues(&self) -> [[f64; 2]; 3] {
        [sym2_eigenvalues(&self.q23), sym2_eigenvalues(&self.q14), sym2_eigenvalues(&self.p23)]
    }

    /// The `q` and `p` blocks of the 8x8 Hessian in `(q1..q4)`, `(p1..p4)` order.
    pub fn assemble(&self) -> (Mat4x4, Mat4x4) {
        let mut hq = Mat4x4::zeros();
        let mut hp = Mat4x4::zeros();
        for (a, i) in [1, 2].into_iter().enumerate() {
            for (b, j) in [1, 2].into_iter().enumerate() {
                hq[(i, j)] = self.q23[a][b];
                hp[(i, j)] = self.p23[a][b];
            }
        }
        for (a, i) in [0, 3].into_iter().enumerate() {
            for (b, j) in [0, 3].into_iter().enumerate() {
                hq[(i, j)] = self.q14[a][b];
            }
        }
        hp[(0, 0)] = self.p1;
        hp[(3, 3)] = self.p4;
        (hq, hp)
    }
}

fn sym2_eigenvalues(m: &[[f64; 2]; 2]) -> [f64; 2] {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half = 0.5 * (m[0][0] - m[1][1]);
    let r = half.hypot(m[0][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    // the root of larger magnitude is accurate; the other follows from the determinant
    if mean >= 0.0 {
        let big = mean + r;
        [if big != 0.0 { det / big } else { mean - r }, big]
    } else {
        let small = mean - r;
        [small, if small != 0.0 { det / small } else { mean + r }]
    }
}

/// Hessian blocks at `q = (q1, 0, 0, q4)` for given momenta (with `m = 1`).
pub fn isosceles_blocks_at(n: f64, q1: f64, q4: f64, mu1_sq: f64, mu2_sq: f64) -> Result<IsoscelesBlocks> {
    let gap = mu1_sq - mu2_sq;
    if gap == 0.0 {
        return Err(Error::DegenerateMomenta(mu1_sq.sqrt()));
    }
    let masses = MassTriple { m1: n, m2: 1.0, m3: 1.0 };
    let (nu1, nu2) = (masses.nu1(), masses.nu2());
    let (a, b) = (mu1_sq, mu2_sq);
    let r2 = q1 * q1 + 4.0 * q4 * q4;
    let r5 = r2 * r2 * r2.sqrt();
    let cross = -48.0 * n * q1 * q4 / r5;
    let q23_off = a / (nu2 * q1 * q4.powi(3)) + b / (nu1 * q1.powi(3) * q4) + cross;
    let q23 = [
        [b / (nu2 * q1 * q1 * q4 * q4) + 1.0 / q1.powi(3) + 4.0 * n * (q1 * q1 - 8.0 * q4 * q4) / r5, q23_off],
        [q23_off, a / (nu1 * q1 * q1 * q4 * q4) - 32.0 * n * (q1 * q1 - 2.0 * q4 * q4) / r5],
    ];
    let q14 = [
        [3.0 * b / (nu1 * q1.powi(4)) - 2.0 / q1.powi(3) - 8.0 * n * (q1 * q1 - 2.0 * q4 * q4) / r5, cross],
        [cross, 3.0 * a / (nu2 * q4.powi(4)) + 16.0 * n * (q1 * q1 - 8.0 * q4 * q4) / r5],
    ];
    let p23_off = (a * q1 / (nu2 * q4) - b * q4 / (nu1 * q1)) / gap;
    let p23 = [
        [a * (1.0 / nu1 - q1 * q1 / (nu2 * q4 * q4)) / gap, p23_off],
        [p23_off, b * (q4 * q4 / (nu1 * q1 * q1) - 1.0 / nu2) / gap],
    ];
    Ok(IsoscelesBlocks { q23, q14, p23, p1: 1.0 / nu1, p4: 1.0 / nu2 })
}

pub fn isosceles_hessian_blocks(params: &IsoscelesParams) -> Result<IsoscelesBlocks> {
    let (a, b) = isosceles_momenta(params)?;
    isosceles_blocks_at(params.n, params.q1(), params.q4, a, b)
}

/// The isosceles relative equilibrium with its Hessian assembled from the
/// block formulas.
pub fn isosceles_equilibrium(params: &IsoscelesParams) -> Result<EquilibriumReport> {
    let (a, b) = isosceles_momenta(params)?;
    let blocks = isosceles_blocks_at(params.n, params.q1(), params.q4, a, b)?;
    let (hq, hp) = blocks.assemble();
    let body = ThreeBody::newtonian(params.masses());
    EquilibriumReport::from_blocks(&body, params.shape(), a.sqrt(), b.sqrt(), &hq, &hp, 0)
}

/// Leading small-`t` terms of the block eigenvalues (scaled by `m^2/q4^3`
/// for the `q` blocks and by `m` for the `p` block), each pair ascending for
/// small `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoscelesAsymptotics {
    pub q23: [f64; 2],
    pub q14: [f64; 2],
    pub p23: [f64; 2],
}

pub fn isosceles_asymptotics(n: f64, t: f64) -> IsoscelesAsymptotics {
    let (t2, t3) = (t * t, t * t * t);
    IsoscelesAsymptotics {
        q23: [
            n * n / ((2.0 * n + 4.0) * t2) - 1.0 / (4.0 * t) - 2.0 * (7.0 * n * n + 2.0 * n) / (n + 2.0),
            1.0 / (64.0 * t3) + (17.0 / 64.0 + 1.0 / (8.0 * n)) / t + (11.0 * n * n + 6.0 * n) / (n + 2.0),
        ],
        q14: [2.0 * n + 12.0 * n * t2, 1.0 / (64.0 * t3) - 3.0 / (64.0 * t) + 2.0 * n],
        p23: [
            2.0 - 8.0 * (3.0 * n - 2.0) * t2 / n,
            (n + 2.0) / (16.0 * n * n * t) + (n + 2.0).powi(2) / (32.0 * n.powi(4)),
        ],
    }
}

/// `(P1(n, t), P2(n, t))`.
pub fn stability_polynomials(n: f64, t: f64) -> (f64, f64) {
    let t2 = t * t;
    let s = t2 + 1.0;
    let p1 = 32.0 * t.powi(3) * (3.0 * n * (t2 * t2 - 6.0 * t2 + 1.0) + 2.0 * (t2 * t2 - 10.0 * t2 + 1.0)) - s.powi(5);
    let p2 = 2.0 * n * n * (t2 * t2 - 6.0 * t2 + 1.0) * s * s
        - n * t * (64.0 * t.powi(3) + s.powi(3))
        - 2.0 * t * s.powi(3);
    (p1, p2)
}

/// The root of `P2(n, .)` in `(0, 1)`, where `mu1 = mu2`.
pub fn p2_root(n: f64) -> Option<f64> {
    let f = |t: f64| stability_polynomials(n, t).1;
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    if f(lo).signum() == f(hi).signum() {
        return None;
    }
    let s_lo = f(lo).signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Sign pattern of `(P1, P2, t - t_eq)` labelling the regions of the
/// `(n, t)` quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub p1_positive: bool,
    pub p2_positive: bool,
    pub below_equilateral: bool,
}

impl Region {
    /// `(q2, q3)` block positive definite: `(mu1^2 - mu2^2) P1 < 0` with
    /// `sign(mu1^2 - mu2^2) = sign(P2)`.
    pub fn q23_positive(&self) -> bool {
        self.p1_positive != self.p2_positive
    }

    /// `(p2, p3)` block positive definite: `(t_eq - t)(mu1^2 - mu2^2) > 0`.
    pub fn p23_positive(&self) -> bool {
        self.below_equilateral == self.p2_positive
    }

    /// All eigenvalues positive (the `(q1, q4)` block always is).
    pub fn is_minimum(&self) -> bool {
        self.q23_positive() && self.p23_positive()
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |b: bool| if b { '+' } else { '-' };
        write!(f, "P1{}P2{}T{}", s(self.p1_positive), s(self.p2_positive), s(!self.below_equilateral))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    Interior(Region),
    /// On one of the curves `P1 = 0`, `P2 = 0` or `t = t_eq`.
    Boundary,
}

impl RegionLabel {
    pub fn is_minimum(&self) -> bool {
        matches!(self, Self::Interior(r) if r.is_minimum())
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Interior(r) => r.fmt(f),
            Self::Boundary => f.write_str("boundary"),
        }
    }
}

/// Region of `(n, t)`; values of `P1`, `P2`, `t - t_eq` within `tol` of
/// zero count as boundary.
pub fn region_classification_tol(n: f64, t: f64, tol: f64) -> RegionLabel {
    let (p1, p2) = stability_polynomials(n, t);
    let dt = t - T_EQUILATERAL;
    if p1.abs() <= tol || p2.abs() <= tol || dt.abs() <= tol {
        return RegionLabel::Boundary;
    }
    RegionLabel::Interior(Region { p1_positive: p1 > 0.0, p2_positive: p2 > 0.0, below_equilateral: dt < 0.0 })
}

pub fn region_classification(n: f64, t: f64) -> RegionLabel {
    region_classification_tol(n, t, 1e-12)
}

/// Closed forms `omega1 = sqrt(m (2+n)/q4^3) sqrt((1-t^2)^3/(1+t^2)^3)`,
/// `omega2 = sqrt(2 m / q1^3) sqrt(1 + 32 n t^3/(1+t^2)^3)`.
pub fn isosceles_frequencies(params: &IsoscelesParams) -> (f64, f64) {
    let (n, t, q4) = (params.n, params.t, params.q4);
    let s3 = (1.0 + t * t).powi(3);
    let w1 = ((2.0 + n) / q4.powi(3)).sqrt() * ((1.0 - t * t).powi(3) / s3).sqrt();
    let w2 = (2.0 / params.q1().powi(3)).sqrt() * (1.0 + 32.0 * n * t.powi(3) / s3).sqrt();
    (w1, w2)
}

/// `(omega2 / omega1)^2 = ((1+t^2)^3 + 32 n t^3) / (32 (2+n) t^3)`.
pub fn isosceles_frequency_ratio_sq(n: f64, t: f64) -> f64 {
    ((1.0 + t * t).powi(3) + 32.0 * n * t.powi(3)) / (32.0 * (2.0 + n) * t.powi(3))
}
