//! Small dense linear algebra on top of `nalgebra`: so(4) generators, plane
//! rotations, Pfaffians and symmetric spectra.

use nalgebra::{Cholesky, DMatrix, Matrix4, SMatrix, Vector4};

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;
pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Mat16 = SMatrix<f64, 16, 16>;

/// The so(4) basis element `E_ij - E_ji` (zero-based indices).
pub fn plane_generator(i: usize, j: usize) -> Mat4 {
    let mut b = Mat4::zeros();
    b[(i, j)] = 1.0;
    b[(j, i)] = -1.0;
    b
}

/// `exp(angle * (E_ij - E_ji))`, a rotation in the (i, j) coordinate plane.
pub fn plane_rotation(i: usize, j: usize, angle: f64) -> Mat4 {
    let (s, c) = angle.sin_cos();
    let mut m = Mat4::identity();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = s;
    m[(j, i)] = -s;
    m
}

/// Derivative of [`plane_rotation`] with respect to the angle.
pub fn plane_rotation_derivative(i: usize, j: usize, angle: f64) -> Mat4 {
    let (s, c) = angle.sin_cos();
    let mut m = Mat4::zeros();
    m[(i, i)] = -s;
    m[(j, j)] = -s;
    m[(i, j)] = c;
    m[(j, i)] = -c;
    m
}

/// `x ^ y = x y^T - y x^T`.
pub fn wedge(x: &Vec4, y: &Vec4) -> Mat4 {
    x * y.transpose() - y * x.transpose()
}

/// Pfaffian of a 4x4 antisymmetric matrix.
pub fn pfaffian(l: &Mat4) -> f64 {
    l[(0, 1)] * l[(2, 3)] - l[(0, 2)] * l[(1, 3)] + l[(0, 3)] * l[(1, 2)]
}

/// Recovers `(mu1, mu2)` with `mu1 >= mu2 >= 0` from `tr L^2` and `Pf L`.
///
/// Solves the quadratic for `mu^2`; the small root is taken as `Pf^2 / mu1^2`
/// so that it does not suffer cancellation when `mu2 << mu1`.
pub fn spectral_pair(trace_sq: f64, pf: f64) -> (f64, f64) {
    let sum = (-0.5 * trace_sq).max(0.0);
    let prod = pf * pf;
    let disc = (sum * sum - 4.0 * prod).max(0.0);
    let big = 0.5 * (sum + disc.sqrt());
    let small = if big > 0.0 { prod / big } else { 0.0 };
    (big.sqrt(), small.min(big).sqrt())
}

/// Canonical symplectic matrix `[[0, I], [-I, 0]]` of size `2n`.
pub fn canonical_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

/// Eigenvalues of a symmetric matrix in ascending order, by cyclic Jacobi
/// rotations.
///
/// An off-diagonal entry is treated as zero once it is below
/// `eps sqrt(|a_pp a_qq|)`, which keeps small eigenvalues of graded
/// matrices accurate relative to themselves rather than to the norm.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = (m + m.transpose()) * 0.5;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 || apq.abs() <= f64::EPSILON * (a[(p, p)] * a[(q, q)]).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + theta.hypot(1.0)) };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                for k in (0..n).filter(|&k| k != p && k != q) {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                    a[(p, k)] = a[(k, p)];
                    a[(q, k)] = a[(k, q)];
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
        if !rotated {
            break;
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|k| a[(k, k)]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Positive definiteness by Cholesky of the diagonally equilibrated matrix.
///
/// The congruence `D^{-1/2} H D^{-1/2}` leaves the inertia unchanged and
/// removes the scale spread of graded Hessians, whose eigenvalues may span
/// fifteen decades.
pub fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    let mut d = Vec::with_capacity(n);
    for k in 0..n {
        let v = m[(k, k)];
        if !(v > 0.0) || !v.is_finite() {
            return false;
        }
        d.push(1.0 / v.sqrt());
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]) * d[i] * d[j]);
    Cholesky::new(scaled).is_some()
}

pub fn vec4(a: [f64; 4]) -> Vec4 {
    Vec4::new(a[0], a[1], a[2], a[3])
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
