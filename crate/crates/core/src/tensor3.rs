//! Dense 3x3 tensors and 3-vectors.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Determinants at or below this magnitude are treated as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;
/// Largest entrywise asymmetry accepted by [`sym_eigenvalues`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn z(&self) -> f64 {
        self.0[2]
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        (0..3).map(|i| self.0[i] * other.0[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3(self.0.map(|v| v * s))
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> f64) -> Self {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        let cols = [c0, c1, c2];
        Mat3::from_fn(|i, j| cols[j].0[i])
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn column(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        Vec3(std::array::from_fn(|i| (0..3).map(|k| self.0[i][k] * v.0[k]).sum()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        ddot(self, self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn diagonal(&self) -> [f64; 3] {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, rhs: Mat3) {
        *self = *self + rhs;
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self * -1.0
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] * s)
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, m: Mat3) -> Mat3 {
        m * self
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

pub fn det(m: &Mat3) -> f64 {
    let a = &m.0;
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Matrix of signed minors, so that `cofactor(m) = det(m) * inverse(m)^T`.
pub fn cofactor(m: &Mat3) -> Mat3 {
    let a = &m.0;
    Mat3::from_fn(|i, j| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        // Cyclic index order folds the checkerboard sign into the minor.
        a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
    })
}

pub fn inverse(m: &Mat3) -> Result<Mat3> {
    let d = det(m);
    if !d.is_finite() || d.abs() <= SINGULAR_TOLERANCE {
        return Err(Error::SingularMatrix { det: d });
    }
    Ok(cofactor(m).transpose() * (1.0 / d))
}

/// Double contraction `sum_ij a_ij b_ij`.
pub fn ddot(a: &Mat3, b: &Mat3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a.0[i][j] * b.0[i][j];
        }
    }
    s
}

/// Eigenvalues of a symmetric matrix, sorted in descending order.
///
/// Uses the trigonometric solution of the characteristic cubic; a matrix that
/// is already diagonal (to rounding) is deflated directly.
pub fn sym_eigenvalues(m: &Mat3) -> Result<[f64; 3]> {
    let asymmetry = (m.0[0][1] - m.0[1][0])
        .abs()
        .max((m.0[0][2] - m.0[2][0]).abs())
        .max((m.0[1][2] - m.0[2][1]).abs());
    if asymmetry > SYMMETRY_TOLERANCE || !asymmetry.is_finite() {
        return Err(Error::NotSymmetric { asymmetry });
    }
    let s = Mat3::from_fn(|i, j| 0.5 * (m.0[i][j] + m.0[j][i]));
    let off = s.0[0][1].powi(2) + s.0[0][2].powi(2) + s.0[1][2].powi(2);
    let scale = s.max_abs().max(f64::MIN_POSITIVE);
    let mut eig = if off <= (1e-30 * scale).powi(2) {
        s.diagonal()
    } else {
        let q = s.trace() / 3.0;
        let p2 = (s.0[0][0] - q).powi(2) + (s.0[1][1] - q).powi(2) + (s.0[2][2] - q).powi(2) + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let b = (s - Mat3::IDENTITY * q) * (1.0 / p);
        let r = (det(&b) / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e0 = q + 2.0 * p * phi.cos();
        let e2 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        [e0, 3.0 * q - e0 - e2, e2]
    };
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}
