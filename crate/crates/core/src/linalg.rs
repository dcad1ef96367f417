//! Fixed-size vector and matrix types.
//!
//! Everything here is 3-dimensional and stack allocated. Matrices are stored
//! row-major.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

/// Task-space position (m) or velocity (m/s).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);
    pub const X: Self = Self::new(1.0, 0.0, 0.0);
    pub const Y: Self = Self::new(0.0, 1.0, 0.0);
    pub const Z: Self = Self::new(0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub const fn splat(v: f64) -> Self {
        Self::new(v, v, v)
    }

    #[inline]
    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Unit vector, or `None` when the norm is not positive and finite.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Component-wise map.
    #[inline]
    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    #[inline]
    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl Add for Vec3 {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    #[inline]
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Neg for Vec3 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3 {
    pub m: [[f64; 3]; 3],
}

impl Mat3 {
    pub const IDENTITY: Self = Self {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };
    pub const ZERO: Self = Self { m: [[0.0; 3]; 3] };

    #[inline]
    pub const fn from_rows(m: [[f64; 3]; 3]) -> Self {
        Self { m }
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        Self::from_rows([[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]])
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Self::from_rows([[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]])
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec3 {
        Vec3::from_array(self.m[i])
    }

    #[inline]
    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Self {
        Self::from_cols(self.row(0), self.row(1), self.row(2))
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3) -> Vec3 {
        Vec3::new(self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v))
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        Self::from_rows(out)
    }

    /// Right-multiply by `diag(d)`, i.e. scale column `j` by `d[j]`.
    pub fn scale_cols(&self, d: [f64; 3]) -> Self {
        let mut out = self.m;
        for row in out.iter_mut() {
            for (v, s) in row.iter_mut().zip(d) {
                *v *= s;
            }
        }
        Self::from_rows(out)
    }

    pub fn det(&self) -> f64 {
        self.col(0).dot(self.col(1).cross(self.col(2)))
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Sum of the three principal 2×2 minors.
    pub fn principal_minor_sum(&self) -> f64 {
        let m = &self.m;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    /// Closed-form adjugate inverse.
    ///
    /// Returns `None` when `|det|` is below `rel_tol` times the cube of the
    /// largest column norm, which keeps the threshold scale invariant.
    pub fn inverse(&self, rel_tol: f64) -> Option<(Self, f64)> {
        let (c0, c1, c2) = (self.col(0), self.col(1), self.col(2));
        let r0 = c1.cross(c2);
        let r1 = c2.cross(c0);
        let r2 = c0.cross(c1);
        let det = c0.dot(r0);
        let scale = c0.norm().max(c1.norm()).max(c2.norm());
        if !det.is_finite() || det.abs() <= rel_tol * scale * scale * scale {
            return None;
        }
        let inv = 1.0 / det;
        Some((Self::from_rows([(r0 * inv).to_array(), (r1 * inv).to_array(), (r2 * inv).to_array()]), det))
    }
}

impl Mul for Mat3 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_mat(&o)
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        self.mul_vec(v)
    }
}

impl Sub for Mat3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut out = self.m;
        for (r, ro) in out.iter_mut().zip(o.m) {
            for (v, vo) in r.iter_mut().zip(ro) {
                *v -= vo;
            }
        }
        Self::from_rows(out)
    }
}

/// 3×2 matrix given by its two columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3x2 {
    pub cols: [Vec3; 2],
}

impl Mat3x2 {
    pub fn from_cols(c0: Vec3, c1: Vec3) -> Self {
        Self { cols: [c0, c1] }
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> Vec3 {
        self.cols[0] * v[0] + self.cols[1] * v[1]
    }
}

/// 2×3 matrix given by its two rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2x3 {
    pub rows: [Vec3; 2],
}

impl Mat2x3 {
    pub fn mul_vec(&self, v: Vec3) -> [f64; 2] {
        [self.rows[0].dot(v), self.rows[1].dot(v)]
    }

    /// `self · e`, a 2×2 matrix.
    pub fn mul_3x2(&self, e: &Mat3x2) -> [[f64; 2]; 2] {
        [
            [self.rows[0].dot(e.cols[0]), self.rows[0].dot(e.cols[1])],
            [self.rows[1].dot(e.cols[0]), self.rows[1].dot(e.cols[1])],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        assert_eq!(Vec3::X.cross(Vec3::Y), Vec3::Z);
        assert_eq!(Vec3::Y.cross(Vec3::X), -Vec3::Z);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Mat3::from_rows([[2.0, 1.0, 0.0], [0.5, 3.0, -1.0], [0.0, 1.0, 4.0]]);
        let (inv, det) = a.inverse(1e-12).unwrap();
        assert!((det - a.det()).abs() < 1e-12);
        let id = a * inv;
        assert!((id - Mat3::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn singular_inverse_rejected() {
        let a = Mat3::from_rows([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]);
        assert!(a.inverse(1e-12).is_none());
    }

    #[test]
    fn scale_cols_is_right_diag_product() {
        let a = Mat3::from_rows([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]);
        let d = [2.0, -1.0, 0.5];
        assert_eq!(a.scale_cols(d), a * Mat3::diag(d));
    }
}
