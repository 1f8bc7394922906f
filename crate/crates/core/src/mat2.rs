use serde::{Deserialize, Serialize};
use std::ops::{Mul, Sub};

/// Real 2x2 matrix, row-major entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub e11: f64,
    pub e12: f64,
    pub e21: f64,
    pub e22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);

    pub const fn new(e11: f64, e12: f64, e21: f64, e22: f64) -> Self {
        Self { e11, e12, e21, e22 }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    /// Matrix with the given columns.
    pub const fn from_columns(c1: [f64; 2], c2: [f64; 2]) -> Self {
        Self::new(c1[0], c2[0], c1[1], c2[1])
    }

    pub fn column(&self, j: usize) -> [f64; 2] {
        match j {
            0 => [self.e11, self.e21],
            1 => [self.e12, self.e22],
            _ => panic!("column index {j} out of range"),
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.e11, self.e12, self.e21, self.e22]
    }

    pub fn det(&self) -> f64 {
        self.e11 * self.e22 - self.e12 * self.e21
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.e11, self.e21, self.e12, self.e22)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.e11, c * self.e12, c * self.e21, c * self.e22)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.e11 * v[0] + self.e12 * v[1],
            self.e21 * v[0] + self.e22 * v[1],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|x| x.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other)
            .entries()
            .iter()
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Singular values `(largest, smallest)` from the closed-form 2x2 SVD.
    pub fn singular_values(&self) -> (f64, f64) {
        // sigma_max = (sqrt((a+d)^2 + (c-b)^2) + sqrt((a-d)^2 + (c+b)^2)) / 2
        let q = (self.e11 + self.e22).hypot(self.e21 - self.e12);
        let r = (self.e11 - self.e22).hypot(self.e21 + self.e12);
        let big = 0.5 * (q + r);
        // the smallest one via the determinant keeps relative accuracy when tiny
        let small = if big > 0.0 {
            self.det().abs() / big
        } else {
            0.0
        };
        (big, small)
    }

    /// Largest singular value (operator 2-norm).
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().0
    }

    pub fn min_singular_value(&self) -> f64 {
        self.singular_values().1
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 * o.e11 + self.e12 * o.e21,
            self.e11 * o.e12 + self.e12 * o.e22,
            self.e21 * o.e11 + self.e22 * o.e21,
            self.e21 * o.e12 + self.e22 * o.e22,
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.e11 - o.e11,
            self.e12 - o.e12,
            self.e21 - o.e21,
            self.e22 - o.e22,
        )
    }
}
