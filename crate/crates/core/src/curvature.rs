//! Curvature operators of oriented Riemannian four-manifolds in block form.
//!
//! `Rm = [[A, B^T], [B, C]]` acting on `Λ+ ⊕ Λ-`, with `A = W+ + s/12`,
//! `B = Ric0 : Λ+ → Λ-` and `C = W- + s/12`. The bases of `Λ±` are
//! `(θ0∧θi ± θj∧θk)/√2` for `(i, jk)` in `(1,23), (2,31), (3,12)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{is_finite, symmetrize, Mat3, Vec3};

/// Relative tolerance of the trace constraint `tr A = tr C`.
pub const BIANCHI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureOperator {
    #[serde(rename = "A", with = "mat3_rows")]
    a: Mat3,
    #[serde(rename = "B", with = "mat3_rows")]
    b: Mat3,
    #[serde(rename = "C", with = "mat3_rows")]
    c: Mat3,
    #[serde(default)]
    relaxed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylScalarParts {
    #[serde(rename = "Wplus", with = "mat3_rows")]
    pub w_plus: Mat3,
    #[serde(rename = "Wminus", with = "mat3_rows")]
    pub w_minus: Mat3,
    #[serde(with = "mat3_rows")]
    pub ric0: Mat3,
    pub s: f64,
}

impl CurvatureOperator {
    /// Builds an operator, symmetrizing `A` and `C`. Unless `relaxed`, the
    /// trace constraint is enforced.
    pub fn new(a: Mat3, b: Mat3, c: Mat3, relaxed: bool) -> Result<Self> {
        if !is_finite(&a) {
            return Err(Error::NonFinite("A"));
        }
        if !is_finite(&b) {
            return Err(Error::NonFinite("B"));
        }
        if !is_finite(&c) {
            return Err(Error::NonFinite("C"));
        }
        let a = symmetrize(&a);
        let c = symmetrize(&c);
        let (ta, tc) = (a.trace(), c.trace());
        if !relaxed && (ta - tc).abs() > BIANCHI_TOL * ta.abs().max(1.0) {
            return Err(Error::BianchiViolation {
                trace_a: ta,
                trace_c: tc,
            });
        }
        Ok(Self { a, b, c, relaxed })
    }

    pub fn a(&self) -> &Mat3 {
        &self.a
    }

    pub fn b(&self) -> &Mat3 {
        &self.b
    }

    pub fn c(&self) -> &Mat3 {
        &self.c
    }

    pub fn relaxed(&self) -> bool {
        self.relaxed
    }

    /// Re-validates a deserialized operator.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.a, self.b, self.c, self.relaxed)
    }

    pub fn scalar_curvature(&self) -> f64 {
        2.0 * (self.a.trace() + self.c.trace())
    }

    pub fn decompose(&self) -> WeylScalarParts {
        let id = Mat3::identity();
        WeylScalarParts {
            w_plus: self.a - id * (self.a.trace() / 3.0),
            w_minus: self.c - id * (self.c.trace() / 3.0),
            ric0: self.b,
            s: self.scalar_curvature(),
        }
    }

    /// Swaps the roles of `Λ+` and `Λ-`.
    pub fn reverse_orientation(&self) -> Self {
        Self {
            a: self.c,
            b: self.b.transpose(),
            c: self.a,
            relaxed: self.relaxed,
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            relaxed: self.relaxed,
        }
    }

    /// Change of oriented orthonormal frames: `(PAP^T, QBP^T, QCQ^T)`.
    pub fn rotated(&self, p: &Mat3, q: &Mat3) -> Self {
        Self {
            a: symmetrize(&(p * self.a * p.transpose())),
            b: q * self.b * p.transpose(),
            c: symmetrize(&(q * self.c * q.transpose())),
            relaxed: self.relaxed,
        }
    }

    /// Diagonal operator from the six coordinate-plane curvatures
    /// `[K01, K02, K03, K23, K31, K12]`.
    pub fn from_sectional_diagonal(k: [f64; 6]) -> Result<Self> {
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("sectional curvatures"));
        }
        let sum = Vec3::new(k[0] + k[3], k[1] + k[4], k[2] + k[5]) * 0.5;
        let diff = Vec3::new(k[0] - k[3], k[1] - k[4], k[2] - k[5]) * 0.5;
        let a = Mat3::from_diagonal(&sum);
        Self::new(a, Mat3::from_diagonal(&diff), a, false)
    }

    /// Operator with prescribed Ricci eigenvalues (in the paired eigenbases) and
    /// Weyl parts.
    pub fn from_ricci_spectrum(lambda: [f64; 4], w_plus: Mat3, w_minus: Mat3) -> Result<Self> {
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("lambda"));
        }
        let mut l = lambda;
        l.sort_by(|x, y| y.total_cmp(x));
        let s: f64 = l.iter().sum();
        let b = Mat3::from_diagonal(&Vec3::new(
            0.25 * (l[0] + l[1] - l[2] - l[3]),
            0.25 * (l[0] - l[1] + l[2] - l[3]),
            0.25 * (l[0] - l[1] - l[2] + l[3]),
        ));
        let id = Mat3::identity() * (s / 12.0);
        Self::new(w_plus + id, b, w_minus + id, false)
    }

    pub fn round() -> Self {
        Self::new(Mat3::identity(), Mat3::zeros(), Mat3::identity(), false).unwrap()
    }

    pub fn hyperbolic() -> Self {
        Self::round().scaled(-1.0)
    }

    /// Relaxed extremal witness `A = diag(3/2, 1, 0), B = 0, C = I`.
    pub fn boundary_witness() -> Self {
        Self::new(
            Mat3::from_diagonal(&Vec3::new(1.5, 1.0, 0.0)),
            Mat3::zeros(),
            Mat3::identity(),
            true,
        )
        .unwrap()
    }
}

impl WeylScalarParts {
    pub fn reassemble(&self, relaxed: bool) -> Result<CurvatureOperator> {
        let id = Mat3::identity() * (self.s / 12.0);
        CurvatureOperator::new(self.w_plus + id, self.ric0, self.w_minus + id, relaxed)
    }
}

/// Serde adapter storing a 3×3 matrix as row-major nested arrays, and
/// accepting either nested rows or a flat list of nine numbers.
pub mod mat3_rows {
    use super::Mat3;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Rows([[f64; 3]; 3]),
        Flat([f64; 9]),
    }

    pub fn to_rows(m: &Mat3) -> [[f64; 3]; 3] {
        let mut rows = [[0.0; 3]; 3];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = m[(i, j)];
            }
        }
        rows
    }

    pub fn from_rows(rows: &[[f64; 3]; 3]) -> Mat3 {
        Mat3::from_fn(|i, j| rows[i][j])
    }

    pub fn serialize<S: Serializer>(m: &Mat3, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Mat3, D::Error> {
        match Repr::deserialize(d) {
            Ok(Repr::Rows(r)) => Ok(from_rows(&r)),
            Ok(Repr::Flat(f)) => Ok(Mat3::from_row_slice(&f)),
            Err(_) => Err(D::Error::custom(
                "expected a 3x3 matrix as [[a,b,c],[d,e,f],[g,h,i]] or nine numbers",
            )),
        }
    }
}
