//! Real square matrices, their minors, and membership in `SO₊(p,q)`.
//!
//! Entry `(b, a)` of a group matrix (row `b`, column `a`) is the coefficient
//! of `e_b` in `S e_a S⁻¹`, so column `a` holds the image of the generator
//! `e_a`. A minor `p^B_A` takes rows `B` and columns `A`.

use std::fmt;

use thiserror::Error;

use crate::clifford::Signature;

/// Default membership tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

const PROJECTION_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare { row: usize, got: usize, expected: usize },
    #[error("empty matrix")]
    Empty,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is {got}x{got}, signature ({sig}) needs {expected}x{expected}")]
    DimensionMismatch { got: usize, expected: usize, sig: Signature },
    #[error("row and column multi-indices differ in length ({rows} vs {cols})")]
    MinorLengthMismatch { rows: usize, cols: usize },
    #[error("multi-index {0:?} is not strictly ascending within 1..={1}")]
    BadMultiIndex(Vec<usize>, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("projection onto O(p,q) did not converge (residual {0:e})")]
    ProjectionDiverged(f64),
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row, got: r.len(), expected: n });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != n * n {
            return Err(MatrixError::NotSquare { row: 0, got: data.len(), expected: n * n });
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut data = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            data[i * n + i] = *d;
        }
        Matrix { n, data }
    }

    pub fn eta(sig: Signature) -> Self {
        Matrix { n: sig.dim(), data: sig.eta() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at 0-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.n + col] = value;
    }

    pub fn row_major(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                out[c * n + r] = self.data[r * n + c];
            }
        }
        Matrix { n, data: out }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for k in 0..n {
                let x = self.data[r * n + k];
                if x == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += x * other.data[k * n + c];
                }
            }
        }
        Matrix { n, data: out }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn determinant(&self) -> f64 {
        let all = (1u32 << self.n) - 1;
        self.minor_by_mask(all, all)
    }

    /// Minor with 1-based ascending row indices `rows` and column indices
    /// `cols`. Empty index lists give 1.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<f64, MatrixError> {
        if rows.len() != cols.len() {
            return Err(MatrixError::MinorLengthMismatch { rows: rows.len(), cols: cols.len() });
        }
        let rmask = index_mask(rows, self.n)?;
        let cmask = index_mask(cols, self.n)?;
        Ok(self.minor_by_mask(rmask, cmask))
    }

    /// Minor on the rows and columns whose bits are set (bit `i` ↔ index
    /// `i+1`). Both masks must have the same popcount.
    pub(crate) fn minor_by_mask(&self, rows: u32, cols: u32) -> f64 {
        debug_assert_eq!(rows.count_ones(), cols.count_ones());
        let r = bits(rows);
        let c = bits(cols);
        let at = |i: usize, j: usize| self.data[r[i] * self.n + c[j]];
        match r.len() {
            0 => 1.0,
            1 => at(0, 0),
            2 => at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0),
            3 => {
                at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1))
                    - at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0))
                    + at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0))
            }
            k => {
                let mut sub = Vec::with_capacity(k * k);
                for i in 0..k {
                    for j in 0..k {
                        sub.push(at(i, j));
                    }
                }
                lu_determinant(k, &mut sub)
            }
        }
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return Err(MatrixError::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[i * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] -= f * a[col * n + j];
                    inv[i * n + j] -= f * inv[col * n + j];
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }
}

fn bits(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn index_mask(indices: &[usize], n: usize) -> Result<u32, MatrixError> {
    let mut mask = 0u32;
    let mut last = 0;
    for &i in indices {
        if i == 0 || i > n || i <= last {
            return Err(MatrixError::BadMultiIndex(indices.to_vec(), n));
        }
        last = i;
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

/// Determinant by LU decomposition with partial pivoting; clobbers `a`.
fn lu_determinant(k: usize, a: &mut [f64]) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let mut pivot = col;
        for i in col + 1..k {
            if a[i * k + col].abs() > a[pivot * k + col].abs() {
                pivot = i;
            }
        }
        let pv = a[pivot * k + col];
        if pv == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
            }
            det = -det;
        }
        det *= pv;
        for i in col + 1..k {
            let f = a[i * k + col] / pv;
            if f == 0.0 {
                continue;
            }
            for j in col + 1..k {
                a[i * k + j] -= f * a[col * k + j];
            }
        }
    }
    det
}

/// The three defining conditions of `SO₊(p,q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Orthogonality,
    Determinant,
    Orthochronous,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Orthogonality => "orthogonality",
            Condition::Determinant => "determinant",
            Condition::Orthochronous => "orthochronous",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of evaluating the `SO₊(p,q)` conditions on a matrix.
///
/// Residuals are compared against `tol · scale`, where
/// `scale = max(1, max|p_ab|)²`. Boosts have entries growing like `cosh φ`
/// and the rounding error of `PᵀηP` grows with their square.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub sig: Signature,
    pub tol: f64,
    pub scale: f64,
    /// `‖PᵀηP − η‖_max`.
    pub orthogonality_residual: f64,
    pub determinant: f64,
    /// Leading `p × p` minor.
    pub orthochronous_minor: f64,
    pub failed: Vec<Condition>,
}

impl MembershipReport {
    pub fn evaluate(m: &Matrix, sig: Signature, tol: f64) -> Result<Self, MatrixError> {
        if m.dim() != sig.dim() {
            return Err(MatrixError::DimensionMismatch { got: m.dim(), expected: sig.dim(), sig });
        }
        if !m.is_finite() {
            return Err(MatrixError::NonFinite);
        }
        let eta = Matrix::eta(sig);
        let gram = m.transpose().matmul(&eta).matmul(m);
        let orthogonality_residual = gram.max_abs_diff(&eta);
        let determinant = m.determinant();
        let leading = (1u32 << sig.p()) - 1;
        let orthochronous_minor = m.minor_by_mask(leading, leading);
        let scale = m.max_abs().max(1.0).powi(2);
        let bound = tol * scale;

        let mut failed = Vec::new();
        if !(orthogonality_residual <= bound) {
            failed.push(Condition::Orthogonality);
        }
        if !((determinant - 1.0).abs() <= bound) {
            failed.push(Condition::Determinant);
        }
        if !(orthochronous_minor >= 1.0 - bound) {
            failed.push(Condition::Orthochronous);
        }
        Ok(MembershipReport { sig, tol, scale, orthogonality_residual, determinant, orthochronous_minor, failed })
    }

    pub fn accepted(&self) -> bool {
        self.failed.is_empty()
    }
}

impl fmt::Display for MembershipReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.accepted() {
            return write!(f, "matrix is in SO+({})", self.sig);
        }
        let bound = self.tol * self.scale;
        let mut first = true;
        for c in &self.failed {
            if !first {
                f.write_str("; ")?;
            }
            first = false;
            match c {
                Condition::Orthogonality => write!(
                    f,
                    "orthogonality condition violated: max|P^T eta P - eta| = {:e} > {:e}",
                    self.orthogonality_residual, bound
                )?,
                Condition::Determinant => {
                    write!(f, "determinant condition violated: det(P) = {} (off by {:e})", self.determinant, (self.determinant - 1.0).abs())?
                }
                Condition::Orthochronous => write!(
                    f,
                    "orthochronous condition violated: leading {0}x{0} minor = {1} < 1",
                    self.sig.p(),
                    self.orthochronous_minor
                )?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MembershipError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("{0}")]
    Rejected(MembershipReport),
}

/// A matrix validated to lie in `SO₊(p,q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthoMatrix {
    sig: Signature,
    m: Matrix,
    tol: f64,
}

impl OrthoMatrix {
    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `p^b_a`: 1-based row `b`, column `a`.
    pub fn entry(&self, b: usize, a: usize) -> f64 {
        self.m.get(b - 1, a - 1)
    }

    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<f64, MatrixError> {
        self.m.minor(rows, cols)
    }

    pub(crate) fn minor_by_mask(&self, rows: u32, cols: u32) -> f64 {
        self.m.minor_by_mask(rows, cols)
    }

    pub fn into_matrix(self) -> Matrix {
        self.m
    }
}

/// Validates `m` against `SO₊(sig)`.
pub fn check_membership(m: Matrix, sig: Signature, tol: f64) -> Result<OrthoMatrix, MembershipError> {
    let report = MembershipReport::evaluate(&m, sig, tol)?;
    if !report.accepted() {
        return Err(MembershipError::Rejected(report));
    }
    Ok(OrthoMatrix { sig, m, tol })
}

/// Nearest-point projection onto `O(p,q)` by the generalized polar
/// decomposition, iterating `X ← (X + η X⁻ᵀ η) / 2`.
///
/// For `q = 0` this is the Newton iteration for the orthogonal polar
/// factor. The result still has to pass [`check_membership`]; a matrix
/// close to the wrong component stays there.
pub fn project_to_group(m: &Matrix, sig: Signature) -> Result<Matrix, MatrixError> {
    if m.dim() != sig.dim() {
        return Err(MatrixError::DimensionMismatch { got: m.dim(), expected: sig.dim(), sig });
    }
    if !m.is_finite() {
        return Err(MatrixError::NonFinite);
    }
    let eta = Matrix::eta(sig);
    let mut x = m.clone();
    let mut change = f64::INFINITY;
    for _ in 0..PROJECTION_MAX_ITERS {
        let adj_inv = eta.matmul(&x.inverse()?.transpose()).matmul(&eta);
        let next = Matrix { n: x.n, data: x.data.iter().zip(&adj_inv.data).map(|(a, b)| 0.5 * (a + b)).collect() };
        change = next.max_abs_diff(&x);
        x = next;
        if change <= 4.0 * f64::EPSILON * x.max_abs().max(1.0) {
            return Ok(x);
        }
    }
    if change <= 1e-12 * x.max_abs().max(1.0) {
        return Ok(x);
    }
    Err(MatrixError::ProjectionDiverged(change))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn rot2(phi: f64) -> Matrix {
        Matrix::from_rows(&[vec![phi.cos(), -phi.sin()], vec![phi.sin(), phi.cos()]]).unwrap()
    }

    #[test]
    fn minor_examples() {
        let id = Matrix::identity(3);
        assert_eq!(id.minor(&[1, 2], &[1, 2]).unwrap(), 1.0);
        assert_eq!(id.minor(&[], &[]).unwrap(), 1.0);
        assert_eq!(id.minor(&[1], &[2]).unwrap(), 0.0);
        let r = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(r.minor(&[1, 2], &[1, 2]).unwrap(), 1.0);
    }

    #[test]
    fn minor_errors() {
        let id = Matrix::identity(3);
        assert_eq!(id.minor(&[1, 2], &[1]), Err(MatrixError::MinorLengthMismatch { rows: 2, cols: 1 }));
        assert!(matches!(id.minor(&[4], &[1]), Err(MatrixError::BadMultiIndex(..))));
        assert!(matches!(id.minor(&[2, 1], &[1, 2]), Err(MatrixError::BadMultiIndex(..))));
        assert!(matches!(id.minor(&[0], &[1]), Err(MatrixError::BadMultiIndex(..))));
    }

    #[test]
    fn lu_and_closed_form_agree() {
        // 4x4 via LU against cofactor expansion along the first row
        let data: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let m = Matrix::from_row_major(4, data).unwrap();
        let mut cofactor = 0.0;
        for j in 0..4 {
            let cols: Vec<usize> = (1..=4).filter(|&c| c != j + 1).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            cofactor += sign * m.get(0, j) * m.minor(&[2, 3, 4], &cols).unwrap();
        }
        assert!((m.determinant() - cofactor).abs() < 1e-10);
    }

    #[test]
    fn membership_examples() {
        for (p, q) in [(3, 0), (2, 1), (1, 1), (2, 2)] {
            let s = sig(p, q);
            assert!(check_membership(Matrix::identity(s.dim()), s, DEFAULT_TOL).is_ok());
        }
        let flip = Matrix::diagonal(&[-1.0, -1.0]);
        match check_membership(flip.clone(), sig(1, 1), DEFAULT_TOL) {
            Err(MembershipError::Rejected(report)) => {
                assert_eq!(report.failed, vec![Condition::Orthochronous]);
                assert_eq!(report.orthochronous_minor, -1.0);
                assert!(report.to_string().contains("orthochronous"));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
        assert!(check_membership(flip, sig(2, 0), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn membership_failures_are_named() {
        let reflect = Matrix::diagonal(&[1.0, -1.0]);
        let err = check_membership(reflect, sig(2, 0), DEFAULT_TOL).unwrap_err();
        let MembershipError::Rejected(report) = err else { panic!() };
        assert_eq!(report.failed, vec![Condition::Determinant, Condition::Orthochronous]);

        let stretched = Matrix::diagonal(&[2.0, 0.5]);
        let MembershipError::Rejected(report) = check_membership(stretched, sig(2, 0), DEFAULT_TOL).unwrap_err() else {
            panic!()
        };
        assert_eq!(report.failed, vec![Condition::Orthogonality]);
    }

    #[test]
    fn membership_dimension_mismatch() {
        let err = check_membership(Matrix::identity(2), sig(2, 1), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, MembershipError::Matrix(MatrixError::DimensionMismatch { .. })));
    }

    #[test]
    fn large_boosts_pass() {
        let phi = 10.0f64;
        let m = Matrix::from_rows(&[vec![phi.cosh(), phi.sinh()], vec![phi.sinh(), phi.cosh()]]).unwrap();
        assert!(check_membership(m, sig(1, 1), DEFAULT_TOL).is_ok());
    }

    #[test]
    fn so3_cofactor_identities() {
        // rotation about an oblique axis
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rx = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, c, -s], vec![0.0, s, c]]).unwrap();
        let (c2, s2) = (1.1f64.cos(), 1.1f64.sin());
        let rz = Matrix::from_rows(&[vec![c2, -s2, 0.0], vec![s2, c2, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let p = rx.matmul(&rz);
        assert!((p.minor(&[1], &[1]).unwrap() - p.minor(&[2, 3], &[2, 3]).unwrap()).abs() < 1e-14);
        assert!((p.minor(&[2], &[2]).unwrap() - p.minor(&[1, 3], &[1, 3]).unwrap()).abs() < 1e-14);
        assert!((p.minor(&[3], &[3]).unwrap() - p.minor(&[1, 2], &[1, 2]).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn projection_recovers_rotation() {
        let s = sig(2, 0);
        let mut m = rot2(0.7);
        m.set(0, 1, m.get(0, 1) + 1e-4);
        assert!(check_membership(m.clone(), s, DEFAULT_TOL).is_err());
        let proj = project_to_group(&m, s).unwrap();
        assert!(check_membership(proj.clone(), s, 1e-12).is_ok());
        assert!(proj.max_abs_diff(&rot2(0.7)) < 1e-3);
    }

    #[test]
    fn projection_indefinite() {
        let s = sig(1, 1);
        let phi = 1.3f64;
        let mut m = Matrix::from_rows(&[vec![phi.cosh(), phi.sinh()], vec![phi.sinh(), phi.cosh()]]).unwrap();
        m.set(1, 0, m.get(1, 0) + 1e-5);
        let proj = project_to_group(&m, s).unwrap();
        assert!(check_membership(proj, s, 1e-12).is_ok());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0]]).unwrap();
        let prod = m.matmul(&m.inverse().unwrap());
        assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-14);
        let sing = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(sing.inverse(), Err(MatrixError::Singular));
    }
}
