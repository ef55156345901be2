//! Quaternion and split-quaternion forms of the `n = 3` coverings.
//!
//! `Spin(3) ≅ ℍᵘ ≅ SU(2)` and `Spin₊(2,1) ≅ ℍᵘ_s ≅ SU(1,1)`, both through the
//! even-subalgebra identification `e ↔ 1`, `e₁₂ ↔ i`, `e₁₃ ↔ j`, `e₂₃ ↔ −k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::clifford::{AlgebraError, Blade, Multivector, Signature};
use crate::covering::{Rotor, RotorError, CANDIDATE_THRESHOLD};
use crate::matrix_group::OrthoMatrix;

const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivisionError {
    #[error("expected signature ({expected}), got ({got})")]
    WrongSignature { expected: Signature, got: Signature },
    #[error("no candidate with positive norm above {threshold:e} (best {best:e})")]
    NoCandidate { best: f64, threshold: f64 },
    #[error("multivector has components outside the even subalgebra")]
    NotEven,
    #[error(transparent)]
    Rotor(#[from] RotorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The blade order of the four candidates `F ∈ {∅, 12, 13, 23}`.
pub fn candidate_blades() -> [Blade; 4] {
    [Blade::SCALAR, Blade::from_mask(0b011), Blade::from_mask(0b101), Blade::from_mask(0b110)]
}

macro_rules! four_component {
    ($name:ident) => {
        impl $name {
            pub const ONE: $name = $name::new(1.0, 0.0, 0.0, 0.0);
            pub const I: $name = $name::new(0.0, 1.0, 0.0, 0.0);
            pub const J: $name = $name::new(0.0, 0.0, 1.0, 0.0);
            pub const K: $name = $name::new(0.0, 0.0, 0.0, 1.0);

            pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
                $name { a, b, c, d }
            }

            pub fn components(&self) -> [f64; 4] {
                [self.a, self.b, self.c, self.d]
            }

            pub fn conj(&self) -> Self {
                $name::new(self.a, -self.b, -self.c, -self.d)
            }

            pub fn scale(&self, s: f64) -> Self {
                $name::new(self.a * s, self.b * s, self.c * s, self.d * s)
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.components().iter().zip(other.components()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
            }

            /// Distance to `other` or `−other`, whichever is smaller.
            pub fn distance_up_to_sign(&self, other: &Self) -> f64 {
                self.max_abs_diff(other).min(self.max_abs_diff(&-*other))
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, o: $name) -> $name {
                $name::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, o: $name) -> $name {
                $name::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scale(-1.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} + {}i + {}j + {}k", self.a, self.b, self.c, self.d)
            }
        }
    };
}

/// `a + bi + cj + dk` with `i² = j² = k² = ijk = −1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// `a + bi + cj + dk` with `i² = −1`, `j² = k² = +1`, `ijk = +1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct SplitQuaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

four_component!(Quaternion);
four_component!(SplitQuaternion);

impl Quaternion {
    /// `q̄q = a² + b² + c² + d²`.
    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }
}

impl SplitQuaternion {
    /// `q̄q = a² + b² − c² − d²`.
    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b - self.c * self.c - self.d * self.d
    }
}

/// Quaternion product.
pub fn qmul(x: Quaternion, y: Quaternion) -> Quaternion {
    Quaternion::new(
        x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d,
        x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c,
        x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
        x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a,
    )
}

/// Split-quaternion product.
///
/// Table: `i² = −1, j² = k² = 1, ij = k = −ji, jk = −i = −kj, ki = j = −ik`.
pub fn sqmul(x: SplitQuaternion, y: SplitQuaternion) -> SplitQuaternion {
    SplitQuaternion::new(
        x.a * y.a - x.b * y.b + x.c * y.c + x.d * y.d,
        x.a * y.b + x.b * y.a - x.c * y.d + x.d * y.c,
        x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b,
        x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a,
    )
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        qmul(self, rhs)
    }
}

impl Mul for SplitQuaternion {
    type Output = SplitQuaternion;
    fn mul(self, rhs: SplitQuaternion) -> SplitQuaternion {
        sqmul(self, rhs)
    }
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2C(pub [[Complex64; 2]; 2]);

impl Mat2C {
    pub fn identity() -> Self {
        Self::diag(1.0, 1.0)
    }

    pub fn diag(x: f64, y: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Mat2C([[Complex64::new(x, 0.0), z], [z, Complex64::new(y, 0.0)]])
    }

    /// Pauli matrix `σ_k`, `k = 0..=3`.
    pub fn pauli(k: usize) -> Self {
        let o = Complex64::new(0.0, 0.0);
        let r = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match k {
            0 => Mat2C([[r, o], [o, r]]),
            1 => Mat2C([[o, r], [r, o]]),
            2 => Mat2C([[o, -i], [i, o]]),
            3 => Mat2C([[r, o], [o, -r]]),
            _ => panic!("Pauli index {k} out of range"),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2C([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2C([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Mat2C) -> f64 {
        let mut out = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                out = out.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        out
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, rhs: Mat2C) -> Mat2C {
        let (x, y) = (&self.0, &rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = x[r][0] * y[0][c] + x[r][1] * y[1][c];
            }
        }
        Mat2C(out)
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, rhs: Mat2C) -> Mat2C {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(rhs.0) {
            for (x, y) in row.iter_mut().zip(other) {
                *x += y;
            }
        }
        Mat2C(out)
    }
}

/// `aσ₀ + b iσ₃ + c iσ₂ + d iσ₁ = [[a+bi, c+di], [−c+di, a−bi]]`.
pub fn quaternion_to_su2(q: Quaternion) -> Mat2C {
    Mat2C([
        [Complex64::new(q.a, q.b), Complex64::new(q.c, q.d)],
        [Complex64::new(-q.c, q.d), Complex64::new(q.a, -q.b)],
    ])
}

/// `aσ₀ + b iσ₃ + cσ₁ − dσ₂ = [[a+bi, c+di], [c−di, a−bi]]`.
pub fn split_to_su11(q: SplitQuaternion) -> Mat2C {
    Mat2C([
        [Complex64::new(q.a, q.b), Complex64::new(q.c, q.d)],
        [Complex64::new(q.c, -q.d), Complex64::new(q.a, -q.b)],
    ])
}

fn even_components(u: &Multivector) -> Result<[f64; 4], DivisionError> {
    let [e, e12, e13, e23] = candidate_blades();
    let known = [e, e12, e13, e23];
    if u.terms().any(|(b, c)| !known.contains(&b) && c != 0.0) {
        return Err(DivisionError::NotEven);
    }
    Ok([u.get(e), u.get(e12), u.get(e13), u.get(e23)])
}

fn even_element(sig: Signature, comps: [f64; 4]) -> Multivector {
    let mut m = Multivector::zero(sig);
    for (blade, c) in candidate_blades().into_iter().zip(comps) {
        m.set(blade, c).expect("n = 3 blades");
    }
    m
}

fn expect_sig(got: Signature, p: usize, q: usize) -> Result<Signature, DivisionError> {
    let expected = Signature::new(p, q)?;
    if got != expected {
        return Err(DivisionError::WrongSignature { expected, got });
    }
    Ok(expected)
}

/// `a + b e₁₂ + c e₁₃ − d e₂₃` in `Cl(3,0)`.
pub fn quaternion_to_multivector(q: Quaternion) -> Multivector {
    even_element(Signature::new(3, 0).expect("valid"), [q.a, q.b, q.c, -q.d])
}

/// `a + b e₁₂ + c e₁₃ − d e₂₃` in `Cl(2,1)`.
pub fn split_to_multivector(q: SplitQuaternion) -> Multivector {
    even_element(Signature::new(2, 1).expect("valid"), [q.a, q.b, q.c, -q.d])
}

pub fn multivector_to_quaternion(u: &Multivector) -> Result<Quaternion, DivisionError> {
    expect_sig(u.sig(), 3, 0)?;
    let [a, b, c, d] = even_components(u)?;
    Ok(Quaternion::new(a, b, c, -d))
}

pub fn multivector_to_split(u: &Multivector) -> Result<SplitQuaternion, DivisionError> {
    expect_sig(u.sig(), 2, 1)?;
    let [a, b, c, d] = even_components(u)?;
    Ok(SplitQuaternion::new(a, b, c, -d))
}

/// Unit quaternion as a `Spin(3)` rotor.
pub fn quaternion_to_rotor(q: Quaternion) -> Result<Rotor, DivisionError> {
    Ok(Rotor::new(quaternion_to_multivector(q))?)
}

/// Unit split-quaternion as a `Spin₊(2,1)` rotor.
pub fn split_to_rotor(q: SplitQuaternion) -> Result<Rotor, DivisionError> {
    Ok(Rotor::new(split_to_multivector(q))?)
}

pub fn rotor_to_quaternion(r: &Rotor) -> Result<Quaternion, DivisionError> {
    multivector_to_quaternion(r.value())
}

pub fn rotor_to_split(r: &Rotor) -> Result<SplitQuaternion, DivisionError> {
    multivector_to_split(r.value())
}

/// The four quaternions `Q_∅, Q₁₂, Q₁₃, Q₂₃` for `P ∈ SO(3)`.
pub fn so3_to_quaternion_candidates(p: &OrthoMatrix) -> Result<[Quaternion; 4], DivisionError> {
    expect_sig(p.sig(), 3, 0)?;
    let e = |b, a| p.entry(b, a);
    Ok([
        Quaternion::new(1.0 + e(1, 1) + e(2, 2) + e(3, 3), e(1, 2) - e(2, 1), e(1, 3) - e(3, 1), -e(2, 3) + e(3, 2)),
        Quaternion::new(e(1, 2) - e(2, 1), 1.0 - e(1, 1) - e(2, 2) + e(3, 3), -e(2, 3) - e(3, 2), -e(1, 3) - e(3, 1)),
        Quaternion::new(e(1, 3) - e(3, 1), -e(2, 3) - e(3, 2), 1.0 - e(1, 1) + e(2, 2) - e(3, 3), e(1, 2) + e(2, 1)),
        Quaternion::new(e(2, 3) - e(3, 2), e(1, 3) + e(3, 1), -e(1, 2) - e(2, 1), -1.0 - e(1, 1) + e(2, 2) + e(3, 3)),
    ])
}

/// The four split-quaternions `Q_∅, Q₁₂, Q₁₃, Q₂₃` for `P ∈ SO₊(2,1)`.
pub fn so21_to_split_quaternion_candidates(p: &OrthoMatrix) -> Result<[SplitQuaternion; 4], DivisionError> {
    expect_sig(p.sig(), 2, 1)?;
    let e = |b, a| p.entry(b, a);
    Ok([
        SplitQuaternion::new(1.0 + e(1, 1) + e(2, 2) + e(3, 3), e(1, 2) - e(2, 1), -e(1, 3) - e(3, 1), e(2, 3) + e(3, 2)),
        SplitQuaternion::new(e(1, 2) - e(2, 1), 1.0 - e(1, 1) - e(2, 2) + e(3, 3), e(2, 3) - e(3, 2), e(1, 3) - e(3, 1)),
        SplitQuaternion::new(e(1, 3) + e(3, 1), -e(2, 3) + e(3, 2), 1.0 - e(1, 1) + e(2, 2) - e(3, 3), e(1, 2) + e(2, 1)),
        SplitQuaternion::new(e(2, 3) + e(3, 2), e(1, 3) - e(3, 1), -e(1, 2) - e(2, 1), -1.0 - e(1, 1) + e(2, 2) + e(3, 3)),
    ])
}

/// Index of the candidate with the largest positive `q̄q`, first wins ties.
fn pick(norms: [f64; 4]) -> Result<usize, DivisionError> {
    // same relative threshold as the Clifford n = 3 path, whose scale is 4
    let threshold = CANDIDATE_THRESHOLD * 16.0;
    let mut best = 0;
    for i in 1..4 {
        if norms[i] > norms[best] {
            best = i;
        }
    }
    if norms[best] > threshold {
        Ok(best)
    } else {
        Err(DivisionError::NoCandidate { best: norms[best], threshold })
    }
}

/// Sign convention shared with [`Rotor`]: the largest coefficient of the
/// image `a + b e₁₂ + c e₁₃ − d e₂₃` is positive.
fn rotor_canonical_sign(comps: [f64; 4]) -> f64 {
    let image = [comps[0], comps[1], comps[2], -comps[3]];
    let max = image.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let lead = image.iter().find(|x| x.abs() >= max * (1.0 - TIE_REL)).copied().unwrap_or(1.0);
    if lead < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Selected `F` and the normalized unit quaternion.
pub fn so3_to_unit_quaternion_with_f(p: &OrthoMatrix) -> Result<(Blade, Quaternion), DivisionError> {
    let cands = so3_to_quaternion_candidates(p)?;
    let best = pick(cands.map(|q| q.norm_sq()))?;
    let q = cands[best];
    let x = q.scale(1.0 / q.norm_sq().sqrt());
    Ok((candidate_blades()[best], x.scale(rotor_canonical_sign(x.components()))))
}

/// `X = Q_F / sqrt(Q̄_F Q_F)` for the best-conditioned `F`.
pub fn so3_to_unit_quaternion(p: &OrthoMatrix) -> Result<Quaternion, DivisionError> {
    Ok(so3_to_unit_quaternion_with_f(p)?.1)
}

/// Selected `F` and the normalized unit split-quaternion.
pub fn so21_to_unit_split_quaternion_with_f(p: &OrthoMatrix) -> Result<(Blade, SplitQuaternion), DivisionError> {
    let cands = so21_to_split_quaternion_candidates(p)?;
    let best = pick(cands.map(|q| q.norm_sq()))?;
    let q = cands[best];
    let x = q.scale(1.0 / q.norm_sq().sqrt());
    Ok((candidate_blades()[best], x.scale(rotor_canonical_sign(x.components()))))
}

/// `X = Q_F / sqrt(Q̄_F Q_F)` over the candidates with `Q̄_F Q_F > 0`.
pub fn so21_to_unit_split_quaternion(p: &OrthoMatrix) -> Result<SplitQuaternion, DivisionError> {
    Ok(so21_to_unit_split_quaternion_with_f(p)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{matrix_to_rotor, Method};
    use crate::matrix_group::{check_membership, Matrix, DEFAULT_TOL};

    fn ortho(rows: &[Vec<f64>], p: usize, q: usize) -> OrthoMatrix {
        check_membership(Matrix::from_rows(rows).unwrap(), Signature::new(p, q).unwrap(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn quaternion_units() {
        type Q = Quaternion;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        for u in [Q::I, Q::J, Q::K] {
            assert_eq!(u * u, -Q::ONE);
        }
        assert_eq!(Q::I * Q::J * Q::K, -Q::ONE);
    }

    #[test]
    fn split_units() {
        type S = SplitQuaternion;
        assert_eq!(S::J * S::K, -S::I);
        assert_eq!(S::J * S::J, S::ONE);
        assert_eq!(S::K * S::K, S::ONE);
        assert_eq!(S::I * S::I, -S::ONE);
        assert_eq!(S::I * S::J * S::K, S::ONE);
    }

    /// Every product of two units, derived by hand from `i² = −1`,
    /// `j² = k² = 1`, `ijk = 1` and associativity:
    /// `ij = k⁻¹ = k`; `kj = (ij)j = i`; `ik = i(ij) = −j`;
    /// `jk = −i` since `i(jk) = 1`; `ji = −k` since `j(jk) = k`;
    /// `ki = (ij)i = i(ji) = −ik = j`.
    #[test]
    fn split_table_from_relations() {
        type S = SplitQuaternion;
        let units = [S::ONE, S::I, S::J, S::K];
        // table[r][c] = units[r] * units[c] as (sign, unit index)
        let table: [[(f64, usize); 4]; 4] = [
            [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
            [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
            [(1.0, 2), (-1.0, 3), (1.0, 0), (-1.0, 1)],
            [(1.0, 3), (1.0, 2), (1.0, 1), (1.0, 0)],
        ];
        for r in 0..4 {
            for c in 0..4 {
                let (sign, idx) = table[r][c];
                assert_eq!(units[r] * units[c], units[idx].scale(sign), "row {r} col {c}");
            }
        }
        assert_eq!(S::I * S::J * S::K, S::ONE);
    }

    #[test]
    fn conj_norms() {
        let q = Quaternion::new(1.0, -2.0, 3.0, 0.5);
        assert_eq!(q.conj() * q, Quaternion::new(q.norm_sq(), 0.0, 0.0, 0.0));
        let s = SplitQuaternion::new(1.0, -2.0, 3.0, 0.5);
        assert_eq!(s.conj() * s, SplitQuaternion::new(s.norm_sq(), 0.0, 0.0, 0.0));
        assert_eq!(s.norm_sq(), 1.0 + 4.0 - 9.0 - 0.25);
    }

    #[test]
    fn matrix_forms() {
        assert_eq!(quaternion_to_su2(Quaternion::ONE), Mat2C::identity());
        assert_eq!(split_to_su11(SplitQuaternion::ONE), Mat2C::identity());
        let z = Complex64::new(0.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(quaternion_to_su2(Quaternion::I), Mat2C([[i, z], [z, -i]]));
        let r = Complex64::new(1.0, 0.0);
        assert_eq!(split_to_su11(SplitQuaternion::J), Mat2C([[z, r], [r, z]]));
    }

    #[test]
    fn matrix_forms_match_pauli_expansions() {
        let q = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let i = Complex64::new(0.0, 1.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        let su2 = Mat2C::pauli(0).scale(re(q.a))
            + Mat2C::pauli(3).scale(i * q.b)
            + Mat2C::pauli(2).scale(i * q.c)
            + Mat2C::pauli(1).scale(i * q.d);
        assert!(su2.max_abs_diff(&quaternion_to_su2(q)) < 1e-15);

        let s = SplitQuaternion::new(0.3, -1.2, 0.7, 2.0);
        let su11 = Mat2C::pauli(0).scale(re(s.a))
            + Mat2C::pauli(3).scale(i * s.b)
            + Mat2C::pauli(1).scale(re(s.c))
            + Mat2C::pauli(2).scale(re(-s.d));
        assert!(su11.max_abs_diff(&split_to_su11(s)) < 1e-15);
    }

    #[test]
    fn pauli_relations() {
        let i = Complex64::new(0.0, 1.0);
        for k in 1..=3 {
            assert_eq!(Mat2C::pauli(k) * Mat2C::pauli(k), Mat2C::pauli(0));
        }
        let triple = (Mat2C::pauli(1) * Mat2C::pauli(2) * Mat2C::pauli(3)).scale(-i);
        assert_eq!(triple, Mat2C::pauli(0));
    }

    #[test]
    fn bridge_basics() {
        let e = quaternion_to_multivector(Quaternion::ONE);
        assert_eq!(e, Multivector::one(Signature::new(3, 0).unwrap()));
        let k = quaternion_to_multivector(Quaternion::K);
        assert_eq!(k.get(Blade::from_mask(0b110)), -1.0);
        assert_eq!(multivector_to_quaternion(&k).unwrap(), Quaternion::K);
        let sk = split_to_multivector(SplitQuaternion::K);
        assert_eq!(sk.get(Blade::from_mask(0b110)), -1.0);
        assert!(matches!(multivector_to_split(&k), Err(DivisionError::WrongSignature { .. })));
        let odd = Multivector::generator(Signature::new(3, 0).unwrap(), 1).unwrap();
        assert_eq!(multivector_to_quaternion(&odd), Err(DivisionError::NotEven));
    }

    #[test]
    fn so3_candidate_examples() {
        let id = ortho(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 3, 0);
        assert_eq!(so3_to_quaternion_candidates(&id).unwrap()[0], Quaternion::new(4.0, 0.0, 0.0, 0.0));
        assert_eq!(so3_to_unit_quaternion(&id).unwrap(), Quaternion::ONE);

        let flip = ortho(&[vec![1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, -1.0]], 3, 0);
        let c = so3_to_quaternion_candidates(&flip).unwrap();
        for q in &c[..3] {
            assert_eq!(q.norm_sq(), 0.0);
        }
        assert_eq!(c[3], Quaternion::new(0.0, 0.0, 0.0, -4.0));
        let x = so3_to_unit_quaternion(&flip).unwrap();
        assert_eq!(x.distance_up_to_sign(&Quaternion::K), 0.0);

        let zrot = ortho(&[vec![0.0, -1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]], 3, 0);
        assert_eq!(so3_to_quaternion_candidates(&zrot).unwrap()[0], Quaternion::new(2.0, -2.0, 0.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = so3_to_unit_quaternion(&zrot).unwrap();
        assert!(x.distance_up_to_sign(&Quaternion::new(h, -h, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn so3_agrees_with_clifford_n3_path() {
        let zrot = ortho(&[vec![0.0, -1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]], 3, 0);
        let l = crate::covering::candidate_n3(&zrot, Blade::SCALAR).unwrap().m;
        assert_eq!(multivector_to_quaternion(&l).unwrap(), so3_to_quaternion_candidates(&zrot).unwrap()[0]);
        let r = matrix_to_rotor(&zrot, Method::N3).unwrap();
        let x = so3_to_unit_quaternion(&zrot).unwrap();
        assert!(quaternion_to_multivector(x).max_abs_diff(r.value()) < 1e-15);
    }

    #[test]
    fn so21_examples() {
        let id = ortho(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 2, 1);
        assert_eq!(so21_to_split_quaternion_candidates(&id).unwrap()[0], SplitQuaternion::new(4.0, 0.0, 0.0, 0.0));
        assert_eq!(so21_to_unit_split_quaternion(&id).unwrap(), SplitQuaternion::ONE);

        for phi in [0.4f64, 2.0, -2.5] {
            let (c, s) = (phi.cos(), phi.sin());
            let p = ortho(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]], 2, 1);
            let q0 = so21_to_split_quaternion_candidates(&p).unwrap()[0];
            assert!(q0.max_abs_diff(&SplitQuaternion::new(2.0 * (1.0 + c), -2.0 * s, 0.0, 0.0)) < 1e-15);
            let x = so21_to_unit_split_quaternion(&p).unwrap();
            let expected = SplitQuaternion::new((phi / 2.0).cos(), -(phi / 2.0).sin(), 0.0, 0.0);
            assert!(x.distance_up_to_sign(&expected) < 1e-15);
        }
    }

    #[test]
    fn so21_boost_matches_clifford() {
        let phi = 1.7f64;
        let (ch, sh) = (phi.cosh(), phi.sinh());
        let p = ortho(&[vec![ch, 0.0, sh], vec![0.0, 1.0, 0.0], vec![sh, 0.0, ch]], 2, 1);
        let x = so21_to_unit_split_quaternion(&p).unwrap();
        let r = matrix_to_rotor(&p, Method::General).unwrap();
        assert!(split_to_multivector(x).max_abs_diff(r.value()) < 1e-13);
        assert!((x.norm_sq() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn wrong_signature_rejected() {
        let id = ortho(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], 2, 1);
        assert!(matches!(so3_to_quaternion_candidates(&id), Err(DivisionError::WrongSignature { .. })));
    }
}
