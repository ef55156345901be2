//! Real Clifford algebra `Cl(p,q)` with dense, bitmask-indexed coefficients.
//!
//! A basis blade `e_A` is stored as a bitmask: bit `i` set means generator
//! `e_{i+1}` is a factor. Generators inside a blade are always kept in
//! ascending order, so every mask names exactly one basis element.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Default upper bound on `n = p + q`.
pub const DEFAULT_MAX_DIM: usize = 12;

/// Hard upper bound; masks are `u32` and the dense vector has `2^n` slots.
pub const ABSOLUTE_MAX_DIM: usize = 20;

/// Absolute threshold below which a coefficient counts as zero for display
/// and comparison.
pub const ZERO_THRESHOLD: f64 = 1e-12;

const EXP_SERIES_TERMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("signature ({p},{q}) has dimension {n}, outside 1..={max}")]
    BadDimension { p: usize, q: usize, n: usize, max: usize },
    #[error("signature mismatch: ({0}) vs ({1})")]
    SignatureMismatch(Signature, Signature),
    #[error("grade {k} out of range for n = {n}")]
    GradeOutOfRange { k: usize, n: usize },
    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientLength { got: usize, expected: usize },
    #[error("blade index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("generator indices must be strictly ascending: {0:?}")]
    UnorderedIndices(Vec<usize>),
    #[error("invalid blade name {0:?}")]
    BadBladeName(String),
    #[error("expected a pure bivector, found grade-{grade} component {value:e}")]
    NotABivector { grade: usize, value: f64 },
}

/// Signature `(p,q)` of the metric `η = diag(+1 × p, −1 × q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self, AlgebraError> {
        Self::with_max_dim(p, q, DEFAULT_MAX_DIM)
    }

    /// Like [`Signature::new`] with a caller-chosen dimension cap (itself
    /// capped at [`ABSOLUTE_MAX_DIM`]).
    pub fn with_max_dim(p: usize, q: usize, max: usize) -> Result<Self, AlgebraError> {
        let max = max.min(ABSOLUTE_MAX_DIM);
        let n = p + q;
        if n == 0 || n > max {
            return Err(AlgebraError::BadDimension { p, q, n, max });
        }
        Ok(Signature { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// `2^n`, the number of basis blades.
    pub fn num_blades(&self) -> usize {
        1 << self.dim()
    }

    /// `η_aa` for the 1-based generator index `a`.
    pub fn metric(&self, a: usize) -> f64 {
        debug_assert!(a >= 1 && a <= self.dim());
        if a <= self.p {
            1.0
        } else {
            -1.0
        }
    }

    /// Mask of the generators squaring to `-1`.
    pub(crate) fn negative_mask(&self) -> u32 {
        ((1u32 << self.dim()) - 1) & !((1u32 << self.p) - 1)
    }

    /// Bitmask with all `n` generator bits set (the pseudoscalar).
    pub fn pseudoscalar(&self) -> Blade {
        Blade((1u32 << self.dim()) - 1)
    }

    /// All blades in ascending mask order.
    pub fn blades(&self) -> impl Iterator<Item = Blade> {
        (0..self.num_blades() as u32).map(Blade)
    }

    /// All blades of grade `k`, ascending by mask.
    pub fn blades_of_grade(&self, k: usize) -> impl Iterator<Item = Blade> {
        self.blades().filter(move |b| b.grade() == k)
    }

    /// Even-grade blades ordered by `(grade, mask)`.
    pub fn even_blades(&self) -> Vec<Blade> {
        let mut out: Vec<Blade> = self.blades().filter(|b| b.is_even()).collect();
        out.sort_by_key(|b| (b.grade(), b.mask()));
        out
    }

    /// The diagonal metric `η` as a dense `n × n` row-major matrix.
    pub fn eta(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        for a in 1..=n {
            out[(a - 1) * n + (a - 1)] = self.metric(a);
        }
        out
    }

    fn check_blade(&self, b: Blade) -> Result<(), AlgebraError> {
        if (b.0 as usize) >= self.num_blades() {
            let index = 32 - b.0.leading_zeros() as usize;
            return Err(AlgebraError::IndexOutOfRange { index, n: self.dim() });
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

/// A basis element `e_A`, stored as the bitmask of its generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blade(u32);

impl Blade {
    /// The identity `e`.
    pub const SCALAR: Blade = Blade(0);

    pub const fn from_mask(mask: u32) -> Self {
        Blade(mask)
    }

    /// Generator `e_a`, 1-based.
    pub fn generator(a: usize) -> Self {
        assert!((1..=ABSOLUTE_MAX_DIM).contains(&a), "generator index {a} out of range");
        Blade(1 << (a - 1))
    }

    /// Blade from strictly ascending 1-based generator indices.
    pub fn from_indices(indices: &[usize]) -> Result<Self, AlgebraError> {
        let mut mask = 0u32;
        let mut last = 0;
        for &i in indices {
            if i == 0 || i > ABSOLUTE_MAX_DIM {
                return Err(AlgebraError::IndexOutOfRange { index: i, n: ABSOLUTE_MAX_DIM });
            }
            if i <= last {
                return Err(AlgebraError::UnorderedIndices(indices.to_vec()));
            }
            last = i;
            mask |= 1 << (i - 1);
        }
        Ok(Blade(mask))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_even(self) -> bool {
        self.grade().is_multiple_of(2)
    }

    /// Ascending 1-based generator indices.
    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).map(|i| i + 1).collect()
    }

    /// Serialized name: `"1"` for the scalar, otherwise `"e"` followed by
    /// the ascending generator indices, e.g. `"e12"`.
    ///
    /// Concatenation is ambiguous once an index reaches 10, so blades that
    /// contain such an index write every index behind a `_` (`"e_1_2_10"`).
    pub fn name(self) -> String {
        if self.0 == 0 {
            return "1".to_string();
        }
        let indices = self.indices();
        let parts: Vec<String> = indices.iter().map(usize::to_string).collect();
        if indices.iter().any(|&i| i >= 10) {
            format!("e_{}", parts.join("_"))
        } else {
            format!("e{}", parts.concat())
        }
    }

    /// Parses a name produced by [`Blade::name`] for an algebra of
    /// dimension `n`.
    pub fn parse(name: &str, n: usize) -> Result<Self, AlgebraError> {
        let bad = || AlgebraError::BadBladeName(name.to_string());
        if name == "1" {
            return Ok(Blade::SCALAR);
        }
        let body = name.strip_prefix('e').ok_or_else(bad)?;
        if body.is_empty() {
            return Err(bad());
        }
        let indices: Vec<usize> = if let Some(list) = body.strip_prefix('_') {
            list.split('_').map(|t| t.parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else {
            body.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        if indices.iter().any(|&i| i == 0 || i > n) {
            return Err(bad());
        }
        Blade::from_indices(&indices).map_err(|_| bad())
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Signed product `e_A e_B = sign · e_{A xor B}`.
///
/// The sign is the transposition parity needed to merge the two ascending
/// generator lists, times the metric of every generator shared by both.
pub fn blade_product(a: Blade, b: Blade, sig: Signature) -> (i8, Blade) {
    let mut swaps = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let j = rest.trailing_zeros();
        // generators of `a` strictly above `j` must hop over e_{j+1}
        swaps += (a.0 >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    swaps += (a.0 & b.0 & sig.negative_mask()).count_ones();
    let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
    (sign, Blade(a.0 ^ b.0))
}

/// `(-1)^{k(k-1)/2}`, the reversion sign of a grade-`k` blade.
pub fn reversion_sign(k: usize) -> i8 {
    if (k / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Signed blade `e^A = (e_A)^{-1}`.
pub fn blade_inverse(a: Blade, sig: Signature) -> (i8, Blade) {
    // e^A = ẽ_A / (e_A ẽ_A); with ẽ_A = ±e_A this collapses to e_A / (e_A e_A).
    let (square, _) = blade_product(a, a, sig);
    (square, a)
}

/// Dense multivector over the `2^n` blade basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    sig: Signature,
    coeffs: Vec<f64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Multivector { sig, coeffs: vec![0.0; sig.num_blades()] }
    }

    pub fn scalar(sig: Signature, value: f64) -> Self {
        let mut out = Self::zero(sig);
        out.coeffs[0] = value;
        out
    }

    pub fn one(sig: Signature) -> Self {
        Self::scalar(sig, 1.0)
    }

    /// `coef · e_A`.
    pub fn from_blade(sig: Signature, blade: Blade, coef: f64) -> Result<Self, AlgebraError> {
        sig.check_blade(blade)?;
        let mut out = Self::zero(sig);
        out.coeffs[blade.0 as usize] = coef;
        Ok(out)
    }

    /// Generator `e_a`, 1-based.
    pub fn generator(sig: Signature, a: usize) -> Result<Self, AlgebraError> {
        if a == 0 || a > sig.dim() {
            return Err(AlgebraError::IndexOutOfRange { index: a, n: sig.dim() });
        }
        Self::from_blade(sig, Blade::generator(a), 1.0)
    }

    /// Grade-1 element `Σ_b x_b e_b`.
    pub fn vector(sig: Signature, components: &[f64]) -> Result<Self, AlgebraError> {
        if components.len() != sig.dim() {
            return Err(AlgebraError::CoefficientLength { got: components.len(), expected: sig.dim() });
        }
        let mut out = Self::zero(sig);
        for (i, &x) in components.iter().enumerate() {
            out.coeffs[1 << i] = x;
        }
        Ok(out)
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<f64>) -> Result<Self, AlgebraError> {
        if coeffs.len() != sig.num_blades() {
            return Err(AlgebraError::CoefficientLength { got: coeffs.len(), expected: sig.num_blades() });
        }
        Ok(Multivector { sig, coeffs })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Coefficients indexed by blade mask.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, blade: Blade) -> f64 {
        self.coeffs.get(blade.0 as usize).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, blade: Blade, value: f64) -> Result<(), AlgebraError> {
        self.sig.check_blade(blade)?;
        self.coeffs[blade.0 as usize] = value;
        Ok(())
    }

    pub(crate) fn add_to(&mut self, blade: Blade, value: f64) {
        self.coeffs[blade.0 as usize] += value;
    }

    /// Nonzero `(blade, coefficient)` pairs, ascending by mask.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, c)| (Blade(m as u32), *c))
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest absolute coefficient outside grade 0.
    pub fn max_abs_nonscalar(&self) -> f64 {
        self.coeffs[1..].iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Largest absolute coefficientwise difference.
    pub fn max_abs_diff(&self, other: &Multivector) -> f64 {
        assert_eq!(self.sig, other.sig, "signature mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, s: f64) -> Multivector {
        Multivector { sig: self.sig, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn geometric_product(&self, other: &Multivector) -> Result<Multivector, AlgebraError> {
        if self.sig != other.sig {
            return Err(AlgebraError::SignatureMismatch(self.sig, other.sig));
        }
        let mut out = Multivector::zero(self.sig);
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                let (sign, c) = blade_product(a, b, self.sig);
                out.coeffs[c.0 as usize] += f64::from(sign) * x * y;
            }
        }
        Ok(out)
    }

    /// Reversion: grade `k` scaled by `(-1)^{k(k-1)/2}`.
    pub fn reverse(&self) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * f64::from(reversion_sign(m.count_ones() as usize)))
            .collect();
        Multivector { sig: self.sig, coeffs }
    }

    /// `⟨U⟩_k`.
    pub fn grade_project(&self, k: usize) -> Result<Multivector, AlgebraError> {
        let n = self.sig.dim();
        if k > n {
            return Err(AlgebraError::GradeOutOfRange { k, n });
        }
        Ok(self.filter(|b| b.grade() == k))
    }

    pub fn even_part(&self) -> Multivector {
        self.filter(Blade::is_even)
    }

    pub fn odd_part(&self) -> Multivector {
        self.filter(|b| !b.is_even())
    }

    /// Projection onto the center: grade 0 for even `n`, grades 0 and `n`
    /// for odd `n`.
    pub fn center_project(&self) -> Multivector {
        let n = self.sig.dim();
        self.filter(|b| b.grade() == 0 || (n % 2 == 1 && b.grade() == n))
    }

    fn filter(&self, keep: impl Fn(Blade) -> bool) -> Multivector {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| if keep(Blade(m as u32)) { *c } else { 0.0 })
            .collect();
        Multivector { sig: self.sig, coeffs }
    }

    /// Scalar part of `reverse(self) · self`, computed without forming the
    /// full product.
    pub fn reverse_norm_sq(&self) -> f64 {
        self.terms()
            .map(|(b, c)| {
                let (sq, _) = blade_product(b, b, self.sig);
                f64::from(reversion_sign(b.grade()) * sq) * c * c
            })
            .sum()
    }

    /// Exponential of a pure bivector.
    ///
    /// Truncated power series with argument halving until the coefficient
    /// ∞-norm is at most 1, followed by repeated squaring.
    pub fn exp_bivector(&self) -> Result<Multivector, AlgebraError> {
        for (b, c) in self.terms() {
            if b.grade() != 2 {
                return Err(AlgebraError::NotABivector { grade: b.grade(), value: c });
            }
        }
        let mut squarings = 0;
        let mut norm = self.max_abs();
        while norm > 1.0 {
            norm /= 2.0;
            squarings += 1;
        }
        let arg = self.scale(0.5f64.powi(squarings));

        let mut sum = Multivector::one(self.sig);
        let mut term = Multivector::one(self.sig);
        for k in 1..=EXP_SERIES_TERMS {
            term = (&term * &arg).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        // products of even elements are even; drop any roundoff in odd slots
        Ok(sum.even_part())
    }

    /// Same value with components below [`ZERO_THRESHOLD`] set to zero.
    pub fn chopped(&self) -> Multivector {
        self.filter_values(|c| if c.abs() <= ZERO_THRESHOLD { 0.0 } else { c })
    }

    fn filter_values(&self, f: impl Fn(f64) -> f64) -> Multivector {
        Multivector { sig: self.sig, coeffs: self.coeffs.iter().map(|c| f(*c)).collect() }
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, c) in self.terms().filter(|(_, c)| c.abs() > ZERO_THRESHOLD) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if b == Blade::SCALAR {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{b}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<'a> Add for &'a Multivector {
    type Output = Multivector;

    fn add(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Multivector { sig: self.sig, coeffs }
    }
}

impl<'a> Sub for &'a Multivector {
    type Output = Multivector;

    fn sub(self, rhs: &'a Multivector) -> Multivector {
        assert_eq!(self.sig, rhs.sig, "signature mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Multivector { sig: self.sig, coeffs }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;

    fn neg(self) -> Multivector {
        self.scale(-1.0)
    }
}

/// Geometric product. Panics on signature mismatch; use
/// [`Multivector::geometric_product`] for a checked version.
impl<'a> Mul for &'a Multivector {
    type Output = Multivector;

    fn mul(self, rhs: &'a Multivector) -> Multivector {
        self.geometric_product(rhs).expect("geometric product of mismatched signatures")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn b(indices: &[usize]) -> Blade {
        Blade::from_indices(indices).unwrap()
    }

    #[test]
    fn signature_bounds() {
        assert!(Signature::new(0, 0).is_err());
        assert!(Signature::new(7, 6).is_err());
        assert!(Signature::new(6, 6).is_ok());
        assert!(Signature::with_max_dim(7, 6, 14).is_ok());
        let s = sig(2, 1);
        assert_eq!(s.metric(1), 1.0);
        assert_eq!(s.metric(2), 1.0);
        assert_eq!(s.metric(3), -1.0);
    }

    #[test]
    fn blade_product_examples() {
        assert_eq!(blade_product(b(&[1]), b(&[1]), sig(1, 1)), (1, Blade::SCALAR));
        assert_eq!(blade_product(b(&[2]), b(&[2]), sig(1, 1)), (-1, Blade::SCALAR));
        for s in [sig(2, 0), sig(1, 1), sig(0, 2), sig(2, 1)] {
            assert_eq!(blade_product(b(&[2]), b(&[1]), s), (-1, b(&[1, 2])));
        }
        assert_eq!(blade_product(b(&[1, 2]), b(&[1, 2]), sig(2, 0)), (-1, Blade::SCALAR));
        assert_eq!(blade_product(b(&[1, 2]), b(&[1, 2]), sig(1, 1)), (1, Blade::SCALAR));
    }

    #[test]
    fn generator_relations_exact() {
        for (p, q) in [(3, 0), (2, 1), (1, 2), (0, 3), (3, 2)] {
            let s = sig(p, q);
            for a in 1..=s.dim() {
                for c in 1..=s.dim() {
                    let ea = Multivector::generator(s, a).unwrap();
                    let ec = Multivector::generator(s, c).unwrap();
                    let anti = &(&ea * &ec) + &(&ec * &ea);
                    let expected = if a == c { 2.0 * s.metric(a) } else { 0.0 };
                    assert_eq!(anti, Multivector::scalar(s, expected));
                }
            }
        }
    }

    #[test]
    fn reverse_examples() {
        let s = sig(3, 0);
        let e = Multivector::one(s);
        assert_eq!(e.reverse(), e);
        let e12 = Multivector::from_blade(s, b(&[1, 2]), 1.0).unwrap();
        assert_eq!(e12.reverse(), -&e12);
        let e123 = Multivector::from_blade(s, b(&[1, 2, 3]), 1.0).unwrap();
        assert_eq!(e123.reverse(), -&e123);
        let e1 = Multivector::generator(s, 1).unwrap();
        assert_eq!(e1.reverse(), e1);
    }

    #[test]
    fn grade_project_examples() {
        let s = sig(2, 0);
        let mut u = Multivector::one(s);
        u.set(b(&[1, 2]), 2.0).unwrap();
        assert_eq!(u.grade_project(0).unwrap(), Multivector::one(s));
        assert_eq!(u.grade_project(2).unwrap(), Multivector::from_blade(s, b(&[1, 2]), 2.0).unwrap());
        assert_eq!(u.grade_project(3), Err(AlgebraError::GradeOutOfRange { k: 3, n: 2 }));
    }

    #[test]
    fn blade_inverse_examples() {
        assert_eq!(blade_inverse(b(&[1]), sig(2, 0)), (1, b(&[1])));
        assert_eq!(blade_inverse(b(&[2, 3]), sig(3, 0)), (-1, b(&[2, 3])));
        assert_eq!(blade_inverse(b(&[1, 2]), sig(1, 1)), (1, b(&[1, 2])));
        assert_eq!(blade_inverse(b(&[2]), sig(1, 1)), (-1, b(&[2])));
    }

    #[test]
    fn blade_inverse_is_exact_everywhere() {
        for (p, q) in [(4, 0), (2, 2), (1, 3), (3, 2)] {
            let s = sig(p, q);
            for blade in s.blades() {
                let (si, inv) = blade_inverse(blade, s);
                let (sp, prod) = blade_product(blade, inv, s);
                assert_eq!((si * sp, prod), (1, Blade::SCALAR), "{blade} in ({s})");
            }
        }
    }

    #[test]
    fn grade_dimensions_are_binomial() {
        let s = sig(3, 2);
        let binom = [1, 5, 10, 10, 5, 1];
        for (k, expected) in binom.iter().enumerate() {
            assert_eq!(s.blades_of_grade(k).count(), *expected);
        }
        assert_eq!(binom.iter().sum::<usize>(), s.num_blades());
    }

    #[test]
    fn center_project_examples() {
        let s2 = sig(2, 0);
        let mut u = Multivector::scalar(s2, 1.5);
        u.set(b(&[1]), 2.0).unwrap();
        u.set(b(&[1, 2]), 3.0).unwrap();
        assert_eq!(u.center_project(), Multivector::scalar(s2, 1.5));

        let s3 = sig(3, 0);
        let mut v = Multivector::scalar(s3, 1.5);
        v.set(b(&[1]), 2.0).unwrap();
        v.set(b(&[1, 2, 3]), 3.0).unwrap();
        let mut expected = Multivector::scalar(s3, 1.5);
        expected.set(b(&[1, 2, 3]), 3.0).unwrap();
        assert_eq!(v.center_project(), expected);
    }

    #[test]
    fn exp_bivector_examples() {
        let zero = Multivector::zero(sig(3, 0));
        assert_eq!(zero.exp_bivector().unwrap(), Multivector::one(sig(3, 0)));

        for phi in [0.3f64, 1.0, 2.5, -4.0, 7.0] {
            let s = sig(2, 0);
            let bv = Multivector::from_blade(s, b(&[1, 2]), -phi / 2.0).unwrap();
            let r = bv.exp_bivector().unwrap();
            assert!((r.get(Blade::SCALAR) - (phi / 2.0).cos()).abs() < 1e-13);
            assert!((r.get(b(&[1, 2])) + (phi / 2.0).sin()).abs() < 1e-13);

            let s = sig(1, 1);
            let bv = Multivector::from_blade(s, b(&[1, 2]), -phi / 2.0).unwrap();
            let r = bv.exp_bivector().unwrap();
            let tol = 1e-13 * (phi / 2.0).cosh();
            assert!((r.get(Blade::SCALAR) - (phi / 2.0).cosh()).abs() < tol);
            assert!((r.get(b(&[1, 2])) + (phi / 2.0).sinh()).abs() < tol);
        }
    }

    #[test]
    fn exp_rejects_non_bivectors() {
        let s = sig(3, 0);
        let v = Multivector::generator(s, 1).unwrap();
        assert!(matches!(v.exp_bivector(), Err(AlgebraError::NotABivector { grade: 1, .. })));
    }

    #[test]
    fn mismatched_signatures() {
        let u = Multivector::one(sig(2, 0));
        let v = Multivector::one(sig(1, 1));
        assert!(matches!(u.geometric_product(&v), Err(AlgebraError::SignatureMismatch(..))));
    }

    #[test]
    fn blade_names() {
        assert_eq!(Blade::SCALAR.name(), "1");
        assert_eq!(b(&[1, 2, 3]).name(), "e123");
        assert_eq!(Blade::parse("e23", 3).unwrap(), b(&[2, 3]));
        assert_eq!(Blade::parse("1", 3).unwrap(), Blade::SCALAR);
        assert_eq!(b(&[1, 2, 10]).name(), "e_1_2_10");
        assert_eq!(b(&[12]).name(), "e_12");
        assert_eq!(Blade::parse("e_10_11", 12).unwrap(), b(&[10, 11]));
        assert_eq!(Blade::parse("e_1_2_10", 12).unwrap(), b(&[1, 2, 10]));
        assert_eq!(Blade::parse("e_12", 12).unwrap(), b(&[12]));
        assert_eq!(Blade::parse("e12", 12).unwrap(), b(&[1, 2]));
        assert!(Blade::parse("e21", 3).is_err());
        assert!(Blade::parse("e4", 3).is_err());
        assert!(Blade::parse("x1", 3).is_err());
        assert!(Blade::parse("e", 3).is_err());
    }

    #[test]
    fn names_round_trip_for_all_blades_up_to_twelve() {
        let s = sig(7, 5);
        for blade in s.blades() {
            assert_eq!(Blade::parse(&blade.name(), 12).unwrap(), blade, "{}", blade.name());
        }
    }

    #[test]
    fn reverse_norm_sq_matches_full_product() {
        let s = sig(2, 1);
        let coeffs: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37).sin()).collect();
        let u = Multivector::from_coeffs(s, coeffs).unwrap();
        assert!(((&u.reverse() * &u).scalar_part() - u.reverse_norm_sq()).abs() < 1e-14);
    }
}
