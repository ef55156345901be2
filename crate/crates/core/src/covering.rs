//! Both directions of the covering `Spin₊(p,q) → SO₊(p,q)`, `S ↦ P` with
//! `S e_a S⁻¹ = Σ_b p^b_a e_b`.
//!
//! The inverse direction builds, for an even basis blade `e_F`,
//!
//! ```text
//! M_F = Σ_{|A|=|B|} p^B_A e_B e_F e^A
//! ```
//!
//! which equals `2^n ⟨S⁻¹ e_F⟩₀ S`, so `S = ±M_F / sqrt(M̃_F M_F)` whenever
//! `M_F ≠ 0`. At least one even `F` always works; we take the candidate with
//! the largest `M̃_F M_F`, which also keeps away from the cut locus where a
//! fixed choice of `F` degenerates.

use std::fmt;

use thiserror::Error;

use crate::clifford::{blade_inverse, blade_product, AlgebraError, Blade, Multivector, Signature};
use crate::matrix_group::{check_membership, Matrix, MatrixError, MembershipError, OrthoMatrix, DEFAULT_TOL};

/// Tolerance on the rotor invariants, relative to `max(1, max|s_A|²)`.
pub const ROTOR_TOL: f64 = 1e-9;

/// Candidates with `M̃M ≤ CANDIDATE_THRESHOLD · scale²` count as zero, with
/// `scale = 2^n` for the general formula and `2^{n-1}` for the `n = 3` one.
pub const CANDIDATE_THRESHOLD: f64 = 1e-18;

/// Allowed non-scalar part of `M̃M`, relative to `max|m_A|²`.
pub const NORM_RESIDUAL_TOL: f64 = 1e-9;

const TIE_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RotorError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("rotor has odd-grade component {value:e} on {blade}")]
    OddComponent { blade: Blade, value: f64 },
    #[error("rotor is not unit: max|reverse(S) S - e| = {residual:e}")]
    NotUnit { residual: f64 },
    #[error("conjugation of e{generator} leaves grade 1 by {residual:e}")]
    GradeNotPreserved { generator: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoveringError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Rotor(#[from] RotorError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Membership(#[from] MembershipError),
    #[error("blade {0} has odd grade")]
    OddBlade(Blade),
    #[error("the n = 3 formula needs a 3x3 matrix, got n = {0}")]
    WrongDimension(usize),
    #[error("no even blade gives a nonzero candidate (best {best:e}, threshold {threshold:e}) for matrix {matrix:?}")]
    NoCandidate { best: f64, threshold: f64, matrix: Vec<Vec<f64>> },
    #[error("reverse(M) M has non-scalar residual {residual:e} (allowed {allowed:e})")]
    NonScalarNorm { residual: f64, allowed: f64 },
    #[error("frame vector {index} is not a grade-1 element (off by {residual:e})")]
    FrameNotVector { index: usize, residual: f64 },
    #[error("frame has {got} vectors, signature needs {expected}")]
    FrameSize { got: usize, expected: usize },
    #[error("frame Gram matrix differs from eta by {residual:e}")]
    FrameGram { residual: f64 },
}

/// Which closed form to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Sum over all minors, any `n`.
    General,
    /// `L_F = e_F + p^b_a e_b e_F e^a`, `n = 3` only.
    N3,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::General => "general",
            Method::N3 => "n3",
        })
    }
}

/// Options for [`select_f`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SelectOptions {
    /// Stop at the first candidate with `M̃M ≥ scale²/2`.
    ///
    /// In Euclidean signatures at most one candidate can reach that bound,
    /// so the result is identical to the full scan. With `q > 0` several
    /// may, and the rotor then agrees with the full scan only up to
    /// rounding.
    pub early_exit: bool,
}

/// Element of `Spin₊(p,q)`: even, `S̃S = e`, conjugation keeps grade 1.
///
/// The sign is canonical: the coefficient of largest magnitude is positive,
/// with near-ties going to the lowest blade mask.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotor {
    value: Multivector,
}

impl Rotor {
    pub fn new(value: Multivector) -> Result<Self, RotorError> {
        Self::with_tol(value, ROTOR_TOL)
    }

    /// Validates with invariant tolerance `tol · max(1, max|s_A|²)`.
    pub fn with_tol(value: Multivector, tol: f64) -> Result<Self, RotorError> {
        let bound = tol * value.max_abs().max(1.0).powi(2);
        for (blade, c) in value.terms() {
            if !blade.is_even() && !(c.abs() <= bound) {
                return Err(RotorError::OddComponent { blade, value: c });
            }
        }
        let value = value.even_part();
        let sig = value.sig();

        let unit = &(&value.reverse() * &value) - &Multivector::one(sig);
        let residual = unit.max_abs();
        if !(residual <= bound) {
            return Err(RotorError::NotUnit { residual });
        }
        let rev = value.reverse();
        for a in 1..=sig.dim() {
            let image = &(&value * &Multivector::generator(sig, a)?) * &rev;
            let residual = non_vector_residual(&image);
            if !(residual <= bound) {
                return Err(RotorError::GradeNotPreserved { generator: a, residual });
            }
        }
        Ok(Rotor { value: canonical_sign(value) })
    }

    pub fn identity(sig: Signature) -> Self {
        Rotor { value: Multivector::one(sig) }
    }

    pub fn value(&self) -> &Multivector {
        &self.value
    }

    pub fn sig(&self) -> Signature {
        self.value.sig()
    }

    /// The other element of the fibre, `−S`.
    pub fn negated(&self) -> Multivector {
        -&self.value
    }

    /// `S⁻¹ = S̃`.
    pub fn inverse(&self) -> Multivector {
        self.value.reverse()
    }

    /// `S v S⁻¹`.
    pub fn sandwich(&self, v: &Multivector) -> Multivector {
        &(&self.value * v) * &self.value.reverse()
    }

    /// Max coefficient distance to `other` or to `−other`, whichever is
    /// smaller.
    pub fn distance_up_to_sign(&self, other: &Multivector) -> f64 {
        let plus = self.value.max_abs_diff(other);
        let minus = self.value.max_abs_diff(&-other);
        plus.min(minus)
    }
}

impl fmt::Display for Rotor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

fn non_vector_residual(u: &Multivector) -> f64 {
    u.terms().filter(|(b, _)| b.grade() != 1).fold(0.0, |m, (_, c)| m.max(c.abs()))
}

fn canonical_sign(u: Multivector) -> Multivector {
    let max = u.max_abs();
    if max == 0.0 {
        return u;
    }
    let lead = u.terms().find(|(_, c)| c.abs() >= max * (1.0 - TIE_REL)).map(|(_, c)| c).unwrap_or(1.0);
    if lead < 0.0 {
        -&u
    } else {
        u
    }
}

/// `S ↦ P`: column `a` of `P` is the grade-1 part of `S e_a S⁻¹`.
pub fn forward_map(s: &Rotor) -> Result<OrthoMatrix, CoveringError> {
    let sig = s.sig();
    let n = sig.dim();
    let mut m = Matrix::identity(n);
    let bound = ROTOR_TOL * s.value.max_abs().max(1.0).powi(2);
    for a in 1..=n {
        let image = s.sandwich(&Multivector::generator(sig, a)?);
        let residual = non_vector_residual(&image);
        if !(residual <= bound) {
            return Err(RotorError::GradeNotPreserved { generator: a, residual }.into());
        }
        for b in 1..=n {
            m.set(b - 1, a - 1, image.get(Blade::generator(b)));
        }
    }
    Ok(check_membership(m, sig, DEFAULT_TOL)?)
}

/// `max_a max|S e_a S⁻¹ − Σ_b p^b_a e_b|`, one entry per generator.
pub fn covering_residuals(s: &Multivector, p: &Matrix) -> Result<Vec<f64>, CoveringError> {
    let sig = s.sig();
    let n = sig.dim();
    if p.dim() != n {
        return Err(MatrixError::DimensionMismatch { got: p.dim(), expected: n, sig }.into());
    }
    let inv = s.reverse();
    let mut out = Vec::with_capacity(n);
    for a in 1..=n {
        let image = &(s * &Multivector::generator(sig, a)?) * &inv;
        let column: Vec<f64> = (0..n).map(|b| p.get(b, a - 1)).collect();
        let expected = Multivector::vector(sig, &column)?;
        out.push(image.max_abs_diff(&expected));
    }
    Ok(out)
}

/// An unnormalized candidate `M_F` (or `L_F`) together with `M̃_F M_F`.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateElement {
    pub f: Blade,
    pub m: Multivector,
    pub normsq: f64,
}

impl CandidateElement {
    fn new(f: Blade, m: Multivector) -> Self {
        let normsq = m.reverse_norm_sq();
        CandidateElement { f, m, normsq }
    }

    /// Largest non-scalar coefficient of `M̃ M`.
    pub fn norm_residual(&self) -> f64 {
        (&self.m.reverse() * &self.m).max_abs_nonscalar()
    }
}

/// All minors `p^B_A` with `|A| = |B|`, grouped by grade.
struct MinorTable {
    /// Per grade: the blades of that grade and the row-major `C(n,k)²`
    /// minors, rows `B` by columns `A`.
    grades: Vec<(Vec<Blade>, Vec<f64>)>,
}

impl MinorTable {
    /// Grades above `n/2` come from the complementary minors through
    /// Jacobi's identity for `P⁻¹ = ηPᵀη`, `det P = 1`:
    ///
    /// `p^B_A = (−1)^{ΣA+ΣB} η_{A'} η_{B'} p^{B'}_{A'}`, with `'` the complement.
    ///
    /// High-grade determinants of boost matrices cancel catastrophically
    /// (`p^{1…n}_{1…n}` is `1` up to an error of order `‖P‖² ε`); their
    /// complements are small and exact in the extreme case.
    fn new(p: &OrthoMatrix) -> Self {
        let sig = p.sig();
        let n = sig.dim();
        let full = (1u32 << n) - 1;
        let grades = (0..=n)
            .map(|k| {
                let blades: Vec<Blade> = sig.blades_of_grade(k).collect();
                let mut minors = Vec::with_capacity(blades.len() * blades.len());
                for rows in &blades {
                    for cols in &blades {
                        let value = if 2 * k > n {
                            let (rc, cc) = (full & !rows.mask(), full & !cols.mask());
                            jacobi_sign(sig, rows.mask(), cols.mask()) * p.minor_by_mask(rc, cc)
                        } else {
                            p.minor_by_mask(rows.mask(), cols.mask())
                        };
                        minors.push(value);
                    }
                }
                (blades, minors)
            })
            .collect();
        MinorTable { grades }
    }

    fn candidate(&self, sig: Signature, f: Blade) -> Multivector {
        let mut m = Multivector::zero(sig);
        for (blades, minors) in &self.grades {
            let inverses: Vec<(i8, Blade)> = blades.iter().map(|a| blade_inverse(*a, sig)).collect();
            let len = blades.len();
            for (i, b) in blades.iter().enumerate() {
                let (s1, bf) = blade_product(*b, f, sig);
                for (j, (s_inv, a_inv)) in inverses.iter().enumerate() {
                    let minor = minors[i * len + j];
                    if minor == 0.0 {
                        continue;
                    }
                    let (s2, blade) = blade_product(bf, *a_inv, sig);
                    m.add_to(blade, f64::from(s1 * s_inv * s2) * minor);
                }
            }
        }
        m
    }
}

/// `(−1)^{ΣA+ΣB} η_{A'} η_{B'}` for row mask `B` and column mask `A`.
fn jacobi_sign(sig: Signature, rows: u32, cols: u32) -> f64 {
    let index_sum = |m: u32| (0..32).filter(|i| m & (1 << i) != 0).map(|i| i + 1).sum::<u32>();
    let full = (1u32 << sig.dim()) - 1;
    let neg = sig.negative_mask();
    let flips = index_sum(rows) + index_sum(cols) + ((full & !rows) & neg).count_ones() + ((full & !cols) & neg).count_ones();
    if flips.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_even(sig: Signature, f: Blade) -> Result<(), CoveringError> {
    if !f.is_even() {
        return Err(CoveringError::OddBlade(f));
    }
    Multivector::from_blade(sig, f, 1.0)?;
    Ok(())
}

/// `M_F = Σ_{|A|=|B|} p^B_A e_B e_F e^A`.
pub fn candidate_general(p: &OrthoMatrix, f: Blade) -> Result<CandidateElement, CoveringError> {
    let sig = p.sig();
    check_even(sig, f)?;
    Ok(CandidateElement::new(f, MinorTable::new(p).candidate(sig, f)))
}

/// `L_F = e_F + Σ_{a,b} p^b_a e_b e_F e^a` for `n = 3`; equals `M_F / 2`.
pub fn candidate_n3(p: &OrthoMatrix, f: Blade) -> Result<CandidateElement, CoveringError> {
    let sig = p.sig();
    if sig.dim() != 3 {
        return Err(CoveringError::WrongDimension(sig.dim()));
    }
    check_even(sig, f)?;
    Ok(CandidateElement::new(f, l_candidate(p, f)))
}

fn l_candidate(p: &OrthoMatrix, f: Blade) -> Multivector {
    let sig = p.sig();
    let mut l = Multivector::zero(sig);
    l.add_to(f, 1.0);
    for a in 1..=sig.dim() {
        let (s_inv, a_inv) = blade_inverse(Blade::generator(a), sig);
        for b in 1..=sig.dim() {
            let entry = p.entry(b, a);
            if entry == 0.0 {
                continue;
            }
            let (s1, bf) = blade_product(Blade::generator(b), f, sig);
            let (s2, blade) = blade_product(bf, a_inv, sig);
            l.add_to(blade, f64::from(s1 * s_inv * s2) * entry);
        }
    }
    l
}

fn candidate_scale(sig: Signature, method: Method) -> f64 {
    let full = sig.num_blades() as f64;
    match method {
        Method::General => full,
        Method::N3 => full / 2.0,
    }
}

/// Picks the even blade `F` whose candidate has the largest `M̃_F M_F`,
/// scanning in `(grade, mask)` order; ties keep the earlier blade.
pub fn select_f(p: &OrthoMatrix, method: Method, options: SelectOptions) -> Result<CandidateElement, CoveringError> {
    let sig = p.sig();
    if method == Method::N3 && sig.dim() != 3 {
        return Err(CoveringError::WrongDimension(sig.dim()));
    }
    let table = match method {
        Method::General => Some(MinorTable::new(p)),
        Method::N3 => None,
    };
    let scale = candidate_scale(sig, method);
    let threshold = CANDIDATE_THRESHOLD * scale * scale;
    let good_enough = scale * scale / 2.0;

    let mut best: Option<CandidateElement> = None;
    for f in sig.even_blades() {
        let m = match &table {
            Some(t) => t.candidate(sig, f),
            None => l_candidate(p, f),
        };
        let cand = CandidateElement::new(f, m);
        let better = best.as_ref().is_none_or(|b| cand.normsq > b.normsq);
        if better {
            best = Some(cand);
        }
        if options.early_exit && best.as_ref().is_some_and(|b| b.normsq >= good_enough) {
            break;
        }
    }
    match best {
        Some(b) if b.normsq > threshold => Ok(b),
        b => Err(CoveringError::NoCandidate {
            best: b.map_or(0.0, |b| b.normsq),
            threshold,
            matrix: p.matrix().rows(),
        }),
    }
}

/// Result of inverting the covering: the chosen candidate and the rotor.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub candidate: CandidateElement,
    pub rotor: Rotor,
}

/// [`matrix_to_rotor`] that also returns the selected candidate.
pub fn recover(p: &OrthoMatrix, method: Method, options: SelectOptions) -> Result<Recovery, CoveringError> {
    let candidate = select_f(p, method, options)?;
    // looser input tolerance loosens everything downstream proportionally
    let slack = (p.tol() / DEFAULT_TOL).max(1.0);
    let allowed = NORM_RESIDUAL_TOL * slack * candidate.m.max_abs().powi(2);
    let residual = candidate.norm_residual();
    if !(residual <= allowed) {
        return Err(CoveringError::NonScalarNorm { residual, allowed });
    }
    let s = candidate.m.scale(1.0 / candidate.normsq.sqrt());
    let rotor = Rotor::with_tol(s, ROTOR_TOL * slack)?;
    Ok(Recovery { candidate, rotor })
}

/// `P ↦ S = M_F / sqrt(M̃_F M_F)`, sign-canonicalized. `−S` covers `P` too.
pub fn matrix_to_rotor(p: &OrthoMatrix, method: Method) -> Result<Rotor, CoveringError> {
    Ok(recover(p, method, SelectOptions::default())?.rotor)
}

/// Rotated frame `β_a = S e_a S̃`, stored as grade-1 multivectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    sig: Signature,
    beta: Vec<Multivector>,
}

impl Frame {
    /// Validates that every `β_a` is a vector and that
    /// `β_a · β_b = η_ab` within `tol · max(1, max|β|²)`.
    pub fn new(sig: Signature, beta: Vec<Multivector>, tol: f64) -> Result<Self, CoveringError> {
        if beta.len() != sig.dim() {
            return Err(CoveringError::FrameSize { got: beta.len(), expected: sig.dim() });
        }
        let scale = beta.iter().fold(1.0f64, |m, b| m.max(b.max_abs())).powi(2);
        for (index, b) in beta.iter().enumerate() {
            if b.sig() != sig {
                return Err(AlgebraError::SignatureMismatch(b.sig(), sig).into());
            }
            let residual = non_vector_residual(b);
            if !(residual <= tol * scale) {
                return Err(CoveringError::FrameNotVector { index: index + 1, residual });
            }
        }
        let mut worst = 0.0f64;
        for a in 0..sig.dim() {
            for c in 0..sig.dim() {
                let sym = &(&beta[a] * &beta[c]) + &(&beta[c] * &beta[a]);
                let eta = if a == c { sig.metric(a + 1) } else { 0.0 };
                worst = worst.max((0.5 * sym.scalar_part() - eta).abs());
            }
        }
        if !(worst <= tol * scale) {
            return Err(CoveringError::FrameGram { residual: worst });
        }
        Ok(Frame { sig, beta })
    }

    pub fn standard(sig: Signature) -> Self {
        let beta = (1..=sig.dim()).map(|a| Multivector::generator(sig, a).expect("index in range")).collect();
        Frame { sig, beta }
    }

    /// `β_a = S e_a S̃`.
    pub fn from_rotor(s: &Rotor) -> Self {
        let sig = s.sig();
        let beta = (1..=sig.dim())
            .map(|a| s.sandwich(&Multivector::generator(sig, a).expect("index in range")).grade_project(1).expect("grade 1 exists"))
            .collect();
        Frame { sig, beta }
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn vectors(&self) -> &[Multivector] {
        &self.beta
    }

    /// Matrix with entry `(b, a)` the `e_b` coordinate of `β_a`.
    pub fn coordinate_matrix(&self) -> Matrix {
        let n = self.sig.dim();
        let mut m = Matrix::identity(n);
        for (a, beta) in self.beta.iter().enumerate() {
            for b in 0..n {
                m.set(b, a, beta.get(Blade::generator(b + 1)));
            }
        }
        m
    }
}

/// Rotor carrying the standard frame onto `frame`.
pub fn rotor_from_frames(frame: &Frame, method: Method) -> Result<Rotor, CoveringError> {
    let p = check_membership(frame.coordinate_matrix(), frame.sig(), DEFAULT_TOL)?;
    matrix_to_rotor(&p, method)
}
