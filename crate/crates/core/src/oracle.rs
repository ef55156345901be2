//! Seeded sampling and independent checks used by the test suites and the
//! `selfcheck` command.
//!
//! Everything here avoids the code paths it is meant to check: the
//! reference product re-derives blade signs by sorting generator lists, the
//! center projection is the literal `2⁻ⁿ Σ_A e_A U e^A`, and the frame
//! expansion multiplies the rotated vectors directly instead of going
//! through minors.

use crate::clifford::{blade_inverse, Blade, Multivector, Signature};
use crate::covering::{
    candidate_general, candidate_n3, covering_residuals, forward_map, matrix_to_rotor, CoveringError, Frame, Method,
    Rotor,
};
use crate::division::{
    quaternion_to_multivector, so21_to_unit_split_quaternion, so3_to_unit_quaternion, split_to_multivector,
};
use crate::matrix_group::{Matrix, OrthoMatrix};

/// Bivector coefficients are drawn from `[−1, 1]` and multiplied by this.
pub const BIVECTOR_SCALE: f64 = 0.5;

/// SplitMix64: a 64-bit counter advanced by the golden-ratio increment and
/// passed through a fixed avalanche mix. Any seed gives a full-period
/// stream, and `split` derives an independent child stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
    pub const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
    pub const MIX2: u64 = 0x94D0_49BB_1331_11EB;

    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(Self::MIX1);
        z = (z ^ (z >> 27)).wrapping_mul(Self::MIX2);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn split(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}

/// Random bivector with coefficients uniform in `[−1, 1] · BIVECTOR_SCALE`.
pub fn sample_bivector(sig: Signature, rng: &mut SplitMix64) -> Multivector {
    let mut b = Multivector::zero(sig);
    for blade in sig.blades_of_grade(2) {
        b.set(blade, BIVECTOR_SCALE * rng.uniform(-1.0, 1.0)).expect("blade in range");
    }
    b
}

/// Random multivector with coefficients uniform in `[−1, 1] / 2^{n/2}`, so
/// the coefficient vector has expected squared length 1/3.
pub fn sample_multivector(sig: Signature, rng: &mut SplitMix64) -> Multivector {
    let scale = (sig.num_blades() as f64).sqrt().recip();
    let coeffs = (0..sig.num_blades()).map(|_| scale * rng.uniform(-1.0, 1.0)).collect();
    Multivector::from_coeffs(sig, coeffs).expect("length matches")
}

pub fn sample_rotor_with(sig: Signature, rng: &mut SplitMix64) -> Rotor {
    let r = sample_bivector(sig, rng).exp_bivector().expect("pure bivector");
    Rotor::new(r).expect("exponential of a bivector is a rotor")
}

/// `exp` of a random bivector; deterministic per `(sig, seed)`.
pub fn sample_rotor(sig: Signature, seed: u64) -> Rotor {
    sample_rotor_with(sig, &mut SplitMix64::new(seed))
}

/// `forward_map` of a sampled rotor.
pub fn sample_ortho(sig: Signature, seed: u64) -> OrthoMatrix {
    forward_map(&sample_rotor(sig, seed)).expect("sampled rotors map into SO+")
}

/// Per-generator residuals `max|S e_a S⁻¹ − Σ_b p^b_a e_b|`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoveringReport {
    pub per_generator: Vec<f64>,
    pub max: f64,
}

pub fn verify_covering(s: &Multivector, p: &Matrix) -> Result<CoveringReport, CoveringError> {
    let per_generator = covering_residuals(s, p)?;
    let max = per_generator.iter().fold(0.0f64, |m, x| m.max(*x));
    Ok(CoveringReport { per_generator, max })
}

/// `Σ_A β_A e_F e^A` with `β_A = β_{a₁}⋯β_{a_k}` and `β_∅ = e`.
pub fn corollary_expansion(frame: &Frame, f: Blade) -> Multivector {
    let sig = frame.sig();
    let beta = frame.vectors();
    let ef = Multivector::from_blade(sig, f, 1.0).expect("blade in range");
    let mut out = Multivector::zero(sig);
    for a in sig.blades() {
        let mut prod = Multivector::one(sig);
        for i in a.indices() {
            prod = &prod * &beta[i - 1];
        }
        let (sign, inv) = blade_inverse(a, sig);
        let inv = Multivector::from_blade(sig, inv, f64::from(sign)).expect("blade in range");
        out = &out + &(&(&prod * &ef) * &inv);
    }
    out
}

/// Product of two blades given as ascending 1-based index lists, computed
/// by bubble-sorting the concatenation and contracting equal neighbours.
pub fn reference_blade_product(a: &[usize], b: &[usize], sig: Signature) -> (f64, Vec<usize>) {
    let mut list: Vec<usize> = a.iter().chain(b).copied().collect();
    let mut sign = 1.0;
    let mut i = 0;
    loop {
        let mut changed = false;
        while i + 1 < list.len() {
            if list[i] > list[i + 1] {
                list.swap(i, i + 1);
                sign = -sign;
                changed = true;
            } else if list[i] == list[i + 1] {
                sign *= sig.metric(list[i]);
                list.drain(i..i + 2);
                changed = true;
                continue;
            }
            i += 1;
        }
        if !changed {
            return (sign, list);
        }
        i = 0;
    }
}

/// Geometric product through [`reference_blade_product`].
pub fn reference_product(u: &Multivector, v: &Multivector) -> Multivector {
    let sig = u.sig();
    let mut out = Multivector::zero(sig);
    for (a, x) in u.terms() {
        for (b, y) in v.terms() {
            let (sign, idx) = reference_blade_product(&a.indices(), &b.indices(), sig);
            let blade = Blade::from_indices(&idx).expect("sorted");
            let cur = out.get(blade);
            out.set(blade, cur + sign * x * y).expect("blade in range");
        }
    }
    out
}

/// `2⁻ⁿ Σ_A e_A U e^A`.
pub fn direct_center_projection(u: &Multivector) -> Multivector {
    let sig = u.sig();
    let mut sum = Multivector::zero(sig);
    for a in sig.blades() {
        let ea = Multivector::from_blade(sig, a, 1.0).expect("blade in range");
        let (sign, inv) = blade_inverse(a, sig);
        let inv = Multivector::from_blade(sig, inv, f64::from(sign)).expect("blade in range");
        sum = &sum + &(&(&ea * u) * &inv);
    }
    sum.scale(1.0 / sig.num_blades() as f64)
}

/// One suite of [`selfcheck`].
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub failures: usize,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.max_residual <= self.tolerance
    }
}

pub const ROUND_TRIP_TOL: f64 = 1e-9;
pub const METHOD_AGREEMENT_TOL: f64 = 1e-10;
pub const ALGEBRA_LAW_TOL: f64 = 1e-12;

/// Runs the round-trip, method-agreement and algebra-law suites.
///
/// Method agreement compares, at `n = 3`, the general and `n = 3` formulas
/// (and the quaternion or split-quaternion path when one exists); in other
/// dimensions it compares the general formula with the direct frame
/// expansion.
pub fn selfcheck(sig: Signature, trials: usize, seed: u64) -> Vec<SuiteResult> {
    let mut rng = SplitMix64::new(seed);
    let mut round_trip = SuiteResult { name: "round_trip", trials, max_residual: 0.0, tolerance: ROUND_TRIP_TOL, failures: 0 };
    let mut agreement =
        SuiteResult { name: "method_agreement", trials, max_residual: 0.0, tolerance: METHOD_AGREEMENT_TOL, failures: 0 };
    let mut laws = SuiteResult { name: "algebra_laws", trials, max_residual: 0.0, tolerance: ALGEBRA_LAW_TOL, failures: 0 };

    for _ in 0..trials {
        let s = sample_rotor_with(sig, &mut rng);
        match round_trip_residual(&s) {
            Ok(r) => round_trip.max_residual = round_trip.max_residual.max(r),
            Err(_) => round_trip.failures += 1,
        }
        match method_agreement_residual(&s) {
            Ok(r) => agreement.max_residual = agreement.max_residual.max(r),
            Err(_) => agreement.failures += 1,
        }
        let mut sub = rng.split();
        let (u, v, w) = (sample_multivector(sig, &mut sub), sample_multivector(sig, &mut sub), sample_multivector(sig, &mut sub));
        laws.max_residual = laws.max_residual.max(algebra_law_residual(&u, &v, &w));
    }
    vec![round_trip, agreement, laws]
}

/// `matrix_to_rotor(forward_map(S))` against `±S`, together with the
/// covering residual of the recovered rotor.
pub fn round_trip_residual(s: &Rotor) -> Result<f64, CoveringError> {
    let p = forward_map(s)?;
    let r = matrix_to_rotor(&p, Method::General)?;
    let covering = verify_covering(r.value(), p.matrix())?.max;
    Ok(r.distance_up_to_sign(s.value()).max(covering))
}

/// Largest disagreement between independent inversion routes for the
/// matrix covered by `s`.
pub fn method_agreement_residual(s: &Rotor) -> Result<f64, CoveringError> {
    let sig = s.sig();
    let p = forward_map(s)?;
    let general = matrix_to_rotor(&p, Method::General)?;
    let mut worst = 0.0f64;
    if sig.dim() == 3 {
        let n3 = matrix_to_rotor(&p, Method::N3)?;
        worst = worst.max(general.distance_up_to_sign(n3.value()));
        for f in sig.even_blades() {
            let m = candidate_general(&p, f)?.m;
            let l = candidate_n3(&p, f)?.m;
            worst = worst.max(m.max_abs_diff(&l.scale(2.0)));
        }
        let division = match (sig.p(), sig.q()) {
            (3, 0) => so3_to_unit_quaternion(&p).ok().map(quaternion_to_multivector),
            (2, 1) => so21_to_unit_split_quaternion(&p).ok().map(split_to_multivector),
            _ => None,
        };
        if let Some(x) = division {
            worst = worst.max(general.distance_up_to_sign(&x));
        }
    } else {
        let frame = Frame::from_rotor(s);
        let chosen = crate::covering::select_f(&p, Method::General, Default::default())?;
        let m = corollary_expansion(&frame, chosen.f);
        let scale = m.max_abs().max(1.0);
        worst = worst.max(m.max_abs_diff(&chosen.m) / scale);
    }
    Ok(worst)
}

/// Max residual over associativity, the generator relations, reversion
/// antihomomorphism, the reference product, and the center projection.
pub fn algebra_law_residual(u: &Multivector, v: &Multivector, w: &Multivector) -> f64 {
    let sig = u.sig();
    let uv = u * v;
    let mut worst = (&uv * w).max_abs_diff(&(u * &(v * w)));
    worst = worst.max(uv.max_abs_diff(&reference_product(u, v)));
    worst = worst.max(uv.reverse().max_abs_diff(&(&v.reverse() * &u.reverse())));
    worst = worst.max(u.center_project().max_abs_diff(&direct_center_projection(u)));
    for a in 1..=sig.dim() {
        for b in 1..=sig.dim() {
            let ea = Multivector::generator(sig, a).expect("in range");
            let eb = Multivector::generator(sig, b).expect("in range");
            let anti = &(&ea * &eb) + &(&eb * &ea);
            let eta = if a == b { 2.0 * sig.metric(a) } else { 0.0 };
            if anti != Multivector::scalar(sig, eta) {
                return f64::INFINITY;
            }
        }
    }
    worst
}
