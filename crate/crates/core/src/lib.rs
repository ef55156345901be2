//! Spin group elements from pseudo-orthogonal matrices.
//!
//! Given `P ∈ SO₊(p,q)`, find the two rotors `±S ∈ Spin₊(p,q)` with
//! `S e_a S⁻¹ = Σ_b p^b_a e_b`. The general route works in the real Clifford
//! algebra `Cl(p,q)` for any `n = p + q` (up to [`clifford::DEFAULT_MAX_DIM`]);
//! for `n = 3` there is a cheaper formula, and quaternion / split-quaternion
//! versions for `SO(3)` and `SO₊(2,1)`.
//!
//! ```
//! use spin_cover::{check_membership, matrix_to_rotor, Matrix, Method, Signature, DEFAULT_TOL};
//!
//! let sig = Signature::new(2, 0).unwrap();
//! let quarter_turn = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
//! let p = check_membership(quarter_turn, sig, DEFAULT_TOL).unwrap();
//! let s = matrix_to_rotor(&p, Method::General).unwrap();
//! println!("{s}"); // 0.7071067811865476 + -0.7071067811865475*e12
//! ```

// Tolerance checks are written `!(x <= bound)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod covering;
pub mod division;
pub mod matrix_group;
pub mod oracle;

pub use clifford::{blade_inverse, blade_product, AlgebraError, Blade, Multivector, Signature};
pub use covering::{
    candidate_general, candidate_n3, forward_map, matrix_to_rotor, recover, rotor_from_frames, select_f,
    CandidateElement, CoveringError, Frame, Method, Recovery, Rotor, RotorError, SelectOptions,
};
pub use division::{Mat2C, Quaternion, SplitQuaternion};
pub use matrix_group::{
    check_membership, project_to_group, Condition, Matrix, MatrixError, MembershipError, MembershipReport,
    OrthoMatrix, DEFAULT_TOL,
};
