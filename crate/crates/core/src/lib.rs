//! Normalized Jackson q-Bessel functions of the second and third kind.
//!
//! The crate evaluates the normalized series `h(z) = z g(z)` and their
//! derivatives with rigorous truncation bounds, computes partial sums, and
//! audits the lower bounds for the real part of partial-sum ratios on
//! samples of the unit disk. [`oracle`] holds an independent double-double
//! evaluator used to cross-check the fast path.

pub mod bounds;
pub mod compensated;
pub mod error;
pub mod oracle;
pub mod qcore;
pub mod series;
pub mod verifier;

pub use num_complex::Complex64;

pub use bounds::{
    bound_value, coefficient_inequality_lhs, hypothesis_check, mobius_scale, theorem_bound, Direction,
    HypothesisStatus, Inequality, InequalityId, Part, RatioKind, Statement, TheoremBound, Variant,
};
pub use error::{Error, Result};
pub use oracle::{oracle_eval, OracleValue, PrecisionSpec};
pub use qcore::{coefficient, Coefficient, Family, QParams};
pub use series::{
    coefficient_tail_sum, eval, eval_h, eval_h_deriv, eval_partial, eval_partial_deriv, EvalResult, Form,
    FunctionId, PartialSpec, TruncationPolicy, Weight,
};
pub use verifier::{
    atlas, check_inequality, check_lemma, mobius_witness_eval, sample_disk, AtlasCell, AtlasReport, AtlasSpec, BoundCheck,
    DiskGrid, LemmaReport, Verdict, VerifyOptions,
};
