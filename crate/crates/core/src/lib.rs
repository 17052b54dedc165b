//! Computational workbench for growth of iterated sumsets of convex sets.
//!
//! The crate computes signed sumsets `sA - tB` exactly, enumerates the
//! elements produced by squeezing arguments together with witnesses proving
//! their membership, tests linear independence of analytic-function families
//! built from a small expression language, and checks growth exponents on
//! desk-scale instances.

pub mod angles;
pub mod error;
pub mod func;
pub mod growth;
pub mod independence;
pub mod linalg;
pub mod scalar;
pub mod set;
pub mod squeeze;
pub mod sumset;

pub use rug;

pub use angles::{
    angle_growth_report, angle_reduction_check, pinned_angles, pinned_angles_at, AngleGrowthRecord, PinnedAngleSet,
};
pub use error::{Error, Result};
pub use growth::{
    exponent_fit, generate_family, p_seq, phi, q_seq, sharpness, verify_theorem, FamilyKind, GrowthRecord,
    GrowthReport, TheoremId, TheoremRequest, Verdict,
};
pub use scalar::{BigScalar, ExactScalar, Scalar};
pub use set::{
    concavity_order, consecutive_differences, convexity_order, interval_count, ConsecutiveDifferenceSequence,
    FiniteSet, Mode,
};
pub use squeeze::{
    bd_decomposition, equidistribution_violations, good_elements, normalize_orientation, psi_map, squeeze_basic,
    squeeze_iterated, squeeze_lemma_elements, tuple_squeeze_translates, BdDecomposition, GoodSubset, Orientation,
    TupleSqueeze, WitnessedElement,
};
pub use sumset::{iterated_sumsets, n_k_count, sumset, SignedSumSpec, SumsetMembership, DEFAULT_SIZE_CAP};
