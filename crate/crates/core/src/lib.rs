//! Separability tests for multipartite density matrices built on generalized
//! partial transpositions.
//!
//! For an `n`-partite state every row index and column index of every
//! subsystem gets a label (`r_k`, `c_k`). Moving any subset `Y` of those labels
//! to the opposite side of the matrix gives `ρ^{T_Y}`; for separable states its
//! trace norm never exceeds 1. The ordinary partial transposition and the
//! realignment map are members of this family.
//!
//! - [`matrix`]: dense complex matrices, Kronecker products, `vec`, singular values.
//! - [`density`]: density matrices, partial traces, validation tolerances.
//! - [`reshape`]: label sets and the reshaping engine.
//! - [`criteria`]: PPT, realignment, the full subset scan, negativity and `E(ρ)`.
//! - [`states`]: state zoo, parametric families and seeded random states.
//! - [`cli`]: file formats, reports and the command implementations behind the binary.

pub mod cli;
pub mod criteria;
pub mod density;
pub mod error;
pub mod matrix;
pub mod reshape;
pub mod states;

pub use criteria::{
    evaluate_subset, gpt_scan, measure_e, negativity, ppt_criterion, realignment_criterion, CriterionReport,
    ScanOptions, SubsetResult, Verdict,
};
pub use density::{DensityMatrix, Tolerances};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, SingularSpectrum};
pub use reshape::{
    cut_and_realign, enumerate_label_subsets, generalized_transpose, partial_transpose, realign, Bipartition, Label,
    LabelKind, LabelSet, ReshapedMatrix,
};
pub use states::{mix, random_local_unitary, ParamFamily, StateSpec};
