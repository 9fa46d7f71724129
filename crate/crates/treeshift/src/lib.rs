//! Weighted shift operators on rooted directed trees: construction,
//! per-vertex classification (quasinormal / weakly quasinormal with its
//! optimal constant / hyponormal / absolutely continuous), spectral-atom
//! measures, and an independent finite-matrix oracle that re-derives the
//! same verdicts from dense linear algebra.

pub mod classify;
pub mod corpus;
pub mod families;
pub mod measures;
pub mod oracle;
pub mod scalar;
pub mod shift;
pub mod tree;

pub use classify::{
    classify, fragile, generalized_optimal_constant, hyponormal, hyponormality_sum,
    interior_vertices, modulus_ac, optimal_constant, power_identity_residual, quasinormal,
    scope_vertices, strict_interior_vertices, ClassificationReport, HypoSum, OptimalConstant,
    ScopeKind, Trivalent,
};
pub use families::{
    binary_shift, branch_shift, chain_shift, comb_shift, geometric_path_shift, path_shift,
    BranchParams, ChainParams, CombParams, Family, FamilyError,
};
pub use measures::{image_measure, modulus_measure, AtomMap, AtomicMeasure};
pub use scalar::{Extended, Scalar, DEFAULT_EPS};
pub use shift::{FiniteVector, ShiftBuilder, WeightedShift};
pub use tree::{DirectedTree, TreeError, Vertex};
