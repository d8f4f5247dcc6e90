//! Monodromy of branched covers of the line, Hurwitz enumeration, and
//! dimension counts for loci of curves with solvable covers.

pub mod arith;
pub mod cover;
pub mod group;
pub mod hurwitz;
pub mod moduli;
pub mod perm;
pub mod surfaces;

pub use arith::Rational;
pub use cover::{classify_cover, cover_genus, validate_branch_tuple, BranchTuple, CoverError, CoverReport};
pub use group::{DerivedSeries, GroupError, MinimalNormal, PermutationGroup, DEFAULT_ELEMENT_CAP};
pub use hurwitz::{
    canonical_form, enumerate_covers, max_branch_points, BranchPointBound, Canonicalizer, Census,
    EnumSpec, Enumeration, HurwitzError, SearchOptions, DEFAULT_NODE_BUDGET,
};
pub use moduli::{K3Report, ModuliError};
pub use perm::{CycleData, CycleType, PermError, Permutation, MAX_DEGREE};
pub use surfaces::{CIReport, Classification, DivisorClass, SurfaceError, SurfaceKind, SurfaceLattice};
