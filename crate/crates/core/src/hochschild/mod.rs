//! Hochschild complex of a graded algebra: chains, homology, cyclic homology,
//! Hodge decomposition and the named consistency checks.

mod chain;
mod cusp;
mod hodge;
mod homology;
mod kunneth;
mod slice;

pub use chain::{BarChain, SignConvention, Tensor};
pub(crate) use chain::collect;
pub use homology::HochschildEngine;
pub use slice::{b_columns, canonical_free_key, classes, enumerate, Key, TensorBasis, TotalBasis};
pub use hodge::{descents, eulerian, is_odd, permutations, shuffle_element, EulerianTable, GroupElement, Perm};
pub use kunneth::{verify_kunneth, KunnethCell, KunnethReport};
pub use cusp::{verify_cusp_cycles, Attempt, CuspCycleReport, CycleCheck, FallbackClass, CUSP};
