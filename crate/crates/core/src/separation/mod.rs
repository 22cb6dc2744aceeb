//! The patch restriction operator `(f₊, f₋) ↦ (f₊ + f₋)|_U` in the
//! `(ext, int)` Gauss basis, its spectrum, regularized inversion, null-space
//! pairs and best approximation of ext fields by int fields on a patch.

mod density;
mod kernel;
mod operator;
mod shell;
mod solve;

pub use density::{best_patch_approx, BestApprox};
pub use kernel::{build_kernel_pair, constancy_deviation, tapered_indicator, KernelPair, DEFAULT_CONSTANCY_TOLERANCE};
pub use operator::{assemble_modes, assemble_restriction, ColumnMeta, OperatorMatrix, RowMeta};
pub use shell::ShellWeighting;
pub use solve::{
    separate_patch, svd_spectrum, Regularization, RegularizationRecord, SeparationResult, SeparationSolver,
    DEFAULT_TSVD_RELATIVE_CUT,
};
