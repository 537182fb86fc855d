//! Fixtures shared by the benchmarks.

use kink_core::discretize::assemble_lr_z;
use kink_core::{GridSpec, TridiagonalOperator};

/// The split operator at `R = 0.2` on the default `z` grid.
pub fn default_operator() -> TridiagonalOperator {
    assemble_lr_z(0.2, &GridSpec::default_z()).expect("default grid is valid")
}
