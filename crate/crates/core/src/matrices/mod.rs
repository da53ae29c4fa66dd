//! Measurement matrices, index sets, identity augmentation and the projector
//! algebra around `A = [I | Φ]`.
//!
//! Row selection `Φ^Γ` returns a `|Γ| × N` matrix: the selected rows keep all
//! `N` columns.

mod distribution;
mod index_set;
pub mod io;
mod measurement;
mod projector;

pub use distribution::EntryDistribution;
pub use index_set::IndexSet;
pub use measurement::{
    augment_identity, masked_product, AsDense, select_cols, select_rows, AugmentedMatrix, MeasurementMatrix,
};
pub use projector::{
    complement_projector, range_projector, selector_diagonal, PROJECTOR_TOLERANCE, RANK_TOLERANCE,
};
