//! Exhaustive verification of restricted isometry, democracy, the projected
//! isometry and inner-product preservation on desk-scale matrices.

mod chain;
mod constants;
mod democracy;
mod inner_product;
mod projected;
mod report;
mod rip;

pub use chain::{democracy_chain_check, ChainReport, RowSetViolation};
pub use constants::{c1_break_even, c2, measurement_map, theorem1_constants, TheoremConstants};
pub use democracy::{democracy_certificate, democracy_certificate_with_budget};
pub use inner_product::inner_product_check;
pub use projected::{projected_bounds, projected_rip_check, projected_rip_check_with_budget};
pub use report::{
    BoundSide, DemocracyReport, PairViolation, RipReport, SupportViolation, ViolationReport, EIGEN_SLACK,
    VIOLATION_CAP,
};
pub use rip::{exact_rip, exact_rip_with_budget, monte_carlo_rip, DEFAULT_BUDGET};
