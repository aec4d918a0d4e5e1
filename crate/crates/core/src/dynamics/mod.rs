//! The dynamical side: the solution group `X_f` of a finite group, the shift
//! action on it, orbit pseudometrics with separated and spanning counts,
//! lattice-ball counting and greedy quasitilings of windows.
//!
//! Separated and spanning counts are only computed for finite groups, where
//! `X_f` is a finite set; for infinite groups these are limits over Følner
//! windows of an infinite compact space and no finite procedure is offered.

mod dual;
mod extremal;
mod lattice;
mod tiling;
mod torus;

pub use dual::{
    entropy_finite_group, ln_bigint, solve_dual_finite, DualSolutionSet, EntropyEstimate,
    DEFAULT_LIST_LIMIT,
};
pub use extremal::{extremal_count, extremal_count_points, CountMode, ExtremalCount, MAX_POINTS};
pub use lattice::{ball_volume, count_lattice_ball, lattice_ball_bound};
pub use tiling::{quasitile, Placement, TileMode, Tiling};
pub use torus::{orbit_distance, shift, PNorm, TorusCoords, TorusVector};

/// Default `ε = 1/(8‖f‖₁)` for entropy experiments.
pub fn default_epsilon(l1_norm: f64) -> f64 {
    1.0 / (8.0 * l1_norm)
}
