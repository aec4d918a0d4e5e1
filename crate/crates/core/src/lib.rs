//! Fuglede–Kadison determinants of group-ring elements over amenable groups.
//!
//! The crate computes `log det_LΓ f` for integral (or rational, or complex)
//! group-ring elements by several independent routes and compares them with
//! the dynamical side:
//!
//! * finite sections `(1/|F|) log |det f_F|` over Følner windows,
//! * perturbed sections built from quasitilings,
//! * Chebyshev polynomial traces `½ tr Q(f*f)`,
//! * Mahler measures for `Z^d` (exact roots for `d = 1`, torus quadrature,
//!   finite-quotient circulant determinants),
//! * for finite groups, the order of the solution group `X_f` via Smith
//!   normal form and brute-force separated/spanning counts.

pub mod det;
pub mod dynamics;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod mahler;
pub mod ring;
pub mod sections;

pub use det::perturbed::{build_perturbed_compression, PerturbedCompression, TransferMap};
pub use det::{
    fk_finite_sections, fk_poly_trace, format_sig, logabsdet, padded_interval, perturbation_study,
    quotient_order, snf, snf_i64, ConvergenceRow, ConvergenceTable, Evidence, PolyTraceEstimate,
    QuotientOrder, SnfResult, SnfTransforms, DEFAULT_DEGREE,
};
pub use dynamics::{
    count_lattice_ball, default_epsilon, entropy_finite_group, extremal_count,
    extremal_count_points, lattice_ball_bound, ln_bigint, orbit_distance, quasitile, shift,
    solve_dual_finite, CountMode, DEFAULT_LIST_LIMIT, DualSolutionSet, EntropyEstimate, ExtremalCount, PNorm,
    Placement, TileMode, Tiling, TorusCoords, TorusVector,
};
pub use error::{Error, Result};
pub use groups::{boundary_ratio, folner_window, FolnerWindow, GroupDescriptor, GroupElement};
pub use mahler::{circulant_logdet, mahler_grid, mahler_roots, LaurentPoly, MahlerGrid};
pub use ring::{
    l1_growth, parse_ring_element, rational_to_f64, serialize_ring_element, L1GrowthRow, RingElement,
    Scalar, ScalarDomain,
};
pub use sections::{
    certify_invertible, compress, sigma_min_estimate, CertificateMethod, CompressionMatrix,
    InvertibilityCertificate, Witness,
};
