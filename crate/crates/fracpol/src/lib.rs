//! Numerical laboratory for the first q-eigenvalue of the fractional
//! p-Laplacian on rasterized planar domains.
//!
//! The crate computes `lambda = inf { [u]^p : norm_q(u) = 1, u = 0 outside
//! the domain }` for the kernel `|x - y|^{-(d+sp)}`, and drives desk-scale
//! experiments around polarization (two-point rearrangement): exact set
//! identities on masks, norm preservation and energy nonincrease for
//! rearranged functions, eigenvalue drop under domain polarization, and
//! strict monotonicity of the eigenvalue as an inner hole translates or
//! rotates inside an outer domain.
//!
//! Modules mirror that pipeline:
//! - [`geometry`]: halfspaces, reflections, shapes, masks, polarization;
//! - [`rearrange`]: grid functions, function polarization, L^q norms;
//! - [`nonlocal`]: kernel table, seminorm, operator, Rayleigh quotient;
//! - [`eigensolver`]: projected descent plus the linear p = q = 2 oracle;
//! - [`harness`]: sweeps, comparisons, diagnostics, CSV/SVG emission;
//! - [`props`]: randomized identity suites;
//! - [`cli`]: JSON configs and the batch entry point.
//!
//! Everything is bit-reproducible: summations use fixed-topology trees, so
//! results do not depend on the rayon thread count.

// NaN-rejecting `!(x > 0)` guards and index-driven pair loops are the
// clearer form for this code; keep clippy quiet about them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::manual_is_multiple_of)]
#![allow(clippy::only_used_in_recursion)]

pub mod cli;
pub mod eigensolver;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod nonlocal;
pub mod props;
pub mod rearrange;
pub mod reduce;

pub use eigensolver::{
    linear_oracle_p2, solve, strict_margin, EigenResult, InitKind, OracleResult, SolverParams,
};
pub use error::{Error, Result};
pub use geometry::{
    dual_polarize_mask, grid_compatible, is_polarization_invariant, polarize_mask, rasterize,
    reflect_mask, reflect_point, witness_sets, DomainMask, Grid, Point, Polarizer, ShapeSpec,
};
pub use harness::{
    comparison_diagnostic, faber_krahn_check, sweep_rotation, sweep_translation,
    ComparisonDiagnostic, FaberKrahnRecord, SweepConfig, SweepMode, SweepReport, SweepRow, Verdict,
};
pub use nonlocal::{
    apply_fplap, build_kernel, gradient_rayleigh, rayleigh, seminorm_p, FracParams, KernelTable,
};
pub use rearrange::{norm_q, polarize_function, GridFunction};
