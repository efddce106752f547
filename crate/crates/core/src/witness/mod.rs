//! Almost-invariant unit vectors for the diagonal action and the checks
//! around them.
//!
//! The schedule fixes, for every `(k, m)`, a majority index `n(k, m)` whose
//! set is nearly invariant under all shifts `|g| <= m`. The vector
//! `xi_m` is the indicator of `X_m = prod_k A_{n(k,m)}`; since every factor
//! has measure `1/2`, `mu(X_m) = 1` and `xi_m` is a unit vector whose
//! coefficient `<g xi_m, xi_m> = prod_k 2 nu(gA_{n(k,m)} ∩ A_{n(k,m)})` is at
//! least `e^{-1/m}` on the window.

mod coefficient;
mod convergence;
mod cover;
mod fc;
mod rotation;
mod schedule;

pub use coefficient::{coefficient, coefficient_upper, WitnessVector};
pub use convergence::{convergence_lemma_check, ConvergenceReport, SandwichRow};
pub use cover::{sigma_finite_cover, CoverPiece};
pub use fc::{fc_check, fc_exact_minima, fc_intersect, FcCertificate, FcOutcome};
pub use rotation::{rotation_counterexample, RotationReport};
pub use schedule::{
    build_schedule, build_schedule_with, cell_exponent, cell_width, ScheduleEntry, ScheduleOptions, ScheduleViolation,
    WitnessSchedule,
};
