//! Bound-state spectra of the 2D radial Schrödinger equation for the
//! singular even-power and inverse-power potential families, deformed by a
//! noncommutative plane (real or complex with spin), with first-order energy
//! corrections and an independent finite-difference eigensolver.
//!
//! Units: `ħ = 1`, `2μ = 1`, so the radial equation reads
//! `-R'' + [(m² - 1/4)/r² + V(r)] R = E R`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` rejects NaN too

pub mod check;
pub mod deform;
pub mod error;
pub mod oracle;
pub mod perturb;
pub mod potential;
pub mod qes_even;
pub mod qes_inverse;
pub mod quad;
pub mod spectra;
pub mod specfun;
pub mod tridiag;

pub use deform::{theta_expand, DeformationContext, DeformedPotential, Space, Spin};
pub use error::{Error, Result};
pub use potential::{classify_family, format_potential, parse_potential, FamilyTag, LaurentPotential};
pub use check::{check_report, CheckRow, Classification};
pub use oracle::{solve_radial_numeric, OracleResult, RadialProblem};
pub use perturb::{first_order_level, solve_qes, tune_b, LevelEstimate, Measure, QesState};
pub use spectra::{emit, run_scenario, splitting_table, Scenario, SpectralLine};
