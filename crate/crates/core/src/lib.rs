//! Hypergeometric orthogonal polynomials on quadratic lattices.
//!
//! A family is fixed by seven numbers: the nodes `x_k = b0 + b1 k + b2 k²`,
//! the eigenvalues `h_k = a1 k + a2 k²` and `e_k = d1 k + d2 k²`. From these
//! the crate builds the moment functional, the monic polynomials and their
//! three-term recurrence, and the discrete weights `r_k` with
//! `Σ_k u_n(x_k) u_m(x_k) r_k = K_n δ_{nm}`.
//!
//! All arithmetic is done in arbitrary precision complex floating point.

pub mod connection;
pub mod error;
pub mod families;
pub mod hypergeom;
pub mod lattice;
pub mod methods;
pub mod num;
pub mod poly;
pub mod recurrence;
pub mod summation;
pub mod verify;
pub mod weights;

pub use connection::{Family, NewtonPoly};
pub use error::{Error, Result};
pub use families::{make_family, make_family_by_name, preset, registry, FamilyName, FamilyPreset, FamilySpec};
pub use hypergeom::HypSeries;
pub use lattice::{validate, CaseId, FamilyParams, ValidationReport};
pub use methods::{method, methods, WeightMethod};
pub use num::{BigComplex, DEFAULT_PRECISION, MAX_PRECISION, MIN_PRECISION};
pub use recurrence::RecurrenceCoeffs;
pub use summation::{SeriesStatus, SeriesValue, SummationOptions};
pub use verify::{gram_matrix, moment_recovery, GramReport};
pub use weights::{canonicalize, weight, weight_table, weights_oracle, CanonicalParams, WeightContext, WeightTable};
