//! Exact p-adic arithmetic for quadratic-form invariants, parameters of
//! semisimple classes in special orthogonal and twisted linear groups,
//! explicit endoscopic transfer factors, component groups of tempered
//! parameters, local root numbers, and the Gross–Prasad multiplicity
//! prediction they drive.
//!
//! All arithmetic is exact: square classes, Hilbert symbols and Hasse
//! invariants are computed by closed forms over `Q_p`, elements of quadratic
//! étale algebras by rational coordinates, and root numbers as exact roots of
//! unity (with a floating-point Gauss sum snapped and checked). Brute-force
//! oracles in [`oracle`] re-derive the central quantities by exhaustive
//! search so the test suite can compare independent routes.

pub mod error;
pub mod etale;
pub mod fiber;
pub mod gp;
pub mod oracle;
pub mod padic;
pub mod quadspace;
pub mod rootnum;
pub mod transfer;
pub mod wd;
pub mod xi;

pub use error::{Error, Result};
