//! Energy spectra of quantum models whose Bargmann-space eigenproblem
//! reduces to a three-term recurrence `c[n+1] + a_n c[n] + b_n c[n-1] = 0`.
//!
//! The regular spectrum is the zero set of `F(x) = a_0 + r_0`, with `r_0`
//! the first ratio of the minimal solution evaluated as an Euler series.
//! Truncated-Hamiltonian diagonalization provides independent ground truth.

pub mod cli;
pub mod ffunc;
pub mod models;
pub mod oracle;
pub mod recurrence;
pub mod spectrum;
pub mod validate;

pub use ffunc::{eval_f_euler, FEvaluation, FStatus, SeriesConfig};
pub use models::{Parity, ParityChoice};
pub use recurrence::{AsymptoticProfile, Recurrence};
pub use spectrum::{
    find_roots, flow, resolve_spectrum, scan, Root, RootClass, ScanResult, SpectralModel,
};
