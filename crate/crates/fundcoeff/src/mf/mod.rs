//! Exact q-expansion engine: level-1 forms, Hurwitz and Cohen numbers,
//! index-1 Jacobi forms and Kohnen plus-space forms.

pub mod half;
pub mod hurwitz;
pub mod jacobi;
pub mod qexp;
pub mod trace;

pub use half::{exemplar, hecke_bound_check, lambda_extract, lambda_extract_with, lambda_table, Exemplar, HalfIntForm};
pub use hurwitz::{bernoulli, cohen, hurwitz};
pub use jacobi::{jacobi_cusp_index1, plus_form_from_jacobi, JacobiForm1};
pub use qexp::{delta_qexp, eisenstein_qexp, eta_qexp, QExpansion};
