//! Desk-scale toolkit for fundamental Fourier coefficients of degree-2 Siegel
//! cusp forms of Saito-Kurokawa type and the arithmetic around them.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: sieves, factorisation, Kronecker symbols, fundamental discriminants.
//! * [`classgroup`]: reduced forms, composition, group structure and characters.
//! * [`mf`]: exact q-expansions, Hurwitz and Cohen numbers, index-1 Jacobi forms,
//!   plus-space half-integral weight forms, level-1 Hecke eigenvalues.
//! * [`siegel`]: Saito-Kurokawa coefficients, Fourier-Jacobi slices, `h_p`, Bessel periods.
//! * [`lfun`]: Dirichlet L(1, chi_d), central twists L(1/2, g x chi_d), L(1, Sym^2 g).
//! * [`resonance`]: resonator, the family of twists, the twisted first moment.
//! * [`satake`]: Satake power sums, identities, moment bounds, random model.
//! * [`stats`]: sign changes, moments and large values of coefficient sequences.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature disabled
//! every loop runs sequentially and produces bit-identical results.

pub mod arith;
pub mod cache;
pub mod classgroup;
pub mod error;
pub mod lfun;
pub mod mf;
pub mod numeric;
pub mod par;
pub mod resonance;
pub mod satake;
pub mod selftest;
pub mod siegel;
pub mod stats;

pub use error::{Error, Result};
