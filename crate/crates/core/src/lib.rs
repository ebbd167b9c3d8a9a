//! Equilibria of the one-dimensional p-Laplacian problem
//! `-(|φ_x|^{p-2}φ_x)_x = λ(|φ|^{q-2}φ - f(φ))`, `φ(0) = φ(1) = 0`,
//! computed with the time-map method.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod error;
pub mod nonlinearity;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod solver;
pub mod timemap;

pub use error::{Error, Result};
pub use nonlinearity::{Family, HypothesisReport, Nonlinearity, NonlinearitySpec, Side};
