//! Connected group gradings of finite-dimensional algebras.
//!
//! The crate builds group gradings of matrix, triangular, diagonal, group and
//! truncated polynomial algebras, verifies them exactly over Q, Q(zeta_m) and
//! F_p, materializes the associated smash-product coverings, and computes
//! fundamental groups as limits of grading diagrams.

pub mod scalars;

pub mod groups;

pub mod algebra;

pub mod grading;

pub mod smash;

pub mod catalog;

pub mod pi1;

pub mod json;
