//! Exact symbolic computations for quasi-split iquantum groups.
//!
//! The crate evaluates the combinatorial bilinear forms on the modified iquantum group and on
//! Lusztig's algebra `f`, the graded ranks of 2-morphism spaces in its categorification, the
//! (i)divided powers and the iSerre relations, and rewrites diagrams in the quiver Hecke
//! category. Every quantity is computed by at least two independent algorithms so that they
//! can be cross-checked.

pub mod config;
pub mod error;
pub mod freealg;
pub mod iuea;
pub mod klr;
pub mod qring;
pub mod satake;
pub mod selftest;
pub mod shapes;

pub use error::{Error, Result};
