//! Minimal total-energy radial stretchings between spherical annuli.
//!
//! A radial stretching `h(x) = H(|x|) x/|x|` of the shell `r < |x| < R` onto
//! `r* < |y| < R*` in `R^n` is scored by the weighted sum of its `n`-energy
//! and the `n`-energy of its inverse. The minimizing profile `H` solves a
//! second-order Euler–Lagrange equation which reduces, in the variable
//! `t = H/s`, to the first-order flow `F' = G(t, F)`. This crate
//!
//! * evaluates the radial integrand and its derivatives ([`model`]),
//! * integrates ODEs adaptively ([`integrate`]),
//! * finds the minimizer by monotone shooting on the reduced flow ([`bvp`]),
//! * checks minimality with quadrature energies, random competitors and a
//!   discrete coordinate-descent oracle ([`variational`]),
//! * drives everything from the command line ([`cli`]).

pub mod bvp;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod model;
pub mod variational;

pub use error::{Error, Result};
pub use model::{EvalPoint, Integrand, Problem, ReducedPoint};
