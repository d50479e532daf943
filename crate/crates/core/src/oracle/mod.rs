//! Independent reference computations used by the verification suite.
//!
//! Nothing in here is used on the production path; these routines exist so
//! closed forms and fast paths can be checked against brute force.

pub mod quadrature;

pub use quadrature::{adaptive_gauss_kronrod, hydrogen_radial, radial_integral_quadrature};
