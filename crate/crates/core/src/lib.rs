//! Exact-arithmetic engine for open gravitational descendents.
//!
//! The crate enumerates trivalent open ribbon graphs and their nodal
//! degenerations, solves Kasteleyn orientation systems over GF(2), and
//! evaluates the weighted graph sums that produce open and closed
//! intersection numbers, entirely over arbitrary-precision rationals.
//! A verification layer checks the computed tables against the string,
//! dilaton, and open KdV equations and against standalone polynomial and
//! differential-form identities.
//!
//! Start from the `examples/` directory for runnable tours of each
//! capability, or use the `openribbon` binary for batch runs.

pub mod amplitude;
pub mod closed;
pub mod enumerate;
pub mod forms;
pub mod io;
pub mod kasteleyn;
pub mod nodal;
pub mod poly;
pub mod ratfun;
pub mod ribbon;
pub mod series;
pub mod verify;
