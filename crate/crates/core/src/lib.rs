#![no_std]

//! Semantics of regular asynchronous systems.
//!
//! Binary signals over exact rational time ([`Signal`]), progressive update
//! schedules ([`Schedule`]), generator functions `Υ: B^n × B^m → B^n`
//! ([`GeneratorFunction`]) and the asynchronous evolution equation that
//! couples them ([`solver::solve`]). On top of these sit explicit finite
//! systems with their combinators ([`systems`]) and the decision procedures
//! and verifiers for regularity ([`regularity`]).
//!
//! ```
//! use ars_core::{solver, GeneratorFunction, Schedule, Signal};
//!
//! let follower: GeneratorFunction = "n=1 m=1 ; x1' = u1".parse()?;
//! let u: Signal = "init 1".parse()?;
//! let r: Schedule = "sched n=1 prefix[] tail anchor=1 period=1 [0:{1}]".parse()?;
//! let x = solver::solve(&follower, "0".parse()?, &u, &r, solver::DEFAULT_MAX_EVENTS)?;
//! assert_eq!(x.to_string(), "init 0 ; 1:1");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

extern crate alloc;

mod bits;
mod error;
mod genfn;
mod rational;
mod schedule;
mod signal;
pub mod regularity;
pub mod solver;
pub mod syntax;
pub mod systems;

pub use crate::bits::{BitVector, MAX_WIDTH};
pub use crate::error::{Error, Location, ParseError};
pub use crate::genfn::{Expr, GeneratorFunction, ARITY_CAP};
pub use crate::rational::Rational;
pub use crate::schedule::{Event, Events, Schedule};
pub use crate::signal::Signal;
