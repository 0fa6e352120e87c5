//! Functional dependence graphs (FDGs) for network coding.
//!
//! * [`netmodel`]: capacitated acyclic networks with sources and sinks.
//! * [`fdg`]: FDG construction and capacity-preserving reduction.
//! * [`lpbound`]: the entropy linear-programming outer bound, solved exactly.
//! * [`algebra`]: symbolic transfer matrices for scalar linear coding and
//!   exhaustive solvability search over prime fields.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod algebra;
pub mod fdg;
pub mod lpbound;
pub mod netmodel;
pub mod rational;
mod simplex;

pub use fdg::{build_fdg, Fdg, Mode, ReductionTrace, Rule, Step, Var};
pub use netmodel::{Edge, Network, Sink, Source, Weights};
pub use rational::Rational;
