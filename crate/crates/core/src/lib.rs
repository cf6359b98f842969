//! Construction and validation of growth-rate-optimal e-variables under
//! structural constraints: local differential privacy with binary output,
//! two-level quantization, almost-sure boundedness, and convex integral
//! (moment) constraints — for simple and composite (LFD-pair) hypothesis
//! testing.
//!
//! An e-variable for a null `H0` is a nonnegative statistic `E` with
//! `E[E] <= 1` under every member of `H0`; the log-optimal (GROW) choice
//! maximizes the worst-case expected log under the alternative. Without
//! constraints that optimum is the likelihood ratio of the least favorable
//! pair. Each solver here imposes one constraint class and returns the
//! constrained optimum, which is always a (possibly randomized) monotone
//! post-processing of that likelihood ratio:
//!
//! * [`ldp`] — epsilon-LDP binary channels, the optimal threshold mechanism,
//!   the induced two-value e-variable, and the private Kelly bet simulator;
//! * [`constraints`] — two-level quantization, clipping to `[c1, c2]`, and
//!   convex integral constraints `E[phi(E)] <= C` with the second-moment
//!   closed form;
//! * [`composite`] — LFD pairs, the lift of any monotone simple-vs-simple
//!   solution to a composite problem, and numerical validity sweeps;
//! * [`counterexample`] — the bounded-mean composite null with uniform
//!   alternative where optimize-then-constrain provably fails;
//! * [`oracle`] — brute-force references (exhaustive mechanism/quantizer
//!   search, dual-grid scan) used by the test and acceptance suites.
//!
//! Everything is deterministic: fixed quadrature grids, seeded generators,
//! and pure solvers, so identical inputs produce identical bytes.

pub mod composite;
pub mod constraints;
pub mod counterexample;
pub mod dist;
pub mod error;
pub mod ldp;
pub mod numeric;
pub mod oracle;
pub mod testgen;

pub use error::{Error, Result};
