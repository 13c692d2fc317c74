//! Solvers for the modular subset product problem (MSPP) and two of its
//! applications: generating Carmichael numbers from Erdős-style prime pools
//! and recovering low-weight plaintexts of the Naccache-Stern knapsack
//! cryptosystem.
//!
//! The crate is organized around the problem pipeline:
//!
//! * [`modmath`] - arbitrary-precision modular arithmetic, primality testing,
//!   prime enumeration and safe-prime generation.
//! * [`combinat`] - binomial coefficients and colexicographic enumeration of
//!   fixed-weight bit patterns with rank/unrank support.
//! * [`mspp`] - the problem model plus both solvers: the exhaustive
//!   meet-in-the-middle search and the memory-efficient iterated birthday
//!   attack with truncated digests.
//! * [`planner`] - closed-form success probability, expected iterations,
//!   memory/time estimates and digest-width selection.
//! * [`carmichael`] - Korselt/lambda tests, prime pool construction and
//!   Carmichael number generation through MSPP.
//! * [`nsk`] - the Naccache-Stern knapsack cryptosystem and the MSPP attack
//!   on it, including the high-weight reduction and known-bit refinement.
//! * [`fileio`] - the line-oriented instance/solution/key file formats used
//!   by the command line tool.

pub mod carmichael;
pub mod combinat;
pub mod fileio;
pub mod modmath;
pub mod mspp;
pub mod nsk;
pub mod planner;

pub use num_bigint::BigUint;
