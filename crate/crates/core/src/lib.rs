//! Computations behind the modular method for `x^p + y^p = z^3` over the
//! imaginary quadratic fields Q(sqrt(-d)), d in {1, 7, 19, 43, 67}.
//!
//! * [`ring`]: exact arithmetic in the rings of integers, primes, `O_K/3^m`.
//! * [`frey`]: the Frey curve `Y^2 + 3cXY + b^p Y = X^3`, its invariants and
//!   local classification.
//! * [`bounds`]: resultant constants, ray class groups, Hasse sets and the
//!   assembled bound `B_K`.
//! * [`eliminate`]: ingestion of Bianchi eigenform tables and elimination.
//! * [`screen`]: number-field screening for the asymptotic statements.
//! * [`cli`]: the `fermat-pp3` command-line front end.

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod eliminate;
pub mod frey;
pub mod poly;
pub mod ring;
pub mod screen;
mod serde_big;

pub use ring::{PrimeIdeal, QuadraticField, RingElement, SplitType, Valuation};
