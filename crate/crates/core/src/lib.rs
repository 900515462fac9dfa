//! Weighted dynamical invariants on factor towers.
//!
//! A *tower* is a chain of shift systems `X_1 -> X_2 -> ... -> X_k` linked by
//! forgetful factor maps, together with a weight vector `a`. Level `i` is
//! observed for `ceil((a_1 + ... + a_i) n)` time steps, which gives the
//! weighted Bowen metric `d_n^a` and, from it, weighted spanning/separated
//! numbers, weighted topological entropy and weighted metric mean dimension.
//!
//! The crate is `no_std` (it needs `alloc`). Everything is computed with exact
//! rationals and big integers; logarithms only appear when a count is turned
//! into a rate, and even then [`LogCount`] keeps the exact integer around so
//! rates can be compared without rounding.
//!
//! Modules:
//! - [`tower`]: data model and structural validation.
//! - [`wmetric`]: weighted Bowen distance enclosures and precision profiles.
//! - [`counting`]: spanning/packing numbers, itinerary counts, cube covers.
//! - [`covers`]: box covers, order, joins, pullbacks and bounds on `D(alpha)`.
//! - [`invariants`]: entropy, `S^a(X, eps)` and metric mean dimension slopes.
//! - [`ocap`]: orbit capacity on subshifts of finite type.
#![no_std]
#![deny(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod exact;

pub mod counting;
pub mod covers;
pub mod invariants;
pub mod ocap;
pub mod tower;
pub mod wmetric;

pub use error::{Error, Result};
pub use exact::{
    ceil_ratio, dyadic, floor_log2, floor_ratio, ln_biguint, parse_ratio, LogCount, Rational,
};
