//! Executable classification of differentiable structures on the line with
//! two origins.
//!
//! The crate is split along the mathematical layers of the problem:
//!
//! - [`germs`]: exact and numeric homeomorphism germs of `R` fixing `0`,
//!   their one-sided jets and `C^k` membership tests.
//! - [`cosets`]: double cosets and `(D,±)`-double cosets in finite groups,
//!   the wreath product `D ≀ Z₂`, and the closed-form classification of the
//!   `w_a` family.
//! - [`dline`]: points, minimal atlases and diffeomorphisms of the doubled
//!   line, with certified witness constructions.
//! - [`join`]: numerical gluing of interval charts (bump functions,
//!   quadrature, monotone interpolation, finite-difference certification).
//! - [`cli`]: the `dline` command-line surface.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cosets;
pub mod dline;
mod error;
pub mod exact;
pub mod germs;
pub mod interp;
pub mod join;
pub mod numdiff;

pub use error::{Error, Result};
