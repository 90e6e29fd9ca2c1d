//! Newton strata in Iwahori double cosets of GL3 over `GF(p)((t))`.

pub mod affine_weyl;
pub mod empirics;
pub mod error;
pub mod isocrystal;
pub mod series;
pub mod strata;

pub use error::{Error, Result};
