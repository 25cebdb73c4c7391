//! Finite models of nonassociative tori and their deformation quantization.
//!
//! Everything lives over a finite abelian group `G` and its dual. Cocycles
//! are exact (`Q/Z`-valued); algebra elements are dense complex arrays.

pub mod bundles;
pub mod cochain;
pub mod crossed_product;
pub mod group;
pub mod linalg;
pub mod quantization;
pub mod suite;
pub mod twisted_algebra;
pub mod twisted_kernels;

mod error;

pub use error::{Error, Result};
