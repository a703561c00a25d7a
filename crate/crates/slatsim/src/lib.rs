//! Tile-to-slat compilation toolchain.
//!
//! `atam` and `asam` hold the two models, `iomark` the marking and
//! classification pass, `compiler` the five backends, `verify` the
//! simulation checks, and `doc`/`render`/`fixtures` the file-facing side.

pub mod asam;
pub mod atam;
pub mod compiler;
pub mod doc;
pub mod error;
pub mod fixtures;
pub mod iomark;
pub mod render;
pub mod verify;

pub use error::{Error, Result};
