#![no_std]
extern crate alloc;

pub mod calibrate;
pub mod density;
pub mod error;
pub mod gof;
pub mod market;
pub mod mc;
pub mod nn;
pub mod params;

pub use error::{Error, Result};
pub use params::{FtVariant, HestonParams, TimeLag};
