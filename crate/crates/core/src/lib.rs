//! Porosity of closed null subsets of the line and power weights of the
//! distance to them.

pub mod error;
pub mod muckenhoupt;
pub mod numeric;
pub mod porosity;
pub mod real_sets;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use real_sets::{GapList, Interval, SetDescription};
