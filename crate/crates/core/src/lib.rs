//! Gate set tomography experiment design: fiducial and germ selection,
//! fiducial pair reduction, Fisher-information certification, noisy dataset
//! simulation and wall-clock cost estimation.

pub mod basis;
pub mod design;
pub mod error;
pub mod fiducials;
pub mod fisher;
pub mod fpr;
pub mod germs;
pub mod linalg;
pub mod model;
pub mod noise;
pub mod stdsets;
pub mod wallclock;

pub use error::{GstError, Result};
pub use model::{Circuit, GateSet};
