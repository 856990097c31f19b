//! Time-resolved pair creation by a Sauter-pulsed electric field in scalar
//! QED: exact hypergeometric mode functions with an independent ODE oracle,
//! time-dependent Bogoliubov coefficients in two adiabatic bases, the
//! late-time (1-y) expansion of the occupation number, and longitudinal
//! momentum-spectrum analysis (temporal stages, scaled-time overlap,
//! multiphoton structure).

pub mod adiabatic;
pub mod bogoliubov;
pub mod error;
pub mod field;
pub mod late_time;
pub mod mode;
pub mod special;
pub mod spectra;

pub use error::{Error, Result};
