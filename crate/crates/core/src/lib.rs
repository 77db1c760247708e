//! Exact decisions about spectral gap, ergodicity and strong ergodicity of affine actions on
//! `a`-adic solenoids, with checkable certificates and a numerical Koopman simulator.

pub mod cli;
pub mod decide;
pub mod error;
pub mod koopman;
pub mod linalg;
pub mod module;
pub mod numfield;
pub mod solenoid;
pub mod zariski;
