pub mod cli;
pub mod controlled;
pub mod eframe;
pub mod error;
pub mod hilbert;
pub mod mapping;
pub mod neumann;
pub mod random;
