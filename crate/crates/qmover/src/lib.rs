//! Numerical toolkit for a family of qubit/qudit superoperators built
//! around the universal state inverter, with entanglement-witness scans
//! on Werner states, structural constraint checks, and a scalar-model
//! falsifier for alternative solutions.

pub mod channels;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod movers;
pub mod states;

pub use channels::{ChoiMatrix, ChoiNormalization, SuperOperator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition, Subsystem, Tolerance, C64};
pub use movers::{InverterParams, WitnessParams};
pub use states::{DensityMatrix, PureState};
