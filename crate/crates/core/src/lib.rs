//! Local quantum metrology with stabilizer probes.
//!
//! Graph-state QFI closed forms and optimal-subset search, the dense
//! oracle used to verify them, subspace protocols that tolerate global
//! phase noise, dephasing-robust probes and composite graph constructors.

pub mod constructors;
pub mod dense;
pub mod enumeration;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod noise;
pub mod optimize;
pub mod pauli;
pub mod protocol2;
pub mod qfi_formula;
pub mod vertex_set;

pub use dense::{Collective, DenseState, LocalModel, Mat2, OracleLimits};
pub use error::{MetroError, Result};
pub use graph::{Graph, LabeledGraph, StandardGraph, TwinsStructure};
pub use pauli::{PauliLetter, PauliString, SupportPartition};
pub use vertex_set::VertexSet;
