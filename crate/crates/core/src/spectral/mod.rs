//! Vertex matrices |Λᵖ|, connectivity classification, Perron–Frobenius data,
//! AF-tower block data and a bounded aperiodicity probe.

mod af;
mod aperiodic;
mod connectivity;
mod matrix;
mod perron;

pub use af::{af_multiplicities, AfData};
pub use aperiodic::{aperiodicity_probe, candidate_periods, AperiodicityOutcome};
pub use connectivity::{classify_connectivity, ConnectivityClass, DEFAULT_SEARCH_BOUND};
pub use matrix::{generator_matrix, vertex_matrix, VertexMatrix};
pub use perron::{perron_data, PerronData, DEFAULT_TOL};
