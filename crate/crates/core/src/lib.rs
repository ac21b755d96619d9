//! Finite higher-rank graphs presented by colored skeletons: validation,
//! path algebra, Perron–Frobenius data, the Parry measure and the dynamics of
//! the two-sided path space at finite window scale.

pub mod catalog;
pub mod checks;
pub mod construct;
pub mod degree;
pub mod document;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod kgraph;
pub mod measure;
pub mod relations;
pub mod skeleton;
pub mod spectral;
pub mod validate;

pub use degree::DegreeVector;
pub use error::{KGraphError, Result};
pub use grid::PathGrid;
pub use kgraph::{KGraph, Morphism, DEFAULT_ENUMERATION_CAP};
pub use skeleton::{ColoredEdge, Edge, Skeleton, SkeletonBuilder, SquareEntry, SquareTable, Vertex};
pub use spectral::{
    af_multiplicities, aperiodicity_probe, classify_connectivity, perron_data, vertex_matrix, AfData,
    AperiodicityOutcome, ConnectivityClass, PerronData, VertexMatrix,
};
pub use validate::{validate_skeleton, ValidationReport, Violation};
