//! Geodesic distance estimation on sampled smooth surfaces.
//!
//! Two estimators are provided: shortest paths in a neighborhood graph, and
//! exact polyhedral geodesics on a surface mesh reconstructed from the sample
//! via tangential Delaunay complexes. On top of the distances sit classical
//! scaling and the Isomap / mesh-Isomap embedding pipelines, together with
//! analytic test surfaces, net extraction, local-PCA tangent estimation, and
//! grid constructions with slightly bumped counterparts for calibrating how
//! fast two close-by surfaces can separate.

pub mod cloud;
pub mod embedding;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod graph;
pub mod mesh;
pub mod nets;
pub mod surfaces;
pub mod tangents;

pub use cloud::PointCloud;
pub use error::{GeodesyError, Result};
