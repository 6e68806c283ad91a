//! Discrete Riemannian Voronoi diagrams and anisotropic Delaunay complexes.
//!
//! Geodesic distances to a set of sites are approximated on a dense
//! background triangulation (the canvas). Colouring canvas vertices by
//! their nearest site gives a discrete Voronoi diagram whose colour
//! adjacencies form an abstract Delaunay complex. Brute-force oracles,
//! net certification, closed-form bounds and conformance checks tie the
//! discrete complex to its exact counterpart.

pub mod bounds;
pub mod canvas;
pub mod complex;
pub mod conformance;
pub mod drvd;
pub mod error;
pub mod geodesic;
pub mod io;
pub mod metric;
pub mod nets;
pub mod oracle;
pub mod realization;
pub mod svg;

pub use error::{Error, ParseError, Result};
