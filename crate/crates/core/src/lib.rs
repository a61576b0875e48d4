//! Expected-linear-time geometry on uniformly random points in the unit cube.

pub mod concentration;
pub mod cli;
pub mod cones;
pub mod delaunay;
pub mod distsel;
pub mod error;
pub mod grid;
pub mod hull;
pub mod io;
pub mod mst;
pub mod points;
pub mod predicates;
pub mod quadtree;

pub use error::{Error, Result};
pub use points::{Params, PointSet};
