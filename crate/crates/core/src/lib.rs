//! Jenkins-Serrin type admissibility checks and capped-continuation solvers
//! for minimal, constant mean curvature and translating graphs over planar
//! domains with a conformal metric.

pub mod analysis;
pub mod cli;
pub mod domain;
pub mod expr;
pub mod geom;
pub mod mesh;
pub mod metric;
pub mod oracles;
pub mod solver;
