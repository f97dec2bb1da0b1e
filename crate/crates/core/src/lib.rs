//! Parametric ATSP formulations, their projections and closures, and exact
//! verification tooling on small complete digraphs.

pub mod analysis;
pub mod error;
pub mod formulations;
pub mod graph;
pub mod instance;
pub mod lp;
pub mod params;
pub mod point;
pub mod projection;
pub mod rat;
pub mod separation;

pub use error::{Error, Result};
pub use graph::{Arc, ArcSpace, Cycle, NodeSubset};
pub use lp::{LinSys, LpResult, LpStatus, Row, RowKind, Sense};
pub use rat::Rat;
