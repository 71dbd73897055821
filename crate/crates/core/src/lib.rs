//! Simulation of synchronous KT1 CONGEST algorithms built around danners:
//! sparse spanning subgraphs with small diameter that let a network elect a
//! leader, share randomness and aggregate with few messages.
//!
//! The [`congest`] engine runs one [`congest::NodeProgram`] per node and
//! meters every message. On top of it live the graph sketches in [`sketch`],
//! tree primitives in [`primitives`], the [`danner`] construction, and the
//! applications: [`mst`] (including connected components), [`mincut`] and
//! the [`verify`] suite.

pub mod congest;
pub mod danner;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod mincut;
pub mod mst;
pub mod primitives;
pub mod sketch;
pub mod verify;

pub use congest::{CongestConfig, Metrics, Sim};
pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, NodeId};
