//! Interest-based social network laboratory.
//!
//! Nodes draw object rings (interests) from a shared pool and connect when
//! they share at least `d` objects; the resulting random intersection graph
//! is then thinned by friendship and link-survival probabilities. The crate
//! samples that model, decides resilience (connectivity after `m` adversarial
//! node failures) exactly, evaluates the edge probabilities and limiting
//! connectivity probabilities, and provides Monte-Carlo checks of the
//! supporting constructions (couplings, Poissonization, Poisson degree law).

pub mod connectivity;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod rng;
pub mod stats;
pub mod theory;

pub use error::{LabError, Result};
pub use graph::{DegreeHistogram, GraphTopology};
pub use theory::ModelParams;
