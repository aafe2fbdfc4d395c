//! Coordination sequences of periodic graphs and their rational generating
//! functions, computed exactly through vector automata and semilinear sets.

pub mod automaton;
pub mod genfunc;
pub mod linalg;
pub mod periodic_graph;
pub mod pipeline;
pub mod poly;
pub mod semilinear;

pub use automaton::{Transition, VectorNfa};
pub use genfunc::{QuasiPolynomial, RationalGF};
pub use periodic_graph::{CoordinationSequence, CoverVertex, EdgeOrbit, PeriodicGraph};
pub use pipeline::{Method, PipelineOptions, PipelineReport};
pub use semilinear::{LinearSet, SemilinearSet};
