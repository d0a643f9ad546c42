//! Exact computation of the Kauffman bracket, the Jones polynomial and
//! Khovanov homology of link diagrams, with mechanical verification of the
//! structural identities that tie them together.

pub mod bracket;
pub mod complex;
pub mod corpus;
pub mod framed;
pub mod homology;
pub mod matrix;
pub mod moves;
pub mod polyring;
pub(crate) mod qlinalg;
pub mod diagram;
pub mod laurent;
pub mod states;

pub use diagram::{parse_pd, resolve_state, CircleId, CircleSet, Crossing, DiagramError, LinkDiagram, MarkerVector};
pub use laurent::{APoly, Laurent, QPoly};
pub use states::{enumerate_enhanced_states, gradings, state_stats, EnhancedState, Gradings, StateError, StateStats, DEFAULT_MAX_CROSSINGS};
