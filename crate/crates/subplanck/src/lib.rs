//! Numerical laboratory for entangled bipartite compass states.
//!
//! The crate builds finite superpositions of coherent states, evaluates
//! their two- and four-variable Wigner functions in closed form and by
//! quadrature, measures the sub-Planck checkerboard geometry (zero lines
//! and fundamental tile area), simulates the trapped-atom generation
//! protocol (displaced-oscillator ground doublets, delayed-coupling
//! rotation, joint internal-state measurement), and quantifies
//! displacement sensitivity through the perturbed-overlap cosine law.

pub mod coeffs;
pub mod geometry;
pub mod state;
pub mod wigner;
pub mod zeros;

pub use coeffs::{make_compass_bipartite, CoeffBasis, CompassCoefficients};
pub use geometry::ModeGeometry;
pub use state::{
    coherent_overlap, make_cat, make_compass_single, vacuum, BipartiteComponent, BipartiteState,
    GaussianComponent, ModeSelect, Parity, SingleModeState, StateError,
};
