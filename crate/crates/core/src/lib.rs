//! Structure-preserving discrete exterior calculus on simplicial manifolds
//! with boundary.
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: oriented simplicial complexes, boundary extraction, manifold
//!   validation, generators and an exact Betti-number oracle.
//! - [`metric`]: cochains, Whitney mass matrices, `d`, `δ`, traces and the
//!   discrete Stokes and Green identities.
//! - [`hodge`]: harmonic fields under both boundary conditions, the
//!   Hodge-Morrey-Friedrichs decomposition and cohomology tables.
//! - [`stokesdirac`]: Stokes-Dirac systems, power balances and harmonic
//!   boundary energy flows.
//! - [`sim`]: implicit-midpoint time integration with conservation traces.

pub mod error;
pub mod hodge;
pub(crate) mod linalg;
pub mod mesh;
pub mod metric;
pub mod sim;
pub mod stokesdirac;

pub use error::{Error, Result};
pub use hodge::Hodge;
pub use mesh::{gen_mesh, BoundaryComplex, Shape, SimplicialComplex};
pub use metric::{Cochain, MetricStructure};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/cochains.md")]
    mod cochains {}
    #[doc = include_str!("../../../book/src/harmonic.md")]
    mod harmonic {}
    #[doc = include_str!("../../../book/src/stokes-dirac.md")]
    mod stokes_dirac {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
