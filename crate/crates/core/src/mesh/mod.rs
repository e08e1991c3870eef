//! Oriented simplicial complexes with boundary, test-mesh generators and an
//! exact homology oracle.

mod boundary;
mod complex;
mod generators;
pub mod geometry;
mod homology;
mod io;
mod validate;

pub use boundary::{extract_boundary, BoundaryComplex};
pub use complex::{Incidence, SimplicialComplex};
pub use generators::{gen_mesh, Shape};
pub use homology::{
    betti_numbers, betti_numbers_float, euler_characteristic, exact_rank, float_rank, EXACT_RANK_BIT_LIMIT,
    FLOAT_RANK_RTOL,
};
pub use io::{read_mesh, write_mesh, MeshFile};
pub use validate::{validate_manifold, Finding, ValidationReport};
