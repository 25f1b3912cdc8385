//! Symplectic reduction of the three-body problem in four-dimensional space.
//!
//! The crate goes from the 24-dimensional phase space of three bodies in
//! `R^4` to an 8-dimensional reduced Hamiltonian in two steps: Jacobi vectors
//! remove translations ([`model`]), then a chart on SO(4) and a restriction
//! to an invariant set remove rotations ([`reduction`]). On top of that it
//! provides integrators ([`dynamics`]) and relative equilibria with their
//! stability analysis ([`equilibria`]).

pub mod error;
pub mod linalg;
pub mod model;
pub mod reduction;
pub mod dynamics;
pub mod equilibria;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    angular_momentum, hamiltonian_full, jacobi_from_positions, newtonian_potential, AngularMomentum,
    FullState, MassTriple, Newtonian, ScalarPotential, ScalarProducts, ThreeBody,
};
pub use reduction::{PartialState, ReducedState, RotationAngles};
