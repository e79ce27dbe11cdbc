//! Numerical toolkit for constant mean curvature surfaces in R^3 and their
//! conjugate minimal cousins in the three-sphere.
//!
//! The crate is organised bottom-up:
//!
//! * [`quat`] quaternion algebra, S^3 as unit quaternions, Hopf fields and projections
//! * [`surface`] immersion grids and finite-difference differential geometry
//! * [`cousin`] the first-order cousin integrator in both directions and its diagnostics
//! * [`delaunay`] spherical helicoids, Delaunay unduloids and the profile-ODE oracle
//! * [`moduli`] spherical triples, necksize trigonometry, forces, boundary classification
//! * [`devmap`] sheeted spherical metrics: slit spheres, rays, three-point metrics
//! * [`io`] grid serialization, OBJ export and profile CSV

pub mod cousin;
pub mod delaunay;
pub mod devmap;
pub mod error;
pub mod io;
pub mod moduli;
pub mod ode;
pub mod quat;
pub mod surface;
pub mod tolerances;

pub use error::{Error, Result};
pub use quat::{Quaternion, SpherePoint, UnitQuaternion};
pub use surface::{Ambient, ImmersionGrid};
