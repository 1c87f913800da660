//! Flux of strictly contact diffeomorphisms on closed contact manifolds.
//!
//! Scalar fields and differential forms are exact finite Fourier–polynomial
//! expansions; integrals over coordinate cycles use quadrature rules that are
//! exact for the modes present. On top of that sit the contact structures of
//! the registered manifolds, the flux homomorphism and its image, a symplectic
//! comparison, a flow integrator, and Fourier-mode analysis of basic functions.

pub mod contact;
pub mod dynamics;
pub mod error;
pub mod flux;
pub mod forms;
pub mod funcalg;
pub mod linalg;
pub mod manifolds;
pub mod spectral;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
pub use forms::{Form, VectorFieldSym};
pub use funcalg::{Complex, ScalarField};
pub use manifolds::{registry, CycleSpec, ManifoldSpec, PeriodVector, QuadratureGrid, DEFAULT_GRID};
