//! Finite-difference laboratory for elliptic Dirichlet problems
//! `-Δu + g(u) = μ` with measure data.
//!
//! The crate provides uniform grids with exact discrete Green identities,
//! discrete measures (atoms + density), linear and semilinear solvers,
//! the reduced-measure truncation ladder, Hausdorff/Frostman geometry,
//! and discrete `W^{1,2}` capacities. All numerics are generic over the
//! scalar type; the `*64`/`*32` aliases below fix `f64`/`f32`.

pub mod capacity;
pub mod error;
pub mod geom;
pub mod grid;
pub mod io;
pub mod linear;
pub mod measure;
pub mod nonlin;
pub mod reduced;
pub mod scalar;
pub mod semilinear;
pub mod solver;

pub use error::{Error, Result};
pub use grid::{Domain, GridFunction, Norms, Shape};
pub use measure::{Atom, DiscreteMeasure, LatticeOp};
pub use nonlin::{Family, Nonlinearity};
pub use scalar::Scalar;

/// `f64` aliases (the working precision of the CLI and the test suites).
pub type Domain64 = grid::Domain<f64>;
pub type GridFunction64 = grid::GridFunction<f64>;
pub type DiscreteMeasure64 = measure::DiscreteMeasure<f64>;
pub type Nonlinearity64 = nonlin::Nonlinearity<f64>;

/// `f32` aliases.
pub type Domain32 = grid::Domain<f32>;
pub type GridFunction32 = grid::GridFunction<f32>;
pub type DiscreteMeasure32 = measure::DiscreteMeasure<f32>;
pub type Nonlinearity32 = nonlin::Nonlinearity<f32>;
