//! Numerical study of the Hardy-Schrodinger operator
//! `L u = -lap(u) + mu/|x|^2 u` on bounded domains whose boundary carries the
//! potential singularity.
//!
//! The half-space theory is explicit (characteristic exponents, separable
//! solutions, the Dirac normalization of the singular one); on a bounded
//! domain tangent to the boundary hyperplane everything is rebuilt
//! discretely: graded meshes, the principal eigenpair, truncated-potential
//! Poisson limits, the exhaustion construction of the singular kernel, very
//! weak solutions with measure boundary data, and the recovery of their
//! boundary trace.
//!
//! All numerics are generic over the scalar through [`real::Real`]; the
//! aliases below pin the `f64` instantiations the binaries and test suites
//! use.

// Assembly and solver kernels index several parallel node arrays at once;
// plain index loops are the clearer style there.
#![allow(clippy::needless_range_loop)]

pub mod discretize;
pub mod error;
pub mod extrapolate;
pub mod fit;
pub mod geometry;
pub mod halfspace;
pub mod kernels;
pub mod pairing;
pub mod quad;
pub mod real;
pub mod sparse;
pub mod spectral;
pub mod trace;

pub use error::{Error, Result};
pub use real::Real;

/// Scalar used by the shipped binaries.
pub type Scalar = f64;

pub type TangentBall = geometry::TangentBall<Scalar>;
pub type GradedMesh = geometry::GradedMesh<Scalar>;
pub type GridFunction = discretize::GridFunction<Scalar>;
pub type SparseSystem = discretize::SparseSystem<Scalar>;
pub type SpectralParams = halfspace::SpectralParams<Scalar>;
pub type RadialTest = halfspace::RadialTest<Scalar>;
pub type EigenPair = spectral::EigenPair<Scalar>;
pub type BoundaryDatum = kernels::BoundaryDatum<Scalar>;
pub type WeakSolver = trace::WeakSolver<Scalar>;
pub type Schedule = extrapolate::Schedule<Scalar>;
