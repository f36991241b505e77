//! Numerical core for the Robin insulation functional
//!
//! ```text
//! I(D; Ω) = inf { ∫_Ω |Dφ|^p dx + β ∫_∂Ω |φ|^p dH^{n-1} : φ ≥ 1 on D }
//! ```
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It provides
//!
//! - [`geometry`]: convex polygons, their parallel bodies `D + δB`, Steiner
//!   polynomials and quermassintegral identities;
//! - [`radial`]: the closed-form minimizer on a spherical shell;
//! - [`web`]: the web-function upper bound obtained by transplanting the
//!   radial profile onto the level sets of the distance to `D`;
//! - [`fem`]: a P1 finite-element minimizer on layered annular meshes;
//! - [`quad`] and [`sparse`]: the adaptive quadrature and the envelope
//!   Cholesky factorization the modules above rely on.
//!
//! File formats, the command-line driver and seeded shape generators live in
//! the companion `insulation` crate.
#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod error;
pub mod fem;
pub mod geometry;
pub mod quad;
pub mod radial;
pub mod sparse;
pub mod web;

pub(crate) mod math;

pub use error::{Error, Result};
pub use geometry::{
    lemma_cost_check, lemma_cost_constant, unit_ball_volume, ConvexPolygon, Disk, PlanarDomain,
    Point2, RoundedBody, SteinerPolynomial,
};
pub use radial::{delta_threshold, solve_radial, RadialSolution};
pub use web::{web_upper_bound, UpperBoundReport, WebProfile};
