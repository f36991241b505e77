//! P1 finite elements for the functional on the layer `Ω \ D̄`.
//!
//! The constraint `φ ≥ 1` on `D` becomes the Dirichlet condition `u = 1` on
//! `∂D` (the minimizer equals 1 on `D`), so `D` is not meshed. The Robin term
//! lives on the outer boundary loop.

mod experiment;
mod levelset;
mod mesh;
mod solver;

pub use experiment::{counterintuitive_experiment, CounterintuitiveReport, OuterDomain};
pub use levelset::{levelset_diagnostics, LevelSetRow};
pub use mesh::{build_layered_mesh, build_star_mesh, LayeredMesh, MIN_TRIANGLE_AREA};
pub use solver::{
    functional_both_ways, solve_fem, FemSolution, FunctionalPair, Iteration, SolverOptions, P_RANGE,
};
