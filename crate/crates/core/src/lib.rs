//! Absolute value equations over second-order cones.
//!
//! Solves `Ax − |x| − b = 0`, where `|x|` is the Jordan-algebra absolute value
//! of a product of second-order cones, by integrating the projection
//! dynamical system `dx/dt = γ Aᵀ (b + |x| − Ax)` until it settles on an
//! equilibrium. Candidate solutions are checked through the equivalent cone
//! complementarity residual.
//!
//! ```
//! use socave::prelude::*;
//!
//! let problem = example_toy(ToyExample::Unique);
//! let cfg = DynamicsConfig::new(2.0)?;
//! let traj = integrate(&problem, cfg, &[2.0, -2.0], (0.0, 5.0), &IntegratorOptions::default())?;
//! assert_eq!(traj.termination, Termination::ReachedTf);
//! assert!(problem.is_solution(traj.final_state(), 1e-3)?);
//! # Ok::<(), socave::Error>(())
//! ```
//!
//! The guide under `book/` walks through the mathematics; its code listings
//! are compiled and run as doctests of this crate.

pub mod ave;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod soc;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::ave::{AveProblem, MatrixSpec, ProblemFile, SolvabilityCertificate, Verdict};
    pub use crate::dynamics::{lipschitz_bound, lyapunov_rate, lyapunov_value, rhs, DynamicsConfig};
    pub use crate::error::{Error, Result};
    pub use crate::integrator::{integrate, time_to_tolerance, IntegratorOptions, Termination, Trajectory};
    pub use crate::linalg::{build_tridiag, min_singular_value, spectral_norm, DenseMatrix};
    pub use crate::problems::{example_toy, example_tridiag, random_unique, start_grid, BuiltinSpec, ToyExample};
    pub use crate::soc::{
        complementarity_residual, cone_membership, jordan_product, project_cone, soc_abs, spectral_decompose,
        BlockMembership, ConeStructure,
    };
}

#[cfg(doctest)]
mod book {
    macro_rules! book_chapters {
        ($($name:ident => $path:literal),* $(,)?) => {
            $(
                #[doc = include_str!(concat!("../../../book/src/", $path))]
                pub struct $name;
            )*
        };
    }

    book_chapters! {
        Introduction => "introduction.md",
        Cones => "cones.md",
        Equations => "equations.md",
        Dynamics => "dynamics.md",
        Integration => "integration.md",
        Experiments => "experiments.md",
        CommandLine => "cli.md",
    }
}
