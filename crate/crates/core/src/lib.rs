//! Relativistic polytropic gas dynamics in one dimension, written in mass
//! (Lagrangian) coordinates `xi` for the particle trajectories `phi(xi, t)`.
//!
//! The crate covers the pointwise algebra of the variational formulation
//! ([`lagrangian`]), point symmetries and the Noether condition
//! ([`symmetry`]), conservation laws and their discrete diagnostics
//! ([`claws`]), a method-of-lines solver ([`solver`]) and the map to Eulerian
//! fields ([`bridge`]). The `relgas` binary drives all of it from a config
//! file, see [`cli`] and [`config`].
//!
//! ```
//! use relgas::prelude::*;
//!
//! let grid = Grid::new(0.0, 1.0, 64, Boundary::Periodic).unwrap();
//! let mut cfg = SolverConfig::new(GasParams::new(5.0 / 3.0).unwrap(), EntropyProfile::Constant(1.0), grid);
//! cfg.t_end = 0.1;
//! let traj = run(&cfg, &InitialCondition::SineVelocity { b: 0.05, k: 1.0 })
//!     .unwrap()
//!     .into_result()
//!     .unwrap();
//! let report = diagnose(&traj, &cfg.profile, cfg.gamma()).unwrap();
//! assert!(report.law(LawId::T1).unwrap().relative_drift < 1e-10);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod claws;
pub mod cli;
pub mod config;
pub mod entropy;
pub mod equivalence;
pub mod error;
pub mod gas;
pub mod interp;
pub mod jet;
pub mod lagrangian;
pub mod solver;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::bridge::{eulerian_density, resample, to_eulerian, EulerianSnapshot};
    pub use crate::claws::{builtin_laws, diagnose, eval_density, ConservationLaw, LawId};
    pub use crate::entropy::EntropyProfile;
    pub use crate::error::{Error, Result};
    pub use crate::gas::{gamma_factor, pressure, GasParams};
    pub use crate::jet::{Jet1, Jet2};
    pub use crate::lagrangian::{accel, el_residual, g_factor, lagrangian_density};
    pub use crate::solver::{run, Boundary, Grid, InitialCondition, SolverConfig, Trajectory};
    pub use crate::symmetry::{classify_entropy, extension_for, kernel_generators, AffineGenerator, Family};
}
