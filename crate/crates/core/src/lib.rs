//! Construction and numerical certification of entangled multipartite subspaces.
//!
//! Bipartite completely entangled subspaces are combined through tensor
//! products, adjacent-party joins and direct sums into multipartite subspaces
//! whose entanglement (geometric measures, witnesses, NPT-ness and one-copy
//! distillability) is then checked numerically.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex linear algebra with party bookkeeping
//! - [`subspace`]: the subspace algebra (tensor, join, direct sum, projectors)
//! - [`channel`]: isometry channels and their maximal output norm
//! - [`measures`]: geometric measures, seesaw product-overlap optimisation,
//!   witnesses and entanglement criteria
//! - [`constructions`]: named builders (antisymmetric, Johnston, chains,
//!   direct-sum constructions, Werner states)
//! - [`distill`]: partial-transpose spectra and Schmidt-rank-2 witnesses
//! - [`cli`] and [`verify`]: the command-line front end and the
//!   self-verification table it prints

pub mod channel;
pub mod cli;
pub mod constructions;
pub mod distill;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod policy;
pub mod rng;
pub mod subspace;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Bipartition, DensityOperator, DimProfile, PureState, C64};
pub use measures::{MeasureReport, OptimizerPolicy};
pub use policy::NumericPolicy;
pub use subspace::Subspace;
