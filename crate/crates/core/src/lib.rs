//! Exact dynamics of two identical two-level atoms coupled to one cavity mode
//! prepared in a Fock state.
//!
//! The crate evolves the atoms and field, traces out the field, and
//! quantifies the entanglement between the atoms with the partial-transpose
//! negativity `N = sum |eig(rho^T_B)| - 1`.
//!
//! ```
//! use tavis::{dynamics::Evolution, entanglement::negativity, model::{basis_vector, SystemParams, EE}};
//!
//! let params = SystemParams::new(1.0, 0)?;
//! let evo = Evolution::new(&params, &basis_vector(EE))?;
//! let rho = evo.reduced(1.5)?;
//! let n = negativity(&rho)?;
//! assert!(n.value > 0.0 && n.value <= 1.0);
//! # Ok::<(), tavis::Error>(())
//! ```
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices, Jacobi eigensolver, matrix exponential,
//!   partial trace and partial transpose.
//! * [`model`]: parameters, initial states and Hamiltonians.
//! * [`propagator`]: spectral, full-space and closed-form propagators and the
//!   closed-form audit.
//! * [`dynamics`]: reduced density matrices and time series.
//! * [`entanglement`]: negativity and state-class templates.

pub mod dynamics;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod model;
pub mod propagator;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/propagators.md")]
    mod propagators {}
    #[doc = include_str!("../../../book/src/entanglement.md")]
    mod entanglement {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
