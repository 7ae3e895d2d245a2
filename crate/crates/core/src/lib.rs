//! Classical ladder functions for one-dimensional wells, built as products
//! of factor functions, with the numerical machinery to verify every step
//! of the construction and to generate the bounded motion algebraically.
//!
//! The library covers four potential families behind the [`system::System`]
//! trait: the Rosen-Morse II well, its Poschl-Teller special case, and the
//! Kepler-Coulomb well on the hyperboloid and in flat space. For each
//! system it provides
//!
//! - the potential, bound-energy window and turning points ([`system`]),
//! - factor functions f_eps, g_eps in split form a + i b p, their
//!   factorization functions delta(H), contributions Lambda, signatures
//!   Gamma and H-dependent exponents ([`factor`]),
//! - the assembled ladder functions A_eps = f^gamma g_eps with branch-safe
//!   principal-log exponentiation and the closed-form bracket frequency
//!   alpha(H) ([`ladder`]),
//! - independent numerical oracles: finite-difference Poisson brackets,
//!   bracket-algebra residuals, the phase-integral representation check and
//!   the sign scans ([`verify`]),
//! - the physical frequency by singular-endpoint quadrature, a fixed-step
//!   integrator oracle, and motion generation from the unwrapped ladder
//!   phase ([`dynamics`]),
//! - the three limit regimes B -> 0, kappa -> 0 and l -> 0 ([`limits`]).

// negated comparisons are deliberate where NaN must fail the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod factor;
pub mod ladder;
pub mod limits;
pub mod numeric;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
pub use system::{
    build_system, describe, eval_hamiltonian, eval_potential, eval_potential_derivative,
    CurvedKeplerCoulomb, EnergyWindow, FactorKind, FactorSpec, FlatKeplerCoulomb, PhasePoint,
    PoschlTeller, RosenMorseII, Sign, System, SystemParams,
};
