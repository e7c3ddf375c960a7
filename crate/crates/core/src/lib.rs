//! Covariant two-body relativistic bound states.
//!
//! Three channels are supported: two scalars (SS), a scalar and a fermion (SF)
//! and two fermions (FF). Each channel reduces to a first-order radial system
//! `y' + A(r, λ) y = 0` which is solved by double shooting: Frobenius series
//! starts at the origin, decaying starts at large radius, and a matching
//! determinant whose zeros are the eigenvalues. For two fermions a first-order
//! Breit spin-spin shift is evaluated on the assembled 16-component state.
//!
//! Energies are natural units (ħ = c = 1). The spectral parameter used
//! internally is the binding energy `E = λ − threshold`, which keeps the
//! hyperfine-scale differences of atomic systems representable.

pub mod angular;
pub mod breit;
pub mod classical;
pub mod constants;
mod error;
pub mod model;
pub mod ode;
pub mod oracles;
pub mod radial;
pub mod series;
pub mod shooting;
pub mod tables;
pub mod units;

pub use error::{Error, Result};
pub use model::{
    free_total_energy, reduced_mass, relative_energy_q0, ChannelKind, ChannelSpec,
    InteractionSpec, KinematicState, Parity, ParticleSpec, Spin,
};
pub use radial::{build_system, free_solution_basis, limit_system, LimitKind, RadialSystem};
pub use shooting::{
    default_bracket, eigenfunction_full, find_eigenvalues, spectral_determinant, FullComponents, SolverSettings, SpectralResult,
    Spectrum,
};
