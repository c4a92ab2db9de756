//! The characteristic `ℛ = √A₂ + 𝒯` and its ingredients, energies,
//! monotonicity checks, the Hardy inequality and weak boundedness.

mod characterization;
mod energy;
mod hardy;
mod monotonicity;

pub use characterization::*;
pub use energy::*;
pub use hardy::*;
pub use monotonicity::*;
