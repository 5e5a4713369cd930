//! Exact non-Markovian entanglement dynamics of two single-mode nanocavities
//! side-coupled to a coupled-resonator optical waveguide.

mod error;
pub mod model;
pub mod moments;
pub mod propagator;
pub mod quadrature;
pub mod special;
pub mod spectral;

pub use error::{MomentsError, PropagatorError, SpectralError, ValidationError, ValidationErrors};
pub use model::{Cavity, ComplexMatrix2, Regime, Regimes, SystemConfig, TimeGrid};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/propagator.md")]
    mod propagator {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
