//! Radiative and non-radiative parts of classical four-currents.
//!
//! Sources are described in real space ([`current`], [`sampled`]) and
//! transformed to momentum space ([`spectral`]). From there the crate
//! computes emitted photon numbers ([`radiation`]), the virtual exchange
//! energy between sources ([`exchange`]), a radiative / non-radiative split of
//! a current ([`decomposition`]) and numerical checks of the Feynman
//! propagator identities ([`propagator`]).

pub mod current;
pub mod decomposition;
pub mod error;
pub mod exchange;
pub mod quadrature;
pub mod radiation;
pub mod propagator;
pub mod sampled;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use units::{PhysicalConstants, Vec3};
