//! Numerical toolkit for two coupled quantum rotors.
//!
//! The static problem (two rotors with a cosine coupling) reduces to the
//! Mathieu equation in the relative angle; the entanglement entropy of one
//! rotor follows from the Fourier coefficients of the even Mathieu cosine
//! functions ([`mathieu`], [`bound`]).
//!
//! With a periodic delta kick and one heavy rotor acting as a bath, the
//! system rotor evolves under a Bessel-weighted Kraus channel ([`kraus`]),
//! whose continuum counterpart is a Lindblad equation with jump operators
//! `cos θ` and `sin θ` ([`lindblad`]). The exact unitary evolution of the
//! full product system ([`floquet`]) serves as the reference for both.
//! [`bathcorr`] evaluates the bath correlation kernel that makes the
//! dynamics time-local.
//!
//! Everything works in the angular-momentum basis `m ∈ {-M, …, M}`.

pub mod basis;
pub mod bathcorr;
pub mod bessel;
pub mod bound;
pub mod config;
pub mod csv;
pub mod densmat;
pub mod error;
pub mod floquet;
pub mod kraus;
pub mod lindblad;
pub mod mathieu;

pub use num_complex::Complex64 as C64;

pub use basis::MomentumBasis;
pub use densmat::{CMatrix, DensityMatrix, ReducedSpectrum};
pub use error::{Error, Result};
