//! Bloch-Zener oscillations in a period-doubled tight-binding lattice.
//!
//! A particle hops between neighbouring wells of a chain whose on-site
//! energies alternate by `delta` and which is tilted by a static force `F`.
//! The alternation splits the cosine band into two minibands; the tilt turns
//! each into a Wannier-Stark ladder, and wave packets perform Bloch
//! oscillations with Zener transitions between the minibands.
//!
//! * [`lattice`]: parameters, truncated Hamiltonian, lattice operators.
//! * [`bands`]: field-free dispersion, Bloch waves, interband coupling.
//! * [`spectrum`]: the two ladders by diagonalisation and by Floquet analysis.
//! * [`propagator`]: real-space and quasimomentum time evolution.
//! * [`scenario`]: reconstruction periods, occupation fits, named experiments.
//! * [`io`], [`config`], [`cli`]: data emission and the command-line front end.

pub mod bands;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod lattice;
pub mod propagator;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
pub use lattice::{LatticeWindow, ModelParams, WavePacket};
