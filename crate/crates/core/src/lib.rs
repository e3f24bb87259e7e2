//! Fermion-qubit quantum computing toolkit.
//!
//! Symbolic Majorana algebra and Clifford conjugation, a dense simulator for
//! mixed qubit/fermion/boson registers, fermionic stabilizer codes, simulation
//! gadgets and the molecular pairing protocol.

pub mod circuit;
pub mod clifford;
pub mod codes;
pub mod dense;
pub mod gadgets;
pub mod gf2;
pub mod kl;
pub mod majorana;
pub mod pairing;
pub mod resources;
pub mod sim;
pub mod tomography;
pub mod verify;

pub use num_complex::Complex64 as C64;
