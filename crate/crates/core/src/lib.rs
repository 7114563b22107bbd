//! Conjugacy in ascending HNN-extensions `F ∗_φ` of finitely generated free
//! groups, together with the free-group machinery it rests on: reduced words,
//! Stallings folding, endomorphism dynamics, twisted conjugacy and exponent
//! equations.

pub mod brinkmann;
pub mod decision;
pub mod dynamics;
pub mod endo;
pub mod engine;
pub mod hnn;
pub mod stallings;
pub mod twisted;
pub mod words;

pub use decision::{BoundKind, Bounds, Certificate, Decision, Exhausted, Trace};
pub use endo::Endomorphism;
pub use engine::Engine;
pub use words::{CyclicWord, Word};
pub use hnn::{ConjugacyWitness, HnnElement, HnnPresentation, HnnWord};
