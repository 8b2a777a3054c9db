//! Conjugacy decisions for outer automorphisms of free groups of rank at most three.

pub mod automorphism;
pub mod error;
pub mod folding;
pub mod matrix;
pub mod outf2;
pub mod outf3k;
pub mod peripheral;
pub mod pipeline;
pub mod traintrack;
pub mod twisted;
pub mod verdict;
pub mod whitehead;
pub mod word;

pub use error::{CoreError, Result};
pub use word::{conjugate_in_free, simultaneous_conjugator, Alphabet, CyclicWord, Letter, Word};
pub use automorphism::Automorphism;
pub use matrix::IMat;
pub use verdict::Verdict;
