//! Decision procedures for membership in rational subsets of groups and
//! monoids, assembled from regular-intersection oracles.

pub mod automata;
pub mod error;
pub mod grammars;
pub mod groupfile;
pub mod groups;
pub mod oracle;
pub mod rewriting;
pub mod rid;
pub mod stats;
pub mod words;

pub use automata::{compile, compile_str, Nfa, Transducer};
pub use error::{Error, Result};
pub use rewriting::{ancestors_rid, saturate, MonadicSystem};
pub use rid::RidLanguage;
pub use words::{Alphabet, InvolutiveAlphabet, Letter, Morphism, Word};
