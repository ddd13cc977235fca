//! Morphisms of free semigroups, their decomposition into elementary maps,
//! and S-adic towers built from them.

pub mod coding;
pub mod corpus;
pub mod decompose;
pub mod error;
pub mod factors;
mod fingerprint;
pub mod language;
pub mod morphism;
pub mod recognize;
pub mod words;

pub use error::{Error, Result};
pub use morphism::{Alphabet, Classification, Letter, Metrics, Morphism, Peel, Word};
pub use language::{DirectiveSequence, LanguageTable, Repeat};
