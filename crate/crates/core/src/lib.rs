//! Factor complexity of infinite permutations generated by fixed points of
//! binary uniform marked morphisms.

pub mod ancestry;
pub mod count;
pub mod engine;
pub mod error;
pub mod morphism;
pub mod oracle;
pub mod pattern;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use morphism::{Morphism, QMembership};
pub use pattern::{Pattern, PatternSets, SpecialStats};
pub use word::{FixedPoint, Limits, Prefix, Word};
pub use ancestry::{Interpretation, Kind, SeedTables, WordClass};
pub use count::Count;
pub use engine::Engine;

pub type Engine64 = Engine<u64>;
pub type Engine128 = Engine<u128>;
