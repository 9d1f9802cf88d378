//! Core engine: typed lambda terms over a modal surface syntax, shallow
//! embedding into HOL truth sets, a paired tableau/model-finder reasoner,
//! correctness and adequacy scoring for formalized arguments, Guarino-style
//! conceptualization structures, and a seeded annealing search over
//! candidate formalizations.

pub mod adequacy;
pub mod argnet;
pub mod concept;
pub mod correctness;
pub mod embed;
pub mod engine;
pub mod formula;
pub mod logic;
pub mod normalize;
pub mod parse;
pub mod print;
pub mod reasoner;
pub mod signature;
pub mod term;
pub mod ty;

pub use embed::{embed, embed_one, validize, EmbeddingResult, ModalFormula};
pub use formula::{NamedFormula, Role};
pub use logic::{DomainPolicy, FrameCondition, LogicSpec, ValidityMode};
pub use normalize::{abe_eq, normalize};
pub use parse::{parse, parse_ty, ParseError};
pub use reasoner::{Budget, Reasoner, SatVerdict, UnknownReason, Verdict};
pub use signature::Signature;
pub use term::Term;
pub use ty::Ty;
