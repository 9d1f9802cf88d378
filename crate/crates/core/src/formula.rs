//! Labeled formulas and the roles the checkers consume them under.

use std::fmt;

use crate::term::Term;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Premise,
    Conclusion,
    MeaningPostulate,
    FrameAxiom,
    Candidate,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::Premise => "premise",
            Role::Conclusion => "conclusion",
            Role::MeaningPostulate => "meaning-postulate",
            Role::FrameAxiom => "frame-axiom",
            Role::Candidate => "candidate",
        };
        f.write_str(s)
    }
}

/// A formula of type `w > o` (lifted) or `o` (world-independent), carrying a
/// document-unique label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedFormula {
    pub label: String,
    pub role: Role,
    pub term: Term,
}

impl NamedFormula {
    pub fn new(label: impl Into<String>, role: Role, term: Term) -> NamedFormula {
        NamedFormula {
            label: label.into(),
            role,
            term,
        }
    }
}
