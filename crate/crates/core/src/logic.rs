//! Logic specifications: frame conditions on the accessibility relation,
//! quantifier domain policy, and the validity mode entailment is read under.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::formula::{NamedFormula, Role};
use crate::term::{ambient, Term};
use crate::ty::Ty;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrameCondition {
    Reflexive,
    Symmetric,
    Transitive,
    Euclidean,
}

impl FrameCondition {
    pub const ALL: [FrameCondition; 4] = [
        FrameCondition::Reflexive,
        FrameCondition::Symmetric,
        FrameCondition::Transitive,
        FrameCondition::Euclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrameCondition::Reflexive => "reflexive",
            FrameCondition::Symmetric => "symmetric",
            FrameCondition::Transitive => "transitive",
            FrameCondition::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for FrameCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum DomainPolicy {
    #[default]
    Constant,
    Actualist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum ValidityMode {
    /// Truth at all worlds (the default reading).
    #[default]
    Global,
    /// Truth at the designated world `w0`.
    Local,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicSpecError {
    #[error("unknown logic `{0}` (expected K, T, KB, S4, S5 or frames(...))")]
    UnknownName(String),
    #[error("unknown frame condition `{0}` (expected refl, sym, trans, eucl)")]
    UnknownFrameCondition(String),
    #[error("unknown logic modifier `{0}` (expected actualist or local)")]
    UnknownModifier(String),
}

/// A named modal logic. The presets fix the frame theory exactly:
/// K has none, T is reflexive, KB symmetric, S4 reflexive+transitive,
/// S5 reflexive+symmetric+transitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogicSpec {
    pub name: String,
    pub frame: BTreeSet<FrameCondition>,
    pub domain: DomainPolicy,
    pub mode: ValidityMode,
}

impl LogicSpec {
    fn preset(name: &str, conds: &[FrameCondition]) -> LogicSpec {
        LogicSpec {
            name: name.to_string(),
            frame: conds.iter().copied().collect(),
            domain: DomainPolicy::Constant,
            mode: ValidityMode::Global,
        }
    }

    pub fn k() -> LogicSpec {
        LogicSpec::preset("K", &[])
    }

    pub fn t() -> LogicSpec {
        LogicSpec::preset("T", &[FrameCondition::Reflexive])
    }

    pub fn kb() -> LogicSpec {
        LogicSpec::preset("KB", &[FrameCondition::Symmetric])
    }

    pub fn s4() -> LogicSpec {
        LogicSpec::preset(
            "S4",
            &[FrameCondition::Reflexive, FrameCondition::Transitive],
        )
    }

    pub fn s5() -> LogicSpec {
        LogicSpec::preset(
            "S5",
            &[
                FrameCondition::Reflexive,
                FrameCondition::Symmetric,
                FrameCondition::Transitive,
            ],
        )
    }

    pub fn presets() -> [LogicSpec; 5] {
        [
            LogicSpec::k(),
            LogicSpec::t(),
            LogicSpec::kb(),
            LogicSpec::s4(),
            LogicSpec::s5(),
        ]
    }

    pub fn with_domain(mut self, domain: DomainPolicy) -> LogicSpec {
        self.domain = domain;
        self.rename();
        self
    }

    pub fn with_mode(mut self, mode: ValidityMode) -> LogicSpec {
        self.mode = mode;
        self.rename();
        self
    }

    /// Flips one frame condition, renaming the spec to match the resulting
    /// axiom set (back to a preset name when it coincides with one).
    pub fn toggle_frame(&self, cond: FrameCondition) -> LogicSpec {
        let mut frame = self.frame.clone();
        if !frame.remove(&cond) {
            frame.insert(cond);
        }
        let mut spec = LogicSpec {
            name: String::new(),
            frame,
            domain: self.domain,
            mode: self.mode,
        };
        spec.rename();
        spec
    }

    pub fn toggle_domain(&self) -> LogicSpec {
        let domain = match self.domain {
            DomainPolicy::Constant => DomainPolicy::Actualist,
            DomainPolicy::Actualist => DomainPolicy::Constant,
        };
        let mut spec = self.clone();
        spec.domain = domain;
        spec.rename();
        spec
    }

    fn base_name(frame: &BTreeSet<FrameCondition>) -> String {
        for preset in LogicSpec::presets() {
            if preset.frame == *frame {
                return preset.name;
            }
        }
        let parts: Vec<&str> = frame
            .iter()
            .map(|c| match c {
                FrameCondition::Reflexive => "refl",
                FrameCondition::Symmetric => "sym",
                FrameCondition::Transitive => "trans",
                FrameCondition::Euclidean => "eucl",
            })
            .collect();
        format!("frames({})", parts.join(","))
    }

    fn rename(&mut self) {
        let mut name = LogicSpec::base_name(&self.frame);
        if self.domain == DomainPolicy::Actualist {
            name.push_str(":actualist");
        }
        if self.mode == ValidityMode::Local {
            name.push_str(":local");
        }
        self.name = name;
    }

    /// Stable identity of the spec, independent of the display name.
    pub fn fingerprint(&self) -> String {
        format!(
            "{}|{:?}|{:?}",
            LogicSpec::base_name(&self.frame),
            self.domain,
            self.mode
        )
    }

    /// The frame theory as HOL formulas over the accessibility relation,
    /// tagged `frame-axiom`. K yields the empty list.
    pub fn frame_axioms(&self) -> Vec<NamedFormula> {
        self.frame
            .iter()
            .map(|c| {
                NamedFormula::new(
                    format!("frame_{}", c.name()),
                    Role::FrameAxiom,
                    frame_axiom_term(*c),
                )
            })
            .collect()
    }
}

impl fmt::Display for LogicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for LogicSpec {
    type Err = LogicSpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or("").trim();
        let mut spec = if let Some(rest) = head
            .strip_prefix("frames(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let mut frame = BTreeSet::new();
            for item in rest.split(',').map(|x| x.trim()).filter(|x| !x.is_empty()) {
                let cond = match item {
                    "refl" | "reflexive" => FrameCondition::Reflexive,
                    "sym" | "symmetric" => FrameCondition::Symmetric,
                    "trans" | "transitive" => FrameCondition::Transitive,
                    "eucl" | "euclidean" => FrameCondition::Euclidean,
                    other => return Err(LogicSpecError::UnknownFrameCondition(other.to_string())),
                };
                frame.insert(cond);
            }
            let mut spec = LogicSpec {
                name: String::new(),
                frame,
                domain: DomainPolicy::Constant,
                mode: ValidityMode::Global,
            };
            spec.rename();
            spec
        } else {
            match head {
                "K" => LogicSpec::k(),
                "T" => LogicSpec::t(),
                "KB" => LogicSpec::kb(),
                "S4" => LogicSpec::s4(),
                "S5" => LogicSpec::s5(),
                other => return Err(LogicSpecError::UnknownName(other.to_string())),
            }
        };
        for modifier in parts {
            match modifier.trim() {
                "actualist" => spec.domain = DomainPolicy::Actualist,
                "local" => spec.mode = ValidityMode::Local,
                other => return Err(LogicSpecError::UnknownModifier(other.to_string())),
            }
        }
        spec.rename();
        // presets keep their bare names
        if spec.domain == DomainPolicy::Constant && spec.mode == ValidityMode::Global {
            spec.name = LogicSpec::base_name(&spec.frame);
        }
        Ok(spec)
    }
}

fn rel() -> Term {
    Term::cnst(ambient::ACCESS, Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())))
}

fn frame_axiom_term(cond: FrameCondition) -> Term {
    let r = |a: usize, b: usize| Term::app2(rel(), Term::bvar(a), Term::bvar(b));
    match cond {
        // ! [U:w]: rel U U
        FrameCondition::Reflexive => Term::forall("u", Ty::w(), r(0, 0)),
        // ! [U:w, V:w]: rel U V => rel V U
        FrameCondition::Symmetric => Term::forall(
            "u",
            Ty::w(),
            Term::forall("v", Ty::w(), Term::imp(r(1, 0), r(0, 1))),
        ),
        // ! [U:w, V:w, X:w]: rel U V & rel V X => rel U X
        FrameCondition::Transitive => Term::forall(
            "u",
            Ty::w(),
            Term::forall(
                "v",
                Ty::w(),
                Term::forall(
                    "x",
                    Ty::w(),
                    Term::imp(Term::conj(r(2, 1), r(1, 0)), r(2, 0)),
                ),
            ),
        ),
        // ! [U:w, V:w, X:w]: rel U V & rel U X => rel V X
        FrameCondition::Euclidean => Term::forall(
            "u",
            Ty::w(),
            Term::forall(
                "v",
                Ty::w(),
                Term::forall(
                    "x",
                    Ty::w(),
                    Term::imp(Term::conj(r(2, 1), r(2, 0)), r(1, 0)),
                ),
            ),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_frames() {
        assert!(LogicSpec::k().frame.is_empty());
        assert_eq!(LogicSpec::t().frame.len(), 1);
        assert_eq!(LogicSpec::kb().frame.len(), 1);
        assert_eq!(LogicSpec::s4().frame.len(), 2);
        assert_eq!(LogicSpec::s5().frame.len(), 3);
    }

    #[test]
    fn parse_spec_strings() {
        let s: LogicSpec = "S4:actualist:local".parse().unwrap();
        assert_eq!(s.domain, DomainPolicy::Actualist);
        assert_eq!(s.mode, ValidityMode::Local);
        assert_eq!(s.frame, LogicSpec::s4().frame);

        let c: LogicSpec = "frames(refl,eucl)".parse().unwrap();
        assert_eq!(c.frame.len(), 2);

        assert!("KX".parse::<LogicSpec>().is_err());
        assert!("frames(weird)".parse::<LogicSpec>().is_err());
    }

    #[test]
    fn toggle_round_trips_to_preset_names() {
        let s = LogicSpec::k().toggle_frame(FrameCondition::Reflexive);
        assert_eq!(s.name, "T");
        let back = s.toggle_frame(FrameCondition::Reflexive);
        assert_eq!(back.name, "K");
    }

    #[test]
    fn kb_frame_axiom_prints() {
        let axs = LogicSpec::kb().frame_axioms();
        assert_eq!(axs.len(), 1);
        assert_eq!(
            crate::print::to_string(&axs[0].term),
            "! [U:w]: ! [V:w]: rel @ U @ V => rel @ V @ U"
        );
    }
}
