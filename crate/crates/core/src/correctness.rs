//! Logical-correctness report for a single formalized argument: validity,
//! premise consistency, circularity (petitio principii) and idle premises,
//! bundled with an overall verdict.

use std::collections::BTreeSet;

use crate::formula::NamedFormula;
use crate::logic::LogicSpec;
use crate::normalize::abe_eq;
use crate::reasoner::{Budget, ReasonError, Reasoner, SatVerdict, Verdict};
use crate::signature::Signature;
use crate::term::Term;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArgumentError {
    #[error("duplicate premise label `{0}`")]
    DuplicatePremise(String),
    #[error("conclusion label `{0}` also appears among the premises")]
    ConclusionIsPremise(String),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}

/// A formalized argument: labeled premises, one conclusion, the logic it is
/// read in, and the meaning postulates attached from the shared theory.
#[derive(Debug, Clone)]
pub struct Argument {
    pub id: String,
    pub premises: Vec<NamedFormula>,
    pub conclusion: NamedFormula,
    pub spec: LogicSpec,
    pub theory_labels: Vec<String>,
}

impl Argument {
    pub fn validate(&self) -> Result<(), ArgumentError> {
        let mut seen = BTreeSet::new();
        for p in &self.premises {
            if !seen.insert(p.label.clone()) {
                return Err(ArgumentError::DuplicatePremise(p.label.clone()));
            }
        }
        if seen.contains(&self.conclusion.label) {
            return Err(ArgumentError::ConclusionIsPremise(
                self.conclusion.label.clone(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriBool {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for TriBool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TriBool::Yes => f.write_str("yes"),
            TriBool::No => f.write_str("no"),
            TriBool::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overall {
    Pass,
    Fail,
    Unknown,
}

impl std::fmt::Display for Overall {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Overall::Pass => f.write_str("pass"),
            Overall::Fail => f.write_str("fail"),
            Overall::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrectnessReport {
    pub argument_id: String,
    pub validity: Verdict,
    pub consistency: SatVerdict,
    /// Circularity, with the offending premise label when positive.
    pub circular: TriBool,
    pub circular_premise: Option<String>,
    pub idle_premises: BTreeSet<String>,
    /// Premises whose leave-one-out check came back Unknown.
    pub idle_unknowns: BTreeSet<String>,
    pub overall: Overall,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    /// The circularity test can be switched off per run.
    pub check_circularity: bool,
    /// Leave-one-out idle-premise test (O(n) prover calls).
    pub check_idle: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            check_circularity: true,
            check_idle: true,
        }
    }
}

/// Runs the full correctness battery. Meaning postulates count as theory:
/// they are exempt from both the idle test and the circularity scan.
pub fn check_correctness(
    arg: &Argument,
    theory: &[NamedFormula],
    opts: CheckOptions,
    reasoner: &mut Reasoner,
    sig: &Signature,
    budget: &Budget,
) -> Result<CorrectnessReport, ArgumentError> {
    arg.validate()?;
    let theory_terms: Vec<Term> = theory.iter().map(|f| f.term.clone()).collect();
    let premise_terms: Vec<Term> = arg.premises.iter().map(|f| f.term.clone()).collect();

    let mut all: Vec<Term> = premise_terms.clone();
    all.extend(theory_terms.iter().cloned());

    let validity = reasoner.entails(&all, &arg.conclusion.term, &arg.spec, sig, budget)?;
    let consistency = reasoner.consistent(&all, &arg.spec, sig, budget)?;

    let (circular, circular_premise) = if opts.check_circularity {
        circularity(arg, &theory_terms, reasoner, sig, budget)?
    } else {
        (TriBool::No, None)
    };

    let mut idle_premises = BTreeSet::new();
    let mut idle_unknowns = BTreeSet::new();
    if opts.check_idle && validity.is_valid() {
        for skip in 0..arg.premises.len() {
            let mut rest: Vec<Term> = Vec::new();
            for (i, p) in premise_terms.iter().enumerate() {
                if i != skip {
                    rest.push(p.clone());
                }
            }
            rest.extend(theory_terms.iter().cloned());
            let v = reasoner.entails(&rest, &arg.conclusion.term, &arg.spec, sig, budget)?;
            match v {
                Verdict::Valid(_) => {
                    idle_premises.insert(arg.premises[skip].label.clone());
                }
                Verdict::Invalid(_) => {}
                Verdict::Unknown(_) => {
                    idle_unknowns.insert(arg.premises[skip].label.clone());
                }
            }
        }
    }

    let overall = overall_of(
        &validity,
        &consistency,
        circular,
        &idle_premises,
        &idle_unknowns,
    );
    Ok(CorrectnessReport {
        argument_id: arg.id.clone(),
        validity,
        consistency,
        circular,
        circular_premise,
        idle_premises,
        idle_unknowns,
        overall,
    })
}

fn circularity(
    arg: &Argument,
    theory: &[Term],
    reasoner: &mut Reasoner,
    sig: &Signature,
    budget: &Budget,
) -> Result<(TriBool, Option<String>), ArgumentError> {
    // cheap syntactic test first: conclusion alpha-beta-eta-equal to a premise
    for p in &arg.premises {
        if abe_eq(&p.term, &arg.conclusion.term) {
            return Ok((TriBool::Yes, Some(p.label.clone())));
        }
    }
    // a single premise plus theory already forcing the conclusion
    let mut saw_unknown = false;
    for p in &arg.premises {
        let mut set = vec![p.term.clone()];
        set.extend(theory.iter().cloned());
        match reasoner.entails(&set, &arg.conclusion.term, &arg.spec, sig, budget)? {
            Verdict::Valid(_) => return Ok((TriBool::Yes, Some(p.label.clone()))),
            Verdict::Invalid(_) => {}
            Verdict::Unknown(_) => saw_unknown = true,
        }
    }
    Ok(if saw_unknown {
        (TriBool::Unknown, None)
    } else {
        (TriBool::No, None)
    })
}

fn overall_of(
    validity: &Verdict,
    consistency: &SatVerdict,
    circular: TriBool,
    idle: &BTreeSet<String>,
    idle_unknowns: &BTreeSet<String>,
) -> Overall {
    // definite failures dominate
    if validity.is_invalid()
        || consistency.is_unsat()
        || circular == TriBool::Yes
        || !idle.is_empty()
    {
        return Overall::Fail;
    }
    let all_definite = validity.is_valid()
        && consistency.is_sat()
        && circular == TriBool::No
        && idle_unknowns.is_empty();
    if all_definite {
        Overall::Pass
    } else {
        Overall::Unknown
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Role;
    use crate::parse::parse;
    use crate::ty::Ty;

    fn sig() -> Signature {
        let mut s = Signature::new();
        for n in ["p", "q", "r_atom", "s_atom"] {
            s.declare_const(n, Ty::wo()).unwrap();
        }
        s
    }

    fn arg(id: &str, premises: &[(&str, &str)], conclusion: &str, s: &Signature) -> Argument {
        Argument {
            id: id.into(),
            premises: premises
                .iter()
                .map(|(l, f)| NamedFormula::new(*l, Role::Premise, parse(f, s).unwrap()))
                .collect(),
            conclusion: NamedFormula::new("c", Role::Conclusion, parse(conclusion, s).unwrap()),
            spec: LogicSpec::k(),
            theory_labels: vec![],
        }
    }

    fn check(a: &Argument, s: &Signature) -> CorrectnessReport {
        check_correctness(
            a,
            &[],
            CheckOptions::default(),
            &mut Reasoner::new(),
            s,
            &Budget::default(),
        )
        .unwrap()
    }

    #[test]
    fn modus_ponens_passes() {
        let s = sig();
        let a = arg("a", &[("p1", "p"), ("p2", "p => q")], "q", &s);
        let r = check(&a, &s);
        assert!(r.validity.is_valid());
        assert!(r.consistency.is_sat());
        assert_eq!(r.circular, TriBool::No);
        assert!(r.idle_premises.is_empty());
        assert_eq!(r.overall, Overall::Pass);
    }

    #[test]
    fn explosion_fails_on_consistency() {
        let s = sig();
        let a = arg("a", &[("p1", "p"), ("p2", "~p")], "q", &s);
        let r = check(&a, &s);
        assert!(r.validity.is_valid());
        assert!(r.consistency.is_unsat());
        assert_eq!(r.overall, Overall::Fail);
    }

    #[test]
    fn petitio_and_idle_premise() {
        let s = sig();
        let a = arg("a", &[("p1", "q"), ("p2", "p")], "q", &s);
        let r = check(&a, &s);
        assert_eq!(r.circular, TriBool::Yes);
        assert_eq!(r.circular_premise.as_deref(), Some("p1"));
        assert!(r.idle_premises.contains("p2"));
        assert_eq!(r.overall, Overall::Fail);
    }

    #[test]
    fn conclusion_listed_as_premise_is_rejected() {
        let s = sig();
        let mut a = arg("a", &[("c", "p")], "q", &s);
        a.conclusion.label = "c".into();
        assert!(matches!(
            a.validate(),
            Err(ArgumentError::ConclusionIsPremise(_))
        ));
    }
}
