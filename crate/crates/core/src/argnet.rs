//! Logic-parameterized attack/support between formalized arguments, scored
//! against the intended edges of an abstract argument network. Relations are
//! always evaluated in the target argument's logic.

use std::collections::{BTreeMap, BTreeSet};

use crate::correctness::Argument;
use crate::reasoner::{Budget, ReasonError, Reasoner, SatVerdict, Verdict};
use crate::signature::Signature;
use crate::term::Term;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("edge endpoint `{0}` is not a node")]
    DanglingEndpoint(String),
    #[error("self-edge on `{0}`")]
    SelfEdge(String),
    #[error("duplicate {1:?} edge {0} -> {2}")]
    DuplicateEdge(String, Polarity, String),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Attack,
    Support,
}

impl std::fmt::Display for Polarity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarity::Attack => f.write_str("attack"),
            Polarity::Support => f.write_str("support"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mechanism {
    /// Conclusion entails the negation of a premise.
    Rebut,
    /// Conclusion jointly inconsistent with the premise set.
    Undermine,
    /// Conclusion entails a premise.
    Endorse,
}

impl Mechanism {
    pub fn polarity(self) -> Polarity {
        match self {
            Mechanism::Rebut | Mechanism::Undermine => Polarity::Attack,
            Mechanism::Endorse => Polarity::Support,
        }
    }
}

impl std::fmt::Display for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mechanism::Rebut => f.write_str("rebut"),
            Mechanism::Undermine => f.write_str("undermine"),
            Mechanism::Endorse => f.write_str("endorse"),
        }
    }
}

/// Certificate attached to a realized relation.
#[derive(Debug, Clone)]
pub enum RelationCert {
    Entailment(Verdict),
    Inconsistency(SatVerdict),
}

#[derive(Debug, Clone)]
pub struct RealizedRelation {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
    pub mechanism: Mechanism,
    /// Targeted premise label for rebut/endorse.
    pub target: Option<String>,
    pub cert: RelationCert,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentNetwork {
    pub nodes: Vec<String>,
    pub intended: Vec<(String, String, Polarity)>,
}

impl ArgumentNetwork {
    pub fn validate(&self) -> Result<(), NetworkError> {
        let nodes: BTreeSet<&String> = self.nodes.iter().collect();
        let mut seen = BTreeSet::new();
        for (from, to, pol) in &self.intended {
            if !nodes.contains(from) {
                return Err(NetworkError::DanglingEndpoint(from.clone()));
            }
            if !nodes.contains(to) {
                return Err(NetworkError::DanglingEndpoint(to.clone()));
            }
            if from == to {
                return Err(NetworkError::SelfEdge(from.clone()));
            }
            if !seen.insert((from.clone(), to.clone(), *pol)) {
                return Err(NetworkError::DuplicateEdge(from.clone(), *pol, to.clone()));
            }
        }
        Ok(())
    }
}

fn surface_negation(t: &Term) -> Term {
    match t.ty() {
        Ok(ty) if ty.is_o() => Term::neg(t.clone()),
        _ => Term::m_neg(t.clone()),
    }
}

/// Computes every realized relation from `a` to `b`, in `b`'s logic.
pub fn realized_relations(
    a: &Argument,
    b: &Argument,
    theory: &[Term],
    reasoner: &mut Reasoner,
    sig: &Signature,
    budget: &Budget,
) -> Result<Vec<RealizedRelation>, NetworkError> {
    let mut out = Vec::new();
    let spec = &b.spec;
    let concl = &a.conclusion.term;
    let mut base = vec![concl.clone()];
    base.extend(theory.iter().cloned());

    for premise in &b.premises {
        let neg = surface_negation(&premise.term);
        let v = reasoner.entails(&base, &neg, spec, sig, budget)?;
        if v.is_valid() {
            out.push(RealizedRelation {
                from: a.id.clone(),
                to: b.id.clone(),
                polarity: Polarity::Attack,
                mechanism: Mechanism::Rebut,
                target: Some(premise.label.clone()),
                cert: RelationCert::Entailment(v),
            });
        }
        let v = reasoner.entails(&base, &premise.term, spec, sig, budget)?;
        if v.is_valid() {
            out.push(RealizedRelation {
                from: a.id.clone(),
                to: b.id.clone(),
                polarity: Polarity::Support,
                mechanism: Mechanism::Endorse,
                target: Some(premise.label.clone()),
                cert: RelationCert::Entailment(v),
            });
        }
    }

    let mut joint: Vec<Term> = b.premises.iter().map(|p| p.term.clone()).collect();
    joint.push(concl.clone());
    joint.extend(theory.iter().cloned());
    let sat = reasoner.consistent(&joint, spec, sig, budget)?;
    if sat.is_unsat() {
        out.push(RealizedRelation {
            from: a.id.clone(),
            to: b.id.clone(),
            polarity: Polarity::Attack,
            mechanism: Mechanism::Undermine,
            target: None,
            cert: RelationCert::Inconsistency(sat),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EdgeStatus {
    pub from: String,
    pub to: String,
    pub polarity: Polarity,
    pub realized: bool,
    pub mechanisms: Vec<Mechanism>,
}

#[derive(Debug, Clone)]
pub struct NetworkReport {
    pub score: f64,
    pub intended: Vec<EdgeStatus>,
    pub spurious: Vec<RealizedRelation>,
    /// Diagnostic only: Dung-style extensions over the realized attacks.
    pub grounded_extension: Vec<String>,
    pub preferred_extensions: Vec<Vec<String>>,
    /// Set when the network has no intended edges (score 1.0 by convention).
    pub vacuous: bool,
}

/// Scores fulfillment of the intended dialectic roles:
/// `(realized - lambda * spurious, floored at 0) / |intended|`.
pub fn role_fulfillment(
    net: &ArgumentNetwork,
    args: &BTreeMap<String, Argument>,
    theory: &[Term],
    lambda: f64,
    reasoner: &mut Reasoner,
    sig: &Signature,
    budget: &Budget,
) -> Result<NetworkReport, NetworkError> {
    net.validate()?;
    for n in &net.nodes {
        if !args.contains_key(n) {
            return Err(NetworkError::DanglingEndpoint(n.clone()));
        }
    }

    // all realized relations over ordered pairs, grouped by (from, to, pol)
    let mut realized: BTreeMap<(String, String, Polarity), Vec<Mechanism>> = BTreeMap::new();
    let mut all_relations: Vec<RealizedRelation> = Vec::new();
    for from in &net.nodes {
        for to in &net.nodes {
            if from == to {
                continue;
            }
            let rels = realized_relations(&args[from], &args[to], theory, reasoner, sig, budget)?;
            for r in rels {
                realized
                    .entry((r.from.clone(), r.to.clone(), r.polarity))
                    .or_default()
                    .push(r.mechanism);
                all_relations.push(r);
            }
        }
    }

    let intended_keys: BTreeSet<(String, String, Polarity)> = net
        .intended
        .iter()
        .map(|(f, t, p)| (f.clone(), t.clone(), *p))
        .collect();

    let mut statuses = Vec::new();
    let mut hit = 0usize;
    for (from, to, pol) in &net.intended {
        let key = (from.clone(), to.clone(), *pol);
        let mechanisms = realized.get(&key).cloned().unwrap_or_default();
        let is_realized = !mechanisms.is_empty();
        if is_realized {
            hit += 1;
        }
        statuses.push(EdgeStatus {
            from: from.clone(),
            to: to.clone(),
            polarity: *pol,
            realized: is_realized,
            mechanisms,
        });
    }

    let spurious: Vec<RealizedRelation> = all_relations
        .iter()
        .filter(|r| !intended_keys.contains(&(r.from.clone(), r.to.clone(), r.polarity)))
        .cloned()
        .collect();
    let spurious_edges: BTreeSet<(String, String, Polarity)> = spurious
        .iter()
        .map(|r| (r.from.clone(), r.to.clone(), r.polarity))
        .collect();

    let (score, vacuous) = if net.intended.is_empty() {
        (1.0, true)
    } else {
        let raw = hit as f64 - lambda * spurious_edges.len() as f64;
        (raw.max(0.0) / net.intended.len() as f64, false)
    };

    // attack graph for the Dung diagnostics
    let attacks: BTreeSet<(String, String)> = realized
        .keys()
        .filter(|(_, _, p)| *p == Polarity::Attack)
        .map(|(f, t, _)| (f.clone(), t.clone()))
        .collect();
    let grounded_extension = grounded(&net.nodes, &attacks);
    let preferred_extensions = preferred(&net.nodes, &attacks);

    Ok(NetworkReport {
        score,
        intended: statuses,
        spurious,
        grounded_extension,
        preferred_extensions,
        vacuous,
    })
}

fn defends(
    s: &BTreeSet<String>,
    arg: &str,
    nodes: &[String],
    attacks: &BTreeSet<(String, String)>,
) -> bool {
    nodes.iter().all(|b| {
        if !attacks.contains(&(b.clone(), arg.to_string())) {
            return true;
        }
        s.iter().any(|c| attacks.contains(&(c.clone(), b.clone())))
    })
}

/// Least fixpoint of the characteristic function.
fn grounded(nodes: &[String], attacks: &BTreeSet<(String, String)>) -> Vec<String> {
    let mut s: BTreeSet<String> = BTreeSet::new();
    loop {
        let next: BTreeSet<String> = nodes
            .iter()
            .filter(|a| defends(&s, a, nodes, attacks))
            .cloned()
            .collect();
        if next == s {
            return s.into_iter().collect();
        }
        s = next;
    }
}

fn conflict_free(set: &BTreeSet<String>, attacks: &BTreeSet<(String, String)>) -> bool {
    for a in set {
        for b in set {
            if attacks.contains(&(a.clone(), b.clone())) {
                return false;
            }
        }
    }
    true
}

/// Maximal admissible sets by brute force; networks here are small.
fn preferred(nodes: &[String], attacks: &BTreeSet<(String, String)>) -> Vec<Vec<String>> {
    let n = nodes.len().min(16);
    let mut admissible: Vec<BTreeSet<String>> = Vec::new();
    for mask in 0u32..(1 << n) {
        let set: BTreeSet<String> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| nodes[i].clone())
            .collect();
        if conflict_free(&set, attacks) && set.iter().all(|a| defends(&set, a, nodes, attacks)) {
            admissible.push(set);
        }
    }
    let mut maximal: Vec<BTreeSet<String>> = Vec::new();
    for s in &admissible {
        if !admissible.iter().any(|t| t != s && s.is_subset(t)) {
            maximal.push(s.clone());
        }
    }
    maximal.dedup();
    maximal
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect()
}
