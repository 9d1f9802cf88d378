//! Paired refuter/verifier. `entails` answers Valid with a closed tableau,
//! Invalid with a re-checkable countermodel from the finite model finder, or
//! Unknown — never both. Verdicts are memoized by canonical formula set,
//! spec and budget, and the cache is transparent: on or off, identical
//! inputs yield identical verdicts.

pub mod enumerate;
pub mod eval;
pub mod model;
pub mod tableau;
pub mod value;

use std::collections::HashMap;
use std::rc::Rc;

use crate::embed::{embed_one, EmbedError};
use crate::logic::{LogicSpec, ValidityMode};
use crate::print;
use crate::signature::Signature;
use crate::term::{logical, Term};
use crate::ty::Ty;
use thiserror::Error;

pub use enumerate::{find_model, SearchOutcome};
pub use model::FiniteModel;
pub use tableau::{replay, TableauProof};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReasonError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("budget fields must all be positive")]
    BadBudget,
}

/// Hard resource caps for a single query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    pub max_worlds: usize,
    pub max_individuals: usize,
    pub max_depth: usize,
    pub timeout_ms: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_worlds: 3,
            max_individuals: 2,
            max_depth: 12,
            timeout_ms: 10_000,
        }
    }
}

impl Budget {
    pub fn validate(&self) -> Result<(), ReasonError> {
        if self.max_worlds == 0
            || self.max_individuals == 0
            || self.max_depth == 0
            || self.timeout_ms == 0
        {
            return Err(ReasonError::BadBudget);
        }
        Ok(())
    }

    fn fingerprint(&self) -> String {
        format!(
            "{}/{}/{}/{}",
            self.max_worlds, self.max_individuals, self.max_depth, self.timeout_ms
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    BudgetExhausted,
    OutsideDecidableFragment,
}

impl std::fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnknownReason::BudgetExhausted => f.write_str("budget-exhausted"),
            UnknownReason::OutsideDecidableFragment => f.write_str("outside-decidable-fragment"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Valid(Rc<TableauProof>),
    Invalid(Rc<FiniteModel>),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid(_))
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, Verdict::Invalid(_))
    }

    pub fn short(&self) -> &'static str {
        match self {
            Verdict::Valid(_) => "valid",
            Verdict::Invalid(_) => "invalid",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub enum SatVerdict {
    Sat(Rc<FiniteModel>),
    Unsat(Rc<TableauProof>),
    Unknown(UnknownReason),
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatVerdict::Unsat(_))
    }

    pub fn short(&self) -> &'static str {
        match self {
            SatVerdict::Sat(_) => "sat",
            SatVerdict::Unsat(_) => "unsat",
            SatVerdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReasonerStats {
    pub queries: u64,
    pub cache_hits: u64,
    pub unknown: u64,
}

#[derive(Clone)]
enum CacheEntry {
    Entail(Verdict),
    Sat(SatVerdict),
}

/// Stateless apart from the verdict cache; one instance per worker.
pub struct Reasoner {
    cache_enabled: bool,
    cache: HashMap<String, CacheEntry>,
    pub stats: ReasonerStats,
}

impl Default for Reasoner {
    fn default() -> Self {
        Reasoner::new()
    }
}

impl Reasoner {
    pub fn new() -> Reasoner {
        Reasoner::with_cache(true)
    }

    pub fn with_cache(enabled: bool) -> Reasoner {
        Reasoner {
            cache_enabled: enabled,
            cache: HashMap::new(),
            stats: ReasonerStats::default(),
        }
    }

    /// Does the premise set (with the spec's frame theory) entail the
    /// conclusion?
    pub fn entails(
        &mut self,
        premises: &[Term],
        conclusion: &Term,
        spec: &LogicSpec,
        sig: &Signature,
        budget: &Budget,
    ) -> Result<Verdict, ReasonError> {
        budget.validate()?;
        self.stats.queries += 1;
        let key = cache_key("E", premises, Some(conclusion), spec, budget);
        if self.cache_enabled {
            if let Some(CacheEntry::Entail(v)) = self.cache.get(&key) {
                self.stats.cache_hits += 1;
                return Ok(v.clone());
            }
        }
        let verdict = self.entails_uncached(premises, conclusion, spec, sig, budget)?;
        if matches!(verdict, Verdict::Unknown(_)) {
            self.stats.unknown += 1;
        }
        if self.cache_enabled {
            self.cache.insert(key, CacheEntry::Entail(verdict.clone()));
        }
        Ok(verdict)
    }

    fn entails_uncached(
        &mut self,
        premises: &[Term],
        conclusion: &Term,
        spec: &LogicSpec,
        sig: &Signature,
        budget: &Budget,
    ) -> Result<Verdict, ReasonError> {
        // verifier: labeled tableau on {premises, ~conclusion}
        let mut fragment = None;
        let tableau_outcome = match build_tableau_input(premises, Some(conclusion), spec, budget) {
            Ok(input) => Some(tableau::prove(&input)),
            Err(e) => {
                fragment = Some(e);
                None
            }
        };
        if let Some(tableau::TableauOutcome::Closed(proof)) = tableau_outcome {
            return Ok(Verdict::Valid(Rc::new(proof)));
        }

        // refuter: countermodel for premises + frame + ~conclusion
        let mut hol = crate::embed::embed_set(premises, spec, sig)?;
        let c = embed_one(conclusion, spec, sig)?;
        hol.push(Term::neg(c));
        match find_model(&hol, budget, spec.mode == ValidityMode::Local) {
            SearchOutcome::Found(m) => Ok(Verdict::Invalid(Rc::new(m))),
            SearchOutcome::NoneWithinBudget { .. } => Ok(Verdict::Unknown(match fragment {
                Some(_) => UnknownReason::OutsideDecidableFragment,
                None => UnknownReason::BudgetExhausted,
            })),
        }
    }

    /// Is the formula set (with the spec's frame theory) satisfiable?
    pub fn consistent(
        &mut self,
        formulas: &[Term],
        spec: &LogicSpec,
        sig: &Signature,
        budget: &Budget,
    ) -> Result<SatVerdict, ReasonError> {
        budget.validate()?;
        self.stats.queries += 1;
        let key = cache_key("C", formulas, None, spec, budget);
        if self.cache_enabled {
            if let Some(CacheEntry::Sat(v)) = self.cache.get(&key) {
                self.stats.cache_hits += 1;
                return Ok(v.clone());
            }
        }
        let verdict = self.consistent_uncached(formulas, spec, sig, budget)?;
        if matches!(verdict, SatVerdict::Unknown(_)) {
            self.stats.unknown += 1;
        }
        if self.cache_enabled {
            self.cache.insert(key, CacheEntry::Sat(verdict.clone()));
        }
        Ok(verdict)
    }

    fn consistent_uncached(
        &mut self,
        formulas: &[Term],
        spec: &LogicSpec,
        sig: &Signature,
        budget: &Budget,
    ) -> Result<SatVerdict, ReasonError> {
        let mut fragment = None;
        let tableau_outcome = match build_tableau_input(formulas, None, spec, budget) {
            Ok(input) => Some(tableau::prove(&input)),
            Err(e) => {
                fragment = Some(e);
                None
            }
        };
        if let Some(tableau::TableauOutcome::Closed(proof)) = tableau_outcome {
            return Ok(SatVerdict::Unsat(Rc::new(proof)));
        }
        let hol = crate::embed::embed_set(formulas, spec, sig)?;
        match find_model(&hol, budget, spec.mode == ValidityMode::Local) {
            SearchOutcome::Found(m) => Ok(SatVerdict::Sat(Rc::new(m))),
            SearchOutcome::NoneWithinBudget { .. } => Ok(SatVerdict::Unknown(match fragment {
                Some(_) => UnknownReason::OutsideDecidableFragment,
                None => UnknownReason::BudgetExhausted,
            })),
        }
    }
}

fn cache_key(
    tag: &str,
    formulas: &[Term],
    conclusion: Option<&Term>,
    spec: &LogicSpec,
    budget: &Budget,
) -> String {
    let mut keys: Vec<String> = formulas.iter().map(print::canonical).collect();
    keys.sort();
    format!(
        "{tag}|{}|{}|{}|{}",
        spec.fingerprint(),
        budget.fingerprint(),
        keys.join(";"),
        conclusion.map(print::canonical).unwrap_or_default()
    )
}

/// Converts a query to NNF tableau inputs under the spec's validity mode and
/// frame conditions; errors when anything falls outside the fragment.
fn build_tableau_input(
    premises: &[Term],
    conclusion: Option<&Term>,
    spec: &LogicSpec,
    budget: &Budget,
) -> Result<tableau::TableauInput, tableau::FragmentError> {
    // actualist quantifiers only make sense under the actualist policy; the
    // embedding rejects them first, mirror that here
    if spec.domain == crate::logic::DomainPolicy::Constant {
        for t in premises.iter().chain(conclusion) {
            if t.mentions(logical::MFORALL_A) || t.mentions(logical::MEXISTS_A) {
                return Err(tableau::FragmentError::Shape(
                    "actualist quantifier under constant domains".into(),
                ));
            }
        }
    }
    let mut prem_nnf = Vec::new();
    for t in premises {
        prem_nnf.push(tableau::to_nnf(t, true)?);
    }
    let concl_nnf = conclusion.map(|c| tableau::to_nnf(c, false)).transpose()?;

    let (globals, mut locals) = match spec.mode {
        ValidityMode::Global => (prem_nnf, Vec::new()),
        ValidityMode::Local => (Vec::new(), prem_nnf),
    };
    if let Some(c) = concl_nnf {
        locals.push(c);
    }

    let mut pool: Vec<Term> = Vec::new();
    for t in premises.iter().chain(conclusion) {
        collect_e_constants(t, &mut pool);
    }
    pool.sort_by_key(print::canonical);
    pool.dedup();

    Ok(tableau::TableauInput {
        globals,
        locals,
        frame: spec.frame.clone(),
        pool,
        caps: tableau::TableauCaps {
            max_world_depth: budget.max_depth,
            ..Default::default()
        },
    })
}

fn collect_e_constants(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::BVar(_) => {}
        Term::Const(n, ty) => {
            if !logical::is_logical(n) && *ty == Ty::e() {
                let c = Term::cnst(n.clone(), ty.clone());
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        Term::Lam { body, .. } => collect_e_constants(body, out),
        Term::App(f, a) => {
            collect_e_constants(f, out);
            collect_e_constants(a, out);
        }
    }
}
