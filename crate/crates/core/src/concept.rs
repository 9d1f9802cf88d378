//! Finite intensional relational structures, ontological commitments,
//! intended models and ontology-fit metrics. Everything here is enumerated
//! outright, with hard size guards; the module is diagnostic, not a prover.

use std::collections::{BTreeMap, BTreeSet};

use crate::reasoner::eval::eval_closed;
use crate::reasoner::model::FiniteModel;
use crate::reasoner::value::{Sizes, Value};
use crate::term::Term;
use crate::ty::Ty;
use thiserror::Error;

/// Cells per relation (|D|^arity * |W|) beyond which structures are refused.
pub const MAX_RELATION_CELLS: usize = 64;
/// All-model enumerations beyond this size are refused.
pub const MAX_MODEL_SPACE: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConceptError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("relation `{rel}` missing an extension for world `{world}`")]
    PartialRelation { rel: String, world: String },
    #[error("tuple arity mismatch in relation `{0}`")]
    ArityMismatch(String),
    #[error("tuple member out of domain in relation `{0}`")]
    OutOfDomain(String),
    #[error("vocabulary symbol `{0}` is not interpreted")]
    UncommittedSymbol(String),
    #[error("commitment maps `{0}` to unknown relation `{1}`")]
    UnknownRelation(String, String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("axiom `{0}` is not evaluable over finite first-order structures")]
    Unevaluable(String),
}

pub type Tuple = Vec<usize>;

/// Guarino's intensional relational structure over named finite carriers:
/// a domain, a world set, and per-world extensions for each relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntensionalStructure {
    pub domain: Vec<String>,
    pub worlds: Vec<String>,
    pub relations: BTreeMap<String, IntensionalRelation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntensionalRelation {
    pub arity: usize,
    /// World index -> extension.
    pub extensions: Vec<BTreeSet<Tuple>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionalStructure {
    pub domain: Vec<String>,
    pub relations: BTreeMap<String, BTreeSet<Tuple>>,
}

/// The ontological commitment: who the constants and predicate symbols of
/// the vocabulary are intended to pick out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commitment {
    pub structure: IntensionalStructure,
    /// Constant symbol -> domain element index.
    pub constants: BTreeMap<String, usize>,
    /// Predicate symbol -> intensional relation name.
    pub predicates: BTreeMap<String, String>,
}

/// An extensional first-order model over the same vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FoModel {
    pub constants: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, BTreeSet<Tuple>>,
}

impl IntensionalStructure {
    pub fn validate(&self) -> Result<(), ConceptError> {
        for (name, rel) in &self.relations {
            if rel.extensions.len() != self.worlds.len() {
                return Err(ConceptError::PartialRelation {
                    rel: name.clone(),
                    world: format!("#{}", rel.extensions.len()),
                });
            }
            let cells = self
                .domain
                .len()
                .pow(rel.arity as u32)
                .saturating_mul(self.worlds.len());
            if cells > MAX_RELATION_CELLS {
                return Err(ConceptError::SizeGuard(format!(
                    "relation `{name}` has {cells} cells"
                )));
            }
            for ext in &rel.extensions {
                for tuple in ext {
                    if tuple.len() != rel.arity {
                        return Err(ConceptError::ArityMismatch(name.clone()));
                    }
                    if tuple.iter().any(|i| *i >= self.domain.len()) {
                        return Err(ConceptError::OutOfDomain(name.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn world_index(&self, world: &str) -> Result<usize, ConceptError> {
        self.worlds
            .iter()
            .position(|w| w == world)
            .ok_or_else(|| ConceptError::UnknownWorld(world.to_string()))
    }
}

/// Definition-level snapshot: the extensional structure a world induces.
pub fn world_extension(
    c: &IntensionalStructure,
    world: &str,
) -> Result<ExtensionalStructure, ConceptError> {
    let w = c.world_index(world)?;
    Ok(ExtensionalStructure {
        domain: c.domain.clone(),
        relations: c
            .relations
            .iter()
            .map(|(name, rel)| (name.clone(), rel.extensions[w].clone()))
            .collect(),
    })
}

impl Commitment {
    pub fn validate(&self) -> Result<(), ConceptError> {
        self.structure.validate()?;
        for (sym, elem) in &self.constants {
            if *elem >= self.structure.domain.len() {
                return Err(ConceptError::OutOfDomain(sym.clone()));
            }
        }
        for (sym, rel) in &self.predicates {
            if !self.structure.relations.contains_key(rel) {
                return Err(ConceptError::UnknownRelation(sym.clone(), rel.clone()));
            }
        }
        Ok(())
    }
}

/// Definition-level test: constants match the commitment, and one world
/// simultaneously witnesses every predicate's extension.
pub fn is_intended_model(m: &FoModel, k: &Commitment) -> Result<bool, ConceptError> {
    k.validate()?;
    for (sym, elem) in &k.constants {
        match m.constants.get(sym) {
            Some(e) if e == elem => {}
            Some(_) => return Ok(false),
            None => return Err(ConceptError::UncommittedSymbol(sym.clone())),
        }
    }
    // one shared witness world for all predicate symbols
    'worlds: for w in 0..k.structure.worlds.len() {
        for (sym, rel_name) in &k.predicates {
            let rel = &k.structure.relations[rel_name];
            let Some(ext) = m.predicates.get(sym) else {
                return Err(ConceptError::UncommittedSymbol(sym.clone()));
            };
            if *ext != rel.extensions[w] {
                continue 'worlds;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

/// The set of intended models, constructed directly from the world
/// snapshots (constants are pinned by the commitment). Duplicate snapshots
/// collapse under set semantics.
pub fn intended_models(k: &Commitment) -> Result<BTreeSet<FoModel>, ConceptError> {
    k.validate()?;
    let mut out = BTreeSet::new();
    for w in 0..k.structure.worlds.len() {
        let mut predicates = BTreeMap::new();
        for (sym, rel_name) in &k.predicates {
            predicates.insert(
                sym.clone(),
                k.structure.relations[rel_name].extensions[w].clone(),
            );
        }
        out.insert(FoModel {
            constants: k.constants.clone(),
            predicates,
        });
    }
    Ok(out)
}

/// Enumerates every model over the commitment's vocabulary and domain.
pub fn all_models(k: &Commitment) -> Result<Vec<FoModel>, ConceptError> {
    k.validate()?;
    let d = k.structure.domain.len();
    let mut space: u128 = 1;
    for _ in 0..k.constants.len() {
        space = space.saturating_mul(d as u128);
    }
    for (sym, rel_name) in &k.predicates {
        let arity = k.structure.relations[rel_name].arity;
        let tuples = (d as u128).pow(arity as u32);
        if tuples > 20 {
            return Err(ConceptError::SizeGuard(format!(
                "predicate `{sym}` has {tuples} possible tuples"
            )));
        }
        space = space.saturating_mul(1u128 << tuples);
        if space > MAX_MODEL_SPACE {
            return Err(ConceptError::SizeGuard(format!("{space} candidate models")));
        }
    }

    let consts: Vec<&String> = k.constants.keys().collect();
    let preds: Vec<(&String, usize)> = k
        .predicates
        .iter()
        .map(|(sym, rel)| (sym, k.structure.relations[rel].arity))
        .collect();

    let mut out = Vec::new();
    let const_combos = d.pow(consts.len() as u32);
    for cix in 0..const_combos.max(1) {
        let mut constants = BTreeMap::new();
        let mut rest = cix;
        for sym in &consts {
            constants.insert((*sym).clone(), rest % d);
            rest /= d;
        }
        // predicate tables as bitmasks over canonical tuple order
        let mut masks: Vec<u64> = vec![0; preds.len()];
        loop {
            let mut predicates = BTreeMap::new();
            for (i, (sym, arity)) in preds.iter().enumerate() {
                predicates.insert((*sym).clone(), mask_to_tuples(masks[i], *arity, d));
            }
            out.push(FoModel {
                constants: constants.clone(),
                predicates,
            });
            // odometer over masks
            let mut i = preds.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                let tuples = (d as u64).pow(preds[i].1 as u32);
                masks[i] += 1;
                if masks[i] < (1 << tuples) {
                    break;
                }
                masks[i] = 0;
            }
            if masks.iter().all(|m| *m == 0) {
                break;
            }
        }
    }
    Ok(out)
}

fn mask_to_tuples(mask: u64, arity: usize, d: usize) -> BTreeSet<Tuple> {
    let count = d.pow(arity as u32);
    let mut out = BTreeSet::new();
    for i in 0..count {
        if mask & (1 << i) != 0 {
            let mut tuple = Vec::with_capacity(arity);
            let mut rest = i;
            for _ in 0..arity {
                tuple.push(rest % d);
                rest /= d;
            }
            out.insert(tuple);
        }
    }
    out
}

/// Builds the finite model the shared evaluator understands: constants as
/// `e`-elements, predicates as `e -> ... -> o` tables.
pub fn to_finite_model(m: &FoModel, k: &Commitment) -> FiniteModel {
    let d = k.structure.domain.len();
    let mut sizes = Sizes::default();
    sizes.0.insert("e".to_string(), d);
    sizes.0.insert("w".to_string(), 1);
    let mut interp = BTreeMap::new();
    for (sym, elem) in &m.constants {
        interp.insert(sym.clone(), (Ty::e(), Value::Elem(*elem)));
    }
    for (sym, ext) in &m.predicates {
        let arity = k
            .predicates
            .get(sym)
            .map(|rel| k.structure.relations[rel].arity)
            .unwrap_or(1);
        let mut ty = Ty::o();
        for _ in 0..arity {
            ty = Ty::fun(Ty::e(), ty);
        }
        interp.insert(sym.clone(), (ty, table_of(ext, arity, d, &mut Vec::new())));
    }
    FiniteModel {
        sizes,
        interp,
        designated: None,
    }
}

fn table_of(ext: &BTreeSet<Tuple>, arity: usize, d: usize, prefix: &mut Vec<usize>) -> Value {
    if arity == 0 {
        return Value::Bool(ext.contains(prefix));
    }
    let mut entries = Vec::with_capacity(d);
    for i in 0..d {
        prefix.push(i);
        entries.push(table_of(ext, arity - 1, d, prefix));
        prefix.pop();
    }
    Value::Table(entries)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OntologyFit {
    /// Fraction of intended models the axioms keep (1.0 = sound).
    pub soundness: f64,
    /// Fraction of axiom models that are intended (1.0 = complete coverage).
    pub coverage: f64,
    pub intended_count: usize,
    pub axiom_model_count: usize,
    pub all_model_count: usize,
}

/// Evaluates a first-order axiom set against the commitment's model space.
pub fn ontology_fit(axioms: &[Term], k: &Commitment) -> Result<OntologyFit, ConceptError> {
    let intended = intended_models(k)?;
    let all = all_models(k)?;
    let mut axiom_models = 0usize;
    let mut kept_intended = 0usize;
    for m in &all {
        let fm = to_finite_model(m, k);
        let mut holds = true;
        for ax in axioms {
            match eval_closed(ax, &fm) {
                Ok(Value::Bool(b)) => {
                    if !b {
                        holds = false;
                        break;
                    }
                }
                _ => return Err(ConceptError::Unevaluable(ax.to_string())),
            }
        }
        if holds {
            axiom_models += 1;
            if intended.contains(m) {
                kept_intended += 1;
            }
        }
    }
    let soundness = if intended.is_empty() {
        1.0
    } else {
        kept_intended as f64 / intended.len() as f64
    };
    let coverage = if axiom_models == 0 {
        1.0
    } else {
        kept_intended as f64 / axiom_models as f64
    };
    Ok(OntologyFit {
        soundness,
        coverage,
        intended_count: intended.len(),
        axiom_model_count: axiom_models,
        all_model_count: all.len(),
    })
}

/// Counts models up to isomorphism (domain permutations). Only offered for
/// |D| <= 3; larger domains return None and the caller reports the count as
/// unevaluated.
pub fn count_up_to_iso(models: &BTreeSet<FoModel>, domain_size: usize) -> Option<usize> {
    if domain_size > 3 {
        return None;
    }
    let perms = permutations(domain_size);
    let mut canonical: BTreeSet<FoModel> = BTreeSet::new();
    for m in models {
        let mut best: Option<FoModel> = None;
        for p in &perms {
            let pm = apply_perm(m, p);
            best = Some(match best {
                None => pm,
                Some(b) if pm < b => pm,
                Some(b) => b,
            });
        }
        if let Some(b) = best {
            canonical.insert(b);
        }
    }
    Some(canonical.len())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

fn apply_perm(m: &FoModel, p: &[usize]) -> FoModel {
    FoModel {
        constants: m
            .constants
            .iter()
            .map(|(k, v)| (k.clone(), p[*v]))
            .collect(),
        predicates: m
            .predicates
            .iter()
            .map(|(k, ext)| {
                (
                    k.clone(),
                    ext.iter()
                        .map(|t| t.iter().map(|i| p[*i]).collect())
                        .collect(),
                )
            })
            .collect(),
    }
}
