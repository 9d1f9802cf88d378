//! The `.herm` corpus document: a single TOML file (schema `herm/1`) that
//! carries the signature, sentences, candidate formalizations, tagged
//! arguments, the intended network, the meaning-postulate pool, and an
//! optional conceptualization section. Formulas are embedded as strings in
//! the formula grammar. Loading validates the whole document and reports
//! every integrity error, not just the first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use herm_core::adequacy::{Corpus, CorpusArgument, Tag};
use herm_core::argnet::{ArgumentNetwork, Polarity};
use herm_core::concept::{Commitment, IntensionalRelation, IntensionalStructure};
use herm_core::engine::{EngineConfig, EngineInputs};
use herm_core::{parse, parse_ty, Budget, LogicSpec, NamedFormula, Role, Signature, Term, Ty};

pub const SCHEMA: &str = "herm/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HermDoc {
    pub schema: String,
    #[serde(default, skip_serializing_if = "SignatureSec::is_empty")]
    pub signature: SignatureSec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sentences: Vec<SentenceSec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<CandidateSec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub postulates: Vec<PostulateSec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub arguments: Vec<ArgumentSec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub network: Vec<EdgeSec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept: Option<ConceptSec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineSec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct SignatureSec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bases: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
}

impl SignatureSec {
    fn is_empty(&self) -> bool {
        self.bases.is_empty() && self.constants.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SentenceSec {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CandidateSec {
    pub sentence: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub selected: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PostulateSec {
    pub label: String,
    pub formula: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub settled: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArgumentSec {
    pub id: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    pub tag: String,
    pub logics: Vec<String>,
    /// Meaning postulates attached for standalone `check`; the engine
    /// manages its own active set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub postulates: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSec {
    pub from: String,
    pub to: String,
    pub polarity: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConceptSec {
    pub domain: Vec<String>,
    pub worlds: Vec<String>,
    #[serde(default)]
    pub relations: Vec<RelationSec>,
    pub commitment: CommitmentSec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub axioms: Vec<AxiomSec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RelationSec {
    pub name: String,
    pub arity: usize,
    /// World name -> list of tuples of domain element names.
    pub extension: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct CommitmentSec {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub predicates: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AxiomSec {
    pub label: String,
    pub formula: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct EngineSec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stagnation: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub promote_min: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_net: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_simplicity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_spec_edits: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct BudgetSec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_worlds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_individuals: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrityError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for IntegrityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Fully validated document with everything parsed into core types.
pub struct LoadedDoc {
    pub raw: HermDoc,
    pub sig: Signature,
    pub sentences: BTreeMap<String, String>,
    /// Candidate formulas per sentence, in file order.
    pub candidates: BTreeMap<String, Vec<Term>>,
    /// Selected candidate index per sentence (marked or first).
    pub selected: BTreeMap<String, usize>,
    pub postulates: Vec<NamedFormula>,
    pub settled: BTreeSet<String>,
    pub arguments: BTreeMap<String, DocArgument>,
    pub network: ArgumentNetwork,
    pub concept: Option<LoadedConcept>,
    pub engine: EngineConfig,
}

#[derive(Debug, Clone)]
pub struct DocArgument {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub tag: Tag,
    pub logics: Vec<LogicSpec>,
    pub attached: Option<Vec<String>>,
}

pub struct LoadedConcept {
    pub commitment: Commitment,
    pub sig: Signature,
    pub axioms: Vec<(String, Term)>,
}

fn ident_ok(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub fn load(path: &Path) -> Result<LoadedDoc, Vec<IntegrityError>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        vec![IntegrityError {
            location: path.display().to_string(),
            message: format!("cannot read file: {e}"),
        }]
    })?;
    load_str(&text)
}

pub fn load_str(text: &str) -> Result<LoadedDoc, Vec<IntegrityError>> {
    let raw: HermDoc = toml::from_str(text).map_err(|e| {
        vec![IntegrityError {
            location: "document".into(),
            message: format!("TOML parse error: {e}"),
        }]
    })?;
    let mut errors = Vec::new();
    let mut err = |location: &str, message: String| {
        errors.push(IntegrityError {
            location: location.to_string(),
            message,
        })
    };

    if raw.schema != SCHEMA {
        err(
            "schema",
            format!("expected `{SCHEMA}`, found `{}`", raw.schema),
        );
    }

    // signature
    let mut sig = Signature::new();
    for base in &raw.signature.bases {
        if let Err(e) = sig.declare_base(base) {
            err("signature.bases", e.to_string());
        }
    }
    for (name, ty_src) in &raw.signature.constants {
        if !ident_ok(name) {
            err(
                "signature.constants",
                format!("`{name}` is not a lowercase identifier"),
            );
            continue;
        }
        match parse_ty(ty_src, &sig) {
            Ok(ty) => {
                if let Err(e) = sig.declare_const(name, ty) {
                    err("signature.constants", e.to_string());
                }
            }
            Err(e) => err("signature.constants", format!("`{name}`: {e}")),
        }
    }

    // sentences
    let mut sentences = BTreeMap::new();
    for (i, s) in raw.sentences.iter().enumerate() {
        if sentences.insert(s.id.clone(), s.text.clone()).is_some() {
            err(
                &format!("sentences[{i}]"),
                format!("duplicate id `{}`", s.id),
            );
        }
    }

    // candidates
    let mut candidates: BTreeMap<String, Vec<Term>> = BTreeMap::new();
    let mut selected: BTreeMap<String, usize> = BTreeMap::new();
    for (i, c) in raw.candidates.iter().enumerate() {
        let loc = format!("candidates[{i}]");
        if !sentences.contains_key(&c.sentence) {
            err(&loc, format!("unknown sentence `{}`", c.sentence));
            continue;
        }
        match parse(&c.formula, &sig) {
            Ok(term) => match formula_shape_ok(&term) {
                Ok(()) => {
                    let pool = candidates.entry(c.sentence.clone()).or_default();
                    pool.push(term);
                    if c.selected {
                        let idx = pool.len() - 1;
                        if selected.insert(c.sentence.clone(), idx).is_some() {
                            err(&loc, format!("sentence `{}` selected twice", c.sentence));
                        }
                    }
                }
                Err(m) => err(&loc, m),
            },
            Err(e) => err(&loc, e.to_string()),
        }
    }
    for sid in candidates.keys() {
        selected.entry(sid.clone()).or_insert(0);
    }

    // postulates
    let mut postulates = Vec::new();
    let mut settled = BTreeSet::new();
    let mut post_labels = BTreeSet::new();
    for (i, p) in raw.postulates.iter().enumerate() {
        let loc = format!("postulates[{i}]");
        if !post_labels.insert(p.label.clone()) {
            err(&loc, format!("duplicate label `{}`", p.label));
            continue;
        }
        match parse(&p.formula, &sig) {
            Ok(term) => match formula_shape_ok(&term) {
                Ok(()) => {
                    postulates.push(NamedFormula::new(
                        p.label.clone(),
                        Role::MeaningPostulate,
                        term,
                    ));
                    if p.settled {
                        settled.insert(p.label.clone());
                    }
                }
                Err(m) => err(&loc, m),
            },
            Err(e) => err(&loc, e.to_string()),
        }
    }

    // arguments
    let mut arguments = BTreeMap::new();
    for (i, a) in raw.arguments.iter().enumerate() {
        let loc = format!("arguments[{i}]");
        let mut ok = true;
        if arguments.contains_key(&a.id) {
            err(&loc, format!("duplicate id `{}`", a.id));
            ok = false;
        }
        let mut seen = BTreeSet::new();
        for sid in &a.premises {
            if !sentences.contains_key(sid) {
                err(&loc, format!("unknown premise sentence `{sid}`"));
                ok = false;
            }
            if !seen.insert(sid.clone()) {
                err(&loc, format!("duplicate premise `{sid}`"));
                ok = false;
            }
        }
        if !sentences.contains_key(&a.conclusion) {
            err(
                &loc,
                format!("unknown conclusion sentence `{}`", a.conclusion),
            );
            ok = false;
        }
        if seen.contains(&a.conclusion) {
            err(
                &loc,
                format!("conclusion `{}` repeats a premise", a.conclusion),
            );
            ok = false;
        }
        let tag = match a.tag.as_str() {
            "correct" => Tag::Correct,
            "incorrect" => Tag::Incorrect,
            other => {
                err(
                    &loc,
                    format!("tag must be correct|incorrect, found `{other}`"),
                );
                ok = false;
                Tag::Correct
            }
        };
        let mut logics = Vec::new();
        if a.logics.is_empty() {
            err(&loc, "at least one admissible logic is required".into());
            ok = false;
        }
        for l in &a.logics {
            match l.parse::<LogicSpec>() {
                Ok(spec) => logics.push(spec),
                Err(e) => {
                    err(&loc, e.to_string());
                    ok = false;
                }
            }
        }
        if let Some(attached) = &a.postulates {
            for label in attached {
                if !post_labels.contains(label) {
                    err(&loc, format!("unknown postulate `{label}`"));
                    ok = false;
                }
            }
        }
        for sid in a.premises.iter().chain([&a.conclusion]) {
            if sentences.contains_key(sid) && !candidates.contains_key(sid) {
                err(
                    &loc,
                    format!("sentence `{sid}` has no candidate formalization"),
                );
                ok = false;
            }
        }
        if ok {
            arguments.insert(
                a.id.clone(),
                DocArgument {
                    premises: a.premises.clone(),
                    conclusion: a.conclusion.clone(),
                    tag,
                    logics,
                    attached: a.postulates.clone(),
                },
            );
        }
    }

    // network
    let mut edges = Vec::new();
    for (i, e) in raw.network.iter().enumerate() {
        let loc = format!("network[{i}]");
        let polarity = match e.polarity.as_str() {
            "attack" => Polarity::Attack,
            "support" => Polarity::Support,
            other => {
                err(
                    &loc,
                    format!("polarity must be attack|support, found `{other}`"),
                );
                continue;
            }
        };
        for endpoint in [&e.from, &e.to] {
            match arguments.get(endpoint) {
                Some(a) if a.tag == Tag::Correct => {}
                Some(_) => err(&loc, format!("node `{endpoint}` must be correct-tagged")),
                None => err(&loc, format!("unknown argument `{endpoint}`")),
            }
        }
        if e.from == e.to {
            err(&loc, format!("self-edge on `{}`", e.from));
        }
        edges.push((e.from.clone(), e.to.clone(), polarity));
    }
    let mut nodes: Vec<String> = arguments
        .iter()
        .filter(|(_, a)| a.tag == Tag::Correct)
        .map(|(id, _)| id.clone())
        .collect();
    nodes.sort();
    let network = ArgumentNetwork {
        nodes,
        intended: edges,
    };
    if let Err(e) = network.validate() {
        err("network", e.to_string());
    }

    // concept section
    let concept = raw
        .concept
        .as_ref()
        .and_then(|sec| load_concept(sec, &mut errors));

    // engine config overrides
    let engine = engine_config(&raw.engine);

    if errors.is_empty() {
        Ok(LoadedDoc {
            raw,
            sig,
            sentences,
            candidates,
            selected,
            postulates,
            settled,
            arguments,
            network,
            concept,
            engine,
        })
    } else {
        Err(errors)
    }
}

/// Named formulas must be lifted (`w > o`) or world-independent (`o`).
fn formula_shape_ok(term: &Term) -> Result<(), String> {
    match term.ty() {
        Ok(ty) if ty.is_o() || ty.is_wo() => Ok(()),
        Ok(ty) => Err(format!("formula must have type `o` or `w > o`, got `{ty}`")),
        Err(e) => Err(e.to_string()),
    }
}

fn load_concept(sec: &ConceptSec, errors: &mut Vec<IntegrityError>) -> Option<LoadedConcept> {
    let mut err = |location: &str, message: String| {
        errors.push(IntegrityError {
            location: location.to_string(),
            message,
        })
    };
    let mut ok = true;
    let elem_index: BTreeMap<&String, usize> =
        sec.domain.iter().enumerate().map(|(i, d)| (d, i)).collect();
    if elem_index.len() != sec.domain.len() {
        err("concept.domain", "duplicate domain elements".into());
        ok = false;
    }
    let world_index: BTreeMap<&String, usize> =
        sec.worlds.iter().enumerate().map(|(i, w)| (w, i)).collect();
    if world_index.len() != sec.worlds.len() {
        err("concept.worlds", "duplicate worlds".into());
        ok = false;
    }

    let mut relations = BTreeMap::new();
    for (i, rel) in sec.relations.iter().enumerate() {
        let loc = format!("concept.relations[{i}]");
        let mut extensions = vec![BTreeSet::new(); sec.worlds.len()];
        for (world, tuples) in &rel.extension {
            let Some(w) = world_index.get(world) else {
                err(&loc, format!("unknown world `{world}`"));
                ok = false;
                continue;
            };
            for tuple in tuples {
                if tuple.len() != rel.arity {
                    err(&loc, format!("tuple arity mismatch in `{}`", rel.name));
                    ok = false;
                    continue;
                }
                let mut ixs = Vec::new();
                for elem in tuple {
                    match elem_index.get(elem) {
                        Some(ix) => ixs.push(*ix),
                        None => {
                            err(&loc, format!("unknown domain element `{elem}`"));
                            ok = false;
                        }
                    }
                }
                if ixs.len() == tuple.len() {
                    extensions[*w].insert(ixs);
                }
            }
        }
        for world in &sec.worlds {
            if !rel.extension.contains_key(world) {
                err(
                    &loc,
                    format!("relation `{}` missing world `{world}`", rel.name),
                );
                ok = false;
            }
        }
        relations.insert(
            rel.name.clone(),
            IntensionalRelation {
                arity: rel.arity,
                extensions,
            },
        );
    }

    let structure = IntensionalStructure {
        domain: sec.domain.clone(),
        worlds: sec.worlds.clone(),
        relations,
    };
    if let Err(e) = structure.validate() {
        err("concept", e.to_string());
        ok = false;
    }

    let mut constants = BTreeMap::new();
    for (sym, elem) in &sec.commitment.constants {
        match elem_index.get(elem) {
            Some(ix) => {
                constants.insert(sym.clone(), *ix);
            }
            None => {
                err(
                    "concept.commitment.constants",
                    format!("unknown element `{elem}`"),
                );
                ok = false;
            }
        }
    }
    let mut predicates = BTreeMap::new();
    for (sym, rel) in &sec.commitment.predicates {
        if !structure.relations.contains_key(rel) {
            err(
                "concept.commitment.predicates",
                format!("unknown relation `{rel}`"),
            );
            ok = false;
        } else {
            predicates.insert(sym.clone(), rel.clone());
        }
    }
    let commitment = Commitment {
        structure,
        constants,
        predicates,
    };
    if let Err(e) = commitment.validate() {
        err("concept.commitment", e.to_string());
        ok = false;
    }

    // first-order vocabulary signature for axiom parsing
    let mut csig = Signature::new();
    for sym in commitment.constants.keys() {
        if let Err(e) = csig.declare_const(sym, Ty::e()) {
            err("concept.commitment.constants", e.to_string());
            ok = false;
        }
    }
    for (sym, rel) in &commitment.predicates {
        let arity = commitment.structure.relations[rel].arity;
        let mut ty = Ty::o();
        for _ in 0..arity {
            ty = Ty::fun(Ty::e(), ty);
        }
        if let Err(e) = csig.declare_const(sym, ty) {
            err("concept.commitment.predicates", e.to_string());
            ok = false;
        }
    }

    let mut axioms = Vec::new();
    let mut labels = BTreeSet::new();
    for (i, ax) in sec.axioms.iter().enumerate() {
        let loc = format!("concept.axioms[{i}]");
        if !labels.insert(ax.label.clone()) {
            err(&loc, format!("duplicate label `{}`", ax.label));
            ok = false;
            continue;
        }
        match parse(&ax.formula, &csig) {
            Ok(term) => match term.ty() {
                Ok(ty) if ty.is_o() => axioms.push((ax.label.clone(), term)),
                Ok(ty) => {
                    err(&loc, format!("axiom must have type `o`, got `{ty}`"));
                    ok = false;
                }
                Err(e) => {
                    err(&loc, e.to_string());
                    ok = false;
                }
            },
            Err(e) => {
                err(&loc, e.to_string());
                ok = false;
            }
        }
    }

    if ok {
        Some(LoadedConcept {
            commitment,
            sig: csig,
            axioms,
        })
    } else {
        None
    }
}

fn engine_config(sec: &Option<EngineSec>) -> EngineConfig {
    let mut config = EngineConfig::default();
    let Some(sec) = sec else {
        return config;
    };
    if let Some(v) = sec.seed {
        config.seed = v;
    }
    if let Some(v) = sec.iters {
        config.iterations = v;
    }
    if let Some(v) = sec.t0 {
        config.t0 = v;
    }
    if let Some(v) = sec.alpha {
        config.alpha = v;
    }
    if let Some(v) = sec.stagnation {
        config.stagnation = v;
    }
    if let Some(v) = sec.promote_min {
        config.promote_min_args = v;
    }
    if let Some(v) = sec.w_net {
        config.weights.network = v;
    }
    if let Some(v) = sec.lambda {
        config.weights.spurious_lambda = v;
    }
    if let Some(v) = sec.w_simplicity {
        config.weights.simplicity = v;
    }
    if let Some(v) = sec.allow_spec_edits {
        config.allow_spec_edits = v;
    }
    if let Some(v) = sec.strict {
        config.strict_reliability = v;
    }
    if let Some(b) = &sec.budget {
        if let Some(v) = b.max_worlds {
            config.budget.max_worlds = v;
        }
        if let Some(v) = b.max_individuals {
            config.budget.max_individuals = v;
        }
        if let Some(v) = b.max_depth {
            config.budget.max_depth = v;
        }
        if let Some(v) = b.timeout_ms {
            config.budget.timeout_ms = v;
        }
    }
    config
}

impl LoadedDoc {
    /// Engine search space from the document.
    pub fn engine_inputs(&self) -> EngineInputs {
        let mut corpus = Corpus {
            sentences: self.sentences.clone(),
            arguments: BTreeMap::new(),
        };
        let mut admissible = BTreeMap::new();
        for (id, a) in &self.arguments {
            corpus.arguments.insert(
                id.clone(),
                CorpusArgument {
                    premises: a.premises.clone(),
                    conclusion: a.conclusion.clone(),
                    tag: a.tag,
                },
            );
            admissible.insert(id.clone(), a.logics.clone());
        }
        EngineInputs {
            sig: self.sig.clone(),
            corpus,
            network: self.network.clone(),
            candidates: self.candidates.clone(),
            postulates: self.postulates.clone(),
            initially_active: self.settled.clone(),
            admissible,
        }
    }

    /// The formalized argument for `check`/`models`/`network`, using the
    /// selected candidate of each sentence.
    pub fn realized_argument(&self, id: &str) -> Option<herm_core::correctness::Argument> {
        let a = self.arguments.get(id)?;
        let term_of = |sid: &String| -> Option<Term> {
            let pool = self.candidates.get(sid)?;
            let idx = self.selected.get(sid).copied().unwrap_or(0);
            pool.get(idx).cloned()
        };
        let mut premises = Vec::new();
        for sid in &a.premises {
            premises.push(NamedFormula::new(sid.clone(), Role::Premise, term_of(sid)?));
        }
        let conclusion = NamedFormula::new(
            a.conclusion.clone(),
            Role::Conclusion,
            term_of(&a.conclusion)?,
        );
        Some(herm_core::correctness::Argument {
            id: id.to_string(),
            premises,
            conclusion,
            spec: a.logics.first().cloned().unwrap_or_else(LogicSpec::k),
            theory_labels: a.attached.clone().unwrap_or_default(),
        })
    }

    /// Postulates attached to an argument: its explicit list, or all settled.
    pub fn theory_for(&self, arg: &DocArgument) -> Vec<NamedFormula> {
        match &arg.attached {
            Some(labels) => self
                .postulates
                .iter()
                .filter(|p| labels.contains(&p.label))
                .cloned()
                .collect(),
            None => self
                .postulates
                .iter()
                .filter(|p| self.settled.contains(&p.label))
                .cloned()
                .collect(),
        }
    }
}

/// Serializes a document back to TOML (stable field and section order).
pub fn save(doc: &HermDoc) -> String {
    toml::to_string_pretty(doc).expect("document serializes")
}

/// Budget overrides from the `HERM_BUDGET` environment variable, e.g.
/// `worlds=3,individuals=2,depth=12,timeout=5000`.
pub fn env_budget(base: Budget) -> Budget {
    let mut budget = base;
    let Ok(var) = std::env::var("HERM_BUDGET") else {
        return budget;
    };
    for part in var.split(',') {
        let mut kv = part.splitn(2, '=');
        let (Some(k), Some(v)) = (kv.next(), kv.next()) else {
            continue;
        };
        match (k.trim(), v.trim().parse::<u64>()) {
            ("worlds", Ok(n)) => budget.max_worlds = n as usize,
            ("individuals", Ok(n)) => budget.max_individuals = n as usize,
            ("depth", Ok(n)) => budget.max_depth = n as usize,
            ("timeout", Ok(n)) => budget.timeout_ms = n,
            _ => {}
        }
    }
    budget
}
