//! Inferential adequacy scoring of candidate sentence formalizations against
//! a corpus of arguments tagged correct or incorrect.
//!
//! Reliability rejects a formalization that makes any incorrect-tagged
//! argument come out valid. Ambitiousness is the fraction of correct-tagged
//! arguments containing the sentence that come out valid. Both are relative
//! to the current formalization of every companion sentence.

use std::collections::BTreeMap;

use crate::logic::LogicSpec;
use crate::reasoner::{Budget, ReasonError, Reasoner, Verdict};
use crate::signature::Signature;
use crate::term::Term;
use thiserror::Error;

pub type SentenceId = String;
pub type ArgumentId = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdequacyError {
    #[error("argument `{argument}` mentions sentence `{sentence}`, which has no formalization")]
    UnmappedSentence {
        argument: ArgumentId,
        sentence: SentenceId,
    },
    #[error("argument `{0}` has no logic selection")]
    NoSpec(ArgumentId),
    #[error(transparent)]
    Reason(#[from] ReasonError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Correct,
    Incorrect,
}

#[derive(Debug, Clone)]
pub struct CorpusArgument {
    pub premises: Vec<SentenceId>,
    pub conclusion: SentenceId,
    pub tag: Tag,
}

impl CorpusArgument {
    pub fn contains(&self, s: &str) -> bool {
        self.conclusion == s || self.premises.iter().any(|p| p == s)
    }
}

/// Tagged natural-language arguments over sentence ids.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub sentences: BTreeMap<SentenceId, String>,
    pub arguments: BTreeMap<ArgumentId, CorpusArgument>,
}

/// Current candidate assignment: sentence id to surface formula, with the
/// logic the candidate was authored for.
#[derive(Debug, Clone, Default)]
pub struct FormalizationMap(pub BTreeMap<SentenceId, (Term, LogicSpec)>);

impl FormalizationMap {
    pub fn get(&self, s: &str) -> Option<&(Term, LogicSpec)> {
        self.0.get(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reliable {
    Yes,
    No,
    Unknown,
}

impl std::fmt::Display for Reliable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Reliable::Yes => f.write_str("yes"),
            Reliable::No => f.write_str("no"),
            Reliable::Unknown => f.write_str("unknown"),
        }
    }
}

/// How Unknown verdicts feed reliability: the charitable default treats them
/// as non-violations, strict mode surfaces them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    #[default]
    Charitable,
    Strict,
}

#[derive(Debug, Clone)]
pub struct AdequacyScore {
    pub reliable: Reliable,
    pub ambitiousness: f64,
    pub validated: usize,
    pub relevant_correct: usize,
    pub simplicity: usize,
    pub aggregate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Weights {
    pub ambitiousness: f64,
    pub simplicity: f64,
    /// Grammatical-similarity weight; off by default.
    pub grammar: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            ambitiousness: 1.0,
            simplicity: 0.05,
            grammar: 0.0,
        }
    }
}

/// Reduced syntactic-similarity criterion: shared quantifier prefix shape
/// plus connective multiset distance, scaled into [0,1]. Carries weight 0
/// unless a run opts in.
pub fn grammatical_similarity(a: &Term, b: &Term) -> f64 {
    let prefix_match = quantifier_prefix(a) == quantifier_prefix(b);
    let da = connective_multiset(a);
    let db = connective_multiset(b);
    let mut distance = 0usize;
    for key in da.keys().chain(db.keys()).collect::<std::collections::BTreeSet<_>>() {
        let x = da.get(key).copied().unwrap_or(0);
        let y = db.get(key).copied().unwrap_or(0);
        distance += x.abs_diff(y);
    }
    0.5 * f64::from(prefix_match) + 0.5 / (1.0 + distance as f64)
}

fn quantifier_prefix(t: &Term) -> Vec<&'static str> {
    use crate::term::logical;
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        let (head, args) = cur.spine();
        let name = match head {
            Term::Const(n, _) => n.as_str(),
            _ => break,
        };
        let tag = match name {
            logical::FORALL | logical::MFORALL => "forall",
            logical::EXISTS | logical::MEXISTS => "exists",
            logical::MFORALL_A => "forallA",
            logical::MEXISTS_A => "existsA",
            _ => break,
        };
        match args.first() {
            Some(Term::Lam { body, .. }) => {
                out.push(tag);
                cur = body.as_ref();
            }
            _ => break,
        }
    }
    out
}

fn connective_multiset(t: &Term) -> BTreeMap<String, usize> {
    use crate::term::logical;
    let mut out = BTreeMap::new();
    fn go(t: &Term, out: &mut BTreeMap<String, usize>) {
        match t {
            Term::Const(n, _) if logical::is_logical(n) => {
                // collapse the lifted and classical spellings
                let key = n.trim_start_matches('m').to_string();
                *out.entry(key).or_insert(0) += 1;
            }
            Term::Const(..) | Term::BVar(_) => {}
            Term::Lam { body, .. } => go(body, out),
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
        }
    }
    go(t, &mut out);
    out
}

/// Everything a scoring call needs besides the reasoner.
pub struct ScoreCtx<'a> {
    pub corpus: &'a Corpus,
    pub fmap: &'a FormalizationMap,
    /// The logic each corpus argument is currently evaluated in.
    pub arg_specs: &'a BTreeMap<ArgumentId, LogicSpec>,
    pub theory: &'a [Term],
    pub sig: &'a Signature,
    pub budget: &'a Budget,
    pub policy: UnknownPolicy,
    /// Reference formalizations for the grammatical-similarity criterion
    /// (typically each sentence's bootstrap candidate); consulted only when
    /// the grammar weight is nonzero.
    pub grammar_refs: Option<&'a BTreeMap<SentenceId, Term>>,
}

impl ScoreCtx<'_> {
    fn grammar_reference(&self, sentence: &str) -> Option<&Term> {
        self.grammar_refs.and_then(|m| m.get(sentence))
    }
}

/// Validity of one corpus argument under the current formalization map.
pub fn argument_validity(
    aid: &str,
    ctx: &ScoreCtx<'_>,
    reasoner: &mut Reasoner,
) -> Result<Verdict, AdequacyError> {
    let arg = &ctx.corpus.arguments[aid];
    let spec = ctx
        .arg_specs
        .get(aid)
        .ok_or_else(|| AdequacyError::NoSpec(aid.to_string()))?;
    let mut premises = Vec::new();
    for sid in &arg.premises {
        let (term, _) = ctx
            .fmap
            .get(sid)
            .ok_or_else(|| AdequacyError::UnmappedSentence {
                argument: aid.to_string(),
                sentence: sid.clone(),
            })?;
        premises.push(term.clone());
    }
    premises.extend(ctx.theory.iter().cloned());
    let (concl, _) =
        ctx.fmap
            .get(&arg.conclusion)
            .ok_or_else(|| AdequacyError::UnmappedSentence {
                argument: aid.to_string(),
                sentence: arg.conclusion.clone(),
            })?;
    Ok(reasoner.entails(&premises, concl, spec, ctx.sig, ctx.budget)?)
}

/// Principle (i): no incorrect-tagged argument containing the sentence may
/// come out valid.
pub fn reliability(
    sentence: &str,
    ctx: &ScoreCtx<'_>,
    reasoner: &mut Reasoner,
) -> Result<Reliable, AdequacyError> {
    let mut saw_unknown = false;
    for (aid, arg) in &ctx.corpus.arguments {
        if arg.tag != Tag::Incorrect || !arg.contains(sentence) {
            continue;
        }
        match argument_validity(aid, ctx, reasoner)? {
            Verdict::Valid(_) => return Ok(Reliable::No),
            Verdict::Invalid(_) => {}
            Verdict::Unknown(_) => saw_unknown = true,
        }
    }
    Ok(if saw_unknown && ctx.policy == UnknownPolicy::Strict {
        Reliable::Unknown
    } else {
        Reliable::Yes
    })
}

/// Principle (ii): fraction of correct-tagged arguments containing the
/// sentence rendered valid; 1.0 when none are relevant. Unknown verdicts
/// count as not validated.
pub fn ambitiousness(
    sentence: &str,
    ctx: &ScoreCtx<'_>,
    reasoner: &mut Reasoner,
) -> Result<(f64, usize, usize), AdequacyError> {
    let mut relevant = 0usize;
    let mut validated = 0usize;
    for (aid, arg) in &ctx.corpus.arguments {
        if arg.tag != Tag::Correct || !arg.contains(sentence) {
            continue;
        }
        relevant += 1;
        if argument_validity(aid, ctx, reasoner)?.is_valid() {
            validated += 1;
        }
    }
    let frac = if relevant == 0 {
        1.0
    } else {
        validated as f64 / relevant as f64
    };
    Ok((frac, validated, relevant))
}

/// Combines the principles with the syntactic simplicity criterion.
/// `max_pool_symbols` is the maximum symbol count over the sentence's
/// candidate pool; an unreliable candidate scores negative infinity.
pub fn aggregate(
    reliable: Reliable,
    ambitiousness: f64,
    simplicity: usize,
    max_pool_symbols: usize,
    weights: &Weights,
) -> f64 {
    if reliable == Reliable::No {
        return f64::NEG_INFINITY;
    }
    let norm = if max_pool_symbols == 0 {
        0.0
    } else {
        simplicity as f64 / max_pool_symbols as f64
    };
    weights.ambitiousness * ambitiousness - weights.simplicity * norm
}

/// Full per-sentence score under the current map.
pub fn score_sentence(
    sentence: &str,
    ctx: &ScoreCtx<'_>,
    max_pool_symbols: usize,
    weights: &Weights,
    reasoner: &mut Reasoner,
) -> Result<AdequacyScore, AdequacyError> {
    let reliable = reliability(sentence, ctx, reasoner)?;
    let (amb, validated, relevant) = ambitiousness(sentence, ctx, reasoner)?;
    let simplicity = ctx
        .fmap
        .get(sentence)
        .map(|(t, _)| t.symbol_count())
        .unwrap_or(0);
    let mut agg = aggregate(reliable, amb, simplicity, max_pool_symbols, weights);
    if weights.grammar != 0.0 && agg.is_finite() {
        if let (Some((term, _)), Some(reference)) =
            (ctx.fmap.get(sentence), ctx.grammar_reference(sentence))
        {
            agg += weights.grammar * grammatical_similarity(term, reference);
        }
    }
    Ok(AdequacyScore {
        reliable,
        ambitiousness: amb,
        validated,
        relevant_correct: relevant,
        simplicity,
        aggregate: agg,
    })
}
