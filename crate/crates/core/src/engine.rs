//! Two-layer iterative search over formalization assignments: per-argument
//! logical correctness plus adequacy at one layer, network role fulfillment
//! at the other. Moves swap sentence candidates, toggle meaning postulates
//! and adjust per-argument logics; acceptance is simulated annealing with a
//! seeded generator, so a run is a pure function of (inputs, config).

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adequacy::{
    self, AdequacyScore, ArgumentId, Corpus, FormalizationMap, ScoreCtx, SentenceId, Tag,
    UnknownPolicy, Weights,
};
use crate::argnet::{role_fulfillment, ArgumentNetwork, NetworkReport};
use crate::correctness::{check_correctness, Argument, CheckOptions, Overall, TriBool};
use crate::formula::{NamedFormula, Role};
use crate::logic::{DomainPolicy, FrameCondition, LogicSpec};
use crate::reasoner::{Budget, Reasoner};
use crate::signature::Signature;
use crate::term::{logical, Term};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("sentence `{0}` has an empty candidate pool")]
    EmptyPool(String),
    #[error("argument `{0}` admits no logic")]
    NoAdmissibleLogic(String),
    #[error("network node `{0}` is not a correct-tagged argument")]
    BadNetworkNode(String),
    #[error("duplicate postulate label `{0}`")]
    DuplicatePostulate(String),
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("scoring failed: {0}")]
    Scoring(String),
}

#[derive(Debug, Clone, Copy)]
pub struct ObjectiveWeights {
    pub validity: f64,
    pub consistency: f64,
    pub non_circular: f64,
    pub no_idle: f64,
    pub adequacy: f64,
    pub network: f64,
    pub spurious_lambda: f64,
    pub ambitiousness: f64,
    pub simplicity: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        ObjectiveWeights {
            validity: 1.0,
            consistency: 0.5,
            non_circular: 0.25,
            no_idle: 0.25,
            adequacy: 1.0,
            network: 1.0,
            spurious_lambda: 0.5,
            ambitiousness: 1.0,
            simplicity: 0.05,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub weights: ObjectiveWeights,
    pub t0: f64,
    pub alpha: f64,
    pub iterations: u64,
    pub stagnation: u64,
    pub seed: u64,
    pub budget: Budget,
    /// A postulate is promoted when it participates in at least this many
    /// passing arguments...
    pub promote_min_args: usize,
    /// ...and removing it drops the objective by at least this much.
    pub promote_min_drop: f64,
    pub allow_spec_edits: bool,
    pub strict_reliability: bool,
    pub max_move_retries: u32,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            weights: ObjectiveWeights::default(),
            t0: 1.0,
            alpha: 0.995,
            iterations: 1000,
            stagnation: 150,
            seed: 0,
            budget: Budget::default(),
            promote_min_args: 2,
            promote_min_drop: 1e-9,
            allow_spec_edits: true,
            strict_reliability: false,
            max_move_retries: 16,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.t0 <= 0.0 || self.t0.is_nan() {
            return Err(EngineError::BadConfig("t0 must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(EngineError::BadConfig("alpha must be in (0,1)".into()));
        }
        if self.stagnation == 0 {
            return Err(EngineError::BadConfig(
                "stagnation window must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Search space: candidate formalizations per sentence, a meaning-postulate
/// pool, and admissible logics per argument.
#[derive(Debug, Clone)]
pub struct EngineInputs {
    pub sig: Signature,
    pub corpus: Corpus,
    pub network: ArgumentNetwork,
    pub candidates: BTreeMap<SentenceId, Vec<Term>>,
    pub postulates: Vec<NamedFormula>,
    pub initially_active: BTreeSet<String>,
    pub admissible: BTreeMap<ArgumentId, Vec<LogicSpec>>,
}

impl EngineInputs {
    pub fn validate(&self) -> Result<(), EngineError> {
        let mut labels = BTreeSet::new();
        for p in &self.postulates {
            if !labels.insert(p.label.clone()) {
                return Err(EngineError::DuplicatePostulate(p.label.clone()));
            }
        }
        for arg in self.corpus.arguments.values() {
            for sid in arg.premises.iter().chain([&arg.conclusion]) {
                match self.candidates.get(sid) {
                    Some(pool) if !pool.is_empty() => {}
                    _ => return Err(EngineError::EmptyPool(sid.clone())),
                }
            }
        }
        for (aid, arg) in &self.corpus.arguments {
            if arg.tag == Tag::Correct
                && !self
                    .admissible
                    .get(aid)
                    .map(|l| !l.is_empty())
                    .unwrap_or(false)
            {
                return Err(EngineError::NoAdmissibleLogic(aid.clone()));
            }
        }
        for node in &self.network.nodes {
            match self.corpus.arguments.get(node) {
                Some(a) if a.tag == Tag::Correct => {}
                _ => return Err(EngineError::BadNetworkNode(node.clone())),
            }
        }
        Ok(())
    }

    fn correct_args(&self) -> impl Iterator<Item = (&ArgumentId, &adequacy::CorpusArgument)> {
        self.corpus
            .arguments
            .iter()
            .filter(|(_, a)| a.tag == Tag::Correct)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineState {
    pub choice: BTreeMap<SentenceId, usize>,
    pub active: BTreeSet<String>,
    pub specs: BTreeMap<ArgumentId, LogicSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MoveKind {
    SwapCandidate {
        sentence: SentenceId,
        to: usize,
    },
    TogglePostulate {
        label: String,
    },
    SwitchLogic {
        argument: ArgumentId,
        to: LogicSpec,
    },
    ToggleFrameAxiom {
        argument: ArgumentId,
        condition: FrameCondition,
    },
    ToggleDomainPolicy {
        argument: ArgumentId,
    },
}

impl std::fmt::Display for MoveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MoveKind::SwapCandidate { sentence, to } => write!(f, "swap({sentence}->{to})"),
            MoveKind::TogglePostulate { label } => write!(f, "toggle({label})"),
            MoveKind::SwitchLogic { argument, to } => write!(f, "logic({argument}->{to})"),
            MoveKind::ToggleFrameAxiom {
                argument,
                condition,
            } => write!(f, "frame({argument}:{condition})"),
            MoveKind::ToggleDomainPolicy { argument } => write!(f, "domain({argument})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArgBreakdown {
    pub validity: &'static str,
    pub consistency: &'static str,
    pub circular: TriBool,
    pub idle: BTreeSet<String>,
    pub overall: Overall,
    pub points: f64,
}

#[derive(Debug, Clone)]
pub struct Breakdown {
    pub per_argument: BTreeMap<ArgumentId, ArgBreakdown>,
    pub per_sentence: BTreeMap<SentenceId, AdequacyScore>,
    pub network: Option<NetworkReport>,
    pub reliability_violation: Option<SentenceId>,
    pub total: f64,
    /// All correct arguments pass, all intended edges realized, none
    /// spurious.
    pub structural_max: bool,
}

/// Scores a state from scratch (the reasoner cache absorbs repeats).
pub fn objective(
    state: &EngineState,
    inputs: &EngineInputs,
    config: &EngineConfig,
    reasoner: &mut Reasoner,
) -> Result<Breakdown, EngineError> {
    let theory: Vec<NamedFormula> = inputs
        .postulates
        .iter()
        .filter(|p| state.active.contains(&p.label))
        .cloned()
        .collect();
    let theory_terms: Vec<Term> = theory.iter().map(|p| p.term.clone()).collect();

    let fmap = formalization_map(state, inputs);
    let args = realized_arguments(state, inputs, &theory);

    // layer 1a: per-argument correctness
    let mut per_argument = BTreeMap::new();
    let mut correctness_total = 0.0;
    let mut all_pass = true;
    for (aid, _) in inputs.correct_args() {
        let arg = &args[aid];
        let report = check_correctness(
            arg,
            &theory,
            CheckOptions::default(),
            reasoner,
            &inputs.sig,
            &config.budget,
        )
        .map_err(|e| EngineError::Scoring(e.to_string()))?;
        let w = &config.weights;
        let mut points = 0.0;
        if report.validity.is_valid() {
            points += w.validity;
        }
        if report.consistency.is_sat() {
            points += w.consistency;
        }
        if report.circular == TriBool::No {
            points += w.non_circular;
        }
        if report.idle_premises.is_empty() && report.idle_unknowns.is_empty() {
            points += w.no_idle;
        }
        correctness_total += points;
        if report.overall != Overall::Pass {
            all_pass = false;
        }
        per_argument.insert(
            aid.clone(),
            ArgBreakdown {
                validity: report.validity.short(),
                consistency: report.consistency.short(),
                circular: report.circular,
                idle: report.idle_premises.clone(),
                overall: report.overall,
                points,
            },
        );
    }

    // layer 1b: adequacy per mapped sentence
    let arg_specs: BTreeMap<ArgumentId, LogicSpec> = inputs
        .corpus
        .arguments
        .keys()
        .map(|aid| (aid.clone(), spec_for(state, inputs, aid)))
        .collect();
    let ctx = ScoreCtx {
        corpus: &inputs.corpus,
        fmap: &fmap,
        arg_specs: &arg_specs,
        theory: &theory_terms,
        sig: &inputs.sig,
        budget: &config.budget,
        policy: if config.strict_reliability {
            UnknownPolicy::Strict
        } else {
            UnknownPolicy::Charitable
        },
        grammar_refs: None,
    };
    let weights = Weights {
        ambitiousness: config.weights.ambitiousness,
        simplicity: config.weights.simplicity,
        grammar: 0.0,
    };
    let mut per_sentence = BTreeMap::new();
    let mut adequacy_total = 0.0;
    let mut violation = None;
    for sid in fmap.0.keys() {
        let max_pool = inputs
            .candidates
            .get(sid)
            .map(|pool| pool.iter().map(|t| t.symbol_count()).max().unwrap_or(0))
            .unwrap_or(0);
        let score = adequacy::score_sentence(sid, &ctx, max_pool, &weights, reasoner)
            .map_err(|e| EngineError::Scoring(e.to_string()))?;
        if score.reliable == adequacy::Reliable::No && violation.is_none() {
            violation = Some(sid.clone());
        }
        adequacy_total += score.aggregate;
        per_sentence.insert(sid.clone(), score);
    }

    // layer 2: network roles
    let network = if inputs.network.nodes.is_empty() {
        None
    } else {
        let net_args: BTreeMap<String, Argument> = inputs
            .network
            .nodes
            .iter()
            .map(|n| (n.clone(), args[n].clone()))
            .collect();
        Some(
            role_fulfillment(
                &inputs.network,
                &net_args,
                &theory_terms,
                config.weights.spurious_lambda,
                reasoner,
                &inputs.sig,
                &config.budget,
            )
            .map_err(|e| EngineError::Scoring(e.to_string()))?,
        )
    };
    let net_score = network.as_ref().map(|n| n.score).unwrap_or(1.0);
    let net_component = if inputs.network.nodes.is_empty() {
        0.0
    } else {
        config.weights.network * net_score
    };

    let total = if violation.is_some() {
        f64::NEG_INFINITY
    } else {
        correctness_total + config.weights.adequacy * adequacy_total + net_component
    };

    let structural_max = all_pass
        && violation.is_none()
        && network
            .as_ref()
            .map(|n| n.intended.iter().all(|e| e.realized) && n.spurious.is_empty())
            .unwrap_or(true);

    Ok(Breakdown {
        per_argument,
        per_sentence,
        network,
        reliability_violation: violation,
        total,
        structural_max,
    })
}

fn formalization_map(state: &EngineState, inputs: &EngineInputs) -> FormalizationMap {
    let mut map = FormalizationMap::default();
    for (sid, pool) in &inputs.candidates {
        let idx = state
            .choice
            .get(sid)
            .copied()
            .unwrap_or(0)
            .min(pool.len() - 1);
        map.0.insert(
            sid.clone(),
            (pool[idx].clone(), home_spec(state, inputs, sid)),
        );
    }
    map
}

/// The logic a sentence is reported under: the spec of the first argument
/// that contains it (informational only; scoring always uses the argument's
/// own spec).
fn home_spec(state: &EngineState, inputs: &EngineInputs, sid: &str) -> LogicSpec {
    for (aid, arg) in &inputs.corpus.arguments {
        if arg.contains(sid) {
            return spec_for(state, inputs, aid);
        }
    }
    LogicSpec::k()
}

fn spec_for(state: &EngineState, inputs: &EngineInputs, aid: &str) -> LogicSpec {
    if let Some(s) = state.specs.get(aid) {
        return s.clone();
    }
    inputs
        .admissible
        .get(aid)
        .and_then(|l| l.first().cloned())
        .unwrap_or_else(LogicSpec::k)
}

fn realized_arguments(
    state: &EngineState,
    inputs: &EngineInputs,
    _theory: &[NamedFormula],
) -> BTreeMap<ArgumentId, Argument> {
    let mut out = BTreeMap::new();
    for (aid, arg) in &inputs.corpus.arguments {
        let premises: Vec<NamedFormula> = arg
            .premises
            .iter()
            .map(|sid| {
                NamedFormula::new(
                    sid.clone(),
                    Role::Premise,
                    candidate_term(state, inputs, sid),
                )
            })
            .collect();
        let conclusion = NamedFormula::new(
            arg.conclusion.clone(),
            Role::Conclusion,
            candidate_term(state, inputs, &arg.conclusion),
        );
        out.insert(
            aid.clone(),
            Argument {
                id: aid.clone(),
                premises,
                conclusion,
                spec: spec_for(state, inputs, aid),
                theory_labels: state.active.iter().cloned().collect(),
            },
        );
    }
    out
}

fn candidate_term(state: &EngineState, inputs: &EngineInputs, sid: &str) -> Term {
    let pool = &inputs.candidates[sid];
    let idx = state
        .choice
        .get(sid)
        .copied()
        .unwrap_or(0)
        .min(pool.len() - 1);
    pool[idx].clone()
}

/// Initial assignment: first candidate everywhere, declared-settled
/// postulates active, first admissible logic per argument.
pub fn bootstrap(inputs: &EngineInputs) -> EngineState {
    EngineState {
        choice: inputs.candidates.keys().map(|s| (s.clone(), 0)).collect(),
        active: inputs.initially_active.clone(),
        specs: inputs
            .admissible
            .iter()
            .filter_map(|(aid, specs)| specs.first().map(|s| (aid.clone(), s.clone())))
            .collect(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("no legal move from this state")]
pub struct Fixpoint;

/// Draws a legal move: uniform over the supported move kinds, then uniform
/// within the kind.
pub fn propose_move(
    state: &EngineState,
    inputs: &EngineInputs,
    config: &EngineConfig,
    rng: &mut ChaCha8Rng,
) -> Result<MoveKind, Fixpoint> {
    let swappable: Vec<&SentenceId> = inputs
        .candidates
        .iter()
        .filter(|(_, pool)| pool.len() >= 2)
        .map(|(s, _)| s)
        .collect();
    let switchable: Vec<&ArgumentId> = inputs
        .admissible
        .iter()
        .filter(|(aid, pool)| {
            pool.len() >= 2 || (pool.len() == 1 && pool[0] != spec_for(state, inputs, aid))
        })
        .map(|(a, _)| a)
        .collect();
    let args: Vec<&ArgumentId> = inputs
        .corpus
        .arguments
        .iter()
        .filter(|(_, a)| a.tag == Tag::Correct)
        .map(|(a, _)| a)
        .collect();

    #[derive(Clone, Copy)]
    enum Kind {
        Swap,
        Toggle,
        Switch,
        Frame,
        Domain,
    }
    let mut kinds = Vec::new();
    if !swappable.is_empty() {
        kinds.push(Kind::Swap);
    }
    if !inputs.postulates.is_empty() {
        kinds.push(Kind::Toggle);
    }
    if !switchable.is_empty() {
        kinds.push(Kind::Switch);
    }
    if config.allow_spec_edits && !args.is_empty() {
        kinds.push(Kind::Frame);
        kinds.push(Kind::Domain);
    }
    if kinds.is_empty() {
        return Err(Fixpoint);
    }
    let kind = kinds[rng.gen_range(0..kinds.len())];
    Ok(match kind {
        Kind::Swap => {
            let sid = swappable[rng.gen_range(0..swappable.len())];
            let pool_len = inputs.candidates[sid].len();
            let cur = state.choice.get(sid).copied().unwrap_or(0);
            let mut to = rng.gen_range(0..pool_len - 1);
            if to >= cur {
                to += 1;
            }
            MoveKind::SwapCandidate {
                sentence: sid.clone(),
                to,
            }
        }
        Kind::Toggle => {
            let p = &inputs.postulates[rng.gen_range(0..inputs.postulates.len())];
            MoveKind::TogglePostulate {
                label: p.label.clone(),
            }
        }
        Kind::Switch => {
            let aid = switchable[rng.gen_range(0..switchable.len())];
            let cur = spec_for(state, inputs, aid);
            let others: Vec<&LogicSpec> = inputs.admissible[aid]
                .iter()
                .filter(|s| **s != cur)
                .collect();
            let to = others[rng.gen_range(0..others.len())].clone();
            MoveKind::SwitchLogic {
                argument: aid.clone(),
                to,
            }
        }
        Kind::Frame => {
            let aid = args[rng.gen_range(0..args.len())];
            let condition = FrameCondition::ALL[rng.gen_range(0..FrameCondition::ALL.len())];
            MoveKind::ToggleFrameAxiom {
                argument: aid.clone(),
                condition,
            }
        }
        Kind::Domain => {
            let aid = args[rng.gen_range(0..args.len())];
            MoveKind::ToggleDomainPolicy {
                argument: aid.clone(),
            }
        }
    })
}

pub fn apply_move(state: &EngineState, inputs: &EngineInputs, mv: &MoveKind) -> EngineState {
    let mut next = state.clone();
    match mv {
        MoveKind::SwapCandidate { sentence, to } => {
            next.choice.insert(sentence.clone(), *to);
        }
        MoveKind::TogglePostulate { label } => {
            if !next.active.remove(label) {
                next.active.insert(label.clone());
            }
        }
        MoveKind::SwitchLogic { argument, to } => {
            next.specs.insert(argument.clone(), to.clone());
        }
        MoveKind::ToggleFrameAxiom {
            argument,
            condition,
        } => {
            let cur = spec_for(state, inputs, argument);
            next.specs
                .insert(argument.clone(), cur.toggle_frame(*condition));
        }
        MoveKind::ToggleDomainPolicy { argument } => {
            let cur = spec_for(state, inputs, argument);
            next.specs.insert(argument.clone(), cur.toggle_domain());
        }
    }
    next
}

/// Structural legality: constant-domain arguments must not see actualist
/// quantifiers in their formulas or the active theory.
fn state_wellformed(state: &EngineState, inputs: &EngineInputs) -> bool {
    let actualist_theory = inputs
        .postulates
        .iter()
        .filter(|p| state.active.contains(&p.label))
        .any(|p| mentions_actualist(&p.term));
    for (aid, arg) in &inputs.corpus.arguments {
        let spec = spec_for(state, inputs, aid);
        if spec.domain == DomainPolicy::Actualist {
            continue;
        }
        if actualist_theory {
            return false;
        }
        for sid in arg.premises.iter().chain([&arg.conclusion]) {
            if mentions_actualist(&candidate_term(state, inputs, sid)) {
                return false;
            }
        }
    }
    true
}

fn mentions_actualist(t: &Term) -> bool {
    t.mentions(logical::MFORALL_A) || t.mentions(logical::MEXISTS_A)
}

/// Active postulates must stay jointly consistent under every selected
/// logic (Unknown tolerated).
fn postulates_consistent(
    state: &EngineState,
    inputs: &EngineInputs,
    config: &EngineConfig,
    reasoner: &mut Reasoner,
) -> bool {
    let theory: Vec<Term> = inputs
        .postulates
        .iter()
        .filter(|p| state.active.contains(&p.label))
        .map(|p| p.term.clone())
        .collect();
    if theory.is_empty() {
        return true;
    }
    let mut specs: Vec<LogicSpec> = inputs
        .corpus
        .arguments
        .keys()
        .map(|aid| spec_for(state, inputs, aid))
        .collect();
    specs.sort();
    specs.dedup();
    for spec in specs {
        match reasoner.consistent(&theory, &spec, &inputs.sig, &config.budget) {
            Ok(v) if v.is_unsat() => return false,
            Ok(_) => {}
            Err(_) => return false,
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub iteration: u64,
    pub mv: Option<MoveKind>,
    pub temperature: f64,
    pub delta: f64,
    pub accepted: bool,
    pub objective: f64,
    pub best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    IterationBudget,
    Stagnation,
    StructuralMax,
    Fixpoint,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::IterationBudget => f.write_str("iteration-budget"),
            Termination::Stagnation => f.write_str("stagnation"),
            Termination::StructuralMax => f.write_str("structural-maximum"),
            Termination::Fixpoint => f.write_str("fixpoint"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: EngineState,
    pub final_eval: Breakdown,
    pub best_state: EngineState,
    pub best_eval: Breakdown,
    pub trace: Vec<StepRecord>,
    pub termination: Termination,
    pub iterations_run: u64,
    pub promoted: Vec<String>,
    pub reasoner_stats: crate::reasoner::ReasonerStats,
}

/// One annealing step: propose (with bounded retries for malformed or
/// inconsistent states), evaluate, accept by Metropolis rule.
#[allow(clippy::too_many_arguments)]
fn step(
    state: &EngineState,
    current: &Breakdown,
    iteration: u64,
    temperature: f64,
    inputs: &EngineInputs,
    config: &EngineConfig,
    reasoner: &mut Reasoner,
    rng: &mut ChaCha8Rng,
) -> Result<(EngineState, Breakdown, StepRecord), EngineError> {
    let mut tries = 0;
    loop {
        let mv = match propose_move(state, inputs, config, rng) {
            Ok(mv) => mv,
            Err(Fixpoint) => {
                let rec = StepRecord {
                    iteration,
                    mv: None,
                    temperature,
                    delta: 0.0,
                    accepted: false,
                    objective: current.total,
                    best: f64::NAN, // caller fills in
                };
                return Ok((state.clone(), current.clone(), rec));
            }
        };
        let next = apply_move(state, inputs, &mv);
        let legal = state_wellformed(&next, inputs)
            && postulates_consistent(&next, inputs, config, reasoner);
        if !legal {
            tries += 1;
            if tries > config.max_move_retries {
                let rec = StepRecord {
                    iteration,
                    mv: Some(mv),
                    temperature,
                    delta: 0.0,
                    accepted: false,
                    objective: current.total,
                    best: f64::NAN,
                };
                return Ok((state.clone(), current.clone(), rec));
            }
            continue;
        }
        let eval = objective(&next, inputs, config, reasoner)?;
        let delta = eval.total - current.total;
        let accepted = if eval.total == f64::NEG_INFINITY {
            false
        } else if current.total == f64::NEG_INFINITY || delta >= 0.0 {
            true
        } else {
            let p = (delta / temperature).exp();
            rng.gen::<f64>() < p
        };
        let rec = StepRecord {
            iteration,
            mv: Some(mv),
            temperature,
            delta,
            accepted,
            objective: if accepted { eval.total } else { current.total },
            best: f64::NAN,
        };
        return Ok(if accepted {
            (next, eval, rec)
        } else {
            (state.clone(), current.clone(), rec)
        });
    }
}

/// Runs the search to termination: iteration budget, stagnation window, or
/// the structural maximum (every argument passes and every intended edge is
/// realized with none spurious).
pub fn run(inputs: &EngineInputs, config: &EngineConfig) -> Result<RunOutcome, EngineError> {
    inputs.validate()?;
    config.validate()?;
    let mut reasoner = Reasoner::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut state = bootstrap(inputs);
    let mut eval = objective(&state, inputs, config, &mut reasoner)?;
    let mut best_state = state.clone();
    let mut best_eval = eval.clone();
    let mut best_finite = eval.total > f64::NEG_INFINITY;
    let mut since_improvement: u64 = 0;
    let mut trace = Vec::new();
    let mut termination = Termination::IterationBudget;
    let mut iterations_run = 0;

    if eval.structural_max {
        termination = Termination::StructuralMax;
    } else {
        let mut temperature = config.t0;
        for iteration in 0..config.iterations {
            let (next_state, next_eval, mut rec) = step(
                &state,
                &eval,
                iteration,
                temperature,
                inputs,
                config,
                &mut reasoner,
                &mut rng,
            )?;
            iterations_run = iteration + 1;
            let fixpoint = rec.mv.is_none();
            state = next_state;
            eval = next_eval;

            let improved =
                eval.total > f64::NEG_INFINITY && (!best_finite || eval.total > best_eval.total);
            if improved {
                best_state = state.clone();
                best_eval = eval.clone();
                best_finite = true;
                since_improvement = 0;
            } else {
                since_improvement += 1;
            }
            rec.best = if best_finite {
                best_eval.total
            } else {
                f64::NEG_INFINITY
            };
            trace.push(rec);

            if fixpoint {
                termination = Termination::Fixpoint;
                break;
            }
            if eval.structural_max {
                termination = Termination::StructuralMax;
                break;
            }
            if since_improvement >= config.stagnation {
                termination = Termination::Stagnation;
                break;
            }
            temperature *= config.alpha;
        }
    }

    if !best_finite {
        // nothing finite ever seen; report the bootstrap state as-is
        best_state = state.clone();
        best_eval = eval.clone();
    }

    let promoted = promote(&best_state, &best_eval, inputs, config, &mut reasoner)?;
    Ok(RunOutcome {
        final_state: state,
        final_eval: eval,
        best_state,
        best_eval,
        trace,
        termination,
        iterations_run,
        promoted,
        reasoner_stats: reasoner.stats,
    })
}

/// A postulate is promoted to settled when it is active in the best state,
/// participates in at least `promote_min_args` passing arguments (removing
/// it breaks them), and removing it lowers the objective.
fn promote(
    best_state: &EngineState,
    best_eval: &Breakdown,
    inputs: &EngineInputs,
    config: &EngineConfig,
    reasoner: &mut Reasoner,
) -> Result<Vec<String>, EngineError> {
    if best_eval.total == f64::NEG_INFINITY {
        return Ok(Vec::new());
    }
    let mut promoted = Vec::new();
    for label in &best_state.active {
        let mut without = best_state.clone();
        without.active.remove(label);
        let eval_without = objective(&without, inputs, config, reasoner)?;

        let mut participates = 0usize;
        for (aid, b) in &best_eval.per_argument {
            if b.overall == Overall::Pass {
                let after = eval_without
                    .per_argument
                    .get(aid)
                    .map(|a| a.overall)
                    .unwrap_or(Overall::Unknown);
                if after != Overall::Pass {
                    participates += 1;
                }
            }
        }
        let drop = best_eval.total - eval_without.total;
        if participates >= config.promote_min_args && drop >= config.promote_min_drop {
            promoted.push(label.clone());
        }
    }
    Ok(promoted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::ty::Ty;

    fn tiny_inputs() -> EngineInputs {
        let mut sig = Signature::new();
        for n in ["rain", "wet"] {
            sig.declare_const(n, Ty::wo()).unwrap();
        }
        let mut corpus = Corpus::default();
        corpus.sentences.insert("s1".into(), "it rains".into());
        corpus.sentences.insert("s2".into(), "it is wet".into());
        corpus.arguments.insert(
            "a1".into(),
            adequacy::CorpusArgument {
                premises: vec!["s1".into()],
                conclusion: "s2".into(),
                tag: Tag::Correct,
            },
        );
        let mut candidates = BTreeMap::new();
        candidates.insert("s1".to_string(), vec![parse("rain", &sig).unwrap()]);
        candidates.insert("s2".to_string(), vec![parse("wet", &sig).unwrap()]);
        let postulates = vec![NamedFormula::new(
            "mp1",
            Role::MeaningPostulate,
            parse("rain => wet", &sig).unwrap(),
        )];
        let mut admissible = BTreeMap::new();
        admissible.insert("a1".to_string(), vec![LogicSpec::k()]);
        EngineInputs {
            sig,
            corpus,
            network: ArgumentNetwork {
                nodes: vec![],
                intended: vec![],
            },
            candidates,
            postulates,
            initially_active: BTreeSet::new(),
            admissible,
        }
    }

    #[test]
    fn zero_iterations_returns_bootstrap_verbatim() {
        let inputs = tiny_inputs();
        let config = EngineConfig {
            iterations: 0,
            allow_spec_edits: false,
            ..Default::default()
        };
        let out = run(&inputs, &config).unwrap();
        assert_eq!(out.final_state, bootstrap(&inputs));
        assert_eq!(out.iterations_run, 0);
        assert!(out.trace.is_empty());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let inputs = tiny_inputs();
        let config = EngineConfig {
            iterations: 40,
            seed: 42,
            ..Default::default()
        };
        let a = run(&inputs, &config).unwrap();
        let b = run(&inputs, &config).unwrap();
        let fmt = |o: &RunOutcome| {
            o.trace
                .iter()
                .map(|r| {
                    format!(
                        "{}:{}:{:.6}:{}:{:.6}",
                        r.iteration,
                        r.mv.as_ref().map(|m| m.to_string()).unwrap_or_default(),
                        r.delta,
                        r.accepted,
                        r.objective
                    )
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(fmt(&a), fmt(&b));
        assert_eq!(a.final_state, b.final_state);
    }

    #[test]
    fn best_objective_is_monotone_over_trace() {
        let inputs = tiny_inputs();
        let config = EngineConfig {
            iterations: 60,
            seed: 7,
            ..Default::default()
        };
        let out = run(&inputs, &config).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for rec in &out.trace {
            assert!(rec.best >= prev);
            prev = rec.best;
        }
    }

    #[test]
    fn fixpoint_when_no_moves_exist() {
        let mut inputs = tiny_inputs();
        inputs.postulates.clear();
        let config = EngineConfig {
            iterations: 10,
            allow_spec_edits: false,
            ..Default::default()
        };
        let out = run(&inputs, &config).unwrap();
        assert_eq!(out.termination, Termination::Fixpoint);
    }

    #[test]
    fn acceptance_probability_formula() {
        // delta = -1 at T = 0.5 accepts with probability e^-2
        let p = (-1.0f64 / 0.5).exp();
        assert!((p - 0.1353352832).abs() < 1e-9);
    }

    #[test]
    fn hard_rejected_bootstrap_is_never_best() {
        // the initial candidate validates an incorrect-tagged argument, so
        // the bootstrap objective is -inf; the search walks out and only
        // finite states become best-so-far
        let mut sig = Signature::new();
        for n in ["rain", "wet"] {
            sig.declare_const(n, Ty::wo()).unwrap();
        }
        let mut corpus = Corpus::default();
        corpus.sentences.insert("s1".into(), "a".into());
        corpus.sentences.insert("s2".into(), "b".into());
        corpus.arguments.insert(
            "bad".into(),
            adequacy::CorpusArgument {
                premises: vec!["s1".into()],
                conclusion: "s2".into(),
                tag: Tag::Incorrect,
            },
        );
        let mut candidates = BTreeMap::new();
        candidates.insert(
            "s1".to_string(),
            vec![parse("wet", &sig).unwrap(), parse("rain", &sig).unwrap()],
        );
        candidates.insert("s2".to_string(), vec![parse("wet", &sig).unwrap()]);
        let mut admissible = BTreeMap::new();
        admissible.insert("bad".to_string(), vec![LogicSpec::k()]);
        let inputs = EngineInputs {
            sig,
            corpus,
            network: ArgumentNetwork {
                nodes: vec![],
                intended: vec![],
            },
            candidates,
            postulates: vec![],
            initially_active: BTreeSet::new(),
            admissible,
        };
        let config = EngineConfig {
            iterations: 60,
            seed: 11,
            allow_spec_edits: false,
            ..Default::default()
        };
        let out = run(&inputs, &config).unwrap();
        assert!(out.best_eval.total > f64::NEG_INFINITY);
        for rec in &out.trace {
            if rec.accepted {
                assert!(rec.objective > f64::NEG_INFINITY);
            }
        }
    }
}
