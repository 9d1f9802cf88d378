//! Labeled tableau for the ground modal fragment: propositional connectives,
//! box/dia under the frame conditions of a logic spec, and quantifiers over
//! individuals handled by bounded ground instantiation (the problem's
//! `e`-constants plus at most two fresh witnesses).
//!
//! The tableau only ever certifies unsatisfiability (a closed tree). Open or
//! capped runs report back so the caller can fall through to the model
//! finder. Closed trees are replayable: `replay` re-derives every step with
//! an independent bookkeeping pass.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use crate::logic::FrameCondition;
use crate::print;
use crate::term::{ambient, logical, Term};
use crate::ty::Ty;
use thiserror::Error;

/// Raised when an input formula falls outside the decidable fragment.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragmentError {
    #[error("equality is outside the tableau fragment")]
    Equality,
    #[error("quantification over `{0}` is outside the tableau fragment")]
    QuantifierType(Ty),
    #[error("formula shape outside the tableau fragment: {0}")]
    Shape(String),
}

/// Negation normal form over ground-able atoms.
#[derive(Debug, PartialEq, Eq)]
pub enum NForm {
    Top,
    Bot,
    Lit {
        pos: bool,
        atom: Term,
        rigid: bool,
    },
    And(Rc<NForm>, Rc<NForm>),
    Or(Rc<NForm>, Rc<NForm>),
    Box(Rc<NForm>),
    Dia(Rc<NForm>),
    /// Universal over individuals; atoms underneath use de Bruijn index 0
    /// for the bound variable.
    All(Rc<NForm>),
    Ex(Rc<NForm>),
}

impl NForm {
    pub fn key(&self) -> String {
        match self {
            NForm::Top => "$true".into(),
            NForm::Bot => "$false".into(),
            NForm::Lit { pos, atom, .. } => {
                let body = print::canonical(atom);
                if *pos {
                    body
                } else {
                    format!("~{body}")
                }
            }
            NForm::And(a, b) => format!("({} & {})", a.key(), b.key()),
            NForm::Or(a, b) => format!("({} | {})", a.key(), b.key()),
            NForm::Box(a) => format!("box {}", a.key()),
            NForm::Dia(a) => format!("dia {}", a.key()),
            NForm::All(a) => format!("all.{}", a.key()),
            NForm::Ex(a) => format!("ex.{}", a.key()),
        }
    }

    /// Instantiates de Bruijn index `depth` with a constant.
    fn inst(&self, depth: usize, c: &Term) -> Rc<NForm> {
        Rc::new(match self {
            NForm::Top => NForm::Top,
            NForm::Bot => NForm::Bot,
            NForm::Lit { pos, atom, rigid } => NForm::Lit {
                pos: *pos,
                atom: atom.subst(depth, c).shift(-1, depth),
                rigid: *rigid,
            },
            NForm::And(a, b) => NForm::And(a.inst(depth, c), b.inst(depth, c)),
            NForm::Or(a, b) => NForm::Or(a.inst(depth, c), b.inst(depth, c)),
            NForm::Box(a) => NForm::Box(a.inst(depth, c)),
            NForm::Dia(a) => NForm::Dia(a.inst(depth, c)),
            NForm::All(a) => NForm::All(a.inst(depth + 1, c)),
            NForm::Ex(a) => NForm::Ex(a.inst(depth + 1, c)),
        })
    }
}

impl fmt::Display for NForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Converts a formula (surface `w > o`, or world-independent `o`) to NNF.
/// `positive = false` negates on the way down.
pub fn to_nnf(t: &Term, positive: bool) -> Result<Rc<NForm>, FragmentError> {
    let (head, args) = t.spine();
    if let Term::Const(name, cty) = head {
        match (name.as_str(), args.len()) {
            (logical::TRUE, 0) => {
                return Ok(Rc::new(if positive { NForm::Top } else { NForm::Bot }))
            }
            (logical::FALSE, 0) => {
                return Ok(Rc::new(if positive { NForm::Bot } else { NForm::Top }))
            }
            (logical::NOT | logical::MNOT, 1) => return to_nnf(args[0], !positive),
            (logical::AND | logical::MAND, 2) => {
                let a = to_nnf(args[0], positive)?;
                let b = to_nnf(args[1], positive)?;
                return Ok(Rc::new(if positive {
                    NForm::And(a, b)
                } else {
                    NForm::Or(a, b)
                }));
            }
            (logical::OR | logical::MOR, 2) => {
                let a = to_nnf(args[0], positive)?;
                let b = to_nnf(args[1], positive)?;
                return Ok(Rc::new(if positive {
                    NForm::Or(a, b)
                } else {
                    NForm::And(a, b)
                }));
            }
            (logical::IMPLIES | logical::MIMPLIES, 2) => {
                return Ok(Rc::new(if positive {
                    NForm::Or(to_nnf(args[0], false)?, to_nnf(args[1], true)?)
                } else {
                    // ~(a => b) = a & ~b
                    NForm::And(to_nnf(args[0], true)?, to_nnf(args[1], false)?)
                }));
            }
            (logical::IFF | logical::MIFF, 2) => {
                let (l, r) = (args[0], args[1]);
                let pp = (to_nnf(l, true)?, to_nnf(r, true)?);
                let nn = (to_nnf(l, false)?, to_nnf(r, false)?);
                return Ok(Rc::new(if positive {
                    // (l=>r) & (r=>l)
                    NForm::And(
                        Rc::new(NForm::Or(nn.0.clone(), pp.1.clone())),
                        Rc::new(NForm::Or(nn.1, pp.0.clone())),
                    )
                } else {
                    // (l|r) & (~l|~r)
                    NForm::And(
                        Rc::new(NForm::Or(pp.0, pp.1)),
                        Rc::new(NForm::Or(nn.0, nn.1)),
                    )
                }));
            }
            (logical::BOX, 1) => {
                let b = to_nnf(args[0], positive)?;
                return Ok(Rc::new(if positive {
                    NForm::Box(b)
                } else {
                    NForm::Dia(b)
                }));
            }
            (logical::DIA, 1) => {
                let b = to_nnf(args[0], positive)?;
                return Ok(Rc::new(if positive {
                    NForm::Dia(b)
                } else {
                    NForm::Box(b)
                }));
            }
            (logical::EQ, 2) => return Err(FragmentError::Equality),
            (logical::FORALL | logical::EXISTS | logical::MFORALL | logical::MEXISTS, 1) => {
                let elem_ty: Ty = match cty {
                    Ty::Fun(p, _) => match p.as_ref() {
                        Ty::Fun(elem, _) => (**elem).clone(),
                        _ => return Err(FragmentError::Shape(t.to_string())),
                    },
                    _ => return Err(FragmentError::Shape(t.to_string())),
                };
                if elem_ty != Ty::e() {
                    return Err(FragmentError::QuantifierType(elem_ty));
                }
                let body = quant_body(args[0])?;
                let inner = to_nnf(&body, positive)?;
                let universal = matches!(name.as_str(), logical::FORALL | logical::MFORALL);
                return Ok(Rc::new(match (universal, positive) {
                    (true, true) | (false, false) => NForm::All(inner),
                    _ => NForm::Ex(inner),
                }));
            }
            (logical::MFORALL_A | logical::MEXISTS_A, 1) => {
                let body = quant_body(args[0])?;
                let inner = to_nnf(&body, positive)?;
                let guard_atom = exists_at_atom();
                let universal = name == logical::MFORALL_A;
                // !A: all x. existsAt(x) => body ; ?A: ex x. existsAt(x) & body
                return Ok(Rc::new(match (universal, positive) {
                    (true, true) | (false, false) => NForm::All(Rc::new(NForm::Or(
                        Rc::new(NForm::Lit {
                            pos: false,
                            atom: guard_atom,
                            rigid: false,
                        }),
                        inner,
                    ))),
                    _ => NForm::Ex(Rc::new(NForm::And(
                        Rc::new(NForm::Lit {
                            pos: true,
                            atom: guard_atom,
                            rigid: false,
                        }),
                        inner,
                    ))),
                }));
            }
            _ => {}
        }
    }
    atom_nnf(t, positive)
}

/// `existsAt @ <bound 0>` as an atom template.
fn exists_at_atom() -> Term {
    Term::app(
        Term::cnst(
            ambient::EXISTS_AT,
            Ty::fun(Ty::e(), Ty::fun(Ty::w(), Ty::o())),
        ),
        Term::bvar(0),
    )
}

fn quant_body(arg: &Term) -> Result<Term, FragmentError> {
    match arg {
        Term::Lam { body, .. } => Ok((**body).clone()),
        // eta-contracted predicate argument
        other => Ok(Term::app(other.shift(1, 0), Term::bvar(0))),
    }
}

fn atom_nnf(t: &Term, positive: bool) -> Result<Rc<NForm>, FragmentError> {
    let (head, args) = t.spine();
    let rigid = match head {
        Term::Const(name, ty) => {
            if logical::is_logical(name) {
                return Err(FragmentError::Shape(t.to_string()));
            }
            if name == ambient::ACCESS || name == ambient::WORLD0 {
                return Err(FragmentError::Shape(t.to_string()));
            }
            // peel one arrow per argument; atoms are rigid (`o`) or truth
            // sets (`w > o`) after application
            let mut rem = ty;
            for _ in &args {
                match rem {
                    Ty::Fun(_, c) => rem = c,
                    _ => return Err(FragmentError::Shape(t.to_string())),
                }
            }
            if rem.is_o() {
                true
            } else if rem.is_wo() {
                false
            } else {
                return Err(FragmentError::Shape(t.to_string()));
            }
        }
        _ => return Err(FragmentError::Shape(t.to_string())),
    };
    for a in args {
        check_ground_arg(a)?;
    }
    Ok(Rc::new(NForm::Lit {
        pos: positive,
        atom: t.clone(),
        rigid,
    }))
}

fn check_ground_arg(t: &Term) -> Result<(), FragmentError> {
    match t {
        Term::BVar(_) => Ok(()),
        Term::Const(name, ty) => {
            let ok =
                !logical::is_logical(name) && matches!(ty, Ty::Base(b) if b != "o" && b != "w");
            if ok {
                Ok(())
            } else {
                Err(FragmentError::Shape(t.to_string()))
            }
        }
        Term::App(f, a) => {
            check_ground_arg(f).or_else(|_| match f.as_ref() {
                Term::Const(n, _) if !logical::is_logical(n) => Ok(()),
                _ => Err(FragmentError::Shape(t.to_string())),
            })?;
            check_ground_arg(a)
        }
        Term::Lam { .. } => Err(FragmentError::Shape(t.to_string())),
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableauCaps {
    pub max_world_depth: usize,
    pub max_worlds: usize,
    pub max_steps: usize,
    pub max_fresh: usize,
}

impl Default for TableauCaps {
    fn default() -> Self {
        TableauCaps {
            max_world_depth: 16,
            max_worlds: 64,
            max_steps: 100_000,
            max_fresh: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncompleteReason {
    DepthCap,
    WorldCap,
    StepCap,
    WitnessCap,
    Blocked,
}

#[derive(Debug)]
pub enum TableauOutcome {
    /// Every branch closed: the input set is unsatisfiable.
    Closed(TableauProof),
    /// Saturated without closure and without hitting any cap.
    Open,
    /// Gave up on some branch.
    Incomplete(IncompleteReason),
}

#[derive(Debug, Clone)]
pub enum ProofStep {
    /// A formula asserted at world creation (input or global premise).
    Assert {
        world: u32,
        formula: Rc<NForm>,
    },
    Alpha {
        world: u32,
        from: Rc<NForm>,
    },
    BoxProp {
        from_world: u32,
        to_world: u32,
        body: Rc<NForm>,
    },
    DiaWitness {
        world: u32,
        new_world: u32,
        body: Rc<NForm>,
    },
    Gamma {
        world: u32,
        from: Rc<NForm>,
        constant: String,
    },
    Delta {
        world: u32,
        from: Rc<NForm>,
        witness: String,
    },
}

#[derive(Debug, Clone)]
pub struct ProofTree {
    pub steps: Vec<ProofStep>,
    pub tail: ProofTail,
}

#[derive(Debug, Clone)]
pub enum ProofTail {
    /// Contradiction: `atom` holds with both signs at `world` (or `$false`).
    Closed { world: Option<u32>, atom: String },
    Split {
        world: u32,
        on: Rc<NForm>,
        left: Box<ProofTree>,
        right: Box<ProofTree>,
    },
}

#[derive(Debug, Clone)]
pub struct TableauProof {
    pub frame: BTreeSet<FrameCondition>,
    pub globals: Vec<Rc<NForm>>,
    pub locals: Vec<Rc<NForm>>,
    pub pool: Vec<Term>,
    pub tree: ProofTree,
}

impl TableauProof {
    /// Short stable id for reports.
    pub fn id(&self) -> String {
        let mut s = String::new();
        for g in &self.globals {
            s.push_str(&g.key());
            s.push(';');
        }
        for l in &self.locals {
            s.push_str(&l.key());
            s.push(';');
        }
        s.push_str(&format!("{:?}", self.frame));
        format!("tab-{:012x}", fnv1a(s.as_bytes()) & 0xffff_ffff_ffff)
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

pub struct TableauInput {
    pub globals: Vec<Rc<NForm>>,
    pub locals: Vec<Rc<NForm>>,
    pub frame: BTreeSet<FrameCondition>,
    /// Ground individual constants available to the gamma rule.
    pub pool: Vec<Term>,
    pub caps: TableauCaps,
}

#[derive(Clone)]
struct Branch {
    worlds: u32,
    depth: Vec<usize>,
    parent: Vec<Option<u32>>,
    /// Which dia-key created each world, for ancestor blocking.
    created_by: Vec<Option<String>>,
    edges: BTreeSet<(u32, u32)>,
    lits: BTreeMap<(Option<u32>, String), bool>,
    boxes: Vec<Vec<Rc<NForm>>>,
    galls: Vec<Vec<Rc<NForm>>>,
    dias_done: BTreeSet<(u32, String)>,
    processed: BTreeSet<(u32, String)>,
    queue: VecDeque<(u32, Rc<NForm>)>,
    pool: Vec<Term>,
    fresh_used: usize,
    incomplete: Option<IncompleteReason>,
    closed: Option<(Option<u32>, String)>,
}

pub fn prove(input: &TableauInput) -> TableauOutcome {
    let mut branch = Branch {
        worlds: 0,
        depth: Vec::new(),
        parent: Vec::new(),
        created_by: Vec::new(),
        edges: BTreeSet::new(),
        lits: BTreeMap::new(),
        boxes: Vec::new(),
        galls: Vec::new(),
        dias_done: BTreeSet::new(),
        processed: BTreeSet::new(),
        queue: VecDeque::new(),
        pool: input.pool.clone(),
        fresh_used: 0,
        incomplete: None,
        closed: None,
    };
    let mut steps = Vec::new();
    let mut ctx = Ctx {
        input,
        steps_used: 0,
    };
    ctx.create_world(&mut branch, None, None, &mut steps);
    for f in &input.locals {
        branch.queue.push_back((0, f.clone()));
        steps.push(ProofStep::Assert {
            world: 0,
            formula: f.clone(),
        });
    }
    match ctx.run(branch, &mut steps) {
        RunResult::Closed(tree) => TableauOutcome::Closed(TableauProof {
            frame: input.frame.clone(),
            globals: input.globals.clone(),
            locals: input.locals.clone(),
            pool: input.pool.clone(),
            tree,
        }),
        RunResult::Open => TableauOutcome::Open,
        RunResult::Incomplete(r) => TableauOutcome::Incomplete(r),
    }
}

enum RunResult {
    Closed(ProofTree),
    Open,
    Incomplete(IncompleteReason),
}

struct Ctx<'a> {
    input: &'a TableauInput,
    steps_used: usize,
}

impl<'a> Ctx<'a> {
    fn create_world(
        &mut self,
        b: &mut Branch,
        parent: Option<u32>,
        created_by: Option<String>,
        steps: &mut Vec<ProofStep>,
    ) -> u32 {
        let id = b.worlds;
        b.worlds += 1;
        b.depth
            .push(parent.map(|p| b.depth[p as usize] + 1).unwrap_or(0));
        b.parent.push(parent);
        b.created_by.push(created_by);
        b.boxes.push(Vec::new());
        b.galls.push(Vec::new());
        if self.input.frame.contains(&FrameCondition::Reflexive) {
            self.insert_edge(b, id, id, steps);
        }
        for g in &self.input.globals {
            b.queue.push_back((id, g.clone()));
            steps.push(ProofStep::Assert {
                world: id,
                formula: g.clone(),
            });
        }
        id
    }

    /// Adds an edge and closes under the frame conditions, propagating boxes
    /// along every new edge.
    fn insert_edge(&mut self, b: &mut Branch, u: u32, v: u32, steps: &mut Vec<ProofStep>) {
        let mut pending = vec![(u, v)];
        while let Some((x, y)) = pending.pop() {
            if !b.edges.insert((x, y)) {
                continue;
            }
            for body in b.boxes[x as usize].clone() {
                b.queue.push_back((y, body.clone()));
                steps.push(ProofStep::BoxProp {
                    from_world: x,
                    to_world: y,
                    body,
                });
            }
            if self.input.frame.contains(&FrameCondition::Symmetric) {
                pending.push((y, x));
            }
            if self.input.frame.contains(&FrameCondition::Transitive) {
                for &(p, q) in b.edges.clone().iter() {
                    if q == x {
                        pending.push((p, y));
                    }
                    if p == y {
                        pending.push((x, q));
                    }
                }
            }
            if self.input.frame.contains(&FrameCondition::Euclidean) {
                for &(p, q) in b.edges.clone().iter() {
                    if p == x {
                        pending.push((q, y));
                        pending.push((y, q));
                    }
                }
            }
        }
    }

    fn run(&mut self, mut b: Branch, steps: &mut Vec<ProofStep>) -> RunResult {
        loop {
            if let Some((world, atom)) = b.closed.clone() {
                return RunResult::Closed(ProofTree {
                    steps: std::mem::take(steps),
                    tail: ProofTail::Closed { world, atom },
                });
            }
            self.steps_used += 1;
            if self.steps_used > self.input.caps.max_steps {
                return RunResult::Incomplete(IncompleteReason::StepCap);
            }
            let Some((w, f)) = b.queue.pop_front() else {
                return match b.incomplete {
                    Some(r) => RunResult::Incomplete(r),
                    None => RunResult::Open,
                };
            };
            let pkey = (w, f.key());
            if b.processed.contains(&(pkey.0, pkey.1.clone())) {
                continue;
            }
            b.processed.insert(pkey);

            match f.as_ref() {
                NForm::Top => {}
                NForm::Bot => {
                    b.closed = Some((Some(w), "$false".to_string()));
                }
                NForm::Lit { pos, atom, rigid } => {
                    let world_key = if *rigid { None } else { Some(w) };
                    let akey = print::canonical(atom);
                    match b.lits.get(&(world_key, akey.clone())) {
                        Some(prev) if *prev != *pos => {
                            b.closed = Some((world_key, akey));
                        }
                        _ => {
                            b.lits.insert((world_key, akey), *pos);
                        }
                    }
                }
                NForm::And(x, y) => {
                    steps.push(ProofStep::Alpha {
                        world: w,
                        from: f.clone(),
                    });
                    b.queue.push_back((w, x.clone()));
                    b.queue.push_back((w, y.clone()));
                }
                NForm::Or(x, y) => {
                    let mut left = b.clone();
                    left.queue.push_front((w, x.clone()));
                    let mut left_steps = Vec::new();
                    let lres = self.run(left, &mut left_steps);
                    let ltree = match lres {
                        RunResult::Closed(t) => t,
                        other => return other,
                    };
                    let mut right = b;
                    right.queue.push_front((w, y.clone()));
                    let mut right_steps = Vec::new();
                    let rres = self.run(right, &mut right_steps);
                    let rtree = match rres {
                        RunResult::Closed(t) => t,
                        other => return other,
                    };
                    return RunResult::Closed(ProofTree {
                        steps: std::mem::take(steps),
                        tail: ProofTail::Split {
                            world: w,
                            on: f.clone(),
                            left: Box::new(ltree),
                            right: Box::new(rtree),
                        },
                    });
                }
                NForm::Box(body) => {
                    b.boxes[w as usize].push(body.clone());
                    let targets: Vec<u32> = b
                        .edges
                        .iter()
                        .filter(|(x, _)| *x == w)
                        .map(|(_, y)| *y)
                        .collect();
                    for v in targets {
                        b.queue.push_back((v, body.clone()));
                        steps.push(ProofStep::BoxProp {
                            from_world: w,
                            to_world: v,
                            body: body.clone(),
                        });
                    }
                }
                NForm::Dia(body) => {
                    let dkey = body.key();
                    if b.dias_done.contains(&(w, dkey.clone())) {
                        continue;
                    }
                    b.dias_done.insert((w, dkey.clone()));
                    if b.depth[w as usize] + 1 > self.input.caps.max_world_depth {
                        b.incomplete = Some(IncompleteReason::DepthCap);
                        continue;
                    }
                    if b.worlds as usize >= self.input.caps.max_worlds {
                        b.incomplete = Some(IncompleteReason::WorldCap);
                        continue;
                    }
                    if self.blocked(&b, w, &dkey) {
                        b.incomplete = Some(IncompleteReason::Blocked);
                        continue;
                    }
                    let v = self.create_world(&mut b, Some(w), Some(dkey), steps);
                    steps.push(ProofStep::DiaWitness {
                        world: w,
                        new_world: v,
                        body: body.clone(),
                    });
                    b.queue.push_back((v, body.clone()));
                    self.insert_edge(&mut b, w, v, steps);
                }
                NForm::All(body) => {
                    b.galls[w as usize].push(body.clone());
                    if b.pool.is_empty() {
                        // domains are non-empty: seed one witness and refire
                        // every registered universal with it
                        if !self.add_witness(&mut b) {
                            b.incomplete = Some(IncompleteReason::WitnessCap);
                            continue;
                        }
                        let c = b.pool.last().unwrap().clone();
                        self.refire_galls(&mut b, &c, steps);
                        continue;
                    }
                    for c in b.pool.clone() {
                        let inst = body.inst(0, &c);
                        steps.push(ProofStep::Gamma {
                            world: w,
                            from: f.clone(),
                            constant: print::canonical(&c),
                        });
                        b.queue.push_back((w, inst));
                    }
                }
                NForm::Ex(body) => {
                    if !self.add_witness(&mut b) {
                        b.incomplete = Some(IncompleteReason::WitnessCap);
                        continue;
                    }
                    let c = b.pool.last().unwrap().clone();
                    let inst = body.inst(0, &c);
                    steps.push(ProofStep::Delta {
                        world: w,
                        from: f.clone(),
                        witness: print::canonical(&c),
                    });
                    b.queue.push_back((w, inst));
                    self.refire_galls(&mut b, &c, steps);
                }
            }
        }
    }

    fn add_witness(&mut self, b: &mut Branch) -> bool {
        if b.fresh_used >= self.input.caps.max_fresh {
            return false;
        }
        b.fresh_used += 1;
        let name = format!("h#{}", b.fresh_used);
        let c = Term::cnst(name, Ty::e());
        b.pool.push(c);
        true
    }

    fn refire_galls(&mut self, b: &mut Branch, c: &Term, steps: &mut Vec<ProofStep>) {
        for w in 0..b.worlds {
            for body in b.galls[w as usize].clone() {
                let inst = body.inst(0, c);
                steps.push(ProofStep::Gamma {
                    world: w,
                    from: Rc::new(NForm::All(body.clone())),
                    constant: print::canonical(c),
                });
                b.queue.push_back((w, inst));
            }
        }
    }

    /// Ancestor loop check under transitive frames: skip a successor whose
    /// creating demand and box context repeat along the creation chain.
    fn blocked(&self, b: &Branch, w: u32, dkey: &str) -> bool {
        if !self.input.frame.contains(&FrameCondition::Transitive) {
            return false;
        }
        let my_boxes: BTreeSet<String> = b.boxes[w as usize].iter().map(|f| f.key()).collect();
        let mut cur = b.parent[w as usize];
        while let Some(u) = cur {
            if b.dias_done.contains(&(u, dkey.to_string())) {
                let their: BTreeSet<String> = b.boxes[u as usize].iter().map(|f| f.key()).collect();
                if their == my_boxes {
                    return true;
                }
            }
            cur = b.parent[u as usize];
        }
        false
    }
}

// ---------------------------------------------------------------------------
// Replay

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("step {0} uses an underived premise")]
    UnderivedPremise(usize),
    #[error("step {0} propagates a box along a missing edge")]
    MissingEdge(usize),
    #[error("step {0}: gamma constant not in pool")]
    UnknownConstant(usize),
    #[error("branch does not end in a genuine contradiction on `{0}`")]
    BogusClosure(String),
    #[error("global assertion not among recorded globals")]
    BogusGlobal,
}

struct ReplayState {
    derived: BTreeSet<(u32, String)>,
    lits: BTreeMap<(Option<u32>, String), BTreeSet<bool>>,
    edges: BTreeSet<(u32, u32)>,
    worlds: u32,
    pool: Vec<Term>,
    step_no: usize,
}

impl Clone for ReplayState {
    fn clone(&self) -> Self {
        ReplayState {
            derived: self.derived.clone(),
            lits: self.lits.clone(),
            edges: self.edges.clone(),
            worlds: self.worlds,
            pool: self.pool.clone(),
            step_no: self.step_no,
        }
    }
}

/// Re-checks a closed tableau step by step. Every rule application must cite
/// a derived premise, every box propagation a derivable edge, and every leaf
/// must exhibit an explicit contradiction.
pub fn replay(proof: &TableauProof) -> Result<(), ReplayError> {
    let mut st = ReplayState {
        derived: BTreeSet::new(),
        lits: BTreeMap::new(),
        edges: BTreeSet::new(),
        worlds: 1,
        pool: proof.pool.clone(),
        step_no: 0,
    };
    if proof.frame.contains(&FrameCondition::Reflexive) {
        st.edges.insert((0, 0));
    }
    replay_tree(proof, &proof.tree, st).map(|_| ())
}

fn note(st: &mut ReplayState, world: u32, f: &NForm) {
    st.derived.insert((world, f.key()));
    if let NForm::Lit { pos, atom, rigid } = f {
        let wk = if *rigid { None } else { Some(world) };
        st.lits
            .entry((wk, print::canonical(atom)))
            .or_default()
            .insert(*pos);
    }
    if let NForm::Bot = f {
        st.lits
            .entry((Some(world), "$false".into()))
            .or_default()
            .extend([true, false]);
    }
}

fn close_frame(st: &mut ReplayState, frame: &BTreeSet<FrameCondition>) {
    loop {
        let mut added = Vec::new();
        for &(x, y) in &st.edges {
            if frame.contains(&FrameCondition::Symmetric) && !st.edges.contains(&(y, x)) {
                added.push((y, x));
            }
            for &(p, q) in &st.edges {
                if frame.contains(&FrameCondition::Transitive)
                    && q == x
                    && !st.edges.contains(&(p, y))
                {
                    added.push((p, y));
                }
                if frame.contains(&FrameCondition::Euclidean)
                    && p == x
                    && !st.edges.contains(&(y, q))
                {
                    added.push((y, q));
                }
            }
        }
        if added.is_empty() {
            break;
        }
        st.edges.extend(added);
    }
}

fn replay_tree(
    proof: &TableauProof,
    tree: &ProofTree,
    mut st: ReplayState,
) -> Result<ReplayState, ReplayError> {
    for step in &tree.steps {
        st.step_no += 1;
        let n = st.step_no;
        match step {
            ProofStep::Assert { world, formula } => {
                let known = proof
                    .globals
                    .iter()
                    .any(|g| Rc::ptr_eq(g, formula) || g.key() == formula.key())
                    || (*world == 0 && proof.locals.iter().any(|l| l.key() == formula.key()));
                if !known {
                    return Err(ReplayError::BogusGlobal);
                }
                st.worlds = st.worlds.max(*world + 1);
                note(&mut st, *world, formula);
            }
            ProofStep::Alpha { world, from } => {
                if !st.derived.contains(&(*world, from.key())) {
                    return Err(ReplayError::UnderivedPremise(n));
                }
                if let NForm::And(a, b) = from.as_ref() {
                    note(&mut st, *world, a);
                    note(&mut st, *world, b);
                } else {
                    return Err(ReplayError::UnderivedPremise(n));
                }
            }
            ProofStep::BoxProp {
                from_world,
                to_world,
                body,
            } => {
                let boxed = NForm::Box(body.clone());
                if !st.derived.contains(&(*from_world, boxed.key())) {
                    return Err(ReplayError::UnderivedPremise(n));
                }
                close_frame(&mut st, &proof.frame);
                if !st.edges.contains(&(*from_world, *to_world)) {
                    return Err(ReplayError::MissingEdge(n));
                }
                note(&mut st, *to_world, body);
            }
            ProofStep::DiaWitness {
                world,
                new_world,
                body,
            } => {
                let dia = NForm::Dia(body.clone());
                if !st.derived.contains(&(*world, dia.key())) {
                    return Err(ReplayError::UnderivedPremise(n));
                }
                st.worlds = st.worlds.max(*new_world + 1);
                st.edges.insert((*world, *new_world));
                if proof.frame.contains(&FrameCondition::Reflexive) {
                    st.edges.insert((*new_world, *new_world));
                }
                close_frame(&mut st, &proof.frame);
                note(&mut st, *new_world, body);
            }
            ProofStep::Gamma {
                world,
                from,
                constant,
            } => {
                if !st.derived.contains(&(*world, from.key())) {
                    return Err(ReplayError::UnderivedPremise(n));
                }
                let c = st
                    .pool
                    .iter()
                    .find(|t| print::canonical(t) == *constant)
                    .cloned()
                    .ok_or(ReplayError::UnknownConstant(n))?;
                if let NForm::All(body) = from.as_ref() {
                    let inst = body.inst(0, &c);
                    note(&mut st, *world, &inst);
                } else {
                    return Err(ReplayError::UnderivedPremise(n));
                }
            }
            ProofStep::Delta {
                world,
                from,
                witness,
            } => {
                if !st.derived.contains(&(*world, from.key())) {
                    return Err(ReplayError::UnderivedPremise(n));
                }
                let c = Term::cnst(witness.clone(), Ty::e());
                st.pool.push(c.clone());
                if let NForm::Ex(body) = from.as_ref() {
                    let inst = body.inst(0, &c);
                    note(&mut st, *world, &inst);
                } else {
                    return Err(ReplayError::UnderivedPremise(n));
                }
            }
        }
    }
    match &tree.tail {
        ProofTail::Closed { world, atom } => {
            let signs = st
                .lits
                .get(&(*world, atom.clone()))
                .cloned()
                .unwrap_or_default();
            if signs.contains(&true) && signs.contains(&false) {
                Ok(st)
            } else {
                Err(ReplayError::BogusClosure(atom.clone()))
            }
        }
        ProofTail::Split {
            world,
            on,
            left,
            right,
        } => {
            if !st.derived.contains(&(*world, on.key())) {
                return Err(ReplayError::UnderivedPremise(st.step_no));
            }
            if let NForm::Or(a, b) = on.as_ref() {
                let mut lst = st.clone();
                note(&mut lst, *world, a);
                replay_tree(proof, left, lst)?;
                let mut rst = st;
                note(&mut rst, *world, b);
                replay_tree(proof, right, rst)
            } else {
                Err(ReplayError::UnderivedPremise(st.step_no))
            }
        }
    }
}
