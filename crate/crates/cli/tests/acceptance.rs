//! Acceptance suite. Each criterion is one test that prints a PASS line;
//! run with `cargo test -p herm-cli --test acceptance -- --nocapture`.
//!
//! The prover/oracle agreement tests use an independent bitmask Kripke
//! evaluator written here, with frames enumerated exhaustively up to the
//! documented bound of 3 worlds per frame class.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use herm_cli::corpus::load;
use herm_cli::dispatch;
use herm_core::adequacy::{self, Reliable, ScoreCtx, UnknownPolicy, Weights};
use herm_core::correctness::{check_correctness, CheckOptions, Overall, TriBool};
use herm_core::engine;
use herm_core::reasoner::{replay, value::Value};
use herm_core::{
    embed_one, normalize, Budget, DomainPolicy, LogicSpec, Reasoner, Signature, Term, Ty, Verdict,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn pass(line: &str) {
    println!("[PASS] {line}");
}

// ===========================================================================
// Independent oracle: propositional modal formulas over bitmask Kripke
// models with at most three worlds.

#[derive(Debug, Clone)]
enum Pf {
    Atom(u8),
    Not(Box<Pf>),
    And(Box<Pf>, Box<Pf>),
    Or(Box<Pf>, Box<Pf>),
    Imp(Box<Pf>, Box<Pf>),
    Iff(Box<Pf>, Box<Pf>),
    Box_(Box<Pf>),
    Dia(Box<Pf>),
}

impl Pf {
    fn atoms(&self) -> u8 {
        match self {
            Pf::Atom(i) => i + 1,
            Pf::Not(a) | Pf::Box_(a) | Pf::Dia(a) => a.atoms(),
            Pf::And(a, b) | Pf::Or(a, b) | Pf::Imp(a, b) | Pf::Iff(a, b) => {
                a.atoms().max(b.atoms())
            }
        }
    }

    fn modal_depth(&self) -> u8 {
        match self {
            Pf::Atom(_) => 0,
            Pf::Not(a) => a.modal_depth(),
            Pf::And(a, b) | Pf::Or(a, b) | Pf::Imp(a, b) | Pf::Iff(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
            Pf::Box_(a) | Pf::Dia(a) => 1 + a.modal_depth(),
        }
    }
}

/// Truth mask over worlds (bit w = true at world w).
fn eval_mask(f: &Pf, succ: &[u8], vals: &[u8], full: u8) -> u8 {
    match f {
        Pf::Atom(i) => vals[*i as usize],
        Pf::Not(a) => !eval_mask(a, succ, vals, full) & full,
        Pf::And(a, b) => eval_mask(a, succ, vals, full) & eval_mask(b, succ, vals, full),
        Pf::Or(a, b) => eval_mask(a, succ, vals, full) | eval_mask(b, succ, vals, full),
        Pf::Imp(a, b) => (!eval_mask(a, succ, vals, full) & full) | eval_mask(b, succ, vals, full),
        Pf::Iff(a, b) => {
            let (x, y) = (
                eval_mask(a, succ, vals, full),
                eval_mask(b, succ, vals, full),
            );
            !(x ^ y) & full
        }
        Pf::Box_(a) => {
            let x = eval_mask(a, succ, vals, full);
            let mut out = 0u8;
            for (w, s) in succ.iter().enumerate() {
                if s & x == *s {
                    out |= 1 << w;
                }
            }
            out
        }
        Pf::Dia(a) => {
            let x = eval_mask(a, succ, vals, full);
            let mut out = 0u8;
            for (w, s) in succ.iter().enumerate() {
                if s & x != 0 {
                    out |= 1 << w;
                }
            }
            out
        }
    }
}

fn frame_ok(succ: &[u8], spec: &LogicSpec) -> bool {
    use herm_core::FrameCondition as FC;
    let n = succ.len();
    for cond in &spec.frame {
        let ok = match cond {
            FC::Reflexive => (0..n).all(|i| succ[i] & (1 << i) != 0),
            FC::Symmetric => {
                (0..n).all(|i| (0..n).all(|j| ((succ[i] >> j) & 1) == ((succ[j] >> i) & 1)))
            }
            FC::Transitive => (0..n)
                .all(|i| (0..n).all(|j| (succ[i] >> j) & 1 == 0 || succ[i] & succ[j] == succ[j])),
            FC::Euclidean => (0..n).all(|i| {
                (0..n).all(|j| {
                    (succ[i] >> j) & 1 == 0
                        || (0..n).all(|k| (succ[i] >> k) & 1 == 0 || (succ[j] >> k) & 1 == 1)
                })
            }),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Exhaustive countermodel search (global validity) over the documented
/// bound of |W| <= 3 per frame class.
fn oracle_has_countermodel(f: &Pf, spec: &LogicSpec) -> bool {
    let atoms = f.atoms().max(1) as usize;
    for n in 1..=3usize {
        let full: u8 = ((1u16 << n) - 1) as u8;
        let frames: u32 = 1 << (n * n);
        for fr in 0..frames {
            let mut succ = vec![0u8; n];
            for (i, s) in succ.iter_mut().enumerate() {
                *s = ((fr >> (i * n)) & (full as u32)) as u8;
            }
            if !frame_ok(&succ, spec) {
                continue;
            }
            let combos: u32 = 1 << (atoms * n);
            for combo in 0..combos {
                let mut vals = vec![0u8; atoms];
                for (i, v) in vals.iter_mut().enumerate() {
                    *v = ((combo >> (i * n)) & (full as u32)) as u8;
                }
                if eval_mask(f, &succ, &vals, full) != full {
                    return true;
                }
            }
        }
    }
    false
}

fn gen_pf(rng: &mut ChaCha8Rng, size: u8, modal_left: u8) -> Pf {
    if size == 0 {
        return Pf::Atom(rng.gen_range(0..4));
    }
    match rng.gen_range(0..8) {
        0 => Pf::Atom(rng.gen_range(0..4)),
        1 => Pf::Not(Box::new(gen_pf(rng, size - 1, modal_left))),
        2 => Pf::And(
            Box::new(gen_pf(rng, size / 2, modal_left)),
            Box::new(gen_pf(rng, size / 2, modal_left)),
        ),
        3 => Pf::Or(
            Box::new(gen_pf(rng, size / 2, modal_left)),
            Box::new(gen_pf(rng, size / 2, modal_left)),
        ),
        4 => Pf::Imp(
            Box::new(gen_pf(rng, size / 2, modal_left)),
            Box::new(gen_pf(rng, size / 2, modal_left)),
        ),
        5 => Pf::Iff(
            Box::new(gen_pf(rng, size / 2, modal_left)),
            Box::new(gen_pf(rng, size / 2, modal_left)),
        ),
        _ if modal_left > 0 => {
            if rng.gen_bool(0.5) {
                Pf::Box_(Box::new(gen_pf(rng, size - 1, modal_left - 1)))
            } else {
                Pf::Dia(Box::new(gen_pf(rng, size - 1, modal_left - 1)))
            }
        }
        _ => Pf::Atom(rng.gen_range(0..4)),
    }
}

fn pf_sig() -> Signature {
    let mut s = Signature::new();
    for i in 0..4 {
        s.declare_const(&format!("p{i}"), Ty::wo()).unwrap();
    }
    s
}

fn pf_to_term(f: &Pf) -> Term {
    match f {
        Pf::Atom(i) => Term::cnst(format!("p{i}"), Ty::wo()),
        Pf::Not(a) => Term::m_neg(pf_to_term(a)),
        Pf::And(a, b) => Term::m_conj(pf_to_term(a), pf_to_term(b)),
        Pf::Or(a, b) => Term::m_disj(pf_to_term(a), pf_to_term(b)),
        Pf::Imp(a, b) => Term::m_imp(pf_to_term(a), pf_to_term(b)),
        Pf::Iff(a, b) => Term::m_iff(pf_to_term(a), pf_to_term(b)),
        Pf::Box_(a) => Term::boxed(pf_to_term(a)),
        Pf::Dia(a) => Term::dia(pf_to_term(a)),
    }
}

#[test]
fn criterion_1_prover_oracle_agreement() {
    let start = Instant::now();
    let sig = pf_sig();
    let budget = Budget {
        max_worlds: 3,
        max_individuals: 1,
        max_depth: 20,
        timeout_ms: 60_000,
    };
    let mut unknowns = 0usize;
    let mut valids = 0usize;
    let mut invalids = 0usize;
    for (ci, spec) in LogicSpec::presets().into_iter().enumerate() {
        let mut reasoner = Reasoner::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + ci as u64);
        for case in 0..500 {
            let f = gen_pf(&mut rng, 10, 3);
            assert!(f.atoms() <= 6 && f.modal_depth() <= 3);
            let term = pf_to_term(&f);
            let verdict = reasoner.entails(&[], &term, &spec, &sig, &budget).unwrap();
            let counter = oracle_has_countermodel(&f, &spec);
            match &verdict {
                Verdict::Valid(proof) => {
                    valids += 1;
                    assert!(
                        !counter,
                        "{spec} case {case}: tableau Valid but oracle found a countermodel for {term}"
                    );
                    replay(proof)
                        .unwrap_or_else(|e| panic!("{spec} case {case}: proof replay failed: {e}"));
                }
                Verdict::Invalid(model) => {
                    invalids += 1;
                    assert!(
                        counter,
                        "{spec} case {case}: refuter Invalid but oracle found no countermodel for {term}"
                    );
                    // the certificate re-evaluates: the negated closure holds
                    let closed = embed_one(&term, &spec, &sig).unwrap();
                    let frame: Vec<Term> =
                        spec.frame_axioms().into_iter().map(|a| a.term).collect();
                    assert!(model.satisfies_all(&frame).unwrap());
                    assert!(model.satisfies_all(&[Term::neg(closed)]).unwrap());
                }
                Verdict::Unknown(_) => {
                    unknowns += 1;
                    // the refuter is complete up to the oracle bound
                    assert!(
                        !counter,
                        "{spec} case {case}: Unknown but a countermodel exists within |W|<=3 for {term}"
                    );
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "agreement suite took {elapsed:?}, budget is 5 minutes"
    );
    pass(&format!(
        "criterion 1: prover-oracle agreement on 2500 formulas ({valids} valid, {invalids} invalid, {unknowns} unknown) in {elapsed:?}"
    ));
}

#[test]
fn criterion_2_frame_correspondence_table() {
    let start = Instant::now();
    let sig = pf_sig();
    let budget = Budget::default();
    let p = || Term::cnst("p0", Ty::wo());
    let q = || Term::cnst("p1", Ty::wo());
    let cases: Vec<(Term, LogicSpec, bool, &str)> = vec![
        (
            Term::m_imp(Term::boxed(p()), p()),
            LogicSpec::k(),
            false,
            "box p => p in K",
        ),
        (
            Term::m_imp(Term::boxed(p()), p()),
            LogicSpec::t(),
            true,
            "box p => p in T",
        ),
        (
            Term::m_imp(p(), Term::boxed(Term::dia(p()))),
            LogicSpec::k(),
            false,
            "p => box dia p in K",
        ),
        (
            Term::m_imp(p(), Term::boxed(Term::dia(p()))),
            LogicSpec::kb(),
            true,
            "p => box dia p in KB",
        ),
        (
            Term::m_imp(Term::boxed(p()), Term::boxed(Term::boxed(p()))),
            LogicSpec::s4(),
            true,
            "box p => box box p in S4",
        ),
        (
            Term::m_imp(Term::dia(p()), Term::boxed(Term::dia(p()))),
            LogicSpec::s5(),
            true,
            "dia p => box dia p in S5",
        ),
    ];
    let mut cases = cases;
    let k_dist = |spec: LogicSpec, name: &'static str| {
        (
            Term::m_imp(
                Term::boxed(Term::m_imp(p(), q())),
                Term::m_imp(Term::boxed(p()), Term::boxed(q())),
            ),
            spec,
            true,
            name,
        )
    };
    cases.push(k_dist(LogicSpec::k(), "K-distribution in K"));
    cases.push(k_dist(LogicSpec::t(), "K-distribution in T"));
    cases.push(k_dist(LogicSpec::kb(), "K-distribution in KB"));
    cases.push(k_dist(LogicSpec::s4(), "K-distribution in S4"));
    cases.push(k_dist(LogicSpec::s5(), "K-distribution in S5"));

    let mut reasoner = Reasoner::new();
    for (term, spec, expect_valid, name) in cases {
        let v = reasoner.entails(&[], &term, &spec, &sig, &budget).unwrap();
        match (&v, expect_valid) {
            (Verdict::Valid(proof), true) => replay(proof).unwrap(),
            (Verdict::Invalid(model), false) => {
                let closed = embed_one(&term, &spec, &sig).unwrap();
                let frame: Vec<Term> = spec.frame_axioms().into_iter().map(|a| a.term).collect();
                assert!(model.satisfies_all(&frame).unwrap(), "{name}");
                assert!(model.satisfies_all(&[Term::neg(closed)]).unwrap(), "{name}");
            }
            _ => panic!("{name}: expected valid={expect_valid}, got {}", v.short()),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "frame table took {elapsed:?}");
    pass(&format!(
        "criterion 2: frame-correspondence table with replaying certificates in {elapsed:?}"
    ));
}

// ===========================================================================
// Criterion 3: embedding laws on random surface formulas with quantifiers.

fn gen_surface(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize, bound: usize) -> Term {
    if depth == 0 {
        return surface_atom(rng, sig, bound);
    }
    match rng.gen_range(0..9) {
        0 => surface_atom(rng, sig, bound),
        1 => Term::m_neg(gen_surface(rng, sig, depth - 1, bound)),
        2 => Term::m_conj(
            gen_surface(rng, sig, depth - 1, bound),
            gen_surface(rng, sig, depth - 1, bound),
        ),
        3 => Term::m_disj(
            gen_surface(rng, sig, depth - 1, bound),
            gen_surface(rng, sig, depth - 1, bound),
        ),
        4 => Term::m_imp(
            gen_surface(rng, sig, depth - 1, bound),
            gen_surface(rng, sig, depth - 1, bound),
        ),
        5 => Term::boxed(gen_surface(rng, sig, depth - 1, bound)),
        6 => Term::dia(gen_surface(rng, sig, depth - 1, bound)),
        7 => Term::m_forall("x", Ty::e(), gen_surface(rng, sig, depth - 1, bound + 1)),
        _ => Term::m_exists("x", Ty::e(), gen_surface(rng, sig, depth - 1, bound + 1)),
    }
}

fn surface_atom(rng: &mut ChaCha8Rng, _sig: &Signature, bound: usize) -> Term {
    match rng.gen_range(0..3) {
        0 => Term::cnst(format!("q{}", rng.gen_range(0..2)), Ty::wo()),
        _ => {
            let pred = Term::cnst(
                format!("f{}", rng.gen_range(0..2)),
                Ty::fun(Ty::e(), Ty::wo()),
            );
            let arg = if bound > 0 && rng.gen_bool(0.6) {
                Term::bvar(rng.gen_range(0..bound))
            } else {
                Term::cnst("c0", Ty::e())
            };
            Term::app(pred, arg)
        }
    }
}

fn random_model(
    rng: &mut ChaCha8Rng,
    consts: &BTreeMap<String, Ty>,
    w: usize,
    e: usize,
    exists_everywhere: bool,
) -> herm_core::reasoner::FiniteModel {
    use herm_core::reasoner::value::{card, value_at, Sizes};
    let sizes = Sizes::of(&[("w", w), ("e", e)]);
    let mut interp = BTreeMap::new();
    for (name, ty) in consts {
        let n = card(ty, &sizes).unwrap();
        let v = if exists_everywhere && name == "existsAt" {
            value_at(ty, &sizes, n - 1).unwrap() // all-true table
        } else {
            value_at(ty, &sizes, rng.gen_range(0..n)).unwrap()
        };
        interp.insert(name.clone(), (ty.clone(), v));
    }
    herm_core::reasoner::FiniteModel {
        sizes,
        interp,
        designated: None,
    }
}

fn truth_set(t: &Term, m: &herm_core::reasoner::FiniteModel) -> Vec<bool> {
    let v = herm_core::reasoner::eval::eval_closed(t, m).unwrap();
    match v {
        Value::Table(entries) => entries
            .into_iter()
            .map(|e| matches!(e, Value::Bool(true)))
            .collect(),
        Value::Bool(b) => vec![b],
        _ => panic!("expected a truth set"),
    }
}

fn to_actualist(t: &Term) -> Term {
    use herm_core::term::logical;
    match t {
        Term::BVar(i) => Term::bvar(*i),
        Term::Const(n, ty) => {
            let name = match n.as_str() {
                logical::MFORALL => logical::MFORALL_A,
                logical::MEXISTS => logical::MEXISTS_A,
                other => other,
            };
            Term::cnst(name, ty.clone())
        }
        Term::Lam { hint, ty, body } => Term::lam(hint.clone(), ty.clone(), to_actualist(body)),
        Term::App(f, a) => Term::app(to_actualist(f), to_actualist(a)),
    }
}

#[test]
fn criterion_3_embedding_laws() {
    let mut sig = Signature::new();
    for i in 0..2 {
        sig.declare_const(&format!("q{i}"), Ty::wo()).unwrap();
        sig.declare_const(&format!("f{i}"), Ty::fun(Ty::e(), Ty::wo()))
            .unwrap();
    }
    sig.declare_const("c0", Ty::e()).unwrap();

    let mut model_consts: BTreeMap<String, Ty> = BTreeMap::new();
    for (name, ty) in sig.constants() {
        model_consts.insert(name.clone(), ty.clone());
    }

    let k = LogicSpec::k();
    let actualist = LogicSpec::k().with_domain(DomainPolicy::Actualist);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked_pairs = 0usize;
    for case in 0..200 {
        let f = gen_surface(&mut rng, &sig, 3, 0);
        let mf = herm_core::ModalFormula::new(f.clone(), &sig).unwrap();

        // duality: box f == ~dia ~f pointwise in every sampled model
        let lhs = normalize(&herm_core::embed::expand(&Term::boxed(f.clone())));
        let rhs = normalize(&herm_core::embed::expand(&Term::m_neg(Term::dia(
            Term::m_neg(f.clone()),
        ))));
        // actualist/possibilist coincidence under everywhere-true existsAt
        let possibilist = herm_core::embed(&mf, &k).unwrap().hol;
        let actual_var = to_actualist(&f);
        let actual_mf = herm_core::ModalFormula::new(actual_var, &sig).unwrap();
        let actualized = herm_core::embed(&actual_mf, &actualist).unwrap().hol;

        for (w, e) in [(1, 1), (2, 1), (2, 2), (3, 2)] {
            for sample in 0..6 {
                let m = random_model(
                    &mut rng,
                    &model_consts,
                    w,
                    e,
                    true, // existsAt everywhere-true
                );
                assert_eq!(
                    truth_set(&lhs, &m),
                    truth_set(&rhs, &m),
                    "duality failed, case {case} sample {sample} |W|={w} |E|={e}"
                );
                assert_eq!(
                    truth_set(&possibilist, &m),
                    truth_set(&actualized, &m),
                    "actualist coincidence failed, case {case} sample {sample}"
                );
                checked_pairs += 2;
            }
        }
    }
    pass(&format!(
        "criterion 3: embedding laws held on 200 random formulas ({checked_pairs} model checks, zero violations)"
    ));
}

// ===========================================================================

#[test]
fn criterion_4_correctness_checker_suite() {
    let doc = load(&fixture("correctness12.herm")).unwrap();
    // annotations: validity, consistency, circular, circular premise,
    // idle set, overall
    type Row = (
        &'static str,
        &'static str,
        &'static str,
        TriBool,
        Option<&'static str>,
        &'static [&'static str],
        Overall,
    );
    let table: Vec<Row> = vec![
        (
            "k01_pass",
            "valid",
            "sat",
            TriBool::No,
            None,
            &[],
            Overall::Pass,
        ),
        (
            "k02_invalid",
            "invalid",
            "sat",
            TriBool::No,
            None,
            &[],
            Overall::Fail,
        ),
        (
            "k03_inconsistent",
            "valid",
            "unsat",
            TriBool::No,
            None,
            &[],
            Overall::Fail,
        ),
        (
            "k04_circular",
            "valid",
            "sat",
            TriBool::Yes,
            Some("w_q"),
            &["w_p"],
            Overall::Fail,
        ),
        (
            "k05_circular_t",
            "valid",
            "sat",
            TriBool::Yes,
            Some("w_boxq"),
            &["w_r"],
            Overall::Fail,
        ),
        (
            "k06_idle",
            "valid",
            "sat",
            TriBool::No,
            None,
            &["w_r"],
            Overall::Fail,
        ),
        (
            "k07_combo",
            "valid",
            "unsat",
            TriBool::Yes,
            Some("w_q"),
            &["w_notp", "w_p", "w_q"],
            Overall::Fail,
        ),
        (
            "k08_modal_pass",
            "valid",
            "sat",
            TriBool::No,
            None,
            &[],
            Overall::Pass,
        ),
        (
            "k09_modal_invalid",
            "invalid",
            "sat",
            TriBool::No,
            None,
            &[],
            Overall::Fail,
        ),
        (
            "k10_modal_unsat",
            "valid",
            "unsat",
            TriBool::No,
            None,
            &[],
            Overall::Fail,
        ),
        (
            "k11_unknown",
            "unknown",
            "sat",
            TriBool::Unknown,
            None,
            &[],
            Overall::Unknown,
        ),
        (
            "k12_actualist",
            "valid",
            "sat",
            TriBool::No,
            None,
            &[],
            Overall::Pass,
        ),
    ];
    assert_eq!(table.len(), 12);
    let mut reasoner = Reasoner::new();
    for (id, validity, consistency, circular, circ_premise, idle, overall) in table {
        let darg = &doc.arguments[id];
        let arg = doc.realized_argument(id).unwrap();
        let theory = doc.theory_for(darg);
        let r = check_correctness(
            &arg,
            &theory,
            CheckOptions::default(),
            &mut reasoner,
            &doc.sig,
            &doc.engine.budget,
        )
        .unwrap();
        assert_eq!(r.validity.short(), validity, "{id} validity");
        assert_eq!(r.consistency.short(), consistency, "{id} consistency");
        assert_eq!(r.circular, circular, "{id} circular");
        assert_eq!(
            r.circular_premise.as_deref(),
            circ_premise,
            "{id} circular premise"
        );
        let got_idle: Vec<&str> = r.idle_premises.iter().map(|s| s.as_str()).collect();
        assert_eq!(got_idle, idle, "{id} idle");
        assert_eq!(r.overall, overall, "{id} overall");
    }
    pass("criterion 4: 12-argument correctness suite matched every annotation");
}

#[test]
fn criterion_5_guarino_toy_against_oracle() {
    use herm_core::concept::*;
    use std::collections::BTreeSet;
    let start = Instant::now();

    // the nemo toy from the concept fixture, plus the |D|=2 iso-closed toy
    let doc = load(&fixture("concept_toy.herm")).unwrap();
    let concept = doc.concept.as_ref().unwrap();
    let k = &concept.commitment;

    let intended = intended_models(k).unwrap();
    assert_eq!(intended.len(), 2);
    // brute-force double loop: every model, direct two-clause check
    let oracle: BTreeSet<FoModel> = all_models(k)
        .unwrap()
        .into_iter()
        .filter(|m| {
            let consts_ok = k
                .constants
                .iter()
                .all(|(s, e)| m.constants.get(s) == Some(e));
            let witness = (0..k.structure.worlds.len()).any(|w| {
                k.predicates.iter().all(|(sym, rel)| {
                    m.predicates.get(sym) == Some(&k.structure.relations[rel].extensions[w])
                })
            });
            consts_ok && witness
        })
        .collect();
    assert_eq!(intended, oracle);

    let axioms: Vec<Term> = concept.axioms.iter().map(|(_, t)| t.clone()).collect();
    let fit = ontology_fit(&axioms, k).unwrap();
    assert_eq!(fit.soundness, 0.5);

    // larger carriers against the same oracle
    for d in 1..=3usize {
        for wn in 1..=3usize {
            let domain: Vec<String> = (0..d).map(|i| format!("d{i}")).collect();
            let worlds: Vec<String> = (0..wn).map(|i| format!("w{i}")).collect();
            let mut extensions = Vec::new();
            for w in 0..wn {
                let mut ext = BTreeSet::new();
                for i in 0..d {
                    if (i + w) % 2 == 0 {
                        ext.insert(vec![i]);
                    }
                }
                extensions.push(ext);
            }
            let k2 = Commitment {
                structure: IntensionalStructure {
                    domain,
                    worlds,
                    relations: BTreeMap::from([(
                        "r".to_string(),
                        IntensionalRelation {
                            arity: 1,
                            extensions,
                        },
                    )]),
                },
                constants: BTreeMap::from([("a0".to_string(), 0)]),
                predicates: BTreeMap::from([("r".to_string(), "r".to_string())]),
            };
            let direct = intended_models(&k2).unwrap();
            let oracle: BTreeSet<FoModel> = all_models(&k2)
                .unwrap()
                .into_iter()
                .filter(|m| is_intended_model(m, &k2).unwrap())
                .collect();
            assert_eq!(direct, oracle, "|D|={d} |W|={wn}");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 1, "enumeration took {elapsed:?}");
    pass(&format!(
        "criterion 5: intended models match the double-loop oracle; soundness 0.5 exact; {elapsed:?}"
    ));
}

#[test]
fn criterion_6_adequacy_scoring_recount() {
    let doc = load(&fixture("adequacy_pair.herm")).unwrap();
    let corpus = adequacy::Corpus {
        sentences: doc.sentences.clone(),
        arguments: doc
            .arguments
            .iter()
            .map(|(id, a)| {
                (
                    id.clone(),
                    adequacy::CorpusArgument {
                        premises: a.premises.clone(),
                        conclusion: a.conclusion.clone(),
                        tag: a.tag,
                    },
                )
            })
            .collect(),
    };
    let arg_specs: BTreeMap<String, LogicSpec> = doc
        .arguments
        .keys()
        .map(|id| (id.clone(), LogicSpec::k()))
        .collect();
    let budget = doc.engine.budget.clone();
    let weights = Weights::default();
    let pool = &doc.candidates["sv"];
    assert_eq!(pool.len(), 2);
    let max_pool = pool.iter().map(|t| t.symbol_count()).max().unwrap();

    let mut results = Vec::new();
    for (idx, candidate) in pool.iter().enumerate() {
        let mut fmap = adequacy::FormalizationMap::default();
        for (sid, sp) in &doc.candidates {
            let i = if sid == "sv" { idx } else { 0 };
            fmap.0.insert(sid.clone(), (sp[i].clone(), LogicSpec::k()));
        }
        let mut reasoner = Reasoner::new();
        let ctx = ScoreCtx {
            corpus: &corpus,
            fmap: &fmap,
            arg_specs: &arg_specs,
            theory: &[],
            sig: &doc.sig,
            budget: &budget,
            policy: UnknownPolicy::Charitable,
            grammar_refs: None,
        };
        let score =
            adequacy::score_sentence("sv", &ctx, max_pool, &weights, &mut reasoner).unwrap();

        // from-scratch recount over raw reasoner calls
        let mut fresh = Reasoner::with_cache(false);
        let term_of = |sid: &str| fmap.0[sid].0.clone();
        let pa_valid = fresh
            .entails(
                &[term_of("sv"), term_of("sn")],
                &term_of("sc"),
                &LogicSpec::k(),
                &doc.sig,
                &budget,
            )
            .unwrap()
            .is_valid();
        let pb_valid = fresh
            .entails(
                &[term_of("sv")],
                &term_of("sd"),
                &LogicSpec::k(),
                &doc.sig,
                &budget,
            )
            .unwrap()
            .is_valid();
        let expect_reliable = if pb_valid {
            Reliable::No
        } else {
            Reliable::Yes
        };
        let expect_amb = if pa_valid { 1.0 } else { 0.0 };
        assert_eq!(
            score.reliable, expect_reliable,
            "candidate {idx} reliability"
        );
        assert_eq!(
            score.ambitiousness, expect_amb,
            "candidate {idx} ambitiousness"
        );
        let expect_aggregate = if expect_reliable == Reliable::No {
            f64::NEG_INFINITY
        } else {
            expect_amb - 0.05 * (candidate.symbol_count() as f64 / max_pool as f64)
        };
        assert_eq!(
            score.aggregate, expect_aggregate,
            "candidate {idx} aggregate"
        );
        results.push((score.reliable, score.aggregate));
    }

    // the de-re reading validates the correct argument and survives; the
    // de-dicto reading validates the incorrect one and is hard-rejected
    assert_eq!(results[0].0, Reliable::Yes);
    assert!(results[0].1 > 0.9);
    assert_eq!(results[1].0, Reliable::No);
    assert_eq!(results[1].1, f64::NEG_INFINITY);
    pass("criterion 6: scorer equals the raw-recount; unreliable candidate scores -inf");
}

// ===========================================================================

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let code = dispatch(&argv, &mut out, &mut err);
    (code, out)
}

#[test]
fn criterion_7_engine_end_to_end() {
    let start = Instant::now();
    let planted = fixture("planted.herm");
    let planted_s = planted.display().to_string();

    let tmp = std::env::temp_dir();
    let trace1 = tmp.join("herm_acc_trace1.txt");
    let trace2 = tmp.join("herm_acc_trace2.txt");
    let out1 = tmp.join("herm_acc_out1.herm");
    let out2 = tmp.join("herm_acc_out2.herm");

    let (code1, bytes1) = run_cli(&[
        "search",
        &planted_s,
        "--seed",
        "7",
        "--iters",
        "500",
        "--trace",
        trace1.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    let (code2, bytes2) = run_cli(&[
        "search",
        &planted_s,
        "--seed",
        "7",
        "--iters",
        "500",
        "--trace",
        trace2.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert_eq!(code1, 0, "search did not reach the structural maximum");
    assert_eq!(code2, 0);
    assert_eq!(bytes1, bytes2, "two seeded runs differ");
    assert_eq!(
        std::fs::read(&trace1).unwrap(),
        std::fs::read(&trace2).unwrap(),
        "trace files differ"
    );
    assert_eq!(
        std::fs::read(&out1).unwrap(),
        std::fs::read(&out2).unwrap(),
        "output documents differ"
    );
    let text = String::from_utf8(bytes1).unwrap();
    assert!(text.contains("termination: structural-maximum"));
    assert!(text.contains("promoted postulates: mp1\n"), "{text}");

    // the updated document loads and marks the planted postulate settled
    let updated = load(&out1).unwrap();
    assert!(updated.settled.contains("mp1"));
    assert_eq!(updated.settled.len(), 1);

    // the engine-level run agrees and stays within the iteration budget
    let doc = load(&planted).unwrap();
    let mut config = doc.engine.clone();
    config.seed = 7;
    config.iterations = 500;
    let outcome = engine::run(&doc.engine_inputs(), &config).unwrap();
    assert_eq!(outcome.termination, engine::Termination::StructuralMax);
    assert!(outcome.iterations_run <= 500);
    assert_eq!(outcome.promoted, vec!["mp1".to_string()]);

    // deactivating the promoted postulate strictly lowers the objective
    let mut reasoner = Reasoner::new();
    let mut without = outcome.best_state.clone();
    without.active.remove("mp1");
    let degraded =
        engine::objective(&without, &doc.engine_inputs(), &config, &mut reasoner).unwrap();
    assert!(degraded.total < outcome.best_eval.total);

    // structural maximum re-validates on a fresh, cache-free reasoner
    let mut fresh = Reasoner::with_cache(false);
    let revalidated = engine::objective(
        &outcome.best_state,
        &doc.engine_inputs(),
        &config,
        &mut fresh,
    )
    .unwrap();
    assert!(revalidated.structural_max);

    // contradictory fixture: stagnation, with the unrealizable edge flagged
    let contradictory = fixture("contradictory.herm").display().to_string();
    let (code_c, bytes_c) = run_cli(&["search", &contradictory, "--seed", "7"]);
    let text_c = String::from_utf8(bytes_c).unwrap();
    assert_eq!(
        code_c, 1,
        "contradictory fixture must not reach the maximum"
    );
    assert!(text_c.contains("termination: stagnation"), "{text_c}");
    assert!(
        text_c.contains("c1 -support-> c2  unrealized"),
        "unrealizable edge not flagged: {text_c}"
    );

    for p in [&trace1, &trace2, &out1, &out2] {
        std::fs::remove_file(p).ok();
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "engine suite took {elapsed:?}");
    pass(&format!(
        "criterion 7: planted search hits the maximum, promotes exactly mp1, byte-identical reruns; contradictory fixture stagnates; {elapsed:?}"
    ));
}

#[test]
fn criterion_8_determinism_and_monotonicity() {
    // every recorded trace keeps a nondecreasing best-so-far objective
    for (name, seed) in [
        ("planted.herm", 7u64),
        ("contradictory.herm", 7),
        ("toy.herm", 3),
    ] {
        let doc = load(&fixture(name)).unwrap();
        let mut config = doc.engine.clone();
        config.seed = seed;
        let outcome = engine::run(&doc.engine_inputs(), &config).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for rec in &outcome.trace {
            assert!(
                rec.best >= prev,
                "{name}: best-so-far decreased at iteration {}",
                rec.iteration
            );
            prev = rec.best;
        }
    }

    // cache transparency: identical verdicts and certificates with the
    // verdict cache on and off, across the full fixture set
    let mut compared = 0usize;
    for name in [
        "toy.herm",
        "planted.herm",
        "contradictory.herm",
        "adequacy_pair.herm",
        "correctness12.herm",
    ] {
        let doc = load(&fixture(name)).unwrap();
        let mut with_cache = Reasoner::new();
        let mut without_cache = Reasoner::with_cache(false);
        for id in doc.arguments.keys() {
            let darg = &doc.arguments[id];
            let arg = doc.realized_argument(id).unwrap();
            let theory = doc.theory_for(darg);
            let a = check_correctness(
                &arg,
                &theory,
                CheckOptions::default(),
                &mut with_cache,
                &doc.sig,
                &doc.engine.budget,
            )
            .unwrap();
            // querying twice through the cached path must also agree
            let a2 = check_correctness(
                &arg,
                &theory,
                CheckOptions::default(),
                &mut with_cache,
                &doc.sig,
                &doc.engine.budget,
            )
            .unwrap();
            let b = check_correctness(
                &arg,
                &theory,
                CheckOptions::default(),
                &mut without_cache,
                &doc.sig,
                &doc.engine.budget,
            )
            .unwrap();
            for (x, y) in [(&a, &b), (&a, &a2)] {
                assert_eq!(x.validity.short(), y.validity.short(), "{name}/{id}");
                assert_eq!(
                    herm_cli::report::verdict_cert(&x.validity),
                    herm_cli::report::verdict_cert(&y.validity),
                    "{name}/{id}"
                );
                assert_eq!(x.consistency.short(), y.consistency.short(), "{name}/{id}");
                assert_eq!(
                    herm_cli::report::sat_cert(&x.consistency),
                    herm_cli::report::sat_cert(&y.consistency),
                    "{name}/{id}"
                );
                assert_eq!(x.circular, y.circular, "{name}/{id}");
                assert_eq!(x.idle_premises, y.idle_premises, "{name}/{id}");
                assert_eq!(x.overall, y.overall, "{name}/{id}");
            }
            compared += 1;
        }
        assert!(with_cache.stats.cache_hits > 0, "{name}: cache never hit");
    }
    pass(&format!(
        "criterion 8: traces monotone; cache on/off verdicts identical across {compared} argument reports"
    ));
}
