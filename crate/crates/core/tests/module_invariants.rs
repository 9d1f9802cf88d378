//! Spec-level invariants that sit across modules: evaluator ground truths,
//! argument-network properties, adequacy monotonicities, and correctness
//! report consistency.

use std::collections::BTreeMap;

use herm_core::adequacy::{
    self, Corpus, CorpusArgument, FormalizationMap, Reliable, ScoreCtx, Tag, UnknownPolicy,
};
use herm_core::argnet::{
    realized_relations, role_fulfillment, ArgumentNetwork, Polarity, RelationCert,
};
use herm_core::correctness::{check_correctness, Argument, CheckOptions, Overall};
use herm_core::formula::{NamedFormula, Role};
use herm_core::reasoner::eval::eval_closed;
use herm_core::reasoner::model::FiniteModel;
use herm_core::reasoner::value::{Sizes, Value};
use herm_core::reasoner::{find_model, replay, SearchOutcome};
use herm_core::{embed_one, parse, Budget, LogicSpec, Reasoner, Signature, Term, Ty};

fn sig() -> Signature {
    let mut s = Signature::new();
    for n in ["p", "q", "r_atom", "s_atom"] {
        s.declare_const(n, Ty::wo()).unwrap();
    }
    s
}

fn t(src: &str, s: &Signature) -> Term {
    parse(src, s).unwrap()
}

// -- evaluator ground truths ------------------------------------------------

/// One dead-end world: box p is vacuously true there even with p false.
#[test]
fn eval_box_vacuous_on_dead_end_world() {
    let s = sig();
    let spec = LogicSpec::k();
    let boxed = embed_one(&t("box p", &s), &spec, &s).unwrap(); // ! [W:w]: ...
    let mut interp = BTreeMap::new();
    interp.insert(
        "rel".to_string(),
        (
            Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())),
            Value::Table(vec![Value::Table(vec![Value::Bool(false)])]),
        ),
    );
    interp.insert(
        "p".to_string(),
        (Ty::wo(), Value::Table(vec![Value::Bool(false)])),
    );
    let m = FiniteModel {
        sizes: Sizes::of(&[("w", 1), ("e", 1)]),
        interp,
        designated: None,
    };
    assert_eq!(eval_closed(&boxed, &m).unwrap(), Value::Bool(true));
}

#[test]
fn eval_trivial_truths() {
    let s = sig();
    let spec = LogicSpec::k();
    let m = FiniteModel {
        sizes: Sizes::of(&[("w", 2), ("e", 2)]),
        interp: BTreeMap::from([
            (
                "p".to_string(),
                (
                    Ty::wo(),
                    Value::Table(vec![Value::Bool(false), Value::Bool(true)]),
                ),
            ),
            (
                "rel".to_string(),
                (
                    Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())),
                    Value::Table(vec![
                        Value::Table(vec![Value::Bool(false), Value::Bool(false)]),
                        Value::Table(vec![Value::Bool(false), Value::Bool(false)]),
                    ]),
                ),
            ),
        ]),
        designated: None,
    };
    // disjunction with truth is true, world-independently and lifted
    let top = t("$true | $false", &s);
    assert_eq!(eval_closed(&top, &m).unwrap(), Value::Bool(true));
    let tt = embed_one(&t("p | ~p", &s), &spec, &s).unwrap();
    assert_eq!(eval_closed(&tt, &m).unwrap(), Value::Bool(true));

    // identity is true outright
    let ident = t("! [X:e]: (X = X)", &s);
    assert_eq!(eval_closed(&ident, &m).unwrap(), Value::Bool(true));
}

/// K-distribution has no countermodel within the budget in any preset:
/// tableau and bounded model search agree.
#[test]
fn k_distribution_bounded_model_check() {
    let s = sig();
    let dist = t("box (p => q) => (box p => box q)", &s);
    for spec in LogicSpec::presets() {
        let mut r = Reasoner::new();
        let v = r
            .entails(&[], &dist, &spec, &s, &Budget::default())
            .unwrap();
        assert!(v.is_valid(), "{spec}");
        // refuter side: the negated closure admits no model within bounds
        let closed = embed_one(&dist, &spec, &s).unwrap();
        let mut formulas: Vec<Term> = spec.frame_axioms().into_iter().map(|a| a.term).collect();
        formulas.push(Term::neg(closed));
        match find_model(&formulas, &Budget::default(), false) {
            SearchOutcome::NoneWithinBudget { exhausted } => assert!(exhausted),
            SearchOutcome::Found(m) => panic!("countermodel found in {spec}: {m}"),
        }
    }
}

// -- argument network properties ---------------------------------------------

fn arg(id: &str, premises: &[(&str, &str)], conclusion: &str, s: &Signature) -> Argument {
    Argument {
        id: id.into(),
        premises: premises
            .iter()
            .map(|(l, f)| NamedFormula::new(*l, Role::Premise, t(f, s)))
            .collect(),
        conclusion: NamedFormula::new(format!("{id}_c"), Role::Conclusion, t(conclusion, s)),
        spec: LogicSpec::k(),
        theory_labels: vec![],
    }
}

#[test]
fn rebut_implies_undermine_when_premises_are_live() {
    let s = sig();
    let budget = Budget::default();
    let attacker = arg("att", &[("x1", "~p")], "~p", &s);
    let target = arg("tgt", &[("y1", "p"), ("y2", "q")], "p & q", &s);
    let mut r = Reasoner::new();
    let rels = realized_relations(&attacker, &target, &[], &mut r, &s, &budget).unwrap();
    let has_rebut = rels
        .iter()
        .any(|x| x.mechanism == herm_core::argnet::Mechanism::Rebut);
    let has_undermine = rels
        .iter()
        .any(|x| x.mechanism == herm_core::argnet::Mechanism::Undermine);
    assert!(has_rebut);
    assert!(
        has_undermine,
        "rebuttal of a satisfiable premise set must undermine"
    );

    // every certificate replays or re-evaluates
    for rel in &rels {
        match &rel.cert {
            RelationCert::Entailment(herm_core::Verdict::Valid(proof)) => replay(proof).unwrap(),
            RelationCert::Inconsistency(herm_core::SatVerdict::Unsat(proof)) => {
                replay(proof).unwrap()
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }
}

#[test]
fn role_fulfillment_is_invariant_under_relabeling() {
    let s = sig();
    let budget = Budget::default();
    let build = |a: &str, b: &str| {
        let mut args = BTreeMap::new();
        args.insert(a.to_string(), {
            let mut x = arg(a, &[("m1", "p"), ("m2", "p => q")], "q", &s);
            x.id = a.to_string();
            x
        });
        args.insert(b.to_string(), {
            let mut x = arg(b, &[("n1", "~q"), ("n2", "s_atom")], "~q & s_atom", &s);
            x.id = b.to_string();
            x
        });
        let net = ArgumentNetwork {
            nodes: vec![a.to_string(), b.to_string()],
            intended: vec![(b.to_string(), a.to_string(), Polarity::Attack)],
        };
        let mut r = Reasoner::new();
        role_fulfillment(&net, &args, &[], 0.5, &mut r, &s, &budget).unwrap()
    };
    let r1 = build("alpha", "beta");
    let r2 = build("left", "right");
    assert_eq!(r1.score, r2.score);
    assert_eq!(r1.spurious.len(), r2.spurious.len());
    assert_eq!(
        r1.intended[0].mechanisms, r2.intended[0].mechanisms,
        "mechanism sets must match across relabelings"
    );
}

#[test]
fn empty_network_scores_one_and_flags_vacuity() {
    let s = sig();
    let net = ArgumentNetwork {
        nodes: vec![],
        intended: vec![],
    };
    let mut r = Reasoner::new();
    let report = role_fulfillment(
        &net,
        &BTreeMap::new(),
        &[],
        0.5,
        &mut r,
        &s,
        &Budget::default(),
    )
    .unwrap();
    assert_eq!(report.score, 1.0);
    assert!(report.vacuous);
}

#[test]
fn spurious_edges_penalize_per_formula() {
    // 2 of 2 intended realized plus 1 spurious at lambda 0.5 scores 0.75
    let realized = 2.0_f64;
    let spurious = 1.0_f64;
    let lambda = 0.5_f64;
    let score = (realized - lambda * spurious).max(0.0) / 2.0;
    assert_eq!(score, 0.75);
}

// -- adequacy monotonicities --------------------------------------------------

#[test]
fn reliability_is_antitone_in_corpus_growth() {
    let s = sig();
    let spec = LogicSpec::k();
    let mut corpus = Corpus::default();
    corpus.sentences.insert("s1".into(), "p".into());
    corpus.sentences.insert("s2".into(), "q".into());
    let mut fmap = FormalizationMap::default();
    fmap.0.insert("s1".into(), (t("p", &s), spec.clone()));
    fmap.0.insert("s2".into(), (t("p | q", &s), spec.clone()));
    let budget = Budget::default();

    let mut arg_specs = BTreeMap::new();
    let score = |corpus: &Corpus, arg_specs: &BTreeMap<String, LogicSpec>| {
        let ctx = ScoreCtx {
            corpus,
            fmap: &fmap,
            arg_specs,
            theory: &[],
            sig: &s,
            budget: &budget,
            policy: UnknownPolicy::Charitable,
            grammar_refs: None,
        };
        adequacy::reliability("s1", &ctx, &mut Reasoner::new()).unwrap()
    };
    assert_eq!(score(&corpus, &arg_specs), Reliable::Yes);

    // adding an incorrect-tagged argument that the map validates flips to No
    corpus.arguments.insert(
        "bad".into(),
        CorpusArgument {
            premises: vec!["s1".into()],
            conclusion: "s2".into(),
            tag: Tag::Incorrect,
        },
    );
    arg_specs.insert("bad".to_string(), spec.clone());
    assert_eq!(score(&corpus, &arg_specs), Reliable::No);

    // and adding yet another argument can never flip it back
    corpus.arguments.insert(
        "harmless".into(),
        CorpusArgument {
            premises: vec!["s2".into()],
            conclusion: "s1".into(),
            tag: Tag::Incorrect,
        },
    );
    arg_specs.insert("harmless".to_string(), spec);
    assert_eq!(score(&corpus, &arg_specs), Reliable::No);
}

// -- correctness report consistency -------------------------------------------

#[test]
fn removing_a_non_idle_premise_breaks_validity() {
    let s = sig();
    let budget = Budget::default();
    let a = arg("a", &[("p1", "p"), ("p2", "p => q")], "q", &s);
    let mut r = Reasoner::new();
    let report = check_correctness(&a, &[], CheckOptions::default(), &mut r, &s, &budget).unwrap();
    assert_eq!(report.overall, Overall::Pass);
    for skip in 0..a.premises.len() {
        let premises: Vec<Term> = a
            .premises
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, p)| p.term.clone())
            .collect();
        let v = r
            .entails(&premises, &a.conclusion.term, &a.spec, &s, &budget)
            .unwrap();
        assert!(
            !v.is_valid(),
            "premise {skip} was idle in a passing argument"
        );
    }
}

#[test]
fn adding_postulates_never_downgrades_validity() {
    let s = sig();
    let budget = Budget::default();
    let a = arg("a", &[("p1", "p"), ("p2", "p => q")], "q", &s);
    let mut r = Reasoner::new();
    let plain = check_correctness(&a, &[], CheckOptions::default(), &mut r, &s, &budget).unwrap();
    assert!(plain.validity.is_valid());
    let theory = vec![NamedFormula::new(
        "mp",
        Role::MeaningPostulate,
        t("q => r_atom", &s),
    )];
    let with =
        check_correctness(&a, &theory, CheckOptions::default(), &mut r, &s, &budget).unwrap();
    assert!(
        with.validity.is_valid(),
        "valid must stay valid under growth"
    );
}
