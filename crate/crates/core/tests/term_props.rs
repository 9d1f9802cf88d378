//! Term-layer properties: normalization idempotence and type preservation,
//! printer/parser round trips, alpha-canonical comparison, and the pinned
//! symbol-count / free-symbol examples.

use std::collections::HashMap;

use herm_core::{abe_eq, normalize, parse, print, ParseError, Signature, Term, Ty};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Type-directed random term generator. Constants are synthesized per type
/// and collected afterwards into a signature, so every generated term can be
/// re-parsed.
struct Gen {
    rng: StdRng,
    consts: HashMap<Ty, String>,
    next_id: usize,
}

impl Gen {
    fn new(seed: u64) -> Gen {
        Gen {
            rng: StdRng::seed_from_u64(seed),
            consts: HashMap::new(),
            next_id: 0,
        }
    }

    fn const_for(&mut self, ty: &Ty) -> Term {
        if let Some(name) = self.consts.get(ty) {
            return Term::cnst(name.clone(), ty.clone());
        }
        let name = format!("c{}", self.next_id);
        self.next_id += 1;
        self.consts.insert(ty.clone(), name.clone());
        Term::cnst(name, ty.clone())
    }

    fn small_ty(&mut self) -> Ty {
        match self.rng.gen_range(0..4) {
            0 => Ty::o(),
            1 => Ty::e(),
            2 => Ty::wo(),
            _ => Ty::fun(Ty::e(), Ty::o()),
        }
    }

    fn term(&mut self, ty: &Ty, ctx: &mut Vec<Ty>, fuel: usize) -> Term {
        // reuse a bound variable of the right type sometimes
        if fuel == 0 || self.rng.gen_bool(0.25) {
            let hits: Vec<usize> = ctx
                .iter()
                .rev()
                .enumerate()
                .filter(|(_, t)| *t == ty)
                .map(|(i, _)| i)
                .collect();
            if !hits.is_empty() && self.rng.gen_bool(0.7) {
                let k = hits[self.rng.gen_range(0..hits.len())];
                return Term::bvar(k);
            }
            return self.atom(ty, ctx, fuel);
        }
        match self.rng.gen_range(0..10) {
            0..=2 => self.atom(ty, ctx, fuel),
            3..=4 => {
                // application at a random argument type
                let arg_ty = self.small_ty();
                let f = self.term(&Ty::fun(arg_ty.clone(), ty.clone()), ctx, fuel - 1);
                let a = self.term(&arg_ty, ctx, fuel - 1);
                Term::app(f, a)
            }
            _ => self.atom(ty, ctx, fuel),
        }
    }

    fn atom(&mut self, ty: &Ty, ctx: &mut Vec<Ty>, fuel: usize) -> Term {
        match ty {
            Ty::Fun(d, c) => {
                if fuel == 0 {
                    self.const_for(ty)
                } else {
                    ctx.push((**d).clone());
                    let body = self.term(c, ctx, fuel - 1);
                    ctx.pop();
                    Term::lam("x", (**d).clone(), body)
                }
            }
            Ty::Base(b) if b == "o" && fuel > 0 => match self.rng.gen_range(0..6) {
                0 => Term::neg(self.term(&Ty::o(), ctx, fuel - 1)),
                1 => Term::conj(
                    self.term(&Ty::o(), ctx, fuel - 1),
                    self.term(&Ty::o(), ctx, fuel - 1),
                ),
                2 => Term::imp(
                    self.term(&Ty::o(), ctx, fuel - 1),
                    self.term(&Ty::o(), ctx, fuel - 1),
                ),
                3 => Term::forall("y", Ty::e(), {
                    ctx.push(Ty::e());
                    let b = self.term(&Ty::o(), ctx, fuel - 1);
                    ctx.pop();
                    b
                }),
                _ => self.const_for(ty),
            },
            _ => self.const_for(ty),
        }
    }

    fn surface(&mut self, fuel: usize) -> Term {
        let wo = Ty::wo();
        if fuel == 0 {
            return self.const_for(&wo);
        }
        match self.rng.gen_range(0..8) {
            0 => Term::m_neg(self.surface(fuel - 1)),
            1 => Term::m_conj(self.surface(fuel - 1), self.surface(fuel - 1)),
            2 => Term::m_disj(self.surface(fuel - 1), self.surface(fuel - 1)),
            3 => Term::m_imp(self.surface(fuel - 1), self.surface(fuel - 1)),
            4 => Term::boxed(self.surface(fuel - 1)),
            5 => Term::dia(self.surface(fuel - 1)),
            6 => {
                let pred = self.const_for(&Ty::fun(Ty::e(), Ty::wo()));
                let arg = self.const_for(&Ty::e());
                Term::app(pred, arg)
            }
            _ => self.const_for(&wo),
        }
    }

    fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (ty, name) in &self.consts {
            sig.declare_const(name, ty.clone()).unwrap();
        }
        sig
    }
}

#[test]
fn normalize_is_idempotent_on_200_random_terms() {
    for seed in 0..200u64 {
        let mut g = Gen::new(seed);
        let ty = g.small_ty();
        let t = g.term(&ty.clone(), &mut Vec::new(), 5);
        let once = normalize(&t);
        let twice = normalize(&once);
        assert_eq!(once, twice, "seed {seed}: {t}");
    }
}

#[test]
fn normalization_preserves_types() {
    for seed in 200..320u64 {
        let mut g = Gen::new(seed);
        let ty = g.small_ty();
        let t = g.term(&ty.clone(), &mut Vec::new(), 5);
        assert_eq!(t.ty().unwrap(), normalize(&t).ty().unwrap(), "seed {seed}");
    }
}

#[test]
fn print_parse_round_trip() {
    for seed in 0..150u64 {
        let mut g = Gen::new(seed);
        let ty = if seed % 2 == 0 { Ty::o() } else { Ty::wo() };
        let t = if seed % 2 == 0 {
            g.term(&ty, &mut Vec::new(), 4)
        } else {
            g.surface(4)
        };
        let sig = g.signature();
        let printed = print::to_string(&t);
        let back = parse(&printed, &sig)
            .unwrap_or_else(|e| panic!("seed {seed}: `{printed}` failed to parse: {e}"));
        assert!(
            abe_eq(&t, &back),
            "seed {seed}: `{printed}` round-tripped to `{back}`"
        );
    }
}

#[test]
fn canonical_comparison_is_an_equivalence() {
    for seed in 0..60u64 {
        let mut g = Gen::new(seed + 999);
        let t = g.surface(4);
        // reflexivity and hint-independence
        assert_eq!(t, t.clone());
        let renamed = rename_hints(&t);
        assert_eq!(t, renamed);
        assert_eq!(print::canonical(&t), print::canonical(&renamed));

        let u = g.surface(4);
        let v = g.surface(4);
        // symmetry / transitivity over the comparison
        if t == u {
            assert_eq!(u, t);
        }
        if t == u && u == v {
            assert_eq!(t, v);
        }
    }
}

fn rename_hints(t: &Term) -> Term {
    match t {
        Term::BVar(i) => Term::bvar(*i),
        Term::Const(n, ty) => Term::cnst(n.clone(), ty.clone()),
        Term::Lam { ty, body, .. } => Term::lam("zz", ty.clone(), rename_hints(body)),
        Term::App(f, a) => Term::app(rename_hints(f), rename_hints(a)),
    }
}

fn fixture_sig() -> Signature {
    let mut sig = Signature::new();
    sig.declare_const("p", Ty::wo()).unwrap();
    sig.declare_const("q", Ty::wo()).unwrap();
    sig.declare_const("fish", Ty::fun(Ty::e(), Ty::wo()))
        .unwrap();
    sig.declare_const("vertebrate", Ty::fun(Ty::e(), Ty::wo()))
        .unwrap();
    sig.declare_const("nemo", Ty::e()).unwrap();
    sig
}

#[test]
fn symbol_count_examples() {
    let sig = fixture_sig();
    assert_eq!(parse("p", &sig).unwrap().symbol_count(), 0);
    assert_eq!(
        parse("! [X:e]: (fish @ X => box (vertebrate @ X))", &sig)
            .unwrap()
            .symbol_count(),
        3
    );
    assert_eq!(parse("~(p & q)", &sig).unwrap().symbol_count(), 2);
}

#[test]
fn free_symbol_examples() {
    let sig = fixture_sig();
    let t = parse("fish @ nemo", &sig).unwrap();
    let syms: Vec<String> = t.free_symbols().into_iter().collect();
    assert_eq!(syms, vec!["fish".to_string(), "nemo".to_string()]);

    let id = Term::lam("x", Ty::e(), Term::bvar(0));
    assert!(id.free_symbols().is_empty());

    let t = parse("box (p => q)", &sig).unwrap();
    let syms: Vec<String> = t.free_symbols().into_iter().collect();
    assert_eq!(syms, vec!["p".to_string(), "q".to_string()]);
}

#[test]
fn parse_examples_and_errors() {
    let sig = fixture_sig();

    // the pinned modal-surface example
    let t = parse("! [X:e]: (fish @ X => box (vertebrate @ X))", &sig).unwrap();
    assert!(t.ty().unwrap().is_wo());

    // lifted propositional contradiction
    let t = parse("p & ~p", &sig).unwrap();
    assert!(t.ty().unwrap().is_wo());

    // ill-typed application reports a span
    match parse("fish @ fish", &sig) {
        Err(ParseError::TypeMismatch { span, .. }) => assert_eq!(span.line, 1),
        other => panic!("expected type mismatch, got {other:?}"),
    }

    match parse("unknown_pred @ nemo", &sig) {
        Err(ParseError::UnknownConstant { name, .. }) => assert_eq!(name, "unknown_pred"),
        other => panic!("expected unknown constant, got {other:?}"),
    }

    match parse("p &&& q", &sig) {
        Err(ParseError::Syntax { .. }) | Err(ParseError::Lexical { .. }) => {}
        other => panic!("expected syntax/lexical error, got {other:?}"),
    }

    // comments are skipped
    let t = parse("p % trailing note\n & q", &sig).unwrap();
    assert_eq!(print::to_string(&t), "p & q");
}
