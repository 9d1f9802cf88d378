//! Countermodel search by canonical enumeration. Domain size pairs are
//! visited in nondecreasing |W|+|E| (ties by smaller |W| first) and, within a
//! size, interpretations lexicographically with constants sorted by name —
//! so the first model found is a deterministic function of the input.

use std::collections::BTreeMap;
use std::time::Instant;

use super::eval::Evaluator;
use super::model::FiniteModel;
use super::value::{card, value_at, Sizes, Value};
use crate::term::{ambient, logical, Term};
use crate::ty::Ty;

use super::Budget;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(FiniteModel),
    /// Nothing within the budget. `exhausted` is true when every size within
    /// the caps was fully enumerated (still distinct from "no model exists").
    NoneWithinBudget {
        exhausted: bool,
    },
}

/// Collects the non-logical constants of the formulas, with their types.
fn occurring_constants(formulas: &[Term]) -> BTreeMap<String, Ty> {
    let mut out = BTreeMap::new();
    fn go(t: &Term, out: &mut BTreeMap<String, Ty>) {
        match t {
            Term::BVar(_) => {}
            Term::Const(n, ty) => {
                if !logical::is_logical(n) {
                    out.insert(n.clone(), ty.clone());
                }
            }
            Term::Lam { body, .. } => go(body, out),
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
        }
    }
    for t in formulas {
        go(t, &mut out);
    }
    out
}

fn bases_of(ty: &Ty, out: &mut Vec<String>) {
    match ty {
        Ty::Base(b) => {
            if b != "o" && !out.contains(b) {
                out.push(b.clone());
            }
        }
        Ty::Fun(d, c) => {
            bases_of(d, out);
            bases_of(c, out);
        }
    }
}

/// Searches for a finite model of closed `o`-typed formulas. `designate`
/// pins `w0` to world 0 (local validity mode).
pub fn find_model(formulas: &[Term], budget: &Budget, designate: bool) -> SearchOutcome {
    let start = Instant::now();
    let consts = occurring_constants(formulas);

    // which base types matter; unmentioned bases stay at size 1
    let mut bases = Vec::new();
    for ty in consts.values() {
        bases_of(ty, &mut bases);
    }
    for f in formulas {
        collect_term_bases(f, &mut bases);
    }
    let uses_w = bases.iter().any(|b| b == "w");
    let uses_e = bases.iter().any(|b| b == "e");
    let user_bases: Vec<String> = bases
        .iter()
        .filter(|b| *b != "w" && *b != "e")
        .cloned()
        .collect();

    let mut exhausted = true;
    let mut size_pairs: Vec<(usize, usize)> = Vec::new();
    for w in 1..=budget.max_worlds.max(1) {
        for e in 1..=budget.max_individuals.max(1) {
            size_pairs.push((w, e));
        }
    }
    size_pairs.sort_by_key(|(w, e)| (w + e, *w));

    for (w_size, e_size) in size_pairs {
        if !uses_w && w_size > 1 {
            continue;
        }
        if !uses_e && e_size > 1 {
            continue;
        }
        let mut sizes = Sizes::default();
        sizes.0.insert("w".to_string(), w_size);
        sizes.0.insert("e".to_string(), e_size);
        for b in &user_bases {
            sizes.0.insert(b.clone(), 1);
        }
        match enumerate_at(formulas, &consts, &sizes, designate, budget, start) {
            EnumResult::Found(m) => return SearchOutcome::Found(m),
            EnumResult::Exhausted => {}
            EnumResult::Cut => exhausted = false,
        }
        if start.elapsed().as_millis() as u64 > budget.timeout_ms {
            return SearchOutcome::NoneWithinBudget { exhausted: false };
        }
    }
    SearchOutcome::NoneWithinBudget { exhausted }
}

fn collect_term_bases(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::BVar(_) => {}
        Term::Const(_, ty) => bases_of(ty, out),
        Term::Lam { ty, body, .. } => {
            bases_of(ty, out);
            collect_term_bases(body, out);
        }
        Term::App(f, a) => {
            collect_term_bases(f, out);
            collect_term_bases(a, out);
        }
    }
}

enum EnumResult {
    Found(FiniteModel),
    Exhausted,
    Cut,
}

fn enumerate_at(
    formulas: &[Term],
    consts: &BTreeMap<String, Ty>,
    sizes: &Sizes,
    designate: bool,
    budget: &Budget,
    start: Instant,
) -> EnumResult {
    // w0 is pinned to world 0 when designated; every model is isomorphic to
    // one with that choice, so completeness is unaffected
    let mut fixed: BTreeMap<String, (Ty, Value)> = BTreeMap::new();
    let mut varying: Vec<(String, Ty, u64)> = Vec::new();
    for (name, ty) in consts {
        if name == ambient::WORLD0 {
            fixed.insert(name.clone(), (ty.clone(), Value::Elem(0)));
            continue;
        }
        let Ok(c) = card(ty, sizes) else {
            return EnumResult::Cut;
        };
        varying.push((name.clone(), ty.clone(), c));
    }

    let total: u128 = varying.iter().map(|(_, _, c)| *c as u128).product();
    if total > 200_000_000 {
        return EnumResult::Cut;
    }

    let mut idx: Vec<u64> = vec![0; varying.len()];
    let mut counter: u64 = 0;
    loop {
        counter += 1;
        if counter % 4096 == 0 && start.elapsed().as_millis() as u64 > budget.timeout_ms {
            return EnumResult::Cut;
        }
        // build candidate interpretation
        let mut interp = fixed.clone();
        let mut ok = true;
        for (k, (name, ty, _)) in varying.iter().enumerate() {
            match value_at(ty, sizes, idx[k]) {
                Ok(v) => {
                    interp.insert(name.clone(), (ty.clone(), v));
                }
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let model = FiniteModel {
                sizes: sizes.clone(),
                interp,
                designated: if designate { Some(0) } else { None },
            };
            let mut all_true = true;
            let mut ev = Evaluator::new(&model);
            for f in formulas {
                match ev.eval(f, &mut Vec::new()) {
                    Ok(Value::Bool(true)) => {}
                    Ok(_) => {
                        all_true = false;
                        break;
                    }
                    Err(_) => return EnumResult::Cut,
                }
            }
            if all_true {
                return EnumResult::Found(model);
            }
        }

        // odometer: the last constant varies fastest, so the tuple order is
        // lexicographic in the name-sorted constant list
        let mut k = varying.len();
        loop {
            if k == 0 {
                return EnumResult::Exhausted;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < varying[k].2 {
                break;
            }
            idx[k] = 0;
        }
    }
}
