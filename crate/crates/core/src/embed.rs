//! Shallow embedding of the modal surface language into HOL truth sets.
//!
//! A surface formula of type `w > o` is compiled by replacing each modal
//! connective with its defining lambda term and beta-eta-normalizing:
//! `box p` becomes `^ [W:w]: ! [V:w]: rel @ W @ V => p @ V`, diamonds are the
//! existential dual, possibilist quantifiers push the world argument through,
//! and actualist quantifiers guard the body with `existsAt`.

use crate::formula::NamedFormula;
use crate::logic::{DomainPolicy, LogicSpec, ValidityMode};
use crate::normalize::normalize;
use crate::print;
use crate::signature::Signature;
use crate::term::{ambient, logical, Term};
use crate::ty::Ty;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("term is not a surface formula: {0}")]
    NotSurface(String),
    #[error("actualist quantifier used under constant-domain policy")]
    ActualistUnderConstantDomain,
    #[error("type error: {0}")]
    Type(#[from] crate::term::TypeError),
}

/// A validated modal-surface formula: type `w > o`, built from surface
/// connectives and predicates of shape `e > ... > e > (w > o)` (or `w > o`),
/// with no world-typed variables or constants of its own.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModalFormula(Term);

impl ModalFormula {
    pub fn new(term: Term, _sig: &Signature) -> Result<ModalFormula, EmbedError> {
        let ty = term.ty()?;
        if !ty.is_wo() {
            return Err(EmbedError::NotSurface(format!(
                "expected type `w > o`, got `{ty}`"
            )));
        }
        check_surface(&term)?;
        Ok(ModalFormula(term))
    }

    pub fn term(&self) -> &Term {
        &self.0
    }

    pub fn into_term(self) -> Term {
        self.0
    }
}

fn check_surface(t: &Term) -> Result<(), EmbedError> {
    match t {
        Term::BVar(_) => Ok(()),
        Term::Const(name, ty) => {
            if logical::is_logical(name) {
                return Ok(());
            }
            if name == ambient::ACCESS || name == ambient::WORLD0 {
                return Err(EmbedError::NotSurface(format!(
                    "`{name}` may not appear in a surface formula"
                )));
            }
            // signature constants: predicates of surface shape, or arguments
            // of base type other than w/o
            let ok = ty.is_surface_predicate()
                || matches!(ty, Ty::Base(b) if b != "w" && b != "o")
                || ty.is_o(); // world-independent atoms are allowed as rigid facts
            if ok {
                Ok(())
            } else {
                Err(EmbedError::NotSurface(format!(
                    "constant `{name}` of type `{ty}` is not usable on the modal surface"
                )))
            }
        }
        Term::Lam { ty, body, .. } => {
            if ty.is_w() {
                return Err(EmbedError::NotSurface(
                    "raw world binders are not surface syntax".into(),
                ));
            }
            check_surface(body)
        }
        Term::App(f, a) => {
            check_surface(f)?;
            check_surface(a)
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    /// The compiled truth set of type `w > o`.
    pub hol: Term,
    /// Frame conditions of the spec as HOL formulas.
    pub frame_theory: Vec<NamedFormula>,
    /// Constants the embedding relies on: always the accessibility relation,
    /// `existsAt` under the actualist policy, `w0` under local validity.
    pub aux: Vec<(String, Ty)>,
}

/// Compiles a surface formula under the given logic.
pub fn embed(f: &ModalFormula, spec: &LogicSpec) -> Result<EmbeddingResult, EmbedError> {
    if spec.domain == DomainPolicy::Constant
        && (f.term().mentions(logical::MFORALL_A) || f.term().mentions(logical::MEXISTS_A))
    {
        return Err(EmbedError::ActualistUnderConstantDomain);
    }
    let expanded = normalize(&expand(f.term()));
    let mut aux = vec![(
        ambient::ACCESS.to_string(),
        Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())),
    )];
    if spec.domain == DomainPolicy::Actualist {
        aux.push((
            ambient::EXISTS_AT.to_string(),
            Ty::fun(Ty::e(), Ty::fun(Ty::w(), Ty::o())),
        ));
    }
    if spec.mode == ValidityMode::Local {
        aux.push((ambient::WORLD0.to_string(), Ty::w()));
    }
    Ok(EmbeddingResult {
        hol: expanded,
        frame_theory: spec.frame_axioms(),
        aux,
    })
}

/// Replaces every modal-surface constant by its defining lambda term. The
/// caller normalizes afterwards.
pub fn expand(t: &Term) -> Term {
    match t {
        Term::BVar(_) => t.clone(),
        Term::Const(name, ty) => expand_const(name, ty),
        Term::Lam { hint, ty, body } => Term::lam(hint.clone(), ty.clone(), expand(body)),
        Term::App(f, a) => Term::app(expand(f), expand(a)),
    }
}

fn rel_at(w: usize, v: usize) -> Term {
    let rel = Term::cnst(ambient::ACCESS, Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())));
    Term::app2(rel, Term::bvar(w), Term::bvar(v))
}

fn expand_const(name: &str, ty: &Ty) -> Term {
    let wo = Ty::wo();
    match name {
        // ^ [A:w>o, W:w]: ~(A @ W)
        logical::MNOT => Term::lam(
            "a",
            wo.clone(),
            Term::lam(
                "w",
                Ty::w(),
                Term::neg(Term::app(Term::bvar(1), Term::bvar(0))),
            ),
        ),
        logical::MAND | logical::MOR | logical::MIMPLIES | logical::MIFF => {
            let o_name = match name {
                logical::MAND => logical::AND,
                logical::MOR => logical::OR,
                logical::MIMPLIES => logical::IMPLIES,
                _ => logical::IFF,
            };
            let o_ty = Ty::fun(Ty::o(), Ty::fun(Ty::o(), Ty::o()));
            // ^ [A:w>o, B:w>o, W:w]: (A @ W) <op> (B @ W)
            Term::lam(
                "a",
                wo.clone(),
                Term::lam(
                    "b",
                    wo.clone(),
                    Term::lam(
                        "w",
                        Ty::w(),
                        Term::app2(
                            Term::cnst(o_name, o_ty),
                            Term::app(Term::bvar(2), Term::bvar(0)),
                            Term::app(Term::bvar(1), Term::bvar(0)),
                        ),
                    ),
                ),
            )
        }
        // ^ [A:w>o, W:w]: ! [V:w]: rel @ W @ V => A @ V
        logical::BOX => Term::lam(
            "a",
            wo.clone(),
            Term::lam(
                "w",
                Ty::w(),
                Term::forall(
                    "v",
                    Ty::w(),
                    Term::imp(rel_at(1, 0), Term::app(Term::bvar(2), Term::bvar(0))),
                ),
            ),
        ),
        // ^ [A:w>o, W:w]: ? [V:w]: rel @ W @ V & A @ V
        logical::DIA => Term::lam(
            "a",
            wo.clone(),
            Term::lam(
                "w",
                Ty::w(),
                Term::exists(
                    "v",
                    Ty::w(),
                    Term::conj(rel_at(1, 0), Term::app(Term::bvar(2), Term::bvar(0))),
                ),
            ),
        ),
        // ^ [P:t>w>o, W:w]: ! [X:t]: P @ X @ W   (dually for ?)
        logical::MFORALL | logical::MEXISTS => {
            let elem_ty = quantified_ty(ty);
            let pty = Ty::fun(elem_ty.clone(), wo.clone());
            let body = Term::app2(Term::bvar(2), Term::bvar(0), Term::bvar(1));
            let inner = if name == logical::MFORALL {
                Term::forall("x", elem_ty, body)
            } else {
                Term::exists("x", elem_ty, body)
            };
            Term::lam("p", pty, Term::lam("w", Ty::w(), inner))
        }
        // ^ [P:e>w>o, W:w]: ! [X:e]: existsAt @ X @ W => P @ X @ W
        logical::MFORALL_A | logical::MEXISTS_A => {
            let pty = Ty::fun(Ty::e(), wo.clone());
            let exists_at = Term::cnst(
                ambient::EXISTS_AT,
                Ty::fun(Ty::e(), Ty::fun(Ty::w(), Ty::o())),
            );
            let guard = Term::app2(exists_at, Term::bvar(0), Term::bvar(1));
            let applied = Term::app2(Term::bvar(2), Term::bvar(0), Term::bvar(1));
            let inner = if name == logical::MFORALL_A {
                Term::forall("x", Ty::e(), Term::imp(guard, applied))
            } else {
                Term::exists("x", Ty::e(), Term::conj(guard, applied))
            };
            Term::lam("p", pty, Term::lam("w", Ty::w(), inner))
        }
        _ => Term::cnst(name, ty.clone()),
    }
}

/// The element type a surface quantifier constant ranges over, read off its
/// instantiated type `(t > w > o) > w > o`.
fn quantified_ty(ty: &Ty) -> Ty {
    if let Ty::Fun(p, _) = ty {
        if let Ty::Fun(elem, _) = p.as_ref() {
            return (**elem).clone();
        }
    }
    Ty::e()
}

/// Closes a truth set over worlds. Global validity quantifies over all
/// worlds, local validity applies the designated world. World-independent
/// (`o`-typed) formulas pass through unchanged.
pub fn validize(t: &Term, mode: ValidityMode) -> Result<Term, EmbedError> {
    let ty = t.ty()?;
    if ty.is_o() {
        return Ok(t.clone());
    }
    if !ty.is_wo() {
        return Err(EmbedError::NotSurface(format!(
            "cannot validize a term of type `{ty}`"
        )));
    }
    let closed = match mode {
        ValidityMode::Global => {
            let qty = Ty::fun(Ty::fun(Ty::w(), Ty::o()), Ty::o());
            Term::app(Term::cnst(logical::FORALL, qty), t.clone())
        }
        ValidityMode::Local => Term::app(t.clone(), Term::cnst(ambient::WORLD0, Ty::w())),
    };
    Ok(drop_vacuous_quantifiers(&normalize(&closed)))
}

/// `! [X:t]: body` collapses to `body` when the binder is unused; sound and
/// keeps trivial validizations readable.
fn drop_vacuous_quantifiers(t: &Term) -> Term {
    match t {
        Term::App(f, a) => {
            if let (Term::Const(name, _), Term::Lam { body, .. }) = (f.as_ref(), a.as_ref()) {
                if (name == logical::FORALL || name == logical::EXISTS) && !body.contains_bvar(0) {
                    return drop_vacuous_quantifiers(&body.shift(-1, 0));
                }
            }
            Term::app(drop_vacuous_quantifiers(f), drop_vacuous_quantifiers(a))
        }
        Term::Lam { hint, ty, body } => {
            Term::lam(hint.clone(), ty.clone(), drop_vacuous_quantifiers(body))
        }
        _ => t.clone(),
    }
}

/// Embeds and validizes a batch of formulas under one spec, appending the
/// frame theory; this is the exact formula set the model finder searches.
pub fn embed_set(
    formulas: &[Term],
    spec: &LogicSpec,
    sig: &Signature,
) -> Result<Vec<Term>, EmbedError> {
    let mut out = Vec::new();
    for t in formulas {
        out.push(embed_one(t, spec, sig)?);
    }
    for ax in spec.frame_axioms() {
        out.push(ax.term);
    }
    Ok(out)
}

/// Embeds a single formula (surface `w > o` or world-independent `o`) and
/// closes it under the spec's validity mode.
pub fn embed_one(t: &Term, spec: &LogicSpec, sig: &Signature) -> Result<Term, EmbedError> {
    let ty = t.ty()?;
    if ty.is_o() {
        // world-independent; modal constants may still occur under a validize
        if spec.domain == DomainPolicy::Constant
            && (t.mentions(logical::MFORALL_A) || t.mentions(logical::MEXISTS_A))
        {
            return Err(EmbedError::ActualistUnderConstantDomain);
        }
        return Ok(normalize(&expand(t)));
    }
    let mf = ModalFormula::new(t.clone(), sig)?;
    let emb = embed(&mf, spec)?;
    validize(&emb.hol, spec.mode)
}

/// Renders an embedding for display (the `embed` CLI subcommand).
pub fn render(result: &EmbeddingResult) -> String {
    print::to_string(&result.hol)
}
