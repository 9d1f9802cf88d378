//! Lambda terms in de Bruijn form.
//!
//! Binder hints are kept for printing only: equality and hashing ignore them,
//! so structural comparison is alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::ty::Ty;
use thiserror::Error;

/// Reserved names of the logical constants. Everything else in a term is a
/// signature constant.
pub mod logical {
    // classical connectives at type o
    pub const NOT: &str = "not";
    pub const AND: &str = "and";
    pub const OR: &str = "or";
    pub const IMPLIES: &str = "implies";
    pub const IFF: &str = "iff";
    pub const TRUE: &str = "true";
    pub const FALSE: &str = "false";
    pub const EQ: &str = "eq";
    pub const FORALL: &str = "forall";
    pub const EXISTS: &str = "exists";
    // modal-surface connectives at type w > o
    pub const MNOT: &str = "mnot";
    pub const MAND: &str = "mand";
    pub const MOR: &str = "mor";
    pub const MIMPLIES: &str = "mimplies";
    pub const MIFF: &str = "miff";
    pub const BOX: &str = "box";
    pub const DIA: &str = "dia";
    pub const MFORALL: &str = "mforall";
    pub const MEXISTS: &str = "mexists";
    pub const MFORALL_A: &str = "mforallA";
    pub const MEXISTS_A: &str = "mexistsA";

    pub const ALL: &[&str] = &[
        NOT, AND, OR, IMPLIES, IFF, TRUE, FALSE, EQ, FORALL, EXISTS, MNOT, MAND, MOR, MIMPLIES,
        MIFF, BOX, DIA, MFORALL, MEXISTS, MFORALL_A, MEXISTS_A,
    ];

    pub fn is_logical(name: &str) -> bool {
        ALL.contains(&name)
    }
}

/// Ambient constants introduced by the modal embedding. They live in every
/// signature and may be referenced from source formulas.
pub mod ambient {
    pub const ACCESS: &str = "rel"; // accessibility relation, w > w > o
    pub const EXISTS_AT: &str = "existsAt"; // actualist domain predicate, e > w > o
    pub const WORLD0: &str = "w0"; // designated world for local validity
}

#[derive(Clone)]
pub enum Term {
    /// Bound variable as a de Bruijn index (0 = innermost binder).
    BVar(usize),
    /// Logical, ambient or signature constant with its (instantiated) type.
    Const(String, Ty),
    Lam {
        hint: String,
        ty: Ty,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable (index {0})")]
    UnboundVar(usize),
    #[error("applied non-function of type {0}")]
    NotAFunction(Ty),
    #[error("expected argument of type {expected}, got {got}")]
    ArgMismatch { expected: Ty, got: Ty },
}

impl Term {
    pub fn bvar(i: usize) -> Term {
        Term::BVar(i)
    }

    pub fn cnst(name: impl Into<String>, ty: Ty) -> Term {
        Term::Const(name.into(), ty)
    }

    pub fn lam(hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        Term::Lam {
            hint: hint.into(),
            ty,
            body: Box::new(body),
        }
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn app2(f: Term, a: Term, b: Term) -> Term {
        Term::app(Term::app(f, a), b)
    }

    // -- builders for the classical (type o) layer ------------------------

    pub fn truth() -> Term {
        Term::cnst(logical::TRUE, Ty::o())
    }

    pub fn falsity() -> Term {
        Term::cnst(logical::FALSE, Ty::o())
    }

    pub fn neg(t: Term) -> Term {
        Term::app(Term::cnst(logical::NOT, Ty::fun(Ty::o(), Ty::o())), t)
    }

    fn o_binop(name: &str, a: Term, b: Term) -> Term {
        let ty = Ty::fun(Ty::o(), Ty::fun(Ty::o(), Ty::o()));
        Term::app2(Term::cnst(name, ty), a, b)
    }

    pub fn conj(a: Term, b: Term) -> Term {
        Term::o_binop(logical::AND, a, b)
    }

    pub fn disj(a: Term, b: Term) -> Term {
        Term::o_binop(logical::OR, a, b)
    }

    pub fn imp(a: Term, b: Term) -> Term {
        Term::o_binop(logical::IMPLIES, a, b)
    }

    pub fn iff(a: Term, b: Term) -> Term {
        Term::o_binop(logical::IFF, a, b)
    }

    pub fn equality(ty: &Ty, a: Term, b: Term) -> Term {
        let cty = Ty::fun(ty.clone(), Ty::fun(ty.clone(), Ty::o()));
        Term::app2(Term::cnst(logical::EQ, cty), a, b)
    }

    /// `! [hint:ty]: body` where `body` uses index 0 for the bound variable.
    pub fn forall(hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        let qty = Ty::fun(Ty::fun(ty.clone(), Ty::o()), Ty::o());
        Term::app(Term::cnst(logical::FORALL, qty), Term::lam(hint, ty, body))
    }

    pub fn exists(hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        let qty = Ty::fun(Ty::fun(ty.clone(), Ty::o()), Ty::o());
        Term::app(Term::cnst(logical::EXISTS, qty), Term::lam(hint, ty, body))
    }

    // -- builders for the modal surface (type w > o) ----------------------

    pub fn m_neg(t: Term) -> Term {
        Term::app(Term::cnst(logical::MNOT, Ty::fun(Ty::wo(), Ty::wo())), t)
    }

    fn m_binop(name: &str, a: Term, b: Term) -> Term {
        let ty = Ty::fun(Ty::wo(), Ty::fun(Ty::wo(), Ty::wo()));
        Term::app2(Term::cnst(name, ty), a, b)
    }

    pub fn m_conj(a: Term, b: Term) -> Term {
        Term::m_binop(logical::MAND, a, b)
    }

    pub fn m_disj(a: Term, b: Term) -> Term {
        Term::m_binop(logical::MOR, a, b)
    }

    pub fn m_imp(a: Term, b: Term) -> Term {
        Term::m_binop(logical::MIMPLIES, a, b)
    }

    pub fn m_iff(a: Term, b: Term) -> Term {
        Term::m_binop(logical::MIFF, a, b)
    }

    pub fn boxed(t: Term) -> Term {
        Term::app(Term::cnst(logical::BOX, Ty::fun(Ty::wo(), Ty::wo())), t)
    }

    pub fn dia(t: Term) -> Term {
        Term::app(Term::cnst(logical::DIA, Ty::fun(Ty::wo(), Ty::wo())), t)
    }

    fn m_quant(name: &str, hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        let qty = Ty::fun(Ty::fun(ty.clone(), Ty::wo()), Ty::wo());
        Term::app(Term::cnst(name, qty), Term::lam(hint, ty, body))
    }

    pub fn m_forall(hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        Term::m_quant(logical::MFORALL, hint, ty, body)
    }

    pub fn m_exists(hint: impl Into<String>, ty: Ty, body: Term) -> Term {
        Term::m_quant(logical::MEXISTS, hint, ty, body)
    }

    pub fn m_forall_actual(hint: impl Into<String>, body: Term) -> Term {
        Term::m_quant(logical::MFORALL_A, hint, Ty::e(), body)
    }

    pub fn m_exists_actual(hint: impl Into<String>, body: Term) -> Term {
        Term::m_quant(logical::MEXISTS_A, hint, Ty::e(), body)
    }

    // -- structure ---------------------------------------------------------

    /// Strips an application spine: `f @ a @ b` yields (f, [a, b]).
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn is_logical_const(&self, name: &str) -> bool {
        matches!(self, Term::Const(n, _) if n == name)
    }

    /// Type of the term; fails on ill-formed applications or indices that
    /// escape their binders.
    pub fn ty(&self) -> Result<Ty, TypeError> {
        fn go(t: &Term, ctx: &mut Vec<Ty>) -> Result<Ty, TypeError> {
            match t {
                Term::BVar(i) => {
                    if *i < ctx.len() {
                        Ok(ctx[ctx.len() - 1 - i].clone())
                    } else {
                        Err(TypeError::UnboundVar(*i))
                    }
                }
                Term::Const(_, ty) => Ok(ty.clone()),
                Term::Lam { ty, body, .. } => {
                    ctx.push(ty.clone());
                    let b = go(body, ctx)?;
                    ctx.pop();
                    Ok(Ty::fun(ty.clone(), b))
                }
                Term::App(f, a) => {
                    let fty = go(f, ctx)?;
                    let aty = go(a, ctx)?;
                    match fty {
                        Ty::Fun(d, c) => {
                            if *d == aty {
                                Ok(*c)
                            } else {
                                Err(TypeError::ArgMismatch {
                                    expected: *d,
                                    got: aty,
                                })
                            }
                        }
                        other => Err(TypeError::NotAFunction(other)),
                    }
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn is_closed(&self) -> bool {
        fn go(t: &Term, depth: usize) -> bool {
            match t {
                Term::BVar(i) => *i < depth,
                Term::Const(..) => true,
                Term::Lam { body, .. } => go(body, depth + 1),
                Term::App(f, a) => go(f, depth) && go(a, depth),
            }
        }
        go(self, 0)
    }

    /// Occurrences of logical constants. The adequacy scorer calls this on
    /// surface terms, where each connective, quantifier and modality counts
    /// once.
    pub fn symbol_count(&self) -> usize {
        match self {
            Term::BVar(_) => 0,
            Term::Const(n, _) => usize::from(logical::is_logical(n)),
            Term::Lam { body, .. } => body.symbol_count(),
            Term::App(f, a) => f.symbol_count() + a.symbol_count(),
        }
    }

    /// Non-logical constant names occurring in the term.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::BVar(_) => {}
                Term::Const(n, _) => {
                    if !logical::is_logical(n) {
                        out.insert(n.clone());
                    }
                }
                Term::Lam { body, .. } => go(body, out),
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Shifts free indices >= cutoff by `d`. Standard de Bruijn machinery.
    pub(crate) fn shift(&self, d: isize, cutoff: usize) -> Term {
        match self {
            Term::BVar(i) => {
                if *i >= cutoff {
                    Term::BVar((*i as isize + d) as usize)
                } else {
                    Term::BVar(*i)
                }
            }
            Term::Const(n, ty) => Term::Const(n.clone(), ty.clone()),
            Term::Lam { hint, ty, body } => Term::Lam {
                hint: hint.clone(),
                ty: ty.clone(),
                body: Box::new(body.shift(d, cutoff + 1)),
            },
            Term::App(f, a) => Term::app(f.shift(d, cutoff), a.shift(d, cutoff)),
        }
    }

    /// Substitutes `arg` for index `j` (adjusting binders underneath).
    pub(crate) fn subst(&self, j: usize, arg: &Term) -> Term {
        match self {
            Term::BVar(i) => {
                if *i == j {
                    arg.shift(j as isize, 0)
                } else {
                    Term::BVar(*i)
                }
            }
            Term::Const(n, ty) => Term::Const(n.clone(), ty.clone()),
            Term::Lam { hint, ty, body } => Term::Lam {
                hint: hint.clone(),
                ty: ty.clone(),
                body: Box::new(body.subst(j + 1, arg)),
            },
            Term::App(f, a) => Term::app(f.subst(j, arg), a.subst(j, arg)),
        }
    }

    /// Beta-contraction of the body of a binder with `arg`: the argument is
    /// pre-shifted so the final down-shift leaves its free indices intact.
    pub(crate) fn open_with(body: &Term, arg: &Term) -> Term {
        body.subst(0, &arg.shift(1, 0)).shift(-1, 0)
    }

    pub fn contains_bvar(&self, j: usize) -> bool {
        match self {
            Term::BVar(i) => *i == j,
            Term::Const(..) => false,
            Term::Lam { body, .. } => body.contains_bvar(j + 1),
            Term::App(f, a) => f.contains_bvar(j) || a.contains_bvar(j),
        }
    }

    /// True when some constant named `name` occurs.
    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::BVar(_) => false,
            Term::Const(n, _) => n == name,
            Term::Lam { body, .. } => body.mentions(name),
            Term::App(f, a) => f.mentions(name) || a.mentions(name),
        }
    }
}

// Alpha-equivalence: hints are display metadata only.
impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::BVar(i), Term::BVar(j)) => i == j,
            (Term::Const(a, t), Term::Const(b, u)) => a == b && t == u,
            (Term::Lam { ty: t, body: b, .. }, Term::Lam { ty: u, body: c, .. }) => {
                t == u && b == c
            }
            (Term::App(f, a), Term::App(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Term::BVar(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            Term::Const(n, t) => {
                1u8.hash(state);
                n.hash(state);
                t.hash(state);
            }
            Term::Lam { ty, body, .. } => {
                2u8.hash(state);
                ty.hash(state);
                body.hash(state);
            }
            Term::App(f, a) => {
                3u8.hash(state);
                f.hash(state);
                a.hash(state);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::to_string(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::print::to_string(self))
    }
}
