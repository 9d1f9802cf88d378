//! Pretty printer for the formula grammar. `parse(print(t))` is
//! alpha-beta-eta-equal to `t`; the canonical mode drops binder hints and is
//! what cache keys and certificate ids are derived from.

use crate::term::{logical, Term};
use crate::ty::Ty;

const PREC_IFF: u8 = 1;
const PREC_IMP: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_EQ: u8 = 5;
const PREC_UNARY: u8 = 6;
const PREC_APP: u8 = 7;
const PREC_ATOM: u8 = 8;

pub fn to_string(t: &Term) -> String {
    let mut p = Printer {
        canonical: false,
        names: Vec::new(),
        out: String::new(),
    };
    p.term(t, 0);
    p.out
}

/// Hint-free rendering with positional binder names; stable across
/// alpha-variants of the same term.
pub fn canonical(t: &Term) -> String {
    let mut p = Printer {
        canonical: true,
        names: Vec::new(),
        out: String::new(),
    };
    p.term(t, 0);
    p.out
}

struct Printer {
    canonical: bool,
    names: Vec<String>,
    out: String,
}

enum Quant {
    Forall,
    Exists,
    ForallA,
    ExistsA,
}

impl Printer {
    fn push_str(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn fresh_name(&self, hint: &str) -> String {
        if self.canonical {
            return format!("X{}", self.names.len());
        }
        let mut base: String = hint
            .chars()
            .filter(|c| c.is_alphanumeric() || *c == '_')
            .collect();
        if base.is_empty() {
            base = "X".to_string();
        }
        let mut chars = base.chars();
        let first = chars.next().unwrap().to_ascii_uppercase();
        let mut name: String = first.to_string();
        name.push_str(chars.as_str());
        if !name.chars().next().unwrap().is_ascii_uppercase() {
            name = format!("X{name}");
        }
        if !self.names.contains(&name) {
            return name;
        }
        let mut i = 1;
        loop {
            let cand = format!("{name}{i}");
            if !self.names.contains(&cand) {
                return cand;
            }
            i += 1;
        }
    }

    fn term(&mut self, t: &Term, prec: u8) {
        // quantifier applications print as binders
        if let Term::App(f, arg) = t {
            if let Term::Const(name, _) = f.as_ref() {
                let quant = match name.as_str() {
                    logical::FORALL | logical::MFORALL => Some(Quant::Forall),
                    logical::EXISTS | logical::MEXISTS => Some(Quant::Exists),
                    logical::MFORALL_A => Some(Quant::ForallA),
                    logical::MEXISTS_A => Some(Quant::ExistsA),
                    _ => None,
                };
                if let Some(q) = quant {
                    self.quantifier(q, arg, prec);
                    return;
                }
            }
        }
        match t {
            Term::BVar(i) => {
                let name = self
                    .names
                    .get(self.names.len().wrapping_sub(1 + i))
                    .cloned()
                    .unwrap_or_else(|| format!("_{i}"));
                self.push_str(&name);
            }
            Term::Const(name, _) => match name.as_str() {
                logical::TRUE => self.push_str("$true"),
                logical::FALSE => self.push_str("$false"),
                _ => self.push_str(name),
            },
            Term::Lam { hint, ty, body } => {
                let parens = prec > 0;
                if parens {
                    self.push_str("(");
                }
                let name = self.fresh_name(hint);
                self.push_str(&format!("^ [{name}:{ty}]: "));
                self.names.push(name);
                self.term(body, 0);
                self.names.pop();
                if parens {
                    self.push_str(")");
                }
            }
            Term::App(..) => self.application(t, prec),
        }
    }

    fn quantifier(&mut self, q: Quant, arg: &Term, prec: u8) {
        let parens = prec > 0;
        if parens {
            self.push_str("(");
        }
        let sym = match q {
            Quant::Forall => "!",
            Quant::Exists => "?",
            Quant::ForallA => "!A",
            Quant::ExistsA => "?A",
        };
        match arg {
            Term::Lam { hint, ty, body } => {
                let name = self.fresh_name(hint);
                self.push_str(&format!("{sym} [{name}:{ty}]: "));
                self.names.push(name);
                self.term(body, 0);
                self.names.pop();
            }
            other => {
                // eta-expand a bare predicate argument for display
                let ty = binder_ty_of_quant_arg(other);
                let name = self.fresh_name("x");
                self.push_str(&format!("{sym} [{name}:{ty}]: "));
                self.names.push(name.clone());
                let expanded = Term::app(other.shift(1, 0), Term::bvar(0));
                self.term(&expanded, 0);
                self.names.pop();
            }
        }
        if parens {
            self.push_str(")");
        }
    }

    fn application(&mut self, t: &Term, prec: u8) {
        let (head, args) = t.spine();
        if let Term::Const(name, _) = head {
            match (name.as_str(), args.len()) {
                (logical::NOT | logical::MNOT, 1) => {
                    return self.prefix("~", args[0], prec, PREC_UNARY)
                }
                (logical::BOX, 1) => return self.prefix("box ", args[0], prec, PREC_UNARY),
                (logical::DIA, 1) => return self.prefix("dia ", args[0], prec, PREC_UNARY),
                (logical::AND | logical::MAND, 2) => {
                    return self.infix("&", args[0], args[1], prec, PREC_AND, true)
                }
                (logical::OR | logical::MOR, 2) => {
                    return self.infix("|", args[0], args[1], prec, PREC_OR, true)
                }
                (logical::IMPLIES | logical::MIMPLIES, 2) => {
                    return self.infix("=>", args[0], args[1], prec, PREC_IMP, false)
                }
                (logical::IFF | logical::MIFF, 2) => {
                    return self.infix("<=>", args[0], args[1], prec, PREC_IFF, true)
                }
                (logical::EQ, 2) => return self.infix("=", args[0], args[1], prec, PREC_EQ, true),
                _ => {}
            }
        }
        // plain application chain
        let parens = prec > PREC_APP;
        if parens {
            self.push_str("(");
        }
        self.term(head, PREC_ATOM);
        for a in args {
            self.push_str(" @ ");
            self.term(a, PREC_ATOM);
        }
        if parens {
            self.push_str(")");
        }
    }

    fn prefix(&mut self, sym: &str, arg: &Term, prec: u8, my: u8) {
        let parens = prec > my;
        if parens {
            self.push_str("(");
        }
        self.push_str(sym);
        self.term(arg, my);
        if parens {
            self.push_str(")");
        }
    }

    fn infix(&mut self, sym: &str, l: &Term, r: &Term, prec: u8, my: u8, left_assoc: bool) {
        let parens = prec > my;
        if parens {
            self.push_str("(");
        }
        let (lp, rp) = if left_assoc {
            (my, my + 1)
        } else {
            (my + 1, my) // right-associative: =>
        };
        self.term(l, lp);
        self.push_str(&format!(" {sym} "));
        self.term(r, rp);
        if parens {
            self.push_str(")");
        }
    }
}

fn binder_ty_of_quant_arg(arg: &Term) -> Ty {
    match arg.ty() {
        Ok(Ty::Fun(d, _)) => *d,
        _ => Ty::e(),
    }
}
