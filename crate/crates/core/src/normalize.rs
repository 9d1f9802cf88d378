//! Beta-eta normalization. Simply typed terms strongly normalize, so the
//! rewrite below terminates; eta contraction runs bottom-up after beta and
//! cannot reintroduce redexes.

use crate::term::Term;

pub fn normalize(t: &Term) -> Term {
    match t {
        Term::BVar(_) | Term::Const(..) => t.clone(),
        Term::App(f, a) => {
            let nf = normalize(f);
            if let Term::Lam { body, .. } = &nf {
                normalize(&Term::open_with(body, a))
            } else {
                Term::app(nf, normalize(a))
            }
        }
        Term::Lam { hint, ty, body } => {
            let nb = normalize(body);
            // eta: ^[x]: (f @ x) -> f, when x does not occur in f
            if let Term::App(f, a) = &nb {
                if matches!(a.as_ref(), Term::BVar(0)) && !f.contains_bvar(0) {
                    return f.shift(-1, 0);
                }
            }
            Term::Lam {
                hint: hint.clone(),
                ty: ty.clone(),
                body: Box::new(nb),
            }
        }
    }
}

/// Alpha-beta-eta equality.
pub fn abe_eq(a: &Term, b: &Term) -> bool {
    normalize(a) == normalize(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ty::Ty;

    fn f_const() -> Term {
        Term::cnst("f", Ty::fun(Ty::e(), Ty::o()))
    }

    #[test]
    fn beta_step() {
        // (^[x:e]: f @ x) @ a  ->  f @ a
        let a = Term::cnst("a", Ty::e());
        let t = Term::app(
            Term::lam("x", Ty::e(), Term::app(f_const(), Term::bvar(0))),
            a.clone(),
        );
        assert_eq!(normalize(&t), Term::app(f_const(), a));
    }

    #[test]
    fn eta_step() {
        let t = Term::lam("x", Ty::e(), Term::app(f_const(), Term::bvar(0)));
        assert_eq!(normalize(&t), f_const());
    }

    #[test]
    fn eta_under_binder_cascades() {
        // ^[x:e]: (^[y:e]: g @ y) @ x  ->  g
        let g = Term::cnst("g", Ty::fun(Ty::e(), Ty::o()));
        let inner = Term::lam("y", Ty::e(), Term::app(g.clone(), Term::bvar(0)));
        let t = Term::lam("x", Ty::e(), Term::app(inner, Term::bvar(0)));
        assert_eq!(normalize(&t), g);
    }

    #[test]
    fn normalization_preserves_type() {
        let a = Term::cnst("a", Ty::e());
        let t = Term::app(
            Term::lam("x", Ty::e(), Term::app(f_const(), Term::bvar(0))),
            a,
        );
        assert_eq!(t.ty().unwrap(), normalize(&t).ty().unwrap());
    }
}
