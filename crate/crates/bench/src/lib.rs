//! Shared setup for the criterion benches: a small signature and the
//! formula set the hot paths get measured on.

use herm_core::{parse, Signature, Term, Ty};

pub fn bench_signature() -> Signature {
    let mut s = Signature::new();
    for n in ["p", "q", "r_atom"] {
        s.declare_const(n, Ty::wo()).unwrap();
    }
    s.declare_const("fish", Ty::fun(Ty::e(), Ty::wo())).unwrap();
    s.declare_const("vertebrate", Ty::fun(Ty::e(), Ty::wo()))
        .unwrap();
    s.declare_const("nemo", Ty::e()).unwrap();
    s
}

pub fn formula(src: &str, sig: &Signature) -> Term {
    parse(src, sig).unwrap()
}
