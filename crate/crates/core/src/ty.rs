//! Simple types over named base types and right-associative function arrows.

use std::fmt;

/// Names of the three base types every signature declares.
pub const BASE_O: &str = "o";
pub const BASE_W: &str = "w";
pub const BASE_E: &str = "e";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Base(String),
    Fun(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn o() -> Ty {
        Ty::Base(BASE_O.to_string())
    }

    pub fn w() -> Ty {
        Ty::Base(BASE_W.to_string())
    }

    pub fn e() -> Ty {
        Ty::Base(BASE_E.to_string())
    }

    pub fn fun(dom: Ty, cod: Ty) -> Ty {
        Ty::Fun(Box::new(dom), Box::new(cod))
    }

    /// `w > o`, the type of truth sets.
    pub fn wo() -> Ty {
        Ty::fun(Ty::w(), Ty::o())
    }

    pub fn is_o(&self) -> bool {
        matches!(self, Ty::Base(b) if b == BASE_O)
    }

    pub fn is_w(&self) -> bool {
        matches!(self, Ty::Base(b) if b == BASE_W)
    }

    pub fn is_wo(&self) -> bool {
        match self {
            Ty::Fun(d, c) => d.is_w() && c.is_o(),
            _ => false,
        }
    }

    /// Splits `a > b > ... > r` into (argument types, result type).
    pub fn uncurry(&self) -> (Vec<&Ty>, &Ty) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Ty::Fun(d, c) = cur {
            args.push(d.as_ref());
            cur = c;
        }
        (args, cur)
    }

    /// True for `e > ... > e > (w > o)` and for plain `w > o`: the shapes a
    /// modal-surface predicate may have.
    pub fn is_surface_predicate(&self) -> bool {
        let (args, res) = self.uncurry();
        if args.is_empty() {
            return self.is_wo();
        }
        // the final w argument belongs to the truth set
        let last_is_w = args.last().map(|t| t.is_w()).unwrap_or(false);
        if !last_is_w || !res.is_o() {
            return false;
        }
        args[..args.len() - 1]
            .iter()
            .all(|t| matches!(t, Ty::Base(b) if b != BASE_O && b != BASE_W))
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Base(b) => write!(f, "{b}"),
            Ty::Fun(d, c) => {
                // arrows associate to the right; parenthesize a function domain
                match d.as_ref() {
                    Ty::Fun(..) => write!(f, "({d}) > {c}"),
                    _ => write!(f, "{d} > {c}"),
                }
            }
        }
    }
}

impl fmt::Debug for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_right_assoc() {
        let t = Ty::fun(Ty::e(), Ty::fun(Ty::w(), Ty::o()));
        assert_eq!(t.to_string(), "e > w > o");
        let u = Ty::fun(Ty::fun(Ty::e(), Ty::o()), Ty::o());
        assert_eq!(u.to_string(), "(e > o) > o");
    }

    #[test]
    fn surface_predicate_shapes() {
        assert!(Ty::wo().is_surface_predicate());
        assert!(Ty::fun(Ty::e(), Ty::wo()).is_surface_predicate());
        assert!(Ty::fun(Ty::e(), Ty::fun(Ty::e(), Ty::wo())).is_surface_predicate());
        assert!(!Ty::fun(Ty::w(), Ty::wo()).is_surface_predicate());
        assert!(!Ty::o().is_surface_predicate());
    }
}
