//! Declared vocabulary: base types and typed constants.

use std::collections::{BTreeMap, BTreeSet};

use crate::term::{ambient, logical};
use crate::ty::{Ty, BASE_E, BASE_O, BASE_W};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("base type `{0}` is reserved")]
    ReservedBase(String),
    #[error("duplicate base type `{0}`")]
    DuplicateBase(String),
    #[error("constant name `{0}` is reserved")]
    ReservedConstant(String),
    #[error("duplicate constant `{0}`")]
    DuplicateConstant(String),
    #[error("constant `{name}` uses undeclared base type `{base}`")]
    UnknownBase { name: String, base: String },
}

/// Vocabulary a document is parsed and checked against. `o`, `w`, `e` and the
/// embedding's ambient constants are always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    bases: BTreeSet<String>,
    consts: BTreeMap<String, Ty>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature::new()
    }
}

impl Signature {
    pub fn new() -> Signature {
        let mut bases = BTreeSet::new();
        for b in [BASE_O, BASE_W, BASE_E] {
            bases.insert(b.to_string());
        }
        let mut consts = BTreeMap::new();
        consts.insert(
            ambient::ACCESS.to_string(),
            Ty::fun(Ty::w(), Ty::fun(Ty::w(), Ty::o())),
        );
        consts.insert(
            ambient::EXISTS_AT.to_string(),
            Ty::fun(Ty::e(), Ty::fun(Ty::w(), Ty::o())),
        );
        consts.insert(ambient::WORLD0.to_string(), Ty::w());
        Signature { bases, consts }
    }

    pub fn declare_base(&mut self, name: &str) -> Result<(), SignatureError> {
        if name == BASE_O || name == BASE_W || name == BASE_E {
            return Err(SignatureError::ReservedBase(name.to_string()));
        }
        if !self.bases.insert(name.to_string()) {
            return Err(SignatureError::DuplicateBase(name.to_string()));
        }
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str, ty: Ty) -> Result<(), SignatureError> {
        if logical::is_logical(name)
            || name == ambient::ACCESS
            || name == ambient::EXISTS_AT
            || name == ambient::WORLD0
        {
            return Err(SignatureError::ReservedConstant(name.to_string()));
        }
        self.check_bases(name, &ty)?;
        if self.consts.contains_key(name) {
            return Err(SignatureError::DuplicateConstant(name.to_string()));
        }
        self.consts.insert(name.to_string(), ty);
        Ok(())
    }

    fn check_bases(&self, name: &str, ty: &Ty) -> Result<(), SignatureError> {
        match ty {
            Ty::Base(b) => {
                if self.bases.contains(b) {
                    Ok(())
                } else {
                    Err(SignatureError::UnknownBase {
                        name: name.to_string(),
                        base: b.clone(),
                    })
                }
            }
            Ty::Fun(d, c) => {
                self.check_bases(name, d)?;
                self.check_bases(name, c)
            }
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Ty> {
        self.consts.get(name)
    }

    pub fn has_base(&self, name: &str) -> bool {
        self.bases.contains(name)
    }

    pub fn constants(&self) -> impl Iterator<Item = (&String, &Ty)> {
        self.consts.iter()
    }

    pub fn bases(&self) -> impl Iterator<Item = &String> {
        self.bases.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_names_rejected() {
        let mut sig = Signature::new();
        assert!(sig.declare_const("box", Ty::o()).is_err());
        assert!(sig.declare_const("rel", Ty::o()).is_err());
        assert!(sig.declare_base("o").is_err());
        sig.declare_const("p", Ty::wo()).unwrap();
        assert!(sig.declare_const("p", Ty::wo()).is_err());
    }

    #[test]
    fn unknown_base_rejected() {
        let mut sig = Signature::new();
        let err = sig.declare_const("f", Ty::fun(Ty::Base("q".into()), Ty::o()));
        assert!(matches!(err, Err(SignatureError::UnknownBase { .. })));
        sig.declare_base("q").unwrap();
        sig.declare_const("f", Ty::fun(Ty::Base("q".into()), Ty::o()))
            .unwrap();
    }
}
