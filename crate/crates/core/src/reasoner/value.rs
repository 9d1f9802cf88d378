//! Finite denotations. Every type denotes a finite set once the base types
//! are given sizes: `o` two booleans, a base type its carrier, and function
//! types full tables. Values of each type are canonically numbered, which is
//! what makes model enumeration deterministic.

use std::collections::BTreeMap;

use crate::term::logical;
use crate::ty::Ty;
use thiserror::Error;

/// Hard cap on table sizes; beyond this the type is refused rather than
/// enumerated.
pub const MAX_CARD: u128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValueError {
    #[error("base type `{0}` has no declared size")]
    UnknownBase(String),
    #[error("type `{0}` is too large to enumerate")]
    TooLarge(String),
    #[error("value/type mismatch")]
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Elem(usize),
    /// Function value: entry `i` is the result on the `i`-th value of the
    /// domain type.
    Table(Vec<Value>),
}

impl Value {
    pub fn as_bool(&self) -> Result<bool, ValueError> {
        match self {
            Value::Bool(b) => Ok(*b),
            _ => Err(ValueError::Mismatch),
        }
    }

    pub fn as_elem(&self) -> Result<usize, ValueError> {
        match self {
            Value::Elem(i) => Ok(*i),
            _ => Err(ValueError::Mismatch),
        }
    }
}

/// Base-type carrier sizes for one model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sizes(pub BTreeMap<String, usize>);

impl Sizes {
    pub fn of(pairs: &[(&str, usize)]) -> Sizes {
        Sizes(pairs.iter().map(|(n, s)| (n.to_string(), *s)).collect())
    }

    pub fn get(&self, base: &str) -> Result<usize, ValueError> {
        self.0
            .get(base)
            .copied()
            .ok_or_else(|| ValueError::UnknownBase(base.to_string()))
    }
}

/// Number of values of the type; errors beyond [`MAX_CARD`].
pub fn card(ty: &Ty, sizes: &Sizes) -> Result<u64, ValueError> {
    let c = card_u128(ty, sizes)?;
    if c > MAX_CARD {
        return Err(ValueError::TooLarge(ty.to_string()));
    }
    Ok(c as u64)
}

fn card_u128(ty: &Ty, sizes: &Sizes) -> Result<u128, ValueError> {
    match ty {
        Ty::Base(b) => {
            if b == "o" {
                Ok(2)
            } else {
                Ok(sizes.get(b)? as u128)
            }
        }
        Ty::Fun(d, c) => {
            let dc = card_u128(d, sizes)?;
            let cc = card_u128(c, sizes)?;
            if dc > 64 {
                return Err(ValueError::TooLarge(ty.to_string()));
            }
            let mut acc: u128 = 1;
            for _ in 0..dc {
                acc = acc
                    .checked_mul(cc)
                    .ok_or_else(|| ValueError::TooLarge(ty.to_string()))?;
                if acc > MAX_CARD {
                    return Err(ValueError::TooLarge(ty.to_string()));
                }
            }
            Ok(acc)
        }
    }
}

/// The `idx`-th value of the type, in canonical order: booleans false<true,
/// carrier elements by index, tables lexicographically with the entry at
/// domain index 0 most significant.
pub fn value_at(ty: &Ty, sizes: &Sizes, idx: u64) -> Result<Value, ValueError> {
    match ty {
        Ty::Base(b) => {
            if b == "o" {
                Ok(Value::Bool(idx == 1))
            } else {
                Ok(Value::Elem(idx as usize))
            }
        }
        Ty::Fun(d, c) => {
            let n = card(d, sizes)?;
            let m = card(c, sizes)? as u128;
            let mut entries = Vec::with_capacity(n as usize);
            let mut weight = m.pow((n as u32).saturating_sub(1));
            let mut rest = idx as u128;
            for _ in 0..n {
                let digit = rest.checked_div(weight).unwrap_or(0);
                rest %= weight.max(1);
                entries.push(value_at(c, sizes, digit as u64)?);
                weight = if weight > 1 { weight / m } else { 0 };
            }
            Ok(Value::Table(entries))
        }
    }
}

/// Inverse of [`value_at`].
pub fn value_index(v: &Value, ty: &Ty, sizes: &Sizes) -> Result<u64, ValueError> {
    match (v, ty) {
        (Value::Bool(b), Ty::Base(t)) if t == "o" => Ok(u64::from(*b)),
        (Value::Elem(i), Ty::Base(_)) => Ok(*i as u64),
        (Value::Table(entries), Ty::Fun(_, c)) => {
            let m = card(c, sizes)? as u128;
            let mut acc: u128 = 0;
            for e in entries {
                acc = acc * m + value_index(e, c, sizes)? as u128;
            }
            Ok(acc as u64)
        }
        _ => Err(ValueError::Mismatch),
    }
}

/// Denotation of a logical constant at its instantiated type, as a full
/// table. Quantifier tables enumerate the function space of their predicate
/// argument, so higher-order quantification is refused past the cap.
pub fn logical_value(name: &str, ty: &Ty, sizes: &Sizes) -> Result<Value, ValueError> {
    match name {
        logical::TRUE => Ok(Value::Bool(true)),
        logical::FALSE => Ok(Value::Bool(false)),
        logical::NOT => Ok(Value::Table(vec![Value::Bool(true), Value::Bool(false)])),
        logical::AND => Ok(binop_table(|a, b| a && b)),
        logical::OR => Ok(binop_table(|a, b| a || b)),
        logical::IMPLIES => Ok(binop_table(|a, b| !a || b)),
        logical::IFF => Ok(binop_table(|a, b| a == b)),
        logical::EQ => {
            let elem_ty = match ty {
                Ty::Fun(d, _) => d.as_ref(),
                _ => return Err(ValueError::Mismatch),
            };
            let n = card(elem_ty, sizes)?;
            let rows = (0..n)
                .map(|i| Value::Table((0..n).map(|j| Value::Bool(i == j)).collect()))
                .collect();
            Ok(Value::Table(rows))
        }
        logical::FORALL | logical::EXISTS => {
            let pred_ty = match ty {
                Ty::Fun(d, _) => d.as_ref(),
                _ => return Err(ValueError::Mismatch),
            };
            let n = card(pred_ty, sizes)?;
            let want_all = name == logical::FORALL;
            let mut entries = Vec::with_capacity(n as usize);
            for i in 0..n {
                let table = value_at(pred_ty, sizes, i)?;
                let bools = match &table {
                    Value::Table(es) => es,
                    _ => return Err(ValueError::Mismatch),
                };
                let holds = if want_all {
                    bools.iter().all(|v| matches!(v, Value::Bool(true)))
                } else {
                    bools.iter().any(|v| matches!(v, Value::Bool(true)))
                };
                entries.push(Value::Bool(holds));
            }
            Ok(Value::Table(entries))
        }
        _ => Err(ValueError::Mismatch),
    }
}

fn binop_table(f: impl Fn(bool, bool) -> bool) -> Value {
    Value::Table(
        [false, true]
            .iter()
            .map(|a| {
                Value::Table(
                    [false, true]
                        .iter()
                        .map(|b| Value::Bool(f(*a, *b)))
                        .collect(),
                )
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cards() {
        let sizes = Sizes::of(&[("w", 3), ("e", 2)]);
        assert_eq!(card(&Ty::o(), &sizes).unwrap(), 2);
        assert_eq!(card(&Ty::w(), &sizes).unwrap(), 3);
        assert_eq!(card(&Ty::wo(), &sizes).unwrap(), 8);
        assert_eq!(card(&Ty::fun(Ty::e(), Ty::wo()), &sizes).unwrap(), 64);
    }

    #[test]
    fn value_round_trip() {
        let sizes = Sizes::of(&[("w", 2), ("e", 2)]);
        let ty = Ty::fun(Ty::e(), Ty::wo());
        let n = card(&ty, &sizes).unwrap();
        for i in 0..n {
            let v = value_at(&ty, &sizes, i).unwrap();
            assert_eq!(value_index(&v, &ty, &sizes).unwrap(), i);
        }
    }

    #[test]
    fn forall_table_over_wo() {
        let sizes = Sizes::of(&[("w", 2)]);
        let qty = Ty::fun(Ty::wo(), Ty::o());
        let v = logical_value(logical::FORALL, &qty, &sizes).unwrap();
        if let Value::Table(entries) = v {
            assert_eq!(entries.len(), 4);
            // only the everywhere-true table (last index: both entries true)
            assert_eq!(entries[3], Value::Bool(true));
            assert_eq!(entries[0], Value::Bool(false));
        } else {
            panic!("expected table");
        }
    }
}
