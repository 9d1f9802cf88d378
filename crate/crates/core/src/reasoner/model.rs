//! Finite models: carrier sizes per base type plus an interpretation table
//! for every constant. Printed in a stable layout so countermodels can be
//! diffed in golden tests.

use std::collections::BTreeMap;
use std::fmt;

use super::value::{card, Sizes, Value, ValueError};
use crate::ty::Ty;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub sizes: Sizes,
    /// Constant name -> (type, denotation).
    pub interp: BTreeMap<String, (Ty, Value)>,
    /// Index of the designated world under local validity.
    pub designated: Option<usize>,
}

impl FiniteModel {
    pub fn world_count(&self) -> usize {
        self.sizes.get("w").unwrap_or(1)
    }

    pub fn individual_count(&self) -> usize {
        self.sizes.get("e").unwrap_or(1)
    }

    pub fn value_of(&self, name: &str) -> Option<&Value> {
        self.interp.get(name).map(|(_, v)| v)
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model")?;
        for (base, size) in &self.sizes.0 {
            write!(f, " |{base}|={size}")?;
        }
        if let Some(d) = self.designated {
            write!(f, " designated=w{d}")?;
        }
        writeln!(f)?;
        for (name, (ty, value)) in &self.interp {
            writeln!(f, "  {name} : {ty}")?;
            write_value(f, value, ty, &self.sizes, &mut Vec::new())?;
        }
        Ok(())
    }
}

fn base_label(base: &Ty, idx: usize) -> String {
    match base {
        Ty::Base(b) if b == "o" => {
            if idx == 1 {
                "true".into()
            } else {
                "false".into()
            }
        }
        Ty::Base(b) => format!("{b}{idx}"),
        _ => format!("#{idx}"),
    }
}

fn write_value(
    f: &mut fmt::Formatter<'_>,
    v: &Value,
    ty: &Ty,
    sizes: &Sizes,
    prefix: &mut Vec<String>,
) -> fmt::Result {
    match (v, ty) {
        (Value::Table(entries), Ty::Fun(d, c)) => {
            let n = card(d, sizes).map_err(|_| fmt::Error)? as usize;
            for (i, entry) in entries.iter().enumerate().take(n) {
                prefix.push(base_label(d, i));
                write_value(f, entry, c, sizes, prefix)?;
                prefix.pop();
            }
            Ok(())
        }
        (scalar, _) => {
            let shown = match scalar {
                Value::Bool(b) => b.to_string(),
                Value::Elem(i) => base_label(ty, *i),
                Value::Table(_) => "<table>".into(),
            };
            writeln!(f, "    ({}) = {shown}", prefix.join(", "))
        }
    }
}

impl FiniteModel {
    /// Short stable id for reports.
    pub fn id(&self) -> String {
        let shown = self.to_string();
        format!(
            "mod-{:012x}",
            super::tableau::fnv1a(shown.as_bytes()) & 0xffff_ffff_ffff
        )
    }

    /// Re-checks the model against a formula set using the evaluator; the
    /// certificate soundness tests call this.
    pub fn satisfies_all(&self, formulas: &[crate::term::Term]) -> Result<bool, ValueError> {
        for t in formulas {
            let v = super::eval::eval_closed(t, self)?;
            if !v.as_bool()? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
