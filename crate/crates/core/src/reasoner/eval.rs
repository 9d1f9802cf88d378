//! Direct evaluation of HOL terms over finite models. Lambdas evaluate to
//! full tables by enumerating their domain, applications index into tables,
//! and logical constants get their tabled denotations on demand.

use std::collections::HashMap;

use super::model::FiniteModel;
use super::value::{card, logical_value, value_at, value_index, Value, ValueError};
use crate::term::{logical, Term};
use crate::ty::Ty;

pub struct Evaluator<'m> {
    model: &'m FiniteModel,
    logical_cache: HashMap<(String, Ty), Value>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m FiniteModel) -> Self {
        Evaluator {
            model,
            logical_cache: HashMap::new(),
        }
    }

    pub fn eval(&mut self, t: &Term, env: &mut Vec<(Ty, Value)>) -> Result<Value, ValueError> {
        match t {
            Term::BVar(i) => {
                if *i < env.len() {
                    Ok(env[env.len() - 1 - i].1.clone())
                } else {
                    Err(ValueError::Mismatch)
                }
            }
            Term::Const(name, ty) => {
                if logical::is_logical(name) {
                    if let Some(v) = self.logical_cache.get(&(name.clone(), ty.clone())) {
                        return Ok(v.clone());
                    }
                    let v = logical_value(name, ty, &self.model.sizes)?;
                    self.logical_cache
                        .insert((name.clone(), ty.clone()), v.clone());
                    Ok(v)
                } else {
                    self.model
                        .interp
                        .get(name)
                        .map(|(_, v)| v.clone())
                        .ok_or_else(|| ValueError::UnknownBase(name.clone()))
                }
            }
            Term::Lam { ty, body, .. } => {
                let n = card(ty, &self.model.sizes)?;
                let mut entries = Vec::with_capacity(n as usize);
                for i in 0..n {
                    let arg = value_at(ty, &self.model.sizes, i)?;
                    env.push((ty.clone(), arg));
                    let r = self.eval(body, env);
                    env.pop();
                    entries.push(r?);
                }
                Ok(Value::Table(entries))
            }
            Term::App(f, a) => {
                let fv = self.eval(f, env)?;
                let av = self.eval(a, env)?;
                let arg_ty = ty_with_env(a, env)?;
                let idx = value_index(&av, &arg_ty, &self.model.sizes)?;
                match fv {
                    Value::Table(entries) => entries
                        .into_iter()
                        .nth(idx as usize)
                        .ok_or(ValueError::Mismatch),
                    _ => Err(ValueError::Mismatch),
                }
            }
        }
    }
}

fn ty_with_env(t: &Term, env: &[(Ty, Value)]) -> Result<Ty, ValueError> {
    fn go(t: &Term, ctx: &mut Vec<Ty>) -> Result<Ty, ValueError> {
        match t {
            Term::BVar(i) => ctx
                .get(ctx.len().wrapping_sub(1 + i))
                .cloned()
                .ok_or(ValueError::Mismatch),
            Term::Const(_, ty) => Ok(ty.clone()),
            Term::Lam { ty, body, .. } => {
                ctx.push(ty.clone());
                let b = go(body, ctx)?;
                ctx.pop();
                Ok(Ty::fun(ty.clone(), b))
            }
            Term::App(f, _) => match go_spine(f, ctx)? {
                Ty::Fun(_, c) => Ok(*c),
                _ => Err(ValueError::Mismatch),
            },
        }
    }
    fn go_spine(t: &Term, ctx: &mut Vec<Ty>) -> Result<Ty, ValueError> {
        go(t, ctx)
    }
    let mut ctx: Vec<Ty> = env.iter().map(|(t, _)| t.clone()).collect();
    go(t, &mut ctx)
}

/// Evaluates a closed `o`-typed formula to its truth value.
pub fn eval_closed(t: &Term, model: &FiniteModel) -> Result<Value, ValueError> {
    Evaluator::new(model).eval(t, &mut Vec::new())
}

/// Evaluates with an explicit variable assignment (innermost binding last).
pub fn eval_with_env(
    t: &Term,
    model: &FiniteModel,
    env: &mut Vec<(Ty, Value)>,
) -> Result<Value, ValueError> {
    Evaluator::new(model).eval(t, env)
}
