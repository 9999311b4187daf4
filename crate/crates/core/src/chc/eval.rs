use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::{Constraint, Constructor, Sort, Term};

/// A ground value: an integer or a constructor tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    Adt(Arc<Constructor>, Vec<Value>),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            Value::Adt(..) => None,
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Int(_) => Sort::Int,
            Value::Adt(c, _) => c.sort(),
        }
    }

    pub fn to_term(&self) -> Term {
        match self {
            Value::Int(n) => Term::Int(n.clone()),
            Value::Adt(c, args) => Term::Cons(c.clone(), args.iter().map(Value::to_term).collect()),
        }
    }

    /// Constructor-node count (integer fields count as one each).
    pub fn size(&self) -> usize {
        match self {
            Value::Int(_) => 1,
            Value::Adt(_, args) => 1 + args.iter().map(Value::size).sum::<usize>(),
        }
    }

    /// The value of a ground term built from literals and constructors only.
    pub fn from_term(t: &Term) -> Option<Value> {
        match t {
            Term::Int(n) => Some(Value::Int(n.clone())),
            Term::Cons(c, args) => Some(Value::Adt(
                c.clone(),
                args.iter().map(Value::from_term).collect::<Option<_>>()?,
            )),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::print_term(&self.to_term()))
    }
}

/// Variable assignment used during evaluation.
pub type Env = BTreeMap<String, Value>;

/// Interprets `CataApp` nodes: `(adt, component, argument) -> integer`.
pub type FoldFn<'a> = &'a dyn Fn(&str, usize, &Value) -> BigInt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("selector {selector} applied to a value built by {actual}")]
    SelectorMismatch { selector: String, actual: String },
    #[error("catamorphism application without an interpretation")]
    NoFold,
    #[error("cannot evaluate quantified formula")]
    Quantifier,
    #[error("ill-sorted evaluation: {0}")]
    Sort(String),
}

pub fn eval_term(t: &Term, env: &Env, fold: Option<FoldFn<'_>>) -> Result<Value, EvalError> {
    match t {
        Term::Var(v) => env.get(&v.name).cloned().ok_or_else(|| EvalError::Unbound(v.name.clone())),
        Term::Int(n) => Ok(Value::Int(n.clone())),
        Term::Cons(c, args) => Ok(Value::Adt(
            c.clone(),
            args.iter().map(|a| eval_term(a, env, fold)).collect::<Result<_, _>>()?,
        )),
        Term::Arith(op, a, b) => {
            let a = eval_int(a, env, fold)?;
            let b = eval_int(b, env, fold)?;
            Ok(Value::Int(op.apply(&a, &b)))
        }
        Term::Sel(c, k, arg) => match eval_term(arg, env, fold)? {
            Value::Adt(d, mut fields) if d.name == c.name => Ok(fields.swap_remove(*k)),
            Value::Adt(d, _) => Err(EvalError::SelectorMismatch {
                selector: c.fields[*k].selector.clone(),
                actual: d.name.clone(),
            }),
            Value::Int(_) => Err(EvalError::Sort("selector on an integer".into())),
        },
        Term::CataApp { adt, component, arg } => {
            let fold = fold.ok_or(EvalError::NoFold)?;
            let v = eval_term(arg, env, Some(fold))?;
            Ok(Value::Int(fold(adt, *component, &v)))
        }
    }
}

fn eval_int(t: &Term, env: &Env, fold: Option<FoldFn<'_>>) -> Result<BigInt, EvalError> {
    match eval_term(t, env, fold)? {
        Value::Int(n) => Ok(n),
        Value::Adt(..) => Err(EvalError::Sort("expected an integer".into())),
    }
}

pub fn eval_constraint(c: &Constraint, env: &Env, fold: Option<FoldFn<'_>>) -> Result<bool, EvalError> {
    use super::CmpOp;
    match c {
        Constraint::True => Ok(true),
        Constraint::False => Ok(false),
        Constraint::And(ps) => {
            for p in ps {
                if !eval_constraint(p, env, fold)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Constraint::Or(ps) => {
            for p in ps {
                if eval_constraint(p, env, fold)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Constraint::Not(p) => Ok(!eval_constraint(p, env, fold)?),
        Constraint::Cmp(op, a, b) => {
            let a = eval_term(a, env, fold)?;
            let b = eval_term(b, env, fold)?;
            match op {
                CmpOp::AdtEq => Ok(a == b),
                CmpOp::AdtNe => Ok(a != b),
                _ => match (&a, &b) {
                    (Value::Int(x), Value::Int(y)) => Ok(op.holds(x, y)),
                    _ => Err(EvalError::Sort("integer comparison on ADT values".into())),
                },
            }
        }
        Constraint::Test(ctor, t) => match eval_term(t, env, fold)? {
            Value::Adt(d, _) => Ok(d.name == ctor.name),
            Value::Int(_) => Err(EvalError::Sort("tester on an integer".into())),
        },
        Constraint::Exists(..) | Constraint::Forall(..) => Err(EvalError::Quantifier),
    }
}
