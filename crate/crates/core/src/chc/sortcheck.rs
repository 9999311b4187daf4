use std::collections::BTreeMap;

use super::{ChcSystem, Clause, CmpOp, Constraint, Head, PredApp, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sort error: {msg}")]
pub struct SortError {
    pub msg: String,
    /// Index of the offending clause, when known.
    pub clause: Option<usize>,
}

impl SortError {
    pub fn new(msg: impl Into<String>) -> SortError {
        SortError {
            msg: msg.into(),
            clause: None,
        }
    }
}

struct Checker<'a> {
    system: &'a ChcSystem,
    scope: BTreeMap<String, Sort>,
}

impl Checker<'_> {
    fn term(&self, t: &Term) -> Result<Sort, SortError> {
        match t {
            Term::Var(v) => match self.scope.get(&v.name) {
                Some(s) if *s == v.sort => Ok(s.clone()),
                Some(s) => Err(SortError::new(format!(
                    "variable {} used at sort {} but bound at {s}",
                    v.name, v.sort
                ))),
                None => Err(SortError::new(format!("unbound variable {}", v.name))),
            },
            Term::Int(_) => Ok(Sort::Int),
            Term::Cons(c, args) => {
                let declared = self
                    .system
                    .datatypes
                    .constructor(&c.name)
                    .ok_or_else(|| SortError::new(format!("undeclared constructor {}", c.name)))?;
                if **declared != **c {
                    return Err(SortError::new(format!("constructor {} does not match its declaration", c.name)));
                }
                if args.len() != c.fields.len() {
                    return Err(SortError::new(format!(
                        "{} expects {} arguments, got {}",
                        c.name,
                        c.fields.len(),
                        args.len()
                    )));
                }
                for (a, f) in args.iter().zip(&c.fields) {
                    let s = self.term(a)?;
                    if s != f.sort {
                        return Err(SortError::new(format!(
                            "argument {} of {} has sort {s}, expected {}",
                            f.selector, c.name, f.sort
                        )));
                    }
                }
                Ok(c.sort())
            }
            Term::Arith(op, a, b) => {
                for x in [a, b] {
                    let s = self.term(x)?;
                    if s != Sort::Int {
                        return Err(SortError::new(format!("operand of {} has sort {s}", op.symbol())));
                    }
                }
                Ok(Sort::Int)
            }
            Term::Sel(c, k, arg) => {
                let s = self.term(arg)?;
                if s != c.sort() {
                    return Err(SortError::new(format!(
                        "selector {} applied to sort {s}",
                        c.fields[*k].selector
                    )));
                }
                Ok(c.fields[*k].sort.clone())
            }
            Term::CataApp { adt, arg, .. } => {
                let s = self.term(arg)?;
                if s != Sort::Adt(adt.clone()) {
                    return Err(SortError::new(format!("catamorphism for {adt} applied to sort {s}")));
                }
                Ok(Sort::Int)
            }
        }
    }

    fn constraint_inner(&self, c: &Constraint) -> Result<(), SortError> {
        match c {
            Constraint::True | Constraint::False => Ok(()),
            Constraint::And(ps) | Constraint::Or(ps) => ps.iter().try_for_each(|p| self.constraint_inner(p)),
            Constraint::Not(p) => self.constraint_inner(p),
            Constraint::Cmp(op, a, b) => {
                let sa = self.term(a)?;
                let sb = self.term(b)?;
                if sa != sb {
                    return Err(SortError::new(format!("comparison between sorts {sa} and {sb}")));
                }
                if op.is_adt() != sa.is_adt() {
                    return Err(SortError::new(format!(
                        "{} comparison used at sort {sa}",
                        if op.is_adt() { "ADT" } else { "integer" }
                    )));
                }
                if matches!(op, CmpOp::Gt | CmpOp::Le) && sa != Sort::Int {
                    return Err(SortError::new("ordering on a non-integer sort"));
                }
                Ok(())
            }
            Constraint::Test(ctor, t) => {
                let s = self.term(t)?;
                if s != ctor.sort() {
                    return Err(SortError::new(format!("tester for {} applied to sort {s}", ctor.name)));
                }
                Ok(())
            }
            Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
                let mut scope = self.scope.clone();
                scope.insert(v.name.clone(), v.sort.clone());
                Checker {
                    system: self.system,
                    scope,
                }
                .constraint_inner(b)
            }
        }
    }

    fn atom(&self, a: &PredApp) -> Result<(), SortError> {
        let sig = self
            .system
            .predicates
            .get(&a.pred)
            .ok_or_else(|| SortError::new(format!("undeclared predicate {}", a.pred)))?;
        if sig.len() != a.args.len() {
            return Err(SortError::new(format!(
                "{} expects {} arguments, got {}",
                a.pred,
                sig.len(),
                a.args.len()
            )));
        }
        for (i, (t, s)) in a.args.iter().zip(sig).enumerate() {
            let ts = self.term(t)?;
            if ts != *s {
                return Err(SortError::new(format!(
                    "argument {i} of {} has sort {ts}, expected {s}",
                    a.pred
                )));
            }
        }
        Ok(())
    }
}

/// Checks one clause against the system's declarations.
pub fn check_clause(system: &ChcSystem, clause: &Clause) -> Result<(), SortError> {
    let mut scope = BTreeMap::new();
    for v in &clause.vars {
        if let Sort::Adt(n) = &v.sort {
            if system.datatypes.adt(n).is_none() {
                return Err(SortError::new(format!("variable {} has undeclared sort {n}", v.name)));
            }
        }
        if scope.insert(v.name.clone(), v.sort.clone()).is_some() {
            return Err(SortError::new(format!("variable {} bound twice", v.name)));
        }
    }
    let checker = Checker { system, scope };
    if let Head::Pred(p) = &clause.head {
        checker.atom(p)?;
    }
    checker.constraint_inner(&clause.constraint)?;
    if !clause.constraint.is_quantifier_free() {
        return Err(SortError::new("clause constraint is not quantifier-free"));
    }
    clause.body.iter().try_for_each(|a| checker.atom(a))
}

/// Validates every clause; the error names the first offending clause.
pub fn check_sorts(system: &ChcSystem) -> Result<(), SortError> {
    for (i, c) in system.clauses.iter().enumerate() {
        check_clause(system, c).map_err(|mut e| {
            e.clause = Some(i);
            e
        })?;
    }
    Ok(())
}
