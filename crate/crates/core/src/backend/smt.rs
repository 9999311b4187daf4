//! One-shot SMT queries with model extraction.

use std::fmt::Write as _;
use std::time::Duration;

use crate::chc::{parse_term, print_constraint, print_datatypes, print_sort, Constraint, Datatypes, Env, Sort, Value, Var};
use crate::sample::min_sizes;
use crate::sexp::{parse_all, quote_symbol, Sexp};

use super::{Backend, BackendError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Logic {
    Lia,
    Nia,
    AdtLia,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmtResult {
    /// Values for every declared variable.
    Sat(Env),
    Unsat,
    Unknown(String),
    Timeout,
}

impl SmtResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SmtResult::Sat(_))
    }
}

/// A satisfiability question: does some assignment of `vars` satisfy `assertion`?
#[derive(Debug, Clone)]
pub struct SmtQuery<'a> {
    pub datatypes: &'a Datatypes,
    /// Raw SMT-LIB2 commands placed after the datatype declarations
    /// (recursive function definitions).
    pub definitions: String,
    pub vars: Vec<Var>,
    pub assertion: Constraint,
    pub logic: Logic,
}

impl<'a> SmtQuery<'a> {
    /// Declares exactly the free variables of `assertion`.
    pub fn new(datatypes: &'a Datatypes, assertion: Constraint, logic: Logic) -> SmtQuery<'a> {
        SmtQuery {
            datatypes,
            definitions: String::new(),
            vars: assertion.free_vars().into_iter().collect(),
            assertion,
            logic,
        }
    }

    pub fn with_definitions(mut self, defs: impl Into<String>) -> SmtQuery<'a> {
        self.definitions = defs.into();
        self
    }

    pub fn script(&self) -> String {
        let mut out = String::from("(set-option :produce-models true)\n");
        let plain = self.datatypes.is_empty() && self.definitions.is_empty();
        if plain {
            let quantified = !self.assertion.is_quantifier_free();
            let logic = match (self.logic, quantified) {
                (Logic::Nia, false) => Some("QF_NIA"),
                (Logic::Nia, true) => Some("NIA"),
                (Logic::Lia, false) => Some("QF_LIA"),
                (Logic::Lia, true) => Some("LIA"),
                (Logic::AdtLia, _) => None,
            };
            if let Some(l) = logic {
                let _ = writeln!(out, "(set-logic {l})");
            }
        }
        out.push_str(&print_datatypes(self.datatypes));
        out.push_str(&self.definitions);
        if !self.definitions.is_empty() && !self.definitions.ends_with('\n') {
            out.push('\n');
        }
        for v in &self.vars {
            let _ = writeln!(out, "(declare-const {} {})", quote_symbol(&v.name), print_sort(&v.sort));
        }
        let _ = writeln!(out, "(assert {})", print_constraint(&self.assertion));
        out.push_str("(check-sat)\n(get-model)\n");
        out
    }

    fn defaults(&self) -> Env {
        self.vars
            .iter()
            .map(|v| (v.name.clone(), default_value(self.datatypes, &v.sort)))
            .collect()
    }

    fn parse_output(&self, stdout: &str) -> Result<SmtResult> {
        let items = parse_all(stdout).map_err(|e| BackendError::Protocol(format!("{e:?} in {stdout:?}")))?;
        let verdict = items.first().and_then(Sexp::symbol);
        match verdict {
            Some("unsat") => Ok(SmtResult::Unsat),
            Some("unknown") => Ok(SmtResult::Unknown("solver returned unknown".into())),
            Some("timeout") => Ok(SmtResult::Timeout),
            Some("sat") => {
                let model = items
                    .get(1)
                    .and_then(Sexp::list)
                    .ok_or_else(|| BackendError::Protocol(format!("missing model in {stdout:?}")))?;
                let mut env = self.defaults();
                for def in model {
                    let Some(parts) = def.list() else { continue };
                    if parts.len() != 5 || !parts[0].is_symbol("define-fun") {
                        continue;
                    }
                    let Some(name) = parts[1].symbol() else { continue };
                    if !parts[2].list().is_some_and(|l| l.is_empty()) || !env.contains_key(name) {
                        continue;
                    }
                    let t = parse_term(&parts[4], self.datatypes, &[])
                        .map_err(|e| BackendError::Protocol(format!("model value for {name}: {e}")))?;
                    let v = Value::from_term(&t.fold_constants())
                        .ok_or_else(|| BackendError::Protocol(format!("non-ground model value for {name}")))?;
                    env.insert(name.to_string(), v);
                }
                Ok(SmtResult::Sat(env))
            }
            _ => Err(BackendError::Protocol(format!("unexpected solver output {stdout:?}"))),
        }
    }
}

/// The smallest value of a sort: `0`, or the least constructor tree.
pub fn default_value(dt: &Datatypes, sort: &Sort) -> Value {
    fn build(dt: &Datatypes, sort: &Sort, min: &std::collections::BTreeMap<String, usize>) -> Value {
        let Sort::Adt(name) = sort else {
            return Value::int(0);
        };
        let decl = dt.adt(name).expect("declared ADT");
        let weight = |c: &crate::chc::Constructor| -> usize {
            1 + c
                .fields
                .iter()
                .map(|f| f.sort.adt_name().map_or(1, |n| min.get(n).copied().unwrap_or(usize::MAX / 4)))
                .sum::<usize>()
        };
        let c = decl.constructors.iter().min_by_key(|c| weight(c)).expect("constructor");
        Value::Adt(c.clone(), c.fields.iter().map(|f| build(dt, &f.sort, min)).collect())
    }
    build(dt, sort, &min_sizes(dt))
}

impl Backend {
    /// Decides `query`; `timeout = None` waits indefinitely.
    pub fn smt_check_sat(&self, query: &SmtQuery<'_>, timeout: Option<Duration>) -> Result<SmtResult> {
        match query.assertion.fold_constants() {
            Constraint::False => return Ok(SmtResult::Unsat),
            Constraint::True => return Ok(SmtResult::Sat(query.defaults())),
            _ => {}
        }
        let out = self.run(&self.config.smt_args, &query.script(), timeout)?;
        if out.timed_out {
            return Ok(SmtResult::Timeout);
        }
        query.parse_output(&out.stdout)
    }

    /// Shorthand: satisfiability of a closed-over-free-variables constraint.
    pub fn check_constraint(&self, c: &Constraint, dt: &Datatypes, logic: Logic, timeout: Option<Duration>) -> Result<SmtResult> {
        self.smt_check_sat(&SmtQuery::new(dt, c.clone(), logic), timeout)
    }
}
