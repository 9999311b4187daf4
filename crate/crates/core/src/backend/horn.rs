//! CHC satisfiability queries: script generation, model and proof extraction.

use std::fmt::Write as _;

use crate::abstraction::{AbstractModel, PredDef};
use crate::chc::{parse_formula, print_system, simplify, ChcSystem, Constraint, Datatypes, ParseError, Sort, Var};
use crate::sexp::{parse_all, Sexp};

use super::proof::{parse_proof, replay, Decide};
use super::smt::{Logic, SmtResult};
use super::{Backend, BackendError, ResolutionProof, Result};

/// Fixedpoint options placed before every CHC script. Without disabling
/// interpolation-based lemma generation, small satisfiable ADT-abstracted
/// systems can stall for minutes.
pub const HORN_OPTIONS: &[(&str, &str)] = &[
    ("fp.xform.slice", "false"),
    ("fp.xform.inline_linear", "false"),
    ("fp.xform.inline_eager", "false"),
    ("fp.spacer.use_iuc", "false"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChcResult {
    /// Satisfiable; the model is `None` when the solver's answer could not be
    /// turned into quantifier-free formulas.
    Sat(Option<AbstractModel>),
    Unsat(ResolutionProof),
    Unknown(String),
}

/// Parses `(define-fun P ((x Int) ...) Bool body)` entries for the
/// predicates of `system`. Predicates absent from the answer are empty.
pub fn parse_model(model: &Sexp, system: &ChcSystem) -> Result<AbstractModel> {
    let unsupported = |msg: String| BackendError::ModelUnsupported(msg);
    let mut defs = model.list().ok_or_else(|| BackendError::Protocol(format!("expected a model, found {model}")))?;
    if defs.first().is_some_and(|d| d.is_symbol("model")) {
        defs = &defs[1..];
    }
    let mut out = AbstractModel::new();
    for def in defs {
        let parts = def.list().unwrap_or(&[]);
        if parts.len() != 5 || !parts[0].is_symbol("define-fun") {
            return Err(unsupported(format!("model entry {def}")));
        }
        let Some(name) = parts[1].symbol().filter(|n| system.predicates.contains_key(*n)) else {
            continue;
        };
        let mut params = Vec::new();
        for p in parts[2].list().ok_or_else(|| unsupported(format!("parameters of {name}")))? {
            let pl = p.list().filter(|l| l.len() == 2).ok_or_else(|| unsupported(format!("parameter {p}")))?;
            let sort = match pl[1].symbol() {
                Some("Int") => Sort::Int,
                Some("Bool") => Sort::Bool,
                Some(s) if system.datatypes.adt(s).is_some() => Sort::adt(s),
                _ => return Err(unsupported(format!("parameter sort {}", pl[1]))),
            };
            let pname = pl[0].symbol().ok_or_else(|| unsupported(format!("parameter {p}")))?;
            params.push(Var::new(pname, sort));
        }
        let body = parse_formula(&parts[4], &system.datatypes, &params).map_err(|e| match e {
            ParseError::Unsupported { .. } | ParseError::Syntax { .. } | ParseError::Sort { .. } => unsupported(format!("{name}: {e}")),
        })?;
        if !body.is_quantifier_free() {
            return Err(unsupported(format!("{name}: quantified interpretation")));
        }
        out.insert(name.to_string(), PredDef { params, body });
    }
    for (name, sorts) in &system.predicates {
        if !out.contains_key(name) {
            let params = sorts.iter().enumerate().map(|(i, s)| Var::new(format!("x!{i}"), s.clone())).collect();
            out.insert(name.clone(), PredDef { params, body: Constraint::False });
        }
    }
    Ok(out)
}

fn all_true(system: &ChcSystem) -> AbstractModel {
    system
        .predicates
        .iter()
        .map(|(name, sorts)| {
            let params = sorts.iter().enumerate().map(|(i, s)| Var::new(format!("x!{i}"), s.clone())).collect();
            (name.clone(), PredDef { params, body: Constraint::True })
        })
        .collect()
}

impl Backend {
    pub fn chc_script(&self, system: &ChcSystem) -> String {
        let mut out = String::new();
        if self.config.proofs {
            out.push_str("(set-option :produce-proofs true)\n");
        }
        for (k, v) in &self.config.chc_options {
            let _ = writeln!(out, "(set-option :{k} {v})");
        }
        out.push_str(&print_system(system));
        out.push_str("(get-model)\n");
        if self.config.proofs {
            out.push_str("(get-proof)\n");
        }
        out
    }

    fn decider(&self, dt: &Datatypes) -> impl FnMut(&Constraint) -> Result<Option<bool>> + '_ {
        let dt = dt.clone();
        let logic = if dt.is_empty() { Logic::Lia } else { Logic::AdtLia };
        let timeout = self.config.timeout;
        move |c: &Constraint| {
            Ok(match self.check_constraint(c, &dt, logic, Some(timeout))? {
                SmtResult::Sat(_) => Some(true),
                SmtResult::Unsat => Some(false),
                SmtResult::Unknown(_) | SmtResult::Timeout => None,
            })
        }
    }

    /// Checks `proof` by replay: the accumulated constraint of a refutation
    /// must be satisfiable.
    pub fn validate_proof(&self, system: &ChcSystem, proof: &ResolutionProof) -> Result<bool> {
        let Ok(residual) = replay(system, proof, false) else {
            return Ok(false);
        };
        let mut decide = self.decider(&system.datatypes);
        Ok(decide(&simplify(&residual))? != Some(false))
    }

    /// Refutation by the internal unfolder with depths `1..=unfold_depth`.
    pub fn unfold_unsat(&self, system: &ChcSystem) -> Result<Option<ResolutionProof>> {
        let mut decide = self.decider(&system.datatypes);
        super::internal_unfold_unsat(system, self.config.unfold_depth, &mut decide as &mut Decide<'_>)
    }

    pub fn chc_check_sat(&self, system: &ChcSystem) -> Result<ChcResult> {
        if system.goal_ids().is_empty() {
            return Ok(ChcResult::Sat(Some(all_true(system))));
        }
        let out = self.run(&self.config.chc_args, &self.chc_script(system), Some(self.config.timeout))?;
        if out.timed_out {
            return Ok(ChcResult::Unknown("timeout".into()));
        }
        let items = parse_all(&out.stdout).map_err(|e| BackendError::Protocol(format!("{}: {} in {:?}", e.pos, e.msg, out.stdout)))?;
        match items.first().and_then(Sexp::symbol) {
            Some("sat") => {
                let model = items.get(1).ok_or_else(|| BackendError::Protocol("missing model".into()))?;
                match parse_model(model, system) {
                    Ok(m) => Ok(ChcResult::Sat(Some(m))),
                    Err(BackendError::ModelUnsupported(msg)) => {
                        log::warn!("model unavailable: {msg}");
                        Ok(ChcResult::Sat(None))
                    }
                    Err(e) => Err(e),
                }
            }
            Some("unsat") => self.unsat_proof(system, &out.stdout).map(ChcResult::Unsat),
            Some("unknown") => Ok(ChcResult::Unknown("solver returned unknown".into())),
            _ => Err(BackendError::Protocol(format!("unexpected solver output {:?}", out.stdout))),
        }
    }

    fn unsat_proof(&self, system: &ChcSystem, stdout: &str) -> Result<ResolutionProof> {
        let parsed = if self.config.proofs {
            let mut decide = self.decider(&system.datatypes);
            parse_proof(stdout, system, &mut decide)
        } else {
            Err(BackendError::ProofParse("proofs disabled".into()))
        };
        let first_err = match parsed {
            Ok(p) if self.validate_proof(system, &p)? => return Ok(p),
            Ok(p) => BackendError::ProofParse(format!("solver proof does not replay: {p}")),
            Err(e) => e,
        };
        log::info!("{first_err}; trying the internal unfolder");
        match self.unfold_unsat(system)? {
            Some(p) => Ok(p),
            None => Err(first_err),
        }
    }
}
