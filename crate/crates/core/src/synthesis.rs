//! Catamorphism synthesis: the encoder, ground reduction of encoded
//! obligations, candidate testing, and the CEGIS loop over a template.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::backend::{Backend, BackendError, Logic, SmtQuery, SmtResult};
use crate::cata::{Catamorphism, ParamAssignment, TemplateCatamorphism};
use crate::chc::{eval_constraint, print_constraint, CmpOp, Constraint, Datatypes, Env, Subst, Term, Value, Var};

/// A closed, valid formula `∀ vars. body` that the next catamorphism must
/// keep valid under encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofObligation {
    pub vars: Vec<Var>,
    pub body: Constraint,
}

impl ProofObligation {
    /// `∀ x̄. ¬θ` for a spurious counterexample θ.
    pub fn from_spurious(theta: &Constraint) -> ProofObligation {
        ProofObligation {
            vars: theta.free_vars().into_iter().collect(),
            body: Constraint::not(theta.clone()),
        }
    }
}

impl fmt::Display for ProofObligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vars.iter().map(|v| format!("({} {})", v.name, crate::chc::print_sort(&v.sort))).collect();
        write!(f, "(forall ({}) {})", vs.join(" "), print_constraint(&self.body))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("catamorphism applied to a non-ground term {0}")]
    NonGroundApplication(String),
    #[error("first candidate test failed: {0}")]
    FirstTestFailed(String),
}

fn cata_app(adt: &str, component: usize, t: &Term) -> Term {
    Term::CataApp {
        adt: adt.to_string(),
        component,
        arg: Box::new(t.clone()),
    }
}

/// The constraint-generation map: ADT equalities become componentwise
/// equalities of catamorphism applications; everything else is kept.
pub fn encode(phi: &Constraint, degree: usize) -> Constraint {
    match phi {
        Constraint::True | Constraint::False | Constraint::Test(..) => phi.clone(),
        Constraint::And(ps) => Constraint::And(ps.iter().map(|p| encode(p, degree)).collect()),
        Constraint::Or(ps) => Constraint::Or(ps.iter().map(|p| encode(p, degree)).collect()),
        Constraint::Not(p) => Constraint::Not(Box::new(encode(p, degree))),
        Constraint::Exists(v, p) => Constraint::Exists(v.clone(), Box::new(encode(p, degree))),
        Constraint::Forall(v, p) => Constraint::Forall(v.clone(), Box::new(encode(p, degree))),
        Constraint::Cmp(op @ (CmpOp::AdtEq | CmpOp::AdtNe), a, b) => {
            let adt = a.sort().adt_name().expect("ADT equality").to_string();
            let eqs: Vec<Constraint> = (0..degree)
                .map(|j| Constraint::Cmp(CmpOp::Eq, cata_app(&adt, j, a), cata_app(&adt, j, b)))
                .collect();
            let eq = if eqs.len() == 1 { eqs.into_iter().next().unwrap() } else { Constraint::And(eqs) };
            if *op == CmpOp::AdtEq {
                eq
            } else {
                Constraint::Not(Box::new(eq))
            }
        }
        Constraint::Cmp(..) => phi.clone(),
    }
}

/// Grounds `encoded` with `ground` and unfolds every catamorphism
/// application through the template's symbolic maps. The result mentions
/// template parameters only.
pub fn reduce_ground(encoded: &Constraint, template: &TemplateCatamorphism, ground: &Env) -> Result<Constraint, SynthError> {
    let subst: Subst = ground.iter().map(|(k, v)| (k.clone(), v.to_term())).collect();
    let grounded = encoded.substitute(&subst);
    let mut err = None;
    let unfolded = grounded.map_terms(&mut |t| unfold(t, template, &mut err));
    match err {
        Some(e) => Err(e),
        None => Ok(unfolded.fold_constants()),
    }
}

fn unfold(t: &Term, template: &TemplateCatamorphism, err: &mut Option<SynthError>) -> Term {
    match t {
        Term::CataApp { component, arg, .. } => match Value::from_term(&arg.fold_constants()) {
            Some(v) => template.eval_symbolic(&v).swap_remove(*component),
            None => {
                err.get_or_insert_with(|| SynthError::NonGroundApplication(crate::chc::print_term(arg)));
                t.clone()
            }
        },
        Term::Arith(op, a, b) => Term::Arith(*op, Box::new(unfold(a, template, err)), Box::new(unfold(b, template, err))),
        Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| unfold(a, template, err)).collect()),
        Term::Sel(c, i, a) => Term::Sel(c.clone(), *i, Box::new(unfold(a, template, err))),
        Term::Var(_) | Term::Int(_) => t.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestOutcome {
    /// An assignment under which the encoded obligation is false.
    Counterexample(Env),
    Valid,
    TimeoutAssumedValid,
}

/// Searches for a violation of `⟦body⟧_cata`.
pub fn test_candidate(
    backend: &Backend,
    body: &Constraint,
    cata: &Catamorphism,
    dt: &Datatypes,
    timeout: Option<Duration>,
) -> Result<TestOutcome, BackendError> {
    let negated = Constraint::not(encode(body, cata.degree));
    let mut q = SmtQuery::new(dt, negated, Logic::AdtLia).with_definitions(cata.to_smt(dt));
    q.vars = body.free_vars().into_iter().collect();
    Ok(match backend.smt_check_sat(&q, timeout)? {
        SmtResult::Sat(env) => TestOutcome::Counterexample(env),
        SmtResult::Unsat => TestOutcome::Valid,
        SmtResult::Unknown(_) | SmtResult::Timeout => TestOutcome::TimeoutAssumedValid,
    })
}

/// Limits for one synthesis call.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Test timeout after the first iteration.
    pub default_timeout: Duration,
    /// Timeout of the first test; `None` waits indefinitely.
    pub first_timeout: Option<Duration>,
    /// Timeout for solving the parameter constraint.
    pub theta_timeout: Duration,
    /// Largest grid enumerated when the solver cannot decide the parameter constraint.
    pub grid_limit: u64,
}

impl Default for SynthConfig {
    fn default() -> SynthConfig {
        SynthConfig {
            default_timeout: Duration::from_secs(1),
            first_timeout: None,
            theta_timeout: Duration::from_secs(10),
            grid_limit: 1_000_000,
        }
    }
}

/// Result of a successful synthesis call.
#[derive(Debug, Clone)]
pub struct Synthesized {
    pub cata: Catamorphism,
    pub assignment: ParamAssignment,
    pub theta: Constraint,
    pub iterations: usize,
}

fn theta_with_bounds(theta: &Constraint, template: &TemplateCatamorphism) -> Constraint {
    let mut parts = vec![theta.clone()];
    for p in &template.params {
        let x = Term::int_var(p.name.clone());
        if let Some(lo) = &p.lo {
            parts.push(Constraint::cmp(CmpOp::Le, Term::Int(lo.clone()), x.clone()));
        }
        if let Some(hi) = &p.hi {
            parts.push(Constraint::cmp(CmpOp::Le, x, Term::Int(hi.clone())));
        }
    }
    Constraint::and(parts)
}

/// A model of Θ within the template bounds: first from the solver (NIA),
/// then by lexicographic grid enumeration when the solver gives up.
pub fn solve_theta(
    backend: &Backend,
    theta: &Constraint,
    template: &TemplateCatamorphism,
    cfg: &SynthConfig,
) -> Result<Option<ParamAssignment>, BackendError> {
    let assertion = theta_with_bounds(theta, template);
    let no_adts = Datatypes::default();
    let mut q = SmtQuery::new(&no_adts, assertion, Logic::Nia);
    q.vars = template.param_vars();
    match backend.smt_check_sat(&q, Some(cfg.theta_timeout))? {
        SmtResult::Sat(env) => {
            let m: ParamAssignment = env
                .into_iter()
                .filter_map(|(k, v)| v.as_int().cloned().map(|n| (k, n)))
                .collect();
            return Ok(Some(m));
        }
        SmtResult::Unsat => return Ok(None),
        SmtResult::Unknown(_) | SmtResult::Timeout => {}
    }
    Ok(grid_search(theta, template, cfg.grid_limit))
}

/// First grid point (lexicographic in parameter order) satisfying Θ.
pub fn grid_search(theta: &Constraint, template: &TemplateCatamorphism, limit: u64) -> Option<ParamAssignment> {
    let size = template.grid_size()?;
    if size > BigInt::from(limit) {
        log::warn!("parameter grid of {size} points exceeds the limit {limit}");
        return None;
    }
    let ranges: Vec<(i64, i64)> = template
        .params
        .iter()
        .map(|p| (p.lo.as_ref().unwrap().to_i64().unwrap(), p.hi.as_ref().unwrap().to_i64().unwrap()))
        .collect();
    let mut point: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        let env: Env = template
            .params
            .iter()
            .zip(&point)
            .map(|(p, &v)| (p.name.clone(), Value::int(v)))
            .collect();
        if eval_constraint(theta, &env, None).unwrap_or(false) {
            return Some(env.into_iter().map(|(k, v)| (k, v.as_int().unwrap().clone())).collect());
        }
        // Odometer increment, last parameter fastest.
        let mut i = point.len();
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if point[i] < ranges[i].1 {
                point[i] += 1;
                break;
            }
            point[i] = ranges[i].0;
        }
    }
}

/// The synthesis procedure. Each obligation is tested separately and every
/// counterexample found contributes a grounded constraint to Θ. Returns
/// `None` when Θ has no model within the template.
pub fn synthesis(
    backend: &Backend,
    obligations: &[ProofObligation],
    cata: &Catamorphism,
    theta: &Constraint,
    template: &TemplateCatamorphism,
    dt: &Datatypes,
    cfg: &SynthConfig,
) -> Result<Option<Synthesized>, SynthError> {
    let encoded: Vec<Constraint> = obligations.iter().map(|o| encode(&o.body, template.degree)).collect();
    let mut theta = theta.clone();
    let mut current = cata.clone();
    let mut assignment = ParamAssignment::new();
    let mut timeout = cfg.first_timeout;
    let mut iterations = 0;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut refuted = false;
        for (ob, enc) in obligations.iter().zip(&encoded) {
            let outcome = match test_candidate(backend, &ob.body, &current, dt, timeout) {
                Ok(o) => o,
                Err(e) if iterations == 0 => return Err(SynthError::FirstTestFailed(e.to_string())),
                Err(e) => {
                    log::warn!("candidate test failed, assuming valid: {e}");
                    TestOutcome::TimeoutAssumedValid
                }
            };
            if let TestOutcome::Counterexample(env) = outcome {
                let reduced = reduce_ground(enc, template, &env)?;
                log::debug!("test counterexample gives {}", print_constraint(&reduced));
                if seen.insert(print_constraint(&reduced)) {
                    theta = Constraint::and([theta, reduced]);
                }
                refuted = true;
            }
        }
        if !refuted {
            if iterations == 0 {
                log::warn!("no counterexample for the current catamorphism; obligations already hold");
                return Ok(None);
            }
            return Ok(Some(Synthesized {
                cata: current,
                assignment,
                theta,
                iterations,
            }));
        }
        timeout = Some(cfg.default_timeout);
        let m = match solve_theta(backend, &theta, template, cfg) {
            Ok(Some(m)) => m,
            Ok(None) => return Ok(None),
            Err(e) => {
                log::warn!("parameter search failed: {e}");
                return Ok(None);
            }
        };
        current = template.instantiate(&m).expect("assignment within template bounds");
        assignment = m;
        iterations += 1;
        log::debug!("candidate {iterations}: {current}");
    }
}
