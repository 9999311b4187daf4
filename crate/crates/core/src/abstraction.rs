//! Abstraction of ADT clauses into integer clauses through a catamorphism,
//! and concretization of integer models back to the ADT side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cata::Catamorphism;
use crate::chc::{
    eval_constraint, print_constraint, print_sort, ChcSystem, Clause, ClauseId, CmpOp, Constraint, Datatypes, Env,
    EvalError, Head, PredApp, Sort, Subst, Term, Value, Var,
};
use crate::sample::ValueSampler;
use crate::sexp::quote_symbol;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AbstractionError {
    #[error("ADT variable {0} has no abstraction")]
    UnmappedVariable(String),
    #[error("no structure map for constructor {0}")]
    MissingMap(String),
    #[error("cannot abstract {0}")]
    Unsupported(String),
}

/// ADT variable name to its tuple of integer variables.
pub type AbstractionEnv = BTreeMap<String, Vec<Var>>;

/// Abstract image of a term: integer terms stay single, ADT terms become tuples.
pub fn abstract_term(env: &AbstractionEnv, cata: &Catamorphism, t: &Term) -> Result<Vec<Term>, AbstractionError> {
    Ok(match t {
        Term::Var(v) if v.sort.is_adt() => env
            .get(&v.name)
            .ok_or_else(|| AbstractionError::UnmappedVariable(v.name.clone()))?
            .iter()
            .cloned()
            .map(Term::Var)
            .collect(),
        Term::Var(_) | Term::Int(_) => vec![t.clone()],
        Term::Arith(op, a, b) => vec![Term::arith(*op, abstract_int(env, cata, a)?, abstract_int(env, cata, b)?)],
        Term::Cons(c, args) => {
            let map = cata.maps.get(&c.name).ok_or_else(|| AbstractionError::MissingMap(c.name.clone()))?;
            let abs: Vec<Vec<Term>> = args.iter().map(|a| abstract_term(env, cata, a)).collect::<Result<_, _>>()?;
            let mut ints = Vec::with_capacity(abs.len());
            let mut children = Vec::with_capacity(abs.len());
            for (tuple, f) in abs.into_iter().zip(&c.fields) {
                if f.sort.is_adt() {
                    ints.push(Term::int(0));
                    children.push(tuple);
                } else {
                    ints.extend(tuple);
                    children.push(Vec::new());
                }
            }
            map.to_terms(&ints, &children).iter().map(Term::fold_constants).collect()
        }
        Term::CataApp { component, arg, .. } => {
            let tuple = abstract_term(env, cata, arg)?;
            vec![tuple
                .into_iter()
                .nth(*component)
                .ok_or_else(|| AbstractionError::Unsupported(format!("component {component} beyond the degree")))?]
        }
        Term::Sel(..) => return Err(AbstractionError::Unsupported(format!("selector term {}", crate::chc::print_term(t)))),
    })
}

fn abstract_int(env: &AbstractionEnv, cata: &Catamorphism, t: &Term) -> Result<Term, AbstractionError> {
    let mut v = abstract_term(env, cata, t)?;
    Ok(v.swap_remove(0))
}

pub fn abstract_constraint(env: &AbstractionEnv, cata: &Catamorphism, c: &Constraint) -> Result<Constraint, AbstractionError> {
    Ok(match c {
        Constraint::True | Constraint::False => c.clone(),
        Constraint::And(ps) => Constraint::and(ps.iter().map(|p| abstract_constraint(env, cata, p)).collect::<Result<Vec<_>, _>>()?),
        Constraint::Or(ps) => Constraint::or(ps.iter().map(|p| abstract_constraint(env, cata, p)).collect::<Result<Vec<_>, _>>()?),
        Constraint::Not(p) => Constraint::not(abstract_constraint(env, cata, p)?),
        Constraint::Cmp(op @ (CmpOp::AdtEq | CmpOp::AdtNe), a, b) => {
            let xs = abstract_term(env, cata, a)?;
            let ys = abstract_term(env, cata, b)?;
            let parts = xs.into_iter().zip(ys);
            if *op == CmpOp::AdtEq {
                Constraint::and(parts.map(|(x, y)| Constraint::Cmp(CmpOp::Eq, x, y)).collect::<Vec<_>>())
            } else {
                Constraint::or(parts.map(|(x, y)| Constraint::Cmp(CmpOp::Ne, x, y)).collect::<Vec<_>>())
            }
        }
        Constraint::Cmp(op, a, b) => Constraint::Cmp(*op, abstract_int(env, cata, a)?, abstract_int(env, cata, b)?),
        Constraint::Test(..) => return Err(AbstractionError::Unsupported("tester".into())),
        Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
            if v.sort.is_adt() {
                return Err(AbstractionError::Unsupported("quantifier over an ADT variable".into()));
            }
            let body = Box::new(abstract_constraint(env, cata, b)?);
            match c {
                Constraint::Exists(..) => Constraint::Exists(v.clone(), body),
                _ => Constraint::Forall(v.clone(), body),
            }
        }
    })
}

fn abstract_atom(env: &AbstractionEnv, cata: &Catamorphism, a: &PredApp) -> Result<PredApp, AbstractionError> {
    let mut args = Vec::new();
    for t in &a.args {
        args.extend(abstract_term(env, cata, t)?);
    }
    Ok(PredApp::new(a.pred.clone(), args))
}

/// Deterministic environment: `x` becomes `x!0 .. x!(N-1)`, with a further
/// suffix if that name is already bound in the clause.
pub fn clause_env(clause: &Clause, degree: usize) -> AbstractionEnv {
    let mut taken: BTreeSet<String> = clause.vars.iter().map(|v| v.name.clone()).collect();
    let mut env = AbstractionEnv::new();
    for v in clause.vars.iter().filter(|v| v.sort.is_adt()) {
        let mut tuple = Vec::with_capacity(degree);
        for j in 0..degree {
            let mut name = format!("{}!{j}", v.name);
            let mut k = 0;
            while taken.contains(&name) {
                name = format!("{}!{j}!{k}", v.name);
                k += 1;
            }
            taken.insert(name.clone());
            tuple.push(Var::int(name));
        }
        env.insert(v.name.clone(), tuple);
    }
    env
}

pub fn abstract_clause(cata: &Catamorphism, clause: &Clause) -> Result<(Clause, AbstractionEnv), AbstractionError> {
    let env = clause_env(clause, cata.degree);
    let mut vars = Vec::new();
    for v in &clause.vars {
        match env.get(&v.name) {
            Some(tuple) => vars.extend(tuple.iter().cloned()),
            None => vars.push(v.clone()),
        }
    }
    let head = match &clause.head {
        Head::False => Head::False,
        Head::Pred(p) => Head::Pred(abstract_atom(&env, cata, p)?),
    };
    let constraint = abstract_constraint(&env, cata, &clause.constraint)?;
    let body = clause.body.iter().map(|a| abstract_atom(&env, cata, a)).collect::<Result<_, _>>()?;
    Ok((Clause::new(vars, head, constraint, body), env))
}

pub fn abstract_sorts(sorts: &[Sort], degree: usize) -> Vec<Sort> {
    sorts
        .iter()
        .flat_map(|s| {
            let n = if s.is_adt() { degree } else { 1 };
            std::iter::repeat_n(Sort::Int, n)
        })
        .collect()
}

/// Integer system together with the clause correspondence used for replay.
#[derive(Debug, Clone)]
pub struct AbstractSystem {
    pub system: ChcSystem,
    pub envs: Vec<AbstractionEnv>,
    /// Abstract clause id to original clause id.
    pub origin: Vec<ClauseId>,
}

pub fn abstract_system(cata: &Catamorphism, system: &ChcSystem) -> Result<AbstractSystem, AbstractionError> {
    let mut out = ChcSystem::new(Datatypes::default());
    out.meta = system.meta.clone();
    out.meta.flags.abstracted = true;
    for (name, sorts) in &system.predicates {
        out.declare_pred(name.clone(), abstract_sorts(sorts, cata.degree));
    }
    let mut envs = Vec::with_capacity(system.clauses.len());
    for c in &system.clauses {
        let (a, env) = abstract_clause(cata, c)?;
        out.clauses.push(a);
        envs.push(env);
    }
    Ok(AbstractSystem {
        system: out,
        envs,
        origin: (0..system.clauses.len()).collect(),
    })
}

/// Interpretation of one predicate: a formula over its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredDef {
    pub params: Vec<Var>,
    pub body: Constraint,
}

/// Predicate interpretations over integers, as returned by a backend.
pub type AbstractModel = IndexMap<String, PredDef>;

/// Predicate interpretations over the original sorts, with ADT arguments
/// observed only through the catamorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteModel {
    pub preds: IndexMap<String, PredDef>,
    pub cata: Catamorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConcretizeError {
    #[error("the abstract model does not define {0}")]
    MissingDefinition(String),
    #[error("definition of {0} has the wrong arity")]
    Arity(String),
}

/// Replaces each abstract parameter tuple by catamorphism applications on
/// the corresponding ADT parameter.
pub fn concretize_model(model: &AbstractModel, cata: &Catamorphism, system: &ChcSystem) -> Result<ConcreteModel, ConcretizeError> {
    let mut preds = IndexMap::new();
    for (name, sorts) in &system.predicates {
        let def = model.get(name).ok_or_else(|| ConcretizeError::MissingDefinition(name.clone()))?;
        if def.params.len() != abstract_sorts(sorts, cata.degree).len() {
            return Err(ConcretizeError::Arity(name.clone()));
        }
        let params: Vec<Var> = sorts.iter().enumerate().map(|(i, s)| Var::new(format!("x{i}"), s.clone())).collect();
        let mut subst = Subst::new();
        let mut slots = def.params.iter();
        for p in &params {
            match &p.sort {
                Sort::Adt(adt) => {
                    for j in 0..cata.degree {
                        let slot = slots.next().expect("arity checked");
                        subst.insert(
                            slot.name.clone(),
                            Term::CataApp {
                                adt: adt.clone(),
                                component: j,
                                arg: Box::new(Term::Var(p.clone())),
                            },
                        );
                    }
                }
                _ => {
                    let slot = slots.next().expect("arity checked");
                    subst.insert(slot.name.clone(), Term::Var(p.clone()));
                }
            }
        }
        preds.insert(
            name.clone(),
            PredDef {
                params,
                body: def.body.substitute(&subst),
            },
        );
    }
    Ok(ConcreteModel { preds, cata: cata.clone() })
}

impl ConcreteModel {
    pub fn holds(&self, atom: &PredApp, env: &Env) -> Result<bool, EvalError> {
        let def = &self.preds[&atom.pred];
        let mut local = Env::new();
        for (p, t) in def.params.iter().zip(&atom.args) {
            local.insert(p.name.clone(), crate::chc::eval_term(t, env, None)?);
        }
        let fold = self.cata.fold_fn();
        eval_constraint(&def.body, &local, Some(&fold))
    }

    /// SMT-LIB2 rendering: catamorphism definitions, then one `define-fun`
    /// per predicate listed in `only` (all when `None`).
    pub fn to_smt(&self, dt: &Datatypes, only: Option<&[String]>) -> String {
        let mut out = self.cata.to_smt(dt);
        for (name, def) in &self.preds {
            if only.is_some_and(|o| !o.contains(name)) {
                continue;
            }
            let params: Vec<String> = def
                .params
                .iter()
                .map(|p| format!("({} {})", quote_symbol(&p.name), print_sort(&p.sort)))
                .collect();
            let _ = writeln!(out, "(define-fun {} ({}) Bool {})", quote_symbol(name), params.join(" "), print_constraint(&def.body));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: ClauseId,
    pub witness: Env,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelCheckReport {
    pub checked: usize,
    /// Samples whose evaluation was undefined (e.g. a selector on the wrong constructor).
    pub skipped: usize,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    pub samples: usize,
    pub max_term_size: usize,
    pub int_lo: i64,
    pub int_hi: i64,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            samples: 500,
            max_term_size: 8,
            int_lo: -16,
            int_hi: 16,
            seed: 0,
        }
    }
}

/// Evaluates every clause under `model` at random ground instances.
pub fn check_model_on_ground_instances(model: &ConcreteModel, system: &ChcSystem, cfg: &SampleConfig) -> ModelCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sampler = ValueSampler::new(&system.datatypes, cfg.int_lo, cfg.int_hi);
    let mut report = ModelCheckReport::default();
    for (id, clause) in system.clauses.iter().enumerate() {
        let rounds = if clause.vars.is_empty() { 1 } else { cfg.samples };
        for _ in 0..rounds {
            let env: Env = clause
                .vars
                .iter()
                .map(|v| (v.name.clone(), sampler.stratified(&v.sort, cfg.max_term_size, &mut rng)))
                .collect();
            match clause_holds(model, clause, &env) {
                Ok(true) => report.checked += 1,
                Ok(false) => {
                    report.checked += 1;
                    report.violations.push(Violation { clause: id, witness: env });
                }
                Err(_) => report.skipped += 1,
            }
        }
    }
    report
}

fn clause_holds(model: &ConcreteModel, clause: &Clause, env: &Env) -> Result<bool, EvalError> {
    let fold = model.cata.fold_fn();
    if !eval_constraint(&clause.constraint, env, Some(&fold))? {
        return Ok(true);
    }
    for a in &clause.body {
        if !model.holds(a, env)? {
            return Ok(true);
        }
    }
    match &clause.head {
        Head::False => Ok(false),
        Head::Pred(p) => model.holds(p, env),
    }
}

/// Every sort annotation, term and declaration is integer-only.
pub fn is_adt_free(system: &ChcSystem) -> bool {
    fn term_ok(t: &Term) -> bool {
        !t.any(|s| matches!(s, Term::Cons(..) | Term::Sel(..) | Term::CataApp { .. }) || s.sort().is_adt())
    }
    fn constraint_ok(c: &Constraint) -> bool {
        let mut ok = true;
        c.for_each_term(&mut |t| ok &= term_ok(t));
        ok && !c.any_atom(&mut |a| matches!(a, Constraint::Test(..) | Constraint::Cmp(CmpOp::AdtEq | CmpOp::AdtNe, ..)))
    }
    system.datatypes.is_empty()
        && system.predicates.values().all(|s| s.iter().all(|s| !s.is_adt()))
        && system.clauses.iter().all(|c| {
            c.vars.iter().all(|v| !v.sort.is_adt())
                && constraint_ok(&c.constraint)
                && c.body.iter().chain(c.head.pred()).all(|a| a.args.iter().all(term_ok))
        })
}

/// Evaluates the sampled `values` of a clause's ADT variables into the
/// abstract environment (used to relate concrete and abstract instances).
pub fn abstract_env(env: &AbstractionEnv, cata: &Catamorphism, values: &Env) -> Env {
    let mut out = Env::new();
    for (name, v) in values {
        match (env.get(name), v) {
            (Some(tuple), Value::Adt(..)) => {
                for (var, n) in tuple.iter().zip(cata.eval(v)) {
                    out.insert(var.name.clone(), Value::Int(n));
                }
            }
            _ => {
                out.insert(name.clone(), v.clone());
            }
        }
    }
    out
}
