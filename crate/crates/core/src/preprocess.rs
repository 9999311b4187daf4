//! Normalization of parsed systems into the constructor-only fragment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::chc::{ChcSystem, Clause, CmpOp, Constraint, Constructor, Head, PredApp, Sort, Term, Var};

/// Prefix of the generated admissibility predicates.
pub const ADM_PREFIX: &str = "adm!";
/// Prefix of the generated ADT disequality predicates.
pub const DISEQ_PREFIX: &str = "diseq!";

pub fn adm_pred(adt: &str) -> String {
    format!("{ADM_PREFIX}{adt}")
}

pub fn is_adm_pred(name: &str) -> bool {
    name.starts_with(ADM_PREFIX)
}

pub fn diseq_pred(adt: &str) -> String {
    format!("{DISEQ_PREFIX}{adt}")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessReport {
    pub eliminated_selectors: usize,
    pub eliminated_testers: usize,
    pub diseq_predicates: Vec<String>,
    /// ADT sort name to admissibility predicate name.
    pub admissibility_preds: BTreeMap<String, String>,
    pub fresh_var_count: usize,
}

impl PreprocessReport {
    fn merge(&mut self, other: PreprocessReport) {
        self.eliminated_selectors += other.eliminated_selectors;
        self.eliminated_testers += other.eliminated_testers;
        self.diseq_predicates.extend(other.diseq_predicates);
        self.admissibility_preds.extend(other.admissibility_preds);
        self.fresh_var_count += other.fresh_var_count;
    }
}

impl fmt::Display for PreprocessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "selectors eliminated: {}, testers eliminated: {}, fresh variables: {}",
            self.eliminated_selectors, self.eliminated_testers, self.fresh_var_count
        )?;
        if !self.diseq_predicates.is_empty() {
            write!(f, ", disequality predicates: {}", self.diseq_predicates.join(" "))?;
        }
        if !self.admissibility_preds.is_empty() {
            let names: Vec<&str> = self.admissibility_preds.values().map(String::as_str).collect();
            write!(f, ", admissibility predicates: {}", names.join(" "))?;
        }
        Ok(())
    }
}

/// Full pipeline; `augment` is only switched off for diagnostics.
pub fn preprocess(system: &ChcSystem, augment: bool) -> (ChcSystem, PreprocessReport) {
    let (s, mut report) = eliminate_selectors_testers(system);
    let (s, r) = encode_adt_disequality(&s);
    report.merge(r);
    if !augment {
        return (s, report);
    }
    let (s, r) = augment_admissibility(&s);
    report.merge(r);
    (s, report)
}

struct Fresh<'a> {
    taken: BTreeSet<String>,
    count: &'a mut usize,
}

impl Fresh<'_> {
    fn var(&mut self, base: &str, sort: Sort) -> Var {
        loop {
            let name = format!("{base}!{}", *self.count);
            *self.count += 1;
            if self.taken.insert(name.clone()) {
                return Var::new(name, sort);
            }
        }
    }
}

fn clause_terms(c: &Clause) -> Vec<&Term> {
    let mut out = Vec::new();
    if let Head::Pred(p) = &c.head {
        out.extend(p.args.iter());
    }
    c.constraint.for_each_term(&mut |t| out.push(t));
    for a in &c.body {
        out.extend(a.args.iter());
    }
    out
}

fn has_sel(t: &Term) -> bool {
    t.any(|s| matches!(s, Term::Sel(..)))
}

/// An ADT term under a selector or tester that contains no selector itself.
fn find_target(c: &Clause) -> Option<Term> {
    let mut found = None;
    for t in clause_terms(c) {
        t.any(|s| match s {
            Term::Sel(_, _, arg) if !has_sel(arg) => {
                found = Some((**arg).clone());
                true
            }
            _ => false,
        });
        if found.is_some() {
            return found;
        }
    }
    c.constraint.any_atom(&mut |a| match a {
        Constraint::Test(_, t) if !has_sel(t) => {
            found = Some(t.clone());
            true
        }
        _ => false,
    });
    found
}

fn count_sels(c: &Clause) -> usize {
    let mut n = 0;
    for t in clause_terms(c) {
        t.any(|s| {
            if matches!(s, Term::Sel(..)) {
                n += 1;
            }
            false
        });
    }
    n
}

fn count_tests(c: &Constraint) -> usize {
    let mut n = 0;
    c.any_atom(&mut |a| {
        if matches!(a, Constraint::Test(..)) {
            n += 1;
        }
        false
    });
    n
}

struct CaseRewrite<'a> {
    target: &'a Term,
    ctor: &'a Arc<Constructor>,
    fields: &'a [Var],
    junk: BTreeMap<(String, usize), Var>,
}

impl CaseRewrite<'_> {
    fn term(&mut self, t: &Term, fresh: &mut Fresh<'_>) -> Term {
        match t {
            Term::Sel(c, k, arg) => {
                let arg = self.term(arg, fresh);
                if arg != *self.target {
                    return Term::Sel(c.clone(), *k, Box::new(arg));
                }
                if c.name == self.ctor.name {
                    Term::Var(self.fields[*k].clone())
                } else {
                    let key = (c.name.clone(), *k);
                    let sort = c.fields[*k].sort.clone();
                    let v = self.junk.entry(key).or_insert_with(|| fresh.var("sel", sort)).clone();
                    Term::Var(v)
                }
            }
            Term::Var(_) | Term::Int(_) => t.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| self.term(a, fresh)).collect()),
            Term::Arith(op, a, b) => Term::arith(*op, self.term(a, fresh), self.term(b, fresh)),
            Term::CataApp { adt, component, arg } => Term::CataApp {
                adt: adt.clone(),
                component: *component,
                arg: Box::new(self.term(arg, fresh)),
            },
        }
    }

    fn constraint(&mut self, c: &Constraint, fresh: &mut Fresh<'_>) -> Constraint {
        match c {
            Constraint::True | Constraint::False => c.clone(),
            Constraint::And(ps) => Constraint::and(ps.iter().map(|p| self.constraint(p, fresh)).collect::<Vec<_>>()),
            Constraint::Or(ps) => Constraint::or(ps.iter().map(|p| self.constraint(p, fresh)).collect::<Vec<_>>()),
            Constraint::Not(p) => Constraint::not(self.constraint(p, fresh)),
            Constraint::Cmp(op, a, b) => Constraint::Cmp(*op, self.term(a, fresh), self.term(b, fresh)),
            Constraint::Test(d, t) => {
                let t = self.term(t, fresh);
                if t == *self.target {
                    crate::chc::bool_constraint(d.name == self.ctor.name)
                } else {
                    Constraint::Test(d.clone(), t)
                }
            }
            Constraint::Exists(v, b) => Constraint::Exists(v.clone(), Box::new(self.constraint(b, fresh))),
            Constraint::Forall(v, b) => Constraint::Forall(v.clone(), Box::new(self.constraint(b, fresh))),
        }
    }

    fn atom(&mut self, a: &PredApp, fresh: &mut Fresh<'_>) -> PredApp {
        PredApp::new(a.pred.clone(), a.args.iter().map(|t| self.term(t, fresh)).collect())
    }
}

/// Replaces selector applications and testers by a case split over the
/// constructors of the inspected term, one clause per case.
pub fn eliminate_selectors_testers(system: &ChcSystem) -> (ChcSystem, PreprocessReport) {
    let mut report = PreprocessReport::default();
    let mut out = system.clone();
    out.clauses.clear();
    let mut work: Vec<Clause> = system.clauses.iter().rev().cloned().collect();
    for c in &system.clauses {
        report.eliminated_selectors += count_sels(c);
        report.eliminated_testers += count_tests(&c.constraint);
    }
    while let Some(clause) = work.pop() {
        let Some(target) = find_target(&clause) else {
            out.clauses.push(clause);
            continue;
        };
        let adt = target.sort().adt_name().expect("selector target has an ADT sort").to_string();
        let decl = system.datatypes.adt(&adt).expect("declared ADT");
        let mut cases = Vec::new();
        for ctor in &decl.constructors {
            let mut fresh = Fresh {
                taken: clause.vars.iter().map(|v| v.name.clone()).collect(),
                count: &mut report.fresh_var_count,
            };
            let fields: Vec<Var> = ctor.fields.iter().map(|f| fresh.var(&f.selector, f.sort.clone())).collect();
            let mut rw = CaseRewrite {
                target: &target,
                ctor,
                fields: &fields,
                junk: BTreeMap::new(),
            };
            let head = match &clause.head {
                Head::False => Head::False,
                Head::Pred(p) => Head::Pred(rw.atom(p, &mut fresh)),
            };
            let body: Vec<PredApp> = clause.body.iter().map(|a| rw.atom(a, &mut fresh)).collect();
            let rewritten = rw.constraint(&clause.constraint, &mut fresh);
            let case_eq = Constraint::eq(
                target.clone(),
                Term::Cons(ctor.clone(), fields.iter().cloned().map(Term::Var).collect()),
            );
            let constraint = Constraint::and([case_eq, rewritten]).fold_constants();
            if constraint == Constraint::False {
                continue;
            }
            let junk: Vec<Var> = rw.junk.into_values().collect();
            let mut vars = clause.vars.clone();
            vars.extend(fields);
            vars.extend(junk);
            cases.push(Clause::new(vars, head, constraint, body));
        }
        work.extend(cases.into_iter().rev());
    }
    out.meta.flags.selectors_eliminated = true;
    (out, report)
}

fn has_adt_ne(c: &Constraint) -> bool {
    c.any_atom(&mut |a| matches!(a, Constraint::Cmp(CmpOp::AdtNe, ..)))
}

/// Disjunctive split restricted to disjunctions that mention `≠_adt`;
/// returns alternatives as conjunct lists.
fn split_ne(c: &Constraint) -> Vec<Vec<Constraint>> {
    match c {
        Constraint::And(ps) => {
            let mut acc: Vec<Vec<Constraint>> = vec![vec![]];
            for p in ps {
                let alts = split_ne(p);
                let mut next = Vec::new();
                for a in &acc {
                    for b in &alts {
                        let mut v = a.clone();
                        v.extend(b.iter().cloned());
                        next.push(v);
                    }
                }
                acc = next;
            }
            acc
        }
        Constraint::Or(ps) if has_adt_ne(c) => ps.iter().flat_map(split_ne).collect(),
        other => vec![vec![other.clone()]],
    }
}

/// Replaces every `t₁ ≠_adt t₂` by an atom of a generated disequality
/// predicate and adds its defining clauses.
pub fn encode_adt_disequality(system: &ChcSystem) -> (ChcSystem, PreprocessReport) {
    let mut report = PreprocessReport::default();
    let mut out = system.clone();
    out.meta.flags.diseq_encoded = true;
    if !system.clauses.iter().any(|c| has_adt_ne(&c.constraint)) {
        return (out, report);
    }
    out.clauses.clear();
    let mut needed = BTreeSet::new();
    for clause in &system.clauses {
        if !has_adt_ne(&clause.constraint) {
            out.clauses.push(clause.clone());
            continue;
        }
        for alt in split_ne(&clause.constraint) {
            let mut keep = Vec::new();
            let mut atoms = Vec::new();
            for c in alt {
                match c {
                    Constraint::Cmp(CmpOp::AdtNe, a, b) => {
                        let adt = a.sort().adt_name().expect("ADT disequality").to_string();
                        atoms.push(PredApp::new(diseq_pred(&adt), vec![a, b]));
                        needed.insert(adt);
                    }
                    other => keep.push(other),
                }
            }
            let mut body = clause.body.clone();
            body.extend(atoms);
            out.clauses.push(Clause::new(clause.vars.clone(), clause.head.clone(), Constraint::and(keep), body));
        }
    }
    let closure = system.datatypes.reachable_closure(needed);
    for adt in &closure {
        let name = diseq_pred(adt);
        out.declare_pred(name.clone(), vec![Sort::adt(adt.as_str()), Sort::adt(adt.as_str())]);
        report.diseq_predicates.push(name.clone());
        let decl = system.datatypes.adt(adt).expect("declared ADT");
        let fields_of = |c: &Arc<Constructor>, prefix: &str| -> Vec<Var> {
            c.fields
                .iter()
                .enumerate()
                .map(|(i, f)| Var::new(format!("{prefix}{i}"), f.sort.clone()))
                .collect()
        };
        let apply = |c: &Arc<Constructor>, vs: &[Var]| Term::Cons(c.clone(), vs.iter().cloned().map(Term::Var).collect());
        for c in &decl.constructors {
            for d in &decl.constructors {
                let xs = fields_of(c, "x");
                let ys = fields_of(d, "y");
                let head = Head::Pred(PredApp::new(name.clone(), vec![apply(c, &xs), apply(d, &ys)]));
                let vars: Vec<Var> = xs.iter().chain(&ys).cloned().collect();
                if c.name != d.name {
                    out.clauses.push(Clause::new(vars, head, Constraint::True, vec![]));
                    continue;
                }
                for (i, f) in c.fields.iter().enumerate() {
                    let (x, y) = (Term::Var(xs[i].clone()), Term::Var(ys[i].clone()));
                    match &f.sort {
                        Sort::Adt(child) => out.clauses.push(Clause::new(
                            vars.clone(),
                            head.clone(),
                            Constraint::True,
                            vec![PredApp::new(diseq_pred(child), vec![x, y])],
                        )),
                        _ => out.clauses.push(Clause::new(
                            vars.clone(),
                            head.clone(),
                            Constraint::cmp(CmpOp::Ne, x, y),
                            vec![],
                        )),
                    }
                }
            }
        }
    }
    (out, report)
}

/// Adds an admissibility atom for every ADT-sorted clause variable and the
/// defining clauses of the admissibility predicates.
pub fn augment_admissibility(system: &ChcSystem) -> (ChcSystem, PreprocessReport) {
    let mut report = PreprocessReport::default();
    let mut out = system.clone();
    out.meta.flags.admissibility_augmented = true;
    let adts = system.used_adts();
    for clause in &mut out.clauses {
        let adm: Vec<PredApp> = clause
            .vars
            .iter()
            .filter_map(|v| v.sort.adt_name().map(|a| PredApp::new(adm_pred(a), vec![Term::Var(v.clone())])))
            .collect();
        if adm.is_empty() {
            continue;
        }
        let mut body = adm;
        body.append(&mut clause.body);
        clause.body = body;
    }
    for adt in &adts {
        let name = adm_pred(adt);
        out.declare_pred(name.clone(), vec![Sort::adt(adt.as_str())]);
        report.admissibility_preds.insert(adt.clone(), name.clone());
    }
    for adt in &adts {
        let decl = system.datatypes.adt(adt).expect("declared ADT");
        for c in &decl.constructors {
            let vars: Vec<Var> = c
                .fields
                .iter()
                .enumerate()
                .map(|(i, f)| Var::new(format!("{}{i}", if f.sort.is_adt() { "y" } else { "x" }), f.sort.clone()))
                .collect();
            let body = vars
                .iter()
                .filter_map(|v| v.sort.adt_name().map(|a| PredApp::new(adm_pred(a), vec![Term::Var(v.clone())])))
                .collect();
            let head = Head::Pred(PredApp::new(
                adm_pred(adt),
                vec![Term::Cons(c.clone(), vars.iter().cloned().map(Term::Var).collect())],
            ));
            out.clauses.push(Clause::new(vars, head, Constraint::True, body));
        }
    }
    (out, report)
}
