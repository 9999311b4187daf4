//! SMT-LIB2 (HORN subset) reader.
//!
//! Assertions are elaborated into a small formula language that still
//! contains predicate atoms and implications, then normalized into clauses:
//! bodies become one constraint plus an atom list, disjunctions over atoms
//! split the clause, and `ite` terms are lifted into guarded cases.

use std::collections::BTreeSet;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;

use super::{
    AdtDecl, AdtFamily, ChcSystem, Clause, CmpOp, Constraint, Constructor, Datatypes, Field, Head,
    PredApp, Sort, Term, Var,
};
use crate::sexp::{parse_all, Pos, Sexp, SexpKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: parse error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: sort error: {msg}")]
    Sort { pos: Pos, msg: String },
    #[error("{pos}: unsupported feature: {msg}")]
    Unsupported { pos: Pos, msg: String },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. } | ParseError::Sort { pos, .. } | ParseError::Unsupported { pos, .. } => *pos,
        }
    }
}

fn syntax(s: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos: s.pos,
        msg: msg.into(),
    }
}

fn sort_err(s: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError::Sort {
        pos: s.pos,
        msg: msg.into(),
    }
}

fn unsupported(s: &Sexp, msg: impl Into<String>) -> ParseError {
    ParseError::Unsupported {
        pos: s.pos,
        msg: msg.into(),
    }
}

type Res<T> = Result<T, ParseError>;

/// Guarded alternatives for a term: `ite` is compiled away by case splitting.
#[derive(Debug, Clone)]
struct Cases(Vec<(Constraint, Term)>);

impl Cases {
    fn single(t: Term) -> Cases {
        Cases(vec![(Constraint::True, t)])
    }

    fn sort(&self) -> Sort {
        self.0[0].1.sort()
    }

    fn map(self, f: impl Fn(Term) -> Term) -> Cases {
        Cases(self.0.into_iter().map(|(g, t)| (g, f(t))).collect())
    }

    fn product(parts: Vec<Cases>) -> Vec<(Constraint, Vec<Term>)> {
        let mut acc = vec![(Constraint::True, Vec::new())];
        for part in parts {
            let mut next = Vec::with_capacity(acc.len() * part.0.len());
            for (g, ts) in &acc {
                for (h, t) in &part.0 {
                    let mut ts = ts.clone();
                    ts.push(t.clone());
                    next.push((Constraint::and([g.clone(), h.clone()]), ts));
                }
            }
            acc = next;
        }
        acc
    }
}

#[derive(Debug, Clone)]
enum Formula {
    C(Constraint),
    Atom(PredApp),
    /// Exhaustive, mutually exclusive guarded atoms produced by `ite` lifting.
    Guarded(Vec<(Constraint, PredApp)>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant { forall: bool, vars: Vec<Var>, body: Box<Formula> },
}

impl Formula {
    fn has_atom(&self) -> bool {
        match self {
            Formula::C(_) => false,
            Formula::Atom(_) | Formula::Guarded(_) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_atom),
            Formula::Not(f) => f.has_atom(),
            Formula::Implies(a, b) => a.has_atom() || b.has_atom(),
            Formula::Quant { body, .. } => body.has_atom(),
        }
    }

    /// Conversion for atom-free formulas.
    fn to_constraint(&self) -> Constraint {
        match self {
            Formula::C(c) => c.clone(),
            Formula::Atom(_) | Formula::Guarded(_) => unreachable!("to_constraint on a predicate atom"),
            Formula::And(fs) => Constraint::and(fs.iter().map(Formula::to_constraint)),
            Formula::Or(fs) => Constraint::or(fs.iter().map(Formula::to_constraint)),
            Formula::Not(f) => Constraint::not(f.to_constraint()),
            Formula::Implies(a, b) => Constraint::or([Constraint::not(a.to_constraint()), b.to_constraint()]),
            Formula::Quant { forall, vars, body } => {
                let mut c = body.to_constraint();
                for v in vars.iter().rev() {
                    c = if *forall {
                        Constraint::Forall(v.clone(), Box::new(c))
                    } else {
                        Constraint::Exists(v.clone(), Box::new(c))
                    };
                }
                c
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Elab {
    Term(Cases),
    Formula(Formula),
}

#[derive(Debug, Clone)]
enum Binding {
    Var(Var),
    Let(Elab),
}

struct Parser {
    families: Vec<AdtFamily>,
    dt: Datatypes,
    predicates: IndexMap<String, Vec<Sort>>,
    clauses: Vec<Clause>,
    scope: Vec<(String, Binding)>,
    used_names: BTreeSet<String>,
    fresh: usize,
}

/// Parses an SMT-LIB2 HORN script into a system.
pub fn parse_system(text: &str) -> Result<ChcSystem, ParseError> {
    let commands = parse_all(text).map_err(|e| ParseError::Syntax { pos: e.pos, msg: e.msg })?;
    let mut p = Parser {
        families: Vec::new(),
        dt: Datatypes::default(),
        predicates: IndexMap::new(),
        clauses: Vec::new(),
        scope: Vec::new(),
        used_names: BTreeSet::new(),
        fresh: 0,
    };
    for cmd in &commands {
        p.command(cmd)?;
    }
    let mut system = ChcSystem::new(p.dt);
    system.predicates = p.predicates;
    system.clauses = p.clauses;
    super::check_sorts(&system).map_err(|e| ParseError::Sort {
        pos: Pos::default(),
        msg: e.to_string(),
    })?;
    Ok(system)
}

/// Elaborates a stand-alone, atom-free formula over `vars`.
pub fn parse_formula(s: &Sexp, dt: &Datatypes, vars: &[Var]) -> Result<Constraint, ParseError> {
    let mut p = Parser::standalone(dt, vars);
    p.constraint_of(s)
}

/// Elaborates a stand-alone, `ite`-free term over `vars`.
pub fn parse_term(s: &Sexp, dt: &Datatypes, vars: &[Var]) -> Result<Term, ParseError> {
    let mut p = Parser::standalone(dt, vars);
    let mut cases = p.term(s)?;
    if cases.0.len() != 1 {
        return Err(unsupported(s, "conditional term"));
    }
    Ok(cases.0.pop().unwrap().1)
}

impl Parser {
    fn standalone(dt: &Datatypes, vars: &[Var]) -> Parser {
        Parser {
            families: dt.families().to_vec(),
            dt: dt.clone(),
            predicates: IndexMap::new(),
            clauses: Vec::new(),
            scope: vars.iter().map(|v| (v.name.clone(), Binding::Var(v.clone()))).collect(),
            used_names: vars.iter().map(|v| v.name.clone()).collect(),
            fresh: 0,
        }
    }

    fn command(&mut self, cmd: &Sexp) -> Res<()> {
        let items = cmd.list().ok_or_else(|| syntax(cmd, "expected a command"))?;
        let head = items.first().and_then(Sexp::symbol).ok_or_else(|| syntax(cmd, "expected a command name"))?;
        match head {
            "set-logic" | "set-info" | "set-option" | "check-sat" | "get-model" | "exit" | "get-info" | "echo" => Ok(()),
            "declare-datatypes" => self.declare_datatypes(cmd, &items[1..]),
            "declare-datatype" => {
                if items.len() != 3 {
                    return Err(syntax(cmd, "declare-datatype expects a name and constructors"));
                }
                let name = items[1].symbol().ok_or_else(|| syntax(&items[1], "expected a sort name"))?;
                let ctors = items[2].list().ok_or_else(|| syntax(&items[2], "expected constructors"))?;
                self.add_family(cmd, vec![(name.to_string(), ctors.to_vec())])
            }
            "declare-fun" => self.declare_fun(cmd, &items[1..]),
            "assert" => {
                if items.len() != 2 {
                    return Err(syntax(cmd, "assert expects one formula"));
                }
                self.assertion(&items[1])
            }
            "declare-const" | "define-fun" | "define-fun-rec" | "define-funs-rec" | "declare-sort" | "define-sort" => {
                Err(unsupported(cmd, format!("{head} is outside the HORN fragment")))
            }
            "push" | "pop" | "get-value" | "get-assignment" | "check-sat-assuming" | "get-proof" => {
                Err(unsupported(cmd, format!("{head} is not supported")))
            }
            other => Err(syntax(cmd, format!("unknown command {other}"))),
        }
    }

    fn declare_datatypes(&mut self, cmd: &Sexp, args: &[Sexp]) -> Res<()> {
        if args.len() != 2 {
            return Err(syntax(cmd, "declare-datatypes expects two arguments"));
        }
        let first = args[0].list().ok_or_else(|| syntax(&args[0], "expected a list"))?;
        let second = args[1].list().ok_or_else(|| syntax(&args[1], "expected a list"))?;
        // SMT-LIB 2.6: ((name arity) ...) (ctor-lists); legacy: () ((name ctors...) ...)
        let legacy = first.is_empty() && second.iter().all(|d| d.list().is_some_and(|l| l.first().and_then(Sexp::symbol).is_some()));
        let mut decls = Vec::new();
        if legacy && !second.is_empty() {
            for d in second {
                let l = d.list().unwrap();
                let name = l[0].symbol().unwrap().to_string();
                decls.push((name, l[1..].to_vec()));
            }
        } else {
            if first.len() != second.len() {
                return Err(syntax(cmd, "datatype names and definitions differ in number"));
            }
            for (nd, body) in first.iter().zip(second) {
                let nl = nd.list().ok_or_else(|| syntax(nd, "expected (name arity)"))?;
                if nl.len() != 2 {
                    return Err(syntax(nd, "expected (name arity)"));
                }
                let name = nl[0].symbol().ok_or_else(|| syntax(&nl[0], "expected a sort name"))?;
                if !matches!(&nl[1].kind, SexpKind::Numeral(n) if n == "0") {
                    return Err(unsupported(nd, "parametric datatypes"));
                }
                if body.head() == Some("par") {
                    return Err(unsupported(body, "parametric datatypes"));
                }
                let ctors = body.list().ok_or_else(|| syntax(body, "expected constructor list"))?;
                decls.push((name.to_string(), ctors.to_vec()));
            }
        }
        self.add_family(cmd, decls)
    }

    fn add_family(&mut self, cmd: &Sexp, decls: Vec<(String, Vec<Sexp>)>) -> Res<()> {
        let names: BTreeSet<&str> = decls.iter().map(|(n, _)| n.as_str()).collect();
        let mut adts = Vec::new();
        for (name, ctors) in &decls {
            let mut constructors = Vec::new();
            for c in ctors {
                let (cname, fields) = match &c.kind {
                    SexpKind::Symbol(s) => (s.clone(), &[][..]),
                    SexpKind::List(l) if !l.is_empty() => (
                        l[0].symbol().ok_or_else(|| syntax(&l[0], "expected constructor name"))?.to_string(),
                        &l[1..],
                    ),
                    _ => return Err(syntax(c, "expected a constructor")),
                };
                let mut fs = Vec::new();
                for f in fields {
                    let fl = f.list().filter(|l| l.len() == 2).ok_or_else(|| syntax(f, "expected (selector sort)"))?;
                    let sel = fl[0].symbol().ok_or_else(|| syntax(&fl[0], "expected selector name"))?;
                    let sort = match fl[1].symbol() {
                        Some("Int") => Sort::Int,
                        Some("Bool") => return Err(unsupported(&fl[1], "Bool-sorted datatype fields")),
                        Some(s) if names.contains(s) || self.dt.adt(s).is_some() => Sort::Adt(s.to_string()),
                        _ if fl[1].list().is_some() => return Err(unsupported(&fl[1], "parametric or compound field sort")),
                        Some(s) if is_theory_sort(s) => return Err(unsupported(&fl[1], format!("sort {s}"))),
                        _ => return Err(sort_err(&fl[1], format!("unknown sort {}", fl[1]))),
                    };
                    fs.push(Field {
                        selector: sel.to_string(),
                        sort,
                    });
                }
                constructors.push(Arc::new(Constructor {
                    name: cname,
                    adt: name.clone(),
                    fields: fs,
                }));
            }
            adts.push(AdtDecl {
                name: name.clone(),
                constructors,
            });
        }
        self.families.push(AdtFamily { adts });
        self.dt = Datatypes::new(self.families.clone()).map_err(|e| sort_err(cmd, e.msg))?;
        Ok(())
    }

    fn sort(&self, s: &Sexp) -> Res<Sort> {
        match s.symbol() {
            Some("Int") => Ok(Sort::Int),
            Some("Bool") => Ok(Sort::Bool),
            Some(n) if self.dt.adt(n).is_some() => Ok(Sort::Adt(n.to_string())),
            Some(n) if is_theory_sort(n) => Err(unsupported(s, format!("sort {n}"))),
            None => Err(unsupported(s, format!("sort {s}"))),
            Some(n) => Err(sort_err(s, format!("unknown sort {n}"))),
        }
    }

    fn declare_fun(&mut self, cmd: &Sexp, args: &[Sexp]) -> Res<()> {
        if args.len() != 3 {
            return Err(syntax(cmd, "declare-fun expects name, argument sorts and codomain"));
        }
        let name = args[0].symbol().ok_or_else(|| syntax(&args[0], "expected a name"))?;
        let doms = args[1].list().ok_or_else(|| syntax(&args[1], "expected argument sorts"))?;
        if self.sort(&args[2])? != Sort::Bool {
            return Err(unsupported(cmd, format!("uninterpreted function {name} with non-Bool codomain")));
        }
        let mut sorts = Vec::new();
        for d in doms {
            match self.sort(d)? {
                Sort::Bool => return Err(unsupported(d, "Bool-sorted predicate arguments")),
                s => sorts.push(s),
            }
        }
        if self.predicates.insert(name.to_string(), sorts).is_some() {
            return Err(sort_err(cmd, format!("predicate {name} declared twice")));
        }
        Ok(())
    }

    fn fresh_name(&mut self, base: &str) -> String {
        if self.used_names.insert(base.to_string()) {
            return base.to_string();
        }
        loop {
            let cand = format!("{base}!{}", self.fresh);
            self.fresh += 1;
            if self.used_names.insert(cand.clone()) {
                return cand;
            }
        }
    }

    fn lookup(&self, name: &str) -> Option<&Binding> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    fn binders(&mut self, s: &Sexp) -> Res<Vec<(String, Var)>> {
        let list = s.list().ok_or_else(|| syntax(s, "expected a binder list"))?;
        let mut out = Vec::new();
        for b in list {
            let bl = b.list().filter(|l| l.len() == 2).ok_or_else(|| syntax(b, "expected (name sort)"))?;
            let name = bl[0].symbol().ok_or_else(|| syntax(&bl[0], "expected a variable name"))?;
            let sort = self.sort(&bl[1])?;
            if sort == Sort::Bool {
                return Err(unsupported(b, "Bool-sorted variables"));
            }
            let fresh = self.fresh_name(name);
            out.push((name.to_string(), Var::new(fresh, sort)));
        }
        Ok(out)
    }

    fn assertion(&mut self, s: &Sexp) -> Res<()> {
        self.used_names.clear();
        self.fresh = 0;
        let f = self.formula(s)?;
        let clauses = self.clauses_of(s, f, Vec::new())?;
        self.clauses.extend(clauses);
        Ok(())
    }

    fn clauses_of(&self, at: &Sexp, f: Formula, mut vars: Vec<Var>) -> Res<Vec<Clause>> {
        match f {
            Formula::Quant { forall: true, vars: vs, body } => {
                vars.extend(vs);
                self.clauses_of(at, *body, vars)
            }
            Formula::Implies(b, h) => self.with_head(at, vars, vec![*b], *h),
            Formula::Not(b) => self.with_head(at, vars, vec![*b], Formula::C(Constraint::False)),
            Formula::Or(lits) if lits.iter().any(Formula::has_atom) => {
                let mut body = Vec::new();
                let mut heads = Vec::new();
                for l in lits {
                    match l {
                        Formula::Not(b) => body.push(*b),
                        l if l.has_atom() => heads.push(l),
                        l => body.push(Formula::Not(Box::new(l))),
                    }
                }
                let head = match heads.len() {
                    0 => Formula::C(Constraint::False),
                    1 => heads.pop().unwrap(),
                    _ => return Err(unsupported(at, "clause with several positive predicate literals")),
                };
                self.with_head(at, vars, body, head)
            }
            h => self.with_head(at, vars, Vec::new(), h),
        }
    }

    fn with_head(&self, at: &Sexp, mut vars: Vec<Var>, body: Vec<Formula>, head: Formula) -> Res<Vec<Clause>> {
        match head {
            Formula::Quant { forall: true, vars: vs, body: h } => {
                vars.extend(vs);
                self.with_head(at, vars, body, *h)
            }
            Formula::Implies(b2, h2) => {
                let mut body = body;
                body.push(*b2);
                self.with_head(at, vars, body, *h2)
            }
            Formula::And(hs) => {
                let mut out = Vec::new();
                for h in hs {
                    out.extend(self.with_head(at, vars.clone(), body.clone(), h)?);
                }
                Ok(out)
            }
            Formula::Atom(a) => self.build(at, vars, Formula::And(body), Head::Pred(a), Constraint::True),
            Formula::Guarded(alts) => {
                let mut out = Vec::new();
                for (g, a) in alts {
                    let mut body = body.clone();
                    body.push(Formula::C(g));
                    out.extend(self.build(at, vars.clone(), Formula::And(body), Head::Pred(a), Constraint::True)?);
                }
                Ok(out)
            }
            h if !h.has_atom() => {
                let c = h.to_constraint().nnf(&self.dt);
                if c == Constraint::True {
                    return Ok(Vec::new());
                }
                let neg = c.negate(&self.dt);
                self.build(at, vars, Formula::And(body), Head::False, neg)
            }
            Formula::Not(inner) if matches!(*inner, Formula::Atom(_)) => {
                let mut body = body;
                body.push(*inner);
                self.build(at, vars, Formula::And(body), Head::False, Constraint::True)
            }
            _ => Err(unsupported(at, "non-Horn clause head")),
        }
    }

    fn build(&self, at: &Sexp, mut vars: Vec<Var>, body: Formula, head: Head, extra: Constraint) -> Res<Vec<Clause>> {
        let alts = self.body_alts(at, &body, true)?;
        let mut out = Vec::new();
        for (cs, atoms, lifted) in alts {
            let mut vs = vars.clone();
            vs.extend(lifted);
            let mut parts = cs;
            parts.push(extra.clone());
            let constraint = Constraint::and(parts).nnf(&self.dt);
            if constraint == Constraint::False {
                continue;
            }
            if !constraint.is_quantifier_free() {
                return Err(unsupported(at, "quantified constraint in a clause body"));
            }
            out.push(Clause::new(vs, head.clone(), constraint, atoms));
        }
        vars.clear();
        Ok(out)
    }

    /// Disjunctive normal form over atom-carrying disjunctions:
    /// each alternative is (constraints, atoms, lifted existential variables).
    #[allow(clippy::type_complexity)]
    fn body_alts(&self, at: &Sexp, f: &Formula, positive: bool) -> Res<Vec<(Vec<Constraint>, Vec<PredApp>, Vec<Var>)>> {
        if !f.has_atom() {
            let c = f.to_constraint();
            let c = if positive { c.nnf(&self.dt) } else { c.negate(&self.dt) };
            return Ok(vec![(vec![c], vec![], vec![])]);
        }
        let conj = |parts: &[Formula], pol: bool| -> Res<Vec<_>> {
            let mut acc = vec![(Vec::new(), Vec::new(), Vec::new())];
            for p in parts {
                let alts = self.body_alts(at, p, pol)?;
                let mut next = Vec::new();
                for (c1, a1, v1) in &acc {
                    for (c2, a2, v2) in &alts {
                        let mut c = c1.clone();
                        c.extend(c2.iter().cloned());
                        let mut a: Vec<PredApp> = a1.clone();
                        a.extend(a2.iter().cloned());
                        let mut v: Vec<Var> = v1.clone();
                        v.extend(v2.iter().cloned());
                        next.push((c, a, v));
                    }
                }
                acc = next;
            }
            Ok(acc)
        };
        let disj = |parts: &[Formula], pol: bool| -> Res<Vec<_>> {
            let mut out = Vec::new();
            for p in parts {
                out.extend(self.body_alts(at, p, pol)?);
            }
            Ok(out)
        };
        match (f, positive) {
            (Formula::Atom(a), true) => Ok(vec![(vec![], vec![a.clone()], vec![])]),
            (Formula::Guarded(alts), true) => Ok(alts.iter().map(|(g, a)| (vec![g.clone()], vec![a.clone()], vec![])).collect()),
            (Formula::Atom(_) | Formula::Guarded(_), false) => Err(unsupported(at, "negated predicate in a clause body")),
            (Formula::And(ps), true) | (Formula::Or(ps), false) => conj(ps, positive),
            (Formula::Or(ps), true) | (Formula::And(ps), false) => disj(ps, positive),
            (Formula::Not(g), pol) => self.body_alts(at, g, !pol),
            (Formula::Implies(a, b), true) => disj(&[Formula::Not(a.clone()), (**b).clone()], true),
            (Formula::Implies(a, b), false) => conj(&[(**a).clone(), Formula::Not(b.clone())], true),
            (Formula::Quant { forall, vars, body }, pol) if *forall != pol => {
                let mut alts = self.body_alts(at, body, pol)?;
                for alt in &mut alts {
                    alt.2.extend(vars.iter().cloned());
                }
                Ok(alts)
            }
            (Formula::Quant { .. }, _) => Err(unsupported(at, "universal quantifier over predicates in a clause body")),
            (Formula::C(_), _) => unreachable!("handled by the atom-free case"),
        }
    }

    fn formula(&mut self, s: &Sexp) -> Res<Formula> {
        match self.elab(s)? {
            Elab::Formula(f) => Ok(f),
            Elab::Term(_) => Err(sort_err(s, "expected a formula, found a term")),
        }
    }

    fn term(&mut self, s: &Sexp) -> Res<Cases> {
        match self.elab(s)? {
            Elab::Term(t) => Ok(t),
            Elab::Formula(_) => Err(sort_err(s, "expected a term, found a formula")),
        }
    }

    fn int_term(&mut self, s: &Sexp) -> Res<Cases> {
        let t = self.term(s)?;
        if t.sort() != Sort::Int {
            return Err(sort_err(s, format!("expected an Int term, found sort {}", t.sort())));
        }
        Ok(t)
    }

    fn constraint_of(&mut self, s: &Sexp) -> Res<Constraint> {
        let f = self.formula(s)?;
        if f.has_atom() {
            return Err(unsupported(s, "predicate atom inside a term-level condition"));
        }
        Ok(f.to_constraint())
    }

    fn elab(&mut self, s: &Sexp) -> Res<Elab> {
        match &s.kind {
            SexpKind::Numeral(n) => Ok(Elab::Term(Cases::single(Term::Int(n.parse::<BigInt>().map_err(|_| syntax(s, "bad numeral"))?)))),
            SexpKind::Str(_) => Err(unsupported(s, "string literals")),
            SexpKind::Symbol(name) => self.elab_symbol(s, name),
            SexpKind::List(items) => {
                let Some(head) = items.first() else {
                    return Err(syntax(s, "empty application"));
                };
                let args = &items[1..];
                if let Some(hl) = head.list() {
                    // (_ is C) t  and  ((as C sort) args...)
                    if hl.len() == 3 && hl[0].is_symbol("_") && hl[1].is_symbol("is") {
                        let cname = hl[2].symbol().ok_or_else(|| syntax(&hl[2], "expected constructor"))?;
                        return self.tester(s, cname, args);
                    }
                    if hl.len() == 3 && hl[0].is_symbol("as") {
                        let cname = hl[1].symbol().ok_or_else(|| syntax(&hl[1], "expected constructor"))?;
                        return self.application(s, cname, args);
                    }
                    return Err(unsupported(s, format!("indexed identifier {head}")));
                }
                let name = head.symbol().ok_or_else(|| syntax(head, "expected an operator"))?;
                self.application(s, name, args)
            }
        }
    }

    fn elab_symbol(&mut self, s: &Sexp, name: &str) -> Res<Elab> {
        if let Some(b) = self.lookup(name) {
            return Ok(match b.clone() {
                Binding::Var(v) => Elab::Term(Cases::single(Term::Var(v))),
                Binding::Let(e) => e,
            });
        }
        match name {
            "true" => return Ok(Elab::Formula(Formula::C(Constraint::True))),
            "false" => return Ok(Elab::Formula(Formula::C(Constraint::False))),
            _ => {}
        }
        if let Some(c) = self.dt.constructor(name) {
            if c.arity() == 0 {
                return Ok(Elab::Term(Cases::single(Term::Cons(c.clone(), vec![]))));
            }
            return Err(sort_err(s, format!("constructor {name} used without arguments")));
        }
        if let Some(sig) = self.predicates.get(name) {
            if sig.is_empty() {
                return Ok(Elab::Formula(Formula::Atom(PredApp::new(name, vec![]))));
            }
            return Err(sort_err(s, format!("predicate {name} used without arguments")));
        }
        Err(syntax(s, format!("unknown symbol {name}")))
    }

    fn tester(&mut self, s: &Sexp, cname: &str, args: &[Sexp]) -> Res<Elab> {
        let c = self
            .dt
            .constructor(cname)
            .cloned()
            .ok_or_else(|| sort_err(s, format!("tester for unknown constructor {cname}")))?;
        if args.len() != 1 {
            return Err(syntax(s, "tester expects one argument"));
        }
        let t = self.term(&args[0])?;
        if t.sort() != c.sort() {
            return Err(sort_err(s, format!("tester for {cname} applied to sort {}", t.sort())));
        }
        Ok(Elab::Formula(Formula::C(Constraint::or(
            t.0.into_iter().map(|(g, t)| Constraint::and([g, Constraint::Test(c.clone(), t)])),
        ))))
    }

    fn application(&mut self, s: &Sexp, name: &str, args: &[Sexp]) -> Res<Elab> {
        let f = |f: Formula| Ok(Elab::Formula(f));
        match name {
            "and" | "or" => {
                let parts = args.iter().map(|a| self.formula(a)).collect::<Res<Vec<_>>>()?;
                f(if name == "and" { Formula::And(parts) } else { Formula::Or(parts) })
            }
            "not" => {
                if args.len() != 1 {
                    return Err(syntax(s, "not expects one argument"));
                }
                let g = self.formula(&args[0])?;
                f(Formula::Not(Box::new(g)))
            }
            "=>" => {
                if args.len() < 2 {
                    return Err(syntax(s, "=> expects at least two arguments"));
                }
                let mut parts = args.iter().map(|a| self.formula(a)).collect::<Res<Vec<_>>>()?;
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Formula::Implies(Box::new(p), Box::new(acc));
                }
                f(acc)
            }
            "forall" | "exists" => {
                if args.len() != 2 {
                    return Err(syntax(s, format!("{name} expects binders and a body")));
                }
                let bs = self.binders(&args[0])?;
                let depth = self.scope.len();
                for (n, v) in &bs {
                    self.scope.push((n.clone(), Binding::Var(v.clone())));
                }
                let body = self.formula(&args[1]);
                self.scope.truncate(depth);
                f(Formula::Quant {
                    forall: name == "forall",
                    vars: bs.into_iter().map(|(_, v)| v).collect(),
                    body: Box::new(body?),
                })
            }
            "let" => {
                if args.len() != 2 {
                    return Err(syntax(s, "let expects bindings and a body"));
                }
                let bl = args[0].list().ok_or_else(|| syntax(&args[0], "expected let bindings"))?;
                let mut bound = Vec::new();
                for b in bl {
                    let pair = b.list().filter(|l| l.len() == 2).ok_or_else(|| syntax(b, "expected (name expr)"))?;
                    let n = pair[0].symbol().ok_or_else(|| syntax(&pair[0], "expected a name"))?;
                    bound.push((n.to_string(), self.elab(&pair[1])?));
                }
                let depth = self.scope.len();
                for (n, e) in bound {
                    self.scope.push((n, Binding::Let(e)));
                }
                let body = self.elab(&args[1]);
                self.scope.truncate(depth);
                body
            }
            "!" => {
                if args.is_empty() {
                    return Err(syntax(s, "annotation without a body"));
                }
                self.elab(&args[0])
            }
            "ite" => {
                if args.len() != 3 {
                    return Err(syntax(s, "ite expects three arguments"));
                }
                let cond = self.constraint_of(&args[0])?;
                let a = self.elab(&args[1])?;
                let b = self.elab(&args[2])?;
                match (a, b) {
                    (Elab::Term(a), Elab::Term(b)) => {
                        if a.sort() != b.sort() {
                            return Err(sort_err(s, "ite branches of different sorts"));
                        }
                        let neg = Constraint::not(cond.clone());
                        let mut cases = Vec::new();
                        for (g, t) in a.0 {
                            cases.push((Constraint::and([cond.clone(), g]), t));
                        }
                        for (g, t) in b.0 {
                            cases.push((Constraint::and([neg.clone(), g]), t));
                        }
                        Ok(Elab::Term(Cases(cases)))
                    }
                    (Elab::Formula(a), Elab::Formula(b)) => f(Formula::Or(vec![
                        Formula::And(vec![Formula::C(cond.clone()), a]),
                        Formula::And(vec![Formula::C(Constraint::not(cond)), b]),
                    ])),
                    _ => Err(sort_err(s, "ite mixes a formula and a term")),
                }
            }
            "=" | "distinct" => {
                if args.len() < 2 {
                    return Err(syntax(s, format!("{name} expects at least two arguments")));
                }
                let elabs = args.iter().map(|a| self.elab(a)).collect::<Res<Vec<_>>>()?;
                if elabs.iter().all(|e| matches!(e, Elab::Formula(_))) {
                    let fs: Vec<Formula> = elabs
                        .into_iter()
                        .map(|e| match e {
                            Elab::Formula(f) => f,
                            Elab::Term(_) => unreachable!(),
                        })
                        .collect();
                    if fs.iter().any(Formula::has_atom) {
                        return Err(unsupported(s, "Boolean equality over predicate atoms"));
                    }
                    let cs: Vec<Constraint> = fs.iter().map(Formula::to_constraint).collect();
                    let iff = |a: &Constraint, b: &Constraint| {
                        Constraint::or([
                            Constraint::and([a.clone(), b.clone()]),
                            Constraint::and([Constraint::not(a.clone()), Constraint::not(b.clone())]),
                        ])
                    };
                    let mut parts = Vec::new();
                    for i in 0..cs.len() {
                        for j in (i + 1)..cs.len() {
                            if name == "=" && j != i + 1 {
                                continue;
                            }
                            let e = iff(&cs[i], &cs[j]);
                            parts.push(if name == "=" { e } else { Constraint::not(e) });
                        }
                    }
                    return f(Formula::C(Constraint::and(parts)));
                }
                let mut terms = Vec::new();
                for (e, a) in elabs.into_iter().zip(args) {
                    match e {
                        Elab::Term(t) => terms.push(t),
                        Elab::Formula(_) => return Err(sort_err(a, "equality between a formula and a term")),
                    }
                }
                let sort = terms[0].sort();
                for (t, a) in terms.iter().zip(args) {
                    if t.sort() != sort {
                        return Err(sort_err(a, format!("equality between sorts {sort} and {}", t.sort())));
                    }
                }
                let (eq, ne) = if sort.is_adt() { (CmpOp::AdtEq, CmpOp::AdtNe) } else { (CmpOp::Eq, CmpOp::Ne) };
                let mut parts = Vec::new();
                for i in 0..terms.len() {
                    for j in (i + 1)..terms.len() {
                        if name == "=" && j != i + 1 {
                            continue;
                        }
                        let op = if name == "=" { eq } else { ne };
                        parts.push(cmp_cases(op, &terms[i], &terms[j]));
                    }
                }
                f(Formula::C(Constraint::and(parts)))
            }
            "<" | "<=" | ">" | ">=" => {
                if args.len() < 2 {
                    return Err(syntax(s, format!("{name} expects at least two arguments")));
                }
                let terms = args.iter().map(|a| self.int_term(a)).collect::<Res<Vec<_>>>()?;
                let mut parts = Vec::new();
                for w in terms.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    parts.push(match name {
                        "<" => cmp_cases(CmpOp::Gt, b, a),
                        "<=" => cmp_cases(CmpOp::Le, a, b),
                        ">" => cmp_cases(CmpOp::Gt, a, b),
                        _ => cmp_cases(CmpOp::Le, b, a),
                    });
                }
                f(Formula::C(Constraint::and(parts)))
            }
            "+" | "-" | "*" => {
                if args.is_empty() {
                    return Err(syntax(s, format!("{name} expects arguments")));
                }
                let terms = args.iter().map(|a| self.int_term(a)).collect::<Res<Vec<_>>>()?;
                if name == "-" && terms.len() == 1 {
                    let t = terms.into_iter().next().unwrap();
                    return Ok(Elab::Term(t.map(|t| match t {
                        Term::Int(n) => Term::Int(-n),
                        t => Term::sub(Term::int(0), t),
                    })));
                }
                let op = match name {
                    "+" => super::ArithOp::Add,
                    "-" => super::ArithOp::Sub,
                    _ => super::ArithOp::Mul,
                };
                let cases = Cases::product(terms)
                    .into_iter()
                    .map(|(g, ts)| {
                        let mut it = ts.into_iter();
                        let first = it.next().unwrap();
                        (g, it.fold(first, |acc, t| Term::arith(op, acc, t)))
                    })
                    .collect();
                Ok(Elab::Term(Cases(cases)))
            }
            "div" | "mod" | "abs" | "/" | "select" | "store" | "to_real" | "to_int" => {
                Err(unsupported(s, format!("operator {name}")))
            }
            _ => self.user_application(s, name, args),
        }
    }

    fn user_application(&mut self, s: &Sexp, name: &str, args: &[Sexp]) -> Res<Elab> {
        if let Some(rest) = name.strip_prefix("is-") {
            if self.dt.constructor(rest).is_some() {
                return self.tester(s, rest, args);
            }
        }
        if let Some(c) = self.dt.constructor(name).cloned() {
            if c.arity() != args.len() {
                return Err(sort_err(s, format!("{name} expects {} arguments, got {}", c.arity(), args.len())));
            }
            let mut parts = Vec::new();
            for (a, field) in args.iter().zip(&c.fields) {
                let t = self.term(a)?;
                if t.sort() != field.sort {
                    return Err(sort_err(a, format!("argument {} of {name} has sort {}, expected {}", field.selector, t.sort(), field.sort)));
                }
                parts.push(t);
            }
            let cases = Cases::product(parts).into_iter().map(|(g, ts)| (g, Term::Cons(c.clone(), ts))).collect();
            return Ok(Elab::Term(Cases(cases)));
        }
        if let Some((c, k)) = self.dt.selector(name).map(|(c, k)| (c.clone(), k)) {
            if args.len() != 1 {
                return Err(syntax(s, "selector expects one argument"));
            }
            let t = self.term(&args[0])?;
            if t.sort() != c.sort() {
                return Err(sort_err(s, format!("selector {name} applied to sort {}", t.sort())));
            }
            return Ok(Elab::Term(t.map(|t| Term::Sel(c.clone(), k, Box::new(t)))));
        }
        if let Some(sig) = self.predicates.get(name).cloned() {
            if sig.len() != args.len() {
                return Err(sort_err(s, format!("{name} expects {} arguments, got {}", sig.len(), args.len())));
            }
            let mut parts = Vec::new();
            for (i, (a, sort)) in args.iter().zip(&sig).enumerate() {
                let t = self.term(a)?;
                if t.sort() != *sort {
                    return Err(sort_err(a, format!("argument {i} of {name} has sort {}, expected {sort}", t.sort())));
                }
                parts.push(t);
            }
            let mut alts: Vec<(Constraint, PredApp)> =
                Cases::product(parts).into_iter().map(|(g, ts)| (g, PredApp::new(name, ts))).collect();
            return Ok(Elab::Formula(if alts.len() == 1 && alts[0].0 == Constraint::True {
                Formula::Atom(alts.pop().unwrap().1)
            } else {
                Formula::Guarded(alts)
            }));
        }
        if self.lookup(name).is_some() {
            return Err(unsupported(s, format!("higher-order use of {name}")));
        }
        Err(syntax(s, format!("unknown function {name}")))
    }
}

fn cmp_cases(op: CmpOp, a: &Cases, b: &Cases) -> Constraint {
    let mut alts = Vec::new();
    for (g, x) in &a.0 {
        for (h, y) in &b.0 {
            alts.push(Constraint::and([g.clone(), h.clone(), Constraint::Cmp(op, x.clone(), y.clone())]));
        }
    }
    Constraint::or(alts)
}

fn is_theory_sort(s: &str) -> bool {
    matches!(s, "Real" | "String" | "RegLan" | "Array" | "BitVec" | "FloatingPoint" | "RoundingMode")
}
