//! Constrained Horn clauses over integers and algebraic data types.
//!
//! The types here are plain immutable values. Clause bodies stay in the
//! quantifier-free, `Not`-free fragment; `Not`, quantifiers and
//! [`Term::CataApp`] only show up in formulas built by the synthesis side.

mod eval;
mod parse;
mod print;
mod simplify;
mod sortcheck;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;

pub use eval::{eval_constraint, eval_term, Env, EvalError, FoldFn, Value};
pub use parse::{parse_formula, parse_system, parse_term, ParseError};
pub use simplify::{simplify, simplify_with, Linear, SimplifyOptions};
pub use print::{cata_symbol, print_atom, print_clause, print_datatypes, print_constraint, print_sort, print_system, print_term};
pub use sortcheck::{check_clause, check_sorts, SortError};
pub use subst::{substitute_checked, Subst};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Int,
    Bool,
    Adt(String),
}

impl Sort {
    pub fn adt(name: impl Into<String>) -> Sort {
        Sort::Adt(name.into())
    }

    pub fn is_adt(&self) -> bool {
        matches!(self, Sort::Adt(_))
    }

    pub fn adt_name(&self) -> Option<&str> {
        match self {
            Sort::Adt(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sort(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub selector: String,
    pub sort: Sort,
}

/// A constructor keeps its declared field order; ints and children may interleave.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constructor {
    pub name: String,
    pub adt: String,
    pub fields: Vec<Field>,
}

impl Constructor {
    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn sort(&self) -> Sort {
        Sort::Adt(self.adt.clone())
    }

    /// Positions of integer fields.
    pub fn int_positions(&self) -> Vec<usize> {
        self.fields
            .iter()
            .enumerate()
            .filter(|(_, f)| f.sort == Sort::Int)
            .map(|(i, _)| i)
            .collect()
    }

    /// Positions of ADT-sorted fields (the recursive children).
    pub fn child_positions(&self) -> Vec<usize> {
        self.fields
            .iter()
            .enumerate()
            .filter(|(_, f)| f.sort.is_adt())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdtDecl {
    pub name: String,
    pub constructors: Vec<Arc<Constructor>>,
}

/// One group of mutually recursive datatype declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdtFamily {
    pub adts: Vec<AdtDecl>,
}

/// Every datatype declared in a system, with name lookups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Datatypes {
    families: Vec<AdtFamily>,
    adt_index: IndexMap<String, (usize, usize)>,
    ctor_index: IndexMap<String, (usize, usize, usize)>,
    selector_index: IndexMap<String, (String, usize)>,
}

impl Datatypes {
    /// Builds the registry, rejecting duplicate names and dangling sorts.
    pub fn new(families: Vec<AdtFamily>) -> Result<Datatypes, SortError> {
        let mut dt = Datatypes::default();
        for (fi, fam) in families.iter().enumerate() {
            for (ai, adt) in fam.adts.iter().enumerate() {
                if dt.adt_index.insert(adt.name.clone(), (fi, ai)).is_some() {
                    return Err(SortError::new(format!("datatype {} declared twice", adt.name)));
                }
                for (ci, c) in adt.constructors.iter().enumerate() {
                    if dt.ctor_index.insert(c.name.clone(), (fi, ai, ci)).is_some() {
                        return Err(SortError::new(format!(
                            "constructor {} declared twice",
                            c.name
                        )));
                    }
                    for (k, field) in c.fields.iter().enumerate() {
                        if dt
                            .selector_index
                            .insert(field.selector.clone(), (c.name.clone(), k))
                            .is_some()
                        {
                            return Err(SortError::new(format!(
                                "selector {} declared twice",
                                field.selector
                            )));
                        }
                    }
                }
            }
        }
        for fam in &families {
            for adt in &fam.adts {
                for c in &adt.constructors {
                    for field in &c.fields {
                        match &field.sort {
                            Sort::Int => {}
                            Sort::Bool => {
                                return Err(SortError::new(format!(
                                    "field {} of {} has sort Bool",
                                    field.selector, c.name
                                )))
                            }
                            Sort::Adt(n) if !dt.adt_index.contains_key(n) => {
                                return Err(SortError::new(format!(
                                    "field {} refers to undeclared sort {n}",
                                    field.selector
                                )))
                            }
                            Sort::Adt(_) => {}
                        }
                    }
                }
            }
        }
        dt.families = families;
        Ok(dt)
    }

    pub fn families(&self) -> &[AdtFamily] {
        &self.families
    }

    pub fn is_empty(&self) -> bool {
        self.adt_index.is_empty()
    }

    pub fn adt(&self, name: &str) -> Option<&AdtDecl> {
        let &(f, a) = self.adt_index.get(name)?;
        Some(&self.families[f].adts[a])
    }

    pub fn adts(&self) -> impl Iterator<Item = &AdtDecl> {
        self.families.iter().flat_map(|f| f.adts.iter())
    }

    pub fn constructor(&self, name: &str) -> Option<&Arc<Constructor>> {
        let &(f, a, c) = self.ctor_index.get(name)?;
        Some(&self.families[f].adts[a].constructors[c])
    }

    pub fn constructors(&self) -> impl Iterator<Item = &Arc<Constructor>> {
        self.adts().flat_map(|a| a.constructors.iter())
    }

    /// Constructor owning a selector, and the field position.
    pub fn selector(&self, name: &str) -> Option<(&Arc<Constructor>, usize)> {
        let (ctor, k) = self.selector_index.get(name)?;
        Some((self.constructor(ctor)?, *k))
    }

    /// `names` plus every ADT sort reachable through constructor fields.
    pub fn reachable_closure(&self, names: impl IntoIterator<Item = String>) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<String> = names.into_iter().collect();
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if let Some(adt) = self.adt(&n) {
                for c in &adt.constructors {
                    for f in &c.fields {
                        if let Sort::Adt(m) = &f.sort {
                            stack.push(m.clone());
                        }
                    }
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: impl Into<String>, sort: Sort) -> Var {
        Var {
            name: name.into(),
            sort,
        }
    }

    pub fn int(name: impl Into<String>) -> Var {
        Var::new(name, Sort::Int)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }

    pub fn apply(self, a: &BigInt, b: &BigInt) -> BigInt {
        match self {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Int(BigInt),
    Cons(Arc<Constructor>, Vec<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// Selector application: field `index` of a term expected to be built by the constructor.
    Sel(Arc<Constructor>, usize, Box<Term>),
    /// Component `component` of the catamorphism symbol for `adt`, applied to `arg`.
    CataApp {
        adt: String,
        component: usize,
        arg: Box<Term>,
    },
}

impl Term {
    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn int_var(name: impl Into<String>) -> Term {
        Term::Var(Var::int(name))
    }

    pub fn int(n: impl Into<BigInt>) -> Term {
        Term::Int(n.into())
    }

    pub fn cons(c: &Arc<Constructor>, args: Vec<Term>) -> Term {
        Term::Cons(c.clone(), args)
    }

    pub fn arith(op: ArithOp, a: Term, b: Term) -> Term {
        Term::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::arith(ArithOp::Add, a, b)
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::arith(ArithOp::Sub, a, b)
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::arith(ArithOp::Mul, a, b)
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::Int(_) | Term::Arith(..) | Term::CataApp { .. } => Sort::Int,
            Term::Cons(c, _) => c.sort(),
            Term::Sel(c, k, _) => c.fields[*k].sort.clone(),
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Term::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// No variables anywhere below.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) => true,
            Term::Cons(_, args) => args.iter().all(Term::is_ground),
            Term::Arith(_, a, b) => a.is_ground() && b.is_ground(),
            Term::Sel(_, _, t) => t.is_ground(),
            Term::CataApp { arg, .. } => arg.is_ground(),
        }
    }

    /// Node count, counting constructors, literals and variables.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Int(_) => 1,
            Term::Cons(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Arith(_, a, b) => 1 + a.size() + b.size(),
            Term::Sel(_, _, t) => 1 + t.size(),
            Term::CataApp { arg, .. } => 1 + arg.size(),
        }
    }

    /// Folds literal arithmetic and the units of `+`, `-`, `*`.
    pub fn fold_constants(&self) -> Term {
        match self {
            Term::Arith(op, a, b) => {
                let a = a.fold_constants();
                let b = b.fold_constants();
                fold_arith(*op, a, b)
            }
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(Term::fold_constants).collect()),
            Term::Sel(c, k, t) => Term::Sel(c.clone(), *k, Box::new(t.fold_constants())),
            Term::CataApp {
                adt,
                component,
                arg,
            } => Term::CataApp {
                adt: adt.clone(),
                component: *component,
                arg: Box::new(arg.fold_constants()),
            },
            Term::Var(_) | Term::Int(_) => self.clone(),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Int(_) => {}
            Term::Cons(_, args) => args.iter().for_each(|a| a.visit(f)),
            Term::Arith(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Sel(_, _, t) => t.visit(f),
            Term::CataApp { arg, .. } => arg.visit(f),
        }
    }

    /// True when some subterm satisfies `pred`.
    pub fn any(&self, mut pred: impl FnMut(&Term) -> bool) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= pred(t));
        found
    }
}

fn fold_arith(op: ArithOp, a: Term, b: Term) -> Term {
    use num_traits::{One, Zero};
    match (op, &a, &b) {
        (_, Term::Int(x), Term::Int(y)) => Term::Int(op.apply(x, y)),
        (ArithOp::Add, Term::Int(z), _) if z.is_zero() => b,
        (ArithOp::Add | ArithOp::Sub, _, Term::Int(z)) if z.is_zero() => a,
        (ArithOp::Mul, Term::Int(z), _) | (ArithOp::Mul, _, Term::Int(z)) if z.is_zero() => {
            Term::Int(BigInt::zero())
        }
        (ArithOp::Mul, Term::Int(o), _) if o.is_one() => b,
        (ArithOp::Mul, _, Term::Int(o)) if o.is_one() => a,
        _ => Term::arith(op, a, b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    /// Integer equality.
    Eq,
    /// Integer disequality.
    Ne,
    Gt,
    Le,
    AdtEq,
    /// ADT disequality; accepted from input, removed by preprocessing.
    AdtNe,
}

impl CmpOp {
    pub fn negate(self) -> CmpOp {
        match self {
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::AdtEq => CmpOp::AdtNe,
            CmpOp::AdtNe => CmpOp::AdtEq,
        }
    }

    pub fn is_adt(self) -> bool {
        matches!(self, CmpOp::AdtEq | CmpOp::AdtNe)
    }

    pub fn holds(self, a: &BigInt, b: &BigInt) -> bool {
        match self {
            CmpOp::Eq | CmpOp::AdtEq => a == b,
            CmpOp::Ne | CmpOp::AdtNe => a != b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    True,
    False,
    And(Vec<Constraint>),
    Or(Vec<Constraint>),
    Not(Box<Constraint>),
    Cmp(CmpOp, Term, Term),
    /// Constructor tester; only present before preprocessing.
    Test(Arc<Constructor>, Term),
    Exists(Var, Box<Constraint>),
    Forall(Var, Box<Constraint>),
}

impl Constraint {
    /// Sort-directed equality.
    pub fn eq(a: Term, b: Term) -> Constraint {
        let op = if a.sort().is_adt() { CmpOp::AdtEq } else { CmpOp::Eq };
        Constraint::Cmp(op, a, b)
    }

    pub fn cmp(op: CmpOp, a: Term, b: Term) -> Constraint {
        Constraint::Cmp(op, a, b)
    }

    /// Conjunction that flattens nested `And`s and drops `True`.
    pub fn and(parts: impl IntoIterator<Item = Constraint>) -> Constraint {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Constraint::True => {}
                Constraint::False => return Constraint::False,
                Constraint::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Constraint::True,
            1 => out.pop().unwrap(),
            _ => Constraint::And(out),
        }
    }

    /// Disjunction that flattens nested `Or`s and drops `False`.
    pub fn or(parts: impl IntoIterator<Item = Constraint>) -> Constraint {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Constraint::False => {}
                Constraint::True => return Constraint::True,
                Constraint::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Constraint::False,
            1 => out.pop().unwrap(),
            _ => Constraint::Or(out),
        }
    }

    pub fn not(c: Constraint) -> Constraint {
        Constraint::Not(Box::new(c))
    }

    /// Top-level conjuncts (a non-`And` is a single conjunct; `True` has none).
    pub fn conjuncts(&self) -> Vec<&Constraint> {
        match self {
            Constraint::True => vec![],
            Constraint::And(parts) => parts.iter().flat_map(|p| p.conjuncts()).collect(),
            other => vec![other],
        }
    }

    /// Negation pushed to the atoms, producing a `Not`-free formula.
    ///
    /// Testers negate to the disjunction of the sibling testers, which needs
    /// the datatype registry.
    pub fn negate(&self, dt: &Datatypes) -> Constraint {
        match self {
            Constraint::True => Constraint::False,
            Constraint::False => Constraint::True,
            Constraint::And(ps) => Constraint::or(ps.iter().map(|p| p.negate(dt))),
            Constraint::Or(ps) => Constraint::and(ps.iter().map(|p| p.negate(dt))),
            Constraint::Not(c) => c.nnf(dt),
            Constraint::Cmp(op, a, b) => Constraint::Cmp(op.negate(), a.clone(), b.clone()),
            Constraint::Test(c, t) => {
                let siblings = dt
                    .adt(&c.adt)
                    .map(|a| a.constructors.clone())
                    .unwrap_or_default();
                Constraint::or(
                    siblings
                        .into_iter()
                        .filter(|s| s.name != c.name)
                        .map(|s| Constraint::Test(s, t.clone())),
                )
            }
            Constraint::Exists(v, b) => Constraint::Forall(v.clone(), Box::new(b.negate(dt))),
            Constraint::Forall(v, b) => Constraint::Exists(v.clone(), Box::new(b.negate(dt))),
        }
    }

    /// Negation normal form: removes every `Not`.
    pub fn nnf(&self, dt: &Datatypes) -> Constraint {
        match self {
            Constraint::Not(c) => c.negate(dt),
            Constraint::And(ps) => Constraint::and(ps.iter().map(|p| p.nnf(dt))),
            Constraint::Or(ps) => Constraint::or(ps.iter().map(|p| p.nnf(dt))),
            Constraint::Exists(v, b) => Constraint::Exists(v.clone(), Box::new(b.nnf(dt))),
            Constraint::Forall(v, b) => Constraint::Forall(v.clone(), Box::new(b.nnf(dt))),
            other => other.clone(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Constraint::Exists(..) | Constraint::Forall(..) => false,
            Constraint::And(ps) | Constraint::Or(ps) => ps.iter().all(Constraint::is_quantifier_free),
            Constraint::Not(c) => c.is_quantifier_free(),
            _ => true,
        }
    }

    /// Applies `f` to every term at the top of an atom.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::And(ps) => Constraint::And(ps.iter().map(|p| p.map_terms(f)).collect()),
            Constraint::Or(ps) => Constraint::Or(ps.iter().map(|p| p.map_terms(f)).collect()),
            Constraint::Not(c) => Constraint::Not(Box::new(c.map_terms(f))),
            Constraint::Cmp(op, a, b) => Constraint::Cmp(*op, f(a), f(b)),
            Constraint::Test(c, t) => Constraint::Test(c.clone(), f(t)),
            Constraint::Exists(v, b) => Constraint::Exists(v.clone(), Box::new(b.map_terms(f))),
            Constraint::Forall(v, b) => Constraint::Forall(v.clone(), Box::new(b.map_terms(f))),
        }
    }

    /// Calls `f` on every top-level term of every atom.
    pub fn for_each_term<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Constraint::True | Constraint::False => {}
            Constraint::And(ps) | Constraint::Or(ps) => ps.iter().for_each(|p| p.for_each_term(f)),
            Constraint::Not(c) => c.for_each_term(f),
            Constraint::Cmp(_, a, b) => {
                f(a);
                f(b);
            }
            Constraint::Test(_, t) => f(t),
            Constraint::Exists(_, b) | Constraint::Forall(_, b) => b.for_each_term(f),
        }
    }

    /// True when some atom satisfies `pred`.
    pub fn any_atom(&self, pred: &mut impl FnMut(&Constraint) -> bool) -> bool {
        match self {
            Constraint::And(ps) | Constraint::Or(ps) => ps.iter().any(|p| p.any_atom(pred)),
            Constraint::Not(c) => c.any_atom(pred),
            Constraint::Exists(_, b) | Constraint::Forall(_, b) => b.any_atom(pred),
            atom => pred(atom),
        }
    }

    /// Folds literal arithmetic, decides ground integer comparisons, and
    /// simplifies the boolean structure.
    pub fn fold_constants(&self) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::And(ps) => Constraint::and(ps.iter().map(Constraint::fold_constants)),
            Constraint::Or(ps) => Constraint::or(ps.iter().map(Constraint::fold_constants)),
            Constraint::Not(c) => match c.fold_constants() {
                Constraint::True => Constraint::False,
                Constraint::False => Constraint::True,
                other => Constraint::not(other),
            },
            Constraint::Cmp(op, a, b) => {
                let a = a.fold_constants();
                let b = b.fold_constants();
                match (&a, &b) {
                    (Term::Int(x), Term::Int(y)) => bool_constraint(op.holds(x, y)),
                    _ if a == b && matches!(op, CmpOp::Eq | CmpOp::AdtEq | CmpOp::Le) => {
                        Constraint::True
                    }
                    _ if a == b && matches!(op, CmpOp::Ne | CmpOp::AdtNe | CmpOp::Gt) => {
                        Constraint::False
                    }
                    _ => Constraint::Cmp(*op, a, b),
                }
            }
            Constraint::Test(c, t) => match t.fold_constants() {
                Term::Cons(d, _) => bool_constraint(d.name == c.name),
                t => Constraint::Test(c.clone(), t),
            },
            Constraint::Exists(v, b) => Constraint::Exists(v.clone(), Box::new(b.fold_constants())),
            Constraint::Forall(v, b) => Constraint::Forall(v.clone(), Box::new(b.fold_constants())),
        }
    }
}

pub fn bool_constraint(b: bool) -> Constraint {
    if b {
        Constraint::True
    } else {
        Constraint::False
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredApp {
    pub pred: String,
    pub args: Vec<Term>,
}

impl PredApp {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> PredApp {
        PredApp {
            pred: pred.into(),
            args,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    False,
    Pred(PredApp),
}

impl Head {
    pub fn pred(&self) -> Option<&PredApp> {
        match self {
            Head::False => None,
            Head::Pred(p) => Some(p),
        }
    }
}

/// `head <= constraint /\ body[0] /\ ... /\ body[k-1]`, universally closed over `vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub vars: Vec<Var>,
    pub head: Head,
    pub constraint: Constraint,
    pub body: Vec<PredApp>,
}

impl Clause {
    pub fn new(vars: Vec<Var>, head: Head, constraint: Constraint, body: Vec<PredApp>) -> Clause {
        Clause {
            vars,
            head,
            constraint,
            body,
        }
    }

    pub fn is_goal(&self) -> bool {
        self.head == Head::False
    }

    /// Free variables of head, constraint and body atoms.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        if let Head::Pred(p) = &self.head {
            for a in &p.args {
                out.extend(a.free_vars());
            }
        }
        out.extend(self.constraint.free_vars());
        for atom in &self.body {
            for a in &atom.args {
                out.extend(a.free_vars());
            }
        }
        out
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Clause {
        let head = match &self.head {
            Head::False => Head::False,
            Head::Pred(p) => Head::Pred(PredApp::new(p.pred.clone(), p.args.iter().map(&mut *f).collect())),
        };
        let constraint = self.constraint.map_terms(f);
        let body = self
            .body
            .iter()
            .map(|a| PredApp::new(a.pred.clone(), a.args.iter().map(&mut *f).collect()))
            .collect();
        Clause {
            vars: self.vars.clone(),
            head,
            constraint,
            body,
        }
    }

    /// Renames every variable (and the binder list) through `rename`.
    pub fn rename_vars(&self, rename: impl Fn(&str) -> String) -> Clause {
        let mut subst = Subst::new();
        let mut vars = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            let nv = Var::new(rename(&v.name), v.sort.clone());
            subst.insert(v.name.clone(), Term::Var(nv.clone()));
            vars.push(nv);
        }
        let mut c = self.substitute(&subst);
        c.vars = vars;
        c
    }

    /// Canonical form used for alpha-equivalence: variables renamed to
    /// `v0, v1, ...` in binder order and the constraint flattened.
    pub fn canonical(&self) -> Clause {
        let names: std::collections::HashMap<String, usize> = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i))
            .collect();
        let mut c = self.rename_vars(|n| format!("v{}", names[n]));
        c.constraint = Constraint::and(c.constraint.conjuncts().into_iter().cloned());
        c
    }
}

pub type ClauseId = usize;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreprocessFlags {
    pub selectors_eliminated: bool,
    pub diseq_encoded: bool,
    pub admissibility_augmented: bool,
    pub abstracted: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemMeta {
    pub source: Option<String>,
    pub flags: PreprocessFlags,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChcSystem {
    pub datatypes: Datatypes,
    /// Predicate signatures in declaration order.
    pub predicates: IndexMap<String, Vec<Sort>>,
    pub clauses: Vec<Clause>,
    pub meta: SystemMeta,
}

impl ChcSystem {
    pub fn new(datatypes: Datatypes) -> ChcSystem {
        ChcSystem {
            datatypes,
            ..ChcSystem::default()
        }
    }

    pub fn declare_pred(&mut self, name: impl Into<String>, sorts: Vec<Sort>) {
        self.predicates.insert(name.into(), sorts);
    }

    /// ADT sort names mentioned by predicate signatures and clause variables,
    /// closed under constructor field sorts.
    pub fn used_adts(&self) -> BTreeSet<String> {
        let mut names = Vec::new();
        for sorts in self.predicates.values() {
            names.extend(sorts.iter().filter_map(|s| s.adt_name().map(str::to_string)));
        }
        for c in &self.clauses {
            names.extend(c.vars.iter().filter_map(|v| v.sort.adt_name().map(str::to_string)));
        }
        self.datatypes.reachable_closure(names)
    }

    /// Alpha-equivalence: same declarations and pairwise equal canonical clauses.
    pub fn alpha_equivalent(&self, other: &ChcSystem) -> bool {
        self.datatypes.families() == other.datatypes.families()
            && self.predicates == other.predicates
            && self.clauses.len() == other.clauses.len()
            && self
                .clauses
                .iter()
                .zip(&other.clauses)
                .all(|(a, b)| a.canonical() == b.canonical())
    }

    pub fn goal_ids(&self) -> Vec<ClauseId> {
        (0..self.clauses.len()).filter(|&i| self.clauses[i].is_goal()).collect()
    }
}

/// Builds a datatype declaration from `(name, [(ctor, [(selector, sort)])])`.
pub fn adt_decl(name: &str, ctors: &[(&str, &[(&str, Sort)])]) -> AdtDecl {
    AdtDecl {
        name: name.to_string(),
        constructors: ctors
            .iter()
            .map(|(c, fields)| {
                Arc::new(Constructor {
                    name: c.to_string(),
                    adt: name.to_string(),
                    fields: fields
                        .iter()
                        .map(|(s, sort)| Field {
                            selector: s.to_string(),
                            sort: sort.clone(),
                        })
                        .collect(),
                })
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat() -> Datatypes {
        Datatypes::new(vec![AdtFamily {
            adts: vec![adt_decl("nat", &[("Z", &[]), ("S", &[("p", Sort::adt("nat"))])])],
        }])
        .unwrap()
    }

    #[test]
    fn registry_lookups() {
        let dt = nat();
        assert_eq!(dt.constructor("S").unwrap().arity(), 1);
        assert_eq!(dt.selector("p").unwrap().0.name, "S");
        assert!(dt.adt("nat").is_some());
        assert!(dt.adt("list").is_none());
    }

    #[test]
    fn registry_rejects_bool_fields_and_dangling_sorts() {
        let bad = vec![AdtFamily {
            adts: vec![adt_decl("b", &[("mk", &[("f", Sort::Bool)])])],
        }];
        assert!(Datatypes::new(bad).is_err());
        let dangling = vec![AdtFamily {
            adts: vec![adt_decl("t", &[("mk", &[("f", Sort::adt("u"))])])],
        }];
        assert!(Datatypes::new(dangling).is_err());
    }

    #[test]
    fn fold_constants_keeps_symbolic_structure() {
        let x = Term::int_var("x");
        let t = Term::add(Term::mul(Term::int(1), x.clone()), Term::add(Term::int(2), Term::int(3)));
        assert_eq!(t.fold_constants(), Term::add(x.clone(), Term::int(5)));
        let c = Constraint::cmp(CmpOp::Gt, Term::add(Term::int(3), Term::int(1)), Term::int(3));
        assert_eq!(c.fold_constants(), Constraint::True);
    }

    #[test]
    fn negation_is_not_free() {
        let dt = nat();
        let x = Term::var("x", Sort::adt("nat"));
        let z = Term::cons(dt.constructor("Z").unwrap(), vec![]);
        let c = Constraint::not(Constraint::and([
            Constraint::eq(x.clone(), z.clone()),
            Constraint::Test(dt.constructor("S").unwrap().clone(), x.clone()),
        ]));
        let n = c.nnf(&dt);
        assert!(!n.any_atom(&mut |a| matches!(a, Constraint::Not(_))));
        assert_eq!(
            n,
            Constraint::or([
                Constraint::cmp(CmpOp::AdtNe, x.clone(), z),
                Constraint::Test(dt.constructor("Z").unwrap().clone(), x),
            ])
        );
    }
}
