//! Catamorphisms: per-constructor structure maps folding ADT values into
//! integer tuples, their parameterized templates, and the template ladder.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chc::Value;
use crate::chc::cata_symbol;
use crate::chc::{ArithOp, Constructor, Datatypes, Term, Var};
use crate::sexp::quote_symbol;

/// Integer expression of a structure map.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Lit(BigInt),
    /// Integer argument of the constructor, by field position.
    IntArg(usize),
    /// Component `comp` of the tuple of the child at field position `pos`.
    Child { pos: usize, comp: usize },
    Param(String),
    Bin(ArithOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn lit(n: impl Into<BigInt>) -> Expr {
        Expr::Lit(n.into())
    }

    pub fn child(pos: usize, comp: usize) -> Expr {
        Expr::Child { pos, comp }
    }

    pub fn bin(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::bin(ArithOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::bin(ArithOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::bin(ArithOp::Mul, a, b)
    }

    pub fn params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(p) => {
                if !out.contains(p) {
                    out.push(p.clone())
                }
            }
            Expr::Bin(_, a, b) => {
                a.params(out);
                b.params(out);
            }
            _ => {}
        }
    }

    /// Replaces parameters by their values and folds literal arithmetic.
    pub fn instantiate(&self, m: &ParamAssignment) -> Result<Expr, CataError> {
        Ok(match self {
            Expr::Param(p) => Expr::Lit(m.get(p).cloned().ok_or_else(|| CataError::MissingParameter(p.clone()))?),
            Expr::Bin(op, a, b) => Expr::bin(*op, a.instantiate(m)?, b.instantiate(m)?),
            other => other.clone(),
        }
        .fold())
    }

    pub fn fold(&self) -> Expr {
        let Expr::Bin(op, a, b) = self else {
            return self.clone();
        };
        let (a, b) = (a.fold(), b.fold());
        match (op, &a, &b) {
            (_, Expr::Lit(x), Expr::Lit(y)) => Expr::Lit(op.apply(x, y)),
            (ArithOp::Add, Expr::Lit(z), e) | (ArithOp::Add | ArithOp::Sub, e, Expr::Lit(z)) if z.is_zero() => e.clone(),
            (ArithOp::Mul, Expr::Lit(z), _) | (ArithOp::Mul, _, Expr::Lit(z)) if z.is_zero() => Expr::Lit(BigInt::zero()),
            (ArithOp::Mul, Expr::Lit(o), e) | (ArithOp::Mul, e, Expr::Lit(o)) if o.is_one() => e.clone(),
            _ => Expr::bin(*op, a, b),
        }
    }

    /// Evaluation with concrete inputs; parameters must be absent.
    pub fn eval(&self, ints: &[BigInt], children: &[Vec<BigInt>], m: Option<&ParamAssignment>) -> BigInt {
        match self {
            Expr::Lit(n) => n.clone(),
            Expr::IntArg(i) => ints[*i].clone(),
            Expr::Child { pos, comp } => children[*pos][*comp].clone(),
            Expr::Param(p) => m.and_then(|m| m.get(p)).cloned().unwrap_or_else(|| panic!("unassigned parameter {p}")),
            Expr::Bin(op, a, b) => op.apply(&a.eval(ints, children, m), &b.eval(ints, children, m)),
        }
    }

    /// The expression as an integer term, given terms for the inputs.
    /// Parameters become integer variables of the same name.
    pub fn to_term(&self, ints: &[Term], children: &[Vec<Term>]) -> Term {
        match self {
            Expr::Lit(n) => Term::Int(n.clone()),
            Expr::IntArg(i) => ints[*i].clone(),
            Expr::Child { pos, comp } => children[*pos][*comp].clone(),
            Expr::Param(p) => Term::int_var(p.clone()),
            Expr::Bin(op, a, b) => Term::arith(*op, a.to_term(ints, children), b.to_term(ints, children)),
        }
    }
}

/// Field-position-indexed inputs of a constructor application: integer
/// arguments at their positions, child tuples at theirs.
pub fn split_args<T: Clone>(ctor: &Constructor, args: &[T], child: impl Fn(&T) -> Vec<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let mut ints = Vec::with_capacity(args.len());
    let mut children = Vec::with_capacity(args.len());
    for (a, f) in args.iter().zip(&ctor.fields) {
        // Both vectors stay position-indexed; the unused slot is a copy.
        ints.push(a.clone());
        children.push(if f.sort.is_adt() { child(a) } else { Vec::new() });
    }
    (ints, children)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CataError {
    #[error("parameter {0} has no value")]
    MissingParameter(String),
    #[error("parameter {name} = {value} is outside [{lo}, {hi}]")]
    OutOfBounds { name: String, value: BigInt, lo: String, hi: String },
    #[error("no structure map for constructor {0}")]
    MissingMap(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureMap {
    pub ctor: Arc<Constructor>,
    pub outputs: Vec<Expr>,
}

impl StructureMap {
    pub fn to_terms(&self, ints: &[Term], children: &[Vec<Term>]) -> Vec<Term> {
        self.outputs.iter().map(|e| e.to_term(ints, children)).collect()
    }
}

/// A parameter-free catamorphism of a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catamorphism {
    pub degree: usize,
    /// Keyed by constructor name.
    pub maps: IndexMap<String, StructureMap>,
}

pub type ParamAssignment = BTreeMap<String, BigInt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamDecl {
    pub name: String,
    pub lo: Option<BigInt>,
    pub hi: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateCatamorphism {
    pub degree: usize,
    pub maps: IndexMap<String, StructureMap>,
    pub params: Vec<ParamDecl>,
    /// Bound half-width used to build the template, when bounded.
    pub bound: Option<u64>,
}

fn fold_value(maps: &IndexMap<String, StructureMap>, v: &Value, m: Option<&ParamAssignment>) -> Vec<BigInt> {
    let Value::Adt(c, args) = v else {
        panic!("catamorphism applied to an integer");
    };
    let map = maps.get(&c.name).unwrap_or_else(|| panic!("no structure map for {}", c.name));
    let mut ints = Vec::with_capacity(args.len());
    let mut children = Vec::with_capacity(args.len());
    for a in args {
        match a {
            Value::Int(n) => {
                ints.push(n.clone());
                children.push(Vec::new());
            }
            child => {
                ints.push(BigInt::zero());
                children.push(fold_value(maps, child, m));
            }
        }
    }
    map.outputs.iter().map(|e| e.eval(&ints, &children, m)).collect()
}

impl Catamorphism {
    /// Node-count size of degree one: every map is one plus the sum of its
    /// children, integer fields ignored.
    pub fn size(dt: &Datatypes) -> Catamorphism {
        let mut maps = IndexMap::new();
        for c in dt.constructors() {
            let mut e = Expr::lit(1);
            for pos in c.child_positions() {
                e = Expr::add(e, Expr::child(pos, 0));
            }
            maps.insert(c.name.clone(), StructureMap { ctor: c.clone(), outputs: vec![e] });
        }
        Catamorphism { degree: 1, maps }
    }

    /// Every map returns the zero tuple.
    pub fn zero(dt: &Datatypes, degree: usize) -> Catamorphism {
        let maps = dt
            .constructors()
            .map(|c| {
                (
                    c.name.clone(),
                    StructureMap {
                        ctor: c.clone(),
                        outputs: vec![Expr::lit(0); degree],
                    },
                )
            })
            .collect();
        Catamorphism { degree, maps }
    }

    pub fn map(&self, ctor: &str) -> Result<&StructureMap, CataError> {
        self.maps.get(ctor).ok_or_else(|| CataError::MissingMap(ctor.to_string()))
    }

    pub fn covers(&self, dt: &Datatypes) -> bool {
        dt.constructors().all(|c| self.maps.contains_key(&c.name))
    }

    pub fn eval(&self, v: &Value) -> Vec<BigInt> {
        fold_value(&self.maps, v, None)
    }

    /// Fold hook for [`crate::chc::eval_term`].
    pub fn fold_fn(&self) -> impl Fn(&str, usize, &Value) -> BigInt + '_ {
        move |_, comp, v| self.eval(v).swap_remove(comp)
    }

    /// `define-funs-rec` of one function per (ADT, component).
    pub fn to_smt(&self, dt: &Datatypes) -> String {
        smt_definitions(dt, &self.maps, self.degree)
    }
}

fn smt_definitions(dt: &Datatypes, maps: &IndexMap<String, StructureMap>, degree: usize) -> String {
    let adts: Vec<_> = dt.adts().filter(|a| a.constructors.iter().all(|c| maps.contains_key(&c.name))).collect();
    if adts.is_empty() {
        return String::new();
    }
    let mut decls = Vec::new();
    let mut bodies = Vec::new();
    for adt in &adts {
        for j in 0..degree {
            decls.push(format!("({} ((x {})) Int)", quote_symbol(&cata_symbol(&adt.name, j)), quote_symbol(&adt.name)));
            let mut cases = Vec::new();
            for c in &adt.constructors {
                let binders: Vec<Term> = c
                    .fields
                    .iter()
                    .enumerate()
                    .map(|(i, f)| Term::var(format!("x!{i}"), f.sort.clone()))
                    .collect();
                let (ints, children) = split_args(c, &binders, |t| {
                    let adt = t.sort().adt_name().unwrap().to_string();
                    (0..degree)
                        .map(|k| Term::CataApp {
                            adt: adt.clone(),
                            component: k,
                            arg: Box::new(t.clone()),
                        })
                        .collect()
                });
                let body = crate::chc::print_term(&maps[&c.name].outputs[j].to_term(&ints, &children).fold_constants());
                let pattern = if binders.is_empty() {
                    quote_symbol(&c.name)
                } else {
                    let vs: Vec<String> = binders.iter().map(crate::chc::print_term).collect();
                    format!("({} {})", quote_symbol(&c.name), vs.join(" "))
                };
                cases.push(format!("({pattern} {body})"));
            }
            bodies.push(format!("(match x ({}))", cases.join(" ")));
        }
    }
    format!("(define-funs-rec ({}) ({}))\n", decls.join(" "), bodies.join(" "))
}

impl fmt::Display for Catamorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, map) in self.maps.values().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let c = &map.ctor;
            let args: Vec<Term> = c.fields.iter().map(|fl| Term::var(fl.selector.clone(), fl.sort.clone())).collect();
            let (ints, children) = split_args(c, &args, |t| {
                let name = t.as_var().unwrap().name.clone();
                (0..self.degree).map(|k| Term::int_var(if self.degree == 1 { name.clone() } else { format!("{name}.{k}") })).collect()
            });
            let outs: Vec<String> = map
                .to_terms(&ints, &children)
                .iter()
                .map(|t| crate::chc::print_term(&t.fold_constants()))
                .collect();
            let sels: Vec<&str> = c.fields.iter().map(|fl| fl.selector.as_str()).collect();
            if sels.is_empty() {
                write!(f, "{} -> ({})", c.name, outs.join(", "))?;
            } else {
                write!(f, "{}({}) -> ({})", c.name, sels.join(", "), outs.join(", "))?;
            }
        }
        Ok(())
    }
}

impl TemplateCatamorphism {
    /// Affine template: each component of each constructor is a fresh
    /// combination of the same component of every child, every integer
    /// argument, and a constant.
    pub fn linear(dt: &Datatypes, degree: usize, bound: Option<u64>) -> TemplateCatamorphism {
        assert!(degree >= 1, "degree must be positive");
        let (lo, hi) = match bound {
            Some(b) => (Some(-BigInt::from(b)), Some(BigInt::from(b))),
            None => (None, None),
        };
        let mut maps = IndexMap::new();
        let mut params = Vec::new();
        for c in dt.constructors() {
            let mut outputs = Vec::with_capacity(degree);
            for j in 0..degree {
                let mut fresh = |slot: String| {
                    let name = format!("{}!{j}!{slot}", c.name);
                    params.push(ParamDecl {
                        name: name.clone(),
                        lo: lo.clone(),
                        hi: hi.clone(),
                    });
                    Expr::Param(name)
                };
                let mut e: Option<Expr> = None;
                for (pos, f) in c.fields.iter().enumerate() {
                    let input = if f.sort.is_adt() { Expr::child(pos, j) } else { Expr::IntArg(pos) };
                    let term = Expr::mul(fresh(format!("{pos}")), input);
                    e = Some(match e {
                        None => term,
                        Some(acc) => Expr::add(acc, term),
                    });
                }
                let k = fresh("k".to_string());
                outputs.push(match e {
                    None => k,
                    Some(acc) => Expr::add(acc, k),
                });
            }
            maps.insert(c.name.clone(), StructureMap { ctor: c.clone(), outputs });
        }
        TemplateCatamorphism { degree, maps, params, bound }
    }

    /// Number of assignments for bounded templates.
    pub fn grid_size(&self) -> Option<BigInt> {
        let mut n = BigInt::one();
        for p in &self.params {
            let (lo, hi) = (p.lo.as_ref()?, p.hi.as_ref()?);
            n *= hi - lo + 1;
        }
        Some(n)
    }

    pub fn instantiate(&self, m: &ParamAssignment) -> Result<Catamorphism, CataError> {
        for p in &self.params {
            let v = m.get(&p.name).ok_or_else(|| CataError::MissingParameter(p.name.clone()))?;
            let below = p.lo.as_ref().is_some_and(|lo| v < lo);
            let above = p.hi.as_ref().is_some_and(|hi| v > hi);
            if below || above {
                let show = |b: &Option<BigInt>, inf: &str| b.as_ref().map_or(inf.to_string(), |b| b.to_string());
                return Err(CataError::OutOfBounds {
                    name: p.name.clone(),
                    value: v.clone(),
                    lo: show(&p.lo, "-inf"),
                    hi: show(&p.hi, "inf"),
                });
            }
        }
        let mut maps = IndexMap::new();
        for (name, map) in &self.maps {
            let outputs = map.outputs.iter().map(|e| e.instantiate(m)).collect::<Result<_, _>>()?;
            maps.insert(
                name.clone(),
                StructureMap {
                    ctor: map.ctor.clone(),
                    outputs,
                },
            );
        }
        Ok(Catamorphism { degree: self.degree, maps })
    }

    /// Symbolic fold of a ground value: one integer term over the parameters
    /// per component.
    pub fn eval_symbolic(&self, v: &Value) -> Vec<Term> {
        let Value::Adt(c, args) = v else {
            panic!("catamorphism applied to an integer");
        };
        let mut ints = Vec::with_capacity(args.len());
        let mut children = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Value::Int(n) => {
                    ints.push(Term::Int(n.clone()));
                    children.push(Vec::new());
                }
                child => {
                    ints.push(Term::int(0));
                    children.push(self.eval_symbolic(child));
                }
            }
        }
        self.maps[&c.name]
            .to_terms(&ints, &children)
            .into_iter()
            .map(|t| t.fold_constants())
            .collect()
    }

    pub fn param_vars(&self) -> Vec<Var> {
        self.params.iter().map(|p| Var::int(p.name.clone())).collect()
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rung {
    pub degree: usize,
    pub bound: u64,
}

impl Rung {
    pub fn template(self, dt: &Datatypes) -> TemplateCatamorphism {
        TemplateCatamorphism::linear(dt, self.degree, Some(self.bound))
    }
}

/// The sequence (1,[−1,1]), (2,[−1,1]), (3,[−1,1]), (3,[−2,2]), (3,[−4,4]),
/// then doubling bounds at degree 3 (or growing degree and bound together
/// when `grow_degree` is set), stopping after `cap` rungs if given.
#[derive(Debug, Clone)]
pub struct Ladder {
    next: usize,
    last: Option<Rung>,
    cap: Option<usize>,
    grow_degree: bool,
}

impl Ladder {
    pub fn new(cap: Option<usize>, grow_degree: bool) -> Ladder {
        Ladder {
            next: 0,
            last: None,
            cap,
            grow_degree,
        }
    }
}

impl Iterator for Ladder {
    type Item = Rung;

    fn next(&mut self) -> Option<Rung> {
        if self.cap.is_some_and(|c| self.next >= c) {
            return None;
        }
        const PREFIX: [Rung; 5] = [
            Rung { degree: 1, bound: 1 },
            Rung { degree: 2, bound: 1 },
            Rung { degree: 3, bound: 1 },
            Rung { degree: 3, bound: 2 },
            Rung { degree: 3, bound: 4 },
        ];
        let rung = match PREFIX.get(self.next) {
            Some(r) => *r,
            None => {
                let last = self.last.expect("ladder prefix is non-empty");
                Rung {
                    degree: if self.grow_degree { last.degree + 1 } else { last.degree },
                    bound: last.bound.checked_mul(2)?,
                }
            }
        };
        self.next += 1;
        self.last = Some(rung);
        Some(rung)
    }
}

impl TemplateCatamorphism {
    pub fn to_smt(&self, dt: &Datatypes) -> String {
        smt_definitions(dt, &self.maps, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chc::{adt_decl, AdtFamily, Sort};

    fn nat() -> Datatypes {
        Datatypes::new(vec![AdtFamily {
            adts: vec![adt_decl("nat", &[("Z", &[]), ("S", &[("p", Sort::adt("nat"))])])],
        }])
        .unwrap()
    }

    fn ilist() -> Datatypes {
        Datatypes::new(vec![AdtFamily {
            adts: vec![adt_decl(
                "ilist",
                &[("nil", &[]), ("cons", &[("head", Sort::Int), ("tail", Sort::adt("ilist"))])],
            )],
        }])
        .unwrap()
    }

    fn list(dt: &Datatypes, xs: &[i64]) -> Value {
        let nil = dt.constructor("nil").unwrap().clone();
        let cons = dt.constructor("cons").unwrap().clone();
        xs.iter()
            .rev()
            .fold(Value::Adt(nil, vec![]), |acc, x| Value::Adt(cons.clone(), vec![Value::int(*x), acc]))
    }

    fn nat_value(dt: &Datatypes, n: usize) -> Value {
        let z = dt.constructor("Z").unwrap().clone();
        let s = dt.constructor("S").unwrap().clone();
        (0..n).fold(Value::Adt(z, vec![]), |acc, _| Value::Adt(s.clone(), vec![acc]))
    }

    fn cata_eo(dt: &Datatypes) -> Catamorphism {
        let mut maps = IndexMap::new();
        maps.insert(
            "nil".to_string(),
            StructureMap {
                ctor: dt.constructor("nil").unwrap().clone(),
                outputs: vec![Expr::lit(0)],
            },
        );
        maps.insert(
            "cons".to_string(),
            StructureMap {
                ctor: dt.constructor("cons").unwrap().clone(),
                outputs: vec![Expr::sub(Expr::IntArg(0), Expr::child(1, 0))],
            },
        );
        Catamorphism { degree: 1, maps }
    }

    #[test]
    fn size_on_naturals_and_lists() {
        let dt = nat();
        assert_eq!(Catamorphism::size(&dt).eval(&nat_value(&dt, 2)), vec![BigInt::from(3)]);
        let dt = ilist();
        let size = Catamorphism::size(&dt);
        assert_eq!(size.eval(&list(&dt, &[])), vec![BigInt::from(1)]);
        assert_eq!(size.eval(&list(&dt, &[5])), vec![BigInt::from(2)]);
    }

    #[test]
    fn length_and_sum() {
        let dt = ilist();
        let mut maps = IndexMap::new();
        maps.insert(
            "nil".to_string(),
            StructureMap {
                ctor: dt.constructor("nil").unwrap().clone(),
                outputs: vec![Expr::lit(0), Expr::lit(0)],
            },
        );
        maps.insert(
            "cons".to_string(),
            StructureMap {
                ctor: dt.constructor("cons").unwrap().clone(),
                outputs: vec![
                    Expr::add(Expr::lit(1), Expr::child(1, 0)),
                    Expr::add(Expr::IntArg(0), Expr::child(1, 1)),
                ],
            },
        );
        let c = Catamorphism { degree: 2, maps };
        assert_eq!(c.eval(&list(&dt, &[1, 2])), vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn alternating_difference() {
        let dt = ilist();
        assert_eq!(cata_eo(&dt).eval(&list(&dt, &[3, 1])), vec![BigInt::from(2)]);
    }

    #[test]
    fn linear_template_shapes() {
        let t = TemplateCatamorphism::linear(&ilist(), 1, None);
        assert_eq!(t.params.len(), 4);
        let t = TemplateCatamorphism::linear(&nat(), 1, None);
        assert_eq!(t.params.len(), 3);
        let t = TemplateCatamorphism::linear(&ilist(), 2, Some(1));
        assert_eq!(t.params.len(), 8);
        assert_eq!(t.grid_size(), Some(BigInt::from(3u32.pow(8))));
    }

    #[test]
    fn instantiate_to_constant_one() {
        let dt = ilist();
        let t = TemplateCatamorphism::linear(&dt, 1, Some(1));
        let mut m = ParamAssignment::new();
        for p in &t.params {
            m.insert(p.name.clone(), BigInt::zero());
        }
        m.insert("cons!0!k".into(), BigInt::one());
        let c = t.instantiate(&m).unwrap();
        assert_eq!(c.maps["nil"].outputs, vec![Expr::lit(0)]);
        assert_eq!(c.maps["cons"].outputs, vec![Expr::lit(1)]);
    }

    #[test]
    fn instantiate_size_on_nat() {
        let dt = nat();
        let t = TemplateCatamorphism::linear(&dt, 1, None);
        let mut m = ParamAssignment::new();
        m.insert("Z!0!k".into(), BigInt::zero());
        m.insert("S!0!0".into(), BigInt::one());
        m.insert("S!0!k".into(), BigInt::one());
        let c = t.instantiate(&m).unwrap();
        for n in 0..5 {
            assert_eq!(c.eval(&nat_value(&dt, n)), vec![BigInt::from(n)]);
        }
    }

    #[test]
    fn instantiate_errors() {
        let dt = nat();
        let t = TemplateCatamorphism::linear(&dt, 1, Some(1));
        let mut m = ParamAssignment::new();
        assert!(matches!(t.instantiate(&m), Err(CataError::MissingParameter(_))));
        for p in &t.params {
            m.insert(p.name.clone(), BigInt::from(2));
        }
        assert!(matches!(t.instantiate(&m), Err(CataError::OutOfBounds { .. })));
    }

    #[test]
    fn ladder_prefix_and_cap() {
        let rungs: Vec<Rung> = Ladder::new(Some(7), false).collect();
        assert_eq!(rungs.len(), 7);
        assert_eq!(rungs[0], Rung { degree: 1, bound: 1 });
        assert_eq!(rungs[3], Rung { degree: 3, bound: 2 });
        assert_eq!(rungs[6], Rung { degree: 3, bound: 16 });
        for w in rungs.windows(2) {
            assert!((w[0].degree, w[0].bound) <= (w[1].degree, w[1].bound));
        }
    }

    #[test]
    fn smt_definitions_use_match() {
        let dt = nat();
        let text = Catamorphism::size(&dt).to_smt(&dt);
        assert!(text.contains("(define-funs-rec ((cata!nat!0 ((x nat)) Int))"), "{text}");
        assert!(text.contains("((S x!0) (+ 1 (cata!nat!0 x!0)))"), "{text}");
    }
}
