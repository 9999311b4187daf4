//! Syntactic simplification: equality propagation and constant folding.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{ArithOp, CmpOp, Constraint, Subst, Term, Var};

/// Linear form `Σ coeff·var + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Linear {
    pub coeffs: BTreeMap<Var, BigInt>,
    pub constant: BigInt,
}

impl Linear {
    pub fn of(t: &Term) -> Option<Linear> {
        match t {
            Term::Int(n) => Some(Linear {
                coeffs: BTreeMap::new(),
                constant: n.clone(),
            }),
            Term::Var(v) if !v.sort.is_adt() => {
                let mut coeffs = BTreeMap::new();
                coeffs.insert(v.clone(), BigInt::one());
                Some(Linear {
                    coeffs,
                    constant: BigInt::zero(),
                })
            }
            Term::Arith(ArithOp::Add, a, b) => Some(Linear::of(a)?.plus(&Linear::of(b)?, &BigInt::one())),
            Term::Arith(ArithOp::Sub, a, b) => Some(Linear::of(a)?.plus(&Linear::of(b)?, &-BigInt::one())),
            Term::Arith(ArithOp::Mul, a, b) => {
                let (la, lb) = (Linear::of(a)?, Linear::of(b)?);
                if la.coeffs.is_empty() {
                    Some(lb.scale(&la.constant))
                } else if lb.coeffs.is_empty() {
                    Some(la.scale(&lb.constant))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    fn plus(mut self, other: &Linear, k: &BigInt) -> Linear {
        for (v, c) in &other.coeffs {
            let e = self.coeffs.entry(v.clone()).or_insert_with(BigInt::zero);
            *e += c * k;
            if e.is_zero() {
                self.coeffs.remove(v);
            }
        }
        self.constant += &other.constant * k;
        self
    }

    fn scale(mut self, k: &BigInt) -> Linear {
        if k.is_zero() {
            return Linear::default();
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
        self
    }

    pub fn to_term(&self) -> Term {
        let mut acc: Option<Term> = None;
        for (v, c) in &self.coeffs {
            let x = Term::Var(v.clone());
            let (neg, mag) = (c.is_negative(), c.abs());
            let part = if mag.is_one() { x } else { Term::mul(Term::Int(mag), x) };
            acc = Some(match (acc, neg) {
                (None, false) => part,
                (None, true) => Term::mul(Term::int(-1), part),
                (Some(a), false) => Term::add(a, part),
                (Some(a), true) => Term::sub(a, part),
            });
        }
        match acc {
            None => Term::Int(self.constant.clone()),
            Some(a) if self.constant.is_zero() => a,
            Some(a) if self.constant.is_negative() => Term::sub(a, Term::Int(-self.constant.clone())),
            Some(a) => Term::add(a, Term::Int(self.constant.clone())),
        }
    }
}

/// A substitution `x := t` justified by the equality `c`, if one exists.
fn solve_equality(c: &Constraint) -> Option<(Var, Term)> {
    let Constraint::Cmp(CmpOp::Eq | CmpOp::AdtEq, a, b) = c else {
        return None;
    };
    if let Term::Var(x) = a {
        if !b.mentions(&x.name) {
            return Some((x.clone(), b.clone()));
        }
    }
    if let Term::Var(x) = b {
        if !a.mentions(&x.name) {
            return Some((x.clone(), a.clone()));
        }
    }
    if a.sort().is_adt() {
        return None;
    }
    let diff = Linear::of(a)?.plus(&Linear::of(b)?, &-BigInt::one());
    let (x, c) = diff.coeffs.iter().find(|(_, c)| c.abs().is_one())?;
    let (x, c) = (x.clone(), c.clone());
    let mut rest = diff;
    rest.coeffs.remove(&x);
    // c·x + rest = 0  ⇒  x = -rest / c
    let solved = if c.is_one() { rest.scale(&-BigInt::one()) } else { rest };
    Some((x, solved.to_term()))
}

/// Options for [`simplify_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SimplifyOptions {
    /// Decompose ADT equalities between constructor applications and decide
    /// constructor clashes.
    pub unify_constructors: bool,
}

/// Equality propagation over top-level conjuncts, integer constant folding,
/// and removal of trivially true conjuncts.
pub fn simplify(c: &Constraint) -> Constraint {
    simplify_with(c, SimplifyOptions::default())
}

pub fn simplify_with(c: &Constraint, opts: SimplifyOptions) -> Constraint {
    let mut current = prepare(c, opts);
    loop {
        let conjuncts: Vec<Constraint> = current.conjuncts().into_iter().cloned().collect();
        let Some(i) = conjuncts.iter().position(|p| solve_equality(p).is_some()) else {
            return current;
        };
        let (x, t) = solve_equality(&conjuncts[i]).unwrap();
        let mut s = Subst::new();
        s.insert(x.name.clone(), t);
        let rest = conjuncts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.substitute(&s));
        current = prepare(&Constraint::and(rest.collect::<Vec<_>>()), opts);
    }
}

fn prepare(c: &Constraint, opts: SimplifyOptions) -> Constraint {
    let folded = c.fold_constants();
    if opts.unify_constructors {
        unify(&folded).fold_constants()
    } else {
        folded
    }
}

fn unify(c: &Constraint) -> Constraint {
    match c {
        Constraint::And(ps) => Constraint::and(ps.iter().map(unify).collect::<Vec<_>>()),
        Constraint::Or(ps) => Constraint::or(ps.iter().map(unify).collect::<Vec<_>>()),
        Constraint::Cmp(CmpOp::AdtEq, Term::Cons(f, xs), Term::Cons(g, ys)) => {
            if f.name != g.name {
                return Constraint::False;
            }
            Constraint::and(
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| unify(&Constraint::eq(x.clone(), y.clone())))
                    .collect::<Vec<_>>(),
            )
        }
        Constraint::Cmp(CmpOp::AdtNe, Term::Cons(f, xs), Term::Cons(g, ys)) => {
            if f.name != g.name {
                return Constraint::True;
            }
            Constraint::or(
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| {
                        let op = if x.sort().is_adt() { CmpOp::AdtNe } else { CmpOp::Ne };
                        unify(&Constraint::Cmp(op, x.clone(), y.clone()))
                    })
                    .collect::<Vec<_>>(),
            )
        }
        // x = C(.. x ..) has no solution among finite terms.
        Constraint::Cmp(CmpOp::AdtEq, Term::Var(v), t @ Term::Cons(..)) | Constraint::Cmp(CmpOp::AdtEq, t @ Term::Cons(..), Term::Var(v))
            if t.mentions(&v.name) && constructor_path_only(t, &v.name) =>
        {
            Constraint::False
        }
        other => other.clone(),
    }
}

/// True when every occurrence of `x` in `t` sits under constructors only.
fn constructor_path_only(t: &Term, x: &str) -> bool {
    match t {
        Term::Var(v) => v.name == x,
        Term::Cons(_, args) => args.iter().any(|a| constructor_path_only(a, x)),
        _ => false,
    }
}
