use std::collections::{BTreeMap, BTreeSet};

use super::{Clause, Constraint, Head, PredApp, SortError, Term, Var};

/// Simultaneous substitution keyed by variable name.
pub type Subst = BTreeMap<String, Term>;

impl Term {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Int(_) => {}
            Term::Cons(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Sel(_, _, t) => t.collect_vars(out),
            Term::CataApp { arg, .. } => arg.collect_vars(out),
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.any(|t| matches!(t, Term::Var(v) if v.name == name))
    }

    pub fn substitute(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v) => s.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::Int(_) => self.clone(),
            Term::Cons(c, args) => Term::Cons(c.clone(), args.iter().map(|a| a.substitute(s)).collect()),
            Term::Arith(op, a, b) => Term::arith(*op, a.substitute(s), b.substitute(s)),
            Term::Sel(c, k, t) => Term::Sel(c.clone(), *k, Box::new(t.substitute(s))),
            Term::CataApp {
                adt,
                component,
                arg,
            } => Term::CataApp {
                adt: adt.clone(),
                component: *component,
                arg: Box::new(arg.substitute(s)),
            },
        }
    }
}

impl Constraint {
    pub fn free_vars(&self) -> BTreeSet<Var> {
        match self {
            Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
                let mut inner = b.free_vars();
                inner.remove(v);
                inner
            }
            Constraint::And(ps) | Constraint::Or(ps) => ps.iter().flat_map(|p| p.free_vars()).collect(),
            Constraint::Not(c) => c.free_vars(),
            _ => {
                let mut out = BTreeSet::new();
                self.for_each_term(&mut |t| out.extend(t.free_vars()));
                out
            }
        }
    }

    /// Simultaneous, capture-avoiding substitution.
    pub fn substitute(&self, s: &Subst) -> Constraint {
        match self {
            Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
                let mut inner = s.clone();
                inner.remove(&v.name);
                let range_vars: BTreeSet<String> = inner
                    .values()
                    .flat_map(|t| t.free_vars())
                    .map(|v| v.name)
                    .collect();
                let (bound, body) = if range_vars.contains(&v.name) {
                    let mut k = 0usize;
                    let fresh = loop {
                        let cand = format!("{}!b{k}", v.name);
                        if !range_vars.contains(&cand) && !b.free_vars().iter().any(|w| w.name == cand) {
                            break cand;
                        }
                        k += 1;
                    };
                    let fv = Var::new(fresh, v.sort.clone());
                    let mut rename = Subst::new();
                    rename.insert(v.name.clone(), Term::Var(fv.clone()));
                    (fv, b.substitute(&rename))
                } else {
                    (v.clone(), (**b).clone())
                };
                let body = Box::new(body.substitute(&inner));
                match self {
                    Constraint::Exists(..) => Constraint::Exists(bound, body),
                    _ => Constraint::Forall(bound, body),
                }
            }
            _ => self.map_terms_shallow(s),
        }
    }

    fn map_terms_shallow(&self, s: &Subst) -> Constraint {
        match self {
            Constraint::True | Constraint::False => self.clone(),
            Constraint::And(ps) => Constraint::And(ps.iter().map(|p| p.substitute(s)).collect()),
            Constraint::Or(ps) => Constraint::Or(ps.iter().map(|p| p.substitute(s)).collect()),
            Constraint::Not(c) => Constraint::Not(Box::new(c.substitute(s))),
            Constraint::Cmp(op, a, b) => Constraint::Cmp(*op, a.substitute(s), b.substitute(s)),
            Constraint::Test(c, t) => Constraint::Test(c.clone(), t.substitute(s)),
            Constraint::Exists(..) | Constraint::Forall(..) => self.substitute(s),
        }
    }
}

impl PredApp {
    pub fn substitute(&self, s: &Subst) -> PredApp {
        PredApp::new(self.pred.clone(), self.args.iter().map(|a| a.substitute(s)).collect())
    }
}

impl Clause {
    /// Substitutes in head, constraint and body; the binder list is left as is.
    pub fn substitute(&self, s: &Subst) -> Clause {
        Clause {
            vars: self.vars.clone(),
            head: match &self.head {
                Head::False => Head::False,
                Head::Pred(p) => Head::Pred(p.substitute(s)),
            },
            constraint: self.constraint.substitute(s),
            body: self.body.iter().map(|a| a.substitute(s)).collect(),
        }
    }
}

/// Substitution that first checks that every replacement has the sort of the
/// variable it replaces (looked up among `target`'s free variables).
pub fn substitute_checked(target: &Constraint, s: &Subst) -> Result<Constraint, SortError> {
    for v in target.free_vars() {
        if let Some(t) = s.get(&v.name) {
            if t.sort() != v.sort {
                return Err(SortError::new(format!(
                    "cannot substitute a term of sort {} for {} : {}",
                    t.sort(),
                    v.name,
                    v.sort
                )));
            }
        }
    }
    Ok(target.substitute(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chc::{adt_decl, AdtFamily, Datatypes, Sort};
    use proptest::prelude::*;

    fn nat() -> Datatypes {
        Datatypes::new(vec![AdtFamily {
            adts: vec![adt_decl("nat", &[("Z", &[]), ("S", &[("p", Sort::adt("nat"))])])],
        }])
        .unwrap()
    }

    fn nat_var(n: &str) -> Term {
        Term::var(n, Sort::adt("nat"))
    }

    #[test]
    fn substitutes_zero_into_successor() {
        let dt = nat();
        let s_ = dt.constructor("S").unwrap();
        let z = Term::cons(dt.constructor("Z").unwrap(), vec![]);
        let c = Constraint::eq(Term::cons(s_, vec![nat_var("x")]), nat_var("y"));
        let mut m = Subst::new();
        m.insert("x".into(), z.clone());
        assert_eq!(
            c.substitute(&m),
            Constraint::eq(Term::cons(s_, vec![z]), nat_var("y"))
        );
    }

    #[test]
    fn replay_style_substitution() {
        let dt = nat();
        let s_ = dt.constructor("S").unwrap();
        let c = Constraint::eq(nat_var("m"), nat_var("r"));
        let mut m = Subst::new();
        m.insert("m".into(), Term::cons(s_, vec![nat_var("n'")]));
        assert_eq!(
            c.substitute(&m),
            Constraint::eq(Term::cons(s_, vec![nat_var("n'")]), nat_var("r"))
        );
    }

    #[test]
    fn identity_mapping_is_structural_identity() {
        let c = Constraint::and([
            Constraint::eq(nat_var("a"), nat_var("b")),
            Constraint::cmp(crate::chc::CmpOp::Gt, Term::int_var("x"), Term::int(0)),
        ]);
        let mut m = Subst::new();
        for v in c.free_vars() {
            m.insert(v.name.clone(), Term::Var(v));
        }
        assert_eq!(c.substitute(&m), c);
    }

    #[test]
    fn free_vars_of_equation() {
        let dt = nat();
        let c = Constraint::eq(
            Term::cons(dt.constructor("S").unwrap(), vec![nat_var("x")]),
            Term::cons(dt.constructor("Z").unwrap(), vec![]),
        );
        let fv: Vec<_> = c.free_vars().into_iter().collect();
        assert_eq!(fv, vec![Var::new("x", Sort::adt("nat"))]);
    }

    #[test]
    fn quantified_substitution_avoids_capture() {
        // forall y. x = y, then [y/x] must not capture.
        let c = Constraint::Forall(
            Var::int("y"),
            Box::new(Constraint::eq(Term::int_var("x"), Term::int_var("y"))),
        );
        let mut m = Subst::new();
        m.insert("x".into(), Term::int_var("y"));
        let out = c.substitute(&m);
        let fv: Vec<_> = out.free_vars().into_iter().map(|v| v.name).collect();
        assert_eq!(fv, vec!["y".to_string()]);
    }

    #[test]
    fn checked_substitution_rejects_sort_mismatch() {
        let c = Constraint::eq(nat_var("x"), nat_var("y"));
        let mut m = Subst::new();
        m.insert("x".into(), Term::int(1));
        assert!(substitute_checked(&c, &m).is_err());
    }

    fn arb_int_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (-5i64..5).prop_map(Term::int),
            prop::sample::select(vec!["x", "y", "z", "w"]).prop_map(Term::int_var),
        ];
        leaf.prop_recursive(3, 16, 2, |inner| {
            (inner.clone(), inner, 0..3usize).prop_map(|(a, b, k)| match k {
                0 => Term::add(a, b),
                1 => Term::sub(a, b),
                _ => Term::mul(a, b),
            })
        })
    }

    proptest! {
        // [t2/y]([t1/x]e) = [[t2/y]t1/x, t2/y]e when x != y and x not in fv(t2).
        #[test]
        fn substitution_composition(e in arb_int_term(), t1 in arb_int_term(), t2 in arb_int_term()) {
            prop_assume!(!t2.mentions("x"));
            let mut s1 = Subst::new();
            s1.insert("x".into(), t1.clone());
            let mut s2 = Subst::new();
            s2.insert("y".into(), t2.clone());
            let lhs = e.substitute(&s1).substitute(&s2);
            let mut both = Subst::new();
            both.insert("x".into(), t1.substitute(&s2));
            both.insert("y".into(), t2);
            prop_assert_eq!(lhs, e.substitute(&both));
        }

        #[test]
        fn substitution_free_vars_bound(e in arb_int_term(), t in arb_int_term()) {
            let mut s = Subst::new();
            s.insert("x".into(), t.clone());
            let out = e.substitute(&s).free_vars();
            let mut allowed: BTreeSet<Var> = e.free_vars();
            allowed.remove(&Var::int("x"));
            allowed.extend(t.free_vars());
            prop_assert!(out.is_subset(&allowed));
        }
    }
}
