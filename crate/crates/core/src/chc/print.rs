use std::fmt::Write;

use num_bigint::Sign;

use super::{ChcSystem, Clause, CmpOp, Constraint, Datatypes, Head, PredApp, Sort, Term, Var};
use crate::sexp::quote_symbol;

/// Name of the SMT-LIB function standing for component `component` of the
/// catamorphism on `adt`.
pub fn cata_symbol(adt: &str, component: usize) -> String {
    format!("cata!{adt}!{component}")
}

pub fn print_sort(s: &Sort) -> String {
    match s {
        Sort::Int => "Int".into(),
        Sort::Bool => "Bool".into(),
        Sort::Adt(n) => quote_symbol(n),
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) => out.push_str(&quote_symbol(&v.name)),
        Term::Int(n) => {
            if n.sign() == Sign::Minus {
                let _ = write!(out, "(- {})", n.magnitude());
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Term::Cons(c, args) => {
            if args.is_empty() {
                out.push_str(&quote_symbol(&c.name));
            } else {
                out.push('(');
                out.push_str(&quote_symbol(&c.name));
                for a in args {
                    out.push(' ');
                    write_term(out, a);
                }
                out.push(')');
            }
        }
        Term::Arith(op, a, b) => {
            let _ = write!(out, "({} ", op.symbol());
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
        Term::Sel(c, k, arg) => {
            let _ = write!(out, "({} ", quote_symbol(&c.fields[*k].selector));
            write_term(out, arg);
            out.push(')');
        }
        Term::CataApp { adt, component, arg } => {
            let _ = write!(out, "({} ", quote_symbol(&cata_symbol(adt, *component)));
            write_term(out, arg);
            out.push(')');
        }
    }
}

pub fn print_constraint(c: &Constraint) -> String {
    let mut out = String::new();
    write_constraint(&mut out, c);
    out
}

fn write_constraint(out: &mut String, c: &Constraint) {
    match c {
        Constraint::True => out.push_str("true"),
        Constraint::False => out.push_str("false"),
        Constraint::And(ps) | Constraint::Or(ps) => {
            if ps.is_empty() {
                out.push_str(if matches!(c, Constraint::And(_)) { "true" } else { "false" });
                return;
            }
            out.push_str(if matches!(c, Constraint::And(_)) { "(and" } else { "(or" });
            for p in ps {
                out.push(' ');
                write_constraint(out, p);
            }
            out.push(')');
        }
        Constraint::Not(p) => {
            out.push_str("(not ");
            write_constraint(out, p);
            out.push(')');
        }
        Constraint::Cmp(op, a, b) => {
            let (open, close) = match op {
                CmpOp::Eq | CmpOp::AdtEq => ("(= ", ")"),
                CmpOp::Ne | CmpOp::AdtNe => ("(not (= ", "))"),
                CmpOp::Gt => ("(> ", ")"),
                CmpOp::Le => ("(<= ", ")"),
            };
            out.push_str(open);
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push_str(close);
        }
        Constraint::Test(ctor, t) => {
            let _ = write!(out, "((_ is {}) ", quote_symbol(&ctor.name));
            write_term(out, t);
            out.push(')');
        }
        Constraint::Exists(v, b) | Constraint::Forall(v, b) => {
            let q = if matches!(c, Constraint::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "({q} (({} {})) ", quote_symbol(&v.name), print_sort(&v.sort));
            write_constraint(out, b);
            out.push(')');
        }
    }
}

pub fn print_atom(a: &PredApp) -> String {
    if a.args.is_empty() {
        return quote_symbol(&a.pred);
    }
    let mut out = format!("({}", quote_symbol(&a.pred));
    for t in &a.args {
        out.push(' ');
        write_term(&mut out, t);
    }
    out.push(')');
    out
}

pub(crate) fn print_binders(vars: &[Var]) -> String {
    let mut out = String::from("(");
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} {})", quote_symbol(&v.name), print_sort(&v.sort));
    }
    out.push(')');
    out
}

/// The clause as an SMT-LIB2 formula (without the surrounding `assert`).
pub fn print_clause(c: &Clause) -> String {
    let mut body: Vec<String> = c.constraint.conjuncts().into_iter().map(print_constraint).collect();
    body.extend(c.body.iter().map(print_atom));
    let head = match &c.head {
        Head::False => "false".to_string(),
        Head::Pred(p) => print_atom(p),
    };
    let matrix = match body.len() {
        0 => head,
        1 => format!("(=> {} {head})", body[0]),
        _ => format!("(=> (and {}) {head})", body.join(" ")),
    };
    if c.vars.is_empty() {
        matrix
    } else {
        format!("(forall {} {matrix})", print_binders(&c.vars))
    }
}

/// `declare-datatypes` commands, one per mutually recursive family.
pub fn print_datatypes(dt: &Datatypes) -> String {
    let mut out = String::new();
    for fam in dt.families() {
        out.push_str("(declare-datatypes (");
        for (i, adt) in fam.adts.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({} 0)", quote_symbol(&adt.name));
        }
        out.push_str(") (");
        for (i, adt) in fam.adts.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push('(');
            for (j, c) in adt.constructors.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "({}", quote_symbol(&c.name));
                for f in &c.fields {
                    let _ = write!(out, " ({} {})", quote_symbol(&f.selector), print_sort(&f.sort));
                }
                out.push(')');
            }
            out.push(')');
        }
        out.push_str("))\n");
    }
    out
}

pub(crate) fn print_pred_decls(system: &ChcSystem) -> String {
    let mut out = String::new();
    for (name, sorts) in &system.predicates {
        let args: Vec<String> = sorts.iter().map(print_sort).collect();
        let _ = writeln!(out, "(declare-fun {} ({}) Bool)", quote_symbol(name), args.join(" "));
    }
    out
}

pub(crate) fn print_assertions(system: &ChcSystem) -> String {
    let mut out = String::new();
    for c in &system.clauses {
        let _ = writeln!(out, "(assert {})", print_clause(c));
    }
    out
}

/// Deterministic HORN script: logic, datatypes, predicates, clauses, `check-sat`.
pub fn print_system(system: &ChcSystem) -> String {
    let mut out = String::from("(set-logic HORN)\n");
    out.push_str(&print_datatypes(&system.datatypes));
    out.push_str(&print_pred_decls(system));
    out.push_str(&print_assertions(system));
    out.push_str("(check-sat)\n");
    out
}
