//! Resolution proofs: SLD normal form, replay, and parsing of solver
//! hyper-resolution proofs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;

use crate::chc::{parse_term, simplify, ChcSystem, ClauseId, Constraint, Datatypes, PredApp, Term};
use crate::preprocess::is_adm_pred;
use crate::sexp::{parse_all, Sexp};

use super::{BackendError, Result};

/// One SLD step: resolve body atom `atom` of the current goal against the
/// head of clause `clause`; the clause body replaces the atom in place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub clause: ClauseId,
    pub atom: usize,
    /// The clause defines an admissibility predicate.
    pub admissibility: bool,
    /// Ground arguments of the resolved atom, when the solver reported them.
    pub atom_values: Option<Vec<BigInt>>,
}

/// A refutation in SLD normal form rooted at a goal clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionProof {
    pub goal: ClauseId,
    pub steps: Vec<ProofStep>,
}

impl ResolutionProof {
    /// How often each clause is used, the goal included.
    pub fn clause_counts(&self) -> BTreeMap<ClauseId, usize> {
        let mut m = BTreeMap::new();
        *m.entry(self.goal).or_insert(0) += 1;
        for s in &self.steps {
            *m.entry(s.clause).or_insert(0) += 1;
        }
        m
    }

    /// Clauses used by non-admissibility steps, the goal included.
    pub fn main_clauses(&self) -> Vec<ClauseId> {
        let mut v: Vec<ClauseId> = std::iter::once(self.goal)
            .chain(self.steps.iter().filter(|s| !s.admissibility).map(|s| s.clause))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl fmt::Display for ResolutionProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "goal #{}", self.goal)?;
        for s in &self.steps {
            write!(f, "; atom {} by #{}", s.atom, s.clause)?;
            if s.admissibility {
                write!(f, " (adm)")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("clause #{0} does not exist")]
    UnknownClause(ClauseId),
    #[error("clause #{0} is not a goal clause")]
    NotAGoal(ClauseId),
    #[error("step {step}: goal clause #{clause} used as a rule")]
    GoalAsRule { step: usize, clause: ClauseId },
    #[error("step {step}: no body atom at position {atom}")]
    AtomOutOfRange { step: usize, atom: usize },
    #[error("step {step}: clause head {found} does not match atom {expected}")]
    PredicateMismatch { step: usize, expected: String, found: String },
    #[error("step {step}: non-admissibility clause applied to a skipped atom")]
    SkippedAtom { step: usize },
    #[error("{0} body atoms left unresolved")]
    Incomplete(usize),
}

/// Replays `proof` on `system`, returning the accumulated constraint.
///
/// The goal keeps its variable names; the clause of step `i` has its
/// variables suffixed with `!i`. With `skip_admissibility`, admissibility
/// steps contribute nothing and their atoms are only tracked positionally.
pub fn replay(system: &ChcSystem, proof: &ResolutionProof, skip_admissibility: bool) -> std::result::Result<Constraint, ReplayError> {
    let goal = system.clauses.get(proof.goal).ok_or(ReplayError::UnknownClause(proof.goal))?;
    if !goal.is_goal() {
        return Err(ReplayError::NotAGoal(proof.goal));
    }
    let mut parts = vec![goal.constraint.clone()];
    // None marks an atom whose derivation is being skipped.
    let mut atoms: Vec<Option<PredApp>> = goal.body.iter().cloned().map(Some).collect();
    for (i, step) in proof.steps.iter().enumerate() {
        let n = i + 1;
        let clause = system.clauses.get(step.clause).ok_or(ReplayError::UnknownClause(step.clause))?;
        let head = clause.head.pred().ok_or(ReplayError::GoalAsRule { step: n, clause: step.clause })?;
        if step.atom >= atoms.len() {
            return Err(ReplayError::AtomOutOfRange { step: n, atom: step.atom });
        }
        let skip = skip_admissibility && is_adm_pred(&head.pred);
        let replacement: Vec<Option<PredApp>> = match &atoms[step.atom] {
            None if skip => vec![None; clause.body.len()],
            None => return Err(ReplayError::SkippedAtom { step: n }),
            Some(a) if a.pred != head.pred => {
                return Err(ReplayError::PredicateMismatch {
                    step: n,
                    expected: a.pred.clone(),
                    found: head.pred.clone(),
                })
            }
            Some(_) if skip => vec![None; clause.body.len()],
            Some(a) => {
                let renamed = clause.rename_vars(|v| format!("{v}!{n}"));
                let head = renamed.head.pred().expect("head");
                for (x, y) in a.args.iter().zip(&head.args) {
                    parts.push(Constraint::eq(x.clone(), y.clone()));
                }
                parts.push(renamed.constraint.clone());
                renamed.body.iter().cloned().map(Some).collect()
            }
        };
        atoms.splice(step.atom..=step.atom, replacement);
    }
    if !atoms.is_empty() {
        return Err(ReplayError::Incomplete(atoms.len()));
    }
    Ok(Constraint::and(parts))
}

/// Derivation tree node extracted from a solver proof.
#[derive(Debug, Clone)]
struct Node {
    /// `None` for the query (goal) node.
    pred: Option<String>,
    args: Vec<BigInt>,
    children: Vec<Node>,
}

struct Reader<'a> {
    env: HashMap<String, Sexp>,
    system: &'a ChcSystem,
}

fn perr(msg: impl Into<String>) -> BackendError {
    BackendError::ProofParse(msg.into())
}

impl<'a> Reader<'a> {
    fn strip_lets(&mut self, mut s: Sexp) -> Result<Sexp> {
        while s.head() == Some("let") {
            let items = s.list().unwrap();
            if items.len() != 3 {
                return Err(perr("malformed let"));
            }
            for b in items[1].list().ok_or_else(|| perr("malformed let bindings"))? {
                let pair = b.list().filter(|p| p.len() == 2).ok_or_else(|| perr("malformed let binding"))?;
                let name = pair[0].symbol().ok_or_else(|| perr("malformed let binding"))?;
                self.env.insert(name.to_string(), pair[1].clone());
            }
            s = items[2].clone();
        }
        Ok(s)
    }

    fn deref(&mut self, s: &Sexp) -> Result<Sexp> {
        let mut cur = s.clone();
        let mut hops = 0;
        while let Some(v) = cur.symbol().and_then(|n| self.env.get(n)) {
            cur = v.clone();
            hops += 1;
            if hops > self.env.len() + 1 {
                return Err(perr("cyclic let binding"));
            }
        }
        self.strip_lets(cur)
    }

    /// A ground atom `(P n ...)`, `P`, or `false`.
    fn atom(&mut self, s: &Sexp) -> Result<(Option<String>, Vec<BigInt>)> {
        let s = self.deref(s)?;
        let (name, args) = match s.list() {
            Some(items) if !items.is_empty() => (items[0].symbol().ok_or_else(|| perr("expected an atom"))?.to_string(), items[1..].to_vec()),
            _ => (s.symbol().ok_or_else(|| perr("expected an atom"))?.to_string(), Vec::new()),
        };
        if name == "false" || name.starts_with("query!") {
            return Ok((None, Vec::new()));
        }
        if !self.system.predicates.contains_key(&name) {
            return Err(perr(format!("unknown predicate {name} in proof")));
        }
        let mut vals = Vec::with_capacity(args.len());
        for a in &args {
            let a = self.deref(a)?;
            let t = parse_term(&a, &Datatypes::default(), &[]).map_err(|e| perr(format!("argument {a}: {e}")))?;
            match t.fold_constants() {
                Term::Int(n) => vals.push(n),
                _ => return Err(perr(format!("non-ground argument {a}"))),
            }
        }
        Ok((Some(name), vals))
    }

    fn node(&mut self, s: &Sexp) -> Result<Node> {
        let s = self.deref(s)?;
        let items = s.list().ok_or_else(|| perr(format!("expected a proof term, found {s}")))?;
        let head = items.first().ok_or_else(|| perr("empty proof term"))?;
        if let Some(h) = head.list() {
            if h.len() >= 2 && h[0].is_symbol("_") && h[1].is_symbol("hyper-res") {
                if items.len() < 3 {
                    return Err(perr("hyper-res without rule or conclusion"));
                }
                let (pred, args) = self.atom(items.last().unwrap())?;
                let mut children = Vec::new();
                for p in &items[2..items.len() - 1] {
                    children.push(self.node(p)?);
                }
                return Ok(Node { pred, args, children });
            }
            return Err(perr(format!("unsupported proof rule {head}")));
        }
        match head.symbol() {
            Some("asserted") if items.len() == 2 => {
                let (pred, args) = self.atom(&items[1])?;
                if pred.is_none() {
                    return Err(perr("asserted query"));
                }
                Ok(Node { pred, args, children: Vec::new() })
            }
            Some("mp") if items.len() == 4 => self.node(&items[1]),
            _ => Err(perr(format!("unsupported proof rule {head}"))),
        }
    }
}

fn find_proof(items: &[Sexp]) -> Option<&Sexp> {
    for s in items {
        if s.head() == Some("proof") {
            return s.list().and_then(|l| l.get(1));
        }
        if let Some(l) = s.list() {
            if l.first().is_some_and(|h| h.list().is_some() || h.is_symbol("set-logic")) {
                if let Some(p) = find_proof(l) {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// Decides a constraint: `Some(true)` satisfiable, `Some(false)` not,
/// `None` unknown.
pub type Decide<'d> = dyn FnMut(&Constraint) -> Result<Option<bool>> + 'd;

/// Parses a hyper-resolution proof and maps each node to a clause of
/// `system` (head predicate, body predicates, and a consistent instance).
pub fn parse_proof(text: &str, system: &ChcSystem, decide: &mut Decide<'_>) -> Result<ResolutionProof> {
    let items = parse_all(text).map_err(|e| perr(format!("{}: {}", e.pos, e.msg)))?;
    let body = find_proof(&items).ok_or_else(|| perr("no proof in solver output"))?.clone();
    let mut reader = Reader {
        env: HashMap::new(),
        system,
    };
    let root = reader.node(&body)?;
    if root.pred.is_some() {
        return Err(perr("proof does not end in the query"));
    }
    let mut steps = Vec::new();
    let goal = match_node(&root, system, decide, &mut steps, true)?;
    Ok(ResolutionProof { goal, steps })
}

/// Matches `node` to a clause and appends the steps of its subtree in
/// leftmost pre-order. Returns the clause id.
fn match_node(node: &Node, system: &ChcSystem, decide: &mut Decide<'_>, steps: &mut Vec<ProofStep>, root: bool) -> Result<ClauseId> {
    let mut want: Vec<&str> = node.children.iter().map(|c| c.pred.as_deref().unwrap_or("")).collect();
    want.sort_unstable();
    for (id, clause) in system.clauses.iter().enumerate() {
        let head_ok = match (&node.pred, clause.head.pred()) {
            (None, None) => true,
            (Some(p), Some(h)) => *p == h.pred && h.args.len() == node.args.len(),
            _ => false,
        };
        if !head_ok || clause.body.len() != node.children.len() {
            continue;
        }
        let mut have: Vec<&str> = clause.body.iter().map(|a| a.pred.as_str()).collect();
        have.sort_unstable();
        if have != want {
            continue;
        }
        let mut base = vec![clause.constraint.clone()];
        if let Some(h) = clause.head.pred() {
            for (t, v) in h.args.iter().zip(&node.args) {
                base.push(Constraint::eq(t.clone(), Term::Int(v.clone())));
            }
        }
        let mut order = vec![usize::MAX; clause.body.len()];
        let mut used = vec![false; node.children.len()];
        if assign(clause, node, 0, &mut order, &mut used, &mut base, decide)? {
            if !root {
                steps.push(ProofStep {
                    clause: id,
                    atom: 0,
                    admissibility: is_adm_pred(&clause.head.pred().expect("rule").pred),
                    atom_values: Some(node.args.clone()),
                });
            }
            for &child in &order {
                match_node(&node.children[child], system, decide, steps, false)?;
            }
            return Ok(id);
        }
    }
    Err(perr(format!(
        "no clause matches proof node {}",
        node.pred.as_deref().unwrap_or("query")
    )))
}

/// Assigns proof children to clause body positions, backtracking over
/// children with the same predicate.
fn assign(
    clause: &crate::chc::Clause,
    node: &Node,
    pos: usize,
    order: &mut [usize],
    used: &mut [bool],
    parts: &mut Vec<Constraint>,
    decide: &mut Decide<'_>,
) -> Result<bool> {
    if pos == clause.body.len() {
        let c = simplify(&Constraint::and(parts.iter().cloned()));
        return Ok(match c {
            Constraint::True => true,
            Constraint::False => false,
            other => decide(&other)?.unwrap_or(true),
        });
    }
    let atom = &clause.body[pos];
    for k in 0..node.children.len() {
        let child = &node.children[k];
        if used[k] || child.pred.as_deref() != Some(atom.pred.as_str()) || child.args.len() != atom.args.len() {
            continue;
        }
        let before = parts.len();
        for (t, v) in atom.args.iter().zip(&child.args) {
            parts.push(Constraint::eq(t.clone(), Term::Int(v.clone())));
        }
        // Cheap early rejection on ground contradictions.
        if simplify(&Constraint::and(parts.iter().cloned())) != Constraint::False {
            used[k] = true;
            order[pos] = k;
            if assign(clause, node, pos + 1, order, used, parts, decide)? {
                return Ok(true);
            }
            used[k] = false;
        }
        parts.truncate(before);
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chc::parse_system;

    const ZERO_ABS: &str = r#"
(set-logic HORN)
(declare-fun PlusNat (Int Int Int) Bool)
(declare-fun Lt (Int Int) Bool)
(declare-fun adm!nat (Int) Bool)
(assert (adm!nat 0))
(assert (forall ((y0 Int)) (=> (adm!nat y0) (adm!nat 0))))
(assert (forall ((m Int)) (=> (adm!nat m) (PlusNat m 0 m))))
(assert (forall ((m Int) (n Int) (r Int)) (=> (and (adm!nat m) (adm!nat n) (adm!nat r) (PlusNat m n r)) (PlusNat m 0 0))))
(assert (forall ((n Int)) (=> (adm!nat n) (Lt 0 0))))
(assert (forall ((m Int) (n Int)) (=> (and (adm!nat m) (adm!nat n) (Lt m n)) (Lt 0 0))))
(assert (forall ((m Int) (n Int) (r Int)) (=> (and (adm!nat m) (adm!nat n) (adm!nat r) (PlusNat m n r) (Lt r m)) false)))
"#;

    // Solver proof for ZERO_ABS in the hyper-resolution format.
    const PROOF: &str = r#"unsat
(error "line 18 column 10: model is not available")
((set-logic HORN)
(declare-fun query!0 (Int Int Int) Bool)
(proof
(let (($x1296 (query!0 0 0 0)))
(let (($x25 (adm!nat 0)))
(let ((@x23 (asserted $x25)))
(let ((@x1316 ((_ hyper-res 0 0) @x23 $x25)))
(let (($x123 (forall ((A Int) )(=> (adm!nat A) (PlusNat A 0 A)))))
(let (($x73 (Lt 0 0)))
(let (($x137 (forall ((A Int) )(=> (adm!nat A) (Lt 0 0)))))
(let (($x157 (forall ((A Int) (B Int) (C Int) )(=> (and (adm!nat C) (Lt C A) (PlusNat A B C) (adm!nat A) (adm!nat B)) (query!0 A B C)))))
(let ((@x1378 ((_ hyper-res 0 0 0 1 0 2 0 3 0 4 0 5) (asserted $x157) @x1316 ((_ hyper-res 0 0 0 1) (asserted $x137) @x1316 $x73) ((_ hyper-res 0 0 0 1) (asserted $x123) @x1316 (PlusNat 0 0 0)) @x1316 @x1316 $x1296)))
(mp @x1378 (asserted (=> $x1296 false)) false))))))))))))
"#;

    fn no_solver(_: &Constraint) -> Result<Option<bool>> {
        Ok(None)
    }

    #[test]
    fn parses_and_replays_solver_proof() {
        let sys = parse_system(ZERO_ABS).unwrap();
        let proof = parse_proof(PROOF, &sys, &mut no_solver).unwrap();
        assert_eq!(proof.goal, 6);
        assert_eq!(proof.main_clauses(), vec![2, 4, 6]);
        // 3 adm atoms of the goal, plus one under each of the two facts.
        assert_eq!(proof.steps.iter().filter(|s| s.admissibility).count(), 5);
        assert!(proof.steps.iter().all(|s| s.atom == 0));
        let residual = simplify(&replay(&sys, &proof, false).unwrap());
        assert_eq!(residual, Constraint::True);
        // Skipping admissibility still consumes every atom.
        replay(&sys, &proof, true).unwrap();
    }

    #[test]
    fn malformed_proofs_are_rejected() {
        let sys = parse_system(ZERO_ABS).unwrap();
        for bad in ["unsat (", "unsat", "((proof (frobnicate 1 2)))", "((proof ((_ hyper-res 0) (asserted (Nope 1)) (Nope 1))))"] {
            assert!(matches!(parse_proof(bad, &sys, &mut no_solver), Err(BackendError::ProofParse(_))), "{bad}");
        }
    }

    #[test]
    fn replay_detects_mismatches() {
        let sys = parse_system(ZERO_ABS).unwrap();
        let bad = ResolutionProof {
            goal: 6,
            steps: vec![ProofStep {
                clause: 2,
                atom: 0,
                admissibility: false,
                atom_values: None,
            }],
        };
        assert!(matches!(replay(&sys, &bad, false), Err(ReplayError::PredicateMismatch { .. })));
        let not_goal = ResolutionProof { goal: 0, steps: vec![] };
        assert_eq!(replay(&sys, &not_goal, false), Err(ReplayError::NotAGoal(0)));
        let short = ResolutionProof { goal: 6, steps: vec![] };
        assert_eq!(replay(&sys, &short, false), Err(ReplayError::Incomplete(5)));
    }
}
