//! Bounded SLD unfolding: a deterministic refutation search.

use std::collections::HashMap;

use crate::chc::{print_constraint, simplify_with, ChcSystem, Constraint, PredApp, SimplifyOptions};
use crate::preprocess::is_adm_pred;

use super::proof::Decide;
use super::{ProofStep, ResolutionProof, Result};

/// Search effort of the last unfolding run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnfoldStats {
    pub expansions: usize,
    pub leaf_checks: usize,
}

/// Upper bound on expansions per call, to keep the fallback bounded on
/// satisfiable inputs with many short derivations.
const EXPANSION_LIMIT: usize = 200_000;

/// Smallest derivation height per clause (`usize::MAX` if underivable).
fn min_heights(system: &ChcSystem) -> Vec<usize> {
    let mut pred: HashMap<&str, usize> = HashMap::new();
    let mut clause = vec![usize::MAX; system.clauses.len()];
    loop {
        let mut changed = false;
        for (i, c) in system.clauses.iter().enumerate() {
            let mut h = 1usize;
            for a in &c.body {
                match pred.get(a.pred.as_str()) {
                    Some(&p) => h = h.max(p + 1),
                    None => {
                        h = usize::MAX;
                        break;
                    }
                }
            }
            if h < clause[i] {
                clause[i] = h;
                changed = true;
                if let Some(p) = c.head.pred() {
                    let e = pred.entry(p.pred.as_str()).or_insert(usize::MAX);
                    *e = (*e).min(h);
                }
            }
        }
        if !changed {
            return clause;
        }
    }
}

struct Search<'a, 'd> {
    system: &'a ChcSystem,
    heights: Vec<usize>,
    decide: &'a mut Decide<'d>,
    cache: HashMap<String, Option<bool>>,
    stats: UnfoldStats,
    steps: Vec<ProofStep>,
}

impl<'a, 'd> Search<'a, 'd> {
    fn sat(&mut self, c: &Constraint) -> Result<bool> {
        let key = print_constraint(c);
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v == Some(true));
        }
        self.stats.leaf_checks += 1;
        let v = (self.decide)(c)?;
        self.cache.insert(key, v);
        Ok(v == Some(true))
    }

    /// Depth-first search; `atoms` carry their remaining height budget.
    fn go(&mut self, parts: &mut Vec<Constraint>, atoms: &[(PredApp, usize)]) -> Result<bool> {
        if self.stats.expansions >= EXPANSION_LIMIT {
            return Ok(false);
        }
        self.stats.expansions += 1;
        let opts = SimplifyOptions { unify_constructors: true };
        let c = simplify_with(&Constraint::and(parts.iter().cloned()), opts);
        if c == Constraint::False {
            return Ok(false);
        }
        let Some(((atom, budget), rest)) = atoms.split_first() else {
            return self.sat(&c);
        };
        for (id, clause) in self.system.clauses.iter().enumerate() {
            let Some(head) = clause.head.pred() else { continue };
            if head.pred != atom.pred || self.heights[id] > *budget {
                continue;
            }
            let n = self.steps.len() + 1;
            let renamed = clause.rename_vars(|v| format!("{v}!{n}"));
            let rhead = renamed.head.pred().expect("head");
            let before = parts.len();
            for (x, y) in atom.args.iter().zip(&rhead.args) {
                parts.push(Constraint::eq(x.clone(), y.clone()));
            }
            parts.push(renamed.constraint.clone());
            let mut next: Vec<(PredApp, usize)> = renamed.body.iter().map(|a| (a.clone(), budget - 1)).collect();
            next.extend_from_slice(rest);
            self.steps.push(ProofStep {
                clause: id,
                atom: 0,
                admissibility: is_adm_pred(&head.pred),
                atom_values: None,
            });
            if self.go(parts, &next)? {
                return Ok(true);
            }
            self.steps.pop();
            parts.truncate(before);
        }
        Ok(false)
    }
}

/// Searches for a refutation of height at most `max_depth` (the goal
/// clause counts as one level), by iterative deepening. Goals are tried in
/// clause-id order, clauses in id order, and the leftmost atom is always
/// resolved first. Leaf constraints are decided by `decide`.
pub fn internal_unfold_unsat(system: &ChcSystem, max_depth: usize, decide: &mut Decide<'_>) -> Result<Option<ResolutionProof>> {
    Ok(unfold_with_stats(system, max_depth, decide)?.0)
}

pub(crate) fn unfold_with_stats(
    system: &ChcSystem,
    max_depth: usize,
    decide: &mut Decide<'_>,
) -> Result<(Option<ResolutionProof>, UnfoldStats)> {
    let heights = min_heights(system);
    let mut search = Search {
        system,
        heights,
        decide,
        cache: HashMap::new(),
        stats: UnfoldStats::default(),
        steps: Vec::new(),
    };
    for depth in 1..=max_depth {
        for goal in system.goal_ids() {
            if search.heights[goal] > depth {
                continue;
            }
            let clause = &system.clauses[goal];
            let atoms: Vec<(PredApp, usize)> = clause.body.iter().map(|a| (a.clone(), depth - 1)).collect();
            let mut parts = vec![clause.constraint.clone()];
            search.steps.clear();
            if search.go(&mut parts, &atoms)? {
                let proof = ResolutionProof {
                    goal,
                    steps: std::mem::take(&mut search.steps),
                };
                return Ok((Some(proof), search.stats));
            }
        }
    }
    Ok((None, search.stats))
}
