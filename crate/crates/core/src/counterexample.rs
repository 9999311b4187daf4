//! Counterexamples: replaying abstract refutations on the original clauses
//! and deciding whether they are real.

use std::time::Duration;

use crate::backend::{replay, Backend, Logic, ReplayError, ResolutionProof, SmtResult};
use crate::chc::{ChcSystem, ClauseId, Constraint, Env};

pub use crate::chc::simplify;

/// The constraint of a replayed refutation and the original clauses it used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub constraint: Constraint,
    /// Goal first, then each non-admissibility step, in replay order.
    pub clauses: Vec<ClauseId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CexError {
    #[error("replay mismatch: {0}")]
    ReplayMismatch(#[from] ReplayError),
    #[error("abstract clause #{0} has no original clause")]
    UnmappedClause(ClauseId),
}

/// Replays an abstract proof on the original (augmented) system. `origin`
/// maps abstract clause ids to original ones. Admissibility steps are
/// skipped: admissibility predicates hold on every ground term.
pub fn replay_proof(proof: &ResolutionProof, original: &ChcSystem, origin: &[ClauseId]) -> Result<Counterexample, CexError> {
    let map = |id: ClauseId| origin.get(id).copied().ok_or(CexError::UnmappedClause(id));
    let mut mapped = proof.clone();
    mapped.goal = map(proof.goal)?;
    for s in &mut mapped.steps {
        s.clause = map(s.clause)?;
    }
    let constraint = replay(original, &mapped, true)?;
    let clauses = std::iter::once(mapped.goal)
        .chain(mapped.steps.iter().filter(|s| !s.admissibility).map(|s| s.clause))
        .collect();
    Ok(Counterexample { constraint, clauses })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// A real refutation; the assignment witnesses it.
    Sat(Env),
    /// Spurious.
    Unsat,
    Unknown(String),
}

/// Decides θ over ADT+LIA. Backend failures become `Unknown`.
pub fn feasibility(backend: &Backend, theta: &Constraint, system: &ChcSystem, timeout: Option<Duration>) -> Feasibility {
    let logic = if system.datatypes.is_empty() { Logic::Lia } else { Logic::AdtLia };
    match backend.check_constraint(theta, &system.datatypes, logic, timeout) {
        Ok(SmtResult::Sat(env)) => Feasibility::Sat(env),
        Ok(SmtResult::Unsat) => Feasibility::Unsat,
        Ok(SmtResult::Unknown(r)) => Feasibility::Unknown(r),
        Ok(SmtResult::Timeout) => Feasibility::Unknown("timeout".into()),
        Err(e) => {
            log::warn!("feasibility check failed: {e}");
            Feasibility::Unknown(e.to_string())
        }
    }
}
