//! Maximal satisfying subteam for inclusion-logic formulas.
//!
//! For formulas whose atoms are within `{inc}`, satisfaction is union closed,
//! so every team has a unique largest satisfying subteam (possibly empty).
//! `max_subteam` computes it by a structural greatest-fixpoint recursion,
//! polynomial for a fixed formula; `max_subteam_brute` recomputes it by
//! scanning subteams in descending size and is the correctness reference.

use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::checker::{self, CheckError, EvalConfig};
use crate::formula::{AtomSet, Formula};
use crate::structure::Structure;
use crate::team::{extend_all, Team, TeamError};

/// Largest team size `max_subteam_brute` accepts (it scans `2^|X|` subteams).
pub const DEFAULT_BRUTE_MEMBER_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaxsubError {
    #[error("formula uses atoms {0}, only the inclusion fragment is supported")]
    UnsupportedFragment(AtomSet),
    #[error("team has {len} members, brute-force cap is {cap}")]
    BruteCapExceeded { len: usize, cap: usize },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

fn require_inclusion_fragment(formula: &Formula) -> Result<(), MaxsubError> {
    let atoms = formula.atoms();
    if atoms.within(AtomSet::INC) {
        Ok(())
    } else {
        Err(MaxsubError::UnsupportedFragment(atoms))
    }
}

/// The unique ⊆-largest `Y ⊆ X` with `A ⊨_Y φ`, for `φ` in the inclusion
/// fragment.
pub fn max_subteam(a: &Structure, team: &Team, formula: &Formula) -> Result<Team, MaxsubError> {
    max_subteam_with_steps(a, team, formula).map(|(team, _)| team)
}

/// As `max_subteam`, also reporting the elementary step count.
pub fn max_subteam_with_steps(
    a: &Structure,
    team: &Team,
    formula: &Formula,
) -> Result<(Team, u64), MaxsubError> {
    require_inclusion_fragment(formula)?;
    Ok(max_subteam_node(a, team, formula)?)
}

/// Fixpoint recursion without the fragment check; the checker's inclusion
/// fast path calls this per subformula.
pub(crate) fn max_subteam_node(
    a: &Structure,
    team: &Team,
    formula: &Formula,
) -> Result<(Team, u64), CheckError> {
    let mut steps = 0u64;
    let result = fixpoint(a, team, formula, &mut steps)?;
    Ok((result, steps))
}

fn fixpoint(
    a: &Structure,
    team: &Team,
    formula: &Formula,
    steps: &mut u64,
) -> Result<Team, CheckError> {
    *steps += 1;
    if team.is_empty() {
        return Ok(team.clone());
    }
    match formula {
        // FO literals are flat: keep exactly the members whose singleton
        // satisfies the literal.
        Formula::Eq(..) | Formula::Neq(..) | Formula::Rel(..) | Formula::NegRel(..) => {
            let mut result = Team::empty(Arc::clone(team.space()));
            for assignment in team.assignments() {
                *steps += 1;
                let singleton = Team::from_indices(Arc::clone(team.space()), [assignment.index()])?;
                if checker::eval_atom(a, &singleton, formula)? {
                    result.insert(assignment.index())?;
                }
            }
            Ok(result)
        }
        // Remove members whose x̄-value has no ȳ-witness left, to stability.
        Formula::Inc(xs, ys) => {
            let xpos: Vec<usize> = positions(team, xs)?;
            let ypos: Vec<usize> = positions(team, ys)?;
            let mut current = team.clone();
            loop {
                let mut witnesses: std::collections::HashSet<Vec<usize>> =
                    std::collections::HashSet::new();
                for assignment in current.assignments() {
                    *steps += 1;
                    witnesses.insert(ypos.iter().map(|&p| assignment.values()[p]).collect());
                }
                let mut next = Team::empty(Arc::clone(team.space()));
                for assignment in current.assignments() {
                    *steps += 1;
                    let key: Vec<usize> = xpos.iter().map(|&p| assignment.values()[p]).collect();
                    if witnesses.contains(&key) {
                        next.insert(assignment.index())?;
                    }
                }
                if next == current {
                    return Ok(next);
                }
                current = next;
            }
        }
        // Union closure justifies the pointwise union over the lax split.
        Formula::Or(l, r) => {
            let left = fixpoint(a, team, l, steps)?;
            let right = fixpoint(a, team, r, steps)?;
            Ok(left.union(&right)?)
        }
        Formula::And(l, r) => {
            let mut current = team.clone();
            loop {
                *steps += 1;
                let left = fixpoint(a, &current, l, steps)?;
                let right = fixpoint(a, &current, r, steps)?;
                let next = left.intersection(&right)?;
                if next == current {
                    return Ok(next);
                }
                current = next;
            }
        }
        Formula::Exists(var, body) => {
            let extended = extend_all(team, var)?;
            let good = fixpoint(a, &extended, body, steps)?;
            retain_by_extension(team, var, &good, steps, false)
        }
        Formula::Forall(var, body) => {
            let mut current = team.clone();
            loop {
                *steps += 1;
                let extended = extend_all(&current, var)?;
                let good = fixpoint(a, &extended, body, steps)?;
                let next = retain_by_extension(&current, var, &good, steps, true)?;
                if next == current {
                    return Ok(next);
                }
                current = next;
            }
        }
        Formula::Dep(..) | Formula::Ind(..) => Err(CheckError::NotAnAtom),
    }
}

fn positions(team: &Team, vars: &[String]) -> Result<Vec<usize>, CheckError> {
    vars.iter().map(|v| Ok(team.space().position(v)?)).collect()
}

/// Keeps the members of `team` whose supplemented extensions at `var` lie in
/// `good`: all of them when `all` is set (universal), at least one otherwise
/// (existential).
fn retain_by_extension(
    team: &Team,
    var: &str,
    good: &Team,
    steps: &mut u64,
    all: bool,
) -> Result<Team, CheckError> {
    let new_space = good.space();
    let pos = new_space.position(var)?;
    let fresh = team.space().position(var).is_err();
    let universe = team.space().universe_size();
    let mut result = Team::empty(Arc::clone(team.space()));
    let mut scratch = Vec::with_capacity(new_space.vars().len());
    for assignment in team.assignments() {
        let mut any = false;
        let mut every = true;
        for value in 0..universe {
            *steps += 1;
            scratch.clear();
            scratch.extend_from_slice(assignment.values());
            if fresh {
                scratch.insert(pos, value);
            } else {
                scratch[pos] = value;
            }
            if good.contains(new_space.index_of(&scratch)?) {
                any = true;
            } else {
                every = false;
            }
        }
        if (all && every) || (!all && any) {
            result.insert(assignment.index())?;
        }
    }
    Ok(result)
}

/// Reference computation: scan subteams of `X` in descending size and return
/// the first satisfying one, which by union closure is the unique maximum.
/// Evaluation uses the memo-free, fast-path-free checker configuration so the
/// fixpoint is validated by an independent code path.
pub fn max_subteam_brute(
    a: &Structure,
    team: &Team,
    formula: &Formula,
) -> Result<Team, MaxsubError> {
    max_subteam_brute_with_cap(a, team, formula, DEFAULT_BRUTE_MEMBER_CAP)
}

pub fn max_subteam_brute_with_cap(
    a: &Structure,
    team: &Team,
    formula: &Formula,
    cap: usize,
) -> Result<Team, MaxsubError> {
    require_inclusion_fragment(formula)?;
    if team.len() > cap {
        return Err(MaxsubError::BruteCapExceeded {
            len: team.len(),
            cap,
        });
    }
    let cfg = EvalConfig::reference();
    let members: Vec<usize> = team.iter().collect();
    for size in (1..=members.len()).rev() {
        for subset in members.iter().combinations(size) {
            let candidate =
                Team::from_indices(Arc::clone(team.space()), subset.into_iter().copied())?;
            if checker::satisfies(a, &candidate, formula, &cfg)? {
                return Ok(candidate);
            }
        }
    }
    Ok(Team::empty(Arc::clone(team.space())))
}
