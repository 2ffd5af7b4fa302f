//! Ground-truth solvers: exhaustive enumeration over all nonempty subteams of
//! the full team, plus naive scans answering the oracle questions.
//!
//! Everything here is deliberately written with a different traversal than
//! the engines it validates: plain subset counting over bitmasks, no
//! recursion, and the memo-free fast-path-free checker configuration. Desk
//! scale only.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::checker::{self, CheckError, EvalConfig};
use crate::enumerate::Mode;
use crate::formula::Formula;
use crate::structure::Structure;
use crate::team::{AssignmentSpace, Team, TeamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReferenceError {
    #[error("assignment space has {size} indices, brute-force cap is {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("cumulative step budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

#[derive(Debug, Clone)]
pub struct ReferenceConfig {
    /// Cap on assignment-space size (the scan walks `2^size` subteams).
    pub space_cap: usize,
    /// Cumulative elementary-step budget across all checker calls of one scan.
    pub step_budget: u64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            space_cap: 16,
            step_budget: 400_000_000,
        }
    }
}

/// The exact solution sets of every enumeration mode, from one scan.
#[derive(Debug, Clone)]
pub struct SolutionSets {
    pub all: BTreeSet<Team>,
    pub subset_max: BTreeSet<Team>,
    pub subset_min: BTreeSet<Team>,
    pub card_max: BTreeSet<Team>,
    pub card_min: BTreeSet<Team>,
    /// Elementary checker steps the scan spent.
    pub steps: u64,
}

impl SolutionSets {
    pub fn for_mode(&self, mode: Mode) -> &BTreeSet<Team> {
        match mode {
            Mode::All => &self.all,
            Mode::SubsetMax => &self.subset_max,
            Mode::SubsetMin => &self.subset_min,
            Mode::CardMax => &self.card_max,
            Mode::CardMin => &self.card_min,
        }
    }
}

struct Scanner<'a> {
    a: &'a Structure,
    formula: &'a Formula,
    space: Arc<AssignmentSpace>,
    budget: u64,
    spent: u64,
}

impl<'a> Scanner<'a> {
    fn new(
        a: &'a Structure,
        formula: &'a Formula,
        cfg: &ReferenceConfig,
    ) -> Result<Self, ReferenceError> {
        let space = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
        if space.size() > cfg.space_cap {
            return Err(ReferenceError::CapExceeded {
                size: space.size(),
                cap: cfg.space_cap,
            });
        }
        Ok(Scanner {
            a,
            formula,
            space,
            budget: cfg.step_budget,
            spent: 0,
        })
    }

    fn team_of_mask(&self, mask: u64) -> Result<Team, ReferenceError> {
        let mut team = Team::empty(Arc::clone(&self.space));
        let mut rest = mask;
        while rest != 0 {
            let index = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            team.insert(index)?;
        }
        Ok(team)
    }

    fn sat(&mut self, team: &Team) -> Result<bool, ReferenceError> {
        let cfg = EvalConfig::reference().with_step_limit(self.budget.saturating_sub(self.spent));
        let (value, steps) = checker::satisfies_with_steps(self.a, team, self.formula, &cfg)
            .map_err(|e| match e {
                CheckError::ResourceExceeded { .. } => ReferenceError::BudgetExceeded {
                    budget: self.budget,
                },
                other => ReferenceError::Check(other),
            })?;
        self.spent += steps;
        Ok(value)
    }

    fn mask_count(&self) -> u64 {
        1u64 << self.space.size()
    }
}

/// Every nonempty satisfying team, found by counting through all subteam
/// bitmasks and filtering with the checker; the optimal modes are filtered
/// from that set.
pub fn brute_solutions(
    a: &Structure,
    formula: &Formula,
    cfg: &ReferenceConfig,
) -> Result<SolutionSets, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    let mut all = BTreeSet::new();
    for mask in 1..scanner.mask_count() {
        let team = scanner.team_of_mask(mask)?;
        if scanner.sat(&team)? {
            all.insert(team);
        }
    }

    let subset_max: BTreeSet<Team> = all
        .iter()
        .filter(|t| !all.iter().any(|u| t.is_proper_subset(u).unwrap_or(false)))
        .cloned()
        .collect();
    let subset_min: BTreeSet<Team> = all
        .iter()
        .filter(|t| !all.iter().any(|u| u.is_proper_subset(t).unwrap_or(false)))
        .cloned()
        .collect();
    let max_len = all.iter().map(Team::len).max();
    let min_len = all.iter().map(Team::len).min();
    let card_max: BTreeSet<Team> = all
        .iter()
        .filter(|t| Some(t.len()) == max_len)
        .cloned()
        .collect();
    let card_min: BTreeSet<Team> = all
        .iter()
        .filter(|t| Some(t.len()) == min_len)
        .cloned()
        .collect();

    Ok(SolutionSets {
        all,
        subset_max,
        subset_min,
        card_max,
        card_min,
        steps: scanner.spent,
    })
}

pub fn brute_enum(
    a: &Structure,
    formula: &Formula,
    mode: Mode,
    cfg: &ReferenceConfig,
) -> Result<BTreeSet<Team>, ReferenceError> {
    Ok(brute_solutions(a, formula, cfg)?.for_mode(mode).clone())
}

/// Naive oracle answers by filtering every team of the space. These exist to
/// cross-check the `oracles` module; they share no candidate-construction
/// logic with it.
pub fn ver_team_scan(
    a: &Structure,
    formula: &Formula,
    x: &Team,
    cfg: &ReferenceConfig,
) -> Result<bool, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    Ok(!x.is_empty() && scanner.sat(x)?)
}

pub fn ext_team_scan(
    a: &Structure,
    formula: &Formula,
    x: &Team,
    y: &Team,
    cfg: &ReferenceConfig,
) -> Result<bool, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    for mask in 1..scanner.mask_count() {
        let team = scanner.team_of_mask(mask)?;
        if x.is_proper_subset(&team)? && team.is_disjoint(y)? && scanner.sat(&team)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn ext_card_team_scan(
    a: &Structure,
    formula: &Formula,
    x: &Team,
    y: &Team,
    k: usize,
    cfg: &ReferenceConfig,
) -> Result<bool, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    for mask in 1..scanner.mask_count() {
        let team = scanner.team_of_mask(mask)?;
        if team.len() == k
            && x.is_proper_subset(&team)?
            && team.is_disjoint(y)?
            && scanner.sat(&team)?
        {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn ext_max_team_scan(
    a: &Structure,
    formula: &Formula,
    x: &Team,
    y: &Team,
    cfg: &ReferenceConfig,
) -> Result<bool, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    'candidates: for mask in 1..scanner.mask_count() {
        let team = scanner.team_of_mask(mask)?;
        if !(x.is_proper_subset(&team)? && team.is_disjoint(y)? && scanner.sat(&team)?) {
            continue;
        }
        for bigger_mask in 1..scanner.mask_count() {
            let bigger = scanner.team_of_mask(bigger_mask)?;
            if team.is_proper_subset(&bigger)? && scanner.sat(&bigger)? {
                continue 'candidates;
            }
        }
        return Ok(true);
    }
    Ok(false)
}

pub fn proper_subteam_sat_scan(
    a: &Structure,
    formula: &Formula,
    x: &Team,
    cfg: &ReferenceConfig,
) -> Result<bool, ReferenceError> {
    let mut scanner = Scanner::new(a, formula, cfg)?;
    for mask in 1..scanner.mask_count() {
        let team = scanner.team_of_mask(mask)?;
        if team.is_proper_subset(x)? && scanner.sat(&team)? {
            return Ok(true);
        }
    }
    Ok(false)
}
