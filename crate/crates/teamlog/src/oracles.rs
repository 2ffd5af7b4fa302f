//! Decision oracles consumed by the flashlight enumerators.
//!
//! The trait is the contract; `BruteOracles` answers every query by scanning
//! candidate teams in ascending canonical order (member-index bitmask order)
//! and checking satisfaction. Answers depend only on the arguments; per-oracle
//! call counters are the only state.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::checker::{self, CheckError, EvalConfig};
use crate::formula::Formula;
use crate::structure::Structure;
use crate::team::{AssignmentSpace, Team, TeamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle scan needs {candidates} candidates, cap is {cap}")]
    CandidateCapExceeded { candidates: u128, cap: u64 },
    #[error("query team is not over the oracle's assignment space")]
    SpaceMismatch,
    #[error("oracle precondition violated: {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

/// Snapshot of how many times each oracle has been queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OracleCounts {
    pub ver_team: u64,
    pub ext_team: u64,
    pub ext_card_team: u64,
    pub ext_max_team: u64,
    pub proper_subteam_sat: u64,
}

impl OracleCounts {
    pub fn total(&self) -> u64 {
        self.ver_team
            + self.ext_team
            + self.ext_card_team
            + self.ext_max_team
            + self.proper_subteam_sat
    }
}

/// The oracle bundle for one fixed structure and formula. Implementations
/// must be stateless apart from the counters.
pub trait TeamOracles {
    /// `A ⊨_X φ` and `X ≠ ∅`.
    fn ver_team(&self, x: &Team) -> Result<bool, OracleError>;
    /// Some satisfying `X'` with `X ⊊ X'` and `X' ∩ Y = ∅` exists.
    fn ext_team(&self, x: &Team, y: &Team) -> Result<bool, OracleError>;
    /// Some satisfying `X'` with `X ⊊ X'`, `X' ∩ Y = ∅` and `|X'| = k` exists.
    fn ext_card_team(&self, x: &Team, y: &Team, k: usize) -> Result<bool, OracleError>;
    /// Some subset-maximal satisfying `X'` with `X ⊊ X'` and `X' ∩ Y = ∅`
    /// exists (maximality over the whole space, not just teams avoiding `Y`).
    fn ext_max_team(&self, x: &Team, y: &Team) -> Result<bool, OracleError>;
    /// Some nonempty satisfying `X' ⊊ X` exists.
    fn proper_subteam_sat(&self, x: &Team) -> Result<bool, OracleError>;
    /// The assignment space queries must live in.
    fn space(&self) -> &Arc<AssignmentSpace>;
    fn counts(&self) -> OracleCounts;
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Cap on candidate teams a single query may scan.
    pub candidate_cap: u64,
    pub eval: EvalConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            candidate_cap: 1 << 20,
            eval: EvalConfig::default(),
        }
    }
}

#[derive(Debug, Default)]
struct Counters {
    ver_team: AtomicU64,
    ext_team: AtomicU64,
    ext_card_team: AtomicU64,
    ext_max_team: AtomicU64,
    proper_subteam_sat: AtomicU64,
}

/// Brute-force oracle suite: definition-level scans over candidate teams.
pub struct BruteOracles<'a> {
    a: &'a Structure,
    formula: &'a Formula,
    space: Arc<AssignmentSpace>,
    cfg: OracleConfig,
    counters: Counters,
}

impl<'a> BruteOracles<'a> {
    pub fn new(a: &'a Structure, formula: &'a Formula) -> Result<Self, OracleError> {
        Self::with_config(a, formula, OracleConfig::default())
    }

    pub fn with_config(
        a: &'a Structure,
        formula: &'a Formula,
        cfg: OracleConfig,
    ) -> Result<Self, OracleError> {
        let space = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
        Ok(BruteOracles {
            a,
            formula,
            space,
            cfg,
            counters: Counters::default(),
        })
    }

    fn check_query(&self, x: &Team) -> Result<(), OracleError> {
        if x.space() == &self.space {
            Ok(())
        } else {
            Err(OracleError::SpaceMismatch)
        }
    }

    fn sat(&self, team: &Team) -> Result<bool, OracleError> {
        Ok(checker::satisfies(
            self.a,
            team,
            self.formula,
            &self.cfg.eval,
        )?)
    }

    /// Indices neither in `x` nor in `y`, ascending.
    fn free_slots(&self, x: &Team, y: &Team) -> Vec<usize> {
        (0..self.space.size())
            .filter(|&i| !x.contains(i) && !y.contains(i))
            .collect()
    }

    fn cap_subsets(&self, slots: usize) -> Result<(), OracleError> {
        let candidates = (1u128 << slots.min(127)) - 1;
        if slots >= 127 || candidates > self.cfg.candidate_cap as u128 {
            return Err(OracleError::CandidateCapExceeded {
                candidates,
                cap: self.cfg.candidate_cap,
            });
        }
        Ok(())
    }

    /// All nonempty subsets of `slots` in ascending bitmask order (slot 0 as
    /// the least significant bit), the fixed canonical candidate order.
    fn subsets_ascending<'s>(&self, slots: &'s [usize]) -> impl Iterator<Item = Vec<usize>> + 's {
        let count = 1u64 << slots.len();
        (1..count).map(move |mask| {
            slots
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &slot)| slot)
                .collect()
        })
    }

    fn with_extra(&self, x: &Team, extra: &[usize]) -> Result<Team, OracleError> {
        let mut candidate = x.clone();
        for &slot in extra {
            candidate.insert(slot)?;
        }
        Ok(candidate)
    }

    /// True when `candidate` satisfies and no strict superteam does.
    fn is_maximal_satisfying(&self, candidate: &Team) -> Result<bool, OracleError> {
        if !self.sat(candidate)? {
            return Ok(false);
        }
        let complement: Vec<usize> = (0..self.space.size())
            .filter(|&i| !candidate.contains(i))
            .collect();
        // Single-assignment extensions first: a cheap refutation that settles
        // most candidates before the full superteam scan.
        for &slot in &complement {
            if self.sat(&self.with_extra(candidate, &[slot])?)? {
                return Ok(false);
            }
        }
        self.cap_subsets(complement.len())?;
        for extra in self.subsets_ascending(&complement) {
            if extra.len() < 2 {
                continue;
            }
            if self.sat(&self.with_extra(candidate, &extra)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl TeamOracles for BruteOracles<'_> {
    fn ver_team(&self, x: &Team) -> Result<bool, OracleError> {
        self.counters.ver_team.fetch_add(1, Ordering::Relaxed);
        self.check_query(x)?;
        Ok(checker::ver_team(self.a, x, self.formula, &self.cfg.eval)?)
    }

    fn ext_team(&self, x: &Team, y: &Team) -> Result<bool, OracleError> {
        self.counters.ext_team.fetch_add(1, Ordering::Relaxed);
        self.check_query(x)?;
        self.check_query(y)?;
        if !x.is_disjoint(y)? {
            return Err(OracleError::Precondition(
                "ext_team requires X and Y disjoint",
            ));
        }
        let slots = self.free_slots(x, y);
        self.cap_subsets(slots.len())?;
        for extra in self.subsets_ascending(&slots) {
            if self.sat(&self.with_extra(x, &extra)?)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn ext_card_team(&self, x: &Team, y: &Team, k: usize) -> Result<bool, OracleError> {
        self.counters.ext_card_team.fetch_add(1, Ordering::Relaxed);
        self.check_query(x)?;
        self.check_query(y)?;
        if !x.is_disjoint(y)? {
            return Err(OracleError::Precondition(
                "ext_card_team requires X and Y disjoint",
            ));
        }
        if k > self.space.size() {
            return Err(OracleError::Precondition(
                "ext_card_team requires k <= space size",
            ));
        }
        if k <= x.len() {
            return Ok(false);
        }
        let slots = self.free_slots(x, y);
        let need = k - x.len();
        if need > slots.len() {
            return Ok(false);
        }
        self.cap_subsets(slots.len())?;
        for extra in slots.iter().combinations(need) {
            let extra: Vec<usize> = extra.into_iter().copied().collect();
            if self.sat(&self.with_extra(x, &extra)?)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn ext_max_team(&self, x: &Team, y: &Team) -> Result<bool, OracleError> {
        self.counters.ext_max_team.fetch_add(1, Ordering::Relaxed);
        self.check_query(x)?;
        self.check_query(y)?;
        if !x.is_disjoint(y)? {
            return Err(OracleError::Precondition(
                "ext_max_team requires X and Y disjoint",
            ));
        }
        let slots = self.free_slots(x, y);
        self.cap_subsets(slots.len())?;
        for extra in self.subsets_ascending(&slots) {
            if self.is_maximal_satisfying(&self.with_extra(x, &extra)?)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn proper_subteam_sat(&self, x: &Team) -> Result<bool, OracleError> {
        self.counters
            .proper_subteam_sat
            .fetch_add(1, Ordering::Relaxed);
        self.check_query(x)?;
        if x.is_empty() {
            return Err(OracleError::Precondition(
                "proper_subteam_sat requires a nonempty team",
            ));
        }
        let members: Vec<usize> = x.iter().collect();
        self.cap_subsets(members.len())?;
        for subset in self.subsets_ascending(&members) {
            if subset.len() == members.len() {
                continue;
            }
            let candidate = Team::from_indices(Arc::clone(&self.space), subset)?;
            if self.sat(&candidate)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn space(&self) -> &Arc<AssignmentSpace> {
        &self.space
    }

    fn counts(&self) -> OracleCounts {
        OracleCounts {
            ver_team: self.counters.ver_team.load(Ordering::Relaxed),
            ext_team: self.counters.ext_team.load(Ordering::Relaxed),
            ext_card_team: self.counters.ext_card_team.load(Ordering::Relaxed),
            ext_max_team: self.counters.ext_max_team.load(Ordering::Relaxed),
            proper_subteam_sat: self.counters.proper_subteam_sat.load(Ordering::Relaxed),
        }
    }
}
