//! Assignment spaces and teams.
//!
//! An assignment space fixes a sorted variable list and a universe size `n`;
//! an assignment over `k` variables is encoded as the base-`n` numeral of its
//! value tuple (first variable most significant), so index order coincides
//! with lexicographic order on value tuples. A team is a bit-vector subset of
//! the index range `[0, n^k)`.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::structure::Structure;

/// Bound on `n^k`. Spaces beyond it are refused with a capacity error.
pub const DEFAULT_INDEX_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TeamError {
    #[error("assignment space needs {required} indices, cap is {cap}")]
    Capacity { required: u128, cap: usize },
    #[error("assignment space has no variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} out of range for universe of size {universe}")]
    ValueOutOfRange { value: usize, universe: usize },
    #[error("assignment index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("operands live in different assignment spaces")]
    SpaceMismatch,
    #[error("value tuple has {got} entries, space has {expected} variables")]
    TupleLength { got: usize, expected: usize },
    #[error("supplementing-function value set is empty for assignment {index}")]
    EmptyChoice { index: usize },
}

/// The indexed space of all assignments of a sorted variable list into
/// `{0, .., n-1}`.
#[derive(Debug)]
pub struct AssignmentSpace {
    universe: usize,
    vars: Vec<String>,
    size: usize,
    signature: u64,
}

impl PartialEq for AssignmentSpace {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.vars == other.vars
    }
}

impl Eq for AssignmentSpace {}

impl AssignmentSpace {
    /// Builds the space for the given variables (sorted and deduplicated here)
    /// over a universe of size `universe`. An empty variable list yields the
    /// one-element space of the empty assignment.
    pub fn new(
        universe: usize,
        vars: impl IntoIterator<Item = String>,
    ) -> Result<Arc<Self>, TeamError> {
        Self::with_cap(universe, vars, DEFAULT_INDEX_CAP)
    }

    pub fn with_cap(
        universe: usize,
        vars: impl IntoIterator<Item = String>,
        cap: usize,
    ) -> Result<Arc<Self>, TeamError> {
        let mut vars: Vec<String> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        let mut required: u128 = 1;
        for _ in &vars {
            required = required.saturating_mul(universe as u128);
            if required > cap as u128 {
                return Err(TeamError::Capacity { required, cap });
            }
        }
        let size = required as usize;
        let mut hasher = DefaultHasher::new();
        universe.hash(&mut hasher);
        vars.hash(&mut hasher);
        let signature = hasher.finish();
        Ok(Arc::new(AssignmentSpace {
            universe,
            vars,
            size,
            signature,
        }))
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Number of assignments, `n^k`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Cheap identity fingerprint, used as a memoization key component.
    pub fn signature(&self) -> u64 {
        self.signature
    }

    pub fn position(&self, var: &str) -> Result<usize, TeamError> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| TeamError::UnknownVariable(var.to_string()))
    }

    /// Index of a value tuple (given in variable order).
    pub fn index_of(&self, values: &[usize]) -> Result<usize, TeamError> {
        if values.len() != self.vars.len() {
            return Err(TeamError::TupleLength {
                got: values.len(),
                expected: self.vars.len(),
            });
        }
        let mut index = 0usize;
        for &v in values {
            if v >= self.universe {
                return Err(TeamError::ValueOutOfRange {
                    value: v,
                    universe: self.universe,
                });
            }
            index = index * self.universe + v;
        }
        Ok(index)
    }

    /// Value tuple of an index, in variable order.
    pub fn values_of(&self, index: usize) -> Result<Vec<usize>, TeamError> {
        if index >= self.size {
            return Err(TeamError::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        let mut values = vec![0usize; self.vars.len()];
        let mut rest = index;
        for slot in values.iter_mut().rev() {
            *slot = rest % self.universe;
            rest /= self.universe;
        }
        Ok(values)
    }

    /// The space with `var` added (unchanged if already present).
    pub fn extend(self: &Arc<Self>, var: &str) -> Result<Arc<Self>, TeamError> {
        if self.vars.iter().any(|v| v == var) {
            return Ok(Arc::clone(self));
        }
        let mut vars = self.vars.clone();
        vars.push(var.to_string());
        AssignmentSpace::new(self.universe, vars)
    }

    pub fn assignment(self: &Arc<Self>, values: Vec<usize>) -> Result<Assignment, TeamError> {
        self.index_of(&values)?;
        Ok(Assignment {
            space: Arc::clone(self),
            values,
        })
    }

    pub fn assignment_at(self: &Arc<Self>, index: usize) -> Result<Assignment, TeamError> {
        let values = self.values_of(index)?;
        Ok(Assignment {
            space: Arc::clone(self),
            values,
        })
    }
}

/// One assignment of the space's variables to universe elements.
#[derive(Debug, Clone)]
pub struct Assignment {
    space: Arc<AssignmentSpace>,
    values: Vec<usize>,
}

impl Assignment {
    pub fn space(&self) -> &Arc<AssignmentSpace> {
        &self.space
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn index(&self) -> usize {
        self.space
            .index_of(&self.values)
            .expect("assignment is valid for its space")
    }

    pub fn get(&self, var: &str) -> Result<usize, TeamError> {
        Ok(self.values[self.space.position(var)?])
    }
}

impl PartialEq for Assignment {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.values == other.values
    }
}

impl Eq for Assignment {}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (var, value)) in self.space.vars().iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{var}={value}")?;
        }
        write!(f, "]")
    }
}

/// Lexicographic comparison of two assignments over the same space.
pub fn lex_compare(s: &Assignment, t: &Assignment) -> Result<Ordering, TeamError> {
    if s.space != t.space {
        return Err(TeamError::SpaceMismatch);
    }
    Ok(s.values.cmp(&t.values))
}

/// A set of assignments of one space, stored as a bit vector over the index
/// range. Immutable sharing is safe; mutation is by value.
#[derive(Debug, Clone)]
pub struct Team {
    space: Arc<AssignmentSpace>,
    blocks: Vec<u64>,
    len: usize,
}

impl Team {
    pub fn empty(space: Arc<AssignmentSpace>) -> Self {
        let blocks = vec![0u64; space.size().div_ceil(64)];
        Team {
            space,
            blocks,
            len: 0,
        }
    }

    /// The full team: every assignment of the space.
    pub fn full(space: Arc<AssignmentSpace>) -> Self {
        let mut team = Team::empty(space);
        for i in 0..team.space.size() {
            team.insert(i).expect("index in range");
        }
        team
    }

    pub fn from_indices(
        space: Arc<AssignmentSpace>,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, TeamError> {
        let mut team = Team::empty(space);
        for i in indices {
            team.insert(i)?;
        }
        Ok(team)
    }

    pub fn space(&self) -> &Arc<AssignmentSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, index: usize) -> bool {
        if index >= self.space.size() {
            return false;
        }
        self.blocks[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn insert(&mut self, index: usize) -> Result<bool, TeamError> {
        if index >= self.space.size() {
            return Err(TeamError::IndexOutOfRange {
                index,
                size: self.space.size(),
            });
        }
        let mask = 1u64 << (index % 64);
        let fresh = self.blocks[index / 64] & mask == 0;
        if fresh {
            self.blocks[index / 64] |= mask;
            self.len += 1;
        }
        Ok(fresh)
    }

    pub fn remove(&mut self, index: usize) -> bool {
        if index >= self.space.size() {
            return false;
        }
        let mask = 1u64 << (index % 64);
        let present = self.blocks[index / 64] & mask != 0;
        if present {
            self.blocks[index / 64] &= !mask;
            self.len -= 1;
        }
        present
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(block_idx, &block)| {
                let mut rest = block;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let bit = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(block_idx * 64 + bit)
                })
            })
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.iter()
            .map(|i| self.space.assignment_at(i).expect("member index valid"))
    }

    /// Largest member under the lexicographic order; `None` is the bottom
    /// element below every assignment (the empty team's maximum).
    pub fn max_assignment(&self) -> Option<Assignment> {
        self.max_index()
            .map(|i| self.space.assignment_at(i).expect("member index valid"))
    }

    pub fn max_index(&self) -> Option<usize> {
        for (block_idx, &block) in self.blocks.iter().enumerate().rev() {
            if block != 0 {
                return Some(block_idx * 64 + 63 - block.leading_zeros() as usize);
            }
        }
        None
    }

    fn check_space(&self, other: &Team) -> Result<(), TeamError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(TeamError::SpaceMismatch)
        }
    }

    pub fn union(&self, other: &Team) -> Result<Team, TeamError> {
        self.check_space(other)?;
        let mut result = self.clone();
        for (a, b) in result.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
        }
        result.len = result.blocks.iter().map(|b| b.count_ones() as usize).sum();
        Ok(result)
    }

    pub fn intersection(&self, other: &Team) -> Result<Team, TeamError> {
        self.check_space(other)?;
        let mut result = self.clone();
        for (a, b) in result.blocks.iter_mut().zip(&other.blocks) {
            *a &= b;
        }
        result.len = result.blocks.iter().map(|b| b.count_ones() as usize).sum();
        Ok(result)
    }

    pub fn difference(&self, other: &Team) -> Result<Team, TeamError> {
        self.check_space(other)?;
        let mut result = self.clone();
        for (a, b) in result.blocks.iter_mut().zip(&other.blocks) {
            *a &= !b;
        }
        result.len = result.blocks.iter().map(|b| b.count_ones() as usize).sum();
        Ok(result)
    }

    pub fn is_subset(&self, other: &Team) -> Result<bool, TeamError> {
        self.check_space(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn is_proper_subset(&self, other: &Team) -> Result<bool, TeamError> {
        Ok(self.len < other.len && self.is_subset(other)?)
    }

    pub fn is_disjoint(&self, other: &Team) -> Result<bool, TeamError> {
        self.check_space(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & b == 0))
    }

    pub(crate) fn blocks(&self) -> &[u64] {
        &self.blocks
    }
}

impl PartialEq for Team {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.blocks == other.blocks
    }
}

impl Eq for Team {}

impl Hash for Team {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.space.signature().hash(state);
        self.blocks.hash(state);
    }
}

impl PartialOrd for Team {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Team {
    /// Total order: by space, then lexicographically on ascending member
    /// lists. Gives solution sets a stable canonical order.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.space.universe_size(), self.space.vars())
            .cmp(&(other.space.universe_size(), other.space.vars()))
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

/// The team of all assignments of `vars` into the universe of `a`.
pub fn full_team(a: &Structure, vars: impl IntoIterator<Item = String>) -> Result<Team, TeamError> {
    let space = AssignmentSpace::new(a.universe_size(), vars)?;
    Ok(Team::full(space))
}

/// `X[A/x]`: every assignment of `X` supplemented (or overwritten) at `x` with
/// every universe element.
pub fn extend_all(team: &Team, var: &str) -> Result<Team, TeamError> {
    let universe = team.space().universe_size();
    extend_fn(team, var, |_| Ok((0..universe).collect()))
}

/// `X[F/x]` for a supplementing function `F` mapping each member to a nonempty
/// set of universe elements. Lax semantics forbids empty value sets.
pub fn extend_fn(
    team: &Team,
    var: &str,
    mut choices: impl FnMut(&Assignment) -> Result<Vec<usize>, TeamError>,
) -> Result<Team, TeamError> {
    let old_space = team.space();
    let new_space = old_space.extend(var)?;
    let pos = new_space.position(var)?;
    let fresh = old_space.position(var).is_err();
    let mut result = Team::empty(Arc::clone(&new_space));
    let mut scratch = Vec::with_capacity(new_space.vars().len());
    for assignment in team.assignments() {
        let values = choices(&assignment)?;
        if values.is_empty() {
            return Err(TeamError::EmptyChoice {
                index: assignment.index(),
            });
        }
        for value in values {
            scratch.clear();
            scratch.extend_from_slice(assignment.values());
            if fresh {
                scratch.insert(pos, value);
            } else {
                scratch[pos] = value;
            }
            let index = new_space.index_of(&scratch)?;
            result.insert(index)?;
        }
    }
    Ok(result)
}

impl fmt::Display for Team {
    /// Canonical form: members in ascending index order,
    /// e.g. `{[x=0,y=1],[x=1,y=1]}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, assignment) in self.assignments().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{assignment}")?;
        }
        write!(f, "}}")
    }
}
