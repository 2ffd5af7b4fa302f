//! Exact team-semantics evaluation under lax semantics.
//!
//! `satisfies` decides `A ⊨_X φ`; `ver_team` additionally requires `X ≠ ∅`.
//! The empty team satisfies every formula.
//!
//! The generic evaluation path searches split-junction covers (`Y ∪ Z = X`)
//! and lax supplementing functions (`F : X → P(A)∖{∅}`) exhaustively, so it is
//! exponential in the team size; it targets desk scale (roughly `n ≤ 4`,
//! `|X| ≤ 12`). Fast paths keep common fragments polynomial:
//!
//! * atom-free subformulas are flat: evaluate per singleton, classically;
//! * subformulas whose atoms are within `{dep}` are downward closed: split
//!   junction may search partitions only, existentials may restrict to
//!   singleton value sets;
//! * subformulas whose atoms are within `{inc}` are union closed: delegate to
//!   the maximal-subteam fixpoint and compare with the input team.
//!
//! Toggling memoization or fast paths never changes answers, only cost.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{AtomSet, Formula};
use crate::maxsub;
use crate::structure::{Structure, StructureError};
use crate::team::{extend_all, AssignmentSpace, Team, TeamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("step limit of {limit} exceeded; result unknown")]
    ResourceExceeded { limit: u64 },
    #[error("team does not bind free variable `{0}`")]
    MissingVariable(String),
    #[error("team universe has size {team}, structure universe has size {structure}")]
    UniverseMismatch { team: usize, structure: usize },
    #[error("formula is not a generalized dependency atom or literal")]
    NotAnAtom,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Team(#[from] TeamError),
}

/// Evaluation knobs. Defaults: 10^8 elementary steps, memoization and fast
/// paths enabled.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub step_limit: u64,
    pub memo_enabled: bool,
    pub fast_paths_enabled: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            step_limit: 100_000_000,
            memo_enabled: true,
            fast_paths_enabled: true,
        }
    }
}

impl EvalConfig {
    /// Memo-free, fast-path-free configuration: the plain definitional search,
    /// used by reference oracles so they share no clever code with the engines
    /// they validate.
    pub fn reference() -> Self {
        EvalConfig {
            memo_enabled: false,
            fast_paths_enabled: false,
            ..EvalConfig::default()
        }
    }

    pub fn with_step_limit(mut self, limit: u64) -> Self {
        self.step_limit = limit;
        self
    }
}

/// `A ⊨_X φ` under lax team semantics.
pub fn satisfies(
    a: &Structure,
    team: &Team,
    formula: &Formula,
    cfg: &EvalConfig,
) -> Result<bool, CheckError> {
    satisfies_with_steps(a, team, formula, cfg).map(|(value, _)| value)
}

/// As `satisfies`, also reporting the elementary step count.
pub fn satisfies_with_steps(
    a: &Structure,
    team: &Team,
    formula: &Formula,
    cfg: &EvalConfig,
) -> Result<(bool, u64), CheckError> {
    check_preconditions(a, team, formula)?;
    let mut evaluator = Evaluator::new(a, formula, cfg);
    let value = evaluator.eval(formula, 0, team)?;
    Ok((value, evaluator.steps))
}

/// The model checking decision `A ⊨_X φ and X ≠ ∅`.
pub fn ver_team(
    a: &Structure,
    team: &Team,
    formula: &Formula,
    cfg: &EvalConfig,
) -> Result<bool, CheckError> {
    Ok(!team.is_empty() && satisfies(a, team, formula, cfg)?)
}

/// Direct evaluation of a single literal or generalized dependency atom.
pub fn eval_atom(a: &Structure, team: &Team, atom: &Formula) -> Result<bool, CheckError> {
    check_preconditions(a, team, atom)?;
    let cfg = EvalConfig::default();
    let mut evaluator = Evaluator::new(a, atom, &cfg);
    match atom {
        Formula::Eq(..)
        | Formula::Neq(..)
        | Formula::Rel(..)
        | Formula::NegRel(..)
        | Formula::Dep(..)
        | Formula::Inc(..)
        | Formula::Ind(..) => evaluator.eval(atom, 0, team),
        _ => Err(CheckError::NotAnAtom),
    }
}

fn check_preconditions(a: &Structure, team: &Team, formula: &Formula) -> Result<(), CheckError> {
    if team.space().universe_size() != a.universe_size() {
        return Err(CheckError::UniverseMismatch {
            team: team.space().universe_size(),
            structure: a.universe_size(),
        });
    }
    for var in formula.free_vars() {
        if team.space().position(&var).is_err() {
            return Err(CheckError::MissingVariable(var));
        }
    }
    Ok(())
}

/// Subformula ids are preorder indices; children ids are derived from subtree
/// sizes so the recursion and the memo table agree on numbering.
fn subtree_sizes(formula: &Formula, sizes: &mut Vec<u32>) -> u32 {
    let slot = sizes.len();
    sizes.push(0);
    let children = match formula {
        Formula::And(l, r) | Formula::Or(l, r) => subtree_sizes(l, sizes) + subtree_sizes(r, sizes),
        Formula::Exists(_, body) | Formula::Forall(_, body) => subtree_sizes(body, sizes),
        _ => 0,
    };
    sizes[slot] = children + 1;
    sizes[slot]
}

fn atom_masks(formula: &Formula, masks: &mut Vec<AtomSet>) -> AtomSet {
    let slot = masks.len();
    masks.push(AtomSet::EMPTY);
    let mask = match formula {
        Formula::And(l, r) | Formula::Or(l, r) => atom_masks(l, masks).union(atom_masks(r, masks)),
        Formula::Exists(_, body) | Formula::Forall(_, body) => atom_masks(body, masks),
        Formula::Dep(..) => AtomSet::DEP,
        Formula::Inc(..) => AtomSet::INC,
        Formula::Ind(..) => AtomSet::IND,
        _ => AtomSet::EMPTY,
    };
    masks[slot] = mask;
    mask
}

struct Evaluator<'a> {
    a: &'a Structure,
    cfg: &'a EvalConfig,
    steps: u64,
    sizes: Vec<u32>,
    atoms: Vec<AtomSet>,
    memo: HashMap<(u32, u64, Box<[u64]>), bool>,
}

impl<'a> Evaluator<'a> {
    fn new(a: &'a Structure, formula: &Formula, cfg: &'a EvalConfig) -> Self {
        let mut sizes = Vec::new();
        subtree_sizes(formula, &mut sizes);
        let mut atoms = Vec::new();
        atom_masks(formula, &mut atoms);
        Evaluator {
            a,
            cfg,
            steps: 0,
            sizes,
            atoms,
            memo: HashMap::new(),
        }
    }

    fn tick(&mut self, amount: u64) -> Result<(), CheckError> {
        self.steps += amount;
        if self.steps > self.cfg.step_limit {
            Err(CheckError::ResourceExceeded {
                limit: self.cfg.step_limit,
            })
        } else {
            Ok(())
        }
    }

    fn eval(&mut self, formula: &Formula, id: u32, team: &Team) -> Result<bool, CheckError> {
        self.tick(1)?;
        if team.is_empty() {
            return Ok(true);
        }
        let memo_key = self.cfg.memo_enabled.then(|| {
            (
                id,
                team.space().signature(),
                team.blocks().to_vec().into_boxed_slice(),
            )
        });
        if let Some(key) = &memo_key {
            if let Some(&value) = self.memo.get(key) {
                return Ok(value);
            }
        }
        let value = self.eval_uncached(formula, id, team)?;
        if let Some(key) = memo_key {
            self.memo.insert(key, value);
        }
        Ok(value)
    }

    fn eval_uncached(
        &mut self,
        formula: &Formula,
        id: u32,
        team: &Team,
    ) -> Result<bool, CheckError> {
        if self.cfg.fast_paths_enabled {
            let atoms = self.atoms[id as usize];
            if atoms.is_empty() {
                return self.eval_flat(formula, team);
            }
            if atoms.within(AtomSet::INC) {
                let (max, steps) = maxsub::max_subteam_node(self.a, team, formula)?;
                self.tick(steps)?;
                return Ok(&max == team);
            }
        }
        match formula {
            Formula::Eq(x, y) => {
                self.all_members(team, &[x.as_str(), y.as_str()], |values, pos| {
                    Ok(values[pos[0]] == values[pos[1]])
                })
            }
            Formula::Neq(x, y) => {
                self.all_members(team, &[x.as_str(), y.as_str()], |values, pos| {
                    Ok(values[pos[0]] != values[pos[1]])
                })
            }
            Formula::Rel(name, vars) => {
                let refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
                let a = self.a;
                self.all_members(team, &refs, |values, pos| {
                    let tuple: Vec<usize> = pos.iter().map(|&p| values[p]).collect();
                    Ok(a.contains_tuple(name, &tuple)?)
                })
            }
            Formula::NegRel(name, vars) => {
                let refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
                let a = self.a;
                self.all_members(team, &refs, |values, pos| {
                    let tuple: Vec<usize> = pos.iter().map(|&p| values[p]).collect();
                    Ok(!a.contains_tuple(name, &tuple)?)
                })
            }
            Formula::And(l, r) => Ok(self.eval(l, id + 1, team)?
                && self.eval(r, id + 1 + self.sizes[id as usize + 1], team)?),
            Formula::Or(l, r) => self.eval_or(l, r, id, team),
            Formula::Exists(var, body) => self.eval_exists(var, body, id, team),
            Formula::Forall(var, body) => {
                let extended = extend_all(team, var)?;
                self.eval(body, id + 1, &extended)
            }
            Formula::Dep(xs, ys) => self.eval_dep(team, xs, ys),
            Formula::Inc(xs, ys) => self.eval_inc(team, xs, ys),
            Formula::Ind(zs, xs, ys) => self.eval_ind(team, zs, xs, ys),
        }
    }

    fn positions(space: &Arc<AssignmentSpace>, vars: &[&str]) -> Result<Vec<usize>, CheckError> {
        vars.iter().map(|v| Ok(space.position(v)?)).collect()
    }

    fn all_members(
        &mut self,
        team: &Team,
        vars: &[&str],
        test: impl Fn(&[usize], &[usize]) -> Result<bool, CheckError>,
    ) -> Result<bool, CheckError> {
        let pos = Self::positions(team.space(), vars)?;
        for assignment in team.assignments() {
            self.tick(1)?;
            if !test(assignment.values(), &pos)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Split junction. Generic search labels every member Left / Right / Both
    /// (all covers `Y ∪ Z = X`); when both disjuncts are downward closed the
    /// overlap can be dropped and partitions suffice.
    fn eval_or(
        &mut self,
        l: &Formula,
        r: &Formula,
        id: u32,
        team: &Team,
    ) -> Result<bool, CheckError> {
        let left_id = id + 1;
        let right_id = id + 1 + self.sizes[id as usize + 1];
        let partitions_only = self.cfg.fast_paths_enabled
            && self.atoms[left_id as usize].within(AtomSet::DEP)
            && self.atoms[right_id as usize].within(AtomSet::DEP);
        let members: Vec<usize> = team.iter().collect();
        let m = members.len();
        // Odometer over subsets Y of the team; Z then ranges over
        // (X ∖ Y) ∪ W for W ⊆ Y, so each cover is visited exactly once.
        let mut in_left = vec![false; m];
        loop {
            self.tick(1)?;
            let mut left_team = Team::empty(Arc::clone(team.space()));
            for (i, &member) in members.iter().enumerate() {
                if in_left[i] {
                    left_team.insert(member)?;
                }
            }
            if self.eval(l, left_id, &left_team)? {
                if partitions_only {
                    let right_team = team.difference(&left_team)?;
                    if self.eval(r, right_id, &right_team)? {
                        return Ok(true);
                    }
                } else {
                    let rest = team.difference(&left_team)?;
                    let overlap_pool: Vec<usize> = members
                        .iter()
                        .copied()
                        .filter(|&s| left_team.contains(s))
                        .collect();
                    let mut in_overlap = vec![false; overlap_pool.len()];
                    loop {
                        self.tick(1)?;
                        let mut right_team = rest.clone();
                        for (i, &member) in overlap_pool.iter().enumerate() {
                            if in_overlap[i] {
                                right_team.insert(member)?;
                            }
                        }
                        if self.eval(r, right_id, &right_team)? {
                            return Ok(true);
                        }
                        if !advance(&mut in_overlap) {
                            break;
                        }
                    }
                }
            }
            if !advance(&mut in_left) {
                return Ok(false);
            }
        }
    }

    /// Lax existential. Generic search ranges over all functions from members
    /// to nonempty value sets; for downward-closed bodies singleton images
    /// suffice (lax equals strict there).
    fn eval_exists(
        &mut self,
        var: &str,
        body: &Formula,
        id: u32,
        team: &Team,
    ) -> Result<bool, CheckError> {
        let body_id = id + 1;
        let n = self.a.universe_size();
        let new_space = team.space().extend(var)?;
        let pos = new_space.position(var)?;
        let fresh = team.space().position(var).is_err();
        let members: Vec<Vec<usize>> = team.assignments().map(|s| s.values().to_vec()).collect();

        let index_for = |values: &[usize], choice: usize| -> Result<usize, CheckError> {
            let mut scratch = values.to_vec();
            if fresh {
                scratch.insert(pos, choice);
            } else {
                scratch[pos] = choice;
            }
            Ok(new_space.index_of(&scratch)?)
        };

        let singleton_only =
            self.cfg.fast_paths_enabled && self.atoms[body_id as usize].within(AtomSet::DEP);
        if singleton_only {
            let mut choice = vec![0usize; members.len()];
            loop {
                self.tick(1)?;
                let mut extended = Team::empty(Arc::clone(&new_space));
                for (values, &c) in members.iter().zip(&choice) {
                    extended.insert(index_for(values, c)?)?;
                }
                if self.eval(body, body_id, &extended)? {
                    return Ok(true);
                }
                if !advance_counter(&mut choice, n) {
                    return Ok(false);
                }
            }
        }

        // Nonempty subsets of the universe, encoded as masks 1 .. 2^n - 1.
        let full_mask: u64 = if n >= 64 {
            return Err(CheckError::ResourceExceeded {
                limit: self.cfg.step_limit,
            });
        } else {
            (1u64 << n) - 1
        };
        let mut choice = vec![1u64; members.len()];
        loop {
            self.tick(1)?;
            let mut extended = Team::empty(Arc::clone(&new_space));
            for (values, &mask) in members.iter().zip(&choice) {
                let mut rest = mask;
                while rest != 0 {
                    let value = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    extended.insert(index_for(values, value)?)?;
                }
            }
            if self.eval(body, body_id, &extended)? {
                return Ok(true);
            }
            // Advance the odometer over nonempty masks.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return Ok(false);
                }
                if choice[i] == full_mask {
                    choice[i] = 1;
                    i += 1;
                } else {
                    choice[i] += 1;
                    break;
                }
            }
        }
    }

    fn tuple_values(
        &mut self,
        team: &Team,
        vars: &[String],
    ) -> Result<Vec<(usize, Vec<usize>)>, CheckError> {
        let refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
        let pos = Self::positions(team.space(), &refs)?;
        let mut rows = Vec::with_capacity(team.len());
        for assignment in team.assignments() {
            self.tick(1)?;
            rows.push((
                assignment.index(),
                pos.iter().map(|&p| assignment.values()[p]).collect(),
            ));
        }
        Ok(rows)
    }

    fn eval_dep(&mut self, team: &Team, xs: &[String], ys: &[String]) -> Result<bool, CheckError> {
        let keys = self.tuple_values(team, xs)?;
        let values = self.tuple_values(team, ys)?;
        let mut seen: HashMap<&[usize], &[usize]> = HashMap::new();
        for ((_, key), (_, value)) in keys.iter().zip(&values) {
            self.tick(1)?;
            match seen.get(key.as_slice()) {
                Some(&prior) if prior != value.as_slice() => return Ok(false),
                Some(_) => {}
                None => {
                    seen.insert(key, value);
                }
            }
        }
        Ok(true)
    }

    fn eval_inc(&mut self, team: &Team, xs: &[String], ys: &[String]) -> Result<bool, CheckError> {
        let left = self.tuple_values(team, xs)?;
        let right = self.tuple_values(team, ys)?;
        let witnesses: std::collections::HashSet<&[usize]> =
            right.iter().map(|(_, v)| v.as_slice()).collect();
        for (_, value) in &left {
            self.tick(1)?;
            if !witnesses.contains(value.as_slice()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `x̄ ⊥_z̄ ȳ`: within every z̄-group, the (x̄, ȳ) pairs present must cover
    /// the full product of the x̄-values and ȳ-values present.
    fn eval_ind(
        &mut self,
        team: &Team,
        zs: &[String],
        xs: &[String],
        ys: &[String],
    ) -> Result<bool, CheckError> {
        type Group<'v> = (Vec<&'v [usize]>, Vec<&'v [usize]>);
        let zrows = self.tuple_values(team, zs)?;
        let xrows = self.tuple_values(team, xs)?;
        let yrows = self.tuple_values(team, ys)?;
        // BTreeMap keeps group iteration order deterministic, so step counts
        // are reproducible run to run.
        let mut groups: std::collections::BTreeMap<&[usize], Group> =
            std::collections::BTreeMap::new();
        let mut pairs: std::collections::HashSet<(&[usize], &[usize], &[usize])> =
            std::collections::HashSet::new();
        for (((_, z), (_, x)), (_, y)) in zrows.iter().zip(&xrows).zip(&yrows) {
            self.tick(1)?;
            let entry = groups.entry(z).or_default();
            entry.0.push(x);
            entry.1.push(y);
            pairs.insert((z.as_slice(), x.as_slice(), y.as_slice()));
        }
        for (z, (xs_seen, ys_seen)) in &groups {
            for &x in xs_seen {
                for &y in ys_seen {
                    self.tick(1)?;
                    if !pairs.contains(&(*z, x, y)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Flatness: an atom-free formula holds on a team iff it holds classically
    /// on each member.
    fn eval_flat(&mut self, formula: &Formula, team: &Team) -> Result<bool, CheckError> {
        let vars = team.space().vars().to_vec();
        for assignment in team.assignments() {
            self.tick(1)?;
            let mut env: HashMap<&str, usize> = vars
                .iter()
                .map(|v| v.as_str())
                .zip(assignment.values().iter().copied())
                .collect();
            if !self.eval_classical(formula, &mut env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn eval_classical<'e>(
        &mut self,
        formula: &'e Formula,
        env: &mut HashMap<&'e str, usize>,
    ) -> Result<bool, CheckError> {
        self.tick(1)?;
        let lookup = |env: &HashMap<&str, usize>, var: &str| -> Result<usize, CheckError> {
            env.get(var)
                .copied()
                .ok_or_else(|| CheckError::MissingVariable(var.to_string()))
        };
        match formula {
            Formula::Eq(x, y) => Ok(lookup(env, x)? == lookup(env, y)?),
            Formula::Neq(x, y) => Ok(lookup(env, x)? != lookup(env, y)?),
            Formula::Rel(name, vars) => {
                let tuple: Vec<usize> = vars
                    .iter()
                    .map(|v| lookup(env, v))
                    .collect::<Result<_, _>>()?;
                Ok(self.a.contains_tuple(name, &tuple)?)
            }
            Formula::NegRel(name, vars) => {
                let tuple: Vec<usize> = vars
                    .iter()
                    .map(|v| lookup(env, v))
                    .collect::<Result<_, _>>()?;
                Ok(!self.a.contains_tuple(name, &tuple)?)
            }
            Formula::And(l, r) => Ok(self.eval_classical(l, env)? && self.eval_classical(r, env)?),
            Formula::Or(l, r) => Ok(self.eval_classical(l, env)? || self.eval_classical(r, env)?),
            Formula::Exists(var, body) => {
                let saved = env.get(var.as_str()).copied();
                for value in 0..self.a.universe_size() {
                    env.insert(var, value);
                    if self.eval_classical(body, env)? {
                        restore(env, var, saved);
                        return Ok(true);
                    }
                }
                restore(env, var, saved);
                Ok(false)
            }
            Formula::Forall(var, body) => {
                let saved = env.get(var.as_str()).copied();
                for value in 0..self.a.universe_size() {
                    env.insert(var, value);
                    if !self.eval_classical(body, env)? {
                        restore(env, var, saved);
                        return Ok(false);
                    }
                }
                restore(env, var, saved);
                Ok(true)
            }
            _ => Err(CheckError::NotAnAtom),
        }
    }
}

fn restore<'e>(env: &mut HashMap<&'e str, usize>, var: &'e str, saved: Option<usize>) {
    match saved {
        Some(value) => {
            env.insert(var, value);
        }
        None => {
            env.remove(var);
        }
    }
}

/// Advances a binary odometer; false when it wraps to all-zero.
fn advance(bits: &mut [bool]) -> bool {
    for bit in bits.iter_mut() {
        if *bit {
            *bit = false;
        } else {
            *bit = true;
            return true;
        }
    }
    false
}

/// Advances a base-`radix` odometer; false when it wraps to all-zero.
fn advance_counter(digits: &mut [usize], radix: usize) -> bool {
    for digit in digits.iter_mut() {
        *digit += 1;
        if *digit == radix {
            *digit = 0;
        } else {
            return true;
        }
    }
    false
}
