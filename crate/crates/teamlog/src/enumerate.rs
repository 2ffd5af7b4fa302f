//! Enumeration engines for satisfying teams.
//!
//! Five modes (all / subset-maximal / subset-minimal / cardinality-maximum /
//! cardinality-minimum) are served by two engine families:
//!
//! * **Inclusion engines** for formulas whose atoms are within `{inc}`: a
//!   recursive subteam enumerator built on the maximal-subteam operator
//!   (polynomial delay), its subset-minimal variant, and a one-shot maximal
//!   enumerator (the maximal satisfying team is unique by union closure).
//! * **Flashlight engines** for the full language: depth-first search over
//!   teams built in ascending assignment order, pruned by extension oracles.
//!
//! Streams are pull-based; every stream records the elementary steps and the
//! oracle calls spent between consecutive outputs (`DelayStats`). For the
//! inclusion engines the maximal-subteam operator is the oracle, and its
//! internal step count is charged to the gap; flashlight oracles are counted
//! as calls only, matching the oracle-machine cost model.

use std::sync::Arc;

use thiserror::Error;

use crate::checker::CheckError;
use crate::formula::{AtomSet, Formula};
use crate::maxsub::{self, MaxsubError};
use crate::oracles::{OracleError, TeamOracles};
use crate::reference::{self, ReferenceConfig, ReferenceError};
use crate::structure::Structure;
use crate::team::{AssignmentSpace, Team, TeamError};

/// The enumeration problem family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    All,
    SubsetMax,
    SubsetMin,
    CardMax,
    CardMin,
}

impl Mode {
    pub const ALL_MODES: [Mode; 5] = [
        Mode::All,
        Mode::SubsetMax,
        Mode::SubsetMin,
        Mode::CardMax,
        Mode::CardMin,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Inclusion,
    Flashlight,
    Reference,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("formula uses atoms {0}, the inclusion engine supports atoms within {{inc}}")]
    UnsupportedFragment(AtomSet),
    #[error("mode {0:?} is not provided by the inclusion engine")]
    UnsupportedMode(Mode),
    #[error("oracle suite space does not match the formula's assignment space")]
    SpaceMismatch,
    #[error("cardinality {k} out of range 1..={max}")]
    CardOutOfRange { k: usize, max: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Maxsub(#[from] MaxsubError),
    #[error(transparent)]
    Reference(#[from] ReferenceError),
    #[error(transparent)]
    Team(#[from] TeamError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Per-enumeration instrumentation: elementary steps and oracle calls between
/// consecutive outputs. After a stream is exhausted the gap lists have length
/// `outputs + 1` (pre-first and post-last gaps included).
#[derive(Debug, Clone, Default)]
pub struct DelayStats {
    outputs: usize,
    step_gaps: Vec<u64>,
    oracle_gaps: Vec<u64>,
}

impl DelayStats {
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn step_gaps(&self) -> &[u64] {
        &self.step_gaps
    }

    pub fn oracle_gaps(&self) -> &[u64] {
        &self.oracle_gaps
    }

    pub fn max_step_gap(&self) -> u64 {
        self.step_gaps.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_step_gap(&self) -> f64 {
        if self.step_gaps.is_empty() {
            0.0
        } else {
            self.step_gaps.iter().sum::<u64>() as f64 / self.step_gaps.len() as f64
        }
    }

    pub fn max_oracle_gap(&self) -> u64 {
        self.oracle_gaps.iter().copied().max().unwrap_or(0)
    }

    pub fn mean_oracle_gap(&self) -> f64 {
        if self.oracle_gaps.is_empty() {
            0.0
        } else {
            self.oracle_gaps.iter().sum::<u64>() as f64 / self.oracle_gaps.len() as f64
        }
    }

    fn push_gap(&mut self, gap: &mut Gap) {
        self.step_gaps.push(gap.steps);
        self.oracle_gaps.push(gap.calls);
        gap.steps = 0;
        gap.calls = 0;
    }
}

#[derive(Debug, Default)]
struct Gap {
    steps: u64,
    calls: u64,
}

/// Pull-based producer of satisfying teams. Iterate it (items are
/// `Result<Team, EnumError>`), then read `stats()`.
pub struct SolutionStream<'a> {
    machine: Machine<'a>,
    stats: DelayStats,
    gap: Gap,
    finished: bool,
}

impl<'a> SolutionStream<'a> {
    fn new(machine: Machine<'a>) -> Self {
        SolutionStream {
            machine,
            stats: DelayStats::default(),
            gap: Gap::default(),
            finished: false,
        }
    }

    pub fn stats(&self) -> &DelayStats {
        &self.stats
    }
}

impl Iterator for SolutionStream<'_> {
    type Item = Result<Team, EnumError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        match self.machine.advance(&mut self.gap) {
            Ok(Some(team)) => {
                self.stats.outputs += 1;
                self.stats.push_gap(&mut self.gap);
                Some(Ok(team))
            }
            Ok(None) => {
                self.stats.push_gap(&mut self.gap);
                self.finished = true;
                None
            }
            Err(e) => {
                self.finished = true;
                Some(Err(e))
            }
        }
    }
}

enum Machine<'a> {
    Subteam(SubteamMachine<'a>),
    MaxInclusion(MaxInclusionMachine<'a>),
    Flashlight(FlashlightMachine<'a>),
    CardExtreme(CardExtremeMachine<'a>),
    Reference(ReferenceMachine<'a>),
}

impl Machine<'_> {
    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        match self {
            Machine::Subteam(m) => m.advance(gap),
            Machine::MaxInclusion(m) => m.advance(gap),
            Machine::Flashlight(m) => m.advance(gap),
            Machine::CardExtreme(m) => m.advance(gap),
            Machine::Reference(m) => m.advance(gap),
        }
    }
}

// ---------------------------------------------------------------------------
// Inclusion engines
// ---------------------------------------------------------------------------

fn require_inclusion_fragment(formula: &Formula) -> Result<(), EnumError> {
    let atoms = formula.atoms();
    if atoms.within(AtomSet::INC) {
        Ok(())
    } else {
        Err(EnumError::UnsupportedFragment(atoms))
    }
}

struct SubteamFrame {
    input: Team,
    forbidden: Team,
    state: SubteamState,
}

enum SubteamState {
    Enter,
    Children {
        members: Vec<usize>,
        prefix: Team,
        team: Team,
        next: usize,
    },
}

/// Recursive subteam enumeration for the inclusion fragment. Each call
/// shrinks its input to the maximal satisfying subteam, emits it when it
/// covers the forbidden prefix, and recurses with one member removed.
///
/// The forbidden set accumulates down the recursion: the child exploring the
/// removal of member `s` is constrained to teams containing the caller's
/// constraint set plus every kept member below `s`. Re-deriving the prefix
/// from the child alone would let deeper calls drop earlier members and emit
/// duplicates.
struct SubteamMachine<'a> {
    a: &'a Structure,
    formula: &'a Formula,
    minimal_only: bool,
    stack: Vec<SubteamFrame>,
}

enum Act<F> {
    Continue,
    Pop,
    Push(F),
    Output(Team),
    OutputPop(Team),
}

impl SubteamMachine<'_> {
    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        loop {
            let Some(frame) = self.stack.last_mut() else {
                return Ok(None);
            };
            gap.steps += 1;
            let act = match &mut frame.state {
                SubteamState::Enter => {
                    let (team, steps) =
                        maxsub::max_subteam_with_steps(self.a, &frame.input, self.formula)?;
                    gap.steps += steps;
                    gap.calls += 1;
                    if team.is_empty() || !frame.forbidden.is_subset(&team)? {
                        Act::Pop
                    } else {
                        let members: Vec<usize> = team.iter().collect();
                        if self.minimal_only {
                            let mut minimal = true;
                            for &member in &members {
                                let mut reduced = team.clone();
                                reduced.remove(member);
                                let (sub, steps) =
                                    maxsub::max_subteam_with_steps(self.a, &reduced, self.formula)?;
                                gap.steps += steps;
                                gap.calls += 1;
                                if !sub.is_empty() {
                                    minimal = false;
                                    break;
                                }
                            }
                            if minimal {
                                Act::OutputPop(team)
                            } else {
                                frame.state = SubteamState::Children {
                                    members,
                                    prefix: frame.forbidden.clone(),
                                    team,
                                    next: 0,
                                };
                                Act::Continue
                            }
                        } else {
                            frame.state = SubteamState::Children {
                                members,
                                prefix: frame.forbidden.clone(),
                                team: team.clone(),
                                next: 0,
                            };
                            Act::Output(team)
                        }
                    }
                }
                SubteamState::Children {
                    members,
                    prefix,
                    team,
                    next,
                } => {
                    if *next >= members.len() {
                        Act::Pop
                    } else {
                        let member = members[*next];
                        *next += 1;
                        if prefix.contains(member) {
                            // Removing a member the branch is already forced
                            // to keep can satisfy no solution; skip the call.
                            Act::Continue
                        } else {
                            let mut child_input = team.clone();
                            child_input.remove(member);
                            let child_forbidden = prefix.clone();
                            prefix.insert(member)?;
                            Act::Push(SubteamFrame {
                                input: child_input,
                                forbidden: child_forbidden,
                                state: SubteamState::Enter,
                            })
                        }
                    }
                }
            };
            match act {
                Act::Continue => {}
                Act::Pop => {
                    self.stack.pop();
                }
                Act::Push(frame) => self.stack.push(frame),
                Act::Output(team) => return Ok(Some(team)),
                Act::OutputPop(team) => {
                    self.stack.pop();
                    return Ok(Some(team));
                }
            }
        }
    }
}

/// One-shot stream of the unique maximal satisfying team.
struct MaxInclusionMachine<'a> {
    a: &'a Structure,
    formula: &'a Formula,
    space: Arc<AssignmentSpace>,
    done: bool,
}

impl MaxInclusionMachine<'_> {
    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        if self.done {
            return Ok(None);
        }
        self.done = true;
        gap.steps += 1;
        let full = Team::full(Arc::clone(&self.space));
        let (team, steps) = maxsub::max_subteam_with_steps(self.a, &full, self.formula)?;
        gap.steps += steps;
        gap.calls += 1;
        Ok(if team.is_empty() { None } else { Some(team) })
    }
}

// ---------------------------------------------------------------------------
// Flashlight engines
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FlashVariant {
    All,
    Card(usize),
    Min,
    SubsetMax,
}

struct FlashFrame {
    team: Team,
    state: FlashState,
}

enum FlashState {
    Enter,
    Extend,
    Children { cursor: usize },
}

/// Depth-first search over teams: every recursive call adds exactly one
/// assignment above the current maximum, so each team is visited at most
/// once. The forbidden set passed to the extension oracles consists of the
/// skipped assignments below the maximum, confining each oracle answer to the
/// subtree ahead.
struct FlashlightMachine<'a> {
    oracles: &'a dyn TeamOracles,
    space: Arc<AssignmentSpace>,
    variant: FlashVariant,
    stack: Vec<FlashFrame>,
}

impl<'a> FlashlightMachine<'a> {
    fn new(oracles: &'a dyn TeamOracles, variant: FlashVariant) -> Self {
        let space = Arc::clone(oracles.space());
        let root = FlashFrame {
            team: Team::empty(Arc::clone(&space)),
            state: FlashState::Enter,
        };
        FlashlightMachine {
            oracles,
            space,
            variant,
            stack: vec![root],
        }
    }

    fn forbidden(space: &Arc<AssignmentSpace>, team: &Team) -> Result<Team, EnumError> {
        let mut y = Team::empty(Arc::clone(space));
        if let Some(max) = team.max_index() {
            for i in 0..max {
                if !team.contains(i) {
                    y.insert(i)?;
                }
            }
        }
        Ok(y)
    }

    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        loop {
            let Some(frame) = self.stack.last_mut() else {
                return Ok(None);
            };
            gap.steps += 1;
            let act = match &mut frame.state {
                FlashState::Enter => {
                    gap.calls += 1;
                    let ver = self.oracles.ver_team(&frame.team)?;
                    match self.variant {
                        FlashVariant::All => {
                            frame.state = FlashState::Extend;
                            if ver {
                                Act::Output(frame.team.clone())
                            } else {
                                Act::Continue
                            }
                        }
                        FlashVariant::Card(k) => {
                            if ver && frame.team.len() == k {
                                Act::OutputPop(frame.team.clone())
                            } else {
                                frame.state = FlashState::Extend;
                                Act::Continue
                            }
                        }
                        FlashVariant::Min => {
                            if ver {
                                gap.calls += 1;
                                if self.oracles.proper_subteam_sat(&frame.team)? {
                                    // Satisfying but not minimal: no superteam
                                    // in this subtree can be minimal either.
                                    Act::Pop
                                } else {
                                    Act::OutputPop(frame.team.clone())
                                }
                            } else {
                                frame.state = FlashState::Extend;
                                Act::Continue
                            }
                        }
                        FlashVariant::SubsetMax => {
                            frame.state = FlashState::Extend;
                            if ver {
                                gap.calls += 1;
                                let empty = Team::empty(Arc::clone(&self.space));
                                if !self.oracles.ext_team(&frame.team, &empty)? {
                                    Act::Output(frame.team.clone())
                                } else {
                                    Act::Continue
                                }
                            } else {
                                Act::Continue
                            }
                        }
                    }
                }
                FlashState::Extend => {
                    let y = Self::forbidden(&self.space, &frame.team)?;
                    gap.calls += 1;
                    let descend = match self.variant {
                        FlashVariant::All | FlashVariant::Min => {
                            self.oracles.ext_team(&frame.team, &y)?
                        }
                        FlashVariant::Card(k) => self.oracles.ext_card_team(&frame.team, &y, k)?,
                        FlashVariant::SubsetMax => self.oracles.ext_max_team(&frame.team, &y)?,
                    };
                    if descend {
                        let cursor = frame.team.max_index().map_or(0, |m| m + 1);
                        frame.state = FlashState::Children { cursor };
                        Act::Continue
                    } else {
                        Act::Pop
                    }
                }
                FlashState::Children { cursor } => {
                    if *cursor >= self.space.size() {
                        Act::Pop
                    } else {
                        let next = *cursor;
                        *cursor += 1;
                        let mut child = frame.team.clone();
                        child.insert(next)?;
                        Act::Push(FlashFrame {
                            team: child,
                            state: FlashState::Enter,
                        })
                    }
                }
            };
            match act {
                Act::Continue => {}
                Act::Pop => {
                    self.stack.pop();
                }
                Act::Push(frame) => self.stack.push(frame),
                Act::Output(team) => return Ok(Some(team)),
                Act::OutputPop(team) => {
                    self.stack.pop();
                    return Ok(Some(team));
                }
            }
        }
    }
}

/// Finds the extreme satisfiable cardinality, then runs the cardinality
/// flashlight with it. The search is lazy so its oracle calls land in the
/// pre-first-output gap.
struct CardExtremeMachine<'a> {
    oracles: &'a dyn TeamOracles,
    state: CardExtremeState<'a>,
}

enum CardExtremeState<'a> {
    Find { candidates: Vec<usize>, next: usize },
    Running(FlashlightMachine<'a>),
    Done,
}

impl<'a> CardExtremeMachine<'a> {
    fn new(oracles: &'a dyn TeamOracles, direction: Direction) -> Self {
        let size = oracles.space().size();
        let candidates: Vec<usize> = match direction {
            Direction::Max => (1..=size).rev().collect(),
            Direction::Min => (1..=size).collect(),
        };
        CardExtremeMachine {
            oracles,
            state: CardExtremeState::Find {
                candidates,
                next: 0,
            },
        }
    }

    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        loop {
            match &mut self.state {
                CardExtremeState::Find { candidates, next } => {
                    if *next >= candidates.len() {
                        self.state = CardExtremeState::Done;
                        continue;
                    }
                    let k = candidates[*next];
                    *next += 1;
                    gap.steps += 1;
                    gap.calls += 1;
                    let empty = Team::empty(Arc::clone(self.oracles.space()));
                    if self.oracles.ext_card_team(&empty, &empty, k)? {
                        self.state = CardExtremeState::Running(FlashlightMachine::new(
                            self.oracles,
                            FlashVariant::Card(k),
                        ));
                    }
                }
                CardExtremeState::Running(machine) => return machine.advance(gap),
                CardExtremeState::Done => return Ok(None),
            }
        }
    }
}

/// Wraps the brute-force reference solver as a stream (canonical order).
struct ReferenceMachine<'a> {
    a: &'a Structure,
    formula: &'a Formula,
    mode: Mode,
    cfg: ReferenceConfig,
    queue: Option<std::vec::IntoIter<Team>>,
}

impl ReferenceMachine<'_> {
    fn advance(&mut self, gap: &mut Gap) -> Result<Option<Team>, EnumError> {
        if self.queue.is_none() {
            let sets = reference::brute_solutions(self.a, self.formula, &self.cfg)?;
            gap.steps += sets.steps;
            let teams: Vec<Team> = sets.for_mode(self.mode).iter().cloned().collect();
            self.queue = Some(teams.into_iter());
        }
        gap.steps += 1;
        Ok(self.queue.as_mut().unwrap().next())
    }
}

// ---------------------------------------------------------------------------
// Public constructors
// ---------------------------------------------------------------------------

/// All nonempty satisfying teams of an inclusion-fragment formula, by the
/// recursive maximal-subteam enumerator.
pub fn enum_all_inclusion<'a>(
    a: &'a Structure,
    formula: &'a Formula,
) -> Result<SolutionStream<'a>, EnumError> {
    require_inclusion_fragment(formula)?;
    let space = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
    let root = SubteamFrame {
        input: Team::full(Arc::clone(&space)),
        forbidden: Team::empty(space),
        state: SubteamState::Enter,
    };
    Ok(SolutionStream::new(Machine::Subteam(SubteamMachine {
        a,
        formula,
        minimal_only: false,
        stack: vec![root],
    })))
}

/// Subset-minimal nonempty satisfying teams of an inclusion-fragment formula.
pub fn enum_min_inclusion<'a>(
    a: &'a Structure,
    formula: &'a Formula,
) -> Result<SolutionStream<'a>, EnumError> {
    require_inclusion_fragment(formula)?;
    let space = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
    let root = SubteamFrame {
        input: Team::full(Arc::clone(&space)),
        forbidden: Team::empty(space),
        state: SubteamState::Enter,
    };
    Ok(SolutionStream::new(Machine::Subteam(SubteamMachine {
        a,
        formula,
        minimal_only: true,
        stack: vec![root],
    })))
}

/// Subset-maximal (equivalently cardinality-maximum) satisfying teams of an
/// inclusion-fragment formula: the stream holds at most the one maximal team.
pub fn enum_max_inclusion<'a>(
    a: &'a Structure,
    formula: &'a Formula,
    mode: Mode,
) -> Result<SolutionStream<'a>, EnumError> {
    require_inclusion_fragment(formula)?;
    if !matches!(mode, Mode::SubsetMax | Mode::CardMax) {
        return Err(EnumError::UnsupportedMode(mode));
    }
    let space = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
    Ok(SolutionStream::new(Machine::MaxInclusion(
        MaxInclusionMachine {
            a,
            formula,
            space,
            done: false,
        },
    )))
}

/// All nonempty satisfying teams, by flashlight search.
pub fn enum_all_flashlight(oracles: &dyn TeamOracles) -> SolutionStream<'_> {
    SolutionStream::new(Machine::Flashlight(FlashlightMachine::new(
        oracles,
        FlashVariant::All,
    )))
}

/// Satisfying teams of exactly cardinality `k`.
pub fn enum_card(oracles: &dyn TeamOracles, k: usize) -> Result<SolutionStream<'_>, EnumError> {
    let max = oracles.space().size();
    if k == 0 || k > max {
        return Err(EnumError::CardOutOfRange { k, max });
    }
    Ok(SolutionStream::new(Machine::Flashlight(
        FlashlightMachine::new(oracles, FlashVariant::Card(k)),
    )))
}

/// Largest (resp. smallest) cardinality of a satisfying team, if any.
pub fn find_extreme_card(
    oracles: &dyn TeamOracles,
    direction: Direction,
) -> Result<Option<usize>, EnumError> {
    let size = oracles.space().size();
    let empty = Team::empty(Arc::clone(oracles.space()));
    let candidates: Vec<usize> = match direction {
        Direction::Max => (1..=size).rev().collect(),
        Direction::Min => (1..=size).collect(),
    };
    for k in candidates {
        if oracles.ext_card_team(&empty, &empty, k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Cardinality-maximum or -minimum satisfying teams: find the extreme
/// cardinality, then enumerate teams of exactly that size.
pub fn enum_card_extreme(oracles: &dyn TeamOracles, direction: Direction) -> SolutionStream<'_> {
    SolutionStream::new(Machine::CardExtreme(CardExtremeMachine::new(
        oracles, direction,
    )))
}

/// Subset-minimal nonempty satisfying teams, by flashlight search with an
/// explicit minimality guard.
pub fn enum_min_flashlight(oracles: &dyn TeamOracles) -> SolutionStream<'_> {
    SolutionStream::new(Machine::Flashlight(FlashlightMachine::new(
        oracles,
        FlashVariant::Min,
    )))
}

/// Subset-maximal satisfying teams, by flashlight search guided by the
/// maximal-extension oracle.
pub fn enum_subsetmax_flashlight(oracles: &dyn TeamOracles) -> SolutionStream<'_> {
    SolutionStream::new(Machine::Flashlight(FlashlightMachine::new(
        oracles,
        FlashVariant::SubsetMax,
    )))
}

/// Engine and mode dispatcher. `Auto` picks the inclusion engines for
/// inclusion-fragment formulas except in the cardinality-minimum mode, which
/// only the flashlight family provides.
pub fn stream<'a>(
    a: &'a Structure,
    formula: &'a Formula,
    mode: Mode,
    engine: Engine,
    oracles: &'a dyn TeamOracles,
) -> Result<SolutionStream<'a>, EnumError> {
    let engine = match engine {
        Engine::Auto => {
            if formula.atoms().within(AtomSet::INC) && mode != Mode::CardMin {
                Engine::Inclusion
            } else {
                Engine::Flashlight
            }
        }
        other => other,
    };
    match engine {
        Engine::Auto => unreachable!("resolved above"),
        Engine::Inclusion => match mode {
            Mode::All => enum_all_inclusion(a, formula),
            Mode::SubsetMin => enum_min_inclusion(a, formula),
            Mode::SubsetMax | Mode::CardMax => enum_max_inclusion(a, formula, mode),
            Mode::CardMin => Err(EnumError::UnsupportedMode(mode)),
        },
        Engine::Flashlight => {
            let expected = AssignmentSpace::new(a.universe_size(), formula.free_vars())?;
            if oracles.space() != &expected {
                return Err(EnumError::SpaceMismatch);
            }
            Ok(match mode {
                Mode::All => enum_all_flashlight(oracles),
                Mode::SubsetMin => enum_min_flashlight(oracles),
                Mode::SubsetMax => enum_subsetmax_flashlight(oracles),
                Mode::CardMax => enum_card_extreme(oracles, Direction::Max),
                Mode::CardMin => enum_card_extreme(oracles, Direction::Min),
            })
        }
        Engine::Reference => Ok(SolutionStream::new(Machine::Reference(ReferenceMachine {
            a,
            formula,
            mode,
            cfg: ReferenceConfig::default(),
            queue: None,
        }))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::BruteOracles;
    use crate::structure::Vocabulary;
    use std::collections::BTreeSet;

    fn setup(n: usize, text: &str) -> (Structure, Formula) {
        let a = Structure::new(n, vec![]).unwrap();
        let f = Formula::parse(text, &Vocabulary::empty()).unwrap();
        (a, f)
    }

    fn collect(stream: SolutionStream) -> (Vec<Team>, DelayStats) {
        let mut stream = stream;
        let mut teams = Vec::new();
        for item in &mut stream {
            teams.push(item.expect("stream must not error"));
        }
        let stats = stream.stats().clone();
        (teams, stats)
    }

    fn as_set(teams: &[Team]) -> BTreeSet<Team> {
        teams.iter().cloned().collect()
    }

    #[test]
    fn inclusion_all_matches_brute_and_starts_with_full_team() {
        let (a, f) = setup(2, "inc(x;y)");
        let (teams, stats) = collect(enum_all_inclusion(&a, &f).unwrap());
        assert_eq!(teams.len(), 11);
        assert_eq!(teams[0].len(), 4, "first output is the full team");
        let brute = reference::brute_enum(&a, &f, Mode::All, &ReferenceConfig::default()).unwrap();
        assert_eq!(as_set(&teams), brute);
        assert_eq!(stats.outputs(), 11);
        assert_eq!(stats.step_gaps().len(), 12);
        // No duplicates.
        assert_eq!(as_set(&teams).len(), teams.len());
    }

    #[test]
    fn inclusion_all_empty_for_contradiction() {
        let (a, f) = setup(2, "x != x");
        let (teams, stats) = collect(enum_all_inclusion(&a, &f).unwrap());
        assert!(teams.is_empty());
        assert_eq!(stats.step_gaps().len(), 1);
    }

    #[test]
    fn inclusion_min_finds_the_three_minimal_teams() {
        let (a, f) = setup(2, "inc(x;y)");
        let (teams, _) = collect(enum_min_inclusion(&a, &f).unwrap());
        let brute =
            reference::brute_enum(&a, &f, Mode::SubsetMin, &ReferenceConfig::default()).unwrap();
        assert_eq!(as_set(&teams), brute);
        assert_eq!(teams.len(), 3);
    }

    #[test]
    fn inclusion_min_of_flat_tautology_is_all_singletons() {
        // Teams live over the free variables, so inc(x;x) has a two-assignment
        // space; the two-variable version has the full four.
        let (a, f) = setup(2, "inc(x;x)");
        let (teams, _) = collect(enum_min_inclusion(&a, &f).unwrap());
        assert_eq!(teams.len(), 2);
        assert!(teams.iter().all(|t| t.len() == 1));

        let (a, f) = setup(2, "(inc(x;x) & inc(y;y))");
        let (teams, _) = collect(enum_min_inclusion(&a, &f).unwrap());
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 1));
    }

    #[test]
    fn inclusion_max_is_single_full_team() {
        let (a, f) = setup(2, "inc(x;y)");
        for mode in [Mode::SubsetMax, Mode::CardMax] {
            let (teams, _) = collect(enum_max_inclusion(&a, &f, mode).unwrap());
            assert_eq!(teams.len(), 1);
            assert_eq!(teams[0].len(), 4);
        }
        let (a, f) = setup(2, "x != x");
        let (teams, _) = collect(enum_max_inclusion(&a, &f, Mode::SubsetMax).unwrap());
        assert!(teams.is_empty());
    }

    #[test]
    fn inclusion_max_with_restriction() {
        let a = Structure::new(2, vec![("R".into(), 2, vec![vec![0, 0]])]).unwrap();
        let f = Formula::parse("(inc(x;y) & !R(x,y))", a.vocabulary()).unwrap();
        let (teams, _) = collect(enum_max_inclusion(&a, &f, Mode::SubsetMax).unwrap());
        assert_eq!(teams.len(), 1);
        assert_eq!(teams[0].len(), 3);
        assert!(!teams[0].contains(0));
    }

    #[test]
    fn inclusion_engine_rejects_other_fragments_and_cardmin() {
        let (a, f) = setup(2, "dep(x;y)");
        assert!(matches!(
            enum_all_inclusion(&a, &f),
            Err(EnumError::UnsupportedFragment(_))
        ));
        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        assert!(matches!(
            stream(&a, &f, Mode::CardMin, Engine::Inclusion, &oracles),
            Err(EnumError::UnsupportedMode(Mode::CardMin))
        ));
    }

    #[test]
    fn flashlight_all_dep_is_the_eight_partial_functions() {
        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_all_flashlight(&oracles));
        assert_eq!(teams.len(), 8);
        let brute = reference::brute_enum(&a, &f, Mode::All, &ReferenceConfig::default()).unwrap();
        assert_eq!(as_set(&teams), brute);
    }

    #[test]
    fn flashlight_all_matches_inclusion_engine_on_inc() {
        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (flash, _) = collect(enum_all_flashlight(&oracles));
        let (incl, _) = collect(enum_all_inclusion(&a, &f).unwrap());
        assert_eq!(as_set(&flash), as_set(&incl));
        assert_eq!(flash.len(), 11);
    }

    #[test]
    fn flashlight_all_independence() {
        let (a, f) = setup(2, "ind(; x; y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_all_flashlight(&oracles));
        let set = as_set(&teams);
        let space = Arc::clone(oracles.space());
        let full = Team::full(Arc::clone(&space));
        assert!(set.contains(&full));
        let missing_pair = Team::from_indices(space, [0, 1, 2]).unwrap();
        assert!(!set.contains(&missing_pair));
        let brute = reference::brute_enum(&a, &f, Mode::All, &ReferenceConfig::default()).unwrap();
        assert_eq!(set, brute);
    }

    #[test]
    fn card_mode_examples() {
        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_card(&oracles, 2).unwrap());
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 2));
        let (teams, _) = collect(enum_card(&oracles, 3).unwrap());
        assert!(teams.is_empty());

        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_card(&oracles, 4).unwrap());
        assert_eq!(teams.len(), 1);
        assert_eq!(teams[0].len(), 4);
    }

    #[test]
    fn find_extreme_card_examples() {
        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        assert_eq!(
            find_extreme_card(&oracles, Direction::Max).unwrap(),
            Some(2)
        );

        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        assert_eq!(
            find_extreme_card(&oracles, Direction::Min).unwrap(),
            Some(1)
        );

        let (a, f) = setup(2, "x != x");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        assert_eq!(find_extreme_card(&oracles, Direction::Max).unwrap(), None);
    }

    #[test]
    fn card_extreme_streams() {
        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_card_extreme(&oracles, Direction::Min));
        assert_eq!(teams.len(), 2);
        assert!(teams.iter().all(|t| t.len() == 1));

        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_card_extreme(&oracles, Direction::Max));
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 2));
        let (teams, _) = collect(enum_card_extreme(&oracles, Direction::Min));
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 1));
    }

    #[test]
    fn min_flashlight_examples() {
        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (flash, _) = collect(enum_min_flashlight(&oracles));
        let (incl, _) = collect(enum_min_inclusion(&a, &f).unwrap());
        assert_eq!(as_set(&flash), as_set(&incl));

        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_min_flashlight(&oracles));
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 1));

        let (a, f) = setup(2, "ind(; x; y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_min_flashlight(&oracles));
        assert_eq!(teams.len(), 4);
        assert!(teams.iter().all(|t| t.len() == 1));
    }

    #[test]
    fn subsetmax_flashlight_examples() {
        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_subsetmax_flashlight(&oracles));
        let brute =
            reference::brute_enum(&a, &f, Mode::SubsetMax, &ReferenceConfig::default()).unwrap();
        assert_eq!(as_set(&teams), brute);
        assert_eq!(teams.len(), 4);

        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_subsetmax_flashlight(&oracles));
        assert_eq!(teams.len(), 1);
        assert_eq!(teams[0].len(), 4);

        let (a, f) = setup(2, "x != x");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (teams, _) = collect(enum_subsetmax_flashlight(&oracles));
        assert!(teams.is_empty());
    }

    #[test]
    fn mode_algebra() {
        for text in ["dep(x;y)", "inc(x;y)", "ind(; x; y)", "(dep(x;y) | x = y)"] {
            let (a, f) = setup(2, text);
            let oracles = BruteOracles::new(&a, &f).unwrap();
            let (all, _) = collect(enum_all_flashlight(&oracles));
            let all_set = as_set(&all);
            let (minima, _) = collect(enum_min_flashlight(&oracles));
            for team in &minima {
                assert!(all_set.contains(team), "{text}: SubsetMin ⊆ All");
            }
            let (card_max, _) = collect(enum_card_extreme(&oracles, Direction::Max));
            let k_max = find_extreme_card(&oracles, Direction::Max).unwrap();
            assert!(
                card_max.iter().all(|t| Some(t.len()) == k_max),
                "{text}: CardMax sizes"
            );
            let (card_min, _) = collect(enum_card_extreme(&oracles, Direction::Min));
            let k_min = find_extreme_card(&oracles, Direction::Min).unwrap();
            assert!(
                card_min.iter().all(|t| Some(t.len()) == k_min),
                "{text}: CardMin sizes"
            );
            let (maxima, _) = collect(enum_subsetmax_flashlight(&oracles));
            for team in &maxima {
                assert!(
                    !all_set.iter().any(|u| team.is_proper_subset(u).unwrap()),
                    "{text}: SubsetMax output has a satisfying proper superteam"
                );
            }
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let (a, f) = setup(2, "(dep(x;y) | inc(y;x))");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let (first, stats_a) = collect(enum_all_flashlight(&oracles));
        let (second, stats_b) = collect(enum_all_flashlight(&oracles));
        assert_eq!(first, second);
        assert_eq!(stats_a.step_gaps(), stats_b.step_gaps());
        assert_eq!(stats_a.oracle_gaps(), stats_b.oracle_gaps());
    }

    #[test]
    fn auto_engine_dispatch() {
        let (a, f) = setup(2, "inc(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        for mode in Mode::ALL_MODES {
            let teams: BTreeSet<Team> = stream(&a, &f, mode, Engine::Auto, &oracles)
                .unwrap()
                .map(|t| t.unwrap())
                .collect();
            let brute = reference::brute_enum(&a, &f, mode, &ReferenceConfig::default()).unwrap();
            assert_eq!(teams, brute, "mode {mode:?}");
        }
    }

    #[test]
    fn reference_engine_streams_in_canonical_order() {
        let (a, f) = setup(2, "dep(x;y)");
        let oracles = BruteOracles::new(&a, &f).unwrap();
        let teams: Vec<Team> = stream(&a, &f, Mode::All, Engine::Reference, &oracles)
            .unwrap()
            .map(|t| t.unwrap())
            .collect();
        assert_eq!(teams.len(), 8);
        let mut sorted = teams.clone();
        sorted.sort();
        assert_eq!(teams, sorted);
    }
}
