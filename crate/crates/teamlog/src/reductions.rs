//! Hardness-reduction constructions as executable instance generators and
//! validators: the CNF-to-structure encoding with its satisfiability
//! sentence, the nonempty lift, and the independent-set chain ending in a
//! weight-bounded relational instance with a myopic sentence.
//!
//! The quantifier over clauses in both fixed sentences is relativized to
//! elements that actually carry a `P` or `N` occurrence; without that guard
//! the quantifier would range over variable elements of the encoding and
//! falsify the sentences outright.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::checker::{self, CheckError, EvalConfig};
use crate::formula::Formula;
use crate::structure::{Structure, StructureError};
use crate::team::{AssignmentSpace, Team, TeamError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("CNF must have at least one clause")]
    EmptyCnf,
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("literal {literal} out of range for {vars} variables")]
    LiteralOutOfRange { literal: i64, vars: usize },
    #[error("clause {clause} has more than one negative literal (not dual-Horn)")]
    NotDualHorn { clause: usize },
    #[error("graph edge ({u}, {v}) invalid for {vertices} vertices")]
    BadEdge { u: usize, v: usize, vertices: usize },
    #[error("sentence has free first-order variable `{0}`")]
    FreeVariable(String),
    #[error("relation scan needs {candidates} candidates, cap is {cap}")]
    CandidateCapExceeded { candidates: u128, cap: u64 },
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Team(#[from] TeamError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Propositional CNF with 1-indexed variables; a negative literal `-i` is the
/// negation of variable `i`. Clause lists may be empty (a vacuously true
/// formula), individual clauses may not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropCnf {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl PropCnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, ReductionError> {
        for (index, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(ReductionError::EmptyClause { index });
            }
            for &literal in clause {
                if literal == 0 || literal.unsigned_abs() as usize > num_vars {
                    return Err(ReductionError::LiteralOutOfRange {
                        literal,
                        vars: num_vars,
                    });
                }
            }
        }
        Ok(PropCnf { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// Evaluates under the assignment that sets exactly the variables in
    /// `beta` (1-indexed) to true.
    pub fn eval(&self, beta: &Relation) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&literal| {
                let var = literal.unsigned_abs() as usize;
                (literal > 0) == beta.contains(&(var - 1))
            })
        })
    }

    /// At most one negative literal per clause.
    pub fn is_dual_horn(&self) -> bool {
        self.clauses
            .iter()
            .all(|clause| clause.iter().filter(|&&l| l < 0).count() <= 1)
    }
}

/// Simple undirected graph; edges are stored normalized with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(
        vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ReductionError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v || u >= vertices || v >= vertices {
                return Err(ReductionError::BadEdge { u, v, vertices });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Graph {
            vertices,
            edges: set,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_independent(&self, set: &BTreeSet<usize>) -> bool {
        self.edges
            .iter()
            .all(|(u, v)| !(set.contains(u) && set.contains(v)))
    }

    /// Size of a maximum independent set, by scanning all vertex subsets.
    pub fn max_independent_set_size(&self) -> usize {
        let mut best = 0;
        for mask in 0u64..1 << self.vertices {
            let set: BTreeSet<usize> = (0..self.vertices).filter(|&v| mask >> v & 1 == 1).collect();
            if self.is_independent(&set) {
                best = best.max(set.len());
            }
        }
        best
    }
}

/// A unary relation over universe elements; as a propositional assignment it
/// is the set of variables mapped to true, and its size is the weight.
pub type Relation = BTreeSet<usize>;

/// Classical first-order sentences over the vocabulary `(P², N²)` with one
/// free unary relation symbol `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelSentence {
    PAtom(String, String),
    NAtom(String, String),
    RAtom(String),
    EqAtom(String, String),
    Not(Box<RelSentence>),
    And(Box<RelSentence>, Box<RelSentence>),
    Or(Box<RelSentence>, Box<RelSentence>),
    Implies(Box<RelSentence>, Box<RelSentence>),
    Forall(String, Box<RelSentence>),
    Exists(String, Box<RelSentence>),
}

impl fmt::Display for RelSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelSentence::PAtom(x, y) => write!(f, "P({x}, {y})"),
            RelSentence::NAtom(x, y) => write!(f, "N({x}, {y})"),
            RelSentence::RAtom(x) => write!(f, "R({x})"),
            RelSentence::EqAtom(x, y) => write!(f, "{x} = {y}"),
            RelSentence::Not(inner) => write!(f, "!{inner}"),
            RelSentence::And(l, r) => write!(f, "({l} & {r})"),
            RelSentence::Or(l, r) => write!(f, "({l} | {r})"),
            RelSentence::Implies(l, r) => write!(f, "({l} -> {r})"),
            RelSentence::Forall(v, body) => write!(f, "forall {v}. {body}"),
            RelSentence::Exists(v, body) => write!(f, "exists {v}. {body}"),
        }
    }
}

fn rel(x: &str) -> RelSentence {
    RelSentence::RAtom(x.into())
}

fn p_atom(x: &str, y: &str) -> RelSentence {
    RelSentence::PAtom(x.into(), y.into())
}

fn n_atom(x: &str, y: &str) -> RelSentence {
    RelSentence::NAtom(x.into(), y.into())
}

fn not(inner: RelSentence) -> RelSentence {
    RelSentence::Not(Box::new(inner))
}

fn and(l: RelSentence, r: RelSentence) -> RelSentence {
    RelSentence::And(Box::new(l), Box::new(r))
}

fn or(l: RelSentence, r: RelSentence) -> RelSentence {
    RelSentence::Or(Box::new(l), Box::new(r))
}

fn implies(l: RelSentence, r: RelSentence) -> RelSentence {
    RelSentence::Implies(Box::new(l), Box::new(r))
}

fn forall(v: &str, body: RelSentence) -> RelSentence {
    RelSentence::Forall(v.into(), Box::new(body))
}

fn exists(v: &str, body: RelSentence) -> RelSentence {
    RelSentence::Exists(v.into(), Box::new(body))
}

/// `C` is an encoded clause: something occurs in it positively or negatively.
fn clause_guard(c: &str) -> RelSentence {
    exists("w", or(p_atom(c, "w"), n_atom(c, "w")))
}

/// Encodes a CNF as a structure over `(P², N²)`: the universe holds the
/// variables then the clauses, `P` (resp. `N`) relates each clause to the
/// variables occurring positively (negatively) in it.
pub fn encode_cnf(cnf: &PropCnf) -> Result<Structure, ReductionError> {
    if cnf.clauses.is_empty() {
        return Err(ReductionError::EmptyCnf);
    }
    let n = cnf.num_vars;
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for (j, clause) in cnf.clauses.iter().enumerate() {
        let clause_elem = n + j;
        for &literal in clause {
            let var_elem = literal.unsigned_abs() as usize - 1;
            if literal > 0 {
                positives.push(vec![clause_elem, var_elem]);
            } else {
                negatives.push(vec![clause_elem, var_elem]);
            }
        }
    }
    let labels: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..=cnf.clauses.len()).map(|j| format!("C{j}")))
        .collect();
    let structure = Structure::new(
        n + cnf.clauses.len(),
        vec![("P".into(), 2, positives), ("N".into(), 2, negatives)],
    )?;
    Ok(structure.with_labels(labels)?)
}

/// The satisfiability sentence: every clause has a positive occurrence made
/// true or a negative occurrence made false by `R`.
pub fn chi_sentence() -> RelSentence {
    forall(
        "C",
        implies(
            clause_guard("C"),
            exists(
                "x",
                or(
                    and(p_atom("C", "x"), rel("x")),
                    and(n_atom("C", "x"), not(rel("x"))),
                ),
            ),
        ),
    )
}

/// The myopic sentence for dual-Horn CNFs: whenever `R` holds anywhere, every
/// all-positive clause has a positive witness in `R`, and every clause whose
/// negative literal is in `R` also has one.
pub fn myopic_sentence() -> RelSentence {
    let all_positive_covered = implies(
        not(exists("z", n_atom("C", "z"))),
        exists("y", and(p_atom("C", "y"), rel("y"))),
    );
    let negated_covered = implies(
        n_atom("C", "x"),
        exists("y", and(p_atom("C", "y"), rel("y"))),
    );
    forall(
        "x",
        implies(
            rel("x"),
            forall(
                "C",
                implies(
                    clause_guard("C"),
                    and(all_positive_covered, negated_covered),
                ),
            ),
        ),
    )
}

/// `φ'(R) = φ(R) ∨ φ(∅)`: a structure has a satisfying `R` for `φ` iff it has
/// a nonempty satisfying `R` for the lift.
pub fn nonempty_lift(sentence: &RelSentence) -> RelSentence {
    or(sentence.clone(), substitute_r_empty(sentence))
}

fn substitute_r_empty(sentence: &RelSentence) -> RelSentence {
    match sentence {
        RelSentence::RAtom(x) => not(RelSentence::EqAtom(x.clone(), x.clone())),
        RelSentence::PAtom(..) | RelSentence::NAtom(..) | RelSentence::EqAtom(..) => {
            sentence.clone()
        }
        RelSentence::Not(inner) => not(substitute_r_empty(inner)),
        RelSentence::And(l, r) => and(substitute_r_empty(l), substitute_r_empty(r)),
        RelSentence::Or(l, r) => or(substitute_r_empty(l), substitute_r_empty(r)),
        RelSentence::Implies(l, r) => implies(substitute_r_empty(l), substitute_r_empty(r)),
        RelSentence::Forall(v, body) => {
            RelSentence::Forall(v.clone(), Box::new(substitute_r_empty(body)))
        }
        RelSentence::Exists(v, body) => {
            RelSentence::Exists(v.clone(), Box::new(substitute_r_empty(body)))
        }
    }
}

/// Tarski evaluation of `A, R ⊨ φ`.
pub fn classical_eval(
    a: &Structure,
    r: &Relation,
    sentence: &RelSentence,
) -> Result<bool, ReductionError> {
    let mut env = Vec::new();
    eval_sentence(a, r, sentence, &mut env)
}

fn lookup(env: &[(&str, usize)], var: &str) -> Result<usize, ReductionError> {
    env.iter()
        .rev()
        .find(|(name, _)| *name == var)
        .map(|(_, value)| *value)
        .ok_or_else(|| ReductionError::FreeVariable(var.to_string()))
}

fn eval_sentence<'s>(
    a: &Structure,
    r: &Relation,
    sentence: &'s RelSentence,
    env: &mut Vec<(&'s str, usize)>,
) -> Result<bool, ReductionError> {
    match sentence {
        RelSentence::PAtom(x, y) => Ok(a.contains_tuple("P", &[lookup(env, x)?, lookup(env, y)?])?),
        RelSentence::NAtom(x, y) => Ok(a.contains_tuple("N", &[lookup(env, x)?, lookup(env, y)?])?),
        RelSentence::RAtom(x) => Ok(r.contains(&lookup(env, x)?)),
        RelSentence::EqAtom(x, y) => Ok(lookup(env, x)? == lookup(env, y)?),
        RelSentence::Not(inner) => Ok(!eval_sentence(a, r, inner, env)?),
        RelSentence::And(l, r2) => {
            Ok(eval_sentence(a, r, l, env)? && eval_sentence(a, r, r2, env)?)
        }
        RelSentence::Or(l, r2) => Ok(eval_sentence(a, r, l, env)? || eval_sentence(a, r, r2, env)?),
        RelSentence::Implies(l, r2) => {
            Ok(!eval_sentence(a, r, l, env)? || eval_sentence(a, r, r2, env)?)
        }
        RelSentence::Forall(v, body) => {
            for value in 0..a.universe_size() {
                env.push((v, value));
                let holds = eval_sentence(a, r, body, env)?;
                env.pop();
                if !holds {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        RelSentence::Exists(v, body) => {
            for value in 0..a.universe_size() {
                env.push((v, value));
                let holds = eval_sentence(a, r, body, env)?;
                env.pop();
                if holds {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelConstraint {
    /// Any relation.
    None,
    /// Nonempty relations only.
    NonEmpty,
    /// Nonempty relations of weight at most `k`.
    MaxWeight(usize),
}

impl RelConstraint {
    fn admits(&self, r: &Relation) -> bool {
        match self {
            RelConstraint::None => true,
            RelConstraint::NonEmpty => !r.is_empty(),
            RelConstraint::MaxWeight(k) => !r.is_empty() && r.len() <= *k,
        }
    }
}

pub const DEFAULT_RELATION_SCAN_CAP: u64 = 1 << 20;

/// All relations `R` over the universe (or over `pool` when given) meeting
/// the constraint with `A, R ⊨ φ`.
pub fn sat_rel_brute(
    a: &Structure,
    sentence: &RelSentence,
    constraint: RelConstraint,
    pool: Option<&[usize]>,
) -> Result<Vec<Relation>, ReductionError> {
    let full: Vec<usize>;
    let pool = match pool {
        Some(pool) => pool,
        None => {
            full = (0..a.universe_size()).collect();
            &full
        }
    };
    let candidates = 1u128 << pool.len().min(127);
    if pool.len() >= 127 || candidates > DEFAULT_RELATION_SCAN_CAP as u128 {
        return Err(ReductionError::CandidateCapExceeded {
            candidates,
            cap: DEFAULT_RELATION_SCAN_CAP,
        });
    }
    let mut solutions = Vec::new();
    for mask in 0u64..1 << pool.len() {
        let r: Relation = pool
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if constraint.admits(&r) && classical_eval(a, &r, sentence)? {
            solutions.push(r);
        }
    }
    solutions.sort();
    solutions.dedup();
    Ok(solutions)
}

/// Apex reduction: one fresh vertex adjacent to every old one. Independent
/// sets of size ≥ k in the input correspond to proper ones in the output.
pub fn is_to_is_star(g: &Graph, k: usize) -> (Graph, usize) {
    let apex = g.vertices;
    let edges: Vec<(usize, usize)> = g
        .edges()
        .chain((0..g.vertices).map(|v| (v, apex)))
        .collect();
    let augmented = Graph::new(g.vertices + 1, edges).expect("apex edges are valid");
    (augmented, k)
}

/// Positive-2CNF encoding of proper independent sets: one clause `x_i ∨ x_j`
/// per edge, weight bound `|V| - k` (saturating; a bound of zero admits no
/// nonempty assignment, matching an unsatisfiable size request).
pub fn is_star_to_mzdh(g: &Graph, k: usize) -> (PropCnf, usize) {
    let clauses: Vec<Vec<i64>> = g
        .edges()
        .map(|(u, v)| vec![u as i64 + 1, v as i64 + 1])
        .collect();
    let cnf = PropCnf::new(g.vertices, clauses).expect("edge clauses are valid");
    (cnf, g.vertices.saturating_sub(k))
}

/// Encodes a dual-Horn CNF as a relational instance: the structure, the fixed
/// myopic sentence, and the unchanged weight bound.
pub fn mzdh_to_rel(
    cnf: &PropCnf,
    k: usize,
) -> Result<(Structure, RelSentence, usize), ReductionError> {
    if let Some(clause) = cnf
        .clauses
        .iter()
        .position(|c| c.iter().filter(|&&l| l < 0).count() > 1)
    {
        return Err(ReductionError::NotDualHorn { clause });
    }
    Ok((encode_cnf(cnf)?, myopic_sentence(), k))
}

/// `rel(X)` for a single-variable team: the set of values the variable takes.
pub fn team_to_relation(team: &Team, var: &str) -> Result<Relation, ReductionError> {
    let pos = team.space().position(var)?;
    Ok(team.assignments().map(|s| s.values()[pos]).collect())
}

pub fn relation_to_team(a: &Structure, r: &Relation, var: &str) -> Result<Team, ReductionError> {
    let space = AssignmentSpace::new(a.universe_size(), [var.to_string()])?;
    let mut team = Team::empty(Arc::clone(&space));
    for &value in r {
        team.insert(space.index_of(&[value])?)?;
    }
    Ok(team)
}

/// Cross-checks a hand-written team-logic equivalent of a relational
/// sentence: for every team `X` over `var`, `A ⊨_X φ_team` must coincide with
/// `A, rel(X) ⊨ φ_rel`. Returns the first differing relation, if any.
pub fn check_team_equivalent(
    a: &Structure,
    rel_sentence: &RelSentence,
    team_formula: &Formula,
    var: &str,
) -> Result<Option<Relation>, ReductionError> {
    let candidates = 1u128 << a.universe_size().min(127);
    if a.universe_size() >= 127 || candidates > DEFAULT_RELATION_SCAN_CAP as u128 {
        return Err(ReductionError::CandidateCapExceeded {
            candidates,
            cap: DEFAULT_RELATION_SCAN_CAP,
        });
    }
    let cfg = EvalConfig::default();
    for mask in 0u64..1 << a.universe_size() {
        let r: Relation = (0..a.universe_size())
            .filter(|&e| mask >> e & 1 == 1)
            .collect();
        let team = relation_to_team(a, &r, var)?;
        let team_side = checker::satisfies(a, &team, team_formula, &cfg)?;
        let rel_side = classical_eval(a, &r, rel_sentence)?;
        if team_side != rel_side {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta(vals: &[usize]) -> Relation {
        vals.iter().copied().collect()
    }

    #[test]
    fn encode_cnf_example() {
        // x1 ∨ ¬x2: universe {x1, x2, C1}, P = {(C1,x1)}, N = {(C1,x2)}.
        let cnf = PropCnf::new(2, vec![vec![1, -2]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        assert_eq!(a.universe_size(), 3);
        assert_eq!(a.label(0), "x1");
        assert_eq!(a.label(2), "C1");
        assert!(a.contains_tuple("P", &[2, 0]).unwrap());
        assert!(a.contains_tuple("N", &[2, 1]).unwrap());
        assert_eq!(a.tuples("P").unwrap().len(), 1);
    }

    #[test]
    fn encode_cnf_rejects_empty() {
        let cnf = PropCnf::new(2, vec![]).unwrap();
        assert_eq!(encode_cnf(&cnf).unwrap_err(), ReductionError::EmptyCnf);
    }

    #[test]
    fn encode_cnf_contradictory_pair() {
        let cnf = PropCnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        assert!(a.contains_tuple("P", &[1, 0]).unwrap());
        assert!(a.contains_tuple("N", &[2, 0]).unwrap());
    }

    #[test]
    fn chi_examples() {
        let cnf = PropCnf::new(2, vec![vec![1, -2]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        let chi = chi_sentence();
        assert!(classical_eval(&a, &beta(&[0]), &chi).unwrap());
        assert!(classical_eval(&a, &beta(&[]), &chi).unwrap());
        // {x2} falsifies the only clause.
        assert!(!classical_eval(&a, &beta(&[1]), &chi).unwrap());
    }

    #[test]
    fn chi_matches_propositional_semantics_pointwise() {
        let cnfs = [
            PropCnf::new(2, vec![vec![1, -2]]).unwrap(),
            PropCnf::new(1, vec![vec![1], vec![-1]]).unwrap(),
            PropCnf::new(3, vec![vec![1, 2], vec![-1, 3], vec![-2, -3]]).unwrap(),
        ];
        let chi = chi_sentence();
        for cnf in &cnfs {
            let a = encode_cnf(cnf).unwrap();
            for mask in 0u64..1 << cnf.num_vars() {
                let b: Relation = (0..cnf.num_vars())
                    .filter(|&v| mask >> v & 1 == 1)
                    .collect();
                assert_eq!(
                    cnf.eval(&b),
                    classical_eval(&a, &b, &chi).unwrap(),
                    "cnf {cnf:?} beta {b:?}"
                );
            }
        }
    }

    #[test]
    fn sat_rel_brute_example() {
        let cnf = PropCnf::new(2, vec![vec![1, -2]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        let chi = chi_sentence();
        let vars = [0usize, 1];
        let all = sat_rel_brute(&a, &chi, RelConstraint::None, Some(&vars)).unwrap();
        assert_eq!(all.len(), 3);
        assert!(!all.contains(&beta(&[1])));
        let nonempty = sat_rel_brute(&a, &chi, RelConstraint::NonEmpty, Some(&vars)).unwrap();
        assert_eq!(nonempty.len(), 2);

        let unsat = PropCnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        let a = encode_cnf(&unsat).unwrap();
        let sols = sat_rel_brute(&a, &chi, RelConstraint::None, Some(&[0])).unwrap();
        assert!(sols.is_empty());
    }

    #[test]
    fn classical_eval_basics() {
        let cnf = PropCnf::new(1, vec![vec![1]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        let some_r = exists("x", rel("x"));
        assert!(!classical_eval(&a, &beta(&[]), &some_r).unwrap());
        assert!(classical_eval(&a, &beta(&[0]), &some_r).unwrap());
        let tautology = forall("x", RelSentence::EqAtom("x".into(), "x".into()));
        assert!(classical_eval(&a, &beta(&[]), &tautology).unwrap());
        let dangling = rel("x");
        assert!(matches!(
            classical_eval(&a, &beta(&[]), &dangling),
            Err(ReductionError::FreeVariable(_))
        ));
    }

    #[test]
    fn nonempty_lift_examples() {
        let cnf = PropCnf::new(1, vec![vec![1]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();

        // φ(∅) true makes the lift hold for every nonempty R.
        let no_r = forall("x", not(rel("x")));
        let lifted = nonempty_lift(&no_r);
        assert!(classical_eval(&a, &beta(&[0]), &lifted).unwrap());

        // φ(∅) false: the lift holds exactly where φ does.
        let all_r = forall("x", rel("x"));
        let lifted = nonempty_lift(&all_r);
        assert!(classical_eval(&a, &beta(&[0, 1, 2]), &lifted).unwrap());
        assert!(!classical_eval(&a, &beta(&[0]), &lifted).unwrap());
    }

    #[test]
    fn lift_existence_equivalence_small_universes() {
        let cnf = PropCnf::new(1, vec![vec![1]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        let sentences = [
            forall("x", not(rel("x"))),
            forall("x", rel("x")),
            exists("x", rel("x")),
            chi_sentence(),
            exists("x", and(rel("x"), exists("y", not(rel("y"))))),
        ];
        for sentence in &sentences {
            let plain = sat_rel_brute(&a, sentence, RelConstraint::None, None).unwrap();
            let lifted =
                sat_rel_brute(&a, &nonempty_lift(sentence), RelConstraint::NonEmpty, None).unwrap();
            assert_eq!(!plain.is_empty(), !lifted.is_empty(), "sentence {sentence}");
        }
    }

    #[test]
    fn is_to_is_star_examples() {
        let k3 = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let (aug, k) = is_to_is_star(&k3, 1);
        assert_eq!(k, 1);
        assert_eq!(aug.vertices(), 4);
        assert_eq!(aug.edges().count(), 6);

        let edgeless = Graph::new(2, []).unwrap();
        let (aug, k) = is_to_is_star(&edgeless, 2);
        assert_eq!(aug.edges().count(), 2);
        assert_eq!(aug.max_independent_set_size(), 2);
        assert!(k <= aug.max_independent_set_size());
    }

    #[test]
    fn is_star_to_mzdh_example() {
        let k3 = Graph::new(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let (cnf, bound) = is_star_to_mzdh(&k3, 1);
        assert_eq!(bound, 2);
        assert_eq!(cnf.clauses(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert!(cnf.is_dual_horn());
        // β = {x1, x2} (weight 2) satisfies; its complement {3} is independent.
        assert!(cnf.eval(&beta(&[0, 1])));
        assert!(!cnf.eval(&beta(&[0])));

        let edgeless = Graph::new(3, []).unwrap();
        let (cnf, bound) = is_star_to_mzdh(&edgeless, 1);
        assert!(cnf.clauses().is_empty());
        assert_eq!(bound, 2);
        assert!(cnf.eval(&beta(&[])));
    }

    #[test]
    fn mzdh_to_rel_rejects_non_dual_horn() {
        let cnf = PropCnf::new(2, vec![vec![-1, -2]]).unwrap();
        assert!(matches!(
            mzdh_to_rel(&cnf, 1),
            Err(ReductionError::NotDualHorn { clause: 0 })
        ));
    }

    #[test]
    fn myopic_matches_cnf_on_nonempty_assignments() {
        let cnf = PropCnf::new(2, vec![vec![1, 2]]).unwrap();
        let (a, phi, _) = mzdh_to_rel(&cnf, 1).unwrap();
        assert!(cnf.eval(&beta(&[0])));
        assert!(classical_eval(&a, &beta(&[0]), &phi).unwrap());
        // φ'(∅) is always true even where the CNF is false.
        assert!(!cnf.eval(&beta(&[])));
        assert!(classical_eval(&a, &beta(&[]), &phi).unwrap());
    }

    /// Every dual-Horn CNF with ≤ 3 variables and ≤ 3 clauses, every β ≠ ∅.
    #[test]
    fn myopic_equivalence_exhaustive_small_dual_horn() {
        let vars = 3usize;
        let mut clause_types: Vec<Vec<i64>> = Vec::new();
        for pos_mask in 0u8..8 {
            for neg in 0..=vars {
                let mut clause: Vec<i64> = (0..vars)
                    .filter(|&v| pos_mask >> v & 1 == 1)
                    .map(|v| v as i64 + 1)
                    .collect();
                if neg > 0 {
                    if pos_mask >> (neg - 1) & 1 == 1 {
                        continue; // variable cannot occur both ways here
                    }
                    clause.push(-(neg as i64));
                }
                if !clause.is_empty() {
                    clause_types.push(clause);
                }
            }
        }
        let mut checked = 0usize;
        let mut stack: Vec<Vec<usize>> = (0..clause_types.len()).map(|i| vec![i]).collect();
        while let Some(pick) = stack.pop() {
            if pick.len() < 3 {
                for next in pick.last().unwrap() + 1..clause_types.len() {
                    let mut bigger = pick.clone();
                    bigger.push(next);
                    stack.push(bigger);
                }
            }
            let clauses: Vec<Vec<i64>> = pick.iter().map(|&i| clause_types[i].clone()).collect();
            let cnf = PropCnf::new(vars, clauses).unwrap();
            let (a, phi, _) = mzdh_to_rel(&cnf, vars).unwrap();
            for mask in 1u64..1 << vars {
                let b: Relation = (0..vars).filter(|&v| mask >> v & 1 == 1).collect();
                assert_eq!(
                    cnf.eval(&b),
                    classical_eval(&a, &b, &phi).unwrap(),
                    "cnf {:?} beta {:?}",
                    cnf.clauses(),
                    b
                );
                checked += 1;
            }
        }
        assert!(
            checked > 5000,
            "exhaustive family unexpectedly small: {checked}"
        );
    }

    #[test]
    fn team_relation_conversions_and_hook() {
        // inc(x;x) is a team tautology; so is the relational tautology.
        let cnf = PropCnf::new(1, vec![vec![1]]).unwrap();
        let a = encode_cnf(&cnf).unwrap();
        let tautology = forall("v", RelSentence::EqAtom("v".into(), "v".into()));
        let team_side = Formula::parse("inc(x;x)", a.vocabulary()).unwrap();
        assert_eq!(
            check_team_equivalent(&a, &tautology, &team_side, "x").unwrap(),
            None
        );

        // R nonempty somewhere vs a falsum-flavoured mismatch is caught.
        let some_r = exists("v", rel("v"));
        let mismatch = Formula::parse("x != x", a.vocabulary()).unwrap();
        assert!(check_team_equivalent(&a, &some_r, &mismatch, "x")
            .unwrap()
            .is_some());

        let space = AssignmentSpace::new(3, ["x".to_string()]).unwrap();
        let team = Team::from_indices(Arc::clone(&space), [0, 2]).unwrap();
        assert_eq!(team_to_relation(&team, "x").unwrap(), beta(&[0, 2]));
    }
}
