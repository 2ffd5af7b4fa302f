//! Model checking and satisfying-team enumeration for first-order team
//! logics with dependence, inclusion and independence atoms.
//!
//! Formulas are evaluated against teams (finite sets of assignments) over a
//! finite relational structure, under lax team semantics. On top of the
//! checker sit enumeration engines producing all, subset-maximal,
//! subset-minimal, cardinality-maximum or cardinality-minimum satisfying
//! teams: a polynomial-delay pair of algorithms for the inclusion fragment
//! built on the maximal-subteam operator, and oracle-guided flashlight
//! searches for the full language. Brute-force reference solvers, delay
//! instrumentation and SAT-style reduction generators round out the toolkit.

pub mod checker;
pub mod corpus;
pub mod enumerate;
pub mod formula;
pub mod io;
pub mod maxsub;
pub mod oracles;
pub mod reductions;
pub mod reference;
pub mod structure;
pub mod team;

pub use checker::{eval_atom, satisfies, ver_team, CheckError, EvalConfig};
pub use enumerate::{DelayStats, Direction, Engine, EnumError, Mode, SolutionStream};
pub use formula::{AtomSet, Formula, FragmentInfo, ParseError};
pub use maxsub::{max_subteam, max_subteam_brute, MaxsubError};
pub use oracles::{BruteOracles, OracleConfig, OracleCounts, OracleError, TeamOracles};
pub use structure::{RelDecl, Structure, StructureError, Vocabulary};
pub use team::{
    extend_all, extend_fn, full_team, lex_compare, Assignment, AssignmentSpace, Team, TeamError,
};
