//! Finite relational structures: a vocabulary of relation symbols and an
//! interpretation over a universe `{0, .., n-1}`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("universe must be nonempty")]
    EmptyUniverse,
    #[error("relation `{0}` declared twice")]
    DuplicateRelation(String),
    #[error("relation `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("relation `{name}` expects arity {arity}, got tuple of length {len}")]
    TupleArity {
        name: String,
        arity: usize,
        len: usize,
    },
    #[error("tuple entry {value} out of range for universe of size {universe}")]
    ElementOutOfRange { value: usize, universe: usize },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("label table has {len} entries for universe of size {universe}")]
    LabelCount { len: usize, universe: usize },
}

/// A relation symbol with its arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelDecl {
    pub name: String,
    pub arity: usize,
}

/// Finite set of relation symbols with arities. Names are unique, arities >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    relations: Vec<RelDecl>,
}

impl Vocabulary {
    pub fn new(relations: Vec<RelDecl>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for decl in &relations {
            if decl.arity == 0 {
                return Err(StructureError::ZeroArity(decl.name.clone()));
            }
            if !seen.insert(decl.name.clone()) {
                return Err(StructureError::DuplicateRelation(decl.name.clone()));
            }
        }
        Ok(Vocabulary { relations })
    }

    pub fn empty() -> Self {
        Vocabulary::default()
    }

    pub fn relations(&self) -> &[RelDecl] {
        &self.relations
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|d| d.name == name)
            .map(|d| d.arity)
    }

    fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|d| d.name == name)
    }
}

/// A finite structure: universe `{0, .., n-1}` plus one interpretation per
/// relation symbol. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    universe: usize,
    vocabulary: Vocabulary,
    interps: Vec<BTreeSet<Vec<usize>>>,
    labels: Option<Vec<String>>,
}

impl Structure {
    /// Builds a structure from `(name, arity, tuples)` triples. The vocabulary
    /// is exactly the listed relations.
    pub fn new(
        universe: usize,
        relations: Vec<(String, usize, Vec<Vec<usize>>)>,
    ) -> Result<Self, StructureError> {
        if universe == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let decls = relations
            .iter()
            .map(|(name, arity, _)| RelDecl {
                name: name.clone(),
                arity: *arity,
            })
            .collect();
        let vocabulary = Vocabulary::new(decls)?;
        let mut interps = Vec::with_capacity(relations.len());
        for (name, arity, tuples) in relations {
            let mut set = BTreeSet::new();
            for tuple in tuples {
                if tuple.len() != arity {
                    return Err(StructureError::TupleArity {
                        name,
                        arity,
                        len: tuple.len(),
                    });
                }
                if let Some(&value) = tuple.iter().find(|&&v| v >= universe) {
                    return Err(StructureError::ElementOutOfRange { value, universe });
                }
                set.insert(tuple);
            }
            interps.push(set);
        }
        Ok(Structure {
            universe,
            vocabulary,
            interps,
            labels: None,
        })
    }

    /// Attaches human-readable names for universe elements (one per element).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, StructureError> {
        if labels.len() != self.universe {
            return Err(StructureError::LabelCount {
                len: labels.len(),
                universe: self.universe,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, element: usize) -> String {
        match &self.labels {
            Some(labels) if element < labels.len() => labels[element].clone(),
            _ => element.to_string(),
        }
    }

    pub fn tuples(&self, name: &str) -> Result<&BTreeSet<Vec<usize>>, StructureError> {
        let idx = self
            .vocabulary
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownRelation(name.to_string()))?;
        Ok(&self.interps[idx])
    }

    pub fn contains_tuple(&self, name: &str, tuple: &[usize]) -> Result<bool, StructureError> {
        Ok(self.tuples(name)?.contains(tuple))
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe {}", self.universe)?;
        for decl in self.vocabulary.relations() {
            writeln!(f, "rel {}/{}", decl.name, decl.arity)?;
            for tuple in self.tuples(&decl.name).expect("declared relation") {
                let row: Vec<String> = tuple.iter().map(|v| v.to_string()).collect();
                writeln!(f, "{}", row.join(" "))?;
            }
            writeln!(f, ".")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_universe() {
        assert_eq!(
            Structure::new(0, vec![]).unwrap_err(),
            StructureError::EmptyUniverse
        );
    }

    #[test]
    fn rejects_duplicate_relation() {
        let err =
            Structure::new(2, vec![("R".into(), 2, vec![]), ("R".into(), 1, vec![])]).unwrap_err();
        assert_eq!(err, StructureError::DuplicateRelation("R".into()));
    }

    #[test]
    fn rejects_out_of_range_tuple() {
        let err = Structure::new(2, vec![("R".into(), 2, vec![vec![0, 2]])]).unwrap_err();
        assert_eq!(
            err,
            StructureError::ElementOutOfRange {
                value: 2,
                universe: 2
            }
        );
    }

    #[test]
    fn rejects_arity_mismatch() {
        let err = Structure::new(2, vec![("R".into(), 2, vec![vec![0]])]).unwrap_err();
        assert!(matches!(err, StructureError::TupleArity { .. }));
    }

    #[test]
    fn tuple_lookup() {
        let a = Structure::new(2, vec![("R".into(), 2, vec![vec![0, 1], vec![1, 0]])]).unwrap();
        assert!(a.contains_tuple("R", &[0, 1]).unwrap());
        assert!(!a.contains_tuple("R", &[1, 1]).unwrap());
        assert!(a.contains_tuple("S", &[0]).is_err());
    }
}
