use indexmap::IndexMap;

use super::{QueryError, Value};
use crate::interpretation::{
    divergence_of, non_symmetrical_body_pose, non_symmetrical_elements, non_symmetrical_objects,
    similarity_of, symmetrical_body_pose, symmetrical_elements, symmetrical_objects,
    symmetrical_objects_stats, symmetry_stats, Group, InterpretationModel, SubjectRef,
    SymmetryStats,
};
use crate::similarity::SimilarityScores;
use crate::symmetry::{BodyPart, Subject};

/// Produces the candidate tuples of a relation. `bound[i]` holds the value
/// of argument `i` when it is already ground; implementations may use it
/// to answer by lookup but every returned tuple is unified again by the
/// evaluator.
pub type PredicateFn = fn(&InterpretationModel, &[Option<&Value>]) -> Vec<Vec<Value>>;

#[derive(Clone)]
pub struct PredicateTable {
    entries: IndexMap<(String, usize), PredicateFn>,
}

impl std::fmt::Debug for PredicateTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.signatures()).finish()
    }
}

impl PredicateTable {
    pub fn empty() -> Self {
        Self {
            entries: IndexMap::new(),
        }
    }

    /// Element, body-pose and statistics predicates plus the `divergence`,
    /// `perceptual_similarity` and `semantic_similarity` accessors.
    pub fn standard() -> Self {
        let mut t = Self::empty();
        let builtin: [(&str, usize, PredicateFn); 13] = [
            ("symmetrical_element", 1, |m, _| {
                one_column(symmetrical_elements(m))
            }),
            ("non_symmetrical_element", 1, |m, _| {
                one_column(non_symmetrical_elements(m))
            }),
            ("symmetrical_objects", 1, |m, _| {
                one_column(symmetrical_objects(m))
            }),
            ("non_symmetrical_objects", 1, |m, _| {
                one_column(non_symmetrical_objects(m))
            }),
            ("symmetrical_body_pose", 2, |m, _| {
                pose_rows(symmetrical_body_pose(m))
            }),
            ("non_symmetrical_body_pose", 2, |m, _| {
                pose_rows(non_symmetrical_body_pose(m))
            }),
            ("symmetry_stats", 4, |m, _| {
                vec![stats_row(&symmetry_stats(m))]
            }),
            ("symmetrical_objects_stats", 4, |m, _| {
                vec![stats_row(&symmetrical_objects_stats(m))]
            }),
            ("divergence", 2, divergence_rows),
            ("perceptual_similarity", 2, |m, b| {
                similarity_rows2(m, b, |s| s.perceptual)
            }),
            ("perceptual_similarity", 3, |m, b| {
                similarity_rows3(m, b, |s| s.perceptual)
            }),
            ("semantic_similarity", 2, |m, b| {
                similarity_rows2(m, b, |s| s.semantic)
            }),
            ("semantic_similarity", 3, |m, b| {
                similarity_rows3(m, b, |s| s.semantic)
            }),
        ];
        for (name, arity, f) in builtin {
            t.register(name, arity, f)
                .expect("builtin names are distinct");
        }
        t
    }

    /// Adds a predicate. A name/arity that is already present is rejected
    /// and the existing entry kept.
    pub fn register(&mut self, name: &str, arity: usize, f: PredicateFn) -> Result<(), QueryError> {
        let key = (name.to_string(), arity);
        if self.entries.contains_key(&key) {
            return Err(QueryError::Duplicate {
                name: name.into(),
                arity,
            });
        }
        self.entries.insert(key, f);
        Ok(())
    }

    pub fn get(&self, name: &str, arity: usize) -> Option<PredicateFn> {
        self.entries.get(&(name.to_string(), arity)).copied()
    }

    pub fn arities(&self, name: &str) -> Vec<usize> {
        self.entries
            .keys()
            .filter(|(n, _)| n == name)
            .map(|(_, a)| *a)
            .collect()
    }

    /// `name/arity` strings in registration order.
    pub fn signatures(&self) -> Vec<String> {
        self.entries
            .keys()
            .map(|(n, a)| format!("{n}/{a}"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn one_column(groups: Vec<Group>) -> Vec<Vec<Value>> {
    groups.iter().map(|g| vec![Value::ids(g)]).collect()
}

fn subject_value(s: &Subject) -> Value {
    Value::ids(&s.ids())
}

fn pose_rows(rows: Vec<(Subject, Vec<BodyPart>)>) -> Vec<Vec<Value>> {
    rows.iter()
        .map(|(s, parts)| {
            vec![
                subject_value(s),
                Value::List(parts.iter().map(|p| Value::atom(p.as_str())).collect()),
            ]
        })
        .collect()
}

fn optional(x: Option<f64>) -> Value {
    x.map(Value::Num).unwrap_or_else(|| Value::atom("none"))
}

fn stats_row(s: &SymmetryStats) -> Vec<Value> {
    vec![
        Value::Int(s.num_elements as i64),
        Value::Int(s.num_symmetric as i64),
        optional(s.mean_divergence),
        optional(s.mean_similarity),
    ]
}

/// An atom names an element; a one- or two-item list names a group.
fn subject_of(v: &Value) -> Option<SubjectRef> {
    match v {
        Value::List(items) => match items.as_slice() {
            [a] => Some(SubjectRef::Element(a.as_text()?.to_string())),
            [a, b] => Some(SubjectRef::Pair(
                a.as_text()?.to_string(),
                b.as_text()?.to_string(),
            )),
            _ => None,
        },
        other => Some(SubjectRef::Element(other.as_text()?.to_string())),
    }
}

fn all_groups(m: &InterpretationModel) -> impl Iterator<Item = Group> + '_ {
    m.pairs
        .iter()
        .map(|p| vec![p.left_id.clone(), p.right_id.clone()])
        .chain(m.singles.iter().map(|s| vec![s.element_id.clone()]))
}

fn divergence_rows(m: &InterpretationModel, bound: &[Option<&Value>]) -> Vec<Vec<Value>> {
    if let Some(v) = bound[0] {
        return subject_of(v)
            .and_then(|s| divergence_of(m, &s).ok())
            .map(|d| vec![vec![v.clone(), Value::Num(d.mean)]])
            .unwrap_or_default();
    }
    all_groups(m)
        .filter_map(|g| {
            let d = divergence_of(m, &subject_of(&Value::ids(&g))?).ok()?;
            Some(vec![Value::ids(&g), Value::Num(d.mean)])
        })
        .collect()
}

fn similarity_rows2(
    m: &InterpretationModel,
    bound: &[Option<&Value>],
    pick: fn(&SimilarityScores) -> Option<f64>,
) -> Vec<Vec<Value>> {
    if let Some(v) = bound[0] {
        return subject_of(v)
            .and_then(|s| similarity_of(m, &s).ok())
            .and_then(|s| pick(&s))
            .map(|x| vec![vec![v.clone(), Value::Num(x)]])
            .unwrap_or_default();
    }
    m.pairs
        .iter()
        .filter_map(|p| {
            let s =
                similarity_of(m, &SubjectRef::Pair(p.left_id.clone(), p.right_id.clone())).ok()?;
            Some(vec![Value::ids(&p.ids()), Value::Num(pick(&s)?)])
        })
        .collect()
}

fn similarity_rows3(
    m: &InterpretationModel,
    bound: &[Option<&Value>],
    pick: fn(&SimilarityScores) -> Option<f64>,
) -> Vec<Vec<Value>> {
    if let (Some(a), Some(b)) = (bound[0], bound[1]) {
        let (Some(x), Some(y)) = (a.as_text(), b.as_text()) else {
            return Vec::new();
        };
        return similarity_of(m, &SubjectRef::Pair(x.into(), y.into()))
            .ok()
            .and_then(|s| pick(&s))
            .map(|s| vec![vec![a.clone(), b.clone(), Value::Num(s)]])
            .unwrap_or_default();
    }
    m.pairs
        .iter()
        .filter_map(|p| {
            let s = pick(
                &similarity_of(m, &SubjectRef::Pair(p.left_id.clone(), p.right_id.clone())).ok()?,
            )?;
            Some(vec![
                Value::atom(&p.left_id),
                Value::atom(&p.right_id),
                Value::Num(s),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_table_contents() {
        let t = PredicateTable::standard();
        assert_eq!(
            t.signatures(),
            vec![
                "symmetrical_element/1",
                "non_symmetrical_element/1",
                "symmetrical_objects/1",
                "non_symmetrical_objects/1",
                "symmetrical_body_pose/2",
                "non_symmetrical_body_pose/2",
                "symmetry_stats/4",
                "symmetrical_objects_stats/4",
                "divergence/2",
                "perceptual_similarity/2",
                "perceptual_similarity/3",
                "semantic_similarity/2",
                "semantic_similarity/3",
            ]
        );
        assert!(t.get("frobnicate", 1).is_none());
        assert_eq!(t.arities("semantic_similarity"), vec![2, 3]);
    }

    #[test]
    fn duplicate_registration_keeps_first() {
        let mut t = PredicateTable::standard();
        let replacement: PredicateFn = |_, _| vec![vec![Value::Int(99)]];
        let err = t
            .register("symmetrical_element", 1, replacement)
            .unwrap_err();
        assert!(matches!(err, QueryError::Duplicate { .. }));
        assert_eq!(t.len(), 13);
        assert_ne!(
            t.get("symmetrical_element", 1).unwrap() as usize,
            replacement as usize
        );
    }

    #[test]
    fn subject_forms() {
        assert_eq!(
            subject_of(&Value::atom("a")),
            Some(SubjectRef::Element("a".into()))
        );
        assert_eq!(
            subject_of(&Value::ids(&["a", "b"])),
            Some(SubjectRef::Pair("a".into(), "b".into()))
        );
        assert_eq!(subject_of(&Value::Int(3)), None);
        assert_eq!(subject_of(&Value::ids(&["a", "b", "c"])), None);
    }
}
