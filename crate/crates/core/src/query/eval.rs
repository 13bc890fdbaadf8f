use indexmap::IndexMap;

use super::{PredicateTable, QueryAst, Term, Value};
use crate::interpretation::InterpretationModel;

pub const SOLUTION_CAP: usize = 10_000;

/// Variable name to value, in order of first appearance in the query.
pub type Binding = IndexMap<String, Value>;

struct Frame {
    rows: Vec<Vec<Value>>,
    next: usize,
    binding: Binding,
}

/// Lazily enumerated solutions. Stops after `cap` solutions and records
/// whether more were available.
pub struct Solutions<'a> {
    query: &'a QueryAst,
    model: &'a InterpretationModel,
    table: &'a PredicateTable,
    stack: Vec<Frame>,
    started: bool,
    produced: usize,
    cap: usize,
    truncated: bool,
}

impl<'a> Solutions<'a> {
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn frame(&self, depth: usize, binding: Binding) -> Frame {
        let c = &self.query.conjuncts[depth];
        let bound: Vec<Option<&Value>> = c
            .args
            .iter()
            .map(|t| match t {
                Term::Constant(v) => Some(v),
                Term::Variable(name) => binding.get(name),
                Term::Wildcard => None,
            })
            .collect();
        let rows = match self.table.get(&c.name, c.args.len()) {
            Some(f) => f(self.model, &bound),
            None => Vec::new(),
        };
        Frame {
            rows,
            next: 0,
            binding,
        }
    }

    fn unify(args: &[Term], row: &[Value], binding: &Binding) -> Option<Binding> {
        if args.len() != row.len() {
            return None;
        }
        let mut b = binding.clone();
        for (t, v) in args.iter().zip(row) {
            match t {
                Term::Wildcard => {}
                Term::Constant(c) if c.unifies(v) => {}
                Term::Constant(_) => return None,
                Term::Variable(name) => match b.get(name) {
                    Some(existing) if existing.unifies(v) => {}
                    Some(_) => return None,
                    None => {
                        b.insert(name.clone(), v.clone());
                    }
                },
            }
        }
        Some(b)
    }

    /// Reorders a complete binding to the query's variable order.
    fn ordered(&self, b: Binding) -> Binding {
        self.query
            .variables()
            .into_iter()
            .filter_map(|v| b.get(v).map(|x| (v.to_string(), x.clone())))
            .collect()
    }
}

impl Iterator for Solutions<'_> {
    type Item = Binding;

    fn next(&mut self) -> Option<Binding> {
        if self.produced >= self.cap {
            if !self.truncated && self.peek_more() {
                self.truncated = true;
            }
            return None;
        }
        let found = self.advance()?;
        self.produced += 1;
        Some(self.ordered(found))
    }
}

impl Solutions<'_> {
    fn advance(&mut self) -> Option<Binding> {
        if !self.started {
            self.started = true;
            let f = self.frame(0, Binding::new());
            self.stack.push(f);
        }
        let depth_max = self.query.conjuncts.len();
        while !self.stack.is_empty() {
            let depth = self.stack.len() - 1;
            let top = &mut self.stack[depth];
            if top.next >= top.rows.len() {
                self.stack.pop();
                continue;
            }
            let row = &top.rows[top.next];
            top.next += 1;
            let Some(b) = Self::unify(&self.query.conjuncts[depth].args, row, &top.binding) else {
                continue;
            };
            if depth + 1 == depth_max {
                return Some(b);
            }
            let f = self.frame(depth + 1, b);
            self.stack.push(f);
        }
        None
    }

    fn peek_more(&mut self) -> bool {
        self.advance().is_some()
    }
}

pub fn solve<'a>(
    query: &'a QueryAst,
    model: &'a InterpretationModel,
    table: &'a PredicateTable,
) -> Solutions<'a> {
    Solutions {
        query,
        model,
        table,
        stack: Vec::new(),
        started: false,
        produced: 0,
        cap: SOLUTION_CAP,
        truncated: false,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    pub bindings: Vec<Binding>,
    pub truncated: bool,
}

impl QueryResult {
    /// One line per solution (`Var = value, ...`, or `true` for a ground
    /// query) and a count footer.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for b in &self.bindings {
            if b.is_empty() {
                out.push_str("true\n");
            } else {
                let parts: Vec<String> = b
                    .iter()
                    .map(|(k, v)| format!("{k} = {}", v.display()))
                    .collect();
                out.push_str(&parts.join(", "));
                out.push('\n');
            }
        }
        let n = self.bindings.len();
        out.push_str(&format!(
            "% {n} solution{}{}\n",
            if n == 1 { "" } else { "s" },
            if self.truncated { " (truncated)" } else { "" }
        ));
        out
    }
}

/// Materialises every solution up to the cap.
pub fn evaluate(query: &QueryAst, model: &InterpretationModel) -> QueryResult {
    let table = PredicateTable::standard();
    let mut sols = solve(query, model, &table);
    let bindings: Vec<Binding> = sols.by_ref().collect();
    QueryResult {
        bindings,
        truncated: sols.truncated(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpretation::tests::perfect_scene;
    use crate::interpretation::{
        build_model, divergence_of, symmetrical_elements, symmetrical_objects, SubjectRef,
    };
    use crate::query::{parse_query, parse_query_with, PredicateFn};
    use crate::similarity::TaxonomyGraph;
    use crate::symmetry::SymmetryConfig;

    fn model() -> InterpretationModel {
        build_model(
            &perfect_scene(),
            &SymmetryConfig::default(),
            &TaxonomyGraph::bundled(),
        )
        .unwrap()
    }

    fn run(q: &str, m: &InterpretationModel) -> QueryResult {
        evaluate(&parse_query(q).unwrap(), m)
    }

    #[test]
    fn symmetrical_element_lists_each_group() {
        let m = model();
        let r = run("symmetrical_element(E)", &m);
        let es: Vec<String> = r.bindings.iter().map(|b| b["E"].display()).collect();
        assert_eq!(es, vec!["[a, a_m]", "[b, b_m]", "[bench]"]);
        assert_eq!(r.bindings.len(), symmetrical_elements(&m).len());
    }

    #[test]
    fn stats_with_wildcards() {
        let r = run("symmetry_stats(NP, _, _, _)", &model());
        assert_eq!(r.bindings.len(), 1);
        assert_eq!(r.bindings[0]["NP"], Value::Int(4));
        assert_eq!(r.bindings[0].len(), 1);
    }

    #[test]
    fn no_solutions() {
        let r = run("non_symmetrical_objects(X)", &model());
        assert!(r.bindings.is_empty());
        assert_eq!(r.render(), "% 0 solutions\n");
    }

    #[test]
    fn join_on_shared_variable() {
        let m = model();
        let r = run("symmetrical_objects(SO), divergence(SO, D)", &m);
        assert_eq!(r.bindings.len(), symmetrical_objects(&m).len());
        assert_eq!(r.render(), "SO = [bench], D = 0.0000\n% 1 solution\n");
    }

    #[test]
    fn constants_filter() {
        let m = model();
        assert_eq!(run("divergence(a, 0)", &m).bindings.len(), 1);
        assert_eq!(run("divergence(a, 0.5)", &m).bindings.len(), 0);
        assert_eq!(run("perceptual_similarity(a, R, S)", &m).bindings.len(), 1);
        assert_eq!(
            run("semantic_similarity([a, a_m], 1)", &m).render(),
            "true\n% 1 solution\n"
        );
        assert_eq!(run("divergence(zzz, D)", &m).bindings.len(), 0);
        assert_eq!(run("divergence(7, D)", &m).bindings.len(), 0);
    }

    #[test]
    fn repeated_variable_must_agree() {
        let m = model();
        assert_eq!(run("perceptual_similarity(X, X, S)", &m).bindings.len(), 0);
    }

    #[test]
    fn conjunct_order_does_not_change_solution_set() {
        let m = model();
        let mut a: Vec<String> = run("symmetrical_element(E), divergence(E, D)", &m)
            .bindings
            .iter()
            .map(|b| format!("{}{}", b["E"], b["D"]))
            .collect();
        let mut b: Vec<String> = run("divergence(E, D), symmetrical_element(E)", &m)
            .bindings
            .iter()
            .map(|b| format!("{}{}", b["E"], b["D"]))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn solutions_replay_against_api() {
        let m = model();
        for b in run("symmetrical_element(E), divergence(E, D)", &m).bindings {
            let Value::List(ids) = &b["E"] else { panic!() };
            let subject = match ids.as_slice() {
                [x] => SubjectRef::Element(x.as_text().unwrap().into()),
                [x, y] => {
                    SubjectRef::Pair(x.as_text().unwrap().into(), y.as_text().unwrap().into())
                }
                _ => panic!(),
            };
            assert_eq!(
                Value::Num(divergence_of(&m, &subject).unwrap().mean),
                b["D"]
            );
        }
    }

    #[test]
    fn cap_truncates() {
        let mut table = PredicateTable::standard();
        let many: PredicateFn = |_, _| (0..150).map(|i| vec![Value::Int(i)]).collect();
        table.register("n", 1, many).unwrap();
        let q = parse_query_with("n(A), n(B)", &table).unwrap();
        let m = model();
        let mut sols = solve(&q, &m, &table);
        assert_eq!(sols.by_ref().count(), SOLUTION_CAP);
        assert!(sols.truncated());

        let q = parse_query_with("n(A)", &table).unwrap();
        let mut sols = solve(&q, &m, &table);
        assert_eq!(sols.by_ref().count(), 150);
        assert!(!sols.truncated());
    }
}
