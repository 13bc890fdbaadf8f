//! Single-parent is-a hierarchy over class labels and Wu-Palmer similarity.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Mini-taxonomy shipped with the engine, covering common detector classes.
pub const BUNDLED_TAXONOMY: &str = include_str!("../../data/taxonomy.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("cannot read taxonomy file: {0}")]
    Io(String),
    #[error("taxonomy line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("label `{0}` has more than one parent")]
    MultipleParents(String),
    #[error("label `{0}` is not reachable from the root")]
    Unreachable(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

/// Rooted tree stored as parent links; depth of the root is 1.
#[derive(Clone)]
pub struct TaxonomyGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    parent: Vec<Option<usize>>,
    depth: Vec<u32>,
}

impl fmt::Debug for TaxonomyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TaxonomyGraph")
            .field("root", &self.root())
            .field("nodes", &self.labels.len())
            .finish()
    }
}

impl TaxonomyGraph {
    /// Builds a tree from `(child, parent)` edges. Every label other than
    /// the root must appear exactly once as a child.
    pub fn from_edges<S: AsRef<str>>(root: &str, edges: &[(S, S)]) -> Result<Self, TaxonomyError> {
        let mut labels = vec![root.to_string()];
        let mut index = HashMap::from([(root.to_string(), 0usize)]);
        let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(label) {
                return i;
            }
            labels.push(label.to_string());
            index.insert(label.to_string(), labels.len() - 1);
            labels.len() - 1
        };

        let mut parent_of: Vec<Option<usize>> = vec![None];
        for (child, parent) in edges {
            let c = intern(child.as_ref(), &mut labels);
            let p = intern(parent.as_ref(), &mut labels);
            parent_of.resize(labels.len(), None);
            if c == 0 || parent_of[c].is_some() {
                return Err(TaxonomyError::MultipleParents(child.as_ref().to_string()));
            }
            parent_of[c] = Some(p);
        }
        parent_of.resize(labels.len(), None);
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();

        // Depths by walking to the root; a walk longer than the node count is a cycle.
        let n = labels.len();
        let mut depth = vec![0u32; n];
        depth[0] = 1;
        for start in 1..n {
            let mut path = Vec::new();
            let mut cur = start;
            while depth[cur] == 0 {
                path.push(cur);
                if path.len() > n {
                    return Err(TaxonomyError::Unreachable(labels[start].clone()));
                }
                match parent_of[cur] {
                    Some(p) => cur = p,
                    None => return Err(TaxonomyError::Unreachable(labels[cur].clone())),
                }
            }
            let mut d = depth[cur];
            for &node in path.iter().rev() {
                d += 1;
                depth[node] = d;
            }
        }

        Ok(Self {
            labels,
            index,
            parent: parent_of,
            depth,
        })
    }

    /// Parses the tab-separated format: line 1 holds the root label, every
    /// further non-empty line is `child<TAB>parent`.
    pub fn parse(text: &str) -> Result<Self, TaxonomyError> {
        let mut lines = text.lines().enumerate();
        let root = match lines.next() {
            Some((_, l)) if !l.trim().is_empty() && !l.contains('\t') => l.trim().to_string(),
            _ => {
                return Err(TaxonomyError::Format {
                    line: 1,
                    message: "line 1 must declare the root label".into(),
                })
            }
        };
        let mut edges = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(c), Some(p), None) if !c.trim().is_empty() && !p.trim().is_empty() => {
                    edges.push((c.trim().to_string(), p.trim().to_string()))
                }
                _ => {
                    return Err(TaxonomyError::Format {
                        line: i + 1,
                        message: "expected `child<TAB>parent`".into(),
                    })
                }
            }
        }
        Self::from_edges(&root, &edges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TaxonomyError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TaxonomyError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TAXONOMY).expect("bundled taxonomy is well-formed")
    }

    pub fn root(&self) -> &str {
        &self.labels[0]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn parent(&self, label: &str) -> Option<&str> {
        let i = *self.index.get(label)?;
        self.parent[i].map(|p| self.labels[p].as_str())
    }

    pub fn depth(&self, label: &str) -> Result<u32, TaxonomyError> {
        Ok(self.depth[self.id(label)?])
    }

    fn id(&self, label: &str) -> Result<usize, TaxonomyError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| TaxonomyError::UnknownLabel(label.to_string()))
    }

    /// Lowest common subsumer of two labels.
    pub fn lcs(&self, a: &str, b: &str) -> Result<&str, TaxonomyError> {
        let (mut x, mut y) = (self.id(a)?, self.id(b)?);
        while self.depth[x] > self.depth[y] {
            x = self.parent[x].expect("non-root has a parent");
        }
        while self.depth[y] > self.depth[x] {
            y = self.parent[y].expect("non-root has a parent");
        }
        while x != y {
            x = self.parent[x].expect("non-root has a parent");
            y = self.parent[y].expect("non-root has a parent");
        }
        Ok(&self.labels[x])
    }
}

/// `2·depth(lcs) / (depth(a) + depth(b))`, in `(0, 1]`.
pub fn wup_similarity(a: &str, b: &str, t: &TaxonomyGraph) -> Result<f64, TaxonomyError> {
    let lcs = t.lcs(a, b)?;
    let (da, db, dl) = (t.depth(a)?, t.depth(b)?, t.depth(lcs)?);
    Ok(2.0 * dl as f64 / (da + db) as f64)
}
