//! Finite rooted directed trees with labelled vertices.
//!
//! Every vertex except the root has exactly one parent; child lists keep
//! insertion order, which fixes a deterministic basis enumeration for the
//! matrix oracle and deterministic witness reporting everywhere else.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

/// Handle to a vertex of a [`DirectedTree`]. Indices are assigned in
/// first-mention order starting from the root at 0 and are only meaningful
/// for the tree that produced them.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(pub(crate) u32);

impl Vertex {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("vertex {0:?} has more than one parent")]
    MultipleParents(String),
    #[error("the root {0:?} may not appear as a child")]
    RootAsChild(String),
    #[error("vertex {0:?} is not reachable from the root (orphan or cycle)")]
    Unreachable(String),
    #[error("unknown vertex id {0:?}")]
    UnknownVertex(String),
    #[error("edge from {0:?} to itself")]
    SelfLoop(String),
}

/// A finite rooted tree with edges directed away from the root.
#[derive(Clone, Debug)]
pub struct DirectedTree {
    labels: Vec<String>,
    index: BTreeMap<String, Vertex>,
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    depth: Vec<u32>,
}

impl DirectedTree {
    /// A one-vertex tree; grow it with [`DirectedTree::add_child`].
    pub fn new(root_label: impl Into<String>) -> Self {
        let label = root_label.into();
        let mut index = BTreeMap::new();
        index.insert(label.clone(), Vertex(0));
        DirectedTree {
            labels: vec![label],
            index,
            parent: vec![None],
            children: vec![Vec::new()],
            depth: vec![0],
        }
    }

    /// Appends a new leaf under `parent`.
    pub fn add_child(
        &mut self,
        parent: Vertex,
        label: impl Into<String>,
    ) -> Result<Vertex, TreeError> {
        let label = label.into();
        if self.index.contains_key(&label) {
            return Err(TreeError::DuplicateVertex(label));
        }
        let v = Vertex(self.labels.len() as u32);
        self.index.insert(label.clone(), v);
        self.labels.push(label);
        self.parent.push(Some(parent));
        self.children.push(Vec::new());
        self.depth.push(self.depth[parent.index()] + 1);
        self.children[parent.index()].push(v);
        Ok(v)
    }

    /// Builds a tree from an edge list in arbitrary order. Vertices are
    /// created on first mention; the result is validated to be a single tree
    /// rooted at `root_label`.
    pub fn from_edges<S: AsRef<str>>(
        root_label: &str,
        edges: &[(S, S)],
    ) -> Result<Self, TreeError> {
        let mut labels: Vec<String> = vec![root_label.to_string()];
        let mut index: BTreeMap<String, u32> = BTreeMap::new();
        index.insert(root_label.to_string(), 0);
        let mut intern = |name: &str, labels: &mut Vec<String>| -> u32 {
            if let Some(&i) = index.get(name) {
                return i;
            }
            let i = labels.len() as u32;
            index.insert(name.to_string(), i);
            labels.push(name.to_string());
            i
        };

        let mut parent: Vec<Option<u32>> = vec![None];
        let mut children: Vec<Vec<u32>> = vec![Vec::new()];
        for (p, c) in edges {
            let (p, c) = (p.as_ref(), c.as_ref());
            if p == c {
                return Err(TreeError::SelfLoop(p.to_string()));
            }
            let pi = intern(p, &mut labels);
            let ci = intern(c, &mut labels);
            while parent.len() < labels.len() {
                parent.push(None);
                children.push(Vec::new());
            }
            if ci == 0 {
                return Err(TreeError::RootAsChild(c.to_string()));
            }
            if parent[ci as usize].is_some() {
                return Err(TreeError::MultipleParents(c.to_string()));
            }
            parent[ci as usize] = Some(pi);
            children[pi as usize].push(ci);
        }

        // Reachability from the root covers both orphans and cycles.
        let mut depth = vec![u32::MAX; labels.len()];
        depth[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        while let Some(u) = queue.pop_front() {
            for &c in &children[u as usize] {
                depth[c as usize] = depth[u as usize] + 1;
                queue.push_back(c);
            }
        }
        if let Some(i) = depth.iter().position(|&d| d == u32::MAX) {
            return Err(TreeError::Unreachable(labels[i].clone()));
        }

        Ok(DirectedTree {
            index: index
                .into_iter()
                .map(|(k, v)| (k, Vertex(v)))
                .collect(),
            labels,
            parent: parent.into_iter().map(|p| p.map(Vertex)).collect(),
            children: children
                .into_iter()
                .map(|cs| cs.into_iter().map(Vertex).collect())
                .collect(),
            depth,
        })
    }

    pub fn root(&self) -> Vertex {
        Vertex(0)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Vertices in index order (root first, then first-mention order).
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.labels.len() as u32).map(Vertex)
    }

    pub fn label(&self, v: Vertex) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex(&self, label: &str) -> Option<Vertex> {
        self.index.get(label).copied()
    }

    /// Label lookup that reports unknown ids as a domain error.
    pub fn require_vertex(&self, label: &str) -> Result<Vertex, TreeError> {
        self.vertex(label)
            .ok_or_else(|| TreeError::UnknownVertex(label.to_string()))
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v.index()]
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v.index()]
    }

    pub fn is_leaf(&self, v: Vertex) -> bool {
        self.children[v.index()].is_empty()
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v.index()] as usize
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// All vertices strictly below `v`, breadth-first.
    pub fn descendants(&self, v: Vertex) -> BTreeSet<Vertex> {
        let mut out = BTreeSet::new();
        let mut queue: VecDeque<Vertex> = self.children(v).iter().copied().collect();
        while let Some(u) = queue.pop_front() {
            out.insert(u);
            queue.extend(self.children(u).iter().copied());
        }
        out
    }

    /// Recomputes from the raw maps that the child sets partition the
    /// non-root vertices: pairwise disjoint, covering, self-consistent.
    pub fn children_partition_check(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        for u in self.vertices() {
            for &c in self.children(u) {
                if seen[c.index()] || self.parent[c.index()] != Some(u) || c == self.root() {
                    return false;
                }
                seen[c.index()] = true;
            }
        }
        seen[self.root().index()] = true;
        seen.into_iter().all(|s| s)
    }
}
