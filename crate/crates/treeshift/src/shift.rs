//! Weighted shift operators attached to directed trees.
//!
//! A shift stores one *squared* weight per non-root vertex — criteria only
//! ever compare squared quantities, and squares of the usual parameter
//! sequences stay rational when the parameters themselves do not. The squared
//! vertex norm `‖S e_u‖² = Σ_{v child of u} λ_v²` is cached at build time.
//!
//! Two truncation facilities support trees that stand for a finite cut of an
//! infinite tree:
//! * vertices whose children were cut off can be *marked truncated*;
//! * an *analytic norm* can be attached to a vertex, giving its squared norm
//!   in the intended infinite tree.
//!
//! Classification reads the analytic value where present (`norm_sq`); the
//! matrix oracle sees only the literal finite operator (`raw_norm_sq`).

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use thiserror::Error;

use crate::scalar::{Scalar, DEFAULT_EPS};
use crate::tree::{DirectedTree, Vertex};

#[derive(Debug, Error)]
pub enum ShiftError {
    #[error("the root carries no weight")]
    RootWeight,
    #[error("negative squared weight at vertex {0:?}")]
    NegativeWeight(String),
    #[error("negative analytic norm at vertex {0:?}")]
    NegativeNorm(String),
    #[error(
        "analytic norm at non-truncated vertex {0:?} contradicts the cached norm ({1} vs {2})"
    )]
    NormMismatch(String, String, String),
}

/// A weighted shift on a finite directed tree.
#[derive(Clone, Debug)]
pub struct WeightedShift {
    tree: DirectedTree,
    weight_sq: Vec<Scalar>,
    norm_sq: Vec<Scalar>,
    analytic_norm_sq: BTreeMap<Vertex, Scalar>,
    truncated: BTreeSet<Vertex>,
    unbounded_family: bool,
    eps: f64,
}

/// Builder for [`WeightedShift`]. Weights default to zero.
pub struct ShiftBuilder {
    tree: DirectedTree,
    weight_sq: Vec<Scalar>,
    analytic_norm_sq: BTreeMap<Vertex, Scalar>,
    truncated: BTreeSet<Vertex>,
    unbounded_family: bool,
    eps: f64,
}

impl ShiftBuilder {
    pub fn new(tree: DirectedTree) -> Self {
        let n = tree.vertex_count();
        ShiftBuilder {
            tree,
            weight_sq: vec![Scalar::zero(); n],
            analytic_norm_sq: BTreeMap::new(),
            truncated: BTreeSet::new(),
            unbounded_family: false,
            eps: DEFAULT_EPS,
        }
    }

    /// Sets the weight of `v` (stored as its square).
    pub fn weight(self, v: Vertex, w: Scalar) -> Self {
        let sq = &w * &w;
        self.weight_sq(v, sq)
    }

    /// Sets the squared weight of `v` directly.
    pub fn weight_sq(mut self, v: Vertex, wsq: Scalar) -> Self {
        self.weight_sq[v.index()] = wsq;
        self
    }

    /// Attaches the squared vertex norm of `v` in the intended infinite tree.
    pub fn analytic_norm_sq(mut self, v: Vertex, nsq: Scalar) -> Self {
        self.analytic_norm_sq.insert(v, nsq);
        self
    }

    /// Marks `v` as having had its children cut off by truncation.
    pub fn truncated(mut self, v: Vertex) -> Self {
        self.truncated.insert(v);
        self
    }

    /// Declares that the generating family has unbounded vertex norms.
    pub fn unbounded_family(mut self, flag: bool) -> Self {
        self.unbounded_family = flag;
        self
    }

    /// Comparison tolerance for float-mode data.
    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn build(self) -> Result<WeightedShift, ShiftError> {
        let tree = self.tree;
        if self.weight_sq[tree.root().index()].is_positive() {
            return Err(ShiftError::RootWeight);
        }
        for v in tree.vertices() {
            if self.weight_sq[v.index()].is_negative() {
                return Err(ShiftError::NegativeWeight(tree.label(v).to_string()));
            }
        }
        let norm_sq: Vec<Scalar> = tree
            .vertices()
            .map(|u| {
                tree.children(u)
                    .iter()
                    .fold(Scalar::zero(), |acc, &v| acc + self.weight_sq[v.index()].clone())
            })
            .collect();
        // Analytic norms may only disagree with the cache where children are
        // actually missing.
        for (&v, nsq) in &self.analytic_norm_sq {
            if nsq.is_negative() {
                return Err(ShiftError::NegativeNorm(tree.label(v).to_string()));
            }
            if !self.truncated.contains(&v) && !nsq.eq_within(&norm_sq[v.index()], self.eps) {
                return Err(ShiftError::NormMismatch(
                    tree.label(v).to_string(),
                    norm_sq[v.index()].to_string(),
                    nsq.to_string(),
                ));
            }
        }
        Ok(WeightedShift {
            tree,
            weight_sq: self.weight_sq,
            norm_sq,
            analytic_norm_sq: self.analytic_norm_sq,
            truncated: self.truncated,
            unbounded_family: self.unbounded_family,
            eps: self.eps,
        })
    }
}

impl WeightedShift {
    pub fn tree(&self) -> &DirectedTree {
        &self.tree
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn unbounded_family(&self) -> bool {
        self.unbounded_family
    }

    /// Squared weight of a non-root vertex (`None` for the root, which
    /// carries no weight).
    pub fn weight_sq(&self, v: Vertex) -> Option<&Scalar> {
        if v == self.tree.root() {
            None
        } else {
            Some(&self.weight_sq[v.index()])
        }
    }

    /// Weight of a non-root vertex as a float (0 for the root).
    pub fn weight_f64(&self, v: Vertex) -> f64 {
        self.weight_sq(v).map_or(0.0, |w| w.to_f64().sqrt())
    }

    /// Squared vertex norm of the *intended* operator: the analytic value
    /// where one was attached, otherwise the cached finite-tree sum.
    pub fn norm_sq(&self, u: Vertex) -> &Scalar {
        self.analytic_norm_sq
            .get(&u)
            .unwrap_or(&self.norm_sq[u.index()])
    }

    /// Squared vertex norm of the literal finite operator (what the matrix
    /// oracle sees), ignoring analytic overrides.
    pub fn raw_norm_sq(&self, u: Vertex) -> &Scalar {
        &self.norm_sq[u.index()]
    }

    pub fn analytic_norm_sq(&self, u: Vertex) -> Option<&Scalar> {
        self.analytic_norm_sq.get(&u)
    }

    pub fn is_truncated(&self, u: Vertex) -> bool {
        self.truncated.contains(&u)
    }

    pub fn truncated_vertices(&self) -> &BTreeSet<Vertex> {
        &self.truncated
    }

    /// Whether the squared norm of `u` in the intended infinite tree is
    /// known: either the children are all present or an analytic value is
    /// attached.
    pub fn norm_known(&self, u: Vertex) -> bool {
        !self.is_truncated(u) || self.analytic_norm_sq.contains_key(&u)
    }

    /// Children of `u` whose vertex norm equals the norm of `u`
    /// (exactly in rational mode, within `eps` otherwise).
    pub fn equal_norm_children(&self, u: Vertex) -> Vec<Vertex> {
        let target = self.norm_sq(u);
        self.tree
            .children(u)
            .iter()
            .copied()
            .filter(|&v| self.norm_sq(v).eq_within(target, self.eps))
            .collect()
    }

    /// Equal-norm children of `u` that carry a nonzero weight.
    pub fn nonzero_equal_norm_children(&self, u: Vertex) -> Vec<Vertex> {
        self.equal_norm_children(u)
            .into_iter()
            .filter(|&v| self.weight_sq(v).is_some_and(Scalar::is_positive))
            .collect()
    }

    /// Applies the shift: `(Sf)(v) = λ_v · f(parent v)`, zero at the root.
    pub fn apply(&self, f: &FiniteVector) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for (&u, &amp) in f.entries() {
            for &v in self.tree.children(u) {
                let w = self.weight_f64(v);
                if w != 0.0 {
                    out.add_to(v, amp * w);
                }
            }
        }
        out
    }

    /// `max_u ‖S e_u‖` over the intended norms; exact when every squared
    /// norm is an exact perfect square.
    pub fn norm_bound(&self) -> Scalar {
        self.tree
            .vertices()
            .map(|u| self.norm_sq(u).clone())
            .max()
            .expect("trees are nonempty")
            .sqrt()
    }

    /// True when every vertex in `scope` has zero norm (the zero operator on
    /// the spanned subspace).
    pub fn is_zero_on(&self, scope: &BTreeSet<Vertex>) -> bool {
        scope.iter().all(|&u| self.norm_sq(u).is_zero())
    }
}

/// A finitely supported vector with complex amplitudes, indexed by vertices.
#[derive(Clone, Debug, Default)]
pub struct FiniteVector {
    amps: BTreeMap<Vertex, Complex64>,
}

impl FiniteVector {
    pub fn zero() -> Self {
        FiniteVector::default()
    }

    pub fn basis(v: Vertex) -> Self {
        let mut f = FiniteVector::zero();
        f.set(v, Complex64::new(1.0, 0.0));
        f
    }

    pub fn set(&mut self, v: Vertex, amp: Complex64) {
        if amp == Complex64::new(0.0, 0.0) {
            self.amps.remove(&v);
        } else {
            self.amps.insert(v, amp);
        }
    }

    pub fn add_to(&mut self, v: Vertex, amp: Complex64) {
        let cur = self.get(v) + amp;
        self.set(v, cur);
    }

    pub fn get(&self, v: Vertex) -> Complex64 {
        self.amps
            .get(&v)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> &BTreeMap<Vertex, Complex64> {
        &self.amps
    }

    pub fn scale(&self, c: Complex64) -> FiniteVector {
        let mut out = FiniteVector::zero();
        for (&v, &a) in &self.amps {
            out.set(v, a * c);
        }
        out
    }

    pub fn add(&self, other: &FiniteVector) -> FiniteVector {
        let mut out = self.clone();
        for (&v, &a) in &other.amps {
            out.add_to(v, a);
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Dense coordinates in vertex-index order (the oracle's basis order).
    pub fn to_dense(&self, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (&v, &a) in &self.amps {
            out[v.index()] = a;
        }
        out
    }
}
