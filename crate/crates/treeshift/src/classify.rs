//! Per-vertex classification criteria for weighted shifts.
//!
//! Every verdict reduces to comparisons of squared vertex norms and sums of
//! squared weights over children, so rational-mode inputs are decided
//! exactly. The central quantity is the optimal constant
//!
//! ```text
//!   sup over u of  ‖Se_u‖² / Σ { λ_v² : v child of u, ‖Se_v‖ = ‖Se_u‖ }
//! ```
//!
//! with `positive/0 = ∞`. The shift is weakly quasinormal exactly when this
//! is finite, and quasinormal exactly when every nonzero-weight child
//! matches its parent's norm.
//!
//! Truncation scopes: a finite tree standing for a truncated infinite one
//! only has trustworthy data at *interior* vertices — those whose children
//! are all present and whose children's norms are known (from the cache or
//! from attached analytic norms). `strict_interior_vertices` ignores
//! analytic norms; it is the scope on which verdicts coincide with the
//! literal finite matrix and hence with the oracle.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::measures::AtomMap;
use crate::scalar::{Extended, Scalar};
use crate::shift::WeightedShift;
use crate::tree::Vertex;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(String),
}

/// Which vertices a verdict ranges over.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ScopeKind {
    /// Vertices whose criterion data is fully determined (default).
    Interior,
    /// Every vertex of the finite tree, truncation noise included.
    Full,
}

/// Which norms the criteria read.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum NormView {
    /// Analytic norms where attached (the intended infinite operator).
    Intended,
    /// Cached finite-tree norms only (what the matrix oracle sees).
    Matrix,
}

fn norm_of(s: &WeightedShift, u: Vertex, view: NormView) -> &Scalar {
    match view {
        NormView::Intended => s.norm_sq(u),
        NormView::Matrix => s.raw_norm_sq(u),
    }
}

/// Vertices whose own children are present and whose children's norms are
/// all known (cache or analytic). On an unmarked tree this is every vertex.
pub fn interior_vertices(s: &WeightedShift) -> BTreeSet<Vertex> {
    s.tree()
        .vertices()
        .filter(|&u| {
            !s.is_truncated(u) && s.tree().children(u).iter().all(|&v| s.norm_known(v))
        })
        .collect()
}

/// Interior vertices of the literal finite tree: children present and
/// grandchildren present, analytic norms ignored. On a depth-D truncation
/// with the deepest level marked, this is exactly the vertices of depth
/// ≤ D−2.
pub fn strict_interior_vertices(s: &WeightedShift) -> BTreeSet<Vertex> {
    s.tree()
        .vertices()
        .filter(|&u| {
            !s.is_truncated(u)
                && s.tree().children(u).iter().all(|&v| !s.is_truncated(v))
        })
        .collect()
}

pub fn scope_vertices(s: &WeightedShift, kind: ScopeKind) -> BTreeSet<Vertex> {
    match kind {
        ScopeKind::Interior => interior_vertices(s),
        ScopeKind::Full => s.tree().vertices().collect(),
    }
}

/// A supremum with the vertex attaining it (ties broken by vertex order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalConstant {
    pub value: Extended,
    pub witness: Option<Vertex>,
}

fn optimal_constant_view(
    s: &WeightedShift,
    scope: &BTreeSet<Vertex>,
    view: NormView,
) -> OptimalConstant {
    let eps = s.eps();
    let mut best = Extended::zero();
    let mut witness = None;
    for &u in scope {
        let nsq = norm_of(s, u, view);
        if !nsq.is_positive() {
            continue;
        }
        let denom = s
            .tree()
            .children(u)
            .iter()
            .filter(|&&v| norm_of(s, v, view).eq_within(nsq, eps))
            .fold(Scalar::zero(), |acc, &v| {
                acc + s.weight_sq(v).expect("children are non-root").clone()
            });
        let ratio = Extended::div_or_inf(nsq, &denom);
        if ratio > best {
            best = ratio;
            witness = Some(u);
        }
    }
    OptimalConstant {
        value: best,
        witness,
    }
}

/// Optimal constant over `scope` for the intended operator.
/// Zero on the scope gives 0; an empty equal-norm child set under a positive
/// norm gives ∞.
pub fn optimal_constant(s: &WeightedShift, scope: &BTreeSet<Vertex>) -> OptimalConstant {
    optimal_constant_view(s, scope, NormView::Intended)
}

/// Optimal constant computed from the literal finite-tree norms; this is the
/// quantity the matrix oracle reproduces on the same scope.
pub fn optimal_constant_matrix(s: &WeightedShift, scope: &BTreeSet<Vertex>) -> OptimalConstant {
    optimal_constant_view(s, scope, NormView::Matrix)
}

fn quasinormal_view(
    s: &WeightedShift,
    scope: &BTreeSet<Vertex>,
    view: NormView,
) -> (bool, Option<(Vertex, Vertex)>) {
    let eps = s.eps();
    for &u in scope {
        let nsq = norm_of(s, u, view);
        for &v in s.tree().children(u) {
            let wsq = s.weight_sq(v).expect("children are non-root");
            if wsq.is_positive() && !norm_of(s, v, view).eq_within(nsq, eps) {
                return (false, Some((u, v)));
            }
        }
    }
    (true, None)
}

/// Quasinormality over `scope`: every nonzero-weight child has the same
/// vertex norm as its parent. Returns the first violating pair `(u, v)`.
pub fn quasinormal(s: &WeightedShift, scope: &BTreeSet<Vertex>) -> (bool, Option<(Vertex, Vertex)>) {
    quasinormal_view(s, scope, NormView::Intended)
}

/// Quasinormality read from the literal finite-tree norms.
pub fn quasinormal_matrix(
    s: &WeightedShift,
    scope: &BTreeSet<Vertex>,
) -> (bool, Option<(Vertex, Vertex)>) {
    quasinormal_view(s, scope, NormView::Matrix)
}

/// Absolute continuity of the modulus measures with respect to the image
/// measures: every vertex in `scope` with a positive norm has an equal-norm
/// child carrying nonzero weight. Returns the first violating vertex.
pub fn modulus_ac(s: &WeightedShift, scope: &BTreeSet<Vertex>) -> (bool, Option<Vertex>) {
    for &u in scope {
        if s.norm_sq(u).is_positive() && s.nonzero_equal_norm_children(u).is_empty() {
            return (false, Some(u));
        }
    }
    (true, None)
}

/// Three-valued verdict for criteria that may be undecidable on a truncated
/// tree.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Trivalent {
    True,
    False,
    Unknown,
}

impl Trivalent {
    pub fn is_true(self) -> bool {
        self == Trivalent::True
    }
}

/// The per-vertex hyponormality datum at `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypoSum {
    /// `Σ λ_v²/‖Se_v‖²` over nonzero-weight children, all norms positive.
    Value(Scalar),
    /// Some child carries nonzero weight into a zero-norm vertex — the
    /// criterion fails outright at `u`.
    ZeroNormChild(Vertex),
    /// A child's norm is not known (truncation).
    Unknown,
}

/// The hyponormality datum at a single vertex (intended norms).
pub fn hyponormality_sum(s: &WeightedShift, u: Vertex) -> HypoSum {
    if s.is_truncated(u) {
        return HypoSum::Unknown;
    }
    let mut sum = Scalar::zero();
    for &v in s.tree().children(u) {
        let wsq = s.weight_sq(v).expect("children are non-root");
        if !wsq.is_positive() {
            continue;
        }
        if !s.norm_known(v) {
            return HypoSum::Unknown;
        }
        let nsq = s.norm_sq(v);
        if nsq.is_zero() {
            return HypoSum::ZeroNormChild(v);
        }
        sum = sum + (wsq / nsq);
    }
    HypoSum::Value(sum)
}

/// Hyponormality over `scope`: at every vertex, nonzero weights only enter
/// positive-norm children and the weighted density sum stays ≤ 1.
/// `Unknown` when truncation hides data needed at some vertex and no other
/// vertex already refutes the criterion.
pub fn hyponormal(s: &WeightedShift, scope: &BTreeSet<Vertex>) -> (Trivalent, Option<Vertex>) {
    let mut saw_unknown = false;
    for &u in scope {
        match hyponormality_sum(s, u) {
            HypoSum::Value(sum) => {
                if sum > Scalar::one() {
                    return (Trivalent::False, Some(u));
                }
            }
            HypoSum::ZeroNormChild(_) => return (Trivalent::False, Some(u)),
            HypoSum::Unknown => saw_unknown = true,
        }
    }
    if saw_unknown {
        (Trivalent::Unknown, None)
    } else {
        (Trivalent::True, None)
    }
}

fn generalized_view(
    s: &WeightedShift,
    phi: &AtomMap,
    psi: &AtomMap,
    scope: &BTreeSet<Vertex>,
    view: NormView,
) -> OptimalConstant {
    let eps = s.eps();
    let mut best = Extended::zero();
    let mut witness = None;
    for &u in scope {
        let nsq = norm_of(s, u, view);
        if !nsq.is_positive() {
            continue;
        }
        let target = phi.apply_sq(nsq);
        let denom = s
            .tree()
            .children(u)
            .iter()
            .filter(|&&v| psi.apply_sq(norm_of(s, v, view)).eq_within(&target, eps))
            .fold(Scalar::zero(), |acc, &v| {
                acc + s.weight_sq(v).expect("children are non-root").clone()
            });
        let ratio = Extended::div_or_inf(nsq, &denom);
        if ratio > best {
            best = ratio;
            witness = Some(u);
        }
    }
    OptimalConstant {
        value: best,
        witness,
    }
}

/// Optimal constant of the transported inequality: children count toward the
/// denominator at `u` when `ψ(‖Se_v‖) = φ(‖Se_u‖)`. With `φ = ψ = id` this
/// is exactly [`optimal_constant`].
pub fn generalized_optimal_constant(
    s: &WeightedShift,
    phi: &AtomMap,
    psi: &AtomMap,
    scope: &BTreeSet<Vertex>,
) -> OptimalConstant {
    generalized_view(s, phi, psi, scope, NormView::Intended)
}

/// Transported optimal constant from the literal finite-tree norms.
pub fn generalized_optimal_constant_matrix(
    s: &WeightedShift,
    phi: &AtomMap,
    psi: &AtomMap,
    scope: &BTreeSet<Vertex>,
) -> OptimalConstant {
    generalized_view(s, phi, psi, scope, NormView::Matrix)
}

/// Residual of the power identity
/// `Σ_v ‖Se_v‖^(2α) λ_v²  =  ‖Se_u‖^(2(α+1))` at `u`; zero for quasinormal
/// shifts. Exact (and exactly zero) in rational mode whenever the norms have
/// exact α-th powers. Requires `α > 0`.
pub fn power_identity_residual(
    s: &WeightedShift,
    u: Vertex,
    alpha: &Scalar,
) -> Result<Scalar, ClassifyError> {
    if !alpha.is_positive() {
        return Err(ClassifyError::NonPositiveExponent(alpha.to_string()));
    }
    let lhs = s
        .tree()
        .children(u)
        .iter()
        .fold(Scalar::zero(), |acc, &v| {
            let wsq = s.weight_sq(v).expect("children are non-root");
            acc + (s.norm_sq(v).powr(alpha) * wsq.clone())
        });
    let rhs = s.norm_sq(u).powr(&(alpha + &Scalar::one()));
    Ok((lhs - rhs).abs())
}

/// Float-mode fragility: some parent–child pair has numerically distinct
/// norms within 10× the comparison tolerance, so the equal-norm classes
/// could merge or split under perturbation. Fully exact data is never
/// fragile.
pub fn fragile(s: &WeightedShift) -> bool {
    let eps = s.eps();
    for u in s.tree().vertices() {
        let nu = s.norm_sq(u);
        for &v in s.tree().children(u) {
            let nv = s.norm_sq(v);
            if nu.is_exact() && nv.is_exact() {
                continue;
            }
            let gap = (nu.to_f64() - nv.to_f64()).abs();
            if gap > 0.0 && gap <= 10.0 * eps {
                return true;
            }
        }
    }
    false
}

/// The assembled verdicts over one scope.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub scope_kind: ScopeKind,
    pub scope: BTreeSet<Vertex>,
    /// Vertices excluded from the scope (truncation boundary).
    pub excluded: BTreeSet<Vertex>,
    pub quasinormal: bool,
    pub quasinormal_witness: Option<(Vertex, Vertex)>,
    /// Finite optimal constant ⟺ weakly quasinormal.
    pub weakly_quasinormal: bool,
    pub optimal_constant: Extended,
    pub optimal_constant_witness: Option<Vertex>,
    pub modulus_ac: bool,
    pub modulus_ac_witness: Option<Vertex>,
    pub hyponormal: Trivalent,
    pub hyponormal_witness: Option<Vertex>,
    pub zero_on_scope: bool,
    pub norm_bound: Scalar,
    pub unbounded_family: bool,
    pub fragile: bool,
}

/// Runs every criterion over the requested scope.
pub fn classify(s: &WeightedShift, kind: ScopeKind) -> ClassificationReport {
    let scope = scope_vertices(s, kind);
    let excluded = s
        .tree()
        .vertices()
        .filter(|v| !scope.contains(v))
        .collect();
    let (qn, qn_witness) = quasinormal(s, &scope);
    let oc = optimal_constant(s, &scope);
    let (ac, ac_witness) = modulus_ac(s, &scope);
    let (hypo, hypo_witness) = hyponormal(s, &scope);
    ClassificationReport {
        scope_kind: kind,
        zero_on_scope: s.is_zero_on(&scope),
        excluded,
        quasinormal: qn,
        quasinormal_witness: qn_witness,
        weakly_quasinormal: !oc.value.is_infinite(),
        optimal_constant: oc.value,
        optimal_constant_witness: oc.witness,
        modulus_ac: ac,
        modulus_ac_witness: ac_witness,
        hyponormal: hypo,
        hyponormal_witness: hypo_witness,
        norm_bound: s.norm_bound(),
        unbounded_family: s.unbounded_family(),
        fragile: fragile(s),
        scope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::ShiftBuilder;
    use crate::tree::DirectedTree;

    fn sc(n: i64) -> Scalar {
        Scalar::int(n)
    }

    /// Root `w` with children `a` (weight 1) and `b` (weight 2): the basic
    /// non-quasinormal fork.
    fn fork() -> WeightedShift {
        let t = DirectedTree::from_edges("w", &[("w", "a"), ("w", "b")]).unwrap();
        let a = t.vertex("a").unwrap();
        let b = t.vertex("b").unwrap();
        ShiftBuilder::new(t)
            .weight(a, Scalar::one())
            .weight(b, sc(2))
            .build()
            .unwrap()
    }

    /// Path with the given weights down the edges, last vertex marked
    /// truncated.
    fn weighted_path(weights: &[Scalar]) -> WeightedShift {
        let mut t = DirectedTree::new("v0");
        let mut prev = t.root();
        let mut verts = Vec::new();
        for i in 1..=weights.len() {
            prev = t.add_child(prev, format!("v{i}")).unwrap();
            verts.push(prev);
        }
        let mut b = ShiftBuilder::new(t);
        for (&v, w) in verts.iter().zip(weights) {
            b = b.weight(v, w.clone());
        }
        b.truncated(prev).build().unwrap()
    }

    /// Path with constant weight `w`, last vertex marked truncated.
    fn constant_path(w: i64, len: usize) -> WeightedShift {
        weighted_path(&vec![sc(w); len])
    }

    #[test]
    fn fork_full_scope_verdicts() {
        let s = fork();
        let scope = scope_vertices(&s, ScopeKind::Full);
        let (qn, wit) = quasinormal(&s, &scope);
        assert!(!qn);
        assert!(wit.is_some());
        let oc = optimal_constant(&s, &scope);
        assert!(oc.value.is_infinite());
        assert_eq!(oc.witness, Some(s.tree().root()));
        let (ac, ac_wit) = modulus_ac(&s, &scope);
        assert!(!ac);
        assert_eq!(ac_wit, Some(s.tree().root()));
        // Weight 1 into the zero-norm leaf `a` refutes hyponormality.
        let (hypo, _) = hyponormal(&s, &scope);
        assert_eq!(hypo, Trivalent::False);
    }

    #[test]
    fn unmarked_tree_interior_is_everything() {
        let s = fork();
        assert_eq!(interior_vertices(&s).len(), 3);
        assert_eq!(strict_interior_vertices(&s).len(), 3);
    }

    #[test]
    fn constant_path_interior_is_isometric() {
        let s = constant_path(2, 4);
        let interior = interior_vertices(&s);
        // Truncated leaf and its parent are excluded.
        assert_eq!(interior.len(), 3);
        let (qn, _) = quasinormal(&s, &interior);
        assert!(qn);
        let oc = optimal_constant(&s, &interior);
        assert_eq!(oc.value, Extended::Finite(Scalar::one()));
        let (ac, _) = modulus_ac(&s, &interior);
        assert!(ac);
        let (hypo, _) = hyponormal(&s, &interior);
        assert_eq!(hypo, Trivalent::True);
        // Full scope sees the truncation noise: constant is infinite there.
        let full = scope_vertices(&s, ScopeKind::Full);
        assert!(optimal_constant(&s, &full).value.is_infinite());
        assert_eq!(hyponormal(&s, &full).0, Trivalent::Unknown);
    }

    #[test]
    fn strictly_increasing_path_fails_ac_on_interior() {
        let s = weighted_path(&[sc(1), sc(2), sc(3), sc(4)]);
        let interior = interior_vertices(&s);
        let (ac, wit) = modulus_ac(&s, &interior);
        assert!(!ac);
        assert_eq!(wit, Some(s.tree().root()));
        let (qn, _) = quasinormal(&s, &interior);
        assert!(!qn);
    }

    #[test]
    fn zero_shift_conventions() {
        let t = DirectedTree::from_edges("w", &[("w", "a")]).unwrap();
        let s = ShiftBuilder::new(t).build().unwrap();
        let report = classify(&s, ScopeKind::Full);
        assert!(report.zero_on_scope);
        assert!(report.quasinormal);
        assert!(report.weakly_quasinormal);
        assert_eq!(report.optimal_constant, Extended::zero());
        assert_eq!(report.hyponormal, Trivalent::True);
    }

    #[test]
    fn power_identity_on_fork_and_isometry() {
        let s = fork();
        // LHS = 0 (children are leaves), RHS = 5² = 25.
        let r = power_identity_residual(&s, s.tree().root(), &Scalar::one()).unwrap();
        assert_eq!(r, sc(25));
        // Constant path: identity holds exactly at interior vertices.
        let p = constant_path(3, 4);
        for &u in &interior_vertices(&p) {
            let r = power_identity_residual(&p, u, &Scalar::one()).unwrap();
            assert!(r.is_zero(), "residual {r} at {:?}", u);
        }
        assert!(power_identity_residual(&s, s.tree().root(), &Scalar::zero()).is_err());
    }

    #[test]
    fn generalized_reduces_to_plain_at_identity() {
        let s = fork();
        let scope = scope_vertices(&s, ScopeKind::Full);
        let plain = optimal_constant(&s, &scope);
        let gen = generalized_optimal_constant(
            &s,
            &AtomMap::identity(),
            &AtomMap::identity(),
            &scope,
        );
        assert_eq!(plain, gen);
    }

    #[test]
    fn geometric_path_matches_scaled_map() {
        // Weights 4, 2, 1, 1/2: squared norms 16, 4, 1, 1/4 — each child
        // norm is 1/4 of its parent's, so ψ = (x ↦ √4·x) transports the
        // child norms onto the parent norms with constant 1.
        let s = weighted_path(&[sc(4), sc(2), sc(1), Scalar::ratio(1, 2)]);
        let interior = strict_interior_vertices(&s);
        let psi = AtomMap::sqrt_scale(sc(4)).unwrap();
        let oc = generalized_optimal_constant(&s, &AtomMap::identity(), &psi, &interior);
        assert_eq!(oc.value, Extended::Finite(Scalar::one()));
        // The un-transported constant is infinite even on the interior.
        assert!(optimal_constant(&s, &interior).value.is_infinite());
    }

    #[test]
    fn fragility_only_in_float_mode() {
        let t = DirectedTree::from_edges("w", &[("w", "a"), ("a", "b")]).unwrap();
        let a = t.vertex("a").unwrap();
        let b = t.vertex("b").unwrap();
        // Exact distinct norms: never fragile.
        let s = ShiftBuilder::new(t.clone())
            .weight(a, Scalar::one())
            .weight(b, Scalar::one())
            .build()
            .unwrap();
        assert!(!fragile(&s));
        // Float norms a hair apart: fragile.
        let s = ShiftBuilder::new(t)
            .weight(a, Scalar::float(1.0))
            .weight(b, Scalar::float(1.0 + 3e-9))
            .build()
            .unwrap();
        assert!(fragile(&s));
    }
}
