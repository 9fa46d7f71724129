//! Parameterized shift families with known classification behaviour.
//!
//! Every generator builds a depth-`D` truncation of an infinite tree: the
//! deepest layer is marked truncated and (except for the binary family and
//! plain paths) every vertex carries its analytic squared norm, so the
//! intended infinite-operator verdicts survive the truncation.
//!
//! The chain-based families share one normalization: squared chain norms
//! are identically 1, enforced level by level as
//! `α(n)² + β(n−1)² = 1`. Under it the per-vertex constant at chain vertex
//! `u_i` is exactly `1/α(i+1)²`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::shift::{ShiftBuilder, ShiftError, WeightedShift};
use crate::tree::{DirectedTree, Vertex};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("bad family parameter: {0}")]
    BadParameter(String),
    #[error("chain normalization α(n)² + β(n−1)² = 1 violated at level {level}: got {got}")]
    ChainNormalization { level: usize, got: Scalar },
    #[error("unknown family `{0}` (expected eunb, fig1, fig2, fig3, or path)")]
    UnknownFamily(String),
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// The named example families, keyed by their command-line tokens.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `eunb`: unbounded quasinormal binary shift.
    Binary,
    /// `fig1`: chain with an extra comb arm at the root.
    Comb,
    /// `fig2`: chain with one constant-weight tail per level.
    Chain,
    /// `fig3`: chain whose side vertices branch into two tails.
    Branch,
    /// `path`: a plain weighted path.
    Path,
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        match s {
            "eunb" => Ok(Family::Binary),
            "fig1" => Ok(Family::Comb),
            "fig2" => Ok(Family::Chain),
            "fig3" => Ok(Family::Branch),
            "path" => Ok(Family::Path),
            other => Err(FamilyError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self {
            Family::Binary => "eunb",
            Family::Comb => "fig1",
            Family::Chain => "fig2",
            Family::Branch => "fig3",
            Family::Path => "path",
        };
        write!(f, "{token}")
    }
}

/// Incremental tree-plus-weights assembly shared by the generators.
struct Assembler {
    tree: DirectedTree,
    weights: Vec<(Vertex, Scalar)>,
    hints: Vec<(Vertex, Scalar)>,
}

impl Assembler {
    fn new(root: &str, root_hint: Option<Scalar>) -> Self {
        let tree = DirectedTree::new(root);
        let root_v = tree.root();
        let mut a = Assembler {
            tree,
            weights: Vec::new(),
            hints: Vec::new(),
        };
        if let Some(h) = root_hint {
            a.hints.push((root_v, h));
        }
        a
    }

    fn child(
        &mut self,
        parent: Vertex,
        label: String,
        weight_sq: Scalar,
        hint: Option<Scalar>,
    ) -> Vertex {
        let v = self
            .tree
            .add_child(parent, label)
            .expect("generator labels are unique");
        self.weights.push((v, weight_sq));
        if let Some(h) = hint {
            self.hints.push((v, h));
        }
        v
    }

    /// Constant-weight path below `from` down to `max_depth`, labelled
    /// `{prefix}_{start_k}`, `{prefix}_{start_k+1}`, …, every vertex hinted
    /// with the tail's squared norm.
    fn tail(&mut self, from: Vertex, prefix: &str, start_k: usize, weight_sq: &Scalar, max_depth: usize) {
        let mut cur = from;
        let mut k = start_k;
        while self.tree.depth(cur) < max_depth {
            cur = self.child(
                cur,
                format!("{prefix}_{k}"),
                weight_sq.clone(),
                Some(weight_sq.clone()),
            );
            k += 1;
        }
    }

    /// Marks the deepest layer truncated and builds the shift.
    fn finish(self, depth: usize, unbounded: bool) -> Result<WeightedShift, FamilyError> {
        let boundary: Vec<Vertex> = self
            .tree
            .vertices()
            .filter(|&v| self.tree.depth(v) == depth)
            .collect();
        let mut b = ShiftBuilder::new(self.tree).unbounded_family(unbounded);
        for (v, w) in self.weights {
            b = b.weight_sq(v, w);
        }
        for (v, h) in self.hints {
            b = b.analytic_norm_sq(v, h);
        }
        for v in boundary {
            b = b.truncated(v);
        }
        Ok(b.build()?)
    }
}

fn require_positive(name: &str, value: &Scalar) -> Result<(), FamilyError> {
    if !value.is_positive() {
        return Err(FamilyError::BadParameter(format!(
            "{name} must be positive, got {value}"
        )));
    }
    Ok(())
}

fn require_nonnegative(name: &str, value: &Scalar) -> Result<(), FamilyError> {
    if value.is_negative() {
        return Err(FamilyError::BadParameter(format!(
            "{name} must be nonnegative, got {value}"
        )));
    }
    Ok(())
}

/// Chain-family data: `alpha_sq[n-1] = α(n)²` for `n = 1..=depth` (weights
/// down the chain) and `beta_sq[i] = β(i)²` for `i = 0..depth` (weights into
/// the side tails), tied together by `α(n)² + β(n−1)² = 1`.
#[derive(Clone, Debug)]
pub struct ChainParams {
    pub alpha_sq: Vec<Scalar>,
    pub beta_sq: Vec<Scalar>,
}

impl ChainParams {
    /// Constant per-vertex ratio `c ≥ 1`: `α² = 1/c`, `β² = 1 − 1/c`.
    pub fn constant(depth: usize, c: &Scalar) -> Result<Self, FamilyError> {
        if c < &Scalar::one() {
            return Err(FamilyError::BadParameter(format!(
                "chain ratio must be ≥ 1, got {c}"
            )));
        }
        let alpha = Scalar::one() / c.clone();
        let beta = Scalar::one() - alpha.clone();
        Ok(ChainParams {
            alpha_sq: vec![alpha; depth],
            beta_sq: vec![beta; depth],
        })
    }

    /// `α(n)² = 1/(n+1)`: the per-vertex ratio at chain level `i` is
    /// `i + 2`, so truncations of increasing depth have constants growing
    /// without bound while each stays finite.
    pub fn harmonic(depth: usize) -> Self {
        let alpha_sq: Vec<Scalar> = (1..=depth as i64).map(|n| Scalar::ratio(1, n + 1)).collect();
        let beta_sq = (1..=depth as i64)
            .map(|n| Scalar::one() - Scalar::ratio(1, n + 1))
            .collect();
        ChainParams { alpha_sq, beta_sq }
    }

    fn validate(&self, depth: usize) -> Result<(), FamilyError> {
        let d = depth;
        if self.alpha_sq.len() != d || self.beta_sq.len() != d {
            return Err(FamilyError::BadParameter(format!(
                "need {d} chain levels, got {} alpha and {} beta entries",
                self.alpha_sq.len(),
                self.beta_sq.len()
            )));
        }
        for (n, a) in self.alpha_sq.iter().enumerate() {
            require_positive("alpha_sq", a)?;
            require_nonnegative("beta_sq", &self.beta_sq[n])?;
            let sum = a.clone() + self.beta_sq[n].clone();
            if sum != Scalar::one() {
                return Err(FamilyError::ChainNormalization {
                    level: n + 1,
                    got: sum,
                });
            }
        }
        Ok(())
    }
}

/// `fig2`: chain `u_0 → … → u_D` with weight `α(i)` into `u_i`; each `u_i`
/// (`i < D`) also feeds a constant-weight tail through `t_i` with weight
/// `β(i)`. Chain norms are identically 1, the tail below `u_i` has squared
/// norm `β(i)²`, and the interior constant is `max_i 1/α(i+1)²`.
pub fn chain_shift(params: &ChainParams, depth: usize) -> Result<WeightedShift, FamilyError> {
    params.validate(depth)?;
    let mut asm = Assembler::new("u0", Some(Scalar::one()));
    let mut chain = asm.tree.root();
    for i in 0..depth {
        let next = asm.child(
            chain,
            format!("u{}", i + 1),
            params.alpha_sq[i].clone(),
            Some(Scalar::one()),
        );
        let bsq = params.beta_sq[i].clone();
        let t = asm.child(chain, format!("t{i}_1"), bsq.clone(), Some(bsq.clone()));
        asm.tail(t, &format!("t{i}"), 2, &bsq, depth);
        chain = next;
    }
    asm.finish(depth, false)
}

/// Comb-family data on top of a chain: `q_sq[n] = q(n)²` weights the teeth.
#[derive(Clone, Debug)]
pub struct CombParams {
    pub chain: ChainParams,
    pub q_sq: Vec<Scalar>,
    /// Whether the intended infinite family has unbounded vertex norms.
    pub unbounded: bool,
}

impl CombParams {
    /// The reference instance: `α² ≡ 1/4`, `β² ≡ 3/4`, `q(n)² = 1/3 + n`.
    /// Every chain ratio and the root ratio equal 4 exactly, while the comb
    /// norms `1 + q(n)²` grow without bound.
    pub fn growing(depth: usize) -> Result<Self, FamilyError> {
        Ok(CombParams {
            chain: ChainParams::constant(depth, &Scalar::int(4))?,
            q_sq: (0..depth as i64).map(|n| Scalar::ratio(1, 3) + Scalar::int(n)).collect(),
            unbounded: true,
        })
    }

    /// Constant tooth weight: bounded, with root ratio `1 + 1/q²`.
    pub fn constant_arm(depth: usize, q_sq: &Scalar) -> Result<Self, FamilyError> {
        require_positive("q_sq", q_sq)?;
        Ok(CombParams {
            chain: ChainParams::constant(depth, &Scalar::int(4))?,
            q_sq: vec![q_sq.clone(); depth],
            unbounded: false,
        })
    }

    fn validate(&self, depth: usize) -> Result<(), FamilyError> {
        self.chain.validate(depth)?;
        if self.q_sq.len() != depth {
            return Err(FamilyError::BadParameter(format!(
                "need {depth} tooth weights, got {}",
                self.q_sq.len()
            )));
        }
        for q in &self.q_sq {
            require_positive("q_sq", q)?;
        }
        Ok(())
    }
}

/// `fig1`: the chain of [`chain_shift`] plus a comb arm hanging off the
/// root: `u_0 → r_0` with weight `q(0)`, then `r_n → r_{n+1}` with weight 1
/// and a tooth `r_n → s_n` with weight `q(n)` feeding a constant-weight
/// tail of squared norm `1 + q(n)²`. The squared norm of `r_n` is
/// `1 + q(n)²`, so the only equal-norm child of the root is `r_0` and the
/// root ratio is `(1 + q(0)²)/q(0)²`.
pub fn comb_shift(params: &CombParams, depth: usize) -> Result<WeightedShift, FamilyError> {
    params.validate(depth)?;
    let comb_norm = |n: usize| Scalar::one() + params.q_sq[n].clone();

    let mut asm = Assembler::new("u0", Some(comb_norm(0)));
    // Chain and its tails, as in the plain chain family.
    let mut chain = asm.tree.root();
    for i in 0..depth {
        let next = asm.child(
            chain,
            format!("u{}", i + 1),
            params.chain.alpha_sq[i].clone(),
            Some(Scalar::one()),
        );
        let bsq = params.chain.beta_sq[i].clone();
        let t = asm.child(chain, format!("t{i}_1"), bsq.clone(), Some(bsq.clone()));
        asm.tail(t, &format!("t{i}"), 2, &bsq, depth);
        chain = next;
    }
    // Comb arm: r_n at depth n+1.
    let mut arm = asm.tree.root();
    for n in 0..depth {
        let r = asm.child(
            arm,
            format!("r{n}"),
            if n == 0 {
                params.q_sq[0].clone()
            } else {
                Scalar::one()
            },
            Some(comb_norm(n)),
        );
        // Tooth s_n sits at depth n+2; the deepest arm vertex has none.
        if n + 2 <= depth {
            let tooth_norm = comb_norm(n);
            let s = asm.child(
                r,
                format!("s{n}_1"),
                params.q_sq[n].clone(),
                Some(tooth_norm.clone()),
            );
            asm.tail(s, &format!("s{n}"), 2, &tooth_norm, depth);
        }
        arm = r;
    }
    asm.finish(depth, params.unbounded)
}

/// Branch-family data: the chain plus `gamma_sq[i] = γ(i)²`, the second
/// branch weight under each side vertex.
#[derive(Clone, Debug)]
pub struct BranchParams {
    pub chain: ChainParams,
    pub gamma_sq: Vec<Scalar>,
}

impl BranchParams {
    /// Constant parameters: chain ratio `c` and branch weight `γ²`.
    pub fn constant(depth: usize, c: &Scalar, gamma_sq: &Scalar) -> Result<Self, FamilyError> {
        require_nonnegative("gamma_sq", gamma_sq)?;
        Ok(BranchParams {
            chain: ChainParams::constant(depth, c)?,
            gamma_sq: vec![gamma_sq.clone(); depth],
        })
    }

    /// `δ(i)² = β(i)² + γ(i)²`: the squared norm of the branch vertex `w_i`
    /// and of both tails below it.
    pub fn delta_sq(&self, i: usize) -> Scalar {
        self.chain.beta_sq[i].clone() + self.gamma_sq[i].clone()
    }

    /// Strict hyponormality margin at chain vertex `u_i`:
    /// `β(i)²/δ(i)² + α(i+1)² < 1`.
    pub fn condition_strict_sum(&self, i: usize) -> bool {
        let delta = self.delta_sq(i);
        if !delta.is_positive() {
            return false;
        }
        self.chain.beta_sq[i].clone() / delta + self.chain.alpha_sq[i].clone() < Scalar::one()
    }

    /// The equivalent tail-weight reading of the same margin: `δ(i)² > 1`.
    pub fn condition_tail_weight(&self, i: usize) -> bool {
        self.delta_sq(i) > Scalar::one()
    }

    fn validate(&self, depth: usize) -> Result<(), FamilyError> {
        self.chain.validate(depth)?;
        if self.gamma_sq.len() != depth {
            return Err(FamilyError::BadParameter(format!(
                "need {depth} branch weights, got {}",
                self.gamma_sq.len()
            )));
        }
        for (i, g) in self.gamma_sq.iter().enumerate() {
            require_nonnegative("gamma_sq", g)?;
            require_positive("beta_sq", &self.chain.beta_sq[i])?;
        }
        Ok(())
    }
}

/// `fig3`: chain as before, but the side vertex `w_i` (weight `β(i)` from
/// `u_i`) splits into `a_i` (weight `β(i)`) and `b_i` (weight `γ(i)`), each
/// feeding a constant-weight tail of squared norm `δ(i)² = β(i)² + γ(i)²`.
/// The branch vertices are then locally quasinormal with hyponormality sum
/// exactly 1, and hyponormality of the whole shift comes down to
/// `δ(i)² ≥ 1` at every level.
pub fn branch_shift(params: &BranchParams, depth: usize) -> Result<WeightedShift, FamilyError> {
    params.validate(depth)?;
    let mut asm = Assembler::new("u0", Some(Scalar::one()));
    let mut chain = asm.tree.root();
    for i in 0..depth {
        let next = asm.child(
            chain,
            format!("u{}", i + 1),
            params.chain.alpha_sq[i].clone(),
            Some(Scalar::one()),
        );
        let delta = params.delta_sq(i);
        let w = asm.child(
            chain,
            format!("w{i}"),
            params.chain.beta_sq[i].clone(),
            Some(delta.clone()),
        );
        if asm.tree.depth(w) < depth {
            let a = asm.child(
                w,
                format!("a{i}_1"),
                params.chain.beta_sq[i].clone(),
                Some(delta.clone()),
            );
            asm.tail(a, &format!("a{i}"), 2, &delta, depth);
            let b = asm.child(
                w,
                format!("b{i}_1"),
                params.gamma_sq[i].clone(),
                Some(delta.clone()),
            );
            asm.tail(b, &format!("b{i}"), 2, &delta, depth);
        }
        chain = next;
    }
    asm.finish(depth, false)
}

/// `eunb`: full binary tree of the given depth. A zero-weight vertex at
/// depth `n` has children with weights `(0, n+1)`; a vertex of weight
/// `λ ≠ 0` has children with weights `(0, λ)`. Every nonzero weight matches
/// its parent's vertex norm, so the shift is quasinormal with constant 1 on
/// the interior, yet the squared norms `(n+1)²` grow without bound.
pub fn binary_shift(depth: usize) -> WeightedShift {
    let mut asm = Assembler::new("r", None);
    // (vertex, weight at that vertex, depth)
    let mut frontier = vec![(asm.tree.root(), Scalar::zero(), 0usize)];
    while let Some((v, weight, d)) = frontier.pop() {
        if d == depth {
            continue;
        }
        let heavy = if weight.is_zero() {
            Scalar::int(d as i64 + 1)
        } else {
            weight
        };
        let label = asm.tree.label(v).to_string();
        let zero = asm.child(v, format!("{label}0"), Scalar::zero(), None);
        let kept = asm.child(
            v,
            format!("{label}1"),
            heavy.clone() * heavy.clone(),
            None,
        );
        frontier.push((zero, Scalar::zero(), d + 1));
        frontier.push((kept, heavy, d + 1));
    }
    asm.finish(depth, true).expect("binary weights are valid")
}

/// A plain weighted path `v0 → v1 → …`, last vertex marked truncated.
pub fn path_shift(weights: &[Scalar]) -> Result<WeightedShift, FamilyError> {
    if weights.is_empty() {
        return Err(FamilyError::BadParameter(
            "path needs at least one weight".into(),
        ));
    }
    for w in weights {
        require_nonnegative("weight", w)?;
    }
    let mut asm = Assembler::new("v0", None);
    let mut cur = asm.tree.root();
    for (i, w) in weights.iter().enumerate() {
        cur = asm.child(cur, format!("v{}", i + 1), w.clone() * w.clone(), None);
    }
    asm.finish(weights.len(), false)
}

/// Path with squared weights decaying geometrically: `w²_{n+1} = w²_n / q`,
/// starting from 1. Its child norms are the parent norms scaled by `1/q`,
/// so the map `t ↦ √q · t` transports them back: the shift satisfies the
/// transported quasinormality conditions with constant 1 on the interior.
pub fn geometric_path_shift(q: &Scalar, depth: usize) -> Result<WeightedShift, FamilyError> {
    require_positive("q", q)?;
    let mut asm = Assembler::new("v0", None);
    let mut cur = asm.tree.root();
    let mut wsq = Scalar::one();
    for i in 0..depth {
        cur = asm.child(cur, format!("v{}", i + 1), wsq.clone(), None);
        wsq = wsq / q.clone();
    }
    asm.finish(depth, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{
        classify, hyponormality_sum, interior_vertices, modulus_ac, optimal_constant, quasinormal,
        strict_interior_vertices, HypoSum, ScopeKind, Trivalent,
    };
    use crate::scalar::Extended;

    #[test]
    fn comb_reference_instance_depth_five() {
        let s = comb_shift(&CombParams::growing(5).unwrap(), 5).unwrap();
        let report = classify(&s, ScopeKind::Interior);
        assert!(!report.quasinormal);
        assert!(report.weakly_quasinormal);
        assert_eq!(report.optimal_constant, Extended::Finite(Scalar::int(4)));
        assert_eq!(
            report.optimal_constant_witness,
            Some(s.tree().root()),
        );
        assert!(report.modulus_ac);
        assert_eq!(report.hyponormal, Trivalent::False);
        assert_eq!(report.hyponormal_witness, Some(s.tree().root()));
        assert!(report.unbounded_family);
        // Hyponormality data: 3/2 at the root, 5/4 one step down the chain.
        assert_eq!(
            hyponormality_sum(&s, s.tree().root()),
            HypoSum::Value(Scalar::ratio(3, 2))
        );
        let u1 = s.tree().require_vertex("u1").unwrap();
        assert_eq!(hyponormality_sum(&s, u1), HypoSum::Value(Scalar::ratio(5, 4)));
    }

    #[test]
    fn chain_harmonic_constant_tracks_depth_through_hints() {
        for depth in 3..=5usize {
            let s = chain_shift(&ChainParams::harmonic(depth), depth).unwrap();
            let interior = interior_vertices(&s);
            let c = optimal_constant(&s, &interior);
            assert_eq!(
                c.value,
                Extended::Finite(Scalar::int(depth as i64 + 1)),
                "depth {depth}"
            );
            // Without the analytic norms the last chain level is invisible.
            let strict = strict_interior_vertices(&s);
            let c_strict = optimal_constant(&s, &strict);
            assert_eq!(c_strict.value, Extended::Finite(Scalar::int(depth as i64)));
        }
    }

    #[test]
    fn chain_constant_one_is_quasinormal() {
        let s = chain_shift(&ChainParams::constant(4, &Scalar::one()).unwrap(), 4).unwrap();
        let interior = interior_vertices(&s);
        let (qn, _) = quasinormal(&s, &interior);
        assert!(qn);
        assert_eq!(
            optimal_constant(&s, &interior).value,
            Extended::Finite(Scalar::one())
        );
    }

    #[test]
    fn chain_normalization_is_enforced() {
        let bad = ChainParams {
            alpha_sq: vec![Scalar::ratio(1, 2); 3],
            beta_sq: vec![Scalar::ratio(1, 3); 3],
        };
        assert!(matches!(
            chain_shift(&bad, 3),
            Err(FamilyError::ChainNormalization { level: 1, .. })
        ));
    }

    #[test]
    fn branch_hyponormality_matches_tail_weight_condition() {
        // γ² = 1/2 gives δ² = 5/4 > 1: hyponormal.
        let good = BranchParams::constant(4, &Scalar::int(4), &Scalar::ratio(1, 2)).unwrap();
        let s = branch_shift(&good, 4).unwrap();
        let report = classify(&s, ScopeKind::Interior);
        assert_eq!(report.hyponormal, Trivalent::True);
        assert!(!report.quasinormal);
        assert_eq!(report.optimal_constant, Extended::Finite(Scalar::int(4)));
        assert!(report.modulus_ac);
        // γ² = 1/8 gives δ² = 7/8 < 1: the chain sums exceed 1.
        let bad = BranchParams::constant(4, &Scalar::int(4), &Scalar::ratio(1, 8)).unwrap();
        let s = branch_shift(&bad, 4).unwrap();
        let report = classify(&s, ScopeKind::Interior);
        assert_eq!(report.hyponormal, Trivalent::False);
        // The two readings of the margin agree level by level.
        for p in [&good, &bad] {
            for i in 0..4 {
                assert_eq!(p.condition_strict_sum(i), p.condition_tail_weight(i));
            }
        }
    }

    #[test]
    fn branch_vertices_sum_to_exactly_one() {
        let p = BranchParams::constant(3, &Scalar::int(2), &Scalar::int(1)).unwrap();
        let s = branch_shift(&p, 3).unwrap();
        let w0 = s.tree().require_vertex("w0").unwrap();
        assert_eq!(hyponormality_sum(&s, w0), HypoSum::Value(Scalar::one()));
    }

    #[test]
    fn binary_family_is_quasinormal_with_growing_norms() {
        let s = binary_shift(4);
        assert_eq!(s.tree().vertex_count(), 31);
        let interior = interior_vertices(&s);
        let (qn, _) = quasinormal(&s, &interior);
        assert!(qn);
        assert_eq!(
            optimal_constant(&s, &interior).value,
            Extended::Finite(Scalar::one())
        );
        let (ac, _) = modulus_ac(&s, &interior);
        assert!(ac);
        assert!(s.unbounded_family());
        // Deepest zero-weight vertices see squared norm depth².
        assert_eq!(s.norm_bound(), Scalar::int(4));
    }

    #[test]
    fn comb_norms_are_the_advertised_rationals() {
        let s = comb_shift(&CombParams::growing(5).unwrap(), 5).unwrap();
        let r0 = s.tree().require_vertex("r0").unwrap();
        assert_eq!(s.norm_sq(r0), &Scalar::ratio(4, 3));
        let r2 = s.tree().require_vertex("r2").unwrap();
        assert_eq!(s.norm_sq(r2), &Scalar::ratio(10, 3));
        assert_eq!(s.norm_sq(s.tree().root()), &Scalar::ratio(4, 3));
    }

    #[test]
    fn geometric_path_transport_ratio() {
        let s = geometric_path_shift(&Scalar::int(4), 4).unwrap();
        // Squared norms march down by a factor of 4 per level.
        for i in 0..3 {
            let u = s.tree().require_vertex(&format!("v{i}")).unwrap();
            let v = s.tree().require_vertex(&format!("v{}", i + 1)).unwrap();
            let scaled = Scalar::int(4) * s.norm_sq(v).clone();
            assert_eq!(&scaled, s.norm_sq(u), "level {i}");
        }
    }

    #[test]
    fn family_tokens_round_trip() {
        for token in ["eunb", "fig1", "fig2", "fig3", "path"] {
            let f: Family = token.parse().unwrap();
            assert_eq!(f.to_string(), token);
        }
        assert!(matches!(
            "fig9".parse::<Family>(),
            Err(FamilyError::UnknownFamily(_))
        ));
    }
}
