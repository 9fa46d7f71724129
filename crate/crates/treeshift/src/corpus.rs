//! Seeded random instances for cross-checking the per-vertex criteria
//! against the matrix oracle.
//!
//! Tree weights come from a small exact-rational palette whose squared
//! values are at least 1/144 apart, so float-mode clustering in the oracle
//! recovers the exact equality classes with room to spare.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::oracle::cmatrix::{vnorm_sq, CMatrix};
use crate::oracle::hermitian_eigen;
use crate::scalar::Scalar;
use crate::shift::{ShiftBuilder, WeightedShift};
use crate::tree::DirectedTree;

/// Exact weights used by the random tree generators.
pub fn weight_palette() -> Vec<Scalar> {
    vec![
        Scalar::zero(),
        Scalar::ratio(1, 4),
        Scalar::ratio(1, 3),
        Scalar::ratio(1, 2),
        Scalar::one(),
        Scalar::int(2),
        Scalar::int(3),
        Scalar::int(4),
    ]
}

/// Random rooted tree (≤ 25 vertices) with palette weights; no truncation
/// marks, so the full scope and the interior coincide.
pub fn random_tree_shift(seed: u64) -> WeightedShift {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = rng.gen_range(2..=25);
    let mut tree = DirectedTree::new("n0");
    let mut vertices = vec![tree.root()];
    for i in 1..n {
        let parent = vertices[rng.gen_range(0..vertices.len())];
        let v = tree.add_child(parent, format!("n{i}")).unwrap();
        vertices.push(v);
    }
    let palette = weight_palette();
    let mut b = ShiftBuilder::new(tree);
    for &v in &vertices[1..] {
        b = b.weight(v, palette.choose(&mut rng).unwrap().clone());
    }
    b.build().unwrap()
}

/// Random weighted path with positive palette weights, last vertex marked
/// truncated. A fifth of the draws are constant paths — quasinormal on the
/// interior — so both verdicts stay represented.
pub fn random_path_shift(seed: u64) -> WeightedShift {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = rng.gen_range(3..=10);
    let positive: Vec<Scalar> = weight_palette()
        .into_iter()
        .filter(|w| w.is_positive())
        .collect();
    let constant = rng.gen_range(0..5) == 0;
    let fixed = positive[rng.gen_range(0..positive.len())].clone();

    let mut tree = DirectedTree::new("v0");
    let mut cur = tree.root();
    let mut verts = Vec::new();
    for i in 1..=len {
        cur = tree.add_child(cur, format!("v{i}")).unwrap();
        verts.push(cur);
    }
    let mut b = ShiftBuilder::new(tree);
    for &v in &verts {
        let w = if constant {
            fixed.clone()
        } else {
            positive[rng.gen_range(0..positive.len())].clone()
        };
        b = b.weight(v, w);
    }
    b.truncated(cur).build().unwrap()
}

/// Dense matrix with i.i.d. complex Gaussian entries scaled by 1/√dim.
pub fn random_dense(seed: u64, dim: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (dim as f64).sqrt();
    CMatrix::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * scale
    })
}

/// Haar-ish random unitary: the eigenvector matrix of a random Hermitian.
pub fn random_unitary(seed: u64, dim: usize) -> CMatrix {
    let g = random_dense(seed, dim);
    let h = g.add(&g.adjoint());
    let (_, v) = hermitian_eigen(&h).expect("random Hermitian eigen converges");
    v
}

/// Normalized random complex vector.
pub fn random_vector(seed: u64, dim: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = vnorm_sq(&f).sqrt();
    for z in f.iter_mut() {
        *z /= norm;
    }
    f
}

/// Random quasinormal matrix `A = Q · B · diag(t) · Q*`: `Q` unitary, `t`
/// drawn from a gapped palette with repetitions, and `B` block-unitary on
/// each repeated-`t` block. Then `|A| = Q diag(t) Q*` commutes with the
/// polar factor, so the optimal constant is exactly 1 (or 0 if `t ≡ 0`).
pub fn random_quasinormal(seed: u64, dim: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let palette = [0.0, 0.5, 1.0, 2.0, 3.0];
    let mut t: Vec<f64> = (0..dim)
        .map(|_| palette[rng.gen_range(0..palette.len())])
        .collect();
    // Group equal values into contiguous blocks.
    t.sort_by(f64::total_cmp);

    let q = random_unitary(rng.gen(), dim);
    let mut b = CMatrix::zeros(dim);
    let mut start = 0;
    while start < dim {
        let mut end = start;
        while end + 1 < dim && t[end + 1] == t[start] {
            end += 1;
        }
        let block = end - start + 1;
        // The zero block contributes nothing to A; identity keeps B unitary.
        if t[start] == 0.0 || block == 1 {
            for i in start..=end {
                b.set(i, i, Complex64::new(1.0, 0.0));
            }
        } else {
            let u = random_unitary(rng.gen(), block);
            for i in 0..block {
                for j in 0..block {
                    b.set(start + i, start + j, u.at(i, j));
                }
            }
        }
        start = end + 1;
    }
    q.mul(&b).mul(&CMatrix::diag(&t)).mul(&q.adjoint())
}

/// Contraction that is isometric exactly on a rank-`rank` coordinate
/// subspace: `T = V (P + s(I−P))` with `V` unitary and `s ∈ [0, 1)`.
/// Returns the operator together with the subspace projection.
pub fn contraction_isometric_on_subspace(seed: u64, dim: usize, rank: usize) -> (CMatrix, CMatrix) {
    assert!(rank <= dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s: f64 = rng.gen_range(0.0..0.9);
    let p = CMatrix::coordinate_projection(dim, 0..rank);
    let rest = CMatrix::identity(dim).sub(&p).scale(Complex64::new(s, 0.0));
    let v = random_unitary(rng.gen(), dim);
    (v.mul(&p.add(&rest)), p)
}

/// 2×2 operator that is isometric on the first basis vector yet has norm
/// strictly above 1: first column (1/√2, 1/√2), second column random with
/// the non-degeneracy margin `|b + d| ≥ 0.1` enforced by redrawing.
pub fn isometric_but_expanding(seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    loop {
        let b = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let d = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        if (b + d).norm() < 0.1 {
            continue;
        }
        let mut m = CMatrix::zeros(2);
        m.set(0, 0, Complex64::new(h, 0.0));
        m.set(1, 0, Complex64::new(h, 0.0));
        m.set(0, 1, b);
        m.set(1, 1, d);
        return m;
    }
}
