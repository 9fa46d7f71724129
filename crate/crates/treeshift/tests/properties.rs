//! Property-based checks tying the per-vertex classification, the measure
//! layer, and the matrix oracle together on randomized inputs.

use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use treeshift::corpus::{random_tree_shift, weight_palette};
use treeshift::oracle::{MatrixOperator, Tolerances};
use treeshift::{
    generalized_optimal_constant, hyponormal, image_measure, modulus_ac, modulus_measure,
    optimal_constant, power_identity_residual, quasinormal, scope_vertices, AtomMap,
    BranchParams, DirectedTree, Extended, FiniteVector, Scalar, ScopeKind, ShiftBuilder, Vertex,
    WeightedShift,
};

/// Random shift on a random rooted tree: every non-root vertex picks a
/// parent among the vertices created before it and a palette weight.
fn arb_tree_shift() -> impl Strategy<Value = WeightedShift> {
    prop::collection::vec((any::<prop::sample::Index>(), 0usize..8), 1..20).prop_map(|spec| {
        let palette = weight_palette();
        let mut tree = DirectedTree::new("v0");
        let mut verts = vec![tree.root()];
        for (i, (pidx, _)) in spec.iter().enumerate() {
            let parent = verts[pidx.index(verts.len())];
            let v = tree.add_child(parent, format!("v{}", i + 1)).unwrap();
            verts.push(v);
        }
        let mut b = ShiftBuilder::new(tree);
        for (i, (_, widx)) in spec.iter().enumerate() {
            b = b.weight(verts[i + 1], palette[*widx].clone());
        }
        b.build().unwrap()
    })
}

type SparseEntries = Vec<(prop::sample::Index, f64, f64)>;

/// A shift together with two sparse complex vectors supported on its tree.
fn arb_shift_and_vectors() -> impl Strategy<Value = (WeightedShift, FiniteVector, FiniteVector)> {
    arb_tree_shift().prop_flat_map(|s| {
        let verts: Vec<Vertex> = s.tree().vertices().collect();
        let entries = prop::collection::vec(
            (any::<prop::sample::Index>(), -4.0f64..4.0, -4.0f64..4.0),
            1..=6,
        );
        (Just(s), entries.clone(), entries).prop_map(move |(s, e1, e2)| {
            let build = |entries: SparseEntries| {
                let mut f = FiniteVector::zero();
                for (idx, re, im) in entries {
                    f.add_to(verts[idx.index(verts.len())], Complex64::new(re, im));
                }
                f
            };
            (s, build(e1), build(e2))
        })
    })
}

fn full_scope(s: &WeightedShift) -> BTreeSet<Vertex> {
    scope_vertices(s, ScopeKind::Full)
}

proptest! {
    #[test]
    fn descendants_match_parent_chains(s in arb_tree_shift()) {
        let tree = s.tree();
        for u in tree.vertices() {
            let desc = tree.descendants(u);
            for v in tree.vertices() {
                let mut reaches = false;
                let mut cur = v;
                while let Some(p) = tree.parent(cur) {
                    if p == u {
                        reaches = true;
                        break;
                    }
                    cur = p;
                }
                prop_assert_eq!(desc.contains(&v), reaches);
            }
        }
        prop_assert!(tree.children_partition_check());
    }

    #[test]
    fn apply_is_linear(
        (s, f, g) in arb_shift_and_vectors(), a_re in -3.0f64..3.0, b_re in -3.0f64..3.0)
    {
        let a = Complex64::new(a_re, 0.7);
        let b = Complex64::new(b_re, -0.2);
        let lhs = s.apply(&f.scale(a).add(&g.scale(b)));
        let rhs = s.apply(&f).scale(a).add(&s.apply(&g).scale(b));
        for v in s.tree().vertices() {
            prop_assert!((lhs.get(v) - rhs.get(v)).norm() < 1e-9);
        }
    }

    #[test]
    fn apply_norm_matches_vertex_norms((s, f, _) in arb_shift_and_vectors()) {
        let expected: f64 = f
            .entries()
            .iter()
            .map(|(&u, amp)| s.raw_norm_sq(u).to_f64() * amp.norm_sqr())
            .sum();
        let got = s.apply(&f).norm_sq();
        prop_assert!((got - expected).abs() <= 1e-9 * expected.max(1.0));
    }

    #[test]
    fn images_of_distinct_basis_vectors_are_orthogonal(s in arb_tree_shift()) {
        let verts: Vec<Vertex> = s.tree().vertices().collect();
        for &u in verts.iter().take(6) {
            for &w in verts.iter().take(6) {
                if u == w {
                    continue;
                }
                let su = s.apply(&FiniteVector::basis(u));
                let sw = s.apply(&FiniteVector::basis(w));
                let inner: Complex64 = su
                    .entries()
                    .iter()
                    .map(|(&v, amp)| amp.conj() * sw.get(v))
                    .sum();
                prop_assert!(inner.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn measure_totals_agree((s, f, _) in arb_shift_and_vectors()) {
        let modulus = modulus_measure(&s, &f, &Scalar::one()).unwrap();
        let image = image_measure(&s, &f);
        // Both totals equal ‖Sf‖²: the modulus measure weighs each vertex by
        // its squared norm, the image measure distributes the same mass over
        // the children.
        prop_assert!(modulus.total_mass().eq_within(&image.total_mass(), 1e-9));
        prop_assert!(
            image.total_mass().eq_within(&Scalar::float(s.apply(&f).norm_sq()), 1e-9)
        );
    }

    #[test]
    fn measure_scaling_and_pushforward_preserve_structure(
        (s, f, _) in arb_shift_and_vectors(), c_num in 1i64..20, q in 1i64..6)
    {
        let m = image_measure(&s, &f);

        let c = Scalar::ratio(c_num, 7);
        let scaled = m.scaled(&c).unwrap();
        prop_assert!(scaled.total_mass().eq_within(&(m.total_mass() * c), 1e-12));
        prop_assert_eq!(scaled.atom_count(), m.atom_count());

        let map = AtomMap::sqrt_scale(Scalar::int(q)).unwrap();
        let pushed = m.pushforward(&map);
        prop_assert!(pushed.total_mass().eq_within(&m.total_mass(), 1e-12));

        if !m.is_zero() {
            prop_assert!(m.absolutely_continuous(&m));
            prop_assert!(
                m.density_sup(&m).eq_within(&Extended::Finite(Scalar::one()), 1e-12)
            );
        }
    }

    #[test]
    fn classification_is_scale_invariant(s in arb_tree_shift(), num in 1i64..10) {
        let t_sq = Scalar::ratio(num, 3);
        let mut b = ShiftBuilder::new(s.tree().clone());
        for v in s.tree().vertices() {
            if let Some(wsq) = s.weight_sq(v) {
                b = b.weight_sq(v, wsq.clone() * t_sq.clone());
            }
        }
        let scaled = b.build().unwrap();

        let scope = full_scope(&s);
        prop_assert_eq!(quasinormal(&s, &scope).0, quasinormal(&scaled, &scope).0);
        prop_assert_eq!(modulus_ac(&s, &scope).0, modulus_ac(&scaled, &scope).0);
        prop_assert_eq!(
            optimal_constant(&s, &scope).value,
            optimal_constant(&scaled, &scope).value
        );
        prop_assert_eq!(hyponormal(&s, &scope).0, hyponormal(&scaled, &scope).0);
    }

    #[test]
    fn optimal_constant_is_zero_or_at_least_one(s in arb_tree_shift()) {
        let scope = full_scope(&s);
        match optimal_constant(&s, &scope).value {
            Extended::Infinite => {}
            Extended::Finite(c) => {
                prop_assert!(c.is_zero() || c >= Scalar::one(), "constant {}", c);
            }
        }
    }

    #[test]
    fn quasinormal_iff_constant_is_one(s in arb_tree_shift()) {
        let scope = full_scope(&s);
        let (qn, witness) = quasinormal(&s, &scope);
        let c = optimal_constant(&s, &scope).value;
        if qn {
            prop_assert!(witness.is_none());
            if s.is_zero_on(&scope) {
                prop_assert_eq!(c, Extended::zero());
            } else {
                prop_assert_eq!(c, Extended::Finite(Scalar::one()));
            }
            // Quasinormality forces the support condition.
            prop_assert!(modulus_ac(&s, &scope).0);
        } else {
            prop_assert!(witness.is_some());
            prop_assert_ne!(c, Extended::Finite(Scalar::one()));
        }
    }

    #[test]
    fn generalized_constant_with_identities_matches_plain(s in arb_tree_shift()) {
        let scope = full_scope(&s);
        let plain = optimal_constant(&s, &scope);
        let gen =
            generalized_optimal_constant(&s, &AtomMap::identity(), &AtomMap::identity(), &scope);
        prop_assert_eq!(plain.value, gen.value);
    }

    #[test]
    fn power_identity_holds_exactly_on_quasinormal_shifts(
        depth in 2usize..6, alpha_case in 0usize..3)
    {
        let s = treeshift::binary_shift(depth);
        let alpha = [Scalar::ratio(1, 2), Scalar::one(), Scalar::int(2)][alpha_case].clone();
        for u in scope_vertices(&s, ScopeKind::Interior) {
            let r = power_identity_residual(&s, u, &alpha).unwrap();
            prop_assert!(r.is_zero(), "residual {} at {:?}", r, u);
        }
    }

    #[test]
    fn branch_tail_conditions_are_equivalent(
        c in 2i64..6, g_num in 1i64..9, depth in 3usize..6)
    {
        let gamma_sq = Scalar::ratio(g_num, 4);
        let params = BranchParams::constant(depth, &Scalar::int(c), &gamma_sq).unwrap();
        for i in 0..depth.saturating_sub(1) {
            prop_assert_eq!(
                params.condition_strict_sum(i),
                params.condition_tail_weight(i),
                "level {}", i
            );
        }
    }
}

proptest! {
    // Oracle runs dense eigensolves; keep the case count moderate.
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_agrees_with_per_vertex_classification(seed in any::<u64>()) {
        let s = random_tree_shift(seed);
        let scope = full_scope(&s);
        let op = MatrixOperator::from_shift(&s, Tolerances::default()).unwrap();

        let expected = treeshift::classify::quasinormal_matrix(&s, &scope).0;
        let q = op.check_quasinormal(None, 5, seed);
        prop_assert_eq!(q.verdict, Some(expected), "oracle faces: {:?}", q);

        let c_vertex = treeshift::classify::optimal_constant_matrix(&s, &scope).value;
        let c_oracle = op.optimal_constant(None).unwrap().value;
        match (&c_vertex, &c_oracle) {
            (Extended::Infinite, Extended::Infinite) => {}
            (Extended::Finite(a), Extended::Finite(b)) => {
                let (a, b) = (a.to_f64(), b.to_f64());
                prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{} vs {}", a, b);
            }
            _ => prop_assert!(false, "finiteness mismatch: {} vs {}", c_vertex, c_oracle),
        }
    }

    #[test]
    fn oracle_measures_match_library_measures(seed in any::<u64>()) {
        let s = random_tree_shift(seed);
        let op = MatrixOperator::from_shift(&s, Tolerances::default()).unwrap();
        let n = s.tree().vertex_count();

        for u in s.tree().vertices().take(4) {
            let f = FiniteVector::basis(u);
            let ma = op.measure_pair(&f.to_dense(n));
            let modulus = modulus_measure(&s, &f, &Scalar::one()).unwrap();
            let image = image_measure(&s, &f);
            for (k, &loc) in ma.locations_sq.iter().enumerate() {
                let loc = Scalar::float(loc);
                prop_assert!(
                    modulus
                        .mass_near(&loc, 1e-5)
                        .eq_within(&Scalar::float(ma.modulus_mass[k]), 1e-7)
                );
                prop_assert!(
                    image
                        .mass_near(&loc, 1e-5)
                        .eq_within(&Scalar::float(ma.image_mass[k]), 1e-7)
                );
            }
            prop_assert!(
                Scalar::float(ma.modulus_mass.iter().sum::<f64>())
                    .eq_within(&modulus.total_mass(), 1e-7)
            );
            prop_assert!(
                Scalar::float(ma.image_mass.iter().sum::<f64>())
                    .eq_within(&image.total_mass(), 1e-7)
            );
        }
    }
}
