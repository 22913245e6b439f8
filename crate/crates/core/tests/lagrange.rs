use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use onehot_core::comparators::EqConfig;
use onehot_core::conversions::*;
use onehot_core::rational::{frac, int};
use onehot_core::simd::{ArithmeticProfile, ExactComplex, HeContext};
use onehot_core::HeError;

fn one_hot_exact(ctx: &HeContext, outs: &[onehot_core::simd::CipherVec], samples: usize) -> Vec<Vec<BigRational>> {
    let cols: Vec<Vec<ExactComplex>> = outs.iter().map(|o| ctx.decrypt_exact(o).unwrap()).collect();
    (0..samples).map(|j| cols.iter().map(|c| {
        assert!(c[j].im.is_zero());
        c[j].re.clone()
    }).collect()).collect()
}

fn all_classes(ctx: &HeContext, n: usize) -> onehot_core::simd::CipherVec {
    ctx.encrypt_ints(&(0..n as i64).collect::<Vec<_>>()).unwrap()
}

#[test]
fn denominators_match_brute_force_sign_and_symmetry() {
    for n in [4usize, 8, 16, 32] {
        let s = LagrangeDenominators::new(n);
        for c in 1..=n {
            let brute: BigInt = (1..=n as i64).filter(|&i| i != c as i64).map(|i| BigInt::from(c as i64 - i)).product();
            assert_eq!(s.get(c), &brute);
            let positive = (n - c) % 2 == 0;
            assert_eq!(s.get(c).is_positive(), positive, "n={n} c={c}");
            assert_eq!(s.get(c), &-s.get(n + 1 - c));
        }
    }
}

#[test]
fn phase_one_tree_for_eight() {
    let sets = phase_one_sets(3);
    let as_vec = |l: usize| -> Vec<Vec<i64>> { sets[l].iter().map(|s| s.iter().copied().collect()).collect() };
    assert_eq!(as_vec(0), vec![vec![-7], vec![1], vec![-5], vec![3], vec![-3], vec![5], vec![-1], vec![7]]);
    assert_eq!(as_vec(1), vec![vec![-6, -5], vec![1, 2], vec![-2, -1], vec![5, 6]]);
    assert_eq!(as_vec(2), vec![vec![-4, -3, -2, -1], vec![1, 2, 3, 4]]);
}

#[test]
fn shadow_constants_for_eight() {
    let t = build_shadow_tree(8).unwrap();
    // the last pair looks like it could stay unswapped; the swap rule and
    // the path identity both put 7 first
    let leaves: Vec<BigRational> = [1, -7, 3, -5, 5, -3, 7, -1].iter().map(|&d| frac(1, d)).collect();
    assert_eq!(t.level(0), &leaves[..]);
    assert_eq!(t.level(1), &[frac(-7, 2), frac(-1, 2), frac(-1, 2), frac(-7, 2)][..]);
    assert_eq!(t.level(2), &[frac(5, 2), frac(5, 2)][..]);
}

#[test]
fn shadow_path_products_are_inverse_denominators() {
    for ell in 1..=6 {
        let n = 1usize << ell;
        let t = build_shadow_tree(n).unwrap();
        let s = LagrangeDenominators::new(n);
        for c in 0..n {
            let mut acc = BigRational::one();
            for l in 0..ell {
                acc *= t.subtree_product(l, (c >> l) ^ 1);
            }
            assert_eq!(acc, s.inverse(c + 1), "n={n} c={c}");
        }
    }
}

#[test]
fn shadow_json_round_trip() {
    let t = build_shadow_tree(8).unwrap();
    let v = serde_json::to_value(&t).unwrap();
    assert_eq!(v["numerator"], "1");
    assert_eq!(v["children"][0]["numerator"], "5");
    assert_eq!(v["children"][0]["denominator"], "2");
    let back: ShadowTree = serde_json::from_value(v).unwrap();
    assert_eq!(back, t);
    assert!(matches!(build_shadow_tree(12), Err(HeError::NotPowerOfTwo(12))));
}

#[test]
fn shadow_bounds_small_levels() {
    let rows = shadow_bounds(5).unwrap();
    let want = [(1.0 / 3.0, 1.0), (1.0 / 7.0, 2.5), (1.0 / 15.0, 91.0 / 6.0), (1.0 / 31.0, 292.5)];
    for (r, (lo, hi)) in rows.iter().zip(want) {
        assert!((r.min - lo).abs() < 1e-12 && (r.max - hi).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn four_classes_single_value() {
    let ctx = HeContext::exact(4).unwrap();
    let x = ctx.encrypt_ints(&[1]).unwrap();
    let run = numeric_to_one_hot_alg1(&ctx, &x, 4, None, PathOrder::LeafToRoot).unwrap();
    let got = one_hot_exact(&ctx, &run.outputs.output, 1);
    assert_eq!(got[0], vec![int(0), int(1), int(0), int(0)]);
}

#[test]
fn alg2_leaves_before_scaling_are_cubic_products() {
    // leaves of the second tree equal prod_{i != c}(x - i); dividing by S[c]
    // gives P_c, so check P_c against the rational oracle at all points
    let n = 4;
    let ctx = HeContext::exact(n).unwrap();
    let run = numeric_to_one_hot_alg2(&ctx, &all_classes(&ctx, n), n, None).unwrap();
    let got = one_hot_exact(&ctx, &run.outputs.output, n);
    for (x, row) in got.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert_eq!(*v, lagrange_oracle(n, c + 1, x as i64 + 1));
        }
    }
}

#[test]
fn tree_algorithms_match_oracle_exactly() {
    for n in [4usize, 8, 16, 32] {
        let ctx = HeContext::exact(n).unwrap();
        let x = all_classes(&ctx, n);
        let shadow = build_shadow_tree(n).unwrap();
        let runs = [
            numeric_to_one_hot_alg1(&ctx, &x, n, None, PathOrder::LeafToRoot).unwrap(),
            numeric_to_one_hot_alg1(&ctx, &x, n, Some(&shadow), PathOrder::LeafToRoot).unwrap(),
            numeric_to_one_hot_alg1(&ctx, &x, n, None, PathOrder::RootToLeaf).unwrap(),
            numeric_to_one_hot_alg2(&ctx, &x, n, None).unwrap(),
            numeric_to_one_hot_alg2(&ctx, &x, n, Some(&shadow)).unwrap(),
        ];
        for run in runs {
            let got = one_hot_exact(&ctx, &run.outputs.output, n);
            for (a, row) in got.iter().enumerate() {
                for (c, v) in row.iter().enumerate() {
                    assert_eq!(*v, if a == c { int(1) } else { int(0) }, "n={n} a={a} c={c}");
                }
            }
        }
    }
}

#[test]
fn padding_non_power_of_two() {
    let n = 6;
    let ctx = HeContext::exact(8).unwrap();
    let run = numeric_to_one_hot_alg2(&ctx, &all_classes(&ctx, n), n, None).unwrap();
    assert_eq!(run.outputs.output.len(), n);
    let got = one_hot_exact(&ctx, &run.outputs.output, n);
    for (a, row) in got.iter().enumerate() {
        assert_eq!(row.iter().position(|v| v.is_one()), Some(a));
        assert_eq!(row.iter().filter(|v| v.is_zero()).count(), n - 1);
    }
}

#[test]
fn cost_shapes() {
    for ell in 2..=5u32 {
        let n = 1usize << ell;
        let ctx = HeContext::exact(n).unwrap();
        let x = all_classes(&ctx, n);
        let fwd = numeric_to_one_hot_alg1(&ctx, &x, n, None, PathOrder::LeafToRoot).unwrap();
        assert_eq!(fwd.build.ct_mults, n as u64 - 1);
        assert_eq!(fwd.stage.max_depth, ell);
        assert_eq!(fwd.stage.max_pt_free_depth, ell);
        assert_eq!(fwd.stage.ct_mults, n as u64 * (ell as u64 - 1));
        let rev = numeric_to_one_hot_alg1(&ctx, &x, n, None, PathOrder::RootToLeaf).unwrap();
        assert_eq!(rev.stage.max_depth, 2 * ell - 1);
        assert_eq!(rev.stage.max_pt_free_depth, 2 * ell - 2);
        let a2 = numeric_to_one_hot_alg2(&ctx, &x, n, None).unwrap();
        assert_eq!(a2.stage.ct_mults, 2 * n as u64 - 4);
        assert!(a2.stage.ct_mults <= 2 * n as u64);
        assert!(a2.stage.max_depth <= 2 * ell);
    }
}

fn fixed_sweep(n: usize, shadow: bool, alg2: bool) -> Result<f64, HeError> {
    let ctx = HeContext::with_profile(n, ArithmeticProfile::fixed(42, 16))?;
    let x = all_classes(&ctx, n);
    let tree = build_shadow_tree(n).unwrap();
    let sh = shadow.then_some(&tree);
    let run = if alg2 {
        numeric_to_one_hot_alg2(&ctx, &x, n, sh)?
    } else {
        numeric_to_one_hot_alg1(&ctx, &x, n, sh, PathOrder::LeafToRoot)?
    };
    let mut worst: f64 = 0.0;
    for (c, o) in run.outputs.output.iter().enumerate() {
        for (a, v) in ctx.decrypt_real(o).iter().enumerate() {
            worst = worst.max((v - if a == c { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(worst)
}

#[test]
fn fixed_point_overflow_without_shadow() {
    for alg2 in [false, true] {
        for n in [4, 8] {
            assert!(fixed_sweep(n, false, alg2).unwrap() <= 1e-5);
        }
        for n in [16, 32] {
            assert!(matches!(fixed_sweep(n, false, alg2), Err(HeError::Overflow { .. })), "n={n}");
        }
        for n in [4, 8] {
            assert!(fixed_sweep(n, true, alg2).unwrap() <= 1e-5);
        }
        assert!(fixed_sweep(16, true, alg2).unwrap() <= 1e-5);
        // the root's children carry prod of 16 factors over 16!, about 3e8
        // for far-away x: past 2^16 even with the shadow constants
        assert!(matches!(fixed_sweep(32, true, alg2), Err(HeError::Overflow { .. })));
    }
}

#[test]
fn naive_eq_conversion() {
    let n = 100;
    let cfg = EqConfig::for_domain(n as u64);
    let ctx = HeContext::with_profile(128, ArithmeticProfile::fixed(42, 16)).unwrap();
    let mut worst: f64 = 0.0;
    for a in [0i64, 1, 37, 99] {
        let x = ctx.encrypt_ints(&[a]).unwrap();
        let r = numeric_to_one_hot_naive(&ctx, &x, n, &cfg).unwrap();
        assert_eq!(r.cost.max_depth, cfg.advertised_depth());
        assert_eq!(r.slot_mults, cfg.ct_mults() * n as u64);
        for (i, v) in ctx.decrypt_real(&r.output)[..n].iter().enumerate() {
            worst = worst.max((v - if i as i64 == a { 1.0 } else { 0.0 }).abs());
        }
    }
    assert!(worst <= 0.05);
    let ctx = HeContext::exact(4).unwrap();
    let r = numeric_to_one_hot_naive(&ctx, &ctx.encrypt_ints(&[2]).unwrap(), 4, &EqConfig::for_domain(4)).unwrap();
    let out = ctx.decrypt_real(&r.output);
    assert!(out[2] == 1.0 && out[0] < 0.05 && out[1] < 0.05 && out[3] < 0.05);
}
