use onehot_core::comparators::*;
use onehot_core::representations::{greater_map_of, Orientation};
use onehot_core::simd::{ArithmeticProfile, HeContext, PlainVec};

fn bits(v: u32, w: usize) -> Vec<u8> {
    (0..w).map(|i| ((v >> i) & 1) as u8).collect()
}

/// Every ordered pair of `w`-bit values, one pair per slot.
fn all_pairs(w: usize) -> (Vec<Vec<u8>>, Vec<Vec<u8>>, Vec<bool>) {
    let m = 1u32 << w;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut eq = Vec::new();
    for x in 0..m {
        for y in 0..m {
            a.push(bits(x, w));
            b.push(bits(y, w));
            eq.push(x == y);
        }
    }
    (a, b, eq)
}

#[test]
fn eq_approx_sweep_over_100() {
    let cfg = EqConfig::default();
    let ctx = HeContext::with_profile(128, ArithmeticProfile::fixed(42, 16)).unwrap();
    let xs: Vec<i64> = (0..100).collect();
    let x = ctx.encrypt_ints(&xs).unwrap();
    let mut worst: f64 = 0.0;
    for c in 0..100 {
        let y = PlainVec::broadcast(onehot_core::rational::int(c), 128);
        let r = eq_approx(&ctx, &x, Operand::Plain(&y), &cfg).unwrap();
        assert_eq!(r.cost.max_depth, cfg.advertised_depth());
        let out = ctx.decrypt_real(&r.output);
        for (xv, o) in xs.iter().zip(&out) {
            let want = if *xv == c { 1.0 } else { 0.0 };
            worst = worst.max((o - want).abs());
        }
    }
    assert!(worst <= 0.05, "max error {worst}");
    assert!((worst - cfg.predicted_error()).abs() < 1e-6);
}

#[test]
fn eq_approx_exact_on_equal_inputs() {
    let ctx = HeContext::exact(8).unwrap();
    let x = ctx.encrypt_ints(&[3, 3, 7, 0]).unwrap();
    let cfg = EqConfig::for_domain(8);
    let r = eq_approx(&ctx, &x, Operand::Cipher(&x), &cfg).unwrap();
    let exact = ctx.decrypt_exact(&r.output).unwrap();
    assert!(exact[..4].iter().all(|v| *v == num_complex::Complex::new(onehot_core::rational::int(1), onehot_core::rational::int(0))));
    assert_eq!(r.cost.ct_mults, cfg.ct_mults());
}

#[test]
fn eq_error_shrinks_with_rounds() {
    let errs: Vec<f64> = (2..=8)
        .map(|r| EqConfig { sharpen_iters: r, ..EqConfig::default() }.predicted_error())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(EqConfig::default().meets_beta());
}

#[test]
fn bitvec_equal_exhaustive_and_costs() {
    for w in 1..=4 {
        let (a, b, eq) = all_pairs(w);
        let ctx = HeContext::exact(256).unwrap();
        let p = BitVecPair::encrypt(&ctx, &a, &b).unwrap();
        let r = bitvec_equal(&ctx, &p).unwrap();
        let out = ctx.decrypt_real(&r.output);
        for (o, e) in out.iter().zip(&eq) {
            assert_eq!(*o, if *e { 1.0 } else { 0.0 });
        }
        assert_eq!(r.cost.ct_mults, 2 * w as u64 - 1);
        assert_eq!(r.cost.max_depth, onehot_core::representations::ceil_log2(w as u64) + 1);
    }
}

#[test]
fn small_bitvec_examples() {
    let ctx = HeContext::exact(4).unwrap();
    let p = BitVecPair::encrypt(&ctx, &[vec![1, 0, 1], vec![1, 1, 0]], &[vec![1, 0, 1], vec![1, 0, 0]]).unwrap();
    let out = ctx.decrypt_real(&bitvec_equal(&ctx, &p).unwrap().output);
    assert_eq!(&out[..2], &[1.0, 0.0]);
}

#[test]
fn xorsum_and_complex_agree_with_oracle() {
    for w in [2usize, 4] {
        let zt = onehot_core::representations::ceil_log2(w as u64) + 3;
        let (a, b, eq) = all_pairs(w);
        let ctx = HeContext::exact(256).unwrap();
        let p = BitVecPair::encrypt(&ctx, &a, &b).unwrap();
        let xs = bitvec_equal_xorsum(&ctx, &p, zt).unwrap();
        assert_eq!(xs.cost.ct_mults, w as u64 + zt as u64);
        let ac = encrypt_bit_pairs(&ctx, &a).unwrap();
        let bc = encrypt_bit_pairs(&ctx, &b).unwrap();
        let cx = bitvec_equal_complex(&ctx, &ac, &bc, zt).unwrap();
        assert_eq!(cx.cost.ct_mults, w as u64 / 2 + zt as u64);
        assert_eq!(cx.cost.conjugations, w as u64 / 2);
        let bound = zero_test_bound(w as u64, zt);
        let direct = ctx.decrypt_real(&bitvec_equal(&ctx, &p).unwrap().output);
        let xs = ctx.decrypt_real(&xs.output);
        let cx = ctx.decrypt_real(&cx.output);
        for i in 0..eq.len() {
            if eq[i] {
                assert_eq!((xs[i], cx[i]), (1.0, 1.0));
            } else {
                assert!(xs[i] <= bound && cx[i] <= bound);
            }
            assert!((xs[i] - direct[i]).abs() < 1e-3 && (cx[i] - xs[i]).abs() < 1e-12);
        }
    }
}

#[test]
fn complex_pair_norms_are_small_integers() {
    let ctx = HeContext::exact(16).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for x in 0..4u32 {
        for y in 0..4u32 {
            a.push(bits(x, 2));
            b.push(bits(y, 2));
        }
    }
    let ac = encrypt_bit_pairs(&ctx, &a).unwrap();
    let bc = encrypt_bit_pairs(&ctx, &b).unwrap();
    let d = ctx.sub(&ac[0], &bc[0]).unwrap();
    let norm = ctx.decrypt(&ctx.mul(&d, &ctx.conjugate(&d).unwrap()).unwrap());
    for v in norm {
        assert_eq!(v.im, 0.0);
        assert!([0.0, 1.0, 2.0].contains(&v.re));
    }
    assert!(encrypt_bit_pairs(&ctx, &[vec![1, 0, 1]]).is_err());
}

#[test]
fn one_differing_bit_zero_test_value() {
    let ctx = HeContext::exact(2).unwrap();
    let p = BitVecPair::encrypt(&ctx, &[vec![1, 0, 0, 0, 0, 0, 0, 0]], &[vec![0; 8]]).unwrap();
    let out = ctx.decrypt_real(&bitvec_equal_xorsum(&ctx, &p, 6).unwrap().output)[0];
    assert!((out - (7.0f64 / 8.0).powi(64)).abs() < 1e-15);
    assert!(out <= (-8.0f64).exp());
}

#[test]
fn ge_both_paths_exhaustive() {
    let n = 8;
    let ctx = HeContext::exact(n).unwrap();
    for a in 0..n {
        let g = greater_map_of(a, n, Orientation::Greater).unwrap();
        let g_ct = ctx.encrypt_ints(&g.bits.iter().map(|&b| b as i64).collect::<Vec<_>>()).unwrap();
        for b in 0..n {
            let plain = ge_via_maps(&ctx, &g_ct, GeOperand::Plain(b), n).unwrap();
            assert_eq!(plain.cost, Default::default());
            let onehot: Vec<i64> = (0..n).map(|i| i64::from(i == b)).collect();
            let o = ctx.encrypt_ints(&onehot).unwrap();
            let enc = ge_via_maps(&ctx, &g_ct, GeOperand::Cipher(&o), n).unwrap();
            let want = if b > a { 1.0 } else { 0.0 };
            assert_eq!(ctx.decrypt_real(&plain.output.ct)[plain.output.slot], want);
            assert_eq!(ctx.decrypt_real(&enc.output.ct)[enc.output.slot], want);
            assert_eq!((enc.cost.ct_mults, enc.cost.max_depth, enc.slot_mults), (1, 1, n as u64));
        }
    }
}

#[test]
fn range_check_exhaustive_n10() {
    let n = 10;
    let ctx = HeContext::exact(16).unwrap();
    for v in 0..n {
        let m = ctx.encrypt_ints(&(0..n).map(|i| i64::from(i == v)).collect::<Vec<_>>()).unwrap();
        for a in 0..n {
            for b in a..n {
                let want = if (a..=b).contains(&v) { 1.0 } else { 0.0 };
                for path in [RangePath::MapProduct, RangePath::IntervalMask] {
                    let r = range_check(&ctx, &m, a, b, n, path).unwrap();
                    assert_eq!(ctx.decrypt_real(&r.output)[0], want);
                }
            }
        }
        assert!(range_check(&ctx, &m, 7, 3, n, RangePath::IntervalMask).is_err());
    }
    let m = ctx.encrypt_ints(&[0, 0, 1]).unwrap();
    let prod = range_check(&ctx, &m, 0, 2, 3, RangePath::MapProduct).unwrap();
    let mask = range_check(&ctx, &m, 0, 2, 3, RangePath::IntervalMask).unwrap();
    assert_eq!((prod.cost.pt_mults, prod.cost.ct_mults, prod.cost.max_depth), (2, 1, 2));
    assert_eq!((mask.cost.pt_mults, mask.cost.ct_mults, mask.cost.max_depth), (1, 0, 1));
}
