use onehot_core::comparators::Operand;
use onehot_core::conversions::*;
use onehot_core::representations::*;
use onehot_core::simd::{ArithmeticProfile, CipherVec, HeContext, PlainVec};

fn real(ctx: &HeContext, v: &CipherVec, len: usize) -> Vec<f64> {
    ctx.decrypt_real(v)[..len].to_vec()
}

fn onehot_vec(a: usize, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i == a { 1.0 } else { 0.0 }).collect()
}

#[test]
fn crt_example_thirty() {
    let ctx = HeContext::exact(32).unwrap();
    let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
    let rep = CrtRep::encode(17, &basis).unwrap();
    let subs = encrypt_crt(&ctx, &rep).unwrap();
    let dup = duplicate_submaps(&ctx, &subs, &basis).unwrap();
    let expect = |period: usize, hot: usize| -> Vec<f64> {
        (0..30).map(|i| if i % period == hot { 1.0 } else { 0.0 }).collect()
    };
    assert_eq!(real(&ctx, &dup[0], 30), expect(2, 1));
    assert_eq!(real(&ctx, &dup[1], 30), expect(3, 2));
    assert_eq!(real(&ctx, &dup[2], 30), expect(5, 2));
    let r = crt_to_one_hot(&ctx, &subs, &basis).unwrap();
    assert_eq!(real(&ctx, &r.output, 32), onehot_vec(17, 32));
    assert_eq!((r.cost.ct_mults, r.cost.max_depth, r.slot_mults), (2, 2, 60));
}

#[test]
fn crt_exhaustive_and_trivial_basis() {
    let ctx = HeContext::exact(32).unwrap();
    let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
    for a in 0..30 {
        let subs = encrypt_crt(&ctx, &CrtRep::encode(a, &basis).unwrap()).unwrap();
        let r = crt_to_one_hot(&ctx, &subs, &basis).unwrap();
        assert_eq!(real(&ctx, &r.output, 30), onehot_vec(a as usize, 30));
    }
    let single = CrtBasis::new(vec![7], 7).unwrap();
    let subs = encrypt_crt(&ctx, &CrtRep::encode(4, &single).unwrap()).unwrap();
    let r = crt_to_one_hot(&ctx, &subs, &single).unwrap();
    assert_eq!(r.cost.ct_mults, 0);
    assert_eq!(real(&ctx, &r.output, 7), onehot_vec(4, 7));
}

#[test]
fn crt_depth_is_log_k() {
    let ctx = HeContext::exact(1 << 15).unwrap();
    let basis = find_crt_basis(10000, BasisStrategy::default()).unwrap().basis;
    let subs = encrypt_crt(&ctx, &CrtRep::encode(5678, &basis).unwrap()).unwrap();
    let r = crt_to_one_hot(&ctx, &subs, &basis).unwrap();
    assert_eq!((r.cost.ct_mults, r.cost.max_depth), (4, 3));
    let out = ctx.decrypt_real(&r.output);
    assert_eq!(out[5678], 1.0);
    assert_eq!(out[..10010].iter().sum::<f64>(), 1.0);
}

#[test]
fn hierarchical_reconstruction() {
    let ctx = HeContext::exact(1 << 14).unwrap();
    let basis = build_hier_basis(10000, 3).unwrap();
    for a in [0u64, 1, 5678, 9999, 4321] {
        let rep = encode_hier(a, &basis).unwrap();
        let r = hier_crt_to_one_hot(&ctx, &encrypt_hier(&ctx, &rep).unwrap(), &basis).unwrap();
        let out = ctx.decrypt_real(&r.output);
        assert_eq!(out[a as usize], 1.0, "a={a}");
        assert_eq!(out[..10100].iter().sum::<f64>(), 1.0);
    }
    let ctx = HeContext::exact(64).unwrap();
    let one = build_hier_basis(30, 1).unwrap();
    let flat = CrtBasis::new(vec![6, 7], 42).unwrap();
    for a in 0..30 {
        let h = hier_crt_to_one_hot(&ctx, &encrypt_hier(&ctx, &encode_hier(a, &one).unwrap()).unwrap(), &one).unwrap();
        let c = crt_to_one_hot(&ctx, &encrypt_crt(&ctx, &CrtRep::encode(a, &flat).unwrap()).unwrap(), &flat).unwrap();
        assert_eq!(ctx.decrypt_real(&h.output), ctx.decrypt_real(&c.output));
        assert_eq!(h.cost, c.cost);
    }
    let ctx = HeContext::exact(1 << 14).unwrap();
    let rep = encode_hier(3, &basis).unwrap();
    let leaves = encrypt_hier(&ctx, &rep).unwrap();
    assert!(hier_crt_to_one_hot(&ctx, &leaves[..7], &basis).is_err());
}

#[test]
fn binary_example_three() {
    let ctx = HeContext::exact(8).unwrap();
    let bits: Vec<CipherVec> = BinaryRep::encode(3, 8).unwrap().bits().iter().map(|&b| ctx.encrypt_ints(&[b as i64]).unwrap()).collect();
    let sel = binary_selectors(&ctx, &bits, 8).unwrap();
    assert_eq!(real(&ctx, &sel[0], 8), vec![0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
    assert_eq!(real(&ctx, &sel[1], 8), vec![0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
    assert_eq!(real(&ctx, &sel[2], 8), vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let r = binary_to_one_hot(&ctx, &bits, 8).unwrap();
    assert_eq!(real(&ctx, &r.output, 8), onehot_vec(3, 8));
    assert_eq!((r.cost.pt_mults, r.cost.ct_mults, r.cost.max_depth), (3, 2, 3));
}

#[test]
fn binary_round_trip_exhaustive() {
    let ctx = HeContext::exact(8).unwrap();
    for a in 0..8usize {
        let o = ctx.encrypt_ints(&(0..8).map(|i| i64::from(i == a)).collect::<Vec<_>>()).unwrap();
        let bits = one_hot_to_binary(&ctx, &o, 8).unwrap();
        assert_eq!(bits.cost.max_depth, 1);
        let got: Vec<f64> = bits.output.iter().map(|b| ctx.decrypt_real(b)[0]).collect();
        let want: Vec<f64> = BinaryRep::encode(a as u64, 8).unwrap().bits().iter().map(|&b| b as f64).collect();
        assert_eq!(got, want);
        let clean: Vec<CipherVec> = bits.output.iter().map(|b| extract_slot(&ctx, b, 0).unwrap()).collect();
        let back = binary_to_one_hot(&ctx, &clean, 8).unwrap();
        assert_eq!(real(&ctx, &back.output, 8), onehot_vec(a, 8));
    }
}

#[test]
fn one_hot_to_crt_residues() {
    let ctx = HeContext::exact(32).unwrap();
    let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
    for a in 0..30u64 {
        let o = ctx.encrypt_ints(&(0..30).map(|i| i64::from(i == a)).collect::<Vec<_>>()).unwrap();
        let r = one_hot_to_crt(&ctx, &o, 30, &basis).unwrap();
        let res: Vec<u64> = r.output.iter().map(|v| ctx.decrypt_real(v)[0] as u64).collect();
        assert_eq!(res, vec![a % 2, a % 3, a % 5]);
        // CRT recombination oracle
        let back = (0..30).find(|v| v % 2 == res[0] && v % 3 == res[1] && v % 5 == res[2]);
        assert_eq!(back, Some(a));
    }
    let o = ctx.encrypt_ints(&[1]).unwrap();
    assert!(one_hot_to_crt(&ctx, &o, 16, &basis).is_err());
}

#[test]
fn greater_maps_match_or_chain() {
    let n = 16;
    let ctx = HeContext::exact(2 * n).unwrap();
    for a in 0..n {
        let bits: Vec<i64> = (0..n).map(|i| i64::from(i == a)).collect();
        let o = ctx.encrypt_ints(&bits).unwrap();
        let mut or_chain = vec![0.0; n];
        for i in 0..n {
            let prev = if i == 0 { 0.0 } else { or_chain[i - 1] };
            or_chain[i] = f64::max(bits[i] as f64, prev);
        }
        let inc = greater_map_from_one_hot(&ctx, &o, n, PrefixForm::Inclusive).unwrap();
        assert_eq!(real(&ctx, &inc.output, n), or_chain);
        assert_eq!((inc.cost.total_mults(), inc.cost.max_depth, inc.cost.rotations), (0, 0, 4));
        let strict = greater_map_from_one_hot(&ctx, &o, n, PrefixForm::Greater).unwrap();
        let want: Vec<f64> = greater_map_of(a, n, Orientation::Greater).unwrap().bits.iter().map(|&b| b as f64).collect();
        assert_eq!(real(&ctx, &strict.output, n), want);
        let less = greater_map_from_one_hot(&ctx, &o, n, PrefixForm::Less).unwrap();
        let want: Vec<f64> = greater_map_of(a, n, Orientation::Less).unwrap().bits.iter().map(|&b| b as f64).collect();
        assert_eq!(real(&ctx, &less.output, n), want);

        let per_slot: Vec<CipherVec> = bits.iter().map(|&b| ctx.encrypt_ints(&[b]).unwrap()).collect();
        let g = greater_map_from_slots(&ctx, &per_slot, PrefixForm::Inclusive).unwrap();
        assert_eq!(g.cost.adds, n as u64 - 1);
        assert_eq!(g.output.iter().map(|v| ctx.decrypt_real(v)[0]).collect::<Vec<_>>(), or_chain);
    }
    let ctx = HeContext::exact(16).unwrap();
    let o = ctx.encrypt_ints(&[0, 0, 1, 0, 0]).unwrap();
    let g = greater_map_from_one_hot(&ctx, &o, 5, PrefixForm::Inclusive).unwrap();
    assert_eq!(real(&ctx, &g.output, 5), vec![0.0, 0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn one_hot_to_numeric_examples() {
    let ctx = HeContext::exact(8).unwrap();
    let classes = PlainVec::from_reals(&[1.0, 1.2, 1.4, 1.6, 1.8, 2.0]);
    let o = ctx.encrypt_ints(&[0, 0, 1, 0, 0, 0]).unwrap();
    let r = one_hot_to_numeric(&ctx, &o, Operand::Plain(&classes), 6).unwrap();
    assert!((ctx.decrypt_real(&r.output)[0] - 1.4).abs() < 1e-12);
    assert_eq!((r.cost.pt_mults, r.cost.ct_mults, r.cost.max_depth, r.cost.max_pt_free_depth), (1, 0, 1, 0));
    let enc_classes = ctx.encrypt_ints(&(0..8).collect::<Vec<_>>()).unwrap();
    let ctx32 = HeContext::exact(32).unwrap();
    for k in 0..8usize {
        let o = ctx.encrypt_ints(&(0..8).map(|i| i64::from(i == k)).collect::<Vec<_>>()).unwrap();
        let r = one_hot_to_numeric(&ctx, &o, Operand::Cipher(&enc_classes), 8).unwrap();
        assert_eq!(ctx.decrypt_real(&r.output)[0], k as f64);
        assert_eq!((r.cost.ct_mults, r.cost.max_depth, r.slot_mults), (1, 1, 8));
    }
    let o = ctx32.encrypt_ints(&(0..30).map(|i| i64::from(i == 17)).collect::<Vec<_>>()).unwrap();
    let idx = PlainVec::from_ints(0..30);
    let r = one_hot_to_numeric(&ctx32, &o, Operand::Plain(&idx), 30).unwrap();
    assert_eq!(ctx32.decrypt_real(&r.output)[0], 17.0);
}

#[test]
fn noisy_crt_stays_close() {
    let ctx = HeContext::with_profile(32, ArithmeticProfile::noisy(1e-6)).unwrap();
    let basis = CrtBasis::new(vec![2, 3, 5], 30).unwrap();
    let subs = encrypt_crt(&ctx, &CrtRep::encode(11, &basis).unwrap()).unwrap();
    let out = ctx.decrypt_real(&crt_to_one_hot(&ctx, &subs, &basis).unwrap().output);
    for (i, v) in out[..30].iter().enumerate() {
        assert!((v - if i == 11 { 1.0 } else { 0.0 }).abs() < 1e-4);
    }
}
