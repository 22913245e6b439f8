use onehot_wasm::*;

#[test]
fn crt_example_thirty() {
    let d = crt_demo(30, 17).unwrap();
    assert_eq!(d.moduli, vec![2, 3, 5]);
    assert_eq!(d.residues, vec![1, 2, 2]);
    assert_eq!(d.one_hot_index, 17);
    assert_eq!((d.ct_mults, d.depth), (2, 2));
    assert_eq!(d.duplicated[2], (0..30).map(|i| u8::from(i % 5 == 2)).collect::<Vec<_>>());
}

#[test]
fn crt_example_limits() {
    assert!(crt_demo(10000, 5).is_err());
    assert!(crt_demo(30, 30).is_err());
}

#[test]
fn json_exports() {
    let sb: serde_json::Value = serde_json::from_str(&shadow_bounds_json(4).unwrap()).unwrap();
    assert_eq!(sb.as_array().unwrap().len(), 3);
    assert!(shadow_bounds_json(1).is_err());
    let t: serde_json::Value = serde_json::from_str(&tradeoff_json(100, "[n/s,m/1]").unwrap()).unwrap();
    assert_eq!(t.as_array().unwrap().len(), 6);
    assert!(tradeoff_json(100, "[n/4,m/s]").is_err());
}
