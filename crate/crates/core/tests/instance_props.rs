mod common;

use proptest::prelude::*;
use qshare_core::Instance;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(vals in (1..=6usize, 1..=3usize).prop_flat_map(|(m, n)| prop::collection::vec(common::any_valuation(m), n))) {
        let m = vals[0].goods();
        let inst = Instance::new(m, vals).unwrap();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert!(back.validate().is_valid());
    }
}

#[test]
fn rejects_malformed_documents() {
    assert!(Instance::from_json("{}").is_err());
    assert!(Instance::from_json(r#"{"m": 2, "agents": []}"#).is_err());
}
