mod common;

use batchlab::batch::{batch_number_oracle, Verifier};
use batchlab::Config;

#[test]
fn exhaustive_small_gf2_codes() {
    let codes = common::exhaustive_gf2();
    assert_eq!(codes.len(), 989);
    for code in &codes {
        let v = Verifier::new(code, Config::sequential()).unwrap();
        let fast = v.batch_number(None).unwrap();
        let slow = batch_number_oracle(code).unwrap();
        assert_eq!(fast, slow, "{}", code.to_text());
    }
}

#[test]
fn seeded_random_codes() {
    for (seed, code) in common::seeded_gf2() {
        let v = Verifier::new(&code, Config::sequential()).unwrap();
        let fast = v.batch_number(None).unwrap();
        assert_eq!(fast, batch_number_oracle(&code).unwrap(), "seed {seed}");
    }
}
