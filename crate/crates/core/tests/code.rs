mod common;

use common::{all_codewords, ml_unique, random_small_code};
use l2box::code::{
    derive_generator, emit_alist, encode, is_codeword, ml_decode_bruteforce, parse_alist, regular_code, syndrome,
};
use l2box::{BinaryWord, Error, ParityCheckMatrix};
use proptest::prelude::*;

fn code_strategy() -> impl Strategy<Value = ParityCheckMatrix> {
    (4usize..14, 4usize..7, any::<u64>()).prop_map(|(n, m, seed)| random_small_code(n.max(m + 2), m, seed))
}

fn word(n: usize) -> impl Strategy<Value = BinaryWord> {
    prop::collection::vec(0u8..2, n).prop_map(|b| BinaryWord::new(b).unwrap())
}

#[test]
fn dimensions_of_known_codes() {
    let h = ParityCheckMatrix::from_dense(&[vec![1, 1, 1]]).unwrap();
    assert_eq!((h.n_vars(), h.n_checks(), h.rank()), (3, 1, 1));
    assert_eq!(derive_generator(&h).k(), 2);

    // Repeated rows do not add rank.
    let h = ParityCheckMatrix::from_dense(&[vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 1, 1, 1]]).unwrap();
    assert_eq!(h.rank(), 2);
    assert_eq!(all_codewords(&h).len(), 4);

    let h = regular_code(96, 3, 6, 96).unwrap();
    assert_eq!((h.n_vars(), h.n_checks()), (96, 48));
    assert!(h.cols().iter().all(|c| c.len() == 3));
    assert!(h.rows().iter().all(|r| r.len() == 6));
    assert_eq!(derive_generator(&h).k(), 96 - h.rank());
}

#[test]
fn alist_errors_carry_line_numbers() {
    let bad = "3 1\n1 3\n1 1 1\n3\n1\n1\n1\n1 2 9\n";
    match parse_alist(bad) {
        Err(Error::Alist { line, .. }) => assert_eq!(line, 8),
        other => panic!("expected alist error, got {other:?}"),
    }
    assert!(matches!(parse_alist("3"), Err(Error::Alist { .. })));
}

#[test]
fn regular_code_is_deterministic() {
    assert_eq!(regular_code(48, 3, 6, 5).unwrap(), regular_code(48, 3, 6, 5).unwrap());
}

#[test]
fn ml_oracle_agrees_with_library_enumeration() {
    for seed in 0..5 {
        let h = random_small_code(12, 6, seed);
        let g = derive_generator(&h);
        let cws = all_codewords(&h);
        assert_eq!(cws.len(), 1 << g.k());
        let gamma: Vec<f64> = (0..12).map(|i| ((i as f64 + seed as f64) * 1.7).sin()).collect();
        if let Some(best) = ml_unique(&cws, &gamma) {
            assert_eq!(ml_decode_bruteforce(&g, &gamma).unwrap().bits(), best.as_slice());
        }
    }
}

proptest! {
    #[test]
    fn syndrome_is_linear(h in code_strategy(), seed in any::<u64>()) {
        let n = h.n_vars();
        let mk = |s: u64| BinaryWord::from_bools((0..n).map(|i| (s.rotate_left(i as u32 * 7) ^ (i as u64)) & 1 == 1));
        let (a, b) = (mk(seed), mk(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        let sa = syndrome(&h, &a).unwrap();
        let sb = syndrome(&h, &b).unwrap();
        let sab = syndrome(&h, &a.xor(&b)).unwrap();
        let sum: Vec<u8> = sa.iter().zip(&sb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(sab, sum);
    }

    #[test]
    fn alist_roundtrip(h in code_strategy()) {
        prop_assert_eq!(parse_alist(&emit_alist(&h)).unwrap(), h);
    }

    #[test]
    fn encode_yields_codewords(h in code_strategy(), msg_seed in any::<u64>()) {
        let g = derive_generator(&h);
        prop_assert_eq!(g.k() + h.rank(), h.n_vars());
        let msg: Vec<u8> = (0..g.k()).map(|i| ((msg_seed >> (i % 64)) & 1) as u8).collect();
        let c = encode(&g, &msg).unwrap();
        prop_assert!(is_codeword(&h, &c).unwrap());
        for b in g.basis() {
            prop_assert!(is_codeword(&h, b).unwrap());
        }
    }

    #[test]
    fn ml_invariant_under_positive_scaling(
        h in code_strategy(),
        gamma in prop::collection::vec(-3.0..3.0f64, 14),
        scale in 0.01..100.0f64,
    ) {
        let g = derive_generator(&h);
        let gamma = &gamma[..h.n_vars()];
        let scaled: Vec<f64> = gamma.iter().map(|x| x * scale).collect();
        let cws = all_codewords(&h);
        // Only compare where the optimum is unambiguous at both scales.
        if ml_unique(&cws, gamma).is_some() && ml_unique(&cws, &scaled).is_some() {
            prop_assert_eq!(ml_decode_bruteforce(&g, gamma).unwrap(), ml_decode_bruteforce(&g, &scaled).unwrap());
        }
    }

    #[test]
    fn ml_result_is_a_codeword(h in code_strategy(), gamma in prop::collection::vec(-3.0..3.0f64, 14)) {
        let g = derive_generator(&h);
        let w = ml_decode_bruteforce(&g, &gamma[..h.n_vars()]).unwrap();
        prop_assert!(is_codeword(&h, &w).unwrap());
    }

    #[test]
    fn distance_is_weight_of_xor(a in word(20), b in word(20)) {
        prop_assert_eq!(a.distance(&b), a.xor(&b).weight());
    }
}
