use proptest::prelude::*;

use witnesslab_core::arith::{crt_compose, cubic_residues, factorize, plus_minus_classes};
use witnesslab_core::extremal::{delta_exact, delta_greedy, is_avoider, product_avoider, GreedyOrder};
use witnesslab_core::witness::{
    build_family, product, verify_witness, Coefficient, Construction, WitnessFunction,
};

fn coprime_pair() -> impl Strategy<Value = (u64, u64)> {
    (2u64..40, 2u64..40).prop_filter("coprime", |&(a, b)| num_gcd(a, b) == 1)
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residues_closed_under_negation_and_products(q in 2u64..3000) {
        let c = cubic_residues(q).unwrap();
        for &r in c.residues() {
            prop_assert!(c.contains(q - r));
        }
        let rs = c.residues();
        for &a in rs.iter().take(20) {
            for &b in rs.iter().take(20) {
                let ab = (a as u128 * b as u128 % q as u128) as u64;
                prop_assert!(c.contains_with_zero(ab));
            }
        }
    }

    #[test]
    fn classes_partition_the_residues(q in 2u64..3000) {
        let c = cubic_residues(q).unwrap();
        let total: usize = plus_minus_classes(&c).classes.iter().map(|k| k.members.len()).sum();
        prop_assert_eq!(total, c.len());
    }

    #[test]
    fn crt_round_trip((a, b) in coprime_pair(), x in 0u64..1000, y in 0u64..1000) {
        let (x, y) = (x % a, y % b);
        let z = crt_compose(a, b, x, y).unwrap();
        prop_assert_eq!((z % a, z % b), (x, y));
        prop_assert!(z < a * b);
    }

    #[test]
    fn product_of_witnesses_is_a_witness((a, b) in coprime_pair()) {
        let w = product(&build_family(a).unwrap(), &build_family(b).unwrap()).unwrap();
        prop_assert_eq!(w.q(), a * b);
        prop_assert!(verify_witness(&w, 1e-9).pass);
        let expect = build_family(a).unwrap().b0() * build_family(b).unwrap().b0();
        prop_assert!((w.b0() - expect).abs() <= 1e-12);
    }

    #[test]
    fn product_of_avoiders_avoids((a, b) in coprime_pair()) {
        let ba = delta_greedy(a, &GreedyOrder::Natural).unwrap();
        let bb = delta_greedy(b, &GreedyOrder::Natural).unwrap();
        let p = product_avoider(&ba, &bb).unwrap();
        prop_assert_eq!(p.size, ba.size * bb.size);
        prop_assert!(is_avoider(a * b, &p.witness_set).unwrap());
    }

    #[test]
    fn greedy_never_beats_exact(q in 2u64..80, stride in 1u64..80) {
        let exact = delta_exact(q, 10_000_000).unwrap();
        prop_assume!(exact.exact);
        let order = if num_gcd(stride, q) == 1 { GreedyOrder::Stride(stride) } else { GreedyOrder::Natural };
        let g = delta_greedy(q, &order).unwrap();
        prop_assert!(g.size <= exact.size);
    }

    #[test]
    fn certify_makes_values_nonnegative(
        q in 3u64..400,
        raw in proptest::collection::vec(-1.0f64..1.0, 1..40),
    ) {
        let c = cubic_residues(q).unwrap();
        let mut reps: Vec<u64> = c.residues().iter().copied().filter(|&r| 2 * r <= q).collect();
        reps.truncate(raw.len());
        prop_assume!(!reps.is_empty());
        let coeffs: Vec<Coefficient> = reps
            .iter()
            .zip(&raw)
            .map(|(&rep, &v)| Coefficient { rep, value: v / (4.0 * reps.len() as f64) })
            .collect();
        let w = WitnessFunction::new(q, 0.5, coeffs, Construction::Optimal).unwrap();
        let cert = w.certify();
        let min = cert.witness.values().into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= 0.0);
        prop_assert!(cert.cost >= 0.0);
    }

    #[test]
    fn family_b0_is_multiplicative(q in 2u64..3000) {
        let f = factorize(q).unwrap();
        let parts: f64 = f.prime_powers().map(|pp| build_family(pp).unwrap().b0()).product();
        prop_assert!((build_family(q).unwrap().b0() - parts).abs() <= 1e-12);
    }
}
