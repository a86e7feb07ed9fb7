use super::*;
use crate::coeff_ring::RingParams;
use crate::graded_semilinear::SlopeMultiset;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ring(p: u64, r: usize) -> Ring {
    Ring::new(RingParams::new(p, r, 5, 1)).unwrap()
}

fn running() -> (Ring, SymStructure) {
    let k = ring(3, 5);
    let s = k.build_sym(&SymSpec::new(5, vec![1], 2, HalfInt::from_int(2)), RaiseOrder::Default).unwrap();
    (k, s)
}

#[test]
fn running_instance_verifies() {
    let (k, s) = running();
    let rep = k.verify_sym(&s).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures());
    assert_eq!(rep.slopes_m, SlopeMultiset::from_ints(&[2, 2]));
    assert_eq!(rep.slopes_n, SlopeMultiset::from_ints(&[1, 1]));
    assert_eq!(rep.slopes_n_i, vec![SlopeMultiset::from_ints(&[1])]);
    let dims: Vec<usize> = (0..5).map(|x| s.m.decomposition.quotient_dim(x)).collect();
    assert_eq!(dims, vec![1, 1, 1, 2, 1]);
}

#[test]
fn split_variant_slopes() {
    let k = ring(3, 5);
    let spec = SymSpec::new(5, vec![1], 2, HalfInt::from_int(2)).with_slope_pair(0, 2);
    let s = k.build_sym(&spec, RaiseOrder::Default).unwrap();
    let rep = k.verify_sym(&s).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures());
    assert_eq!(rep.slopes_n, SlopeMultiset::from_ints(&[0, 2]));
    assert_eq!(rep.slopes_m, SlopeMultiset::from_ints(&[1, 3]));
}

#[test]
fn zero_b_gives_rank_one_twist() {
    let k = ring(3, 5);
    let s = k.build_sym(&SymSpec::new(5, vec![0], 2, HalfInt::from_int(2)), RaiseOrder::Default).unwrap();
    let rep = k.verify_sym(&s).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures());
    assert_eq!(rep.slopes_m, SlopeMultiset::from_ints(&[2]));
    for z in &s.zeta {
        assert_eq!(z, &k.m_identity(1));
    }
    assert_eq!(s.m.module, s.n_i[0]);
}

#[test]
fn seeded_orders_also_verify() {
    let k = ring(3, 7);
    let spec = SymSpec::new(7, vec![2], 1, HalfInt::from_int(1));
    for seed in 0..10 {
        let s = k.build_sym(&spec, RaiseOrder::Seeded(seed)).unwrap();
        let rep = k.verify_sym(&s).unwrap();
        assert!(rep.passed(), "seed {seed}: {:?}", rep.failures());
    }
}

#[test]
fn odd_z_two_blocks() {
    let k = ring(5, 8);
    let spec = SymSpec::new(8, vec![1, 1], 1, HalfInt(3));
    let s = k.build_sym(&spec, RaiseOrder::Default).unwrap();
    let rep = k.verify_sym(&s).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures());
    assert_eq!(rep.slopes_m, SlopeMultiset::new(vec![Rational64::new(3, 2); 4]));
}

use num_rational::Rational64;

#[test]
fn representation_is_multiplicative() {
    let k = Ring::new(RingParams::new(3, 5, 5, 1)).unwrap();
    let s = k.build_sym(&SymSpec::new(5, vec![1], 2, HalfInt::from_int(2)), RaiseOrder::Default).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let id = k.sym_power_rep(&s, &k.m_identity(2)).unwrap();
    assert_eq!(id, k.m_identity(2));
    let g = k.m_random_unimodular(2, &mut rng);
    let h = k.m_random_unimodular(2, &mut rng);
    let lhs = k.sym_power_rep(&s, &k.m_mul(&g, &h)).unwrap();
    let rhs = k.m_mul(&k.sym_power_rep(&s, &g).unwrap(), &k.sym_power_rep(&s, &h).unwrap());
    assert!(k.m_congruent(&lhs, &rhs, k.check_prec()));
    let det = k.m_det(&k.sym_power_rep(&s, &g).unwrap());
    assert!(k.s_congruent(&det, &k.m_det(&g), k.check_prec()));
}
