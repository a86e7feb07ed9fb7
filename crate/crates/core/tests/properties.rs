use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gradwin::ext_powers::subset_sum_oracle;
use gradwin::graded_semilinear::SigmaModule;
use gradwin::{Mat, Ring, RingParams, Valuation};

fn ring(p: u64, r: usize) -> Ring {
    Ring::new(RingParams::new(p, r, 12, 4).with_denom_budget(2)).unwrap()
}

/// Random graded module of rank n: at most one p on each diagonal,
/// conjugated by random unimodular matrices (keeps det valuations below
/// the certification level).
fn random_module(k: &Ring, n: usize, rng: &mut ChaCha8Rng) -> SigmaModule {
    let r = k.r();
    let g: Vec<Mat> = (0..r).map(|_| k.m_random_unimodular(n, rng)).collect();
    let phi = (0..r)
        .map(|s| {
            let hit = rng.gen_range(0..=n);
            let rows: Vec<Vec<i64>> =
                (0..n).map(|i| (0..n).map(|j| if i != j { 0 } else if i == hit { k.p() as i64 } else { 1 }).collect()).collect();
            k.m_product([&k.m_inverse(&g[(s + 1) % r]).unwrap(), &k.m_from_ints(&rows), &k.m_frob(&g[s])])
        })
        .collect();
    SigmaModule::uniform(phi).unwrap()
}

fn pairwise_sums(a: &[Rational64], b: &[Rational64]) -> Vec<Rational64> {
    let mut out: Vec<Rational64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    out.sort();
    out
}

fn params() -> impl Strategy<Value = (u64, usize, u64)> {
    (prop_oneof![Just(3u64), Just(5u64)], 1usize..=4, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn frobenius_laws((p, r, seed) in params()) {
        let k = ring(p, r);
        prop_assert!(k.check_laws(500, seed).passed());
    }

    #[test]
    fn slopes_invariant_under_base_change((p, r, seed) in params(), n in 1usize..=3) {
        let k = ring(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&k, n, &mut rng);
        let g: Vec<Mat> = (0..r).map(|_| k.m_random_unimodular(n, &mut rng)).collect();
        let m2 = k.change_basis(&m, &g).unwrap();
        prop_assert_eq!(k.graded_slopes(&m).unwrap(), k.graded_slopes(&m2).unwrap());
    }

    #[test]
    fn tensor_slopes_are_pairwise_sums((p, r, seed) in params(), n1 in 1usize..=2, n2 in 1usize..=2) {
        let k = ring(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_module(&k, n1, &mut rng), random_module(&k, n2, &mut rng));
        let sa = k.graded_slopes(&a).unwrap();
        let sb = k.graded_slopes(&b).unwrap();
        let st = k.graded_slopes(&k.tensor(&a, &b).unwrap()).unwrap();
        prop_assert_eq!(st.0, pairwise_sums(&sa.0, &sb.0));
    }

    #[test]
    fn wedge_slopes_are_subset_sums((p, r, seed) in params(), n in 1usize..=4, kk in 0usize..=4) {
        prop_assume!(kk <= n);
        let k = ring(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_module(&k, n, &mut rng);
        let s = k.graded_slopes(&m).unwrap();
        let sw = k.graded_slopes(&k.wedge_power(&m, kk).unwrap()).unwrap();
        prop_assert_eq!(sw.0, subset_sum_oracle(&s.0, kk));
    }

    #[test]
    fn ungraded_multiplicities_divisible_by_denominators((p, r, seed) in params(), n in 1usize..=3) {
        let k = ring(p, r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Swap-like blocks produce fractional slopes.
        let m = random_module(&k, n, &mut rng);
        let phi: Vec<Mat> = (0..r).map(|s| {
            let a = m.phi(s);
            if s == 0 { k.m_mul(&cyclic(&k, n), a) } else { a.clone() }
        }).collect();
        let m = SigmaModule::uniform(phi).unwrap();
        for (q, mult) in k.ungraded_slopes(&m).unwrap().multiplicities() {
            prop_assert_eq!(mult as i64 % *q.denom(), 0);
        }
        for (q, mult) in k.graded_slopes(&m).unwrap().multiplicities() {
            prop_assert_eq!(mult as i64 % *q.denom(), 0);
        }
    }

    #[test]
    fn gauss_valuation_multiplicative(seed in any::<u64>(), p in prop_oneof![Just(3u64), Just(5u64)]) {
        let k = ring(p, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mk = |rng: &mut ChaCha8Rng| {
            let e = rng.gen_range(0..3);
            let terms: Vec<i64> = (0..3).map(|_| rng.gen_range(-40..40) * (p as i64).pow(e)).collect();
            terms.iter().enumerate().fold(k.s_zero(), |acc, (i, &c)| k.s_add(&acc, &k.s_monomial(k.from_int(c), i)))
        };
        let (f, g) = (mk(&mut rng), mk(&mut rng));
        if let (Valuation::Finite(a), Valuation::Finite(b)) = (k.gauss_valuation(&f), k.gauss_valuation(&g)) {
            // Truncation T = 4 can cut the product; only test when both
            // leading-valuation terms sit at index 0 or 1.
            let lead = |s: &gradwin::Series, v: i64| s.terms().iter().position(|c| k.valuation(c) == Valuation::Finite(v)).unwrap();
            if lead(&f, a) + lead(&g, b) < 4 {
                prop_assert_eq!(k.gauss_valuation(&k.s_mul(&f, &g)), Valuation::Finite(a + b));
            }
        }
    }
}

/// x_i ↦ x_{i+1}, x_{n-1} ↦ p x_0.
fn cyclic(k: &Ring, n: usize) -> Mat {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == (j + 1) % n { if j == n - 1 { k.p() as i64 } else { 1 } } else { 0 }).collect())
        .collect();
    k.m_from_ints(&rows)
}
