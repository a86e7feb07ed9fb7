use super::*;
use crate::coeff_ring::RingParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ring(r: usize) -> Ring {
    Ring::new(RingParams::new(3, r, 5, 4)).unwrap()
}

fn point(k: &Ring, mats: Vec<Mat>) -> Window {
    k.window_from_module(SigmaModule::uniform(mats).unwrap(), Frame::Point).unwrap()
}

#[test]
fn m1_of_scalar_operators() {
    let k = ring(1);
    let w = point(&k, vec![k.m_from_ints(&[vec![3, 0], vec![0, 3]])]);
    assert_eq!(w.decomposition.l_ranks, vec![2]);
    let w = point(&k, vec![k.m_identity(2)]);
    assert_eq!(w.decomposition.l_ranks, vec![0]);
    assert_eq!(k.m1_basis(&w, 0), k.m_from_ints(&[vec![3, 0], vec![0, 3]]));
}

#[test]
fn m1_of_swap() {
    let k = ring(1);
    let w = point(&k, vec![k.m_from_ints(&[vec![0, 1], vec![3, 0]])]);
    assert_eq!(k.m1_basis(&w, 0), k.m_from_ints(&[vec![1, 0], vec![0, 3]]));
}

#[test]
fn psi_identities_and_degree() {
    let k = ring(2);
    let w = point(&k, vec![k.m_from_ints(&[vec![0, 1], vec![3, 0]]), k.m_identity(2)]);
    let psi = k.psi_sharp(&w).unwrap();
    for s in 0..2 {
        let a = w.module.phi(s);
        let p_id = k.m_mul_p_pow(&k.m_identity(2), 1);
        assert!(k.m_congruent(&k.m_mul(&psi[s], a), &p_id, 5));
        assert!(k.m_congruent(&k.m_mul(a, &psi[s]), &p_id, 5));
    }
    let report = k.verify_window(&w);
    assert!(report.passed(), "{report:?}");
}

#[test]
fn psi_is_independent_of_decomposition() {
    let k = ring(2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = point(&k, vec![k.m_from_ints(&[vec![0, 1, 0], vec![3, 0, 0], vec![0, 0, 3]]), k.m_identity(3)]);
    let psi = k.psi_sharp(&w).unwrap();
    for _ in 0..5 {
        let d = k.random_decomposition(&w, &mut rng);
        k.validate_decomposition(&w, &d).unwrap();
        let w2 = Window { decomposition: d, ..w.clone() };
        let psi2 = k.psi_sharp(&w2).unwrap();
        for s in 0..2 {
            assert!(k.m_congruent(&psi[s], &psi2[s], 5));
        }
    }
}

#[test]
fn slope_zero_passes_and_slope_one_fails_nilpotence() {
    let k = ring(1);
    let etale = point(&k, vec![k.m_identity(1)]);
    assert!(k.verify_window(&etale).passes("W.4"));
    let mult = k.window_from_dieudonne(&SigmaModule::uniform(vec![k.m_from_ints(&[vec![3]])]).unwrap()).unwrap();
    assert_eq!(mult.decomposition.l_ranks, vec![1]);
    let rep = k.verify_window(&mult);
    assert!(rep.passes("W.1") && rep.passes("W.2") && rep.passes("W.3"));
    assert!(!rep.passes("W.4"));
}

#[test]
fn w2_fault_is_located() {
    let k = ring(2);
    let mut w = point(&k, vec![k.m_identity(2), k.m_from_ints(&[vec![0, 1], vec![3, 0]])]);
    // claim e'' ∈ L in degree 1, which φ does not send into pM
    w.decomposition.bases[1] = k.m_from_ints(&[vec![0, 1], vec![1, 0]]);
    let rep = k.verify_window(&w);
    let w2 = rep.axiom("W.2").unwrap();
    assert!(!w2.pass);
    assert_eq!(w2.witness, serde_json::json!({"degree": 1, "row": 0, "col": 0}));
    assert!(k.validate_decomposition(&point(&k, vec![k.m_identity(2), k.m_from_ints(&[vec![0, 1], vec![3, 0]])]), &w.decomposition).is_err());
}

#[test]
fn dieudonne_round_trip() {
    let k = ring(2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let mats: Vec<Mat> = (0..2)
            .map(|_| {
                let u = k.m_random_unimodular(3, &mut rng);
                let v = k.m_random_unimodular(3, &mut rng);
                let d: Vec<Series> = (0..3).map(|_| k.s_int(if rng.gen_bool(0.5) { 3 } else { 1 })).collect();
                k.m_product([&u, &k.m_diag(&d), &v])
            })
            .collect();
        let m = SigmaModule::uniform(mats).unwrap();
        let w = k.window_from_dieudonne(&m).unwrap();
        let rep = k.verify_window(&w);
        assert!(rep.passes("W.1") && rep.passes("W.2") && rep.passes("W.3"));
        assert_eq!(k.dieudonne_from_window(&w), m);
    }
    let bad = SigmaModule::uniform(vec![k.m_from_ints(&[vec![9]]), k.m_identity(1)]).unwrap();
    assert!(k.window_from_dieudonne(&bad).is_err());
}

#[test]
fn window_json_round_trip() {
    let k = ring(2);
    let w = point(&k, vec![k.m_from_ints(&[vec![0, 1], vec![3, 0]]), k.m_identity(2)]);
    let text = serde_json::to_string(&k.window_to_json(&w)).unwrap();
    let back = k.window_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, w);
}
