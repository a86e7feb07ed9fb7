//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use gradwin::deformation::DeformedWindow;
use gradwin::ext_powers::{subset_sum_oracle, MultiplicativeTwist, WindowMorphism};
use gradwin::graded_semilinear::SlopeMultiset;
use gradwin::local_model::ChartSpec;
use gradwin::sym_structure::{feasible_specs, HalfInt, RaiseOrder, SweepRanges, SymSpec, SymStructure};
use gradwin::{Ring, RingParams, Valuation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn ring(p: u64, r: usize, n: u32, t: usize, d: u32) -> Ring {
    Ring::new(RingParams::new(p, r, n, t).with_denom_budget(d)).expect("valid ring")
}

fn running() -> (Ring, SymStructure, DeformedWindow, DeformedWindow) {
    let k = ring(3, 5, 5, 9, 3);
    let s = k.build_sym(&SymSpec::new(5, vec![1], 2, HalfInt::from_int(2)), RaiseOrder::Default).unwrap();
    let seq = k.find_deformation_sequence(&s.n).unwrap();
    let nt = k.deform_n(&s.n, &seq).unwrap();
    let mt = k.deform_m(&s, &nt).unwrap();
    (k, s, nt, mt)
}

fn constructor_soundness() -> Outcome {
    let start = Instant::now();
    let specs = feasible_specs(&SweepRanges::default());
    let mut count = 0;
    for p in [3u64, 5] {
        for spec in &specs {
            let k = ring(p, spec.r, 5, 1, 0);
            let s = k.build_sym(spec, RaiseOrder::Default).map_err(|e| format!("p={p} {spec:?}: {e}"))?;
            let rep = k.verify_sym(&s).map_err(|e| e.to_string())?;
            for name in ["S.1", "S.2", "S.3", "S.4", "rank_table", "slope_lemma"] {
                ensure!(rep.check(name).is_some_and(|c| c.pass), "p={p} {spec:?}: {name} fails");
            }
            ensure!(rep.passed(), "p={p} {spec:?}: {:?}", rep.failures());
            ensure!(rep.slopes_m == rep.expected_slopes_m, "p={p} {spec:?}: slopes differ");
            count += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "sweep took {took:?}");
    Ok(format!("{count} instances verified in {took:.2?}"))
}

fn running_instance() -> Outcome {
    let (k, s, nt, mt) = running();
    let rep = k.check_suff(&s, &nt, &mt).map_err(|e| e.to_string())?;
    ensure!(rep.passed(), "failed checks {:?}", rep.checks.iter().filter(|c| !c.pass).map(|c| &c.name).collect::<Vec<_>>());
    ensure!(rep.special_slopes_m == SlopeMultiset::from_ints(&[2, 2]), "special {:?}", rep.special_slopes_m);
    ensure!(rep.generic_slopes_m == SlopeMultiset::from_ints(&[1, 3]), "generic M {:?}", rep.generic_slopes_m);
    ensure!(rep.generic_slopes_n == SlopeMultiset::from_ints(&[0, 2]), "generic N {:?}", rep.generic_slopes_n);
    let sigma0 = rep.sigma0.ok_or("no σ0")?;
    ensure!(!s.params.omega.contains(&sigma0), "σ0 = {sigma0} lies in Ω");
    for ax in ["W.1", "W.2", "W.3", "W.4"] {
        ensure!(rep.window.passes(ax), "{ax} fails for the deformed M");
    }
    Ok(format!("special {{2,2}}, generic M {{1,3}}, generic N {{0,2}}, σ0 = {sigma0}, W.1-W.4 pass"))
}

fn connection() -> Outcome {
    let mut count = 0;
    let mut slowest = Duration::ZERO;
    for p in [3u64, 5] {
        for spec in feasible_specs(&SweepRanges::default()) {
            let k = ring(p, spec.r, 5, 9, 3);
            let s = k.build_sym(&spec, RaiseOrder::Default).unwrap();
            let start = Instant::now();
            let seq = k.find_deformation_sequence(&s.n).map_err(|e| format!("{spec:?}: {e}"))?;
            let nt = k.deform_n(&s.n, &seq).map_err(|e| e.to_string())?;
            let mt = k.deform_m(&s, &nt).map_err(|e| e.to_string())?;
            for w in [&nt, &mt] {
                let a = k.solve_connection(w, 1).map_err(|e| format!("p={p} {spec:?}: {e}"))?;
                let b = k.solve_connection(w, 2).map_err(|e| format!("p={p} {spec:?}: {e}"))?;
                ensure!(a.residual_valuation.at_least(k.check_prec()), "p={p} {spec:?}: residual {:?}", a.residual_valuation);
                ensure!(a.c.iter().zip(&b.c).all(|(x, y)| k.m_congruent(x, y, 5)), "p={p} {spec:?}: seeds disagree");
                ensure!(a.c.iter().all(|c| c.is_integral()), "p={p} {spec:?}: not integral");
            }
            slowest = slowest.max(start.elapsed());
            count += 1;
        }
    }
    ensure!(slowest < Duration::from_secs(5), "slowest instance {slowest:?}");
    Ok(format!("{count} deformed instances, slowest {slowest:.2?}"))
}

fn dwork_velf() -> Outcome {
    let (k, s, nt, mt) = running();
    let prec = k.check_prec();
    let mut data = Vec::new();
    for w in [&nt, &mt] {
        let conn = k.solve_connection(w, 1).map_err(|e| e.to_string())?;
        let d = k.dwork_theta(w, &conn).map_err(|e| e.to_string())?;
        ensure!(d.h.iter().all(|h| k.m_congruent(&k.m_at_zero(h), &k.m_identity(h.rows()), 5)), "Θ is not the identity mod t");
        ensure!(d.equivariance.at_least(prec), "equivariance defect {:?}", d.equivariance);
        let dd = k.descent_datum(&d).map_err(|e| e.to_string())?;
        ensure!(dd.diagonal.at_least(prec), "θ(t,t) differs from the identity: {:?}", dd.diagonal);
        data.push(dd);
    }
    let velf = k.check_velf(&s, &data[0], &data[1]).map_err(|e| e.to_string())?;
    ensure!(velf.det_ok, "det θ_N defect {:?}", velf.det_defect);
    ensure!(velf.pi_theta_ok, "π(θ_N) defect {:?}", velf.pi_defect);
    let triv = k.trivial_deformation(&s.m);
    let conn = k.solve_connection(&triv, 1).map_err(|e| e.to_string())?;
    let dd = k.descent_datum(&k.dwork_theta(&triv, &conn).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    for th in &dd.theta {
        let id = k.mvm_identity(th.rows, 2);
        ensure!(k.mvm_valuation_of_difference(th, &id) == Valuation::Infinite, "trivial deformation gives θ ≠ 1");
    }
    Ok("Θ ≡ 1 mod t, equivariance, θ(t,t) = 1, trivial θ = 1, det θ_N ≡ 1, π(θ_N) = θ_M".into())
}

fn exterior_powers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut windows = 0u64;
    for (p, r) in [(3, 2), (3, 3), (5, 2)] {
        // ∧^2 of rank 4 reaches slope sum 3r, so certify with room to spare.
        let k = ring(p, r, 10, 1, 0);
        let tw = MultiplicativeTwist::trivial(&k, r);
        for n in 1..=4 {
            for _ in 0..3 {
                let w = k.random_window(n, &mut rng);
                let slopes = k.graded_slopes(&w.module).map_err(|e| e.to_string())?;
                for kk in 0..=n {
                    let e = k.exterior_power(&w, kk, &tw).map_err(|e| e.to_string())?;
                    let got = k.graded_slopes(&e.module).map_err(|e| e.to_string())?;
                    ensure!(got == SlopeMultiset::new(subset_sum_oracle(&slopes.0, kk)), "p={p} r={r} n={n} k={kk}: {got:?}");
                }
                let kk = n.div_ceil(2);
                let rep = k.independence_check(&w, kk, &tw, 20, windows).map_err(|e| e.to_string())?;
                ensure!(rep.passed(), "p={p} r={r} n={n}: independence fails at k={kk}: {rep:?}");
                windows += 1;
            }
        }
    }
    let (k, s, _, _) = running();
    let tw = MultiplicativeTwist::trivial(&k, 5);
    for kk in 0..=2 {
        let rep = k.independence_check(&s.m, kk, &tw, 20, 7).map_err(|e| e.to_string())?;
        ensure!(rep.passed() && rep.trials >= 20, "independence fails at k={kk}: {rep:?}");
    }
    // Degenerate cases: k = 0 is the twist, k = 1 the window itself, k = rank the determinant.
    let units: Vec<_> = [2, 1, 4, 1, 1].iter().map(|&u| k.s_int(u)).collect();
    let twist = k.twist(units.clone()).map_err(|e| e.to_string())?;
    let zero = k.exterior_power(&s.m, 0, &twist).map_err(|e| e.to_string())?;
    ensure!((0..5).all(|i| k.s_congruent(zero.module.phi(i).get(0, 0), &units[i], 5)), "k = 0 is not the twist");
    let one = k.exterior_power(&s.m, 1, &tw).map_err(|e| e.to_string())?;
    ensure!(one.decomposition == s.m.decomposition, "k = 1 changes the decomposition");
    ensure!((0..5).all(|i| k.m_congruent(one.module.phi(i), s.m.module.phi(i), 5)), "k = 1 changes φ");
    let top = k.exterior_power(&s.m, 2, &tw).map_err(|e| e.to_string())?;
    ensure!((0..5).all(|i| k.s_congruent(top.module.phi(i).get(0, 0), &k.m_det(s.m.module.phi(i)), 5)), "top power is not det");
    let k3 = ring(3, 3, 5, 1, 0);
    let tw3 = MultiplicativeTwist::trivial(&k3, 3);
    let mut pairs = 0;
    for _ in 0..10 {
        let w1 = k3.random_window(3, &mut rng);
        let (w2, beta) = k3.random_morphism(&w1, &mut rng);
        let (w3, alpha) = k3.random_morphism(&w2, &mut rng);
        for kk in 0..=3 {
            let e: Vec<_> = [&w1, &w2, &w3].iter().map(|w| k3.exterior_power(w, kk, &tw3).unwrap()).collect();
            let power = |m: &WindowMorphism| k3.functorial_power(m, kk, None).unwrap();
            let (a, b) = (power(&alpha), power(&beta));
            k3.check_morphism(&e[0], &e[1], &b).map_err(|e| e.to_string())?;
            k3.check_morphism(&e[1], &e[2], &a).map_err(|e| e.to_string())?;
            let ab = power(&k3.compose_morphisms(&alpha, &beta));
            let ba = k3.compose_morphisms(&a, &b);
            ensure!((0..3).all(|i| k3.m_congruent(&ab.maps[i], &ba.maps[i], 5)), "composition law fails at k={kk}");
        }
        pairs += 1;
    }
    Ok(format!("{windows} random windows, independence over 20 decompositions each, {pairs} morphism pairs"))
}

fn local_model() -> Outcome {
    let mut charts = 0;
    for p in [3u64, 5] {
        let k = ring(p, 1, 5, 1, 0);
        for (i, c) in ChartSpec::all(4).iter().enumerate() {
            let rep = k.sample_chart(c, 200, i as u64).map_err(|e| e.to_string())?;
            ensure!(rep.disagreements == 0 && rep.passed(), "p={p} {c:?}: {rep:?}");
            charts += 1;
        }
    }
    Ok(format!("{charts} charts x 200 points, 0 disagreements"))
}

fn coefficient_layer() -> Outcome {
    let mut rings = 0;
    for (p, r) in [(3, 1), (3, 5), (5, 2), (7, 3)] {
        let k = ring(p, r, 6, 4, 0);
        let rep = k.check_laws(10_000, 99);
        ensure!(rep.passed(), "p={p} r={r}: {rep:?}");
        ensure!(rep.elements >= 10_000, "only {} elements", rep.elements);
        rings += 1;
    }
    Ok(format!("{rings} rings x 10^4 elements: τ laws, τ^r = 1, Gauss multiplicativity"))
}

fn run_all(bin: &str, dir: &Path) -> Result<(), String> {
    let spec = dir.join("spec.json");
    std::fs::write(&spec, r#"{"r":5,"b":[1],"z":2,"a":2}"#).map_err(|e| e.to_string())?;
    let out = dir.join("out");
    let o = out.to_str().unwrap();
    let structure = out.join("structure.json");
    let s = structure.to_str().unwrap();
    let conn = out.join("connection.json");
    let window = out.join("window_m.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["ring-info", "--r", "3", "--samples", "500"],
        vec!["sym-build", "--spec", spec.to_str().unwrap()],
        vec!["deform", "--structure", s],
        vec!["connection", "--structure", s],
        vec!["dwork", "--structure", s, "--connection", conn.to_str().unwrap()],
        vec!["slopes", "--module", window.to_str().unwrap()],
        vec!["extpow", "--window", window.to_str().unwrap(), "--k", "2"],
        vec!["localmodel", "--n", "4", "--k", "2", "--nu", "1", "--mu", "3"],
        vec!["sweep", "--r-max", "3"],
    ];
    for args in runs {
        let status = Command::new(bin).args(["--seed", "5", "--out", o]).args(&args).output().map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("{args:?} exited with {:?}", status.status.code()));
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gradwin");
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_all(bin, a.path())?;
    run_all(bin, b.path())?;
    let mut names: Vec<_> = std::fs::read_dir(a.path().join("out")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).map_err(|e| e.to_string())?;
        ensure!(x == y, "{name:?} differs between runs");
    }
    Ok(format!("{} report files byte-identical across two runs", names.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("constructor soundness over the default sweep", constructor_soundness),
        ("running instance slopes and window axioms", running_instance),
        ("connection on every deformed sweep instance", connection),
        ("Dwork trivialization and velf compatibility", dwork_velf),
        ("exterior powers", exterior_powers),
        ("local model formulations agree", local_model),
        ("coefficient ring laws", coefficient_layer),
        ("deterministic reports", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria pass");
}
