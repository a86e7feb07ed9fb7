use gradwin::ext_powers::{subset_sum_oracle, MultiplicativeTwist};
use gradwin::graded_semilinear::{SigmaModule, SlopeMultiset};
use gradwin::sym_structure::{feasible_specs, HalfInt, RaiseOrder, SweepRanges, SymSpec, SymStructure};
use gradwin::{Error, Result, Ring, RingParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Common, SweepArgs};
use crate::report::{Output, Provenance};

const MAX_R: usize = 8;
const MAX_N_RANK: usize = 4;
const MAX_PRECISION: u32 = 6;
const MAX_TRUNCATION: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub key: String,
    pub p: u64,
    pub spec: SymSpec,
    pub sym: bool,
    pub deform: bool,
    /// "pass", "fail", or "needs T > x" when the truncation is too short to
    /// certify generic slopes.
    pub suff: String,
    pub connection: bool,
    pub wedge: bool,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepCounts {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub suff_pass: usize,
    pub suff_needs_truncation: usize,
}

#[derive(Serialize)]
struct SweepResult {
    primes: Vec<u64>,
    ranges: SweepRanges,
    counts: SweepCounts,
    rows: Vec<SweepRow>,
}

fn ranges(a: &SweepArgs) -> Result<SweepRanges> {
    let twice = a.a_max * 2.0;
    if twice.fract() != 0.0 || twice < 0.0 {
        return Err(Error::Input(format!("--a-max {} is not a non-negative half-integer", a.a_max)));
    }
    Ok(SweepRanges { r_max: a.r_max, c_max: a.c_max, b_max: a.b_max, z_max: a.z_max, a_max: HalfInt(twice as i64), n_max: a.n_max })
}

/// Scales φ at degree 0 of M by p, which no verification can survive.
fn corrupt(k: &Ring, s: &mut SymStructure) {
    let mut phi = s.m.module.matrices().to_vec();
    phi[0] = k.m_mul_p_pow(&phi[0], 1);
    s.m.module = SigmaModule::new(s.m.module.ranks().to_vec(), phi).expect("same shapes");
}

/// Ring parameters and solver seed shared by every instance.
#[derive(Clone, Copy)]
struct Settings {
    n: u32,
    t: usize,
    d: u32,
    seed: u64,
}

fn run_instance(index: usize, p: u64, spec: &SymSpec, cfg: Settings, corrupt_it: bool) -> SweepRow {
    let Settings { n, t, d, seed } = cfg;
    let key = format!("p{p}-r{}-b{:?}-z{}-a{}", spec.r, spec.b, spec.z, spec.a);
    let mut row = SweepRow {
        index,
        key,
        p,
        spec: spec.clone(),
        sym: false,
        deform: false,
        suff: "fail".into(),
        connection: false,
        wedge: false,
        pass: false,
        errors: Vec::new(),
    };
    let k = match Ring::new(RingParams::new(p, spec.r, n, t).with_denom_budget(d)) {
        Ok(k) => k,
        Err(e) => {
            row.errors.push(format!("ring: {e}"));
            return row;
        }
    };
    let mut s = match k.build_sym(spec, RaiseOrder::Default) {
        Ok(s) => s,
        Err(e) => {
            row.errors.push(format!("sym-build: {e}"));
            return row;
        }
    };
    if corrupt_it {
        corrupt(&k, &mut s);
    }
    match k.verify_sym(&s) {
        Ok(rep) if rep.passed() => row.sym = true,
        Ok(rep) => row.errors.push(format!("verify: {:?}", rep.failures())),
        Err(e) => row.errors.push(format!("verify: {e}")),
    }
    let deformed = k
        .find_deformation_sequence(&s.n)
        .and_then(|seq| k.deform_n(&s.n, &seq))
        .and_then(|nt| k.deform_m(&s, &nt).map(|mt| (nt, mt)));
    match &deformed {
        Ok((nt, mt)) => {
            row.deform = true;
            row.suff = match k.check_suff(&s, nt, mt) {
                Ok(rep) if rep.passed() => "pass".into(),
                Ok(rep) => {
                    row.errors.push(format!("suff: {:?}", rep.checks.iter().filter(|c| !c.pass).map(|c| &c.name).collect::<Vec<_>>()));
                    "fail".into()
                }
                Err(Error::Precision(_)) => {
                    let bsum = spec.b.iter().sum::<usize>().max(1) as u64;
                    format!("needs T > {}", k.generic_t_order(nt) * bsum)
                }
                Err(e) => {
                    row.errors.push(format!("suff: {e}"));
                    "fail".into()
                }
            };
            row.connection = true;
            for w in [nt, mt] {
                if let Err(e) = k.solve_connection(w, seed) {
                    row.connection = false;
                    row.errors.push(format!("connection: {e}"));
                }
            }
        }
        Err(e) => row.errors.push(format!("deform: {e}")),
    }
    row.wedge = match wedge_slopes_ok(&k, &s) {
        Ok(ok) => ok,
        Err(e) => {
            row.errors.push(format!("wedge: {e}"));
            false
        }
    };
    if !row.wedge && row.errors.iter().all(|e| !e.starts_with("wedge")) {
        row.errors.push("wedge: slopes differ from subset sums".into());
    }
    row.pass = row.sym && row.deform && row.suff != "fail" && row.connection && row.wedge;
    row
}

/// Slopes of every ∧^k M against the subset-sum oracle.
fn wedge_slopes_ok(k: &Ring, s: &SymStructure) -> Result<bool> {
    let slopes = k.graded_slopes(&s.m.module)?;
    let tw = MultiplicativeTwist::trivial(k, s.params.r);
    for kk in 0..=s.m.module.rank(0) {
        let w = k.exterior_power(&s.m, kk, &tw)?;
        if k.graded_slopes(&w.module)? != SlopeMultiset::new(subset_sum_oracle(&slopes.0, kk)) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn sweep(common: &Common, a: &SweepArgs) -> Result<Output> {
    let ranges = ranges(a)?;
    let n = common.precision.unwrap_or(5);
    let t = common.truncation.unwrap_or(9);
    let d = common.denominator_budget.unwrap_or(3);
    if ranges.r_max > MAX_R || ranges.n_max > MAX_N_RANK || n > MAX_PRECISION || t > MAX_TRUNCATION {
        return Err(Error::Input(format!(
            "sweep caps are r ≤ {MAX_R}, n ≤ {MAX_N_RANK}, N ≤ {MAX_PRECISION}, T ≤ {MAX_TRUNCATION}"
        )));
    }
    for &p in &a.primes {
        Ring::new(RingParams::new(p, 1, n, t).with_denom_budget(d))?;
    }
    let cfg = Settings { n, t, d, seed: common.seed };
    let specs = feasible_specs(&ranges);
    let jobs: Vec<(usize, u64, &SymSpec)> =
        a.primes.iter().flat_map(|&p| specs.iter().map(move |s| (p, s))).enumerate().map(|(i, (p, s))| (i, p, s)).collect();
    let mut rows: Vec<SweepRow> = jobs
        .par_iter()
        .map(|&(i, p, spec)| run_instance(i, p, spec, cfg, a.corrupt == Some(i)))
        .collect();
    rows.sort_by_key(|x| x.index);
    let mut counts = SweepCounts { instances: rows.len(), ..Default::default() };
    for r in &rows {
        if r.pass {
            counts.passed += 1;
        } else {
            counts.failed += 1;
        }
        if r.suff == "pass" {
            counts.suff_pass += 1;
        } else if r.suff.starts_with("needs") {
            counts.suff_needs_truncation += 1;
        }
    }
    // p is the first prime swept and r the largest period.
    let params = RingParams::new(a.primes.first().copied().unwrap_or(0), ranges.r_max, n, t).with_denom_budget(d);
    let prov = Provenance::from_params("sweep", &params, common.seed);
    let pass = counts.failed == 0;
    let result = SweepResult { primes: a.primes.clone(), ranges, counts, rows };
    Ok(Output::new(pass).report("sweep.json", prov, result))
}

/// Plain-text table for the terminal.
pub fn table(json: &str) -> String {
    let v: serde_json::Value = serde_json::from_str(json).expect("own output");
    let mut out = String::new();
    out.push_str(&format!("{:<5} {:<28} {:<4} {:<6} {:<16} {:<5} {:<5} {}\n", "idx", "key", "sym", "deform", "suff", "conn", "wedge", "pass"));
    let yn = |b: &serde_json::Value| if b.as_bool() == Some(true) { "ok" } else { "FAIL" };
    for r in v["result"]["rows"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "{:<5} {:<28} {:<4} {:<6} {:<16} {:<5} {:<5} {}\n",
            r["index"],
            r["key"].as_str().unwrap_or(""),
            yn(&r["sym"]),
            yn(&r["deform"]),
            r["suff"].as_str().unwrap_or(""),
            yn(&r["connection"]),
            yn(&r["wedge"]),
            yn(&r["pass"]),
        ));
    }
    let c = &v["result"]["counts"];
    out.push_str(&format!(
        "{} instances: {} pass, {} fail; generic slopes certified on {}, {} need a longer truncation\n",
        c["instances"], c["passed"], c["failed"], c["suff_pass"], c["suff_needs_truncation"]
    ));
    out
}
