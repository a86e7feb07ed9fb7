use std::path::Path;

use gradwin::connection_dwork::{Connection, VelfReport};
use gradwin::deformation::{DeformedWindow, SuffReport};
use gradwin::ext_powers::{subset_sum_oracle, MultiplicativeTwist};
use gradwin::graded_semilinear::{NewtonPolygon, SigmaModule, SigmaModuleJson, SlopeMultiset};
use gradwin::linalg::MatJson;
use gradwin::local_model::{chart_presentation, ChartSpec};
use gradwin::sym_structure::{HalfInt, RaiseOrder, SymReport, SymSpec, SymStructure};
use gradwin::windows::{Frame, WindowJson};
use gradwin::{Error, Result, Ring};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Common, SymBuildArgs};
use crate::report::{field, make_ring, read_json, Output, Provenance};

pub fn ring_info(common: &Common, samples: usize) -> Result<Output> {
    let ring = make_ring(common, common.r.unwrap_or(1), None)?;
    let laws = ring.check_laws(samples, common.seed);
    let result = json!({
        "params": ring.params(),
        "work_precision": ring.work_prec(),
        "modulus": ring.modulus(),
        "frobenius_of_generator": ring.report_coeffs(&ring.frobenius_of_generator()),
        "laws": laws,
    });
    Ok(Output::new(laws.passed()).report("ring_info.json", Provenance::new("ring-info", &ring, common.seed), result))
}

fn inline_spec(common: &Common, a: &SymBuildArgs) -> Result<SymSpec> {
    let r = common.r.ok_or_else(|| Error::Input("an inline spec needs --r".into()))?;
    let (Some(b), Some(z), Some(av)) = (a.b.clone(), a.z, a.a) else {
        return Err(Error::Input("give --spec FILE or all of --b, --z, --a".into()));
    };
    let twice = av * 2.0;
    if twice.fract() != 0.0 {
        return Err(Error::Input(format!("a = {av} is not a half-integer")));
    }
    let mut spec = SymSpec::new(r, b, z, HalfInt(twice as i64));
    if let Some(sp) = &a.slope_pair {
        let [zp, zpp] = sp[..] else {
            return Err(Error::Input("--slope-pair takes two integers".into()));
        };
        spec = spec.with_slope_pair(zp, zpp);
    }
    Ok(spec)
}

#[derive(Serialize)]
struct SymSummary {
    r: usize,
    b: Vec<usize>,
    n: usize,
    sigma: Vec<usize>,
    omega: Vec<usize>,
    slopes_n: SlopeMultiset,
    slopes_m: SlopeMultiset,
    expected_slopes_m: SlopeMultiset,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_equals_n1: Option<bool>,
    failures: Vec<String>,
}

pub fn sym_build(common: &Common, a: &SymBuildArgs) -> Result<Output> {
    let spec = match &a.spec {
        Some(path) => read_json::<SymSpec>(path)?,
        None => inline_spec(common, a)?,
    };
    if common.r.is_some_and(|r| r != spec.r) {
        return Err(Error::Input(format!("--r {} disagrees with r = {} in the spec file", common.r.unwrap(), spec.r)));
    }
    let ring = make_ring(common, spec.r, None)?;
    let order = a.raise_seed.map(RaiseOrder::Seeded).unwrap_or(RaiseOrder::Default);
    let s = ring.build_sym(&spec, order)?;
    let rep = ring.verify_sym(&s)?;
    let prov = Provenance::new("sym-build", &ring, common.seed);
    let summary = SymSummary {
        r: spec.r,
        b: s.params.b.clone(),
        n: s.params.n,
        sigma: s.params.sigma.clone(),
        omega: s.params.omega.clone(),
        slopes_n: rep.slopes_n.clone(),
        slopes_m: rep.slopes_m.clone(),
        expected_slopes_m: rep.expected_slopes_m.clone(),
        m_equals_n1: (s.params.b == [0]).then(|| s.m.module == s.n_i[0]),
        failures: rep.failures().iter().map(|x| x.to_string()).collect(),
    };
    let mut out = Output::new(rep.passed());
    let structure = json!({
        "spec": s.params.to_spec(),
        "raise_order": s.order,
        "structure": ring.sym_to_json(&s),
    });
    out.add("structure.json", &crate::report::Envelope { provenance: prov.clone(), pass: rep.passed(), result: structure });
    out.add("verify_report.json", &crate::report::Envelope { provenance: prov.clone(), pass: rep.passed(), result: &rep });
    out.add("window_m.json", &ring.window_to_json(&s.m));
    out.add("window_n.json", &ring.window_to_json(&s.n));
    Ok(out.report("sym_summary.json", prov, summary))
}

/// Rebuilds the structure recorded in a structure.json and checks that it
/// reproduces the stored matrices.
pub fn load_structure(common: &Common, path: &Path) -> Result<(Ring, SymStructure, SymReport)> {
    let v: Value = read_json(path)?;
    let prov: Provenance = field(&v, "/provenance", path)?;
    let spec: SymSpec = field(&v, "/result/spec", path)?;
    let order: RaiseOrder = field(&v, "/result/raise_order", path)?;
    if common.r.is_some_and(|r| r != spec.r) {
        return Err(Error::Input(format!("--r disagrees with r = {} in {}", spec.r, path.display())));
    }
    let ring = make_ring(common, spec.r, Some(&prov))?;
    let s = ring.build_sym(&spec, order)?;
    let rebuilt = serde_json::to_value(ring.sym_to_json(&s)).expect("structure serializes");
    if v.pointer("/result/structure") != Some(&rebuilt) {
        return Err(Error::Input(format!(
            "{} does not match its spec at p = {}, N = {}",
            path.display(),
            ring.p(),
            ring.precision()
        )));
    }
    let rep = ring.verify_sym(&s)?;
    if !rep.passed() {
        return Err(Error::Verification(format!("stored structure fails {:?}", rep.failures())));
    }
    Ok((ring, s, rep))
}

fn deformed(ring: &Ring, s: &SymStructure) -> Result<(gradwin::deformation::DeformationSequence, DeformedWindow, DeformedWindow)> {
    let seq = ring.find_deformation_sequence(&s.n)?;
    let nt = ring.deform_n(&s.n, &seq)?;
    let mt = ring.deform_m(s, &nt)?;
    Ok((seq, nt, mt))
}

fn mats_json(ring: &Ring, m: &[gradwin::Mat]) -> Vec<MatJson> {
    m.iter().map(|x| ring.m_to_json(x)).collect()
}

#[derive(Serialize)]
struct DeformResult {
    sequence: gradwin::deformation::SequenceJson,
    u_n: Vec<MatJson>,
    u_m: Vec<MatJson>,
    n_tilde: WindowJson,
    m_tilde: WindowJson,
    suff: SuffReport,
}

pub fn deform(common: &Common, structure: &Path) -> Result<Output> {
    let (ring, s, _) = load_structure(common, structure)?;
    let (seq, nt, mt) = deformed(&ring, &s)?;
    let suff = ring.check_suff(&s, &nt, &mt)?;
    let result = DeformResult {
        sequence: ring.sequence_to_json(&seq),
        u_n: mats_json(&ring, &nt.u),
        u_m: mats_json(&ring, &mt.u),
        n_tilde: ring.window_to_json(&nt.window),
        m_tilde: ring.window_to_json(&mt.window),
        suff,
    };
    let pass = result.suff.passed();
    Ok(Output::new(pass).report("deform.json", Provenance::new("deform", &ring, common.seed), result))
}

pub fn connection(common: &Common, structure: &Path) -> Result<Output> {
    let (ring, s, _) = load_structure(common, structure)?;
    let (_, nt, mt) = deformed(&ring, &s)?;
    let cn = ring.solve_connection(&nt, common.seed)?;
    let cm = ring.solve_connection(&mt, common.seed)?;
    let result = json!({
        "n": ring.connection_to_json(&cn),
        "m": ring.connection_to_json(&cm),
    });
    Ok(Output::new(true).report("connection.json", Provenance::new("connection", &ring, common.seed), result))
}

fn stored_connection(ring: &Ring, v: &Value, which: &str, w: &DeformedWindow, path: &Path) -> Result<Connection> {
    let mats: Vec<MatJson> = field(v, &format!("/result/{which}/c"), path)?;
    let c = mats.iter().map(|m| ring.m_from_json(m)).collect::<Result<Vec<_>>>()?;
    ring.connection_from_matrices(w, c)
}

#[derive(Serialize)]
struct DworkResult {
    n: Value,
    m: Value,
    velf: VelfReport,
}

pub fn dwork(common: &Common, structure: &Path, connection: &Path) -> Result<Output> {
    let (ring, s, _) = load_structure(common, structure)?;
    let (_, nt, mt) = deformed(&ring, &s)?;
    let v: Value = read_json(connection)?;
    let cn = stored_connection(&ring, &v, "n", &nt, connection)?;
    let cm = stored_connection(&ring, &v, "m", &mt, connection)?;
    let dn = ring.dwork_theta(&nt, &cn)?;
    let dm = ring.dwork_theta(&mt, &cm)?;
    let thn = ring.descent_datum(&dn)?;
    let thm = ring.descent_datum(&dm)?;
    let velf = ring.check_velf(&s, &thn, &thm)?;
    let prec = ring.check_prec();
    let pass = velf.det_ok
        && velf.pi_theta_ok
        && [&dn, &dm].iter().all(|d| d.horizontality.at_least(prec) && d.equivariance.at_least(prec))
        && [&thn, &thm].iter().all(|d| d.diagonal.at_least(prec) && d.cocycle.at_least(prec));
    let result = DworkResult {
        n: json!({"dwork": ring.dwork_to_json(&dn), "descent": ring.descent_to_json(&thn)}),
        m: json!({"dwork": ring.dwork_to_json(&dm), "descent": ring.descent_to_json(&thm)}),
        velf,
    };
    Ok(Output::new(pass).report("dwork.json", Provenance::new("dwork", &ring, common.seed), result))
}

#[derive(Serialize)]
struct SlopesResult {
    ranks: Vec<usize>,
    frame: Frame,
    polygon: NewtonPolygon,
    graded_slopes: SlopeMultiset,
    /// Null when the total cycle cannot be certified at this precision.
    ungraded_slopes: Option<SlopeMultiset>,
}

/// A module file, or a window file whose module is used (at t = 0 for
/// series windows).
fn read_module(path: &Path) -> Result<(SigmaModuleJson, Frame)> {
    let v: Value = read_json(path)?;
    if v.get("module").is_some() {
        let w: WindowJson = serde_json::from_value(v).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Ok((w.module, w.frame))
    } else {
        let m: SigmaModuleJson = serde_json::from_value(v).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Ok((m, Frame::Point))
    }
}

pub fn slopes(common: &Common, path: &Path) -> Result<Output> {
    let (mj, frame) = read_module(path)?;
    let period = mj.ranks.len();
    if common.r.is_some_and(|r| r != period) {
        return Err(Error::Input(format!("--r disagrees with the module's period {period}")));
    }
    let ring = make_ring(common, period, None)?;
    let mut m = ring.module_from_json(&mj)?;
    if frame == Frame::Series {
        let phi = m.matrices().iter().map(|a| ring.m_at_zero(a)).collect();
        m = SigmaModule::new(m.ranks().to_vec(), phi)?;
    }
    let result = SlopesResult {
        ranks: m.ranks().to_vec(),
        frame,
        polygon: ring.graded_polygon(&m)?,
        graded_slopes: ring.graded_slopes(&m)?,
        ungraded_slopes: match ring.ungraded_slopes(&m) {
            Ok(s) => Some(s),
            Err(Error::Precision(_)) => None,
            Err(e) => return Err(e),
        },
    };
    Ok(Output::new(true).report("slopes.json", Provenance::new("slopes", &ring, common.seed), result))
}

#[derive(Serialize)]
struct ExtpowResult {
    k: usize,
    twist: Vec<i64>,
    l_ranks: Vec<usize>,
    slopes_in: SlopeMultiset,
    slopes_out: SlopeMultiset,
    subset_sums: SlopeMultiset,
    independence: Option<gradwin::ext_powers::IndependenceReport>,
}

pub fn extpow(common: &Common, path: &Path, k: usize, twist: Option<&[i64]>, trials: usize) -> Result<Output> {
    let wj: WindowJson = read_json(path)?;
    let period = wj.module.ranks.len();
    if common.r.is_some_and(|r| r != period) {
        return Err(Error::Input(format!("--r disagrees with the window's period {period}")));
    }
    let ring = make_ring(common, period, None)?;
    let w = ring.window_from_json(&wj)?;
    let units = match twist {
        Some(u) if u.len() != period => return Err(Error::Input(format!("--twist needs {period} units, got {}", u.len()))),
        Some(u) => u.to_vec(),
        None => vec![1; period],
    };
    let tw = if units.iter().all(|&u| u == 1) {
        MultiplicativeTwist::trivial(&ring, period)
    } else {
        ring.twist(units.iter().map(|&u| ring.s_int(u)).collect())?
    };
    let out_w = ring.exterior_power(&w, k, &tw)?;
    let point = |x: &gradwin::windows::Window| if x.frame == Frame::Series { ring.specialize(x) } else { x.clone() };
    let slopes_in = ring.graded_slopes(&point(&w).module)?;
    let slopes_out = ring.graded_slopes(&point(&out_w).module)?;
    let subset_sums = SlopeMultiset::new(subset_sum_oracle(&slopes_in.0, k));
    let independence = if trials > 0 { Some(ring.independence_check(&w, k, &tw, trials, common.seed)?) } else { None };
    let pass = slopes_out == subset_sums && independence.as_ref().is_none_or(|r| r.passed());
    let result = ExtpowResult { k, twist: units, l_ranks: out_w.decomposition.l_ranks.clone(), slopes_in, slopes_out, subset_sums, independence };
    let mut out = Output::new(pass);
    out.add("window.json", &ring.window_to_json(&out_w));
    Ok(out.report("extpow.json", Provenance::new("extpow", &ring, common.seed), result))
}

pub struct ChartChoice {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub nu: Option<usize>,
    pub mu: Option<usize>,
    pub max_n: usize,
}

pub fn localmodel(common: &Common, c: &ChartChoice, samples: usize) -> Result<Output> {
    let charts = match (c.n, c.k, c.nu, c.mu) {
        (Some(n), Some(k), Some(nu), Some(mu)) => vec![ChartSpec::new(n, k, nu, mu)?],
        (None, None, None, None) => ChartSpec::all(c.max_n),
        _ => return Err(Error::Input("give all of --n --k --nu --mu, or none".into())),
    };
    let ring = make_ring(common, common.r.unwrap_or(1), None)?;
    let mut pass = true;
    let mut rows = Vec::new();
    for (i, chart) in charts.iter().enumerate() {
        let rep = ring.sample_chart(chart, samples, common.seed.wrapping_add(i as u64))?;
        pass &= rep.passed();
        rows.push(json!({"chart": chart, "presentation": chart_presentation(chart), "report": rep}));
    }
    let result = json!({"samples_per_chart": samples, "charts": rows});
    Ok(Output::new(pass).report("localmodel.json", Provenance::new("localmodel", &ring, common.seed), result))
}
