use std::path::Path;

use gradwin::{Error, Result, Ring, RingParams};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::Common;

pub const GIT_DESCRIBE: &str = env!("GRADWIN_GIT_DESCRIBE");

const DEFAULT_P: u64 = 3;
const DEFAULT_N: u32 = 5;
const DEFAULT_T: usize = 9;
const DEFAULT_D: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub git_describe: String,
    pub command: String,
    pub p: u64,
    pub r: usize,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "D")]
    pub d: u32,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &str, ring: &Ring, seed: u64) -> Self {
        Self::from_params(command, ring.params(), seed)
    }

    pub fn from_params(command: &str, params: &RingParams, seed: u64) -> Self {
        Provenance {
            tool: "gradwin".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            git_describe: GIT_DESCRIBE.into(),
            command: command.into(),
            p: params.p,
            r: params.r,
            n: params.precision,
            t: params.truncation,
            d: params.denom_budget,
            seed,
        }
    }
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub provenance: Provenance,
    pub pass: bool,
    pub result: T,
}

/// Files produced by a command, in write order. The first one is the
/// primary report.
pub struct Output {
    pub files: Vec<(String, String)>,
    pub pass: bool,
}

impl Output {
    pub fn new(pass: bool) -> Self {
        Output { files: Vec::new(), pass }
    }

    pub fn add<T: Serialize>(&mut self, name: &str, value: &T) {
        self.files.push((name.to_string(), to_pretty(value)));
    }

    pub fn report<T: Serialize>(mut self, name: &str, provenance: Provenance, result: T) -> Self {
        let env = Envelope { provenance, pass: self.pass, result };
        self.files.insert(0, (name.to_string(), to_pretty(&env)));
        self
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Ring parameters: explicit flags, then the input artifact's provenance,
/// then the defaults.
pub fn make_ring(common: &Common, r: usize, upstream: Option<&Provenance>) -> Result<Ring> {
    let p = common.p.or(upstream.map(|u| u.p)).unwrap_or(DEFAULT_P);
    let n = common.precision.or(upstream.map(|u| u.n)).unwrap_or(DEFAULT_N);
    let t = common.truncation.or(upstream.map(|u| u.t)).unwrap_or(DEFAULT_T);
    let d = common.denominator_budget.or(upstream.map(|u| u.d)).unwrap_or(DEFAULT_D);
    Ring::new(RingParams::new(p, r, n, t).with_denom_budget(d))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

pub fn field<T: for<'de> Deserialize<'de>>(v: &Value, pointer: &str, path: &Path) -> Result<T> {
    let x = v
        .pointer(pointer)
        .ok_or_else(|| Error::Input(format!("{}: missing {pointer}", path.display())))?;
    T::deserialize(x).map_err(|e| Error::Input(format!("{}: {pointer}: {e}", path.display())))
}

/// Machine-readable error, written to stderr.
#[derive(Serialize)]
pub struct ErrorReport<'a> {
    pub command: &'a str,
    pub exit_code: i32,
    pub error: ErrorBody,
}

#[derive(Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

impl ErrorBody {
    pub fn from_error(e: &Error) -> Self {
        let message = match e {
            Error::Input(m) | Error::Precision(m) | Error::Construction(m) | Error::Verification(m) => m.clone(),
        };
        ErrorBody { kind: e.kind().to_string(), message }
    }
}
