use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "gradwin", version, about = "Graded windows, Sym-structures and their deformations, as JSON reports")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Ring parameters and output handling. Unset ring flags fall back to the
/// provenance of an input artifact, then to the defaults p=3, N=5, T=9, D=3.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Residue characteristic.
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Residue degree (defaults to the period of the input).
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// Target p-adic precision N.
    #[arg(long, global = true, visible_alias = "p-precision")]
    pub precision: Option<u32>,
    /// t-adic truncation T.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    /// Denominator budget D.
    #[arg(long = "denominator-budget", global = true)]
    pub denominator_budget: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; reports go to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Ring parameters and randomized coefficient-law checks.
    RingInfo {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Build and verify a Sym-structure.
    SymBuild(SymBuildArgs),
    /// Deform N along a sequence and check the generic fibre.
    Deform {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Solve for the connections on the deformed windows.
    Connection {
        #[arg(long)]
        structure: PathBuf,
    },
    /// Dwork trivialization, descent datum and the compatibility checks.
    Dwork {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        connection: PathBuf,
    },
    /// Newton polygon of a graded module or window file.
    Slopes {
        /// A module (ranks + matrices) or a window JSON file.
        #[arg(long)]
        module: PathBuf,
    },
    /// Twisted exterior power of a window.
    Extpow {
        #[arg(long)]
        window: PathBuf,
        #[arg(long)]
        k: usize,
        /// Integer units of the twist, one per degree (trivial when absent).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        twist: Option<Vec<i64>>,
        /// Random decompositions for the independence check.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Equivalence of the two local-model chart formulations on sampled points.
    Localmodel {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        nu: Option<usize>,
        #[arg(long)]
        mu: Option<usize>,
        /// Charts with n up to this bound when no single chart is given.
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Property suite over every feasible spec in a range.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SymBuildArgs {
    /// JSON spec file; otherwise the inline flags are used.
    #[arg(long, conflicts_with_all = ["b", "z", "a"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub b: Option<Vec<usize>>,
    #[arg(long)]
    pub z: Option<usize>,
    /// Half-integers are allowed, e.g. 1.5.
    #[arg(long)]
    pub a: Option<f64>,
    /// Split N with integral slopes z',z'' instead of the isoclinal swap.
    #[arg(long, value_delimiter = ',')]
    pub slope_pair: Option<Vec<usize>>,
    /// Draw the ladder raises from this seed instead of the default order.
    #[arg(long)]
    pub raise_seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [3u64, 5])]
    pub primes: Vec<u64>,
    #[arg(long, default_value_t = 8)]
    pub r_max: usize,
    #[arg(long, default_value_t = 2)]
    pub c_max: usize,
    #[arg(long, default_value_t = 2)]
    pub b_max: usize,
    #[arg(long, default_value_t = 2)]
    pub z_max: usize,
    #[arg(long, default_value_t = 2.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    /// Corrupt the instance with this index (testing the harness itself).
    #[arg(long)]
    pub corrupt: Option<usize>,
}
