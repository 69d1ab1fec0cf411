use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fraclap::radial::DEFAULT_GRID;
use fraclap::{ProblemParams, QuadratureSpec};

#[derive(Debug, Parser)]
#[command(name = "fraclap", version, about = "Radial fractional potential theory toolbox")]
pub struct Cli {
    /// Run the built-in acceptance suite and print a pass/fail table.
    #[arg(long)]
    pub selftest: bool,

    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Worker threads (default: FRACLAP_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Gauss nodes per panel.
    #[arg(long, global = true, default_value_t = 10)]
    pub nodes: usize,
}

impl Global {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            rel_tol: self.tol,
            gauss_nodes: self.nodes,
            ..QuadratureSpec::default()
        }
    }
}

/// The nine scalars of the system.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
}

impl ParamArgs {
    pub fn params(&self) -> ProblemParams {
        ProblemParams {
            n: self.n,
            k: self.k,
            l: self.l,
            alpha: self.alpha,
            beta: self.beta,
            a: self.a,
            b: self.b,
            p: self.p,
            q: self.q,
        }
    }
}

/// A radial profile: a CSV file, a constant, or `(1+r²)^{-e}`.
#[derive(Debug, Clone, Args)]
pub struct Profile {
    /// CSV with header `r,value` and an optional JSON sidecar.
    #[arg(long, group = "profile")]
    pub input: Option<PathBuf>,

    /// Constant profile.
    #[arg(long = "const", group = "profile")]
    pub constant: Option<f64>,

    /// Bubble `(1+r²)^{-e}` with the given exponent `e`.
    #[arg(long, group = "profile")]
    pub bubble: Option<f64>,

    /// Factor applied to a generated profile.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_GRID.r_min)]
    pub rmin: f64,
    #[arg(long, default_value_t = DEFAULT_GRID.r_max)]
    pub rmax: f64,
    #[arg(long, default_value_t = DEFAULT_GRID.points)]
    pub points: usize,
}

/// A compactly supported source in `[1, 2]`: a CSV file or a smooth bump.
#[derive(Debug, Clone, Args)]
pub struct Source {
    #[arg(long)]
    pub source: Option<PathBuf>,

    /// Randomised bump from this seed instead of the standard one.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fractional Laplacian of a profile at given radii.
    Frlap {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Radii |x| (comma separated).
        #[arg(long = "r", value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[command(flatten)]
        profile: Profile,
    },
    /// Riesz potential of a source profile, or the ring kernel at (r, s).
    Riesz {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Ring kernel at `--ring r,s` instead of a potential.
        #[arg(long, value_delimiter = ',')]
        ring: Option<Vec<f64>>,
        #[command(flatten)]
        source: Source,
        /// Potential of a profile instead of a bump source.
        #[command(flatten)]
        profile: Profile,
    },
    /// Green function of the ball at (|x|, |y|, cos angle).
    Green {
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Poisson kernel of the ball at (|x|, |y|, cos angle), |y| > R.
    Poisson {
        #[command(flatten)]
        ball: BallArgs,
    },
    /// Nonlocal average of a profile outside the ball of radius R.
    Navg {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "R", value_delimiter = ',', required = true)]
        big_r: Vec<f64>,
        #[command(flatten)]
        profile: Profile,
    },
    /// Sign of the sphere integral, at one point or over the built-in sweep.
    SignLemma {
        #[arg(long, required_unless_present = "sweep")]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long = "r", default_value_t = 1.0)]
        r: f64,
        #[arg(long = "R", required_unless_present = "sweep")]
        big_r: Option<f64>,
        #[arg(long)]
        sweep: bool,
    },
    /// Positive increasing potential with nonnegative fractional Laplacian.
    Counterexample {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[command(flatten)]
        source: Source,
        /// Also write the potential to this CSV.
        #[arg(long)]
        profile_out: Option<PathBuf>,
    },
    /// Value at the origin against its Green and Poisson representation.
    Represent {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long = "R")]
        big_r: f64,
        #[command(flatten)]
        source: Source,
    },
    /// Which nonexistence result covers a parameter point.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Exponent recursion of the scaling-sphere argument.
    Bootstrap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20)]
        i_max: usize,
    },
    /// Classification over a (p, q) grid.
    RegionMap {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 3.5])]
        p_range: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 3.5])]
        q_range: Vec<f64>,
        #[arg(long, default_value_t = 31)]
        resolution: usize,
    },
    /// Picard iteration of the integral system.
    Iterate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long)]
        u0: Option<PathBuf>,
        #[arg(long)]
        v0: Option<PathBuf>,
        /// Without files start from `A (1+r²)^{-(n-2k-α)/2}` and its mirror.
        #[arg(long, default_value_t = 1.0)]
        init_amplitude: f64,
    },
    /// Fitted decay rate of a profile, with the predicted exponents.
    DecayFit {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        profile: Profile,
        #[arg(long, default_value_t = 10.0)]
        lo: f64,
        #[arg(long, default_value_t = 1000.0)]
        hi: f64,
        /// Second profile; enables the compensated-product check with `--radii`.
        #[arg(long)]
        v: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Kelvin transform of a profile, or its defect on (0, λ).
    Kelvin {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        defect: bool,
        #[command(flatten)]
        profile: Profile,
    },
}

#[derive(Debug, Clone, Args)]
pub struct BallArgs {
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
    /// Cosine of the angle between x and y.
    #[arg(long, default_value_t = 1.0)]
    pub cos: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub big_r: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
}
