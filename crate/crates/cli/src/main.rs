mod commands;
mod config;
mod output;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use output::{Format, RunConfig};

/// Fixed points, bifurcations, resonances and chaos of the map
/// F(x, y, z) = (μx(1−x−y−z), βy(x−z), λyz).
///
/// Every subcommand writes one CSV or JSON file and prints a short summary.
/// Exit status: 0 on success, 1 on numerical failure, 2 on usage errors.
#[derive(Debug, Parser)]
#[command(name = "tritrophic", version, args_override_self = true)]
pub struct Cli {
    /// TOML file of flag = value pairs; flags on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for parallel sweeps and searches (default: all cores).
    #[arg(long, global = true, env = "TRITROPHIC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Params {
    /// Growth rate λ of the top predator.
    #[arg(long)]
    pub lambda: f64,
    /// Growth rate μ of the prey.
    #[arg(long)]
    pub mu: f64,
    /// Growth rate β of the predator.
    #[arg(long)]
    pub beta: f64,
}

#[derive(Debug, Args, Clone)]
pub struct Init {
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub z0: f64,
}

#[derive(Debug, Args, Clone)]
pub struct Out {
    /// Output file (default: <subcommand>.<format> in the working directory).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Recorded in the output header. The searches are grid based and do not
    /// draw random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Codim1Kind {
    Transcritical,
    Flip,
    Ns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PointArg {
    O,
    E1,
    E2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResonanceArg {
    R12,
    R13,
    R14,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Lambda,
    Mu,
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OdeSystem {
    /// 1:2 unfolding in (ζ, η).
    R12,
    /// 1:3 polar flow in (ρ, ι).
    R13,
    /// 1:4 polar flow in (ρ, ν).
    R14,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coordinates, existence and multipliers of O, E₁, E₂, E₃.
    FixedPoints {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Out,
    },
    /// Topological type of each existing fixed point.
    Classify {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        out: Out,
    },
    /// Codimension-one normal-form coefficients, closed form and numeric.
    Codim1 {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum)]
        kind: Codim1Kind,
        /// Fixed point (default: O for transcritical, E1 for flip, E2 for ns).
        #[arg(long, value_enum)]
        at: Option<PointArg>,
        #[command(flatten)]
        out: Out,
    },
    /// Strong resonances: detection at a parameter point, or the normal-form
    /// constants of one resonance.
    Resonance {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum)]
        kind: Option<ResonanceArg>,
        /// Detection tolerance on the multipliers.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Arnold tongue 𝒜_{n/m}: resonance point, coefficients, membership and
    /// period-m orbits.
    Tongue {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// With --beta, evaluate tongue membership at (μ, β).
        #[arg(long, requires = "beta")]
        mu: Option<f64>,
        #[arg(long, requires = "mu")]
        beta: Option<f64>,
        /// With --mu and --beta, search for the period-m orbit pair at this λ.
        #[arg(long, requires = "mu")]
        lambda: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Expanding test, region 𝔚 and snap-back certificate at E₂.
    Marotto {
        #[command(flatten)]
        params: Params,
        /// Samples per axis when validating the expanding box.
        #[arg(long, default_value_t = 9)]
        box_grid: usize,
        /// Chain length M in F^M(E′) = E₂.
        #[arg(long, default_value_t = 2)]
        chain: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Iterate the map and record the orbit.
    Orbit {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        init: Init,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        transient: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Lyapunov spectrum by QR re-orthonormalization.
    Lyapunov {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        init: Init,
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        transient: usize,
        #[command(flatten)]
        out: Out,
    },
    /// Bifurcation diagram data over one parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Fixed parameters; the swept one may be omitted.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[command(flatten)]
        init: Init,
        /// States recorded per grid point.
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 20_000)]
        transient: usize,
        #[arg(long, default_value_t = 2_000)]
        lyapunov_iterations: usize,
        /// Start each grid point from the previous point's final state.
        #[arg(long)]
        warm_start: bool,
        #[command(flatten)]
        out: Out,
    },
    /// Integrate a truncated planar normal form by RK4.
    NormalFormOde {
        #[arg(long, value_enum)]
        system: OdeSystem,
        /// Unfolding parameters: (δ₁, δ₂), (β₁, β₂) or (ω₁, ω₂).
        #[arg(long, allow_negative_numbers = true)]
        p1: f64,
        #[arg(long, allow_negative_numbers = true)]
        p2: f64,
        /// Cubic coefficients: (R_c, I_c) for 1:3, (a₀, b₀) for 1:4; unused for 1:2.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c2: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        u0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v0: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = tritrophic::resonance::DEFAULT_DT)]
        dt: f64,
        /// Keep every k-th sample.
        #[arg(long, default_value_t = 10)]
        stride: usize,
        #[command(flatten)]
        out: Out,
    },
}

pub const SUBCOMMANDS: &[&str] = &[
    "fixed-points",
    "classify",
    "codim1",
    "resonance",
    "tongue",
    "marotto",
    "orbit",
    "lyapunov",
    "sweep",
    "normal-form-ode",
];

fn run_config(matches: &ArgMatches) -> RunConfig {
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd = Cli::command();
    let sub_cmd = cmd.find_subcommand(name).expect("known subcommand");
    let is_arg = |id: &str| {
        cmd.get_arguments()
            .chain(sub_cmd.get_arguments())
            .any(|a| a.get_id().as_str() == id)
    };
    let mut settings = BTreeMap::new();
    for m in [matches, sub] {
        for id in m.ids().filter(|id| is_arg(id.as_str())) {
            if let Ok(Some(vals)) = m.try_get_raw(id.as_str()) {
                let joined: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
                settings.insert(id.to_string(), joined.join(" "));
            }
        }
    }
    RunConfig {
        command: name.to_string(),
        settings,
    }
}

fn main() -> ExitCode {
    let argv: Vec<_> = std::env::args_os().collect();
    let argv = match config::expand(argv, SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let matches = Cli::command().get_matches_from(argv);
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    if let Some(n) = cli.threads {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = run_config(&matches);
    match commands::run(cli.command, config) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<commands::UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
