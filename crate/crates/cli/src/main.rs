mod commands;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use defconn::io::{FAMILY_SCHEMA, OPERATOR_SCHEMA};
use defconn::Error;

#[derive(Parser, Debug)]
#[command(name = "defconn", version, about = "Curvature operators and definite connections on four-manifolds")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Definiteness tolerance.
    #[arg(long, env = "DEFCONN_TOL", default_value_t = defconn::definite::DEFAULT_TOL)]
    pub tol: f64,
    /// Fibonacci lattice size per sphere axis.
    #[arg(long, default_value_t = defconn::definite::DEFAULT_GRID)]
    pub grid: usize,
    /// Local refinement iterations.
    #[arg(long, default_value_t = defconn::definite::DEFAULT_REFINE)]
    pub refine: usize,
    /// Random seed.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// JSON output (default).
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    /// Plain text output.
    #[arg(long)]
    pub text: bool,
    /// Skip the Bianchi trace check on block input.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// Read JSON input from a file.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Inline JSON input.
    #[arg(long, conflicts_with = "file")]
    pub input: Option<String>,
    /// Built-in family: S4, H4, CP2, CH2, On, GromovThurston.
    #[arg(long, conflicts_with_all = ["file", "input"])]
    pub builtin: Option<String>,
    /// Parameter n of On(n).
    #[arg(long)]
    pub n: Option<u32>,
    /// Scale k of the Gromov-Thurston profile.
    #[arg(long)]
    pub k: Option<u32>,
    /// Matching radius of the Gromov-Thurston profile.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Blend interval of the Gromov-Thurston profile.
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    pub blend: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BundleArg {
    Plus,
    Minus,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct RadialGrid {
    /// Radial grid start (defaults to the family's grid).
    #[arg(long)]
    pub r_min: Option<f64>,
    /// Radial grid end.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Radial grid size.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Classify a curvature operator by the sign of D = A² − BᵀB.
    Classify {
        #[command(flatten)]
        source: Source,
        /// Radius at which a built-in family is evaluated.
        #[arg(long)]
        r: Option<f64>,
        /// Orientation of a built-in family operator.
        #[arg(long, value_enum, default_value_t = BundleArg::Plus)]
        bundle: BundleArg,
        #[command(flatten)]
        common: Common,
    },
    /// Sectional curvature extrema and pinching ratio.
    Pinch {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_enum, default_value_t = BundleArg::Plus)]
        bundle: BundleArg,
        #[command(flatten)]
        common: Common,
    },
    /// Definite-path verdicts of a cohomogeneity-one family.
    Family {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = BundleArg::Both)]
        bundle: BundleArg,
        /// Also reconstruct and classify the curvature blocks on the grid.
        #[arg(long)]
        blocks: bool,
        #[command(flatten)]
        grid: RadialGrid,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep of the hyperbolic to complex-hyperbolic isotopy.
    Isotopy {
        /// Number of t-values in [0, 1].
        #[arg(long, default_value_t = 21)]
        t_points: usize,
        #[command(flatten)]
        grid: RadialGrid,
        #[command(flatten)]
        common: Common,
    },
    /// Chern numbers of the twistor space.
    Chern {
        #[arg(long, allow_hyphen_values = true)]
        chi: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<i64>,
        /// Positive or Negative.
        #[arg(long)]
        sign: Option<String>,
        /// Read --tau in the complex orientation (negative branch).
        #[arg(long)]
        complex_orientation: bool,
        /// Also evaluate the gate for Dpos or Dneg.
        #[arg(long)]
        d_sign: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        input: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Twistor degree of an immersed surface.
    Adjunction {
        #[arg(long, allow_hyphen_values = true)]
        euler: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        self_intersection: Option<i64>,
        #[arg(long, default_value_t = 0)]
        double_points: i64,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        input: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized verification of the pinching theorem and lemma suites.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Also check the taming inequalities on the sphere grid.
        #[arg(long)]
        strengthened: bool,
        /// Samples for the lemma suites (0 skips them).
        #[arg(long, default_value_t = 10_000)]
        suite_samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn schema_for(verb: &Verb) -> Option<&'static str> {
    match verb {
        Verb::Classify { .. } | Verb::Pinch { .. } => Some(OPERATOR_SCHEMA),
        Verb::Family { .. } => Some(FAMILY_SCHEMA),
        Verb::Chern { .. } => Some(commands::CHERN_SCHEMA),
        Verb::Adjunction { .. } => Some(commands::SURFACE_SCHEMA),
        _ => None,
    }
}

fn run(verb: &Verb) -> defconn::Result<(commands::Outcome, bool)> {
    let (report, common) = match verb {
        Verb::Classify { source, r, bundle, common } => (commands::classify(source, *r, *bundle, common)?, common),
        Verb::Pinch { source, r, bundle, common } => (commands::pinch(source, *r, *bundle, common)?, common),
        Verb::Family { source, bundle, blocks, grid, common } => {
            (commands::family(source, *bundle, *blocks, grid, common)?, common)
        }
        Verb::Isotopy { t_points, grid, common } => (commands::isotopy(*t_points, grid, common)?, common),
        Verb::Chern { chi, tau, sign, complex_orientation, d_sign, file, input, common } => (
            commands::chern(*chi, *tau, sign.as_deref(), *complex_orientation, d_sign.as_deref(), file, input, common)?,
            common,
        ),
        Verb::Adjunction { euler, self_intersection, double_points, file, input, common } => (
            commands::adjunction(*euler, *self_intersection, *double_points, file, input, common)?,
            common,
        ),
        Verb::Verify { samples, strengthened, suite_samples, common } => {
            (commands::verify(*samples, *strengthened, *suite_samples, common)?, common)
        }
    };
    Ok((report, common.text))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 0 {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{OPERATOR_SCHEMA}\n\n{FAMILY_SCHEMA}");
            return ExitCode::from(2);
        }
    };
    match run(&cli.verb) {
        Ok((out, text)) => {
            let body = if text { render::to_text(&out.report) } else { render::to_json(&out.report) + "\n" };
            let _ = std::io::stdout().write_all(body.as_bytes());
            match out.violation {
                Some(reason) => {
                    eprintln!("theorem violation: {reason}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Error::TheoremViolation { reason, operator }) => {
            eprintln!("theorem violation: {reason}\noperator: {operator}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(schema) = schema_for(&cli.verb).filter(|s| !e.to_string().contains(*s)) {
                eprintln!("\n{schema}");
            }
            ExitCode::from(2)
        }
    }
}
