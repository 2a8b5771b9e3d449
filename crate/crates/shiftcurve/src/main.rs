use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shiftcurve::{
    default_n_grid, estimate_bundle, rate_study_bundle, risk_bundle, run_section4_study, select_bundle,
    simulate_bundle, write_bundle, AppError, Bundle, ConfigPatch, CriterionName, DensitySpec, ExperimentConfig,
    LogBaseName, PenaltyVariant, Result, Runner,
};

/// Template estimation from randomly shifted noisy curves.
///
/// Settings come from a preset, then `--config`, then flags. Without `--out`
/// the main table is printed to stdout; with it every table is written into
/// the directory. Errors are printed to stderr as one JSON line.
#[derive(Debug, Parser)]
#[command(name = "shiftcurve", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one dataset: rendered curves, averaged coefficients, shifts.
    Simulate(Common),
    /// Estimate the template from one dataset with the configured criterion.
    Estimate(Common),
    /// Exact risk curves; `--ratios` adds Monte Carlo oracle ratios.
    Risk {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ratios: bool,
    },
    /// Criterion trace over N = 0..=m0 for one dataset.
    Select(Common),
    /// Repeated selection of N* and Ñ with histograms and risk summaries.
    StudySection4(Common),
    /// Monte Carlo risk over growing n and the fitted log-log slope.
    RateStudy {
        #[command(flatten)]
        common: Common,
        /// Comma-separated sample sizes [default: 200,400,...,6400]
        #[arg(long, value_delimiter = ',')]
        n_grid: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum DensityName {
    PointMass,
    Laplace,
    Gaussian,
    Uniform,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file overriding the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the CSV bundle.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run replications on the calling thread only.
    #[arg(long)]
    sequential: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    dump_config: bool,

    /// wave, sobolev[:s], spike[:k] or a k,re,im coefficient file.
    #[arg(long)]
    template: Option<String>,
    #[arg(long, value_enum)]
    density: Option<DensityName>,
    /// Scale of the Laplace or Gaussian shift law.
    #[arg(long)]
    sigma: Option<f64>,
    /// Half-width of the uniform shift law.
    #[arg(long)]
    half_width: Option<f64>,
    /// Number of curves.
    #[arg(long)]
    n: Option<usize>,
    /// Noise level.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Band limit K.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum)]
    criterion: Option<CriterionName>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Integer, or `none` for the formula.
    #[arg(long, value_parser = parse_m0)]
    m0_override: Option<M0>,
    #[arg(long, value_enum)]
    log_base: Option<LogBaseName>,
    #[arg(long, value_enum)]
    penalty_variant: Option<PenaltyVariant>,
    #[arg(long)]
    threshold_multiplier: Option<f64>,
    #[arg(long)]
    penalty_multiplier: Option<f64>,
    /// Points per curve when rendering.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
struct M0(Option<usize>);

fn parse_m0(s: &str) -> std::result::Result<M0, String> {
    if s == "none" {
        return Ok(M0(None));
    }
    s.parse()
        .map(|v| M0(Some(v)))
        .map_err(|_| format!("expected an integer or `none`, got `{s}`"))
}

impl Common {
    fn config(&self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path, base)?,
            None => base,
        };
        let density = self.density_override(cfg.density)?;
        cfg.apply(ConfigPatch {
            template: self.template.clone(),
            density,
            n: self.n,
            epsilon: self.epsilon,
            k: self.k,
            criterion: self.criterion,
            replications: self.replications,
            seed: self.seed,
            m0_override: self.m0_override.map(|m| m.0),
            log_base: self.log_base,
            penalty_variant: self.penalty_variant,
            threshold_multiplier: self.threshold_multiplier,
            penalty_multiplier: self.penalty_multiplier,
            grid: self.grid,
        });
        cfg.validate()?;
        Ok(cfg)
    }

    /// `--density` picks the law; `--sigma`/`--half-width` alone rescale the
    /// current one.
    fn density_override(&self, current: DensitySpec) -> Result<Option<DensitySpec>> {
        let need = |v: Option<f64>, flag: &str, from: Option<f64>| {
            v.or(from)
                .ok_or_else(|| AppError::config("density", format!("`{flag}` is required for this density")))
        };
        let (cur_sigma, cur_a) = match current {
            DensitySpec::Laplace { sigma } | DensitySpec::Gaussian { sigma } => (Some(sigma), None),
            DensitySpec::Uniform { a } => (None, Some(a)),
            DensitySpec::PointMass => (None, None),
        };
        let kind = match self.density {
            Some(kind) => kind,
            None => match current {
                _ if self.sigma.is_none() && self.half_width.is_none() => return Ok(None),
                DensitySpec::PointMass => DensityName::PointMass,
                DensitySpec::Laplace { .. } => DensityName::Laplace,
                DensitySpec::Gaussian { .. } => DensityName::Gaussian,
                DensitySpec::Uniform { .. } => DensityName::Uniform,
            },
        };
        let spec = match kind {
            DensityName::PointMass => DensitySpec::PointMass,
            DensityName::Laplace => DensitySpec::Laplace {
                sigma: need(self.sigma, "--sigma", cur_sigma)?,
            },
            DensityName::Gaussian => DensitySpec::Gaussian {
                sigma: need(self.sigma, "--sigma", cur_sigma)?,
            },
            DensityName::Uniform => DensitySpec::Uniform {
                a: need(self.half_width, "--half-width", cur_a)?,
            },
        };
        Ok(Some(spec))
    }

    fn runner(&self) -> Runner {
        if self.sequential {
            Runner::Sequential
        } else {
            Runner::Parallel
        }
    }

    fn emit(&self, bundle: &Bundle, main_table: &str) -> Result<()> {
        match &self.out {
            Some(dir) => write_bundle(dir, bundle),
            None => {
                print!("{}", bundle[main_table]);
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (common, base) = match &cli.command {
        Command::RateStudy { common, .. } => (common, ExperimentConfig::rate_preset()),
        Command::Simulate(c) | Command::Estimate(c) | Command::Select(c) | Command::StudySection4(c) => {
            (c, ExperimentConfig::section4())
        }
        Command::Risk { common, .. } => (common, ExperimentConfig::section4()),
    };
    let cfg = common.config(base)?;
    if common.dump_config {
        print!("{}", cfg.to_toml_string());
        return Ok(());
    }
    let runner = common.runner();
    match &cli.command {
        Command::Simulate(c) => c.emit(&simulate_bundle(&cfg)?, "curves.csv"),
        Command::Estimate(c) => c.emit(&estimate_bundle(&cfg)?, "estimate.csv"),
        Command::Select(c) => c.emit(&select_bundle(&cfg)?, "selection.csv"),
        Command::Risk { common, ratios } => {
            let main = if *ratios { "ratios.csv" } else { "risk_curve.csv" };
            common.emit(&risk_bundle(&cfg, *ratios, &runner)?, main)
        }
        Command::StudySection4(c) => c.emit(&run_section4_study(&cfg, &runner)?, "histogram.csv"),
        Command::RateStudy { common, n_grid } => {
            let grid = n_grid.clone().unwrap_or_else(default_n_grid);
            common.emit(&rate_study_bundle(&cfg, &grid, &runner)?, "rate.csv")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let line = serde_json::json!({ "error": "usage", "message": e.kind().to_string(), "detail": e.to_string().trim() });
            eprintln!("{line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
