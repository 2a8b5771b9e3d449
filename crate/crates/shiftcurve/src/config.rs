//! Experiment configuration.
//!
//! A config file is TOML. Every key is optional and overrides a preset; the
//! presets are [`ExperimentConfig::section4`] (the default for most
//! subcommands) and [`ExperimentConfig::rate_preset`]. Unknown keys are
//! rejected.
//!
//! ```toml
//! template = "wave"            # wave | sobolev[:s] | spike[:k] | path/to/coeffs.csv
//! density = { kind = "laplace", sigma = 0.1 }
//! n = 100
//! epsilon = 0.1
//! k = 48
//! criterion = "u_bar"          # u | u_bar | u_tilde
//! replications = 100
//! seed = 2024
//! m0_override = 32             # or "none" for the formula
//! log_base = "natural"         # natural | decimal
//! penalty_variant = "printed_form"
//! threshold_multiplier = 1.0
//! penalty_multiplier = 1.0
//! grid = 256
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use shiftcurve_core::catalog::{sobolev_template, spike_template, wave_template};
use shiftcurve_core::{
    CriterionKind, Design, Estimator, LogBase, PenaltyForm, SelectionConfig, ShiftDensity, Template,
};

use crate::error::{AppError, Result};

/// Sobolev templates from the catalog use `A = 1` and `δ = 0.01`.
pub const SOBOLEV_RADIUS: f64 = 1.0;
pub const SOBOLEV_DELTA: f64 = 0.01;
/// Amplitude of the catalog spike.
pub const SPIKE_AMPLITUDE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    PointMass,
    Laplace { sigma: f64 },
    Gaussian { sigma: f64 },
    Uniform { a: f64 },
}

impl DensitySpec {
    pub fn build(self) -> Result<ShiftDensity> {
        let d = match self {
            DensitySpec::PointMass => ShiftDensity::point_mass(),
            DensitySpec::Laplace { sigma } => ShiftDensity::laplace(sigma)?,
            DensitySpec::Gaussian { sigma } => ShiftDensity::gaussian(sigma)?,
            DensitySpec::Uniform { a } => ShiftDensity::uniform(a)?,
        };
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CriterionName {
    U,
    UBar,
    UTilde,
}

impl CriterionName {
    pub fn kind(self) -> CriterionKind {
        match self {
            CriterionName::U => CriterionKind::U,
            CriterionName::UBar => CriterionKind::UBar,
            CriterionName::UTilde => CriterionKind::UTilde,
        }
    }

    pub fn estimator(self) -> Estimator {
        match self {
            CriterionName::U => Estimator::ThetaU,
            CriterionName::UBar => Estimator::ThetaStar,
            CriterionName::UTilde => Estimator::ThetaTilde,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionName::U => "u",
            CriterionName::UBar => "u_bar",
            CriterionName::UTilde => "u_tilde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum LogBaseName {
    Natural,
    Decimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PenaltyVariant {
    ProofForm,
    PrintedForm,
}

/// Template source: a catalog entry or a coefficient file.
#[derive(Debug, Clone, PartialEq)]
pub enum TemplateSpec {
    Wave,
    Sobolev { s: f64 },
    Spike { frequency: usize },
    File(PathBuf),
}

impl TemplateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| AppError::config("template", format!("`{text}`: {msg}"));
        let (name, arg) = match text.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (text, None),
        };
        match (name, arg) {
            ("wave", None) => Ok(TemplateSpec::Wave),
            ("sobolev", None) => Ok(TemplateSpec::Sobolev { s: 2.0 }),
            ("sobolev", Some(a)) => a
                .parse::<f64>()
                .ok()
                .filter(|s| *s > 0.0 && s.is_finite())
                .map(|s| TemplateSpec::Sobolev { s })
                .ok_or_else(|| bad("smoothness must be a positive number")),
            ("spike", None) => Ok(TemplateSpec::Spike { frequency: 2 }),
            ("spike", Some(a)) => a
                .parse::<usize>()
                .ok()
                .filter(|k| *k >= 1)
                .map(|frequency| TemplateSpec::Spike { frequency })
                .ok_or_else(|| bad("frequency must be a positive integer")),
            ("wave", Some(_)) => Err(bad("the wave template takes no argument")),
            _ if text.ends_with(".csv") => Ok(TemplateSpec::File(PathBuf::from(text))),
            _ => Err(bad("expected wave, sobolev[:s], spike[:k] or a .csv coefficient file")),
        }
    }

    pub fn build(&self, max_freq: usize) -> Result<Template> {
        Ok(match self {
            TemplateSpec::Wave => wave_template(max_freq)?,
            TemplateSpec::Sobolev { s } => sobolev_template(*s, SOBOLEV_RADIUS, SOBOLEV_DELTA, max_freq)?,
            TemplateSpec::Spike { frequency } => spike_template(*frequency, SPIKE_AMPLITUDE, max_freq)?,
            TemplateSpec::File(path) => crate::output::read_coefficients(path, max_freq)?,
        })
    }
}

fn ser_m0<S: Serializer>(m0: &Option<usize>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match m0 {
        Some(v) => s.serialize_u64(*v as u64),
        None => s.serialize_str("none"),
    }
}

fn de_m0<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<usize>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(u64),
        Word(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(v) => Ok(Some(v as usize)),
        Raw::Word(w) if w == "none" => Ok(None),
        Raw::Word(w) => Err(serde::de::Error::custom(format!(
            "expected a non-negative integer or \"none\", got \"{w}\""
        ))),
    }
}

fn de_m0_patch<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Option<usize>>, D::Error> {
    de_m0(d).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub template: String,
    pub density: DensitySpec,
    pub n: usize,
    pub epsilon: f64,
    pub k: usize,
    pub criterion: CriterionName,
    pub replications: usize,
    pub seed: u64,
    #[serde(serialize_with = "ser_m0", deserialize_with = "de_m0")]
    pub m0_override: Option<usize>,
    pub log_base: LogBaseName,
    pub penalty_variant: PenaltyVariant,
    pub threshold_multiplier: f64,
    pub penalty_multiplier: f64,
    pub grid: usize,
}

/// Partial config: every present key overrides the base.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub template: Option<String>,
    pub density: Option<DensitySpec>,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
    pub k: Option<usize>,
    pub criterion: Option<CriterionName>,
    pub replications: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default, deserialize_with = "de_m0_patch")]
    pub m0_override: Option<Option<usize>>,
    pub log_base: Option<LogBaseName>,
    pub penalty_variant: Option<PenaltyVariant>,
    pub threshold_multiplier: Option<f64>,
    pub penalty_multiplier: Option<f64>,
    pub grid: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::section4()
    }
}

impl ExperimentConfig {
    /// The simulation study: wave stand-in, Laplace σ = 0.1, n = 100,
    /// M = 100 replications, m0 forced to 32. The penalty uses the printed
    /// form; with the proof form the `|γ|^{-4}` weights make `Ū` too noisy at
    /// m0 = 32 to reproduce the ordering of the two histograms.
    pub fn section4() -> Self {
        ExperimentConfig {
            template: "wave".into(),
            density: DensitySpec::Laplace { sigma: 0.1 },
            n: 100,
            epsilon: 0.1,
            k: 48,
            criterion: CriterionName::UBar,
            replications: 100,
            seed: 2024,
            m0_override: Some(32),
            log_base: LogBaseName::Natural,
            penalty_variant: PenaltyVariant::PrintedForm,
            threshold_multiplier: 1.0,
            penalty_multiplier: 1.0,
            grid: 256,
        }
    }

    /// Base for rate studies: Sobolev `s = 2` template, formula m0, `ε = 0.3`,
    /// `θ̃` (Ũ) with 200 replications per sample size.
    pub fn rate_preset() -> Self {
        ExperimentConfig {
            template: "sobolev:2".into(),
            epsilon: 0.3,
            k: 64,
            criterion: CriterionName::UTilde,
            replications: 200,
            m0_override: None,
            penalty_variant: PenaltyVariant::ProofForm,
            ..Self::section4()
        }
    }

    pub fn apply(&mut self, patch: ConfigPatch) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = patch.$f { self.$f = v; } )* };
        }
        take!(
            template,
            density,
            n,
            epsilon,
            k,
            criterion,
            replications,
            seed,
            m0_override,
            log_base,
            penalty_variant,
            threshold_multiplier,
            penalty_multiplier,
            grid
        );
    }

    /// Parses `source` as a patch over `base` and validates the result.
    pub fn from_toml_str(source: &str, base: ExperimentConfig) -> Result<Self> {
        let patch: ConfigPatch = toml::from_str(source).map_err(|e| toml_error(source, &e))?;
        let mut cfg = base;
        cfg.apply(patch);
        cfg.validate().map_err(|e| with_line(e, source))?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path, base: ExperimentConfig) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|source| AppError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&source, base)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config fields are TOML-representable")
    }

    /// Range checks; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        let fail = |key: &str, msg: String| Err(AppError::config(key, msg));
        let spec = TemplateSpec::parse(&self.template)?;
        match self.density {
            DensitySpec::Laplace { sigma } | DensitySpec::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                return fail("density.sigma", format!("must be a positive number, got {sigma}"));
            }
            DensitySpec::Uniform { a } if !(a > 0.0 && a.is_finite()) => {
                return fail("density.a", format!("must be a positive number, got {a}"));
            }
            _ => {}
        }
        if self.n < 2 {
            return fail("n", format!("need at least 2 curves, got {}", self.n));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon", format!("must be a finite number >= 0, got {}", self.epsilon));
        }
        if self.k < 1 {
            return fail("k", "must be at least 1".into());
        }
        if spec == TemplateSpec::Wave && self.k < 8 {
            return fail("k", format!("the wave template needs k >= 8, got {}", self.k));
        }
        if let TemplateSpec::Spike { frequency } = spec {
            if frequency > self.k {
                return fail(
                    "template",
                    format!("spike frequency {frequency} exceeds k = {}", self.k),
                );
            }
        }
        if self.replications < 1 {
            return fail("replications", "must be at least 1".into());
        }
        if self.seed > i64::MAX as u64 {
            return fail("seed", format!("must be at most {}", i64::MAX));
        }
        if let Some(m0) = self.m0_override {
            if m0 > self.k {
                return fail("m0_override", format!("{m0} exceeds k = {}", self.k));
            }
        }
        for (key, v) in [
            ("threshold_multiplier", self.threshold_multiplier),
            ("penalty_multiplier", self.penalty_multiplier),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(key, format!("must be a positive number, got {v}"));
            }
        }
        if self.grid < 2 * self.k + 1 {
            return fail(
                "grid",
                format!("needs at least 2k + 1 = {} points, got {}", 2 * self.k + 1, self.grid),
            );
        }
        Ok(())
    }

    pub fn template_spec(&self) -> Result<TemplateSpec> {
        TemplateSpec::parse(&self.template)
    }

    pub fn build_template(&self) -> Result<Template> {
        self.template_spec()?.build(self.k)
    }

    pub fn build_density(&self) -> Result<ShiftDensity> {
        self.density.build()
    }

    pub fn design(&self) -> Result<Design> {
        Ok(Design::new(self.n, self.epsilon, self.k)?)
    }

    pub fn selection(&self) -> SelectionConfig {
        SelectionConfig {
            log_base: match self.log_base {
                LogBaseName::Natural => LogBase::Natural,
                LogBaseName::Decimal => LogBase::Decimal,
            },
            threshold_multiplier: self.threshold_multiplier,
            penalty_multiplier: self.penalty_multiplier,
            penalty_form: match self.penalty_variant {
                PenaltyVariant::ProofForm => PenaltyForm::Proof,
                PenaltyVariant::PrintedForm => PenaltyForm::Printed,
            },
            m0_override: self.m0_override,
        }
    }
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

fn toml_error(source: &str, err: &toml::de::Error) -> AppError {
    let (key, line) = match err.span() {
        Some(span) => {
            let line = line_of(source, span.start);
            let text = source.lines().nth(line - 1).unwrap_or("");
            let key = text.split_once('=').map_or(text, |(k, _)| k).trim();
            (key.to_string(), Some(line))
        }
        None => (String::new(), None),
    };
    AppError::Config {
        key,
        line,
        message: err.message().to_string(),
    }
}

/// Attaches the line where the failing key is set, if the source sets it.
fn with_line(err: AppError, source: &str) -> AppError {
    match err {
        AppError::Config {
            key,
            line: None,
            message,
        } => {
            let sets = |l: &str, name: &str| {
                l.trim_start()
                    .strip_prefix(name)
                    .is_some_and(|rest| rest.trim_start().starts_with('='))
            };
            // `density.sigma` may sit in an inline table or under `[density]`
            let head = key.split('.').next().unwrap_or(&key);
            let leaf = key.rsplit('.').next().unwrap_or(&key);
            let line = source
                .lines()
                .position(|l| sets(l, leaf) || (head != leaf && sets(l, head) && l.contains(leaf)));
            AppError::Config {
                key,
                line: line.map(|i| i + 1),
                message,
            }
        }
        other => other,
    }
}
