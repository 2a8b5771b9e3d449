//! Library entry points behind every CLI subcommand.
//!
//! Each function turns a validated [`ExperimentConfig`] into a [`Bundle`] of
//! CSV files; the binary only parses flags and writes the bundle. The single
//! dataset used by `simulate`, `estimate` and `select` is replicate 0 of the
//! configured seed, the same dataset the simulation study starts from.

use shiftcurve_core::selection::{compute_m0, negative_theta_hat_count};
use shiftcurve_core::stats::{mean_stderr, quantile};
use shiftcurve_core::{
    estimate, oracle_ratio, rate_study, render_curves, replicate_rng, select_cutoff, simulate, simulate_aggregates,
    synthesize, CriterionKind, Estimator, RateStudyPlan, ReplicationRunner, RiskKind, RiskReport, Scenario,
    SelectionConfig, SequenceObservations, ShiftDensity, Template,
};

use crate::config::{ExperimentConfig, TemplateSpec, SOBOLEV_DELTA, SOBOLEV_RADIUS};
use crate::error::{AppError, Result};
use crate::output::{
    coefficients_table, curves_table, functions_table, num, rate_fit_table, rate_table, risk_curve_table, trace_table,
    Bundle, Table,
};

/// Rendered curves kept by the simulation study.
pub const STUDY_SAMPLE_CURVES: usize = 10;

/// Default sample sizes of a rate study: `200 · 2^i`, `i = 0..=5`.
pub fn default_n_grid() -> Vec<usize> {
    (0..6).map(|i| 200 << i).collect()
}

struct Setup {
    template: Template,
    density: ShiftDensity,
    selection: SelectionConfig,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Setup {
            template: cfg.build_template()?,
            density: cfg.build_density()?,
            selection: cfg.selection(),
        })
    }

    fn scenario(&self, cfg: &ExperimentConfig) -> Result<Scenario<'_>> {
        Ok(Scenario {
            template: &self.template,
            density: &self.density,
            design: cfg.design()?,
            selection: self.selection,
        })
    }

    fn dataset(&self, cfg: &ExperimentConfig) -> Result<SequenceObservations> {
        Ok(simulate(
            &self.template,
            &self.density,
            &cfg.design()?,
            &mut replicate_rng(cfg.seed, 0),
        )?)
    }
}

fn insert(bundle: &mut Bundle, name: &str, table: Table) -> Result<()> {
    bundle.insert(name.to_string(), table.to_csv()?);
    Ok(())
}

/// `m0` in use next to the formula value.
fn m0_table(cfg: &ExperimentConfig, setup: &Setup) -> Result<Table> {
    let formula = compute_m0(
        &setup.density,
        cfg.n,
        cfg.k,
        &SelectionConfig {
            m0_override: None,
            ..setup.selection
        },
    )?;
    let used = setup.scenario(cfg)?.m0()?;
    let mut t = Table::new(["m0", "formula_m0", "formula_saturated", "overridden", "threshold"]);
    t.push(vec![
        used.to_string(),
        formula.m0.to_string(),
        u8::from(formula.saturated).to_string(),
        u8::from(cfg.m0_override.is_some()).to_string(),
        num(setup.selection.threshold(cfg.n)),
    ]);
    Ok(t)
}

/// One dataset: rendered curves, averaged coefficients and true shifts.
pub fn simulate_bundle(cfg: &ExperimentConfig) -> Result<Bundle> {
    let setup = Setup::new(cfg)?;
    let obs = setup.dataset(cfg)?;
    let mut bundle = Bundle::new();
    insert(
        &mut bundle,
        "curves.csv",
        curves_table(&render_curves(&obs, cfg.grid)?, cfg.grid),
    )?;

    let mut agg = Table::new(["k", "c_re", "c_im", "gamma_re", "gamma_im"]);
    for k in -(cfg.k as i64)..=cfg.k as i64 {
        let (c, g) = (obs.c_tilde_at(k), obs.gamma_tilde_at(k));
        agg.push(vec![k.to_string(), num(c.re), num(c.im), num(g.re), num(g.im)]);
    }
    insert(&mut bundle, "aggregates.csv", agg)?;

    let mut shifts = Table::new(["curve", "tau"]);
    for (j, tau) in obs.shifts().unwrap_or(&[]).iter().enumerate() {
        shifts.push(vec![j.to_string(), num(*tau)]);
    }
    insert(&mut bundle, "shifts.csv", shifts)?;
    Ok(bundle)
}

/// Criterion trace over `N = 0..=m0` for the configured criterion.
pub fn select_bundle(cfg: &ExperimentConfig) -> Result<Bundle> {
    let setup = Setup::new(cfg)?;
    let obs = setup.dataset(cfg)?;
    let sel = select_cutoff(&obs, &setup.density, cfg.criterion.kind(), &setup.selection)?;
    let mut bundle = Bundle::new();
    insert(
        &mut bundle,
        "selection.csv",
        trace_table(cfg.criterion.as_str(), sel.criterion_values(), sel.chosen_n()),
    )?;
    insert(&mut bundle, "m0.csv", m0_table(cfg, &setup)?)?;
    Ok(bundle)
}

/// Data-driven estimate with the configured criterion.
pub fn estimate_bundle(cfg: &ExperimentConfig) -> Result<Bundle> {
    let setup = Setup::new(cfg)?;
    let obs = setup.dataset(cfg)?;
    let sel = select_cutoff(&obs, &setup.density, cfg.criterion.kind(), &setup.selection)?;
    let est = estimate(
        &obs,
        &setup.density,
        sel.chosen_n(),
        cfg.criterion.estimator().estimate_kind(),
    )?;
    let truth = synthesize(&setup.template, cfg.grid)?;
    let fitted = synthesize(&est.to_template()?, cfg.grid)?;

    let mut bundle = Bundle::new();
    insert(
        &mut bundle,
        "estimate.csv",
        functions_table(cfg.grid, &[("truth", &truth), ("estimate", &fitted)]),
    )?;
    insert(
        &mut bundle,
        "estimate_coefficients.csv",
        coefficients_table(est.coeffs(), cfg.k),
    )?;
    insert(
        &mut bundle,
        "selection.csv",
        trace_table(cfg.criterion.as_str(), sel.criterion_values(), sel.chosen_n()),
    )?;
    let mut summary = Table::new(["criterion", "chosen_n", "m0", "sq_error"]);
    summary.push(vec![
        cfg.criterion.as_str().into(),
        sel.chosen_n().to_string(),
        sel.m0().to_string(),
        num(est.sq_error(&setup.template)?),
    ]);
    insert(&mut bundle, "estimate_summary.csv", summary)?;
    Ok(bundle)
}

fn ratio_row(name: &str, r: &shiftcurve_core::OracleRatio) -> Vec<String> {
    vec![
        name.into(),
        num(r.risk.mean),
        num(r.risk.stderr),
        r.m0.to_string(),
        num(r.inf_r),
        num(r.inf_r_bar),
        num(r.inf_r_tilde),
        num(r.ratio_against(RiskKind::R)),
        num(r.ratio_against(RiskKind::RBar)),
        num(r.ratio_against(RiskKind::RTilde)),
    ]
}

pub const RATIO_HEADER: [&str; 10] = [
    "estimator",
    "mc_risk",
    "stderr",
    "m0",
    "inf_r",
    "inf_r_bar",
    "inf_r_tilde",
    "ratio_r",
    "ratio_r_bar",
    "ratio_r_tilde",
];

/// Exact risk curves over `N = 0..=m0`; with `ratios`, also Monte Carlo
/// oracle ratios of `θ*`, `θ̃` and the `U` estimator.
pub fn risk_bundle<R: ReplicationRunner>(cfg: &ExperimentConfig, ratios: bool, runner: &R) -> Result<Bundle> {
    let setup = Setup::new(cfg)?;
    let scenario = setup.scenario(cfg)?;
    let m0 = scenario.m0()?;
    let report = RiskReport::compute(&setup.template, &setup.density, &scenario.design, m0, &setup.selection)?;
    let mut bundle = Bundle::new();
    insert(&mut bundle, "risk_curve.csv", risk_curve_table(&report))?;

    let mut oracles = Table::new(["risk", "argmin", "min"]);
    for (name, kind) in [
        ("r", RiskKind::R),
        ("r_bar", RiskKind::RBar),
        ("r_tilde", RiskKind::RTilde),
    ] {
        oracles.push(vec![
            name.into(),
            report.oracle(kind).to_string(),
            num(report.min(kind)),
        ]);
    }
    insert(&mut bundle, "oracles.csv", oracles)?;

    if ratios {
        if cfg.replications < 2 {
            return Err(AppError::config("replications", "ratios need at least 2 replications"));
        }
        let mut t = Table::new(RATIO_HEADER);
        for (name, est) in [
            ("theta_star", Estimator::ThetaStar),
            ("theta_tilde", Estimator::ThetaTilde),
            ("theta_u", Estimator::ThetaU),
        ] {
            let r = oracle_ratio(&scenario, est, cfg.replications, cfg.seed, runner)?;
            t.push(ratio_row(name, &r));
        }
        insert(&mut bundle, "ratios.csv", t)?;
    }
    Ok(bundle)
}

/// Outcome of one replicate of the simulation study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyReplicate {
    pub n_star: usize,
    pub n_tilde: usize,
    pub err_star: f64,
    pub err_tilde: f64,
    /// Frequencies `|k| <= m0` with `Θ̂²_k < 0`.
    pub negative_theta_hat: usize,
}

fn study_replicate(setup: &Setup, scenario: &Scenario<'_>, seed: u64, index: u64) -> Result<StudyReplicate> {
    let obs = simulate_aggregates(
        &setup.template,
        &setup.density,
        &scenario.design,
        &mut replicate_rng(seed, index),
    )?;
    let pick = |kind| select_cutoff(&obs, &setup.density, kind, &setup.selection);
    let star = pick(CriterionKind::UBar)?;
    let tilde = pick(CriterionKind::UTilde)?;
    let err = |n, est: Estimator| -> Result<f64> {
        Ok(estimate(&obs, &setup.density, n, est.estimate_kind())?.sq_error(&setup.template)?)
    };
    Ok(StudyReplicate {
        n_star: star.chosen_n(),
        n_tilde: tilde.chosen_n(),
        err_star: err(star.chosen_n(), Estimator::ThetaStar)?,
        err_tilde: err(tilde.chosen_n(), Estimator::ThetaTilde)?,
        negative_theta_hat: negative_theta_hat_count(&obs, &setup.density, star.m0())?,
    })
}

/// Per-replicate results of the simulation study, in replicate order.
pub fn section4_replicates<R: ReplicationRunner>(cfg: &ExperimentConfig, runner: &R) -> Result<Vec<StudyReplicate>> {
    let setup = Setup::new(cfg)?;
    let scenario = setup.scenario(cfg)?;
    runner
        .run(cfg.replications, |i| study_replicate(&setup, &scenario, cfg.seed, i))
        .into_iter()
        .collect()
}

/// The simulation study: `M` datasets, each with `N*` (from `Ū`) and `Ñ`
/// (from `Ũ`) selected on the same data.
///
/// Files:
/// * `template.csv`: the true template on the grid;
/// * `curves.csv`: the first ten rendered curves of replicate 0;
/// * `estimates.csv`: truth, `θ*` and `θ̃` of replicate 0 on the grid;
/// * `selections.csv`: chosen cut-offs and squared errors per replicate;
/// * `histogram.csv`: counts of `N*` and `Ñ` for `N = 0..=m0`;
/// * `risk_summary.csv`: Monte Carlo risks, cut-off quartiles and ratios to
///   the exact risk minima;
/// * `risk_curve.csv`: exact risks over `N = 0..=m0`;
/// * `m0.csv`: the truncation level used and the formula value.
pub fn run_section4_study<R: ReplicationRunner>(cfg: &ExperimentConfig, runner: &R) -> Result<Bundle> {
    let setup = Setup::new(cfg)?;
    let scenario = setup.scenario(cfg)?;
    let m0 = scenario.m0()?;
    let reps = section4_replicates(cfg, runner)?;
    let mut bundle = Bundle::new();

    let truth = synthesize(&setup.template, cfg.grid)?;
    insert(&mut bundle, "template.csv", functions_table(cfg.grid, &[("f", &truth)]))?;

    let obs = setup.dataset(cfg)?;
    let mut curves = render_curves(&obs, cfg.grid)?;
    curves.truncate(STUDY_SAMPLE_CURVES);
    insert(&mut bundle, "curves.csv", curves_table(&curves, cfg.grid))?;

    let first = reps[0];
    let on_grid = |n, est: Estimator| -> Result<Vec<f64>> {
        let e = estimate(&obs, &setup.density, n, est.estimate_kind())?;
        Ok(synthesize(&e.to_template()?, cfg.grid)?)
    };
    let star_curve = on_grid(first.n_star, Estimator::ThetaStar)?;
    let tilde_curve = on_grid(first.n_tilde, Estimator::ThetaTilde)?;
    insert(
        &mut bundle,
        "estimates.csv",
        functions_table(
            cfg.grid,
            &[
                ("truth", &truth),
                ("theta_star", &star_curve),
                ("theta_tilde", &tilde_curve),
            ],
        ),
    )?;

    let mut sel = Table::new([
        "replicate",
        "n_star",
        "n_tilde",
        "err_star",
        "err_tilde",
        "negative_theta_hat",
    ]);
    for (i, r) in reps.iter().enumerate() {
        sel.push(vec![
            i.to_string(),
            r.n_star.to_string(),
            r.n_tilde.to_string(),
            num(r.err_star),
            num(r.err_tilde),
            r.negative_theta_hat.to_string(),
        ]);
    }
    insert(&mut bundle, "selections.csv", sel)?;

    let mut hist = Table::new(["N", "count_star", "count_tilde"]);
    for n in 0..=m0 {
        let count = |f: fn(&StudyReplicate) -> usize| reps.iter().filter(|r| f(r) == n).count().to_string();
        hist.push(vec![n.to_string(), count(|r| r.n_star), count(|r| r.n_tilde)]);
    }
    insert(&mut bundle, "histogram.csv", hist)?;

    let report = RiskReport::compute(&setup.template, &setup.density, &scenario.design, m0, &setup.selection)?;
    let mut summary = Table::new([
        "estimator",
        "mc_risk",
        "stderr",
        "n_q1",
        "n_median",
        "n_q3",
        "inf_r",
        "inf_r_bar",
        "inf_r_tilde",
        "ratio_r",
        "ratio_r_bar",
        "ratio_r_tilde",
    ]);
    type Pick = fn(&StudyReplicate) -> (usize, f64);
    let rows: [(&str, Pick); 2] = [
        ("theta_star", |r| (r.n_star, r.err_star)),
        ("theta_tilde", |r| (r.n_tilde, r.err_tilde)),
    ];
    for (name, f) in rows {
        let cut: Vec<f64> = reps.iter().map(|r| f(r).0 as f64).collect();
        let err: Vec<f64> = reps.iter().map(|r| f(r).1).collect();
        let (mean, se) = mean_stderr(&err);
        let [ir, irb, irt] = [RiskKind::R, RiskKind::RBar, RiskKind::RTilde].map(|k| report.min(k));
        summary.push(vec![
            name.into(),
            num(mean),
            num(se),
            num(quantile(&cut, 0.25)),
            num(quantile(&cut, 0.5)),
            num(quantile(&cut, 0.75)),
            num(ir),
            num(irb),
            num(irt),
            num(mean / ir),
            num(mean / irb),
            num(mean / irt),
        ]);
    }
    insert(&mut bundle, "risk_summary.csv", summary)?;
    insert(&mut bundle, "risk_curve.csv", risk_curve_table(&report))?;
    insert(&mut bundle, "m0.csv", m0_table(cfg, &setup)?)?;
    Ok(bundle)
}

/// Rate study on a Sobolev template; the smoothness comes from
/// `template = "sobolev:<s>"`.
pub fn rate_study_bundle<R: ReplicationRunner>(cfg: &ExperimentConfig, n_grid: &[usize], runner: &R) -> Result<Bundle> {
    cfg.validate()?;
    let TemplateSpec::Sobolev { s } = cfg.template_spec()? else {
        return Err(AppError::config(
            "template",
            "a rate study needs a sobolev[:s] template",
        ));
    };
    if cfg.replications < 2 {
        return Err(AppError::config("replications", "need at least 2 per sample size"));
    }
    let plan = RateStudyPlan {
        smoothness: s,
        radius: SOBOLEV_RADIUS,
        delta: SOBOLEV_DELTA,
        n_grid: n_grid.to_vec(),
        noise: cfg.epsilon,
        replications: cfg.replications,
        seed: cfg.seed,
        max_freq: cfg.k,
        estimator: cfg.criterion.estimator(),
    };
    let study = rate_study(&plan, &cfg.build_density()?, &cfg.selection(), runner)?;
    let mut bundle = Bundle::new();
    insert(&mut bundle, "rate.csv", rate_table(&study))?;
    insert(&mut bundle, "rate_fit.csv", rate_fit_table(&study))?;
    Ok(bundle)
}
