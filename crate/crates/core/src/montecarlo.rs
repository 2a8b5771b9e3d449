//! Monte Carlo risks, oracle ratios and convergence-rate fits.
//!
//! Replicate `i` of a run seeded with `s` draws from ChaCha8 keyed by `s` on
//! stream `i`, so each replicate is reproducible on its own and the order in
//! which a [`ReplicationRunner`] executes them cannot change any result.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::sobolev_template;
use crate::risk::{scenario_m0, RiskKind, RiskReport};
use crate::selection::{estimate, select_cutoff, EstimateKind};
use crate::stats::{linear_fit, mean_stderr};
use crate::{simulate_aggregates, Design, Error, Result, SelectionConfig, ShiftDensity, Template};

/// Executes independent jobs `0..count` and returns their outputs in index
/// order.
pub trait ReplicationRunner {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ReplicationRunner for Sequential {
    fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..count as u64).map(job).collect()
    }
}

/// RNG for replicate `index` of a run seeded with `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// `θ*`, cut-off from `Ū`.
    ThetaStar,
    /// `θ̃`, cut-off from `Ũ`.
    ThetaTilde,
    /// Cut-off from the unpenalised `U`.
    ThetaU,
    /// Deterministic cut-off.
    Fixed(usize),
}

impl Estimator {
    pub fn estimate_kind(self) -> EstimateKind {
        match self {
            Estimator::ThetaStar => EstimateKind::ThetaStar,
            Estimator::ThetaTilde => EstimateKind::ThetaTilde,
            Estimator::ThetaU => EstimateKind::ThetaU,
            Estimator::Fixed(_) => EstimateKind::FixedN,
        }
    }

    /// Theoretical risk the estimator is benchmarked against.
    pub fn benchmark(self) -> RiskKind {
        match self {
            Estimator::ThetaStar => RiskKind::RBar,
            _ => RiskKind::R,
        }
    }
}

/// Everything needed to draw and score one dataset.
#[derive(Debug, Clone, Copy)]
pub struct Scenario<'a> {
    pub template: &'a Template,
    pub density: &'a ShiftDensity,
    pub design: Design,
    pub selection: SelectionConfig,
}

impl Scenario<'_> {
    /// Truncation level used by selection, honouring the override.
    pub fn m0(&self) -> Result<usize> {
        scenario_m0(self.density, &self.design, &self.selection)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replicate {
    pub sq_error: f64,
    pub cutoff: usize,
}

/// Simulates one dataset, picks the cut-off and scores `‖θ̂ - θ‖²`.
pub fn run_replicate(scenario: &Scenario<'_>, estimator: Estimator, rng: &mut ChaCha8Rng) -> Result<Replicate> {
    let obs = simulate_aggregates(scenario.template, scenario.density, &scenario.design, rng)?;
    let cutoff = match (estimator, estimator.estimate_kind().criterion()) {
        (Estimator::Fixed(cutoff), _) => cutoff,
        (_, Some(kind)) => select_cutoff(&obs, scenario.density, kind, &scenario.selection)?.chosen_n(),
        (_, None) => unreachable!("only fixed cut-offs lack a criterion"),
    };
    let est = estimate(&obs, scenario.density, cutoff, estimator.estimate_kind())?;
    Ok(Replicate {
        sq_error: est.sq_error(scenario.template)?,
        cutoff,
    })
}

/// Empirical risk over independent replications.
#[derive(Debug, Clone, PartialEq)]
pub struct McRisk {
    pub mean: f64,
    pub stderr: f64,
    /// Per-replicate `‖θ̂ - θ‖²`, in replicate order.
    pub sq_errors: Vec<f64>,
    /// Per-replicate cut-off, in replicate order.
    pub cutoffs: Vec<usize>,
}

pub fn mc_risk<R: ReplicationRunner>(
    scenario: &Scenario<'_>,
    estimator: Estimator,
    replications: usize,
    seed: u64,
    runner: &R,
) -> Result<McRisk> {
    if replications < 2 {
        return Err(Error::invalid("replications", "need at least 2"));
    }
    let outcomes = runner.run(replications, |i| {
        run_replicate(scenario, estimator, &mut replicate_rng(seed, i))
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let sq_errors: Vec<f64> = outcomes.iter().map(|r| r.sq_error).collect();
    let (mean, stderr) = mean_stderr(&sq_errors);
    Ok(McRisk {
        mean,
        stderr,
        sq_errors,
        cutoffs: outcomes.iter().map(|r| r.cutoff).collect(),
    })
}

/// Monte Carlo risk relative to the best theoretical risk over `N <= m0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRatio {
    pub risk: McRisk,
    pub m0: usize,
    pub inf_r: f64,
    pub inf_r_bar: f64,
    pub inf_r_tilde: f64,
    /// Which infimum `ratio` divides by.
    pub benchmark: RiskKind,
    pub ratio: f64,
}

impl OracleRatio {
    /// `risk.mean` divided by the infimum of another risk.
    pub fn ratio_against(&self, kind: RiskKind) -> f64 {
        let denom = match kind {
            RiskKind::R => self.inf_r,
            RiskKind::RBar => self.inf_r_bar,
            RiskKind::RTilde => self.inf_r_tilde,
        };
        self.risk.mean / denom
    }
}

/// `E‖θ̂ - θ‖² / inf_{N<=m0} R(θ, N)`, with `R̄` in place of `R` for `θ*`.
pub fn oracle_ratio<R: ReplicationRunner>(
    scenario: &Scenario<'_>,
    estimator: Estimator,
    replications: usize,
    seed: u64,
    runner: &R,
) -> Result<OracleRatio> {
    let m0 = scenario.m0()?;
    let report = RiskReport::compute(
        scenario.template,
        scenario.density,
        &scenario.design,
        m0,
        &scenario.selection,
    )?;
    let benchmark = estimator.benchmark();
    let denom = report.min(benchmark);
    if denom <= 0.0 {
        return Err(Error::Degenerate("oracle risk is zero (θ ≡ 0 and ε = 0?)"));
    }
    let risk = mc_risk(scenario, estimator, replications, seed, runner)?;
    Ok(OracleRatio {
        ratio: risk.mean / denom,
        m0,
        inf_r: report.min(RiskKind::R),
        inf_r_bar: report.min(RiskKind::RBar),
        inf_r_tilde: report.min(RiskKind::RTilde),
        benchmark,
        risk,
    })
}

/// Minimax exponent `-2s / (2s + 2β + 1)` over Sobolev balls.
pub fn theoretical_rate_exponent(s: f64, beta: f64) -> f64 {
    -2.0 * s / (2.0 * s + 2.0 * beta + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudyPlan {
    pub smoothness: f64,
    /// Sobolev radius `A`.
    pub radius: f64,
    /// Spectrum exponent slack, `|θ_k| ∝ |k|^{-(s + 1/2 + δ/2)}`.
    pub delta: f64,
    pub n_grid: Vec<usize>,
    pub noise: f64,
    pub replications: usize,
    pub seed: u64,
    pub max_freq: usize,
    pub estimator: Estimator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub n_grid: Vec<usize>,
    pub mise: Vec<f64>,
    pub stderr: Vec<f64>,
    pub fitted_slope: f64,
    pub theoretical_slope: f64,
    pub s: f64,
    pub beta: f64,
}

/// Monte Carlo risk at every sample size of the plan and the least-squares
/// slope of `log(mise)` against `log(n)`.
///
/// Grid point `i` uses seed `plan.seed + i`.
pub fn rate_study<R: ReplicationRunner>(
    plan: &RateStudyPlan,
    density: &ShiftDensity,
    selection: &SelectionConfig,
    runner: &R,
) -> Result<RateStudy> {
    if plan.n_grid.len() < 3 {
        return Err(Error::InsufficientPoints(plan.n_grid.len()));
    }
    if plan.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("n_grid", "must be strictly increasing"));
    }
    let beta = density
        .decay()
        .ok_or_else(|| Error::invalid("density", "rate study needs a declared polynomial decay"))?
        .beta;
    let template = sobolev_template(plan.smoothness, plan.radius, plan.delta, plan.max_freq)?;

    let mut mise = Vec::with_capacity(plan.n_grid.len());
    let mut stderr = Vec::with_capacity(plan.n_grid.len());
    for (i, &n) in plan.n_grid.iter().enumerate() {
        let scenario = Scenario {
            template: &template,
            density,
            design: Design::new(n, plan.noise, plan.max_freq)?,
            selection: *selection,
        };
        let risk = mc_risk(
            &scenario,
            plan.estimator,
            plan.replications,
            plan.seed.wrapping_add(i as u64),
            runner,
        )?;
        if risk.mean.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
            return Err(Error::Degenerate(
                "zero Monte Carlo risk cannot be fitted on a log scale",
            ));
        }
        mise.push(risk.mean);
        stderr.push(risk.stderr);
    }
    let log_n: Vec<f64> = plan.n_grid.iter().map(|&n| libm::log(n as f64)).collect();
    let log_mise: Vec<f64> = mise.iter().map(|&m| libm::log(m)).collect();
    let (fitted_slope, _) = linear_fit(&log_n, &log_mise)?;
    Ok(RateStudy {
        n_grid: plan.n_grid.clone(),
        mise,
        stderr,
        fitted_slope,
        theoretical_slope: theoretical_rate_exponent(plan.smoothness, beta),
        s: plan.smoothness,
        beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::wave_template;
    use crate::exact_risk;

    #[test]
    fn exponent_arithmetic() {
        assert!((theoretical_rate_exponent(2.0, 2.0) + 4.0 / 9.0).abs() < 1e-15);
        assert!((theoretical_rate_exponent(3.0, 0.0) + 6.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn noiseless_unshifted_risk_is_the_tail_bias() {
        let t = wave_template(16).unwrap();
        let d = ShiftDensity::point_mass();
        let selection = SelectionConfig {
            m0_override: Some(5),
            ..Default::default()
        };
        let scenario = Scenario {
            template: &t,
            density: &d,
            design: Design::new(4, 0.0, 16).unwrap(),
            selection,
        };
        let tail: f64 = (-16..=16i64)
            .filter(|k| k.abs() > 5)
            .map(|k| t.coeff(k).norm_sqr())
            .sum();
        for est in [
            Estimator::ThetaStar,
            Estimator::ThetaTilde,
            Estimator::ThetaU,
            Estimator::Fixed(5),
        ] {
            let r = mc_risk(&scenario, est, 6, 1, &Sequential).unwrap();
            assert!((r.mean - tail).abs() < 1e-14, "{est:?}");
            assert_eq!(r.stderr, 0.0);
            assert!(r.cutoffs.iter().all(|&c| c == 5));
        }
        let ratio = oracle_ratio(&scenario, Estimator::ThetaTilde, 4, 2, &Sequential).unwrap();
        assert!((ratio.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_ratio_is_an_error() {
        let t = Template::zeros(8).unwrap();
        let d = ShiftDensity::point_mass();
        let scenario = Scenario {
            template: &t,
            density: &d,
            design: Design::new(4, 0.0, 8).unwrap(),
            selection: SelectionConfig::default(),
        };
        assert!(matches!(
            oracle_ratio(&scenario, Estimator::ThetaTilde, 4, 0, &Sequential),
            Err(Error::Degenerate(_))
        ));
        assert!(mc_risk(&scenario, Estimator::ThetaTilde, 1, 0, &Sequential).is_err());
    }

    #[test]
    fn fixed_cutoff_risk_matches_decomposition() {
        let t = wave_template(12).unwrap();
        let d = ShiftDensity::laplace(0.1).unwrap();
        let design = Design::new(30, 0.3, 12).unwrap();
        let scenario = Scenario {
            template: &t,
            density: &d,
            design,
            selection: SelectionConfig::default(),
        };
        for cutoff in [2usize, 6] {
            let r = mc_risk(
                &scenario,
                Estimator::Fixed(cutoff),
                1500,
                77 + cutoff as u64,
                &Sequential,
            )
            .unwrap();
            let exact = exact_risk(&t, &d, &design, cutoff).unwrap().total;
            assert!(
                (r.mean - exact).abs() < 3.0 * r.stderr,
                "N={cutoff}: {} vs {exact} ± {}",
                r.mean,
                r.stderr
            );
        }
    }

    #[test]
    fn replicates_do_not_depend_on_execution_order() {
        let t = wave_template(10).unwrap();
        let d = ShiftDensity::laplace(0.1).unwrap();
        let scenario = Scenario {
            template: &t,
            density: &d,
            design: Design::new(20, 0.2, 10).unwrap(),
            selection: SelectionConfig::default(),
        };
        struct Reversed;
        impl ReplicationRunner for Reversed {
            fn run<T, F>(&self, count: usize, job: F) -> Vec<T>
            where
                T: Send,
                F: Fn(u64) -> T + Sync + Send,
            {
                let mut out: Vec<(u64, T)> = (0..count as u64).rev().map(|i| (i, job(i))).collect();
                out.sort_by_key(|(i, _)| *i);
                out.into_iter().map(|(_, t)| t).collect()
            }
        }
        let a = mc_risk(&scenario, Estimator::ThetaStar, 50, 5, &Sequential).unwrap();
        let b = mc_risk(&scenario, Estimator::ThetaStar, 50, 5, &Reversed).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.sq_errors.clone();
        sorted.sort_by(f64::total_cmp);
        let (m_sorted, _) = mean_stderr(&sorted);
        assert!((m_sorted - a.mean).abs() < 1e-12 * a.mean);
    }

    #[test]
    fn rate_study_validates_inputs() {
        let d = ShiftDensity::laplace(0.1).unwrap();
        let mut plan = RateStudyPlan {
            smoothness: 2.0,
            radius: 1.0,
            delta: 0.01,
            n_grid: alloc::vec![100, 200],
            noise: 0.3,
            replications: 4,
            seed: 0,
            max_freq: 16,
            estimator: Estimator::ThetaTilde,
        };
        let cfg = SelectionConfig::default();
        assert_eq!(
            rate_study(&plan, &d, &cfg, &Sequential),
            Err(Error::InsufficientPoints(2))
        );
        plan.n_grid = alloc::vec![100, 300, 200];
        assert!(rate_study(&plan, &d, &cfg, &Sequential).is_err());
        plan.n_grid = alloc::vec![100, 200, 400];
        assert!(rate_study(&plan, &ShiftDensity::gaussian(0.1).unwrap(), &cfg, &Sequential).is_err());
        let study = rate_study(&plan, &d, &cfg, &Sequential).unwrap();
        assert_eq!(study.mise.len(), 3);
        assert!((study.theoretical_slope + 4.0 / 9.0).abs() < 1e-15);
    }
}
