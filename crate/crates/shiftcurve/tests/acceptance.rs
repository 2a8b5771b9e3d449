//! Acceptance suite. Prints one `[PASS]` / `[FAIL]` line per criterion and
//! exits nonzero if any criterion fails.
//!
//! Reference values (exact risks, expectations, `γ_k`) are recomputed here
//! from closed forms rather than taken from the library's risk module.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use shiftcurve::{run_section4_study, section4_replicates, ExperimentConfig, Parallel, PenaltyVariant};
use shiftcurve_core::catalog::{sobolev_template, spike_template, wave_template};
use shiftcurve_core::montecarlo::theoretical_rate_exponent;
use shiftcurve_core::stats::{mean_stderr, quantile};
use shiftcurve_core::{
    criterion_u_tilde, estimate, mc_risk, oracle_ratio, rate_study, replicate_rng, simulate, simulate_aggregates,
    Design, EstimateKind, Estimator, RateStudyPlan, ReplicationRunner, RiskKind, Scenario, SelectionConfig, Sequential,
    ShiftDensity, Template,
};

// simulation-study setting
const SIGMA: f64 = 0.1;
const CURVES: usize = 100;
const NOISE: f64 = 0.1;
const BAND: usize = 48;
const SEED: u64 = 2024;

// AC1
const AC1_CUTOFFS: [usize; 3] = [5, 13, 30];
const AC1_REPS: usize = 1000;
const AC1_SIGMAS: f64 = 3.0;
const AC1_BUDGET: Duration = Duration::from_secs(60);
// AC2
const AC2_REPS: u64 = 10_000;
const AC2_SIGMAS: f64 = 5.0;
// AC3
const AC3_M0: usize = 32;
const AC3_REPS: usize = 100;
// AC4
const AC4_REPS: usize = 200;
const AC4_ENVELOPE: f64 = 3.0;
const AC4_BUDGET: Duration = Duration::from_secs(120);
// AC5
const AC5_GRID: [usize; 6] = [200, 400, 800, 1600, 3200, 6400];
const AC5_REPS: usize = 200;
const AC5_NOISE: f64 = 0.3;
const AC5_BAND: usize = 64;
const AC5_SLOPE_TOL: f64 = 0.15;
const AC5_BUDGET: Duration = Duration::from_secs(300);
// AC6
const AC6_EXACT_TOL: f64 = 1e-12;
const AC6_DATASETS: u64 = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn laplace_gamma_sq(k: i64) -> f64 {
    let g = 1.0 / (1.0 + 2.0 * SIGMA * SIGMA * PI * PI * (k * k) as f64);
    g * g
}

fn band(n: usize) -> impl Iterator<Item = i64> {
    -(n as i64)..=n as i64
}

fn laplace() -> ShiftDensity {
    ShiftDensity::laplace(SIGMA).unwrap()
}

/// Risk `bias + V1 + V2` from the coefficients.
fn closed_form_risk(t: &Template, n: usize, eps: f64, cutoff: usize) -> f64 {
    let nf = n as f64;
    let bias: f64 = band(t.max_freq())
        .filter(|k| k.unsigned_abs() as usize > cutoff)
        .map(|k| t.coeff(k).norm_sqr())
        .sum();
    let var: f64 = band(cutoff)
        .map(|k| {
            let w = 1.0 / laplace_gamma_sq(k);
            eps * eps / nf * w + t.coeff(k).norm_sqr() * (w - 1.0) / nf
        })
        .sum();
    bias + var
}

fn ac1() -> Outcome {
    let t = wave_template(BAND).unwrap();
    let d = laplace();
    let design = Design::new(CURVES, NOISE, BAND).unwrap();
    let scenario = Scenario {
        template: &t,
        density: &d,
        design,
        selection: SelectionConfig::default(),
    };
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for cutoff in AC1_CUTOFFS {
        let r = mc_risk(
            &scenario,
            Estimator::Fixed(cutoff),
            AC1_REPS,
            SEED + cutoff as u64,
            &Parallel,
        )
        .unwrap();
        let exact = closed_form_risk(&t, CURVES, NOISE, cutoff);
        let z = (r.mean - exact) / r.stderr;
        pass &= z.abs() <= AC1_SIGMAS;
        parts.push(format!("N={cutoff}: mc={:.5e} exact={:.5e} z={z:+.2}", r.mean, exact));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < AC1_BUDGET;
    Outcome {
        pass,
        detail: format!("{} ({:.1}s)", parts.join("; "), elapsed.as_secs_f64()),
    }
}

fn ac2() -> Outcome {
    let t = wave_template(BAND).unwrap();
    let d = laplace();
    let design = Design::new(CURVES, NOISE, BAND).unwrap();
    let nf = CURVES as f64;
    let ln = (nf).ln();
    let formula_m0 = (1..).find(|&k| laplace_gamma_sq(k) <= ln * ln / nf).unwrap() as usize - 1;
    let norm: f64 = band(BAND).map(|k| t.coeff(k).norm_sqr()).sum();
    let mut pass = true;
    let mut parts = Vec::new();
    let mut cutoffs = vec![0, 5, formula_m0, AC3_M0];
    cutoffs.sort_unstable();
    cutoffs.dedup();
    for cutoff in cutoffs {
        let r_tilde = band(BAND)
            .filter(|k| k.unsigned_abs() as usize > cutoff)
            .map(|k| t.coeff(k).norm_sqr())
            .sum::<f64>()
            + band(cutoff)
                .map(|k| NOISE * NOISE / nf / laplace_gamma_sq(k))
                .sum::<f64>();
        let correction: f64 = band(cutoff)
            .map(|k| {
                let g2 = laplace_gamma_sq(k);
                t.coeff(k).norm_sqr() * (1.0 - g2) / g2 / nf
            })
            .sum();
        let target = r_tilde - correction;
        let samples = Parallel.run(AC2_REPS as usize, |i| {
            let obs = simulate_aggregates(&t, &d, &design, &mut replicate_rng(SEED ^ 0xa2, i)).unwrap();
            criterion_u_tilde(&obs, &d, cutoff).unwrap() + norm
        });
        let (mean, se) = mean_stderr(&samples);
        let z = (mean - target) / se;
        pass &= z.abs() <= AC2_SIGMAS;
        parts.push(format!("N={cutoff}: z={z:+.2}"));
    }
    Outcome {
        pass,
        detail: format!("formula m0 = {formula_m0}; {}", parts.join("; ")),
    }
}

fn cutoff_quartiles(reps: &[shiftcurve::StudyReplicate]) -> ([f64; 3], [f64; 3]) {
    let q = |v: &[f64]| [0.25, 0.5, 0.75].map(|p| quantile(v, p));
    let star: Vec<f64> = reps.iter().map(|r| r.n_star as f64).collect();
    let tilde: Vec<f64> = reps.iter().map(|r| r.n_tilde as f64).collect();
    (q(&star), q(&tilde))
}

fn ac3() -> (Outcome, String) {
    let cfg = ExperimentConfig {
        replications: AC3_REPS,
        m0_override: Some(AC3_M0),
        ..ExperimentConfig::section4()
    };
    assert_eq!(cfg.penalty_variant, PenaltyVariant::PrintedForm);
    let (star, tilde) = cutoff_quartiles(&section4_replicates(&cfg, &Parallel).unwrap());
    let pass = star[1] < tilde[1] && star[2] < tilde[1];
    let detail = format!(
        "printed penalty: N* quartiles {star:?}, Ñ quartiles {tilde:?} (median {} < {}, q3 {} < {})",
        star[1], tilde[1], star[2], tilde[1]
    );

    let proof = ExperimentConfig {
        penalty_variant: PenaltyVariant::ProofForm,
        ..cfg
    };
    let (p_star, p_tilde) = cutoff_quartiles(&section4_replicates(&proof, &Parallel).unwrap());
    let ordered = p_star[1] < p_tilde[1] && p_star[2] < p_tilde[1];
    let info = format!(
        "proof penalty: N* quartiles {p_star:?}, Ñ quartiles {p_tilde:?} -> ordering {}",
        if ordered { "holds" } else { "does not hold" }
    );
    (Outcome { pass, detail }, info)
}

fn ac4() -> Outcome {
    let d = laplace();
    let design = Design::new(CURVES, NOISE, BAND).unwrap();
    let templates = [
        ("wave", wave_template(BAND).unwrap()),
        ("sobolev", sobolev_template(2.0, 1.0, 0.01, BAND).unwrap()),
        ("spike", spike_template(2, 1.0, BAND).unwrap()),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, (name, t)) in templates.iter().enumerate() {
        let scenario = Scenario {
            template: t,
            density: &d,
            design,
            selection: SelectionConfig::default(),
        };
        let seed = SEED + 100 * i as u64;
        let tilde = oracle_ratio(&scenario, Estimator::ThetaTilde, AC4_REPS, seed, &Parallel).unwrap();
        let star = oracle_ratio(&scenario, Estimator::ThetaStar, AC4_REPS, seed, &Parallel).unwrap();
        assert_eq!(tilde.benchmark, RiskKind::R);
        assert_eq!(star.benchmark, RiskKind::RBar);
        pass &= tilde.ratio <= AC4_ENVELOPE && star.ratio <= AC4_ENVELOPE;
        parts.push(format!(
            "{name} (m0={}): θ̃/infR={:.3} θ*/infR̄={:.3} θ*/infR̃={:.3}",
            tilde.m0,
            tilde.ratio,
            star.ratio,
            star.ratio_against(RiskKind::RTilde)
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < AC4_BUDGET;
    Outcome {
        pass,
        detail: format!("{} ({:.1}s)", parts.join("; "), elapsed.as_secs_f64()),
    }
}

fn ac5() -> Outcome {
    let plan = RateStudyPlan {
        smoothness: 2.0,
        radius: 1.0,
        delta: 0.01,
        n_grid: AC5_GRID.to_vec(),
        noise: AC5_NOISE,
        replications: AC5_REPS,
        seed: SEED,
        max_freq: AC5_BAND,
        estimator: Estimator::ThetaTilde,
    };
    let start = Instant::now();
    let study = rate_study(&plan, &laplace(), &SelectionConfig::default(), &Parallel).unwrap();
    let elapsed = start.elapsed();
    let target = theoretical_rate_exponent(2.0, 2.0);
    assert!((target + 4.0 / 9.0).abs() < 1e-15);
    let pass = (study.fitted_slope - target).abs() <= AC5_SLOPE_TOL && elapsed < AC5_BUDGET;
    let mise: Vec<String> = study.mise.iter().map(|m| format!("{m:.3e}")).collect();
    Outcome {
        pass,
        detail: format!(
            "slope {:.3} vs {:.3} ± {AC5_SLOPE_TOL}; mise [{}] ({:.1}s)",
            study.fitted_slope,
            target,
            mise.join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

fn ac6() -> Outcome {
    let mut failures = Vec::new();

    let t = wave_template(BAND).unwrap();
    let d = ShiftDensity::point_mass();
    let design = Design::new(CURVES, 0.0, BAND).unwrap();
    let obs = simulate(&t, &d, &design, &mut replicate_rng(SEED, 0)).unwrap();
    let est = estimate(&obs, &d, BAND, EstimateKind::FixedN).unwrap();
    let max_err = band(BAND)
        .map(|k| (est.coeff(k) - t.coeff(k)).norm())
        .fold(0.0, f64::max);
    if max_err >= AC6_EXACT_TOL {
        failures.push(format!("noiseless full-band error {max_err:e}"));
    }

    let bad = Parallel.run(AC6_DATASETS as usize, |i| {
        let mut rng = replicate_rng(SEED ^ 0xa6, i);
        let k = 8 + (i % 9) as usize;
        let n = 2 + (i % 37) as usize;
        let eps = (i % 5) as f64 * 0.2;
        let density = match i % 3 {
            0 => ShiftDensity::laplace(0.05 + (i % 7) as f64 * 0.03).unwrap(),
            1 => ShiftDensity::gaussian(0.1).unwrap(),
            _ => ShiftDensity::point_mass(),
        };
        let obs = simulate(
            &wave_template(k).unwrap(),
            &density,
            &Design::new(n, eps, k).unwrap(),
            &mut rng,
        )
        .unwrap();
        let mut bad = Vec::new();
        if obs.gamma_tilde_at(0) != shiftcurve_core::Complex::new(1.0, 0.0) {
            bad.push("γ̃_0 != 1");
        }
        for kk in band(k) {
            if obs.gamma_tilde_at(kk).norm() > 1.0 {
                bad.push("|γ̃_k| > 1");
            }
            if obs.gamma_tilde_at(-kk) != obs.gamma_tilde_at(kk).conj() {
                bad.push("γ̃ not Hermitian");
            }
            if obs.c_tilde_at(-kk) != obs.c_tilde_at(kk).conj() {
                bad.push("c̃ not Hermitian");
            }
            for j in 0..n {
                let c = obs.curve(j).unwrap();
                let at = |q: i64| c[(q + k as i64) as usize];
                if at(-kk) != at(kk).conj() {
                    bad.push("curve coefficients not Hermitian");
                }
            }
        }
        if density.gamma(0) != shiftcurve_core::Complex::new(1.0, 0.0) {
            bad.push("γ_0 != 1");
        }
        bad.dedup();
        bad
    });
    let violations: usize = bad.iter().filter(|b| !b.is_empty()).count();
    if violations > 0 {
        let first = bad.iter().find(|b| !b.is_empty()).unwrap();
        failures.push(format!("{violations} datasets violate invariants, e.g. {first:?}"));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("noiseless max error {max_err:.1e}; invariants hold on {AC6_DATASETS} datasets")
        } else {
            failures.join("; ")
        },
    }
}

fn ac7() -> Outcome {
    let cfg = ExperimentConfig::section4();
    let a = run_section4_study(&cfg, &Parallel).unwrap();
    let b = run_section4_study(&cfg, &Parallel).unwrap();
    let c = run_section4_study(&cfg, &Sequential).unwrap();
    let bytes: usize = a.values().map(String::len).sum();
    Outcome {
        pass: a == b && a == c,
        detail: format!(
            "{} files, {bytes} bytes; parallel×2 and sequential identical: {}",
            a.len(),
            a == b && a == c
        ),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, title: &str, o: Outcome| {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {title}: {}", o.detail);
        failed += usize::from(!o.pass);
    };
    report("AC1", "Monte Carlo risk matches bias + V1 + V2", ac1());
    report("AC2", "unbiased-risk identity for Ũ", ac2());
    let (out3, info3) = ac3();
    report("AC3", "N* concentrates below Ñ (m0 = 32, M = 100)", out3);
    println!("[INFO] AC3 {info3}");
    report("AC4", "oracle-ratio envelope <= 3", ac4());
    report("AC5", "rate slope within 0.15 of -4/9", ac5());
    report("AC6", "exactness and invariants", ac6());
    report("AC7", "byte-identical bundles", ac7());
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
