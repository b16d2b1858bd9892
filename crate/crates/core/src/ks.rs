//! One-sample Kolmogorov-Smirnov checks, used to compare simulated
//! BS-to-user distances with the analytic stationary distribution.

use std::fmt;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::mobility::{distance_to_bs, init_user, rwp_cdf, step, RwpPdfParams};
use crate::rng::{substream, Stream};

/// Significance level used by [`pdf_check`].
pub const PDF_CHECK_ALPHA: f64 = 0.01;

const WALKERS: usize = 64;

/// `sup |F_n(x) - F(x)|`. Sorts `samples` in place; NaNs sort last.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Critical value of the one-sample statistic at level `alpha`, with
/// Stephens' small-sample correction to the asymptotic Kolmogorov quantile.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let sn = (n as f64).sqrt();
    c / (sn + 0.12 + 0.11 / sn)
}

#[derive(Debug, Clone, PartialEq)]
pub struct KsReport {
    pub n: usize,
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub max_distance: f64,
    pub passed: bool,
}

impl fmt::Display for KsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples={}", self.n)?;
        writeln!(f, "max_distance={}", self.max_distance)?;
        writeln!(f, "ks_statistic={}", self.statistic)?;
        writeln!(f, "critical_value={}", self.critical_value)?;
        writeln!(f, "alpha={}", self.alpha)?;
        writeln!(f, "result={}", if self.passed { "pass" } else { "fail" })
    }
}

/// Tests arbitrary distance samples against the analytic distribution.
/// Samples beyond `D` count as `D`.
pub fn ks_report(samples: &mut [f64], params: &RwpPdfParams, alpha: f64) -> Result<KsReport> {
    params.validate()?;
    if samples.is_empty() {
        return Err(Error::domain("no samples"));
    }
    let big_d = params.max_distance;
    let statistic = ks_statistic(samples, |d| {
        rwp_cdf(d.clamp(0.0, big_d), params).unwrap_or(f64::NAN)
    });
    let critical_value = ks_critical_value(samples.len(), alpha);
    Ok(KsReport {
        n: samples.len(),
        statistic,
        critical_value,
        alpha,
        max_distance: big_d,
        passed: statistic < critical_value,
    })
}

/// Collects `samples` BS distances from independent random-waypoint walkers
/// and tests them against the analytic distance law with `D` the largest
/// BS-to-region distance.
///
/// Walkers are warmed up for about twenty legs, then sampled every two legs
/// so that consecutive samples of one walker are close to independent.
pub fn pdf_check(samples: usize, config: &ScenarioConfig) -> Result<KsReport> {
    if samples < 1000 {
        return Err(Error::config(format!("pdf-check needs at least 1000 samples, got {samples}")));
    }
    let mob = &config.mobility;
    mob.validate()?;
    let mean_speed = 0.5 * (mob.vt_min + mob.vt_max);
    if !(mean_speed > 0.0) {
        return Err(Error::config("pdf-check needs vt_max > 0"));
    }
    let params = mob.rwp_pdf_params();
    let leg_steps = (params.max_distance / mean_speed).ceil() as usize;
    let warm_up = 20 * leg_steps;
    let gap = 2 * leg_steps;

    let per_walker = samples.div_ceil(WALKERS);
    let mut distances = Vec::with_capacity(samples);
    for w in 0..WALKERS {
        let mut rng = substream(config.seed, Stream::Probe, w as u64);
        let mut user = init_user(mob, &mut rng);
        for _ in 0..warm_up {
            user = step(&user, mob, &mut rng);
        }
        for _ in 0..per_walker {
            if distances.len() == samples {
                break;
            }
            for _ in 0..gap {
                user = step(&user, mob, &mut rng);
            }
            distances.push(distance_to_bs(&user, mob));
        }
    }
    ks_report(&mut distances, &params, PDF_CHECK_ALPHA)
}
