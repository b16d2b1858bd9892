//! Bisection-search power optimisation.
//!
//! With the near user stronger, the pair sum capacity grows monotonically in
//! the near share `rho1`, while the far rate shrinks. The optimum is
//! therefore the largest `rho1` below the cap that still gives the far user
//! its target rate, which bisection finds on the monotone far-rate margin.

use crate::capacity::{pair_sum_capacity, rate_far, PowerAllocation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BspoConfig {
    /// Far-user target rate `T_R` in bit/s/Hz.
    pub target_rate: f64,
    /// Minimum power gap `rho2 - rho1` on thresholded branches.
    pub rho_th: f64,
    /// Margin below one half for the unthresholded cap.
    pub cap_epsilon: f64,
    /// Bracket width on `rho1` at which bisection stops.
    pub bisection_tol: f64,
    pub max_iters: usize,
}

impl Default for BspoConfig {
    fn default() -> Self {
        BspoConfig {
            target_rate: 1.0,
            rho_th: 0.02,
            cap_epsilon: 0.01,
            bisection_tol: 1e-9,
            max_iters: 200,
        }
    }
}

impl BspoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rate > 0.0) || !self.target_rate.is_finite() {
            return Err(Error::config("target rate t_r must be positive"));
        }
        if !(0.0..1.0).contains(&self.rho_th) {
            return Err(Error::config(format!(
                "rho_th must satisfy 0 <= rho_th < 1, got {}",
                self.rho_th
            )));
        }
        if !(self.cap_epsilon > 0.0 && self.cap_epsilon < 0.5) {
            return Err(Error::config("cap_epsilon must lie in (0, 0.5)"));
        }
        if !(self.bisection_tol > 0.0) || !self.bisection_tol.is_finite() {
            return Err(Error::config("bisection_tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be at least 1"));
        }
        Ok(())
    }

    /// `2^T_R - 1`, the far-user SINR the target rate requires.
    pub fn required_sinr(&self) -> f64 {
        self.target_rate.exp2() - 1.0
    }

    /// Worst-case iterations to shrink a bracket of width 0.5 to tolerance.
    pub fn iteration_bound(&self) -> usize {
        (0.5 / self.bisection_tol).log2().ceil().max(0.0) as usize + 2
    }
}

pub fn rho1_upper_bound(thresholded: bool, config: &BspoConfig) -> f64 {
    if thresholded {
        0.5 * (1.0 - config.rho_th)
    } else {
        0.5 - config.cap_epsilon
    }
}

fn check_gamma(name: &str, g: f64) -> Result<()> {
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::domain(format!("{name} must be finite and >= 0, got {g}")));
    }
    Ok(())
}

fn far_margin(gamma_far: f64, rho1: f64, target: f64) -> f64 {
    rate_far(gamma_far, &PowerAllocation::new(rho1, false)) - target
}

/// Outcome of [`bspo_with_stats`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BspoOutcome {
    pub alloc: PowerAllocation,
    pub iterations: usize,
}

/// Largest feasible `rho1` in `[0, cap]` for the role-ordered pair.
///
/// `gamma_near` only matters to callers; the split is fixed by the far link.
/// When even `rho1 = 0` misses the target, all power goes to the far user
/// and the allocation is flagged as an outage.
pub fn bspo(
    gamma_near: f64,
    gamma_far: f64,
    thresholded: bool,
    config: &BspoConfig,
) -> Result<PowerAllocation> {
    bspo_with_stats(gamma_near, gamma_far, thresholded, config).map(|o| o.alloc)
}

pub fn bspo_with_stats(
    gamma_near: f64,
    gamma_far: f64,
    thresholded: bool,
    config: &BspoConfig,
) -> Result<BspoOutcome> {
    check_gamma("gamma_near", gamma_near)?;
    check_gamma("gamma_far", gamma_far)?;
    let target = config.target_rate;
    let cap = rho1_upper_bound(thresholded, config);

    if far_margin(gamma_far, 0.0, target) < 0.0 {
        return Ok(BspoOutcome {
            alloc: PowerAllocation::new(0.0, true),
            iterations: 0,
        });
    }
    if far_margin(gamma_far, cap, target) >= 0.0 {
        return Ok(BspoOutcome {
            alloc: PowerAllocation::new(cap, false),
            iterations: 0,
        });
    }

    // Invariant: lo is feasible, hi is not.
    let (mut lo, mut hi) = (0.0, cap);
    let mut iterations = 0;
    while hi - lo > config.bisection_tol {
        if iterations == config.max_iters {
            return Err(Error::NonConvergence(config.max_iters));
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if far_margin(gamma_far, mid, target) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(BspoOutcome {
        alloc: PowerAllocation::new(lo, false),
        iterations,
    })
}

/// Exhaustive search over `grid_n` evenly spaced values of `rho1` in
/// `[0, cap]`. Ties resolve to the larger `rho1`.
pub fn brute_force_pa(
    gamma_near: f64,
    gamma_far: f64,
    thresholded: bool,
    config: &BspoConfig,
    grid_n: usize,
) -> Result<PowerAllocation> {
    check_gamma("gamma_near", gamma_near)?;
    check_gamma("gamma_far", gamma_far)?;
    if grid_n < 2 {
        return Err(Error::domain("grid_n must be at least 2"));
    }
    let cap = rho1_upper_bound(thresholded, config);
    let spacing = cap / (grid_n - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..grid_n {
        let rho1 = if i == grid_n - 1 { cap } else { i as f64 * spacing };
        let alloc = PowerAllocation::new(rho1, false);
        if rate_far(gamma_far, &alloc) < config.target_rate {
            continue;
        }
        let psc = pair_sum_capacity(gamma_near, gamma_far, &alloc).psc;
        if best.is_none_or(|(_, p)| psc >= p) {
            best = Some((rho1, psc));
        }
    }
    Ok(match best {
        Some((rho1, _)) => PowerAllocation::new(rho1, false),
        None => PowerAllocation::new(0.0, true),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::rate_far;

    const SNR_5DB: f64 = 3.162_277_660_168_379;

    fn closed_form(gamma_far: f64, config: &BspoConfig) -> f64 {
        let c = config.required_sinr();
        (gamma_far - c) / (gamma_far * (1.0 + c))
    }

    #[test]
    fn caps() {
        let cfg = BspoConfig::default();
        assert!((rho1_upper_bound(false, &cfg) - 0.49).abs() < 1e-15);
        assert!((rho1_upper_bound(true, &cfg) - 0.49).abs() < 1e-15);
        let wide = BspoConfig {
            rho_th: 0.2,
            ..cfg
        };
        assert!((rho1_upper_bound(true, &wide) - 0.40).abs() < 1e-15);
    }

    #[test]
    fn matches_closed_form_at_5db() {
        let cfg = BspoConfig::default();
        let out = bspo_with_stats(SNR_5DB, SNR_5DB, false, &cfg).unwrap();
        let expected = closed_form(SNR_5DB, &cfg);
        assert!((expected - 0.341_886_116_991_581).abs() < 1e-12);
        assert!((out.alloc.rho1 - expected).abs() < 1e-8);
        assert!((out.alloc.rho2 - (1.0 - expected)).abs() < 1e-8);
        assert!(!out.alloc.outage);
        assert!(out.iterations <= cfg.iteration_bound());
        assert!(rate_far(SNR_5DB, &out.alloc) >= 1.0);
    }

    #[test]
    fn infeasible_target_is_outage() {
        let cfg = BspoConfig::default();
        let a = bspo(10.0, 0.5, false, &cfg).unwrap();
        assert_eq!(a, PowerAllocation::new(0.0, true));
        assert_eq!(a.rho2, 1.0);
        assert_eq!(brute_force_pa(10.0, 0.5, false, &cfg, 1000).unwrap(), a);
    }

    #[test]
    fn strong_far_link_hits_cap() {
        let cfg = BspoConfig::default();
        let a = bspo(200.0, 100.0, true, &cfg).unwrap();
        assert!((a.rho1 - 0.49).abs() < 1e-15);
        assert!((a.rho2 - 0.51).abs() < 1e-15);
        assert!(!a.outage);
        let b = brute_force_pa(2e6, 1e6, false, &cfg, 1000).unwrap();
        assert!((b.rho1 - 0.49).abs() < 1e-15);
    }

    #[test]
    fn thresholded_gap_holds() {
        let cfg = BspoConfig {
            rho_th: 0.3,
            ..BspoConfig::default()
        };
        let a = bspo(1e3, 1e3, true, &cfg).unwrap();
        assert!(a.rho2 - a.rho1 >= cfg.rho_th - 1e-12);
    }

    #[test]
    fn rejects_bad_gamma() {
        let cfg = BspoConfig::default();
        assert!(bspo(-1.0, 1.0, false, &cfg).is_err());
        assert!(bspo(1.0, f64::NAN, false, &cfg).is_err());
    }

    #[test]
    fn iteration_budget_is_enforced() {
        let cfg = BspoConfig {
            max_iters: 3,
            ..BspoConfig::default()
        };
        assert!(matches!(
            bspo(SNR_5DB, SNR_5DB, false, &cfg),
            Err(Error::NonConvergence(3))
        ));
    }

    #[test]
    fn agrees_with_grid_search() {
        let cfg = BspoConfig::default();
        let grid_n = 10_000;
        for (gn, gf) in [(50.0, 3.0), (8.0, 2.5), (3.0, 1.2), (100.0, 99.0)] {
            for th in [false, true] {
                let a = bspo(gn, gf, th, &cfg).unwrap();
                let b = brute_force_pa(gn, gf, th, &cfg, grid_n).unwrap();
                let spacing = rho1_upper_bound(th, &cfg) / (grid_n - 1) as f64;
                assert_eq!(a.outage, b.outage);
                assert!(
                    (a.rho1 - b.rho1).abs() <= spacing + cfg.bisection_tol,
                    "{gn} {gf} {th}: {} vs {}",
                    a.rho1,
                    b.rho1
                );
            }
        }
    }
}
