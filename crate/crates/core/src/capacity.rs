//! Spectral efficiencies of a two-user downlink pair.
//!
//! Rates are in bit/s/Hz with perfect SIC at the near user. `gamma` is the
//! per-link SNR at full power, `P_t |h|^2 / N_o`.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub r_near: f64,
    pub r_far: f64,
    pub psc: f64,
}

impl RatePair {
    pub fn new(r_near: f64, r_far: f64) -> Self {
        RatePair {
            r_near,
            r_far,
            psc: r_near + r_far,
        }
    }
}

/// Power split between the near (`rho1`) and far (`rho2`) roles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub rho1: f64,
    pub rho2: f64,
    /// The far user's target rate is unreachable with this split.
    pub outage: bool,
}

impl PowerAllocation {
    pub fn new(rho1: f64, outage: bool) -> Self {
        PowerAllocation {
            rho1,
            rho2: 1.0 - rho1,
            outage,
        }
    }

    pub fn is_valid(&self) -> bool {
        (self.rho1 + self.rho2 - 1.0).abs() <= 1e-12
            && (0.0..=1.0).contains(&self.rho1)
            && (0.0..=1.0).contains(&self.rho2)
            && self.rho2 >= self.rho1
    }
}

pub fn rate_near(gamma1: f64, alloc: &PowerAllocation) -> f64 {
    (alloc.rho1 * gamma1).ln_1p() / std::f64::consts::LN_2
}

/// The near user's share is interference at the far user.
pub fn rate_far(gamma2: f64, alloc: &PowerAllocation) -> f64 {
    let sinr = alloc.rho2 * gamma2 / (alloc.rho1 * gamma2 + 1.0);
    sinr.ln_1p() / std::f64::consts::LN_2
}

pub fn pair_sum_capacity(gamma1: f64, gamma2: f64, alloc: &PowerAllocation) -> RatePair {
    RatePair::new(rate_near(gamma1, alloc), rate_far(gamma2, alloc))
}

/// Equal orthogonal split, full power on each half.
pub fn oma_rates(gamma1: f64, gamma2: f64) -> RatePair {
    let half = |g: f64| 0.5 * g.ln_1p() / std::f64::consts::LN_2;
    RatePair::new(half(gamma1), half(gamma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SNR_5DB: f64 = 3.162_277_660_168_379;

    #[test]
    fn near_rate_values() {
        assert_eq!(rate_near(5.0, &PowerAllocation::new(0.0, false)), 0.0);
        // log2(1 + 0.3418 * 3.1623)
        let r = rate_near(3.1623, &PowerAllocation::new(0.3418, false));
        assert!((r - 1.057_189_707_461_991_8).abs() < 1e-12);
        assert_eq!(rate_near(1.0, &PowerAllocation::new(1.0, false)), 1.0);
    }

    #[test]
    fn far_rate_values() {
        assert_eq!(rate_far(0.0, &PowerAllocation::new(0.3, false)), 0.0);
        assert_eq!(rate_far(3.0, &PowerAllocation::new(0.0, false)), 2.0);
        // Closed-form split hitting exactly one bit for the far user.
        let c = 1.0;
        let rho1 = (SNR_5DB - c) / (SNR_5DB * (1.0 + c));
        let r = rate_far(SNR_5DB, &PowerAllocation::new(rho1, false));
        assert!((r - 1.0).abs() < 1e-12, "{r}");
    }

    #[test]
    fn pair_values() {
        let zero = pair_sum_capacity(0.0, 0.0, &PowerAllocation::new(0.2, false));
        assert_eq!(zero, RatePair::new(0.0, 0.0));
        let c = 1.0;
        let rho1 = (SNR_5DB - c) / (SNR_5DB * (1.0 + c));
        let p = pair_sum_capacity(SNR_5DB, SNR_5DB, &PowerAllocation::new(rho1, false));
        // log2(1 + rho1 * gamma) + 1 with rho1 = 0.341886...
        assert!((p.r_near - 1.057_373_208_606_795_3).abs() < 1e-12, "{}", p.r_near);
        assert!((p.psc - (p.r_near + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn oma_values() {
        assert_eq!(oma_rates(0.0, 0.0), RatePair::new(0.0, 0.0));
        let p = oma_rates(3.0, 3.0);
        assert_eq!((p.r_near, p.r_far, p.psc), (1.0, 1.0, 2.0));
        let p = oma_rates(3.1623, 1.0);
        assert!((p.psc - 1.528_690_475_918_944_8).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn psc_is_exact_sum(g1 in 0.0f64..1e4, g2 in 0.0f64..1e4, rho1 in 0.0f64..0.5) {
            let p = pair_sum_capacity(g1, g2, &PowerAllocation::new(rho1, false));
            prop_assert_eq!(p.psc, p.r_near + p.r_far);
            prop_assert!(p.r_near.is_finite() && p.r_near >= 0.0);
            prop_assert!(p.r_far.is_finite() && p.r_far >= 0.0);
        }

        #[test]
        fn psc_increases_with_near_share(
            g2 in 0.01f64..100.0,
            ratio in 1.01f64..100.0,
            a in 0.0f64..0.49,
            b in 0.0f64..0.49,
        ) {
            let g1 = g2 * ratio;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let p_lo = pair_sum_capacity(g1, g2, &PowerAllocation::new(lo, false)).psc;
            let p_hi = pair_sum_capacity(g1, g2, &PowerAllocation::new(hi, false)).psc;
            prop_assert!(p_hi > p_lo);
        }

        #[test]
        fn far_rate_decreases_and_is_capped(
            g2 in 1e-3f64..1e3,
            a in 0.0f64..0.5,
            b in 0.0f64..0.5,
        ) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let r_lo = rate_far(g2, &PowerAllocation::new(lo, false));
            let r_hi = rate_far(g2, &PowerAllocation::new(hi, false));
            prop_assert!(r_hi < r_lo);
            prop_assert!(r_lo <= g2.ln_1p() / std::f64::consts::LN_2 + 1e-12);
        }
    }
}
