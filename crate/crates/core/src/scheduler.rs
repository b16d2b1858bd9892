//! Role assignment and power split per step, for every scheme.
//!
//! Gains always arrive in current-role order: `near` is the gain of the user
//! holding the near role after the previous step.

use std::fmt;
use std::str::FromStr;

use crate::capacity::{rate_far, PowerAllocation};
use crate::error::{Error, Result};
use crate::power::{bspo, BspoConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Oma,
    NomaFixed,
    FpsNoma,
    OprsNoma,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Oma,
        Scheme::NomaFixed,
        Scheme::FpsNoma,
        Scheme::OprsNoma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Oma => "oma",
            Scheme::NomaFixed => "noma-fixed",
            Scheme::FpsNoma => "fps-noma",
            Scheme::OprsNoma => "oprs-noma",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown scheme `{s}` (expected oma, noma-fixed, fps-noma or oprs-noma)"
                ))
            })
    }
}

/// The four arms of the role-switching decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Ordering kept, gains far apart: plain cap.
    B1NoSwapPlain,
    /// Ordering kept, gains close: thresholded cap.
    B2NoSwapThresh,
    /// Ordering inverted, gains close: swap, thresholded cap.
    B3SwapThresh,
    /// Ordering inverted, gains far apart: swap, plain cap.
    B4SwapPlain,
}

impl Branch {
    pub fn tag(&self) -> &'static str {
        match self {
            Branch::B1NoSwapPlain => "B1_NOSWAP_PLAIN",
            Branch::B2NoSwapThresh => "B2_NOSWAP_THRESH",
            Branch::B3SwapThresh => "B3_SWAP_THRESH",
            Branch::B4SwapPlain => "B4_SWAP_PLAIN",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Branch> {
        [
            Branch::B1NoSwapPlain,
            Branch::B2NoSwapThresh,
            Branch::B3SwapThresh,
            Branch::B4SwapPlain,
        ]
        .into_iter()
        .find(|b| b.tag() == tag)
    }

    pub fn swaps(&self) -> bool {
        matches!(self, Branch::B3SwapThresh | Branch::B4SwapPlain)
    }

    pub fn thresholded(&self) -> bool {
        matches!(self, Branch::B2NoSwapThresh | Branch::B3SwapThresh)
    }
}

/// Which physical user (1 or 2) holds each role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleAssignment {
    pub near_user: usize,
    pub far_user: usize,
    pub switched_this_step: bool,
}

impl RoleAssignment {
    pub fn new(near_user: usize, far_user: usize) -> Self {
        RoleAssignment {
            near_user,
            far_user,
            switched_this_step: false,
        }
    }

    fn kept(&self) -> Self {
        RoleAssignment {
            switched_this_step: false,
            ..*self
        }
    }

    fn swapped(&self) -> Self {
        RoleAssignment {
            near_user: self.far_user,
            far_user: self.near_user,
            switched_this_step: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerConfig {
    pub scheme: Scheme,
    /// Channel-gain gap at or below which the thresholded cap applies.
    pub ch_th: f64,
    /// Near share used by the fixed-power schemes.
    pub fixed_rho1: f64,
    pub bspo: BspoConfig,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        SchedulerConfig {
            scheme: Scheme::OprsNoma,
            ch_th: 0.1,
            fixed_rho1: 0.2,
            bspo: BspoConfig::default(),
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ch_th >= 0.0) || !self.ch_th.is_finite() {
            return Err(Error::config("ch_th must be finite and >= 0"));
        }
        if !(self.fixed_rho1 > 0.0 && self.fixed_rho1 < 0.5) {
            return Err(Error::config(format!(
                "fixed_rho1 must lie in (0, 0.5), got {}",
                self.fixed_rho1
            )));
        }
        self.bspo.validate()
    }
}

/// Channel gains `|h|^2` in current-role order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGains {
    pub near: f64,
    pub far: f64,
}

impl PairGains {
    pub fn new(near: f64, far: f64) -> Self {
        PairGains { near, far }
    }

    fn swapped(&self) -> Self {
        PairGains {
            near: self.far,
            far: self.near,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub roles: RoleAssignment,
    pub alloc: PowerAllocation,
    /// `None` for the baseline schemes.
    pub branch: Option<Branch>,
}

fn check_gains(gains: &PairGains) -> Result<()> {
    if !(gains.near >= 0.0 && gains.far >= 0.0) || !gains.near.is_finite() || !gains.far.is_finite()
    {
        return Err(Error::domain(format!(
            "channel gains must be finite and >= 0, got ({}, {})",
            gains.near, gains.far
        )));
    }
    Ok(())
}

/// Picks the branch for gains in current-role order. An exact tie keeps the
/// roles and takes the thresholded arm; a gap equal to `ch_th` counts as
/// close.
pub fn classify(gains: &PairGains, ch_th: f64) -> Branch {
    let gap = (gains.near - gains.far).abs();
    let close = gap <= ch_th;
    if gains.near >= gains.far {
        if close {
            Branch::B2NoSwapThresh
        } else {
            Branch::B1NoSwapPlain
        }
    } else if close {
        Branch::B3SwapThresh
    } else {
        Branch::B4SwapPlain
    }
}

/// Role switching followed by bisection power optimisation.
///
/// `snr` is the transmit SNR `P_t / N_o`, used to turn gains into the link
/// SNRs that the power search works with.
pub fn oprs_decide(
    gains: PairGains,
    snr: f64,
    prev_roles: RoleAssignment,
    config: &SchedulerConfig,
) -> Result<Decision> {
    check_gains(&gains)?;
    let branch = classify(&gains, config.ch_th);
    let (roles, ordered) = if branch.swaps() {
        (prev_roles.swapped(), gains.swapped())
    } else {
        (prev_roles.kept(), gains)
    };
    let alloc = bspo(
        snr * ordered.near,
        snr * ordered.far,
        branch.thresholded(),
        &config.bspo,
    )?;
    Ok(Decision {
        roles,
        alloc,
        branch: Some(branch),
    })
}

/// Fixed split, with (`fps-noma`) or without (`noma-fixed`) following the
/// instantaneous gain ordering.
pub fn fixed_power_decide(
    gains: PairGains,
    snr: f64,
    prev_roles: RoleAssignment,
    config: &SchedulerConfig,
    switching: bool,
) -> Result<Decision> {
    check_gains(&gains)?;
    let (roles, ordered) = if switching && gains.near < gains.far {
        (prev_roles.swapped(), gains.swapped())
    } else {
        (prev_roles.kept(), gains)
    };
    let mut alloc = PowerAllocation::new(config.fixed_rho1, false);
    alloc.outage = rate_far(snr * ordered.far, &alloc) < config.bspo.target_rate;
    Ok(Decision {
        roles,
        alloc,
        branch: None,
    })
}

/// Orthogonal baseline: roles never change and each user gets half the
/// resource at full power. `rho` reports the resource split.
pub fn oma_decide(
    gains: PairGains,
    snr: f64,
    prev_roles: RoleAssignment,
    config: &SchedulerConfig,
) -> Result<Decision> {
    check_gains(&gains)?;
    let far_rate = 0.5 * (snr * gains.far).ln_1p() / std::f64::consts::LN_2;
    Ok(Decision {
        roles: prev_roles.kept(),
        alloc: PowerAllocation::new(0.5, far_rate < config.bspo.target_rate),
        branch: None,
    })
}

/// Dispatches on `config.scheme`.
pub fn decide(
    gains: PairGains,
    snr: f64,
    prev_roles: RoleAssignment,
    config: &SchedulerConfig,
) -> Result<Decision> {
    match config.scheme {
        Scheme::Oma => oma_decide(gains, snr, prev_roles, config),
        Scheme::NomaFixed => fixed_power_decide(gains, snr, prev_roles, config, false),
        Scheme::FpsNoma => fixed_power_decide(gains, snr, prev_roles, config, true),
        Scheme::OprsNoma => oprs_decide(gains, snr, prev_roles, config),
    }
}

/// Positions in `history` whose decision swapped the roles.
pub fn detect_switch_positions<'a, I>(history: I) -> Vec<usize>
where
    I: IntoIterator<Item = &'a Decision>,
{
    history
        .into_iter()
        .enumerate()
        .filter(|(_, d)| d.roles.switched_this_step)
        .map(|(i, _)| i)
        .collect()
}
