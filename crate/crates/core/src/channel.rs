//! Rayleigh block fading with distance-dependent path loss.
//!
//! The complex coefficient of a link at distance `d` is `CN(0, d^-v)`, so its
//! power gain `|h|^2` is exponential with mean `d^-v`. One independent draw is
//! made per link per step.

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::rng::uniform01;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub path_loss_exponent: f64,
    /// Normalised total transmit power `P_t`.
    pub total_power: f64,
    /// Transmit SNR `P_t / N_o` in dB; the noise power is derived from it.
    pub snr_db: f64,
    /// Distances are clamped below at this value before path loss is applied.
    pub d_min: f64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            path_loss_exponent: 2.0,
            total_power: 1.0,
            snr_db: 5.0,
            d_min: 1e-3,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.path_loss_exponent > 0.0) || !self.path_loss_exponent.is_finite() {
            return Err(Error::config("path_loss_exponent must be positive"));
        }
        if !(self.total_power > 0.0) || !self.total_power.is_finite() {
            return Err(Error::config("total_power must be positive"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::config("snr_db must be finite"));
        }
        if !(self.d_min > 0.0) || !self.d_min.is_finite() {
            return Err(Error::config("d_min must be positive"));
        }
        let n0 = self.noise_power();
        if !(n0 > 0.0) || !n0.is_finite() {
            return Err(Error::config("snr_db gives a non-positive noise power"));
        }
        Ok(())
    }

    /// `P_t / N_o` as a linear ratio.
    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn noise_power(&self) -> f64 {
        self.total_power / self.snr_linear()
    }

    pub fn clamp_distance(&self, d: f64) -> f64 {
        d.max(self.d_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub d: f64,
    /// Variance of the complex coefficient, `d^-v`.
    pub lambda: f64,
    /// Power gain `|h|^2`.
    pub gain: f64,
}

pub fn draw_channel<R: RngCore + ?Sized>(
    d: f64,
    config: &ChannelConfig,
    rng: &mut R,
) -> Result<ChannelState> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!("link distance must be positive, got {d}")));
    }
    let lambda = d.powf(-config.path_loss_exponent);
    // Inverse CDF of Exp(mean lambda); 1 - u lies in (0, 1].
    let gain = -lambda * (-uniform01(rng)).ln_1p();
    Ok(ChannelState { d, lambda, gain })
}

/// `P_t |h|^2 / N_o`.
pub fn effective_snr(state: &ChannelState, config: &ChannelConfig) -> f64 {
    config.total_power * state.gain / config.noise_power()
}
