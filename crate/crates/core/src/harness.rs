//! Step loop: mobility, channel, decision, rates.
//!
//! Per step the draw order is fixed: mobility for user 1 then user 2, then
//! the channel for user 1 then user 2. Each (purpose, user) pair has its own
//! random stream, so the realisations never depend on the scheme.

use std::collections::BTreeMap;
use std::thread;

use crate::capacity::{oma_rates, pair_sum_capacity, RatePair};
use crate::channel::draw_channel;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::mobility::{distance_to_bs, init_user, step};
use crate::rng::{substream, Stream};
use crate::scheduler::{decide, Branch, PairGains, RoleAssignment, Scheme};

/// One observed step. `gain1`/`gain2` and `d1`/`d2` follow physical users;
/// `rho1`/`r_near` and `rho2`/`r_far` follow roles.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub d1: f64,
    pub d2: f64,
    pub gain1: f64,
    pub gain2: f64,
    /// Physical user (1 or 2) holding the near role after the decision.
    pub near_user: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub r_near: f64,
    pub r_far: f64,
    pub psc: f64,
    pub switched: bool,
    pub outage: bool,
    pub branch: Option<Branch>,
}

impl StepRecord {
    pub fn far_user(&self) -> usize {
        3 - self.near_user
    }

    pub fn near_gain(&self) -> f64 {
        if self.near_user == 1 {
            self.gain1
        } else {
            self.gain2
        }
    }

    pub fn far_gain(&self) -> f64 {
        if self.near_user == 1 {
            self.gain2
        } else {
            self.gain1
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scheme: Scheme,
    pub seed: u64,
    pub n_records: usize,
    pub mean_psc: f64,
    pub mean_r_near: f64,
    pub mean_r_far: f64,
    pub n_switches: usize,
    pub outage_fraction: f64,
    /// Step indices `t` at which the roles were swapped.
    pub switch_positions: Vec<usize>,
}

impl RunSummary {
    pub fn from_records(scheme: Scheme, seed: u64, records: &[StepRecord]) -> Self {
        let n = records.len();
        let mean = |f: fn(&StepRecord) -> f64| {
            if n == 0 {
                0.0
            } else {
                records.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let switch_positions: Vec<usize> =
            records.iter().filter(|r| r.switched).map(|r| r.t).collect();
        let outages = records.iter().filter(|r| r.outage).count();
        RunSummary {
            scheme,
            seed,
            n_records: n,
            mean_psc: mean(|r| r.psc),
            mean_r_near: mean(|r| r.r_near),
            mean_r_far: mean(|r| r.r_far),
            n_switches: switch_positions.len(),
            outage_fraction: if n == 0 { 0.0 } else { outages as f64 / n as f64 },
            switch_positions,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
}

/// Runs `config.n_steps` steps and keeps every `record_every`-th one,
/// starting at `t = 0`.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    config.validate()?;
    if config.mobility.n_users != 2 {
        return Err(Error::config(format!(
            "a run simulates one pair; n_users must be 2, got {}",
            config.mobility.n_users
        )));
    }
    let mob = &config.mobility;
    let ch = &config.channel;
    let sched = &config.scheduler;
    let snr = ch.snr_linear();

    let mut mob_rng = [
        substream(config.seed, Stream::Mobility, 0),
        substream(config.seed, Stream::Mobility, 1),
    ];
    let mut ch_rng = [
        substream(config.seed, Stream::Channel, 0),
        substream(config.seed, Stream::Channel, 1),
    ];
    let mut users = [
        init_user(mob, &mut mob_rng[0]),
        init_user(mob, &mut mob_rng[1]),
    ];

    // The pair is formed on mean channel quality: the closer user starts near.
    let mut roles = if distance_to_bs(&users[1], mob) < distance_to_bs(&users[0], mob) {
        RoleAssignment::new(2, 1)
    } else {
        RoleAssignment::new(1, 2)
    };

    let mut records = Vec::with_capacity(config.n_steps / config.record_every + 1);
    for t in 0..config.n_steps {
        for (user, rng) in users.iter_mut().zip(mob_rng.iter_mut()) {
            *user = step(user, mob, rng);
        }
        let d = [distance_to_bs(&users[0], mob), distance_to_bs(&users[1], mob)];
        let mut gain = [0.0; 2];
        for i in 0..2 {
            gain[i] = draw_channel(ch.clamp_distance(d[i]), ch, &mut ch_rng[i])?.gain;
        }

        let role_gains = PairGains::new(gain[roles.near_user - 1], gain[roles.far_user - 1]);
        let decision = decide(role_gains, snr, roles, sched)?;
        roles = decision.roles;

        let gamma_near = snr * gain[roles.near_user - 1];
        let gamma_far = snr * gain[roles.far_user - 1];
        let rates: RatePair = match sched.scheme {
            Scheme::Oma => oma_rates(gamma_near, gamma_far),
            _ => pair_sum_capacity(gamma_near, gamma_far, &decision.alloc),
        };

        if t % config.record_every == 0 {
            records.push(StepRecord {
                t,
                d1: d[0],
                d2: d[1],
                gain1: gain[0],
                gain2: gain[1],
                near_user: roles.near_user,
                rho1: decision.alloc.rho1,
                rho2: decision.alloc.rho2,
                r_near: rates.r_near,
                r_far: rates.r_far,
                psc: rates.psc,
                switched: roles.switched_this_step,
                outage: decision.alloc.outage,
                branch: decision.branch,
            });
        }
    }
    let summary = RunSummary::from_records(sched.scheme, config.seed, &records);
    Ok(RunOutput { records, summary })
}

/// Runs each scheme on the same seed, in parallel.
pub fn run_matrix(config: &ScenarioConfig, schemes: &[Scheme]) -> Result<BTreeMap<Scheme, RunOutput>> {
    if schemes.is_empty() {
        return Err(Error::config("run_matrix needs at least one scheme"));
    }
    let results: Vec<(Scheme, Result<RunOutput>)> = thread::scope(|scope| {
        let handles: Vec<_> = schemes
            .iter()
            .map(|&scheme| {
                let mut cfg = config.clone();
                cfg.scheduler.scheme = scheme;
                scope.spawn(move || (scheme, run(&cfg)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    let mut out = BTreeMap::new();
    for (scheme, result) in results {
        out.insert(scheme, result?);
    }
    Ok(out)
}
