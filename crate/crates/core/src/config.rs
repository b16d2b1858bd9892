//! Scenario configuration and its line-oriented text format.
//!
//! ```text
//! # comments start with '#' or ';'
//! [mobility]
//! vt_min = 0.002
//! vt_max = 0.01
//! [channel]
//! snr_db = 5
//! [scheduler]
//! scheme = oprs-noma
//! [run]
//! steps = 10000
//! seed = 1
//! ```
//!
//! Every key name is unique across sections, so keys may also appear before
//! the first header. A key under the wrong header, an unknown key or a
//! repeated key is rejected with its line number.

use std::fmt::Write as _;

use crate::channel::ChannelConfig;
use crate::error::{Error, Result};
use crate::mobility::{MobilityConfig, Point};
use crate::scheduler::SchedulerConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mobility: MobilityConfig,
    pub channel: ChannelConfig,
    pub scheduler: SchedulerConfig,
    pub n_steps: usize,
    pub seed: u64,
    pub record_every: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mobility: MobilityConfig::default(),
            channel: ChannelConfig::default(),
            scheduler: SchedulerConfig::default(),
            n_steps: 10_000,
            seed: 1,
            record_every: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.mobility.validate()?;
        self.channel.validate()?;
        self.scheduler.validate()?;
        if self.n_steps < 1 {
            return Err(Error::config("steps must be at least 1"));
        }
        if self.record_every < 1 {
            return Err(Error::config("record_every must be at least 1"));
        }
        Ok(())
    }

    /// Normalised dump listing every key; parses back to an equal config.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut section = "";
        for key in KEYS {
            if key.section != section {
                if !section.is_empty() {
                    out.push('\n');
                }
                section = key.section;
                let _ = writeln!(out, "[{section}]");
            }
            let _ = writeln!(out, "{} = {}", key.name, (key.get)(self));
        }
        out
    }

    /// Applies one `key=value` override. Only [`OVERRIDE_KEYS`] are accepted.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        if !OVERRIDE_KEYS.contains(&key) {
            return Err(Error::config(format!(
                "unknown override key `{key}` (allowed: {})",
                OVERRIDE_KEYS.join(", ")
            )));
        }
        self.set_key(key, value)
    }

    /// Sets any configuration key by name and revalidates.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        let entry = find_key(key).ok_or_else(|| Error::config(format!("unknown key `{key}`")))?;
        let mut next = self.clone();
        (entry.set)(&mut next, value.trim()).map_err(Error::Config)?;
        next.validate()?;
        *self = next;
        Ok(())
    }

    /// Current value of a key, formatted as in the normalised dump.
    pub fn get_key(&self, key: &str) -> Result<String> {
        let entry = find_key(key).ok_or_else(|| Error::config(format!("unknown key `{key}`")))?;
        Ok((entry.get)(self))
    }

    /// Parses `KEY=VALUE` and applies it.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected KEY=VALUE, got `{assignment}`")))?;
        self.apply_override(k.trim(), v)
    }
}

/// Keys accepted by `--set` and [`ScenarioConfig::apply_override`].
pub const OVERRIDE_KEYS: &[&str] = &["seed", "steps", "scheme", "snr_db", "ch_th", "rho_th", "t_r"];

type Setter = fn(&mut ScenarioConfig, &str) -> std::result::Result<(), String>;
type Getter = fn(&ScenarioConfig) -> String;

struct KeySpec {
    section: &'static str,
    name: &'static str,
    set: Setter,
    get: Getter,
}

fn num<T: std::str::FromStr>(name: &str, v: &str) -> std::result::Result<T, String> {
    v.parse::<T>()
        .map_err(|_| format!("`{v}` is not a valid value for {name}"))
}

macro_rules! key {
    ($section:literal, $name:literal, |$c:ident| $field:expr) => {
        KeySpec {
            section: $section,
            name: $name,
            set: |$c, v| {
                $field = num($name, v)?;
                Ok(())
            },
            get: |$c| $field.to_string(),
        }
    };
}

const KEYS: &[KeySpec] = &[
    key!("mobility", "x_min", |c| c.mobility.x_min),
    key!("mobility", "x_max", |c| c.mobility.x_max),
    key!("mobility", "y_min", |c| c.mobility.y_min),
    key!("mobility", "y_max", |c| c.mobility.y_max),
    key!("mobility", "vt_min", |c| c.mobility.vt_min),
    key!("mobility", "vt_max", |c| c.mobility.vt_max),
    key!("mobility", "direction_min", |c| c.mobility.direction_min),
    key!("mobility", "direction_max", |c| c.mobility.direction_max),
    key!("mobility", "n_users", |c| c.mobility.n_users),
    key!("mobility", "bs_x", |c| c.mobility.bs_position.x),
    key!("mobility", "bs_y", |c| c.mobility.bs_position.y),
    KeySpec {
        section: "mobility",
        name: "shape",
        set: |c, v| {
            c.mobility.shape = v.parse().map_err(|e: Error| e.to_string())?;
            Ok(())
        },
        get: |c| c.mobility.shape.name().to_string(),
    },
    key!("channel", "snr_db", |c| c.channel.snr_db),
    key!("channel", "path_loss_exponent", |c| c.channel.path_loss_exponent),
    key!("channel", "total_power", |c| c.channel.total_power),
    key!("channel", "d_min", |c| c.channel.d_min),
    KeySpec {
        section: "scheduler",
        name: "scheme",
        set: |c, v| {
            c.scheduler.scheme = v.parse().map_err(|e: Error| e.to_string())?;
            Ok(())
        },
        get: |c| c.scheduler.scheme.name().to_string(),
    },
    key!("scheduler", "ch_th", |c| c.scheduler.ch_th),
    key!("scheduler", "fixed_rho1", |c| c.scheduler.fixed_rho1),
    key!("scheduler", "t_r", |c| c.scheduler.bspo.target_rate),
    key!("scheduler", "rho_th", |c| c.scheduler.bspo.rho_th),
    key!("scheduler", "cap_epsilon", |c| c.scheduler.bspo.cap_epsilon),
    key!("scheduler", "bisection_tol", |c| c.scheduler.bspo.bisection_tol),
    key!("scheduler", "max_iters", |c| c.scheduler.bspo.max_iters),
    key!("run", "steps", |c| c.n_steps),
    key!("run", "seed", |c| c.seed),
    key!("run", "record_every", |c| c.record_every),
];

const SECTIONS: &[&str] = &["mobility", "channel", "scheduler", "run"];

fn find_key(name: &str) -> Option<&'static KeySpec> {
    KEYS.iter().find(|k| k.name == name)
}

/// Parses and validates a configuration document. Missing keys take their
/// defaults; the base station defaults to the region centre.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<&str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw
            .split(['#', ';'])
            .next()
            .unwrap_or_default()
            .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(format!("malformed section header `{line}`")))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| parse_err(format!("unknown section `[{name}]`")))?;
            section = Some(known);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let spec = find_key(key).ok_or_else(|| parse_err(format!("unknown key `{key}`")))?;
        if let Some(s) = section {
            if spec.section != s {
                return Err(parse_err(format!(
                    "key `{key}` belongs in [{}], not [{s}]",
                    spec.section
                )));
            }
        }
        if seen.contains(&spec.name) {
            return Err(parse_err(format!("duplicate key `{key}`")));
        }
        seen.push(spec.name);
        (spec.set)(&mut cfg, value).map_err(parse_err)?;
    }

    let region_center: Point = cfg.mobility.center();
    if !seen.contains(&"bs_x") {
        cfg.mobility.bs_position.x = region_center.x;
    }
    if !seen.contains(&"bs_y") {
        cfg.mobility.bs_position.y = region_center.y;
    }
    cfg.validate()?;
    Ok(cfg)
}
