//! Random waypoint mobility and its stationary distance distribution.
//!
//! A user repeatedly draws a waypoint uniformly over the region and a speed
//! uniformly over `[vt_min, vt_max]`, then walks a straight line to it. There
//! is no pause at waypoints. A step that would pass the waypoint ends exactly
//! on it and the unused travel budget is dropped, so a single step never
//! moves a user further than its current speed.

use std::f64::consts::PI;

use rand_chacha::rand_core::RngCore;

use crate::error::{Error, Result};
use crate::rng::{uniform, uniform01};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Support of the waypoint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionShape {
    /// The whole rectangle `[x_min, x_max] x [y_min, y_max]`.
    #[default]
    Rectangle,
    /// The largest disk inscribed in the rectangle, centred on it.
    Disk,
}

impl RegionShape {
    pub fn name(&self) -> &'static str {
        match self {
            RegionShape::Rectangle => "rectangle",
            RegionShape::Disk => "disk",
        }
    }
}

impl std::str::FromStr for RegionShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rectangle" => Ok(RegionShape::Rectangle),
            "disk" => Ok(RegionShape::Disk),
            other => Err(Error::config(format!(
                "unknown region shape `{other}` (expected rectangle or disk)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// Speeds are in length units per step.
    pub vt_min: f64,
    pub vt_max: f64,
    /// Accepted for completeness; waypoint motion fixes the heading, so the
    /// sampler never reads these.
    pub direction_min: f64,
    pub direction_max: f64,
    pub n_users: usize,
    pub bs_position: Point,
    pub shape: RegionShape,
}

impl Default for MobilityConfig {
    fn default() -> Self {
        MobilityConfig {
            x_min: 0.0,
            x_max: 1.0,
            y_min: 0.0,
            y_max: 1.0,
            vt_min: 0.002,
            vt_max: 0.01,
            direction_min: -PI,
            direction_max: PI,
            n_users: 2,
            bs_position: Point::new(0.5, 0.5),
            shape: RegionShape::Rectangle,
        }
    }
}

impl MobilityConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.x_min,
            self.x_max,
            self.y_min,
            self.y_max,
            self.vt_min,
            self.vt_max,
            self.direction_min,
            self.direction_max,
            self.bs_position.x,
            self.bs_position.y,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("mobility parameters must be finite"));
        }
        if self.x_min >= self.x_max || self.y_min >= self.y_max {
            return Err(Error::config(format!(
                "region must satisfy x_min < x_max and y_min < y_max, got [{}, {}] x [{}, {}]",
                self.x_min, self.x_max, self.y_min, self.y_max
            )));
        }
        if self.vt_min < 0.0 || self.vt_min > self.vt_max {
            return Err(Error::config(format!(
                "speed interval must satisfy 0 <= vt_min <= vt_max, got vt_min={} vt_max={}",
                self.vt_min, self.vt_max
            )));
        }
        if self.direction_min > self.direction_max {
            return Err(Error::config("direction interval is empty"));
        }
        if self.n_users < 1 {
            return Err(Error::config("n_users must be at least 1"));
        }
        if !self.contains(&self.bs_position) {
            return Err(Error::config(format!(
                "bs_position ({}, {}) lies outside the region",
                self.bs_position.x, self.bs_position.y
            )));
        }
        Ok(())
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    fn disk_radius(&self) -> f64 {
        0.5 * (self.x_max - self.x_min).min(self.y_max - self.y_min)
    }

    pub fn contains(&self, p: &Point) -> bool {
        let in_rect =
            p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max;
        match self.shape {
            RegionShape::Rectangle => in_rect,
            // One ulp of slack for points produced by sqrt/cos/sin.
            RegionShape::Disk => {
                in_rect && p.distance(&self.center()) <= self.disk_radius() * (1.0 + 1e-12)
            }
        }
    }

    /// Largest distance from the base station to any point of the region.
    pub fn max_bs_distance(&self) -> f64 {
        let bs = self.bs_position;
        match self.shape {
            RegionShape::Rectangle => [
                Point::new(self.x_min, self.y_min),
                Point::new(self.x_min, self.y_max),
                Point::new(self.x_max, self.y_min),
                Point::new(self.x_max, self.y_max),
            ]
            .iter()
            .map(|c| bs.distance(c))
            .fold(0.0, f64::max),
            RegionShape::Disk => bs.distance(&self.center()) + self.disk_radius(),
        }
    }

    fn sample_point<R: RngCore + ?Sized>(&self, rng: &mut R) -> Point {
        match self.shape {
            RegionShape::Rectangle => {
                let x = uniform(rng, self.x_min, self.x_max);
                let y = uniform(rng, self.y_min, self.y_max);
                Point::new(x, y)
            }
            RegionShape::Disk => {
                let c = self.center();
                let r = self.disk_radius() * uniform01(rng).sqrt();
                let theta = uniform(rng, -PI, PI);
                Point::new(c.x + r * theta.cos(), c.y + r * theta.sin())
            }
        }
    }

    fn sample_speed<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        uniform(rng, self.vt_min, self.vt_max)
    }

    pub fn rwp_pdf_params(&self) -> RwpPdfParams {
        RwpPdfParams::with_max_distance(self.max_bs_distance())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserKinematics {
    pub position: Point,
    pub waypoint: Point,
    pub speed: f64,
    /// Set when the last step ended on a waypoint.
    pub arrived: bool,
}

/// Draws position, first waypoint and first speed, in that order.
pub fn init_user<R: RngCore + ?Sized>(config: &MobilityConfig, rng: &mut R) -> UserKinematics {
    let position = config.sample_point(rng);
    let waypoint = config.sample_point(rng);
    let speed = config.sample_speed(rng);
    UserKinematics {
        position,
        waypoint,
        speed,
        arrived: false,
    }
}

pub fn step<R: RngCore + ?Sized>(
    user: &UserKinematics,
    config: &MobilityConfig,
    rng: &mut R,
) -> UserKinematics {
    let mut next = *user;
    if next.position == next.waypoint {
        next.waypoint = config.sample_point(rng);
        next.speed = config.sample_speed(rng);
    }
    let remaining = next.position.distance(&next.waypoint);
    if remaining <= next.speed {
        next.position = next.waypoint;
        next.waypoint = config.sample_point(rng);
        next.speed = config.sample_speed(rng);
        next.arrived = true;
    } else {
        let frac = next.speed / remaining;
        let p = next.position;
        let w = next.waypoint;
        let x = p.x + (w.x - p.x) * frac;
        let y = p.y + (w.y - p.y) * frac;
        next.position = Point::new(
            x.clamp(config.x_min, config.x_max),
            y.clamp(config.y_min, config.y_max),
        );
        next.arrived = false;
    }
    next
}

pub fn distance_to_bs(user: &UserKinematics, config: &MobilityConfig) -> f64 {
    user.position.distance(&config.bs_position)
}

/// Polynomial model of the stationary BS-to-user distance density,
/// `f(d) = sum_i B_i d^beta_i / D^(beta_i + 1)` on `[0, D]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RwpPdfParams {
    pub coefficients: Vec<f64>,
    pub exponents: Vec<i32>,
    pub max_distance: f64,
}

impl RwpPdfParams {
    /// The three-term two-dimensional model, `B = [324, -420, 96] / 73`,
    /// `beta = [1, 3, 5]`.
    pub fn with_max_distance(max_distance: f64) -> Self {
        RwpPdfParams {
            coefficients: vec![324.0 / 73.0, -420.0 / 73.0, 96.0 / 73.0],
            exponents: vec![1, 3, 5],
            max_distance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_distance > 0.0) || !self.max_distance.is_finite() {
            return Err(Error::config("maximum distance D must be positive"));
        }
        if self.coefficients.len() != self.exponents.len() || self.coefficients.is_empty() {
            return Err(Error::config("coefficient and exponent lists must match"));
        }
        Ok(())
    }

    /// `sum_i B_i / (beta_i + 1)`; equals one for a normalised density.
    pub fn total_mass(&self) -> f64 {
        self.terms().map(|(b, e)| b / (e + 1) as f64).sum()
    }

    fn terms(&self) -> impl Iterator<Item = (f64, i32)> + '_ {
        self.coefficients.iter().copied().zip(self.exponents.iter().copied())
    }

    fn check_domain(&self, d: f64) -> Result<()> {
        if d.is_nan() || d < 0.0 || d > self.max_distance {
            return Err(Error::domain(format!(
                "distance {d} outside [0, {}]",
                self.max_distance
            )));
        }
        Ok(())
    }
}

pub fn rwp_pdf(d: f64, params: &RwpPdfParams) -> Result<f64> {
    params.check_domain(d)?;
    let big_d = params.max_distance;
    let x = d / big_d;
    let density: f64 = params.terms().map(|(b, e)| b * x.powi(e)).sum::<f64>() / big_d;
    // Rounding can push the density a hair below zero right at d = D.
    Ok(density.max(0.0))
}

/// Closed-form integral of [`rwp_pdf`] from 0 to `d`.
pub fn rwp_cdf(d: f64, params: &RwpPdfParams) -> Result<f64> {
    params.check_domain(d)?;
    let x = d / params.max_distance;
    let mass: f64 = params
        .terms()
        .map(|(b, e)| b / (e + 1) as f64 * x.powi(e + 1))
        .sum();
    Ok(mass.clamp(0.0, 1.0))
}

/// Inverts [`rwp_cdf`] by bisection; `u` is clamped into [0, 1].
pub fn rwp_quantile(u: f64, params: &RwpPdfParams) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0, params.max_distance);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let below = rwp_cdf(mid, params).map(|c| c < u).unwrap_or(false);
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * params.max_distance {
            break;
        }
    }
    0.5 * (lo + hi)
}
