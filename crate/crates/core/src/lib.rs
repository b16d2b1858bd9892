//! Link-level simulation of a two-user downlink NOMA pair whose users move
//! under the random waypoint model.
//!
//! Each time step moves both users, draws a Rayleigh block-fading channel per
//! link, lets a scheduler pick the near/far roles and the power split, and
//! evaluates the resulting rates. Four schemes are available:
//!
//! * `oma` - half the orthogonal resource per user at full power,
//! * `noma-fixed` - fixed power split, roles frozen at the start of the run,
//! * `fps-noma` - fixed power split, roles follow the channel-gain ordering,
//! * `oprs-noma` - roles follow the gain ordering and the split is chosen by
//!   bisection against the far user's target rate.
//!
//! Every run is a pure function of its [`ScenarioConfig`] and seed.

pub mod capacity;
pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod ks;
pub mod mobility;
pub mod power;
pub mod records;
pub mod rng;
pub mod scheduler;

pub use capacity::{oma_rates, pair_sum_capacity, rate_far, rate_near, PowerAllocation, RatePair};
pub use channel::{draw_channel, effective_snr, ChannelConfig, ChannelState};
pub use config::{parse_config, ScenarioConfig, OVERRIDE_KEYS};
pub use error::{Error, Result};
pub use harness::{run, run_matrix, RunOutput, RunSummary, StepRecord};
pub use ks::{pdf_check, KsReport};
pub use mobility::{
    distance_to_bs, init_user, rwp_cdf, rwp_pdf, step, MobilityConfig, Point, RegionShape,
    RwpPdfParams, UserKinematics,
};
pub use power::{brute_force_pa, bspo, rho1_upper_bound, BspoConfig};
pub use records::{read_records, write_records, CSV_HEADER};
pub use scheduler::{
    detect_switch_positions, fixed_power_decide, oma_decide, oprs_decide, Branch, Decision,
    PairGains, RoleAssignment, Scheme, SchedulerConfig,
};
