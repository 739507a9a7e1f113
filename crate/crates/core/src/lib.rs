//! Average age of information (AoI) for a short-packet status-update
//! system where `N` sensors share one point-to-point channel.
//!
//! Two transmission schemes are compared. *Joint* encoding compresses
//! all sensor readings into one packet and sends it every frame.
//! *Distributed* encoding gives each sensor its own packet inside a
//! round-robin frame. Joint coding spends fewer channel uses per frame
//! (compression removes `alpha` redundant bits) but a frame loss stales
//! every sensor at once; distributed coding decouples the sensors at
//! the price of longer frames.
//!
//! The crate offers three views of the same system:
//!
//! * [`analytic`]: closed-form stationary average age for both schemes,
//!   plus the redundancy threshold where the preferred scheme flips.
//! * [`sim`]: a seeded slot-level Monte Carlo simulator used to
//!   cross-check every closed form.
//! * [`study`]: sweeps, blocklength optimization, and crossover search
//!   built on top of the other two.
//!
//! Ages are measured in slots (channel uses); multiply by
//! [`ChannelParams::slot_duration`] for seconds.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod sim;
pub mod study;

pub use analytic::{
    alpha_threshold, alpha_threshold_with, aoi_difference_approx, aoi_difference_approx_with,
    avg_aoi_distributed, avg_aoi_distributed_with, avg_aoi_joint, avg_aoi_joint_with,
    AnalyticResult, EvalOptions, Preference, Scenario, Scheme, ThresholdResult,
    APPROX_REGIME_MAX_ERROR_RATE,
};
pub use channel::{block_error_rate, q_function, ChannelParams, PacketShape, SHORT_BLOCK_LIMIT};
pub use error::{Error, Result};
pub use sim::{
    derive_seed, empirical_fmax_pmf, simulate_distributed, simulate_joint, FmaxHistogram,
    SimResult, SimSettings,
};
pub use study::{
    locate_crossover, locate_crossover_with, optimize_blocklength, optimize_blocklength_with,
    run_sweep, OptimizeObjective, Optimum, ProfilePoint, SchemeSelection, SweepRow, SweepSpec,
    SweptVariable, MAX_OPTIMIZE_BLOCKLENGTH,
};
