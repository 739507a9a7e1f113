//! Parameter sweeps, blocklength optimization, and the redundancy
//! crossover search that sit on top of the closed forms and the
//! simulator.

use crate::analytic::{
    self, avg_aoi_distributed_with, avg_aoi_joint_with, EvalOptions, Scenario, Scheme,
};
use crate::channel::{ChannelParams, PacketShape};
use crate::error::{Error, Result};
use crate::sim::{derive_seed, simulate_distributed, simulate_joint, SimSettings};

/// Which scenario knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptVariable {
    /// Coding rate in information bits per channel use.
    CodingRate,
    /// Sensor count (grid values must be positive integers).
    NumSensors,
    /// Redundancy removed by joint compression, in bits.
    Redundancy,
    /// Packet blocklength of each scheme's own packet; the coding rate
    /// is re-derived per scheme as `bits / blocklength`.
    Blocklength,
}

impl SweptVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweptVariable::CodingRate => "coding_rate",
            SweptVariable::NumSensors => "num_sensors",
            SweptVariable::Redundancy => "redundancy",
            SweptVariable::Blocklength => "blocklength",
        }
    }
}

impl std::fmt::Display for SweptVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which schemes a sweep emits rows for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSelection {
    Joint,
    Distributed,
    Both,
}

impl SchemeSelection {
    pub fn schemes(&self) -> &'static [Scheme] {
        match self {
            SchemeSelection::Joint => &[Scheme::Joint],
            SchemeSelection::Distributed => &[Scheme::Distributed],
            SchemeSelection::Both => &[Scheme::Joint, Scheme::Distributed],
        }
    }
}

/// One sweep: a base scenario, the knob to vary, the grid of values,
/// and whether to cross-check each point with the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub variable: SweptVariable,
    /// Grid values, strictly increasing.
    pub grid: Vec<f64>,
    pub schemes: SchemeSelection,
    /// Also simulate every bounded point.
    pub with_simulation: bool,
    /// Simulation settings; `forced_error_rate` (when set) pins the
    /// analytic column too, so the two columns describe the same
    /// system. Each row simulates under its own seed derived from
    /// `sim.seed` and the row index.
    pub sim: SimSettings,
}

/// One evaluated sweep point for one scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub swept_value: f64,
    pub scheme: Scheme,
    /// Blocklength of this scheme's packet (`M` joint, `M_h`
    /// distributed).
    pub blocklength: u32,
    pub error_rate: f64,
    /// Closed-form average age in slots; infinite when the point is
    /// unbounded.
    pub analytic_aoi_slots: f64,
    /// The error rate is so close to 1 that the stationary average
    /// diverges; such rows skip simulation.
    pub unbounded: bool,
    /// Blocklength below the threshold where the error-rate
    /// approximation is trustworthy.
    pub short_block: bool,
    pub sim_aoi_slots: Option<f64>,
    pub sim_ci95: Option<f64>,
    /// Per-row seed the simulation ran under.
    pub seed: Option<u64>,
}

fn integer_grid_value(variable: SweptVariable, value: f64, minimum: u32) -> Result<u32> {
    if !value.is_finite() || value.fract() != 0.0 || value < f64::from(minimum) {
        return Err(Error::invalid(
            "grid",
            format!("{variable} value {value} must be an integer >= {minimum}"),
        ));
    }
    if value > f64::from(u32::MAX) {
        return Err(Error::invalid(
            "grid",
            format!("{variable} value {value} exceeds u32::MAX"),
        ));
    }
    Ok(value as u32)
}

fn substitute(
    base: &Scenario,
    variable: SweptVariable,
    scheme: Scheme,
    value: f64,
) -> Result<Scenario> {
    match variable {
        SweptVariable::CodingRate => base.with_coding_rate(value),
        SweptVariable::NumSensors => {
            base.with_num_sensors(integer_grid_value(variable, value, 1)?)
        }
        SweptVariable::Redundancy => {
            base.with_redundancy(integer_grid_value(variable, value, 0)?)
        }
        SweptVariable::Blocklength => {
            let m = integer_grid_value(variable, value, 1)?;
            let bits = match scheme {
                Scheme::Joint => base.joint_bits(),
                Scheme::Distributed => base.per_sensor_bits(),
            };
            base.with_coding_rate(f64::from(bits) / f64::from(m))
        }
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "must contain at least one value"));
    }
    for window in grid.windows(2) {
        if !(window[1] > window[0]) {
            return Err(Error::invalid(
                "grid",
                format!(
                    "must be strictly increasing, got {} before {}",
                    window[0], window[1]
                ),
            ));
        }
    }
    if let Some(bad) = grid.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid("grid", format!("contains non-finite value {bad}")));
    }
    Ok(())
}

/// Evaluate the grid in order, emitting one row per (value, scheme)
/// pair with schemes in joint-then-distributed order. Points whose
/// average diverges come back flagged (`unbounded`, infinite analytic
/// age) instead of failing the sweep, so a sweep across a capacity
/// crossing stays one artifact.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    validate_grid(&spec.grid)?;
    spec.sim.validate()?;
    let opts = EvalOptions {
        error_rate_override: spec.sim.forced_error_rate,
        ..EvalOptions::default()
    };
    let mut rows = Vec::with_capacity(spec.grid.len() * spec.schemes.schemes().len());
    let mut row_index: u64 = 0;
    for &value in &spec.grid {
        for &scheme in spec.schemes.schemes() {
            let scenario = substitute(&spec.base, spec.variable, scheme, value)?;
            let evaluated = match scheme {
                Scheme::Joint => avg_aoi_joint_with(&scenario, &opts),
                Scheme::Distributed => avg_aoi_distributed_with(&scenario, &opts),
            };
            let mut row = match evaluated {
                Ok(r) => SweepRow {
                    swept_value: value,
                    scheme,
                    blocklength: r.blocklength,
                    error_rate: r.error_rate,
                    analytic_aoi_slots: r.avg_aoi_slots,
                    unbounded: false,
                    short_block: r.short_block,
                    sim_aoi_slots: None,
                    sim_ci95: None,
                    seed: None,
                },
                Err(Error::UnboundedAge { error_rate, .. }) => {
                    let shape = match scheme {
                        Scheme::Joint => scenario.joint_shape(),
                        Scheme::Distributed => scenario.sensor_shape(),
                    };
                    SweepRow {
                        swept_value: value,
                        scheme,
                        blocklength: shape.blocklength(),
                        error_rate,
                        analytic_aoi_slots: f64::INFINITY,
                        unbounded: true,
                        short_block: shape.is_short_block(),
                        sim_aoi_slots: None,
                        sim_ci95: None,
                        seed: None,
                    }
                }
                Err(other) => return Err(other),
            };
            if spec.with_simulation && !row.unbounded {
                let row_seed = derive_seed(spec.sim.seed, row_index);
                let settings = SimSettings {
                    seed: row_seed,
                    ..spec.sim
                };
                let sim = match scheme {
                    Scheme::Joint => simulate_joint(&scenario, &settings)?,
                    Scheme::Distributed => simulate_distributed(&scenario, &settings)?,
                };
                row.sim_aoi_slots = Some(sim.avg_aoi_slots);
                row.sim_ci95 = Some(sim.ci95_half_width);
                row.seed = Some(row_seed);
            }
            rows.push(row);
            row_index += 1;
        }
    }
    Ok(rows)
}

/// What the blocklength optimizer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeObjective {
    /// Joint average age for a packet of `update_bits` information
    /// bits, as a function of its blocklength `M`.
    Joint { update_bits: u32 },
    /// Distributed average age for `sensors` packets of
    /// `per_sensor_bits` each, as a function of the per-sensor
    /// blocklength `M_h`.
    Distributed { sensors: u32, per_sensor_bits: u32 },
}

/// One evaluated point of the optimizer's profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub blocklength: u32,
    pub error_rate: f64,
    /// Infinite when the point is unbounded.
    pub aoi_slots: f64,
}

/// Exhaustive-search result over an integer blocklength range.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub best_blocklength: u32,
    pub best_aoi_slots: f64,
    pub searched_range: (u32, u32),
    /// The minimum sits on an edge of the searched range, so the true
    /// optimum may lie outside it.
    pub at_boundary: bool,
    /// Every evaluated point, in blocklength order.
    pub profile: Vec<ProfilePoint>,
}

/// Largest blocklength the exhaustive search accepts.
pub const MAX_OPTIMIZE_BLOCKLENGTH: u32 = 1_000_000;

/// Exhaustive search under default evaluation options.
pub fn optimize_blocklength(
    objective: OptimizeObjective,
    channel: ChannelParams,
    range: (u32, u32),
) -> Result<Optimum> {
    optimize_blocklength_with(objective, channel, range, &EvalOptions::default())
}

/// Exhaustively evaluate every integer blocklength in `range`
/// (inclusive) and return the minimizer. Longer blocks protect better
/// but age faster, so the profile is single-dipped and an interior
/// minimum is meaningful; ties go to the smaller blocklength. With a
/// forced error rate the protection side goes flat and the minimum
/// lands on the range's lower end.
pub fn optimize_blocklength_with(
    objective: OptimizeObjective,
    channel: ChannelParams,
    range: (u32, u32),
    opts: &EvalOptions,
) -> Result<Optimum> {
    let (lo, hi) = range;
    if lo == 0 {
        return Err(Error::invalid("m_range", "lower end must be >= 1"));
    }
    if lo > hi {
        return Err(Error::invalid(
            "m_range",
            format!("lower end {lo} exceeds upper end {hi}"),
        ));
    }
    if hi > MAX_OPTIMIZE_BLOCKLENGTH {
        return Err(Error::invalid(
            "m_range",
            format!("upper end {hi} exceeds {MAX_OPTIMIZE_BLOCKLENGTH}"),
        ));
    }
    let mut profile = Vec::with_capacity((hi - lo + 1) as usize);
    let mut best: Option<(u32, f64)> = None;
    let mut least_error_rate = 1.0f64;
    for m in lo..=hi {
        let bits = match objective {
            OptimizeObjective::Joint { update_bits } => update_bits,
            OptimizeObjective::Distributed { per_sensor_bits, .. } => per_sensor_bits,
        };
        let shape = PacketShape::new(bits, m)?;
        let (eps, aoi) = match analytic::resolve_error_rate(shape, channel, opts) {
            Ok(eps) => {
                let aoi = match objective {
                    OptimizeObjective::Joint { .. } => analytic::joint_average_at(eps, m),
                    OptimizeObjective::Distributed { sensors, .. } => {
                        analytic::distributed_average_at(sensors, eps, m)?
                    }
                };
                (eps, aoi)
            }
            Err(Error::UnboundedAge { error_rate, .. }) => (error_rate, f64::INFINITY),
            Err(other) => return Err(other),
        };
        least_error_rate = least_error_rate.min(eps);
        profile.push(ProfilePoint {
            blocklength: m,
            error_rate: eps,
            aoi_slots: aoi,
        });
        if aoi.is_finite() && best.map_or(true, |(_, b)| aoi < b) {
            best = Some((m, aoi));
        }
    }
    let (best_blocklength, best_aoi_slots) = best.ok_or(Error::UnboundedAge {
        error_rate: least_error_rate,
        floor: opts.unbounded_floor,
    })?;
    Ok(Optimum {
        best_blocklength,
        best_aoi_slots,
        searched_range: range,
        at_boundary: best_blocklength == lo || best_blocklength == hi,
        profile,
    })
}

/// Crossover search under default evaluation options.
pub fn locate_crossover(base: &Scenario, alpha_range: (u32, u32)) -> Result<f64> {
    locate_crossover_with(base, alpha_range, &EvalOptions::default())
}

/// Bisect the integer redundancy range for the point where the exact
/// joint average crosses the exact distributed average (which does not
/// depend on the redundancy). Returns the half-integer midpoint
/// between the last redundancy favoring one scheme and the first
/// favoring the other.
pub fn locate_crossover_with(
    base: &Scenario,
    alpha_range: (u32, u32),
    opts: &EvalOptions,
) -> Result<f64> {
    let (mut lo, mut hi) = alpha_range;
    if lo > hi {
        return Err(Error::invalid(
            "alpha_range",
            format!("lower end {lo} exceeds upper end {hi}"),
        ));
    }
    let distributed = avg_aoi_distributed_with(base, opts)?.avg_aoi_slots;
    // Joint average as a function of redundancy; an unbounded joint
    // point counts as infinitely worse, not as an error.
    let joint_at = |alpha: u32| -> Result<f64> {
        match avg_aoi_joint_with(&base.with_redundancy(alpha)?, opts) {
            Ok(r) => Ok(r.avg_aoi_slots),
            Err(Error::UnboundedAge { .. }) => Ok(f64::INFINITY),
            Err(other) => Err(other),
        }
    };
    // Side: true while distributed is strictly better.
    let side = |alpha: u32| -> Result<bool> { Ok(joint_at(alpha)? > distributed) };
    let lo_side = side(lo)?;
    if side(hi)? == lo_side {
        return Err(Error::NoCrossover { lo, hi });
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if side(mid)? == lo_side {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(f64::from(lo) + 0.5)
}
