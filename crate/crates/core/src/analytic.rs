//! Closed-form stationary average age for both schemes.
//!
//! All ages are in slots. With blocklength `M` (joint) or `M_h` (one
//! sensor's packet, distributed), block error rate `eps`, and `N`
//! sensors:
//!
//! ```text
//! joint:        avg = M / (1 - eps) + (M - 1) / 2
//! distributed:  avg = sigma * N * M_h + beta * M_h + (M_h - 1) / 2
//! ```
//!
//! `sigma` is the mean of the maximum of `N` iid geometric failure
//! counts (the number of whole superframes the stalest sensor has been
//! waiting) and `beta` is the mean in-superframe offset of that stalest
//! sensor. Both have closed forms as alternating binomial sums and
//! independent series representations; [`sigma_series`] and
//! [`beta_series`] exist so the two routes can be checked against each
//! other, and the closed forms fall back to the series automatically
//! when cancellation eats their precision.
//!
//! The scheme advisor compares the two averages through a first-order
//! expansion in the redundancy `alpha` and reports the break-even
//! redundancy
//!
//! ```text
//! alpha_0 = ((3 - 2 sigma) N - 2 beta - 1) * L_h / 3
//! ```
//!
//! valid while the per-sensor block error rate stays small (the
//! expansion drops eps-squared terms); results carry a flag once
//! `eps` exceeds [`APPROX_REGIME_MAX_ERROR_RATE`].

use crate::channel::{block_error_rate, ChannelParams, PacketShape};
use crate::error::{Error, Result};

/// Which transmission scheme a result refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// All sensors compressed into one packet per frame.
    Joint,
    /// One packet per sensor, sent round-robin.
    Distributed,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Joint => "joint",
            Scheme::Distributed => "distributed",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully specified system: sensor population, update sizes, the
/// compression gain of joint encoding, the coding rate, and the channel.
///
/// Derived quantities (packet shapes, blocklengths, error rates) are
/// validated at construction, so accessors cannot fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    num_sensors: u32,
    per_sensor_bits: u32,
    redundancy_bits: u32,
    coding_rate: f64,
    channel: ChannelParams,
}

impl Scenario {
    /// `num_sensors >= 1` sensors, `per_sensor_bits >= 1` bits each,
    /// `redundancy_bits` removed by joint compression (strictly less
    /// than the total bits), `coding_rate > 0` information bits per
    /// channel use.
    pub fn new(
        num_sensors: u32,
        per_sensor_bits: u32,
        redundancy_bits: u32,
        coding_rate: f64,
        channel: ChannelParams,
    ) -> Result<Self> {
        if num_sensors == 0 {
            return Err(Error::invalid("sensors", "must be >= 1"));
        }
        if per_sensor_bits == 0 {
            return Err(Error::invalid("bits_per_sensor", "must be >= 1"));
        }
        if !coding_rate.is_finite() || coding_rate <= 0.0 {
            return Err(Error::invalid(
                "rate",
                format!("must be a finite value > 0, got {coding_rate}"),
            ));
        }
        let total_bits = u64::from(num_sensors) * u64::from(per_sensor_bits);
        if u64::from(redundancy_bits) >= total_bits {
            return Err(Error::invalid(
                "alpha",
                format!(
                    "must leave at least one joint information bit: \
                     sensors * bits_per_sensor - alpha = {total_bits} - {redundancy_bits}"
                ),
            ));
        }
        if total_bits - u64::from(redundancy_bits) > u64::from(u32::MAX) {
            return Err(Error::invalid(
                "bits_per_sensor",
                "sensors * bits_per_sensor - alpha exceeds u32::MAX",
            ));
        }
        let scenario = Self {
            num_sensors,
            per_sensor_bits,
            redundancy_bits,
            coding_rate,
            channel,
        };
        for bits in [scenario.joint_bits(), per_sensor_bits] {
            let blocks = (f64::from(bits) / coding_rate).round();
            if blocks > f64::from(u32::MAX) {
                return Err(Error::invalid(
                    "rate",
                    format!("derived blocklength {blocks} for {bits} bits exceeds u32::MAX"),
                ));
            }
        }
        Ok(scenario)
    }

    pub fn num_sensors(&self) -> u32 {
        self.num_sensors
    }

    pub fn per_sensor_bits(&self) -> u32 {
        self.per_sensor_bits
    }

    pub fn redundancy_bits(&self) -> u32 {
        self.redundancy_bits
    }

    pub fn coding_rate(&self) -> f64 {
        self.coding_rate
    }

    pub fn channel(&self) -> ChannelParams {
        self.channel
    }

    /// Information bits in one joint packet:
    /// `sensors * bits_per_sensor - alpha`.
    pub fn joint_bits(&self) -> u32 {
        (u64::from(self.num_sensors) * u64::from(self.per_sensor_bits)
            - u64::from(self.redundancy_bits)) as u32
    }

    /// Joint blocklength `M = round(L / rate)`, at least 1. Rounding is
    /// half away from zero.
    pub fn joint_blocklength(&self) -> u32 {
        derived_blocklength(self.joint_bits(), self.coding_rate)
    }

    /// Per-sensor blocklength `M_h = round(L_h / rate)`, at least 1.
    pub fn sensor_blocklength(&self) -> u32 {
        derived_blocklength(self.per_sensor_bits, self.coding_rate)
    }

    pub fn joint_shape(&self) -> PacketShape {
        PacketShape::new(self.joint_bits(), self.joint_blocklength())
            .expect("validated at construction")
    }

    pub fn sensor_shape(&self) -> PacketShape {
        PacketShape::new(self.per_sensor_bits, self.sensor_blocklength())
            .expect("validated at construction")
    }

    /// Block error rate of the joint packet.
    pub fn joint_error_rate(&self) -> f64 {
        block_error_rate(self.joint_shape(), self.channel)
    }

    /// Block error rate of one sensor's packet.
    pub fn distributed_error_rate(&self) -> f64 {
        block_error_rate(self.sensor_shape(), self.channel)
    }

    pub fn with_num_sensors(&self, num_sensors: u32) -> Result<Self> {
        Self::new(
            num_sensors,
            self.per_sensor_bits,
            self.redundancy_bits,
            self.coding_rate,
            self.channel,
        )
    }

    pub fn with_redundancy(&self, redundancy_bits: u32) -> Result<Self> {
        Self::new(
            self.num_sensors,
            self.per_sensor_bits,
            redundancy_bits,
            self.coding_rate,
            self.channel,
        )
    }

    pub fn with_coding_rate(&self, coding_rate: f64) -> Result<Self> {
        Self::new(
            self.num_sensors,
            self.per_sensor_bits,
            self.redundancy_bits,
            coding_rate,
            self.channel,
        )
    }
}

fn derived_blocklength(bits: u32, rate: f64) -> u32 {
    // Half-away-from-zero rounding; a packet needs at least one use.
    (f64::from(bits) / rate).round().max(1.0) as u32
}

/// Knobs shared by every analytic evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    /// Replace the channel-derived block error rate with this value
    /// (must lie in [0, 1]). Used to pin the error rate in diagnostics
    /// and cross-checks against the simulator.
    pub error_rate_override: Option<f64>,
    /// Success probabilities `1 - eps` below this are treated as zero:
    /// the stationary average age diverges and the evaluator reports
    /// [`Error::UnboundedAge`] instead of a meaningless huge number.
    pub unbounded_floor: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            error_rate_override: None,
            unbounded_floor: 1e-12,
        }
    }
}

impl EvalOptions {
    /// Options that force the block error rate to `error_rate`.
    pub fn forced(error_rate: f64) -> Self {
        Self {
            error_rate_override: Some(error_rate),
            ..Self::default()
        }
    }
}

/// Stationary average age of one scheme, with the pieces it was built
/// from.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticResult {
    pub scheme: Scheme,
    /// Time-average age in slots.
    pub avg_aoi_slots: f64,
    /// Block error rate the average was evaluated at.
    pub error_rate: f64,
    /// Mean age measured at frame (joint) or superframe (distributed)
    /// boundaries; the average equals this plus `(blocklength - 1) / 2`.
    pub boundary_aoi: f64,
    /// Blocklength of the repeating unit: `M` for joint, `M_h` for
    /// distributed.
    pub blocklength: u32,
    /// True when the blocklength is short enough that the underlying
    /// error-rate approximation is unreliable.
    pub short_block: bool,
    /// Mean superframe backlog of the stalest sensor (distributed only).
    pub sigma: Option<f64>,
    /// Mean in-superframe offset of the stalest sensor (distributed only).
    pub beta: Option<f64>,
}

pub(crate) fn resolve_error_rate(
    shape: PacketShape,
    channel: ChannelParams,
    opts: &EvalOptions,
) -> Result<f64> {
    if !opts.unbounded_floor.is_finite() || opts.unbounded_floor <= 0.0 {
        return Err(Error::invalid(
            "unbounded_floor",
            format!("must be a finite value > 0, got {}", opts.unbounded_floor),
        ));
    }
    let eps = match opts.error_rate_override {
        Some(forced) => {
            if !forced.is_finite() || !(0.0..=1.0).contains(&forced) {
                return Err(Error::invalid(
                    "forced_error_rate",
                    format!("must lie in [0, 1], got {forced}"),
                ));
            }
            forced
        }
        None => block_error_rate(shape, channel),
    };
    if 1.0 - eps < opts.unbounded_floor {
        return Err(Error::UnboundedAge {
            error_rate: eps,
            floor: opts.unbounded_floor,
        });
    }
    Ok(eps)
}

/// Average age of the joint scheme under default options.
pub fn avg_aoi_joint(scenario: &Scenario) -> Result<AnalyticResult> {
    avg_aoi_joint_with(scenario, &EvalOptions::default())
}

/// Average age of the joint scheme: `M / (1 - eps) + (M - 1) / 2`.
pub fn avg_aoi_joint_with(scenario: &Scenario, opts: &EvalOptions) -> Result<AnalyticResult> {
    let shape = scenario.joint_shape();
    let eps = resolve_error_rate(shape, scenario.channel, opts)?;
    let m = f64::from(shape.blocklength());
    let boundary = m / (1.0 - eps);
    Ok(AnalyticResult {
        scheme: Scheme::Joint,
        avg_aoi_slots: boundary + (m - 1.0) / 2.0,
        error_rate: eps,
        boundary_aoi: boundary,
        blocklength: shape.blocklength(),
        short_block: shape.is_short_block(),
        sigma: None,
        beta: None,
    })
}

/// Average age of the distributed scheme under default options.
pub fn avg_aoi_distributed(scenario: &Scenario) -> Result<AnalyticResult> {
    avg_aoi_distributed_with(scenario, &EvalOptions::default())
}

/// Average age of the distributed scheme:
/// `sigma * N * M_h + beta * M_h + (M_h - 1) / 2`.
pub fn avg_aoi_distributed_with(
    scenario: &Scenario,
    opts: &EvalOptions,
) -> Result<AnalyticResult> {
    let shape = scenario.sensor_shape();
    let eps = resolve_error_rate(shape, scenario.channel, opts)?;
    let sigma = sigma_closed_form(scenario.num_sensors, eps)?;
    let beta = beta_closed_form(scenario.num_sensors, eps)?;
    let mh = f64::from(shape.blocklength());
    let n = f64::from(scenario.num_sensors);
    let boundary = sigma * n * mh + beta * mh;
    Ok(AnalyticResult {
        scheme: Scheme::Distributed,
        avg_aoi_slots: boundary + (mh - 1.0) / 2.0,
        error_rate: eps,
        boundary_aoi: boundary,
        blocklength: shape.blocklength(),
        short_block: shape.is_short_block(),
        sigma: Some(sigma),
        beta: Some(beta),
    })
}

/// Tolerance the closed forms hand to the series when they fall back.
const SERIES_TOL: f64 = 1e-12;
/// Closed-form sums whose largest term exceeds the result by this
/// factor have lost too many digits to cancellation.
const CANCELLATION_LIMIT: f64 = 1e6;
/// Hard cap on series terms; past this the error rate is so close to 1
/// that the series is the wrong tool as well.
const SERIES_MAX_TERMS: u64 = 20_000_000;

fn validate_sensor_count(sensors: u32) -> Result<()> {
    if sensors == 0 {
        return Err(Error::invalid("sensors", "must be >= 1"));
    }
    Ok(())
}

fn validate_error_rate_below_one(error_rate: f64) -> Result<()> {
    if !error_rate.is_finite() || !(0.0..1.0).contains(&error_rate) {
        return Err(Error::invalid(
            "error_rate",
            format!("must lie in [0, 1), got {error_rate}"),
        ));
    }
    Ok(())
}

fn validate_tolerance(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid(
            "tolerance",
            format!("must be a finite value > 0, got {tol}"),
        ));
    }
    Ok(())
}

fn needs_series_fallback(sum: f64, max_term: f64) -> bool {
    !sum.is_finite() || max_term > CANCELLATION_LIMIT * sum.abs()
}

/// Mean superframe backlog of the stalest sensor: the expected maximum
/// of `sensors` iid geometric failure counts with success probability
/// `1 - error_rate`, evaluated as the alternating binomial sum
///
/// ```text
/// sigma = sum_{k=1..N} C(N, k) (-1)^(k+1) eps^k / (1 - eps^k)
/// ```
///
/// Falls back to [`sigma_series`] when cancellation in the alternating
/// sum costs more than six digits.
pub fn sigma_closed_form(sensors: u32, error_rate: f64) -> Result<f64> {
    validate_sensor_count(sensors)?;
    validate_error_rate_below_one(error_rate)?;
    let mut sum = 0.0f64;
    let mut max_term = 0.0f64;
    let mut binom = 1.0f64;
    for k in 1..=sensors {
        binom *= f64::from(sensors - k + 1) / f64::from(k);
        let eps_k = error_rate.powi(k as i32);
        let term = binom * eps_k / (1.0 - eps_k);
        sum += if k % 2 == 1 { term } else { -term };
        max_term = max_term.max(term);
    }
    if needs_series_fallback(sum, max_term) {
        return sigma_series(sensors, error_rate, SERIES_TOL);
    }
    Ok(sum)
}

/// Same quantity as [`sigma_closed_form`] by direct tail summation,
/// `sigma = sum_{f>=1} (1 - (1 - eps^f)^N)`, truncated once the
/// remaining tail is provably below `tol`.
pub fn sigma_series(sensors: u32, error_rate: f64, tol: f64) -> Result<f64> {
    validate_sensor_count(sensors)?;
    validate_error_rate_below_one(error_rate)?;
    validate_tolerance(tol)?;
    if error_rate == 0.0 {
        return Ok(0.0);
    }
    let n = f64::from(sensors);
    // Tail from f onward is bounded by N * eps^f / (1 - eps).
    let tail_scale = n / (1.0 - error_rate);
    let mut sum = 0.0f64;
    let mut eps_f = error_rate;
    let mut terms = 0u64;
    while tail_scale * eps_f >= tol {
        if terms == SERIES_MAX_TERMS {
            return Err(Error::invalid(
                "error_rate",
                format!(
                    "sigma series needs more than {SERIES_MAX_TERMS} terms at tolerance {tol}; \
                     {error_rate} is too close to 1"
                ),
            ));
        }
        // 1 - (1 - x)^n, evaluated without forming 1 - x.
        sum -= f64::exp_m1(n * f64::ln_1p(-eps_f));
        eps_f *= error_rate;
        terms += 1;
    }
    Ok(sum)
}

/// Mean in-superframe offset `E[N - n* + 1]` of the stalest sensor
/// `n*` (smallest index attaining the maximal failure count), as the
/// closed alternating sum
///
/// ```text
/// beta = (1 - eps) * sum_{n=1..N} (N - n + 1)
///        * sum_{n1=0..n-1} sum_{n2=0..N-n} C(n-1, n1) C(N-n, n2)
///          (-1)^(n1 + n2) eps^n2 / (1 - eps^(n1 + n2 + 1))
/// ```
///
/// Falls back to [`beta_series`] on heavy cancellation. Always lies in
/// `[1, N]`.
pub fn beta_closed_form(sensors: u32, error_rate: f64) -> Result<f64> {
    validate_sensor_count(sensors)?;
    validate_error_rate_below_one(error_rate)?;
    let mut sum = 0.0f64;
    let mut max_term = 0.0f64;
    for n in 1..=sensors {
        let weight = f64::from(sensors - n + 1);
        let mut binom1 = 1.0f64;
        for n1 in 0..n {
            if n1 > 0 {
                binom1 *= f64::from(n - n1) / f64::from(n1);
            }
            let mut binom2 = 1.0f64;
            for n2 in 0..=(sensors - n) {
                if n2 > 0 {
                    binom2 *= f64::from(sensors - n - n2 + 1) / f64::from(n2);
                }
                let power = n1 + n2 + 1;
                let term = weight * binom1 * binom2 * error_rate.powi(n2 as i32)
                    / (1.0 - error_rate.powi(power as i32));
                sum += if (n1 + n2) % 2 == 0 { term } else { -term };
                max_term = max_term.max(term);
            }
        }
    }
    sum *= 1.0 - error_rate;
    if needs_series_fallback(sum, max_term) {
        return Ok(beta_series(sensors, error_rate, SERIES_TOL)?.beta);
    }
    Ok(sum)
}

/// [`beta_series`] output: the mean offset together with the
/// distribution it was integrated over.
#[derive(Debug, Clone, PartialEq)]
pub struct StalestSensorLaw {
    /// `E[N - n* + 1]`.
    pub beta: f64,
    /// `law[i]` is the probability that sensor `i + 1` is the stalest.
    pub stalest_pmf: Vec<f64>,
}

/// Same quantity as [`beta_closed_form`] by summing the law of the
/// stalest sensor over failure counts `f = 0, 1, 2, ...`:
///
/// ```text
/// P(n* = n) = sum_f (1 - eps) eps^f (1 - eps^f)^(n-1) (1 - eps^(f+1))^(N-n)
/// ```
pub fn beta_series(sensors: u32, error_rate: f64, tol: f64) -> Result<StalestSensorLaw> {
    validate_sensor_count(sensors)?;
    validate_error_rate_below_one(error_rate)?;
    validate_tolerance(tol)?;
    let n_total = sensors as usize;
    let mut pmf = vec![0.0f64; n_total];
    if error_rate == 0.0 {
        // Every sensor fresh: sensor 1 (served longest ago within the
        // superframe) is always the stalest.
        pmf[0] = 1.0;
        return Ok(StalestSensorLaw {
            beta: f64::from(sensors),
            stalest_pmf: pmf,
        });
    }
    let n = f64::from(sensors);
    // Everything left from f onward has mass at most eps^f, each unit
    // of which contributes at most weight N.
    let mut eps_f = 1.0f64;
    let mut terms = 0u64;
    while n * eps_f >= tol {
        if terms == SERIES_MAX_TERMS {
            return Err(Error::invalid(
                "error_rate",
                format!(
                    "beta series needs more than {SERIES_MAX_TERMS} terms at tolerance {tol}; \
                     {error_rate} is too close to 1"
                ),
            ));
        }
        let p_lt = 1.0 - eps_f; // P(failure count < f)
        let p_le = 1.0 - eps_f * error_rate; // P(failure count <= f)
        let base = (1.0 - error_rate) * eps_f;
        for (i, slot) in pmf.iter_mut().enumerate() {
            let below_pow = p_lt.powi(i as i32);
            let above_pow = p_le.powi((n_total - 1 - i) as i32);
            *slot += base * below_pow * above_pow;
        }
        eps_f *= error_rate;
        terms += 1;
    }
    let beta = pmf
        .iter()
        .enumerate()
        .map(|(i, p)| f64::from(sensors - i as u32) * p)
        .sum();
    Ok(StalestSensorLaw {
        beta,
        stalest_pmf: pmf,
    })
}

/// Probability that the maximal failure count of `sensors` iid
/// geometric counts equals `failures`:
/// `(1 - eps^(f+1))^N - (1 - eps^f)^N`.
pub fn fmax_pmf(sensors: u32, error_rate: f64, failures: u64) -> Result<f64> {
    validate_sensor_count(sensors)?;
    validate_error_rate_below_one(error_rate)?;
    if error_rate == 0.0 {
        return Ok(if failures == 0 { 1.0 } else { 0.0 });
    }
    let n = f64::from(sensors);
    // P(max < f) = (1 - eps^f)^N; at f = 0 the log is -inf and the
    // exponential correctly lands on 0.
    let cdf_below = |f: u64| -> f64 {
        let exp = i32::try_from(f).unwrap_or(i32::MAX);
        (n * f64::ln_1p(-error_rate.powi(exp))).exp()
    };
    Ok(cdf_below(failures + 1) - cdf_below(failures))
}

/// Joint average at a pinned error rate and blocklength; the caller
/// has already ruled out eps = 1.
pub(crate) fn joint_average_at(error_rate: f64, blocklength: u32) -> f64 {
    let m = f64::from(blocklength);
    m / (1.0 - error_rate) + (m - 1.0) / 2.0
}

/// Distributed average at a pinned error rate and per-sensor
/// blocklength.
pub(crate) fn distributed_average_at(
    sensors: u32,
    error_rate: f64,
    sensor_blocklength: u32,
) -> Result<f64> {
    let sigma = sigma_closed_form(sensors, error_rate)?;
    let beta = beta_closed_form(sensors, error_rate)?;
    let mh = f64::from(sensor_blocklength);
    Ok(sigma * f64::from(sensors) * mh + beta * mh + (mh - 1.0) / 2.0)
}

/// Per-sensor error rates above this sit outside the regime the
/// first-order scheme comparison was derived for.
pub const APPROX_REGIME_MAX_ERROR_RATE: f64 = 0.05;

/// First-order estimate of `avg_joint - avg_distributed` in slots,
/// built on the per-sensor error rate (the joint packet's rate enters
/// only at higher order):
///
/// ```text
/// diff ~ ( (3/2) (N - alpha / L_h) - (N sigma + 1/2 + beta) ) * M_h
/// ```
///
/// Negative values favor joint encoding.
pub fn aoi_difference_approx(scenario: &Scenario) -> Result<f64> {
    aoi_difference_approx_with(scenario, &EvalOptions::default())
}

pub fn aoi_difference_approx_with(scenario: &Scenario, opts: &EvalOptions) -> Result<f64> {
    let shape = scenario.sensor_shape();
    let eps = resolve_error_rate(shape, scenario.channel, opts)?;
    let sigma = sigma_closed_form(scenario.num_sensors, eps)?;
    let beta = beta_closed_form(scenario.num_sensors, eps)?;
    let n = f64::from(scenario.num_sensors);
    let alpha_ratio =
        f64::from(scenario.redundancy_bits) / f64::from(scenario.per_sensor_bits);
    let mh = f64::from(shape.blocklength());
    Ok((1.5 * (n - alpha_ratio) - (n * sigma + 0.5 + beta)) * mh)
}

/// Which scheme the advisor recommends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Joint,
    Distributed,
    /// The first-order difference is exactly zero.
    Tie,
}

impl Preference {
    pub fn as_str(&self) -> &'static str {
        match self {
            Preference::Joint => "joint",
            Preference::Distributed => "distributed",
            Preference::Tie => "tie",
        }
    }
}

/// Advisor output: the break-even redundancy and the verdict at the
/// scenario's own redundancy.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Redundancy (in bits, not necessarily an integer) at which the
    /// first-order age difference changes sign. Joint encoding wins
    /// once `alpha` exceeds this.
    pub alpha_0: f64,
    /// First-order `avg_joint - avg_distributed` at the scenario's
    /// redundancy.
    pub aoi_diff: f64,
    /// Scheme with the lower first-order age at the scenario's
    /// redundancy: joint when `aoi_diff < 0`, distributed when
    /// `aoi_diff > 0`.
    pub preferred: Preference,
    /// Per-sensor block error rate the comparison was evaluated at.
    pub error_rate: f64,
}

impl ThresholdResult {
    /// True when the error rate is too large for the first-order
    /// comparison to be trusted.
    pub fn outside_approx_regime(&self) -> bool {
        self.error_rate > APPROX_REGIME_MAX_ERROR_RATE
    }
}

/// Break-even redundancy `alpha_0 = ((3 - 2 sigma) N - 2 beta - 1) * L_h / 3`
/// plus the advisor verdict for the scenario as given.
pub fn alpha_threshold(scenario: &Scenario) -> Result<ThresholdResult> {
    alpha_threshold_with(scenario, &EvalOptions::default())
}

pub fn alpha_threshold_with(scenario: &Scenario, opts: &EvalOptions) -> Result<ThresholdResult> {
    let shape = scenario.sensor_shape();
    let eps = resolve_error_rate(shape, scenario.channel, opts)?;
    let sigma = sigma_closed_form(scenario.num_sensors, eps)?;
    let beta = beta_closed_form(scenario.num_sensors, eps)?;
    let n = f64::from(scenario.num_sensors);
    let lh = f64::from(scenario.per_sensor_bits);
    let alpha_0 = ((3.0 - 2.0 * sigma) * n - 2.0 * beta - 1.0) * lh / 3.0;
    let aoi_diff = aoi_difference_approx_with(scenario, opts)?;
    let preferred = if aoi_diff < 0.0 {
        Preference::Joint
    } else if aoi_diff > 0.0 {
        Preference::Distributed
    } else {
        Preference::Tie
    };
    Ok(ThresholdResult {
        alpha_0,
        aoi_diff,
        preferred,
        error_rate: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use approx::assert_abs_diff_eq;

    fn channel3() -> ChannelParams {
        ChannelParams::new(3.0).unwrap()
    }

    /// N = 4 sensors, 120 bits each, rate 0.8: the workhorse scenario.
    fn base_scenario() -> Scenario {
        Scenario::new(4, 120, 0, 0.8, channel3()).unwrap()
    }

    #[test]
    fn blocklength_derivation_rounds_half_away_and_clamps() {
        let sc = base_scenario();
        assert_eq!(sc.joint_bits(), 480);
        assert_eq!(sc.joint_blocklength(), 600);
        assert_eq!(sc.sensor_blocklength(), 150);
        // 120 / 0.48 = 250.0; 121 / 0.94 = 128.72 -> 129; half cases
        // round away from zero: 15 / 0.4 = 37.5 -> 38.
        let sc = Scenario::new(1, 15, 0, 0.4, channel3()).unwrap();
        assert_eq!(sc.joint_blocklength(), 38);
        // Rate far above the bit count still yields a 1-slot packet.
        let sc = Scenario::new(1, 2, 0, 100.0, channel3()).unwrap();
        assert_eq!(sc.joint_blocklength(), 1);
    }

    #[test]
    fn scenario_validation_names_the_offending_key() {
        let ch = channel3();
        for (result, key) in [
            (Scenario::new(0, 120, 0, 0.8, ch), "sensors"),
            (Scenario::new(4, 0, 0, 0.8, ch), "bits_per_sensor"),
            (Scenario::new(4, 120, 480, 0.8, ch), "alpha"),
            (Scenario::new(4, 120, 0, 0.0, ch), "rate"),
            (Scenario::new(4, 120, 0, -0.8, ch), "rate"),
        ] {
            let err = result.unwrap_err().to_string();
            assert!(err.contains(key), "{err} should mention {key}");
        }
        // alpha = N * L_h - 1 is the largest valid redundancy.
        assert!(Scenario::new(4, 120, 479, 0.8, ch).is_ok());
    }

    #[test]
    fn sigma_and_beta_match_reference_values() {
        // Fifty-digit reference evaluations of the two closed forms.
        let cases = [
            (5u32, 0.3, 1.39294363610667132, 3.60542225918664885),
            (4, 0.7, 5.34094488520178995, 2.6484865528449129),
            (10, 0.9, 27.2994867022164946, 5.59656260865447168),
        ];
        for (n, eps, sigma, beta) in cases {
            assert_abs_diff_eq!(sigma_closed_form(n, eps).unwrap(), sigma, epsilon = 1e-12);
            assert_abs_diff_eq!(beta_closed_form(n, eps).unwrap(), beta, epsilon = 1e-12);
        }
    }

    #[test]
    fn sigma_and_beta_two_sensor_half_rate_are_five_thirds() {
        let sigma = sigma_closed_form(2, 0.5).unwrap();
        let beta = beta_closed_form(2, 0.5).unwrap();
        assert_abs_diff_eq!(sigma, 5.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(beta, 5.0 / 3.0, epsilon = 1e-12);
        // The stalest-sensor law behind beta: (2/3, 1/3).
        let law = beta_series(2, 0.5, 1e-14).unwrap();
        assert_abs_diff_eq!(law.stalest_pmf[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(law.stalest_pmf[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn error_free_limits_are_exact() {
        for n in 1..=10u32 {
            assert_eq!(sigma_closed_form(n, 0.0).unwrap(), 0.0);
            assert_eq!(beta_closed_form(n, 0.0).unwrap(), f64::from(n));
            assert_eq!(sigma_series(n, 0.0, 1e-12).unwrap(), 0.0);
            assert_eq!(beta_series(n, 0.0, 1e-12).unwrap().beta, f64::from(n));
        }
    }

    #[test]
    fn closed_forms_agree_with_series_on_a_grid() {
        for n in 1..=12u32 {
            for eps in [0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95] {
                let s_closed = sigma_closed_form(n, eps).unwrap();
                let s_series = sigma_series(n, eps, 1e-13).unwrap();
                assert_abs_diff_eq!(s_closed, s_series, epsilon = 1e-9);
                let b_closed = beta_closed_form(n, eps).unwrap();
                let b_series = beta_series(n, eps, 1e-13).unwrap().beta;
                assert_abs_diff_eq!(b_closed, b_series, epsilon = 1e-9);
                assert!(b_closed >= 1.0 - 1e-12 && b_closed <= f64::from(n) + 1e-12);
            }
        }
    }

    #[test]
    fn heavy_cancellation_falls_back_to_the_series() {
        // At 30 sensors and eps = 0.9 the alternating sums involve
        // terms near 1e8 while the results are below 100; the closed
        // forms must still come out series-accurate.
        let sigma = sigma_closed_form(30, 0.9).unwrap();
        let sigma_direct = sigma_series(30, 0.9, 1e-13).unwrap();
        assert_abs_diff_eq!(sigma, sigma_direct, epsilon = 1e-10);
        let beta = beta_closed_form(30, 0.9).unwrap();
        let beta_direct = beta_series(30, 0.9, 1e-13).unwrap().beta;
        assert_abs_diff_eq!(beta, beta_direct, epsilon = 1e-10);
    }

    #[test]
    fn stalest_sensor_law_is_a_distribution() {
        for eps in [0.05, 0.3, 0.6, 0.9] {
            let law = beta_series(6, eps, 1e-13).unwrap();
            let total: f64 = law.stalest_pmf.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
            assert!(law.stalest_pmf.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn fmax_pmf_sums_to_one() {
        for (n, eps) in [(2u32, 0.5), (4, 0.3), (8, 0.9)] {
            let mut total = 0.0;
            for f in 0..5000 {
                total += fmax_pmf(n, eps, f).unwrap();
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        }
        assert_eq!(fmax_pmf(4, 0.0, 0).unwrap(), 1.0);
        assert_eq!(fmax_pmf(4, 0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn fmax_pmf_matches_sigma() {
        // sigma is the mean of this distribution.
        let (n, eps) = (5u32, 0.6);
        let mean: f64 = (0..3000)
            .map(|f| f as f64 * fmax_pmf(n, eps, f).unwrap())
            .sum();
        assert_abs_diff_eq!(mean, sigma_closed_form(n, eps).unwrap(), epsilon = 1e-9);
    }

    #[test]
    fn joint_average_matches_reference_values() {
        // M = 600 at rate 0.8: eps = 0.0065713534, avg = 899.500211744.
        let r = avg_aoi_joint(&base_scenario()).unwrap();
        assert_abs_diff_eq!(r.avg_aoi_slots, 899.500211743788, epsilon = 1e-9);
        assert_abs_diff_eq!(r.error_rate, 3.5290618923095638325e-7, epsilon = 1e-19);
        assert_eq!(r.blocklength, 600);
        assert!(!r.short_block);
        assert_eq!(r.sigma, None);
        // Rate 0.6 and 1.0 both hit eps values that leave 1199.5.
        let sc = base_scenario().with_coding_rate(0.6).unwrap();
        let r = avg_aoi_joint(&sc).unwrap();
        assert_eq!(r.blocklength, 800);
        assert_abs_diff_eq!(r.avg_aoi_slots, 1199.5, epsilon = 1e-6);
        let sc = base_scenario().with_coding_rate(1.0).unwrap();
        let r = avg_aoi_joint(&sc).unwrap();
        assert_eq!(r.blocklength, 480);
        assert_abs_diff_eq!(r.avg_aoi_slots, 1199.5, epsilon = 1e-6);
    }

    #[test]
    fn distributed_average_matches_reference_values() {
        let r = avg_aoi_distributed(&base_scenario()).unwrap();
        assert_abs_diff_eq!(r.avg_aoi_slots, 684.396364482906, epsilon = 1e-9);
        assert_eq!(r.blocklength, 150);
        assert!(r.sigma.is_some() && r.beta.is_some());
        let sc = base_scenario().with_coding_rate(0.6).unwrap();
        let r = avg_aoi_distributed(&sc).unwrap();
        assert_eq!(r.blocklength, 200);
        assert_abs_diff_eq!(r.avg_aoi_slots, 899.500010220131, epsilon = 1e-9);
        let sc = base_scenario().with_coding_rate(1.0).unwrap();
        let r = avg_aoi_distributed(&sc).unwrap();
        assert_eq!(r.blocklength, 120);
        assert_abs_diff_eq!(r.avg_aoi_slots, 1596.64285714286, epsilon = 1e-9);
        assert!(r.short_block == false);
    }

    #[test]
    fn forced_error_rate_reproduces_hand_computed_averages() {
        // N = 2, M_h = 150, eps pinned at 0.5:
        // sigma = beta = 5/3, avg = 5/3*300 + 5/3*150 + 74.5 = 824.5.
        let sc = Scenario::new(2, 120, 0, 0.8, channel3()).unwrap();
        let r = avg_aoi_distributed_with(&sc, &EvalOptions::forced(0.5)).unwrap();
        assert_abs_diff_eq!(r.avg_aoi_slots, 824.5, epsilon = 1e-9);
        // Forced zero error: joint (3M - 1)/2, distributed N*M_h + (M_h-1)/2.
        let sc = base_scenario();
        let j = avg_aoi_joint_with(&sc, &EvalOptions::forced(0.0)).unwrap();
        assert_eq!(j.avg_aoi_slots, (3.0 * 600.0 - 1.0) / 2.0);
        let d = avg_aoi_distributed_with(&sc, &EvalOptions::forced(0.0)).unwrap();
        assert_eq!(d.avg_aoi_slots, 4.0 * 150.0 + 149.0 / 2.0);
    }

    #[test]
    fn single_sensor_schemes_coincide() {
        // With one sensor the two schemes describe the same system.
        for bits in [40u32, 80, 120, 200] {
            for snr in [2.0, 3.0, 5.0, 8.0] {
                let ch = ChannelParams::new(snr).unwrap();
                let sc = Scenario::new(1, bits, 0, 0.8, ch).unwrap();
                let j = avg_aoi_joint(&sc).unwrap();
                let d = avg_aoi_distributed(&sc).unwrap();
                assert_abs_diff_eq!(j.avg_aoi_slots, d.avg_aoi_slots, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn near_certain_loss_reports_unbounded_age() {
        // Rate 1.4 pushes the joint packet so far past capacity that
        // no update ever decodes at working precision.
        let sc = base_scenario().with_coding_rate(1.4).unwrap();
        match avg_aoi_joint(&sc) {
            Err(Error::UnboundedAge { error_rate, .. }) => assert!(error_rate > 1.0 - 1e-12),
            other => panic!("expected UnboundedAge, got {other:?}"),
        }
        // Forcing eps = 1 is the explicit version of the same thing.
        let err = avg_aoi_joint_with(&sc, &EvalOptions::forced(1.0)).unwrap_err();
        assert!(matches!(err, Error::UnboundedAge { .. }));
        // A looser floor turns the forced case back into a number.
        let opts = EvalOptions {
            error_rate_override: Some(0.999),
            unbounded_floor: 1e-4,
        };
        assert!(avg_aoi_joint_with(&sc, &opts).is_ok());
    }

    #[test]
    fn forced_error_rate_is_validated() {
        let sc = base_scenario();
        for bad in [-0.1, 1.5, f64::NAN] {
            let err = avg_aoi_joint_with(&sc, &EvalOptions::forced(bad)).unwrap_err();
            assert!(err.to_string().contains("forced_error_rate"), "{err}");
        }
    }

    #[test]
    fn threshold_matches_reference_values() {
        // eps_D = 0.0065713534 at L_h = 120, rate 0.8, snr 3.
        let sc = base_scenario();
        let t = alpha_threshold(&sc).unwrap();
        assert_abs_diff_eq!(t.alpha_0, 114.72193894245, epsilon = 1e-9);
        assert!(!t.outside_approx_regime());
        // At alpha = 0 distributed wins; past alpha_0 joint wins.
        assert_eq!(t.preferred, Preference::Distributed);
        let sc_past = sc.with_redundancy(130).unwrap();
        let t_past = alpha_threshold(&sc_past).unwrap();
        assert_eq!(t_past.preferred, Preference::Joint);
        assert!(t_past.aoi_diff < 0.0);
        // Two sensors break even earlier than four.
        let sc2 = sc.with_num_sensors(2).unwrap();
        let t2 = alpha_threshold(&sc2).unwrap();
        assert_abs_diff_eq!(t2.alpha_0, 38.4124427763111, epsilon = 1e-9);
        assert!(t2.alpha_0 < t.alpha_0);
    }

    #[test]
    fn threshold_limits_are_exact() {
        // Error-free: alpha_0 = (N - 1) * L_h / 3... with sigma = 0,
        // beta = N: ((3 - 0) N - 2N - 1) L_h / 3 = (N - 1) L_h / 3.
        let sc = base_scenario();
        let t = alpha_threshold_with(&sc, &EvalOptions::forced(0.0)).unwrap();
        assert_eq!(t.alpha_0, 120.0);
        // One sensor never benefits from compression it does not have.
        let sc1 = sc.with_num_sensors(1).unwrap();
        let t1 = alpha_threshold_with(&sc1, &EvalOptions::forced(0.0)).unwrap();
        assert_eq!(t1.alpha_0, 0.0);
        assert_eq!(t1.preferred, Preference::Tie);
        assert_eq!(t1.aoi_diff, 0.0);
    }

    #[test]
    fn regime_flag_trips_above_the_documented_limit() {
        let sc = base_scenario();
        let t = alpha_threshold_with(&sc, &EvalOptions::forced(0.06)).unwrap();
        assert!(t.outside_approx_regime());
        let t = alpha_threshold_with(&sc, &EvalOptions::forced(0.05)).unwrap();
        assert!(!t.outside_approx_regime());
    }

    #[test]
    fn boundary_plus_half_block_is_the_average() {
        for sc in [
            base_scenario(),
            base_scenario().with_coding_rate(0.95).unwrap(),
            Scenario::new(7, 90, 13, 0.7, channel3()).unwrap(),
        ] {
            let j = avg_aoi_joint(&sc).unwrap();
            assert_abs_diff_eq!(
                j.avg_aoi_slots,
                j.boundary_aoi + (f64::from(j.blocklength) - 1.0) / 2.0,
                epsilon = 1e-9,
            );
            let d = avg_aoi_distributed(&sc).unwrap();
            assert_abs_diff_eq!(
                d.avg_aoi_slots,
                d.boundary_aoi + (f64::from(d.blocklength) - 1.0) / 2.0,
                epsilon = 1e-9,
            );
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dual_routes_agree_and_bounds_hold(
                sensors in 1u32..=15,
                error_rate in 0.0f64..0.93,
            ) {
                let s_closed = sigma_closed_form(sensors, error_rate).unwrap();
                let s_series = sigma_series(sensors, error_rate, 1e-13).unwrap();
                prop_assert!((s_closed - s_series).abs() <= 1e-9);
                let b_closed = beta_closed_form(sensors, error_rate).unwrap();
                let b_series = beta_series(sensors, error_rate, 1e-13).unwrap().beta;
                prop_assert!((b_closed - b_series).abs() <= 1e-9);
                prop_assert!(s_closed >= -1e-12);
                prop_assert!(b_closed >= 1.0 - 1e-12);
                prop_assert!(b_closed <= f64::from(sensors) + 1e-12);
            }
        }
    }
}
