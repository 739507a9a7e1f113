//! Seeded slot-level Monte Carlo simulator for both schemes.
//!
//! Every public entry point comes in two flavors that consume the
//! random stream identically (one Bernoulli draw per transmitted
//! packet, in transmission order) and accumulate the same integer
//! slot-age sums, so they return bit-identical averages:
//!
//! * the default path advances whole frames (joint) or segments
//!   (distributed) at a time;
//! * the `_slot_level` path walks every slot and carries the age
//!   definition `age(t) = t - generation time of freshest delivered
//!   update` literally, with debug assertions tying the walk back to
//!   the boundary laws the closed forms are built on.
//!
//! A delivery at a frame or segment end counts at exactly that slot.
//! Replication `r` of a run draws from stream `r` of a ChaCha12
//! generator keyed by the seed, so results are reproducible across
//! platforms and independent of scheduling.

use crate::analytic::Scenario;
use crate::channel::block_error_rate;
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Run length, warm-up, replication count, seed, and the optional
/// pinned error rate of one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    /// Total frames (joint) or superframes (distributed) per
    /// replication, including warm-up.
    pub frames: u64,
    /// Leading frames excluded from the average while the age process
    /// forgets its artificial starting state.
    pub warmup_frames: u64,
    /// Independent replications; the 95% confidence interval comes
    /// from the spread of their means.
    pub replications: u32,
    /// Base seed; replication `r` uses stream `r` of this seed.
    pub seed: u64,
    /// Replace the channel-derived block error rate (must lie in
    /// [0, 1]; 1 is allowed and simply never delivers).
    pub forced_error_rate: Option<f64>,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            frames: 100_000,
            warmup_frames: 1_000,
            replications: 20,
            seed: 1,
            forced_error_rate: None,
        }
    }
}

impl SimSettings {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("frames", "must be >= 1"));
        }
        if self.warmup_frames >= self.frames {
            return Err(Error::invalid(
                "warmup",
                format!(
                    "must be < frames so at least one frame is measured, \
                     got warmup {} and frames {}",
                    self.warmup_frames, self.frames
                ),
            ));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications", "must be >= 1"));
        }
        if let Some(eps) = self.forced_error_rate {
            if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
                return Err(Error::invalid(
                    "forced_error_rate",
                    format!("must lie in [0, 1], got {eps}"),
                ));
            }
        }
        Ok(())
    }
}

/// Simulated time-average age with its replication spread.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Mean over replications of each replication's time-average age
    /// in slots.
    pub avg_aoi_slots: f64,
    /// Half-width of the 95% confidence interval (Student t over the
    /// replication means); zero when only one replication ran.
    pub ci95_half_width: f64,
    /// Frames that entered the average per replication.
    pub frames_used: u64,
    /// Seed the run was keyed by.
    pub seed: u64,
    /// Time-average age of each replication, in stream order.
    pub per_replication_means: Vec<f64>,
}

fn replication_rng(seed: u64, replication: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(replication));
    rng
}

/// Deterministic per-row seed derivation (splitmix64 of `base + index
/// * golden`), used to give each row of a sweep its own stream family.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn resolve_sim_error_rate(scenario: &Scenario, settings: &SimSettings, joint: bool) -> f64 {
    match settings.forced_error_rate {
        Some(eps) => eps,
        None if joint => block_error_rate(scenario.joint_shape(), scenario.channel()),
        None => block_error_rate(scenario.sensor_shape(), scenario.channel()),
    }
}

fn summarize(settings: &SimSettings, means: Vec<f64>) -> SimResult {
    let n = means.len() as f64;
    let avg = means.iter().sum::<f64>() / n;
    let ci95_half_width = if means.len() < 2 {
        0.0
    } else {
        let var = means.iter().map(|m| (m - avg) * (m - avg)).sum::<f64>() / (n - 1.0);
        let t = StudentsT::new(0.0, 1.0, n - 1.0)
            .expect("replications >= 2 gives a valid degree of freedom")
            .inverse_cdf(0.975);
        t * (var / n).sqrt()
    };
    SimResult {
        avg_aoi_slots: avg,
        ci95_half_width,
        frames_used: settings.frames - settings.warmup_frames,
        seed: settings.seed,
        per_replication_means: means,
    }
}

fn run_replications<F>(settings: &SimSettings, one_replication: F) -> SimResult
where
    F: Fn(&mut ChaCha12Rng) -> f64,
{
    let means = (0..settings.replications)
        .map(|r| {
            let mut rng = replication_rng(settings.seed, r);
            one_replication(&mut rng)
        })
        .collect();
    summarize(settings, means)
}

/// Joint scheme, frame-accumulation path: one packet of blocklength
/// `M` per frame; on failure the last delivered update just ages.
pub fn simulate_joint(scenario: &Scenario, settings: &SimSettings) -> Result<SimResult> {
    settings.validate()?;
    let eps = resolve_sim_error_rate(scenario, settings, true);
    let m = u128::from(scenario.joint_blocklength());
    let measured_frames = settings.frames - settings.warmup_frames;
    let per_frame_ramp = m * m.saturating_sub(1) / 2;
    let measured_slots = measured_frames as u128 * m;
    Ok(run_replications(settings, |rng| {
        // Boundary age in frames: fail_streak + 1.
        let mut fail_streak: u128 = 0;
        let mut boundary_sum: u128 = 0;
        for frame in 0..settings.frames {
            if frame >= settings.warmup_frames {
                boundary_sum += fail_streak + 1;
            }
            let failed = rng.random::<f64>() < eps;
            fail_streak = if failed { fail_streak + 1 } else { 0 };
        }
        // Within a frame the age climbs by one per slot, adding the
        // same triangular ramp to every frame.
        let slot_age_sum = boundary_sum * m * m + measured_frames as u128 * per_frame_ramp;
        slot_age_sum as f64 / measured_slots as f64
    }))
}

/// Joint scheme, explicit slot walk. Bit-identical to
/// [`simulate_joint`]; exists as the readable reference.
pub fn simulate_joint_slot_level(scenario: &Scenario, settings: &SimSettings) -> Result<SimResult> {
    settings.validate()?;
    let eps = resolve_sim_error_rate(scenario, settings, true);
    let m = u64::from(scenario.joint_blocklength());
    let measured_slots = (settings.frames - settings.warmup_frames) as u128 * u128::from(m);
    Ok(run_replications(settings, |rng| {
        // Pretend an update generated at -M was delivered at t = 0, so
        // the age starts at M like the stationary boundary law.
        let mut last_generated: i128 = -i128::from(m);
        let mut fail_streak: u64 = 0;
        let mut slot_age_sum: u128 = 0;
        for frame in 0..settings.frames {
            let frame_start = frame * m;
            debug_assert_eq!(
                i128::from(frame_start) - last_generated,
                i128::from((fail_streak + 1) * m),
                "boundary age must be (failures + 1) * M"
            );
            for j in 0..m {
                let t = frame_start + j;
                let age = i128::from(t) - last_generated;
                if frame >= settings.warmup_frames {
                    slot_age_sum += age as u128;
                }
            }
            // The update sampled at frame start decodes (or not) at
            // frame end and counts from that slot onward.
            let failed = rng.random::<f64>() < eps;
            if failed {
                fail_streak += 1;
            } else {
                fail_streak = 0;
                last_generated = i128::from(frame_start);
            }
        }
        slot_age_sum as f64 / measured_slots as f64
    }))
}

/// Distributed scheme, segment-accumulation path: sensors transmit
/// round-robin, one packet of blocklength `M_h` per segment, `N`
/// segments per superframe. The system age is the staleness of the
/// worst sensor.
pub fn simulate_distributed(scenario: &Scenario, settings: &SimSettings) -> Result<SimResult> {
    settings.validate()?;
    let eps = resolve_sim_error_rate(scenario, settings, false);
    let n = scenario.num_sensors() as usize;
    let mh = u128::from(scenario.sensor_blocklength());
    let per_segment_ramp = mh * mh.saturating_sub(1) / 2;
    let measured_frames = settings.frames - settings.warmup_frames;
    let measured_slots = measured_frames as u128 * n as u128 * mh;
    Ok(run_replications(settings, |rng| {
        // ages[i] = sensor i+1's age at the current segment start.
        // Sensor 1 opens the superframe, so at t = 0 its data is a
        // whole round old and the closer comes in freshest.
        let mut ages: Vec<u128> = (0..n).map(|i| (n - i) as u128 * mh).collect();
        let mut slot_age_sum: u128 = 0;
        for frame in 0..settings.frames {
            let measured = frame >= settings.warmup_frames;
            for sensor in 0..n {
                if measured {
                    let stalest = *ages.iter().max().expect("at least one sensor");
                    slot_age_sum += stalest * mh + per_segment_ramp;
                }
                let failed = rng.random::<f64>() < eps;
                for age in ages.iter_mut() {
                    *age += mh;
                }
                if !failed {
                    // Sampled at this segment's start, delivered at its
                    // end: one segment old as the next segment opens.
                    ages[sensor] = mh;
                }
            }
        }
        slot_age_sum as f64 / measured_slots as f64
    }))
}

/// Distributed scheme, explicit slot walk. Bit-identical to
/// [`simulate_distributed`].
pub fn simulate_distributed_slot_level(
    scenario: &Scenario,
    settings: &SimSettings,
) -> Result<SimResult> {
    settings.validate()?;
    let eps = resolve_sim_error_rate(scenario, settings, false);
    let n = scenario.num_sensors() as usize;
    let mh = u64::from(scenario.sensor_blocklength());
    let superframe = n as u64 * mh;
    let measured_slots = (settings.frames - settings.warmup_frames) as u128 * u128::from(superframe);
    Ok(run_replications(settings, |rng| {
        // Artificial history: sensor i+1 last delivered at the end of
        // its segment one superframe ago, i.e. data sampled at
        // (i + 1 - N) * M_h - M_h ... equivalently age (N - i) * M_h at 0.
        let mut last_generated: Vec<i128> = (0..n)
            .map(|i| -i128::from((n - i) as u64 * mh))
            .collect();
        let mut fail_streaks: Vec<u64> = vec![0; n];
        let mut slot_age_sum: u128 = 0;
        for frame in 0..settings.frames {
            let frame_start = frame * superframe;
            for (i, &gen) in last_generated.iter().enumerate() {
                // Boundary law: f * N * M_h + (N - i) * M_h, with
                // sensor 1 (i = 0) the stalest of the fresh ones.
                debug_assert_eq!(
                    i128::from(frame_start) - gen,
                    i128::from(fail_streaks[i] * superframe + (n - i) as u64 * mh),
                    "superframe boundary age must follow the boundary law"
                );
            }
            for sensor in 0..n {
                let segment_start = frame_start + sensor as u64 * mh;
                for j in 0..mh {
                    let t = segment_start + j;
                    let age = last_generated
                        .iter()
                        .map(|&gen| i128::from(t) - gen)
                        .max()
                        .expect("at least one sensor");
                    if frame >= settings.warmup_frames {
                        slot_age_sum += age as u128;
                    }
                }
                let failed = rng.random::<f64>() < eps;
                if failed {
                    fail_streaks[sensor] += 1;
                } else {
                    fail_streaks[sensor] = 0;
                    last_generated[sensor] = i128::from(segment_start);
                }
            }
        }
        slot_age_sum as f64 / measured_slots as f64
    }))
}

/// Histogram of the per-superframe maximum failure count, sampled from
/// the stationary law (independent geometric draws per sensor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FmaxHistogram {
    /// `counts[f]` = samples whose maximum failure count was `f`.
    pub counts: Vec<u64>,
    pub samples: u64,
}

impl FmaxHistogram {
    pub fn pmf(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.samples as f64)
            .collect()
    }

    /// Total variation distance to the closed-form law
    /// `P(fmax = f) = (1 - eps^(f+1))^N - (1 - eps^f)^N`.
    pub fn total_variation_vs_model(&self, sensors: u32, error_rate: f64) -> Result<f64> {
        let mut dist = 0.0f64;
        for (f, &count) in self.counts.iter().enumerate() {
            let empirical = count as f64 / self.samples as f64;
            let model = crate::analytic::fmax_pmf(sensors, error_rate, f as u64)?;
            dist += (empirical - model).abs();
        }
        // Model mass beyond the histogram's support counts in full.
        let len = self.counts.len() as u32;
        let tail = if error_rate == 0.0 {
            0.0
        } else {
            let exp = i32::try_from(len).unwrap_or(i32::MAX);
            -f64::exp_m1(f64::from(sensors) * f64::ln_1p(-error_rate.powi(exp)))
        };
        Ok(0.5 * (dist + tail))
    }
}

/// Draw `samples` independent superframe states for `sensors` sensors
/// at failure probability `error_rate` and histogram the maximum
/// failure count. Inversion sampling keeps it one uniform per sensor.
pub fn empirical_fmax_pmf(
    sensors: u32,
    error_rate: f64,
    samples: u64,
    seed: u64,
) -> Result<FmaxHistogram> {
    if sensors == 0 {
        return Err(Error::invalid("sensors", "must be >= 1"));
    }
    if !error_rate.is_finite() || !(0.0..1.0).contains(&error_rate) {
        return Err(Error::invalid(
            "error_rate",
            format!("must lie in [0, 1), got {error_rate}"),
        ));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be >= 1"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let ln_eps = error_rate.ln();
    let mut counts: Vec<u64> = Vec::new();
    for _ in 0..samples {
        let mut fmax = 0u64;
        for _ in 0..sensors {
            let f = if error_rate == 0.0 {
                0
            } else {
                // Geometric on {0, 1, ...}: floor(ln(1 - u) / ln(eps)).
                let u: f64 = rng.random();
                (f64::ln_1p(-u) / ln_eps) as u64
            };
            fmax = fmax.max(f);
        }
        if counts.len() <= fmax as usize {
            counts.resize(fmax as usize + 1, 0);
        }
        counts[fmax as usize] += 1;
    }
    Ok(FmaxHistogram { counts, samples })
}
