//! Short-packet AWGN channel model.
//!
//! A packet of `l` information bits sent over `m` channel uses at SNR
//! `g` (linear) decodes incorrectly with probability
//!
//! ```text
//! eps(l, m, g) = Q( (C(g) - l/m) / (log2(e) * sqrt(V(g) / m)) )
//!
//! C(g) = (1/2) log2(1 + g)          channel capacity per use
//! V(g) = (1/2) (1 - (1 + g)^-2)     channel dispersion
//! ```
//!
//! which is the normal approximation to the finite-blocklength bound.
//! The approximation is known to be loose for very short blocks, so
//! [`PacketShape::is_short_block`] flags blocklengths below
//! [`SHORT_BLOCK_LIMIT`] for callers that surface warnings.

use crate::error::{Error, Result};

/// Blocklengths below this make the normal approximation unreliable.
pub const SHORT_BLOCK_LIMIT: u32 = 100;

/// Gaussian tail probability Q(x) = P(Z > x) for standard normal Z.
///
/// Evaluated as `erfc(x / sqrt(2)) / 2`, accurate to well below 1e-12
/// in absolute terms over the whole real line.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// AWGN channel operating point: SNR plus the wall-clock length of one
/// channel use (one slot).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    snr_linear: f64,
    slot_duration: f64,
}

impl ChannelParams {
    /// Channel at linear SNR `snr_linear > 0` with unit slot duration.
    pub fn new(snr_linear: f64) -> Result<Self> {
        Self::with_slot_duration(snr_linear, 1.0)
    }

    /// Channel at linear SNR with an explicit slot duration in seconds.
    pub fn with_slot_duration(snr_linear: f64, slot_duration: f64) -> Result<Self> {
        if !snr_linear.is_finite() || snr_linear <= 0.0 {
            return Err(Error::invalid(
                "snr",
                format!("must be a finite value > 0, got {snr_linear}"),
            ));
        }
        if !slot_duration.is_finite() || slot_duration <= 0.0 {
            return Err(Error::invalid(
                "slot_duration",
                format!("must be a finite value > 0, got {slot_duration}"),
            ));
        }
        Ok(Self { snr_linear, slot_duration })
    }

    /// Channel at the given SNR in decibels, unit slot duration.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::invalid("snr_db", format!("must be finite, got {snr_db}")));
        }
        Self::new(10f64.powf(snr_db / 10.0))
    }

    pub fn snr_linear(&self) -> f64 {
        self.snr_linear
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr_linear.log10()
    }

    pub fn slot_duration(&self) -> f64 {
        self.slot_duration
    }
}

/// One coded packet: how many information bits ride on how many channel
/// uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketShape {
    update_bits: u32,
    blocklength: u32,
}

impl PacketShape {
    pub fn new(update_bits: u32, blocklength: u32) -> Result<Self> {
        if update_bits == 0 {
            return Err(Error::invalid("update_bits", "must be >= 1"));
        }
        if blocklength == 0 {
            return Err(Error::invalid("blocklength", "must be >= 1"));
        }
        Ok(Self { update_bits, blocklength })
    }

    pub fn update_bits(&self) -> u32 {
        self.update_bits
    }

    pub fn blocklength(&self) -> u32 {
        self.blocklength
    }

    /// Information bits per channel use, `l / m`.
    pub fn coding_rate(&self) -> f64 {
        f64::from(self.update_bits) / f64::from(self.blocklength)
    }

    /// True when the blocklength is too short for the normal
    /// approximation to be trusted.
    pub fn is_short_block(&self) -> bool {
        self.blocklength < SHORT_BLOCK_LIMIT
    }
}

/// Block error probability of `shape` over `channel` under the normal
/// approximation. Always lands in [0, 1]; monotone decreasing in the
/// blocklength once the coding rate sits below capacity.
pub fn block_error_rate(shape: PacketShape, channel: ChannelParams) -> f64 {
    let g = channel.snr_linear();
    error_rate_with_dispersion(shape, g, 1.0 - (1.0 + g).powi(-2))
}

/// Variant with the dispersion numerator `1 - (1 + g^2)^-1`, kept as a
/// diagnostic to quantify how much that (incorrect) form shifts the
/// error rate. Not used by any evaluator.
pub fn block_error_rate_printed_dispersion(shape: PacketShape, channel: ChannelParams) -> f64 {
    let g = channel.snr_linear();
    error_rate_with_dispersion(shape, g, 1.0 - (1.0 + g * g).recip())
}

fn error_rate_with_dispersion(shape: PacketShape, g: f64, dispersion_numerator: f64) -> f64 {
    let m = f64::from(shape.blocklength());
    let capacity = 0.5 * (1.0 + g).log2();
    let dispersion = dispersion_numerator / (2.0 * m);
    // g > 0 keeps the dispersion strictly positive, so the ratio is finite.
    let z = (capacity - shape.coding_rate()) / (std::f64::consts::LOG2_E * dispersion.sqrt());
    q_function(z)
}
