//! Nakagami-m multipath channel: fading realizations, path loss,
//! chip-delay convolution, and white Gaussian noise.
//!
//! A realization is a tapped delay line with L non-negative path gains at
//! integer chip delays. Gains are Nakagami-m amplitudes, i.e. square roots
//! of gamma variates with shape m and scale Omega/m, with the per-path
//! power Omega = 1/L so the total captured power is 1. Amplitude path loss
//! 1/d is applied to the waveform so received power scales as 1/d^2.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};

/// Static description of one link's multipath statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    paths: usize,
    m: f64,
    delays: Vec<usize>,
}

impl ChannelProfile {
    /// `m` is the Nakagami fading factor shared by all paths (>= 0.5);
    /// `delays` are integer chip delays, strictly increasing from 0.
    pub fn new(paths: usize, m: f64, delays: Vec<usize>) -> Result<Self> {
        if paths == 0 {
            return Err(Error::Config("channel needs at least one path".into()));
        }
        if !(m.is_finite() && m >= 0.5) {
            return Err(Error::Config(format!(
                "Nakagami fading factor must be finite and >= 0.5, got {m}"
            )));
        }
        if delays.len() != paths {
            return Err(Error::Config(format!(
                "expected {paths} delays, got {}",
                delays.len()
            )));
        }
        if delays[0] != 0 {
            return Err(Error::Config("first path delay must be 0".into()));
        }
        if !delays.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "path delays must be strictly increasing".into(),
            ));
        }
        Ok(ChannelProfile { paths, m, delays })
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn max_delay(&self) -> usize {
        *self.delays.last().unwrap()
    }

    /// Per-path power Omega_l = 1/L (uniform scale, total power 1).
    pub fn omega_per_path(&self) -> f64 {
        1.0 / self.paths as f64
    }
}

/// One drawn set of path gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    gains: Vec<f64>,
    delays: Vec<usize>,
}

impl ChannelRealization {
    /// Builds a realization directly from gains and delays (test and
    /// diagnostic hook; `sample_fading` is the statistical path).
    pub fn from_parts(gains: Vec<f64>, delays: Vec<usize>) -> Result<Self> {
        if gains.len() != delays.len() {
            return Err(Error::DimensionMismatch(
                "gains and delays must have equal length".into(),
            ));
        }
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::NonFinite(
                "path gains must be finite and >= 0".into(),
            ));
        }
        Ok(ChannelRealization { gains, delays })
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn max_delay(&self) -> usize {
        self.delays.last().copied().unwrap_or(0)
    }

    /// Total instantaneous power gain, sum of alpha_l^2.
    pub fn power(&self) -> f64 {
        self.gains.iter().map(|g| g * g).sum()
    }
}

/// Source/relay/destination distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_sd: f64,
    pub d_sr: f64,
    pub d_rd: f64,
}

impl LinkGeometry {
    pub fn new(d_sd: f64, d_sr: f64, d_rd: f64) -> Result<Self> {
        for (name, d) in [("d_sd", d_sd), ("d_sr", d_sr), ("d_rd", d_rd)] {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and positive, got {d}"
                )));
            }
        }
        Ok(LinkGeometry { d_sd, d_sr, d_rd })
    }

    /// Unit distances (ratio 1:1:1).
    pub fn unit() -> Self {
        LinkGeometry {
            d_sd: 1.0,
            d_sr: 1.0,
            d_rd: 1.0,
        }
    }
}

/// One draw from Gamma(shape, scale); mean of many draws converges to
/// shape*scale.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    if !(shape.is_finite() && shape > 0.0) || !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Config(format!(
            "gamma parameters must be finite and positive, got shape {shape}, scale {scale}"
        )));
    }
    let dist =
        Gamma::new(shape, scale).map_err(|e| Error::Config(format!("gamma distribution: {e}")))?;
    Ok(dist.sample(rng))
}

/// Draws independent Nakagami-m path amplitudes: alpha_l = sqrt(G) with
/// G ~ Gamma(m, Omega_l / m), so E[alpha_l^2] = Omega_l.
pub fn sample_fading<R: Rng + ?Sized>(profile: &ChannelProfile, rng: &mut R) -> ChannelRealization {
    let scale = profile.omega_per_path() / profile.m();
    let dist = Gamma::new(profile.m(), scale).expect("validated profile parameters");
    let gains = (0..profile.paths())
        .map(|_| dist.sample(rng).sqrt())
        .collect();
    ChannelRealization {
        gains,
        delays: profile.delays.clone(),
    }
}

/// Tapped-delay-line convolution with amplitude path loss 1/d.
///
/// Chips shifted past the frame start are dropped (inter-symbol
/// interference is ignored; delays are assumed tiny against the frame).
/// Output length equals input length.
pub fn propagate(
    chips: &[f64],
    realization: &ChannelRealization,
    path_loss_distance: f64,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; chips.len()];
    propagate_add(&mut out, chips, realization, path_loss_distance)?;
    Ok(out)
}

/// Adds the propagated signal into `acc` (superposition helper; same
/// contract as [`propagate`]).
pub fn propagate_add(
    acc: &mut [f64],
    chips: &[f64],
    realization: &ChannelRealization,
    path_loss_distance: f64,
) -> Result<()> {
    if acc.len() != chips.len() {
        return Err(Error::DimensionMismatch(format!(
            "accumulator length {} does not match input length {}",
            acc.len(),
            chips.len()
        )));
    }
    if !(path_loss_distance.is_finite() && path_loss_distance > 0.0) {
        return Err(Error::Config(format!(
            "path loss distance must be finite and positive, got {path_loss_distance}"
        )));
    }
    if realization.max_delay() >= chips.len() {
        return Err(Error::Config(format!(
            "max path delay {} is not small against the frame length {}",
            realization.max_delay(),
            chips.len()
        )));
    }
    let attenuation = 1.0 / path_loss_distance;
    for (gain, &delay) in realization.gains().iter().zip(realization.delays()) {
        let g = gain * attenuation;
        if g == 0.0 {
            continue;
        }
        for t in delay..chips.len() {
            acc[t] += g * chips[t - delay];
        }
    }
    Ok(())
}

/// Adds i.i.d. zero-mean Gaussian noise of variance n0/2 per chip.
pub fn add_noise<R: Rng + ?Sized>(chips: &[f64], n0: f64, rng: &mut R) -> Result<Vec<f64>> {
    let mut out = chips.to_vec();
    add_noise_in_place(&mut out, n0, rng)?;
    Ok(out)
}

/// In-place variant of [`add_noise`].
pub fn add_noise_in_place<R: Rng + ?Sized>(chips: &mut [f64], n0: f64, rng: &mut R) -> Result<()> {
    if !(n0.is_finite() && n0 >= 0.0) {
        return Err(Error::Config(format!(
            "noise level must be finite and non-negative, got {n0}"
        )));
    }
    if n0 == 0.0 {
        return Ok(());
    }
    let dist = Normal::new(0.0, (n0 / 2.0).sqrt()).expect("valid sigma");
    for c in chips.iter_mut() {
        *c += dist.sample(rng);
    }
    Ok(())
}
