//! Walsh-coded DCSK modulation and GML detection.
//!
//! A frame for user `K` carrying bit `b` repeats one chaotic carrier
//! segment over `2N` sub-segments, sign-keyed by Walsh row `2K - b`. The
//! receiver forms the matrix of pairwise sub-segment correlations and picks
//! the candidate row with the larger off-diagonal quadratic form; the
//! diagonal is excluded because the noisy self-energy term carries no sign
//! information (and is the same for every candidate, so exclusion never
//! changes a decision). At N = 1 this reduces to the classical DCSK
//! reference/data correlator.

use crate::chaos::Carrier;
use crate::error::{Error, Result};
use crate::walsh::WalshMatrix;

/// Frame geometry shared by every user of one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModulationConfig {
    num_users: usize,
    beta: usize,
}

impl ModulationConfig {
    /// `num_users` must be a power of two (the order-2N Walsh recursion
    /// exists only for powers of two) and `beta` at least 2.
    pub fn new(num_users: usize, beta: usize) -> Result<Self> {
        if num_users == 0 || !num_users.is_power_of_two() {
            return Err(Error::Config(format!(
                "number of users must be a power of two, got {num_users}"
            )));
        }
        if beta < 2 {
            return Err(Error::Config(format!(
                "sub-spreading factor must be at least 2, got {beta}"
            )));
        }
        Ok(ModulationConfig { num_users, beta })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Number of sub-segments per frame, `2N`.
    pub fn subsegments(&self) -> usize {
        2 * self.num_users
    }

    /// Chips per frame, `2N * beta` (the global spreading factor).
    pub fn frame_len(&self) -> usize {
        self.subsegments() * self.beta
    }

    /// Exponent n with `2^n = 2N`.
    pub fn walsh_exponent(&self) -> u32 {
        (2 * self.num_users).trailing_zeros()
    }
}

/// One modulated DCSK frame on air.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    chips: Vec<f64>,
    user: usize,
    bit: u8,
}

impl Frame {
    pub fn chips(&self) -> &[f64] {
        &self.chips
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn bit(&self) -> u8 {
        self.bit
    }

    pub fn into_chips(self) -> Vec<f64> {
        self.chips
    }
}

/// Builds the frame for `(user, bit)`: Walsh-signed copies of `carrier`,
/// scaled so the total chip energy equals `energy_per_frame` exactly.
pub fn modulate(
    cfg: &ModulationConfig,
    user: usize,
    bit: u8,
    carrier: &Carrier,
    walsh: &WalshMatrix,
    energy_per_frame: f64,
) -> Result<Frame> {
    if user == 0 || user > cfg.num_users() {
        return Err(Error::IndexOutOfRange(format!(
            "user {user} not in 1..={}",
            cfg.num_users()
        )));
    }
    if walsh.order() != cfg.subsegments() {
        return Err(Error::DimensionMismatch(format!(
            "Walsh order {} does not match 2N = {}",
            walsh.order(),
            cfg.subsegments()
        )));
    }
    if carrier.len() != cfg.beta() {
        return Err(Error::DimensionMismatch(format!(
            "carrier length {} does not match beta = {}",
            carrier.len(),
            cfg.beta()
        )));
    }
    if !(energy_per_frame >= 0.0 && energy_per_frame.is_finite()) {
        return Err(Error::Config(format!(
            "frame energy must be finite and non-negative, got {energy_per_frame}"
        )));
    }
    let row = walsh.row_for(user, bit)?;
    let mut chips = Vec::with_capacity(cfg.frame_len());
    for &sign in row {
        let s = f64::from(sign);
        chips.extend(carrier.chips().iter().map(|&c| s * c));
    }
    let raw_energy: f64 = chips.iter().map(|c| c * c).sum();
    let scale = if raw_energy > 0.0 {
        (energy_per_frame / raw_energy).sqrt()
    } else {
        0.0
    };
    for c in &mut chips {
        *c *= scale;
    }
    Ok(Frame { chips, user, bit })
}

/// Symmetric matrix of inner products between frame sub-segments.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    order: usize,
    data: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry (i, j), 0-based.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.at(i, i)).sum()
    }
}

/// Computes all pairwise sub-segment inner products of a received frame.
pub fn correlation_matrix(received: &[f64], cfg: &ModulationConfig) -> Result<CorrelationMatrix> {
    if received.len() != cfg.frame_len() {
        return Err(Error::DimensionMismatch(format!(
            "received length {} does not match frame length {}",
            received.len(),
            cfg.frame_len()
        )));
    }
    let s = cfg.subsegments();
    let beta = cfg.beta();
    let mut data = vec![0.0; s * s];
    for i in 0..s {
        let seg_i = &received[i * beta..(i + 1) * beta];
        for j in i..s {
            let seg_j = &received[j * beta..(j + 1) * beta];
            let dot: f64 = seg_i.iter().zip(seg_j).map(|(a, b)| a * b).sum();
            data[i * s + j] = dot;
            data[j * s + i] = dot;
        }
    }
    Ok(CorrelationMatrix { order: s, data })
}

/// GML decision for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub bit: u8,
    pub metric_b0: f64,
    pub metric_b1: f64,
}

impl DetectionResult {
    /// Ties decode to bit 0 (a measure-zero event in continuous noise).
    pub fn decide(metric_b0: f64, metric_b1: f64) -> Self {
        DetectionResult {
            bit: u8::from(metric_b1 > metric_b0),
            metric_b0,
            metric_b1,
        }
    }
}

/// Candidate-row quadratic form with the diagonal excluded:
/// `z_b = sum_{i != j} w_i w_j R[i][j]` for row `2*user - b`.
pub fn gml_detect(
    r: &CorrelationMatrix,
    user: usize,
    walsh: &WalshMatrix,
) -> Result<DetectionResult> {
    if walsh.order() != r.order() {
        return Err(Error::DimensionMismatch(format!(
            "Walsh order {} does not match correlation order {}",
            walsh.order(),
            r.order()
        )));
    }
    if user == 0 || 2 * user > walsh.order() {
        return Err(Error::IndexOutOfRange(format!(
            "user {user} not in 1..={}",
            walsh.order() / 2
        )));
    }
    let z0 = candidate_metric(r, walsh.row_for(user, 0)?);
    let z1 = candidate_metric(r, walsh.row_for(user, 1)?);
    Ok(DetectionResult::decide(z0, z1))
}

fn candidate_metric(r: &CorrelationMatrix, row: &[i8]) -> f64 {
    // w^T R w minus the trace; w_i^2 = 1 makes the diagonal contribution
    // candidate-independent.
    let s = r.order();
    let mut quad = 0.0;
    for i in 0..s {
        let acc: f64 = row
            .iter()
            .enumerate()
            .map(|(j, &w)| f64::from(w) * r.at(i, j))
            .sum();
        quad += f64::from(row[i]) * acc;
    }
    quad - r.trace()
}
