//! Two-phase decode-and-forward protocol and the non-cooperative baseline.
//!
//! Phase 1: all users broadcast simultaneously at half the bit energy; each
//! user receives the other N-1 signals (perfect self-interference
//! cancellation) and GML-decodes them; the destination receives the
//! superposition too. Phase 2: each user re-modulates, with fresh carriers,
//! the bits it decoded correctly (checked against ground truth, standing in
//! for ideal error detection) at energy Eb/(2(N-1)) per forwarded user, and
//! transmits their sum. The destination computes GML metrics per user from
//! each phase's frame and sums them (equal-gain combining) without knowing
//! which relays idled.
//!
//! Every ordered terminal pair gets an independent fading realization per
//! phase per period (block fading).

use crate::channel::{
    add_noise_in_place, propagate_add, sample_fading, ChannelProfile, LinkGeometry,
};
use crate::chaos::Carrier;
use crate::error::{Error, Result};
use crate::modem::{correlation_matrix, gml_detect, modulate, Frame, ModulationConfig};
use crate::walsh::WalshMatrix;
use rand::Rng;

/// Per-bit energy budget and its split across phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPolicy {
    eb: f64,
}

impl EnergyPolicy {
    pub fn new(eb: f64) -> Result<Self> {
        if !(eb.is_finite() && eb >= 0.0) {
            return Err(Error::Config(format!(
                "energy per bit must be finite and non-negative, got {eb}"
            )));
        }
        Ok(EnergyPolicy { eb })
    }

    pub fn eb(&self) -> f64 {
        self.eb
    }

    /// Phase-1 frame energy, Eb/2 (uniform allocation across phases).
    pub fn phase1_frame_energy(&self) -> f64 {
        self.eb / 2.0
    }

    /// Phase-2 energy per forwarded user: the relay's Eb/2 budget split
    /// equally over the N-1 users it helps.
    pub fn relayed_user_energy(&self, n_users: usize) -> f64 {
        self.eb / (2.0 * (n_users as f64 - 1.0))
    }

    /// The non-cooperative baseline spends the full budget on one frame.
    pub fn nc_frame_energy(&self) -> f64 {
        self.eb
    }
}

/// Noise level, tied to the Eb/N0 control parameter of sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    n0: f64,
    eb_over_n0_db: f64,
}

impl NoiseConfig {
    /// Derives N0 from the bit energy and Eb/N0 in dB.
    pub fn from_eb_n0_db(eb: f64, eb_over_n0_db: f64) -> Result<Self> {
        if !(eb.is_finite() && eb > 0.0) {
            return Err(Error::Config(format!(
                "bit energy must be finite and positive, got {eb}"
            )));
        }
        if !eb_over_n0_db.is_finite() {
            return Err(Error::Config(format!(
                "Eb/N0 must be finite, got {eb_over_n0_db} dB"
            )));
        }
        Ok(NoiseConfig {
            n0: eb / 10f64.powf(eb_over_n0_db / 10.0),
            eb_over_n0_db,
        })
    }

    /// Diagnostic mode: no noise at all.
    pub fn noiseless() -> Self {
        NoiseConfig {
            n0: 0.0,
            eb_over_n0_db: f64::INFINITY,
        }
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    pub fn eb_over_n0_db(&self) -> f64 {
        self.eb_over_n0_db
    }
}

/// Everything fixed across periods of one simulated system.
#[derive(Debug, Clone)]
pub struct SimSetup {
    cfg: ModulationConfig,
    walsh: WalshMatrix,
    profile: ChannelProfile,
    geometry: LinkGeometry,
    energy: EnergyPolicy,
    noise: NoiseConfig,
}

impl SimSetup {
    pub fn new(
        cfg: ModulationConfig,
        profile: ChannelProfile,
        geometry: LinkGeometry,
        energy: EnergyPolicy,
        noise: NoiseConfig,
    ) -> Result<Self> {
        if profile.max_delay() >= cfg.beta() {
            return Err(Error::Config(format!(
                "max path delay {} must stay below the sub-segment length {}",
                profile.max_delay(),
                cfg.beta()
            )));
        }
        let walsh = WalshMatrix::generate(cfg.walsh_exponent());
        Ok(SimSetup {
            cfg,
            walsh,
            profile,
            geometry,
            energy,
            noise,
        })
    }

    pub fn cfg(&self) -> &ModulationConfig {
        &self.cfg
    }

    pub fn walsh(&self) -> &WalshMatrix {
        &self.walsh
    }

    pub fn profile(&self) -> &ChannelProfile {
        &self.profile
    }

    pub fn geometry(&self) -> &LinkGeometry {
        &self.geometry
    }

    pub fn energy(&self) -> &EnergyPolicy {
        &self.energy
    }

    pub fn noise(&self) -> &NoiseConfig {
        &self.noise
    }
}

/// Outcome of one transmission period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodOutcome {
    pub decided_bits: Vec<u8>,
    pub true_bits: Vec<u8>,
    /// `relay_decode_flags[k][i]`: did user K = k+1 decode the i-th *other*
    /// user (ascending user order, skipping K) correctly? Empty for the
    /// non-cooperative baseline.
    pub relay_decode_flags: Vec<Vec<bool>>,
    /// Destination per-user candidate metrics from the phase-1 frame.
    pub phase1_metrics: Vec<(f64, f64)>,
    /// Same from the phase-2 frame; zeros for the non-cooperative baseline.
    pub phase2_metrics: Vec<(f64, f64)>,
}

impl PeriodOutcome {
    pub fn destination_errors(&self) -> u64 {
        self.decided_bits
            .iter()
            .zip(&self.true_bits)
            .filter(|(a, b)| a != b)
            .count() as u64
    }
}

/// Diagnostic switches for the cooperative period.
#[derive(Debug, Clone, Copy, Default)]
pub struct CcOptions {
    /// Suppress every phase-2 transmission; the destination still combines
    /// the (noise-only) phase-2 metrics, since it cannot know relays idled.
    pub force_relays_idle: bool,
}

/// Component-wise sum of the two phases' candidate-bit metrics.
pub fn egc_combine(phase1: (f64, f64), phase2: (f64, f64)) -> Result<(f64, f64)> {
    let out = (phase1.0 + phase2.0, phase1.1 + phase2.1);
    if !(out.0.is_finite() && out.1.is_finite()) {
        return Err(Error::NonFinite(format!(
            "combiner metrics must be finite, got {phase1:?} + {phase2:?}"
        )));
    }
    Ok(out)
}

fn validate_bits(bits: &[u8], n: usize) -> Result<()> {
    if bits.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} bits, got {}",
            bits.len()
        )));
    }
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Config("bits must be 0 or 1".into()));
    }
    Ok(())
}

fn phase1_frames<R: Rng + ?Sized>(
    setup: &SimSetup,
    bits: &[u8],
    energy: f64,
    rng: &mut R,
) -> Result<Vec<Frame>> {
    (1..=setup.cfg.num_users())
        .map(|user| {
            let carrier = Carrier::generate(setup.cfg.beta(), rng.gen())?;
            modulate(
                &setup.cfg,
                user,
                bits[user - 1],
                &carrier,
                &setup.walsh,
                energy,
            )
        })
        .collect()
}

/// One period of the two-phase cooperative protocol.
pub fn run_cc_period<R: Rng + ?Sized>(
    setup: &SimSetup,
    bits: &[u8],
    rng: &mut R,
) -> Result<PeriodOutcome> {
    run_cc_period_with(setup, bits, CcOptions::default(), rng)
}

pub fn run_cc_period_with<R: Rng + ?Sized>(
    setup: &SimSetup,
    bits: &[u8],
    options: CcOptions,
    rng: &mut R,
) -> Result<PeriodOutcome> {
    let n = setup.cfg.num_users();
    if n < 2 {
        return Err(Error::Config(format!(
            "cooperation needs at least 2 users, got {n}"
        )));
    }
    validate_bits(bits, n)?;
    let frame_len = setup.cfg.frame_len();
    let n0 = setup.noise.n0();

    // Phase 1: simultaneous broadcast at Eb/2.
    let frames = phase1_frames(setup, bits, setup.energy.phase1_frame_energy(), rng)?;

    // Each user decodes every other user from its own superposition.
    let mut relay_decode_flags: Vec<Vec<bool>> = Vec::with_capacity(n);
    for receiver in 1..=n {
        let mut rx = vec![0.0; frame_len];
        for (idx, frame) in frames.iter().enumerate() {
            let sender = idx + 1;
            if sender == receiver {
                continue;
            }
            let h = sample_fading(&setup.profile, rng);
            propagate_add(&mut rx, frame.chips(), &h, setup.geometry.d_sr)?;
        }
        add_noise_in_place(&mut rx, n0, rng)?;
        let r = correlation_matrix(&rx, &setup.cfg)?;
        let mut flags = Vec::with_capacity(n - 1);
        for sender in 1..=n {
            if sender == receiver {
                continue;
            }
            let det = gml_detect(&r, sender, &setup.walsh)?;
            flags.push(det.bit == bits[sender - 1]);
        }
        relay_decode_flags.push(flags);
    }

    // Destination, phase 1.
    let mut rx_d1 = vec![0.0; frame_len];
    for frame in &frames {
        let h = sample_fading(&setup.profile, rng);
        propagate_add(&mut rx_d1, frame.chips(), &h, setup.geometry.d_sd)?;
    }
    add_noise_in_place(&mut rx_d1, n0, rng)?;
    let r_d1 = correlation_matrix(&rx_d1, &setup.cfg)?;

    // Phase 2: each relay forwards the users it decoded correctly, with
    // fresh carriers, omitting per-user components it got wrong.
    let relayed_energy = setup.energy.relayed_user_energy(n);
    let mut rx_d2 = vec![0.0; frame_len];
    if !options.force_relays_idle {
        let mut relay_frame = vec![0.0; frame_len];
        for relay in 1..=n {
            relay_frame.fill(0.0);
            let mut transmitting = false;
            let mut flag_idx = 0;
            for user in 1..=n {
                if user == relay {
                    continue;
                }
                if relay_decode_flags[relay - 1][flag_idx] {
                    let carrier = Carrier::generate(setup.cfg.beta(), rng.gen())?;
                    let f = modulate(
                        &setup.cfg,
                        user,
                        bits[user - 1],
                        &carrier,
                        &setup.walsh,
                        relayed_energy,
                    )?;
                    for (acc, c) in relay_frame.iter_mut().zip(f.chips()) {
                        *acc += c;
                    }
                    transmitting = true;
                }
                flag_idx += 1;
            }
            if transmitting {
                let h = sample_fading(&setup.profile, rng);
                propagate_add(&mut rx_d2, &relay_frame, &h, setup.geometry.d_rd)?;
            }
        }
    }
    add_noise_in_place(&mut rx_d2, n0, rng)?;
    let r_d2 = correlation_matrix(&rx_d2, &setup.cfg)?;

    // Blind equal-gain combining of the per-phase metrics, then decide.
    let mut decided = Vec::with_capacity(n);
    let mut phase1_metrics = Vec::with_capacity(n);
    let mut phase2_metrics = Vec::with_capacity(n);
    for user in 1..=n {
        let d1 = gml_detect(&r_d1, user, &setup.walsh)?;
        let d2 = gml_detect(&r_d2, user, &setup.walsh)?;
        let m1 = (d1.metric_b0, d1.metric_b1);
        let m2 = (d2.metric_b0, d2.metric_b1);
        let (z0, z1) = egc_combine(m1, m2)?;
        decided.push(u8::from(z1 > z0));
        phase1_metrics.push(m1);
        phase2_metrics.push(m2);
    }

    Ok(PeriodOutcome {
        decided_bits: decided,
        true_bits: bits.to_vec(),
        relay_decode_flags,
        phase1_metrics,
        phase2_metrics,
    })
}

/// One period of the single-phase direct baseline at full bit energy.
pub fn run_nc_period<R: Rng + ?Sized>(
    setup: &SimSetup,
    bits: &[u8],
    rng: &mut R,
) -> Result<PeriodOutcome> {
    let n = setup.cfg.num_users();
    validate_bits(bits, n)?;
    let frames = phase1_frames(setup, bits, setup.energy.nc_frame_energy(), rng)?;

    let mut rx = vec![0.0; setup.cfg.frame_len()];
    for frame in &frames {
        let h = sample_fading(&setup.profile, rng);
        propagate_add(&mut rx, frame.chips(), &h, setup.geometry.d_sd)?;
    }
    add_noise_in_place(&mut rx, setup.noise.n0(), rng)?;
    let r = correlation_matrix(&rx, &setup.cfg)?;

    let mut decided = Vec::with_capacity(n);
    let mut phase1_metrics = Vec::with_capacity(n);
    for user in 1..=n {
        let det = gml_detect(&r, user, &setup.walsh)?;
        decided.push(det.bit);
        phase1_metrics.push((det.metric_b0, det.metric_b1));
    }

    Ok(PeriodOutcome {
        decided_bits: decided,
        true_bits: bits.to_vec(),
        relay_decode_flags: Vec::new(),
        phase1_metrics,
        phase2_metrics: vec![(0.0, 0.0); n],
    })
}
