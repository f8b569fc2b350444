//! Closed-form/series evaluation of link and system BER and normalized
//! throughput, independent of the Monte Carlo simulator.
//!
//! The chain: a conditional BER for a given received SNR, gamma
//! distributions for the per-link SNRs (Nakagami-m multipath power sums
//! with path loss and the cooperative energy split), a series density for
//! the combined destination SNR, and numerical averaging of the conditional
//! BER over those densities.

pub mod gamma_sum;
pub(crate) mod quad;
pub mod special;

pub use gamma_sum::{sum_gamma_pdf, SumGammaPdf};

use crate::channel::LinkGeometry;
use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-10;
const ABS_TOL: f64 = 1e-16;

/// Shape/scale pair of a gamma-distributed link SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    shape: f64,
    scale: f64,
}

impl GammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) || !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!(
                "gamma parameters must be finite and positive, got shape {shape}, scale {scale}"
            )));
        }
        Ok(GammaParams { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    /// Integration cutoff with tail mass far below the quadrature tolerance.
    fn upper_bound(&self) -> f64 {
        self.scale * (self.shape + 40.0 * self.shape.sqrt() + 40.0)
    }
}

/// System parameters the analytical chain needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    n_users: usize,
    beta: usize,
    m: f64,
    paths: usize,
    geometry: LinkGeometry,
    eb_over_n0: f64,
}

impl SystemConfig {
    /// `eb_over_n0` is linear (not dB). Cooperative analysis needs at least
    /// two users.
    pub fn new(
        n_users: usize,
        beta: usize,
        m: f64,
        paths: usize,
        geometry: LinkGeometry,
        eb_over_n0: f64,
    ) -> Result<Self> {
        if n_users < 2 {
            return Err(Error::Config(format!(
                "cooperative analysis needs at least 2 users, got {n_users}"
            )));
        }
        if beta < 2 {
            return Err(Error::Config(format!(
                "beta must be at least 2, got {beta}"
            )));
        }
        if !(m.is_finite() && m >= 0.5) {
            return Err(Error::Config(format!(
                "fading factor must be finite and >= 0.5, got {m}"
            )));
        }
        if paths == 0 {
            return Err(Error::Config("need at least one path".into()));
        }
        if !(eb_over_n0.is_finite() && eb_over_n0 > 0.0) {
            return Err(Error::Config(format!(
                "Eb/N0 must be finite and positive, got {eb_over_n0}"
            )));
        }
        Ok(SystemConfig {
            n_users,
            beta,
            m,
            paths,
            geometry,
            eb_over_n0,
        })
    }

    pub fn from_db(
        n_users: usize,
        beta: usize,
        m: f64,
        paths: usize,
        geometry: LinkGeometry,
        eb_n0_db: f64,
    ) -> Result<Self> {
        Self::new(
            n_users,
            beta,
            m,
            paths,
            geometry,
            10f64.powf(eb_n0_db / 10.0),
        )
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn geometry(&self) -> LinkGeometry {
        self.geometry
    }

    pub fn eb_over_n0(&self) -> f64 {
        self.eb_over_n0
    }

    fn ml(&self) -> f64 {
        self.m * self.paths as f64
    }
}

/// Conditional BER of a link at received SNR `gamma` with sub-spreading
/// factor `beta`:
///
/// `BER(gamma) = erfc(gamma / sqrt(4 gamma + 2 beta)) / 2`
///
/// which is `erfc([(4/g)(1 + beta/(2g))]^(-1/2)) / 2` in a form that stays
/// stable for extreme `gamma`. Strictly decreasing in `gamma`, strictly
/// increasing in `beta`, valued in (0, 1/2).
pub fn conditional_ber(gamma: f64, beta: usize) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Config(format!(
            "SNR must be finite and positive, got {gamma}"
        )));
    }
    Ok(conditional_ber_raw(gamma, beta as f64))
}

#[inline]
fn conditional_ber_raw(gamma: f64, beta: f64) -> f64 {
    0.5 * special::erfc(gamma / (4.0 * gamma + 2.0 * beta).sqrt())
}

/// Source-to-relay SNR distribution: Gamma(mL, (Eb/N0) / (2 m L d_sr^2)).
/// All relays decode independently with identical statistics, so a single
/// relay link's parameters describe the equivalent S->R SNR.
pub fn gamma_params_sr(cfg: &SystemConfig) -> GammaParams {
    let ml = cfg.ml();
    GammaParams {
        shape: ml,
        scale: cfg.eb_over_n0 / (2.0 * ml * cfg.geometry.d_sr * cfg.geometry.d_sr),
    }
}

/// Source-to-destination SNR distribution: Gamma(mL, (Eb/N0) / (2 m L d_sd^2)).
pub fn gamma_params_sd(cfg: &SystemConfig) -> GammaParams {
    let ml = cfg.ml();
    GammaParams {
        shape: ml,
        scale: cfg.eb_over_n0 / (2.0 * ml * cfg.geometry.d_sd * cfg.geometry.d_sd),
    }
}

/// Combined relay-to-destination SNR over the N-1 forwarded copies:
/// Gamma((N-1) m L, (Eb/N0) / (2 (N-1) m L d_rd^2)).
pub fn gamma_params_rd(cfg: &SystemConfig) -> GammaParams {
    let x = (cfg.n_users - 1) as f64 * cfg.ml();
    GammaParams {
        shape: x,
        scale: cfg.eb_over_n0 / (2.0 * x * cfg.geometry.d_rd * cfg.geometry.d_rd),
    }
}

/// Averages the conditional BER over a gamma-distributed link SNR.
pub fn link_ber(p: &GammaParams, beta: usize) -> Result<f64> {
    let b = beta as f64;
    let (shape, scale) = (p.shape, p.scale);
    // Substituting g = t^2 removes the integrable endpoint singularity of
    // the density for shapes below 1.
    let upper = p.upper_bound().sqrt();
    quad::integrate(
        &|t| {
            let g = t * t;
            conditional_ber_raw(g, b) * special::gamma_pdf(g, shape, scale) * 2.0 * t
        },
        0.0,
        upper,
        REL_TOL,
        ABS_TOL,
    )
}

/// Destination BER: conditional BER averaged over the density of
/// `gamma_sd + gamma_rd`.
pub fn destination_ber(p_sd: &GammaParams, p_rd: &GammaParams, beta: usize) -> Result<f64> {
    let pdf = SumGammaPdf::new(*p_sd, *p_rd)?;
    let b = beta as f64;
    let upper = (p_sd.upper_bound() + p_rd.upper_bound()).sqrt();
    quad::integrate(
        &|t| {
            let g = t * t;
            conditional_ber_raw(g, b) * pdf.density(g) * 2.0 * t
        },
        0.0,
        upper,
        REL_TOL,
        ABS_TOL,
    )
}

/// Decode-and-forward BER combination.
pub fn combine_df_ber(ber_sr: f64, ber_sd: f64, ber_d: f64) -> f64 {
    ber_sr * ber_sd + (1.0 - ber_sr) * ber_d
}

/// End-to-end analytical BER of the cooperative system.
pub fn system_ber_cc(cfg: &SystemConfig) -> Result<f64> {
    let sr = link_ber(&gamma_params_sr(cfg), cfg.beta)?;
    let sd = link_ber(&gamma_params_sd(cfg), cfg.beta)?;
    let d = destination_ber(&gamma_params_sd(cfg), &gamma_params_rd(cfg), cfg.beta)?;
    Ok(combine_df_ber(sr, sd, d))
}

/// Which system a throughput figure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThroughputSystem {
    Cc,
    Nc,
    Mimo,
}

/// Normalized throughput: `1 - ber` for the cooperative and
/// non-cooperative systems; the MIMO variant carries the (N-1)/N factor
/// because one of its N users never sends a message of its own.
pub fn throughput(ber: f64, system: ThroughputSystem, n_users: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&ber) || !ber.is_finite() {
        return Err(Error::Config(format!("BER must lie in [0, 1], got {ber}")));
    }
    match system {
        ThroughputSystem::Cc | ThroughputSystem::Nc => Ok(1.0 - ber),
        ThroughputSystem::Mimo => {
            if n_users < 2 {
                return Err(Error::Config(format!(
                    "MIMO throughput needs at least 2 users, got {n_users}"
                )));
            }
            let n = n_users as f64;
            Ok((n - 1.0) / n * (1.0 - ber))
        }
    }
}
