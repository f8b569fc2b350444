//! Density of the sum of two independent gamma variates.
//!
//! Equal scales collapse to a single gamma density with merged shape.
//! Distinct scales use the Moschopoulos expansion: a mixture of gamma
//! densities on the smaller scale y0, with weights C*xi_i computed by the
//! classic convolution recursion. Because exactly one of the two addends
//! carries the non-minimal scale, the recursion telescopes to O(1) work per
//! term. Weights are tracked in log space so the leading coefficient C may
//! underflow without harm.

use super::special::{gamma_pdf, ln_gamma};
use super::GammaParams;
use crate::error::{Error, Result};

/// Scales closer than this (relatively) use the closed-form branch.
pub const EQUAL_SCALE_REL_TOL: f64 = 1e-12;
/// An addend whose mean is below this fraction of the other's is dropped.
const NEGLIGIBLE_MEAN_REL: f64 = 1e-12;
/// Build stops once the un-accumulated mixture mass falls below this.
const MASS_TOL: f64 = 1e-13;
/// Hard cap on series terms.
pub const MAX_TERMS: usize = 100_000;
/// Residual mass above this at the cap is a convergence failure.
const RESIDUAL_OK: f64 = 1e-9;
/// Per-evaluation early-stop: relative term contribution threshold ...
const TERM_REL_TOL: f64 = 1e-13;
/// ... sustained for this many consecutive terms.
const TERM_STOP_RUN: usize = 5;

#[derive(Debug, Clone)]
enum Form {
    /// One addend's mean is negligible; the density is the other's.
    SingleComponent { shape: f64, scale: f64 },
    /// y2 = y3 within tolerance: Gamma(x2 + x3, y2).
    EqualScale { shape: f64, scale: f64 },
    Series {
        rho: f64,
        y0: f64,
        /// ln(C xi_i) - ln Gamma(rho+i) - (rho+i) ln y0, per term.
        log_coeffs: Vec<f64>,
        residual_mass: f64,
    },
}

/// Prebuilt density of `gamma_2 + gamma_3` for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SumGammaPdf {
    p2: GammaParams,
    p3: GammaParams,
    form: Form,
}

impl SumGammaPdf {
    pub fn new(p2: GammaParams, p3: GammaParams) -> Result<Self> {
        let form = build_form(p2, p3)?;
        Ok(SumGammaPdf { p2, p3, form })
    }

    pub fn params(&self) -> (GammaParams, GammaParams) {
        (self.p2, self.p3)
    }

    /// Number of stored series terms (0 for the closed-form branches).
    pub fn terms(&self) -> usize {
        match &self.form {
            Form::Series { log_coeffs, .. } => log_coeffs.len(),
            _ => 0,
        }
    }

    /// Mixture mass not captured by the stored terms.
    pub fn residual_mass(&self) -> f64 {
        match &self.form {
            Form::Series { residual_mass, .. } => *residual_mass,
            _ => 0.0,
        }
    }

    /// Density at `gamma_d`; requires `gamma_d > 0`.
    pub fn pdf(&self, gamma_d: f64) -> Result<f64> {
        if !(gamma_d.is_finite() && gamma_d > 0.0) {
            return Err(Error::Config(format!(
                "density argument must be finite and positive, got {gamma_d}"
            )));
        }
        Ok(self.density(gamma_d))
    }

    /// Unchecked density (0 for non-positive arguments); quadrature hot path.
    pub(crate) fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.form {
            Form::SingleComponent { shape, scale } | Form::EqualScale { shape, scale } => {
                gamma_pdf(x, *shape, *scale)
            }
            Form::Series {
                rho,
                y0,
                log_coeffs,
                ..
            } => {
                let ln_x = x.ln();
                let decay = -x / y0;
                let mut sum = 0.0;
                let mut small_run = 0;
                for (i, lc) in log_coeffs.iter().enumerate() {
                    let term = (lc + (rho + i as f64 - 1.0) * ln_x + decay).exp();
                    sum += term;
                    if term < TERM_REL_TOL * sum {
                        small_run += 1;
                        if small_run >= TERM_STOP_RUN {
                            break;
                        }
                    } else {
                        small_run = 0;
                    }
                }
                sum
            }
        }
    }
}

fn build_form(p2: GammaParams, p3: GammaParams) -> Result<Form> {
    let (x2, y2) = (p2.shape(), p2.scale());
    let (x3, y3) = (p3.shape(), p3.scale());

    let mean2 = x2 * y2;
    let mean3 = x3 * y3;
    if mean3 <= NEGLIGIBLE_MEAN_REL * mean2 {
        return Ok(Form::SingleComponent {
            shape: x2,
            scale: y2,
        });
    }
    if mean2 <= NEGLIGIBLE_MEAN_REL * mean3 {
        return Ok(Form::SingleComponent {
            shape: x3,
            scale: y3,
        });
    }

    if (y2 - y3).abs() <= EQUAL_SCALE_REL_TOL * y2.max(y3) {
        return Ok(Form::EqualScale {
            shape: x2 + x3,
            scale: y2,
        });
    }

    let rho = x2 + x3;
    let y0 = y2.min(y3);
    let (x_big, y_big) = if y2 > y3 { (x2, y2) } else { (x3, y3) };
    let b = 1.0 - y0 / y_big; // in (0, 1)
    let log_c = x2 * (y0 / y2).ln() + x3 * (y0 / y3).ln();
    let ln_y0 = y0.ln();

    // xi_{i+1} = x_big/(i+1) * sum_{j=1..i+1} b^j xi_{i+1-j}; the inner sum
    // obeys S_{i+1} = b (xi_i + S_i), so each term costs O(1). xi and S are
    // rescaled together when they grow, with the factor folded into
    // log_scale, so the recursion never overflows.
    let mut xi = 1.0f64;
    let mut s = 0.0f64;
    let mut log_scale = 0.0f64;
    let mut mass = 0.0f64;
    let mut log_coeffs = Vec::with_capacity(256);
    let mut i = 0usize;
    loop {
        let log_w = log_c + log_scale + xi.ln();
        mass += log_w.exp();
        let a = rho + i as f64;
        log_coeffs.push(log_w - ln_gamma(a) - a * ln_y0);

        let residual = (1.0 - mass).max(0.0);
        if residual <= MASS_TOL {
            return Ok(Form::Series {
                rho,
                y0,
                log_coeffs,
                residual_mass: residual,
            });
        }
        i += 1;
        if i >= MAX_TERMS {
            if residual <= RESIDUAL_OK {
                return Ok(Form::Series {
                    rho,
                    y0,
                    log_coeffs,
                    residual_mass: residual,
                });
            }
            return Err(Error::SeriesNotConverged { residual, terms: i });
        }
        s = b * (xi + s);
        xi = x_big * s / i as f64;
        if xi > 1e250 {
            let shrink = 1e-200;
            xi *= shrink;
            s *= shrink;
            log_scale -= shrink.ln();
        }
    }
}

/// One-shot evaluation of the sum density (prefer [`SumGammaPdf`] when
/// integrating).
pub fn sum_gamma_pdf(p2: GammaParams, p3: GammaParams, gamma_d: f64) -> Result<f64> {
    SumGammaPdf::new(p2, p3)?.pdf(gamma_d)
}
