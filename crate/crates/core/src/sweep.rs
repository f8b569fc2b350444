//! Monte Carlo sweep engine: runs the cooperative and baseline simulators
//! and the analytical curves across an Eb/N0 grid, with deterministic
//! parallelism and CSV output.
//!
//! Determinism contract: identical `SweepConfig` (including master seed)
//! produces identical results regardless of worker count. Work is split
//! into fixed-size batches whose random streams derive from
//! (master_seed, point, system, batch); waves of batches are sized by the
//! accumulated integer counts only, and integer aggregation is
//! order-independent. The sole non-deterministic output is the wall_ms
//! telemetry column.

use crate::analysis::{self, GammaParams, SumGammaPdf, SystemConfig, ThroughputSystem};
use crate::channel::{ChannelProfile, LinkGeometry};
use crate::cooperation::{run_cc_period, run_nc_period, EnergyPolicy, NoiseConfig, SimSetup};
use crate::error::{Error, Result};
use crate::modem::ModulationConfig;
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::time::Instant;

pub const DEFAULT_MIN_ERRORS: u64 = 100;
pub const DEFAULT_MAX_BITS: u64 = 100_000_000;

const PERIODS_PER_BATCH: u64 = 64;
const FIRST_WAVE_BATCHES: u64 = 4;

/// Which curve a sweep row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemId {
    CcSim,
    NcSim,
    CcAnalytical,
}

impl SystemId {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemId::CcSim => "cc_sim",
            SystemId::NcSim => "nc_sim",
            SystemId::CcAnalytical => "cc_analytical",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "cc_sim" => Ok(SystemId::CcSim),
            "nc_sim" => Ok(SystemId::NcSim),
            "cc_analytical" => Ok(SystemId::CcAnalytical),
            other => Err(Error::Parse(format!("unknown system '{other}'"))),
        }
    }

    fn index(&self) -> u64 {
        match self {
            SystemId::CcSim => 0,
            SystemId::NcSim => 1,
            SystemId::CcAnalytical => 2,
        }
    }
}

/// Full description of one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub systems: Vec<SystemId>,
    pub n_users: usize,
    pub beta: usize,
    pub m: f64,
    pub paths: usize,
    pub delays: Vec<usize>,
    pub geometry: LinkGeometry,
    pub grid_db: Vec<f64>,
    pub min_errors: u64,
    pub max_bits: u64,
    pub master_seed: u64,
    pub eb: f64,
    /// Diagnostic: run the simulators without noise (analytical rows are
    /// unaffected).
    pub noiseless: bool,
    /// Worker threads for batch parallelism; `None` uses the ambient pool.
    pub workers: Option<usize>,
}

impl SweepConfig {
    /// The default four-user configuration: N=4, beta=32, m=2, L=2 with
    /// delays (0, 1) chip and unit distance ratios.
    pub fn four_user_reference() -> Self {
        SweepConfig {
            systems: vec![SystemId::CcSim, SystemId::NcSim, SystemId::CcAnalytical],
            n_users: 4,
            beta: 32,
            m: 2.0,
            paths: 2,
            delays: vec![0, 1],
            geometry: LinkGeometry::unit(),
            grid_db: (0..=20).step_by(2).map(f64::from).collect(),
            min_errors: DEFAULT_MIN_ERRORS,
            max_bits: DEFAULT_MAX_BITS,
            master_seed: 1,
            eb: 1.0,
            noiseless: false,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.systems.is_empty() {
            return Err(Error::Config("no systems requested".into()));
        }
        if self.grid_db.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if !self.grid_db.iter().all(|d| d.is_finite()) {
            return Err(Error::Config("Eb/N0 grid has non-finite entries".into()));
        }
        if !self.grid_db.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "Eb/N0 grid must be strictly increasing".into(),
            ));
        }
        if self.min_errors < 10 {
            return Err(Error::Config(format!(
                "min_errors must be at least 10, got {}",
                self.min_errors
            )));
        }
        if self.max_bits < self.n_users as u64 {
            return Err(Error::Config("max_bits below one period".into()));
        }
        if !(self.eb.is_finite() && self.eb > 0.0) {
            return Err(Error::Config(format!(
                "bit energy must be finite and positive, got {}",
                self.eb
            )));
        }
        // Constructors double as validators for the remaining fields.
        ModulationConfig::new(self.n_users, self.beta)?;
        ChannelProfile::new(self.paths, self.m, self.delays.clone())?;
        let needs_analysis = self.systems.contains(&SystemId::CcAnalytical);
        let needs_cc = needs_analysis || self.systems.contains(&SystemId::CcSim);
        if needs_cc && self.n_users < 2 {
            return Err(Error::Config(
                "cooperative systems need at least 2 users".into(),
            ));
        }
        Ok(())
    }

    fn setup_for(&self, eb_n0_db: f64) -> Result<SimSetup> {
        let noise = if self.noiseless {
            NoiseConfig::noiseless()
        } else {
            NoiseConfig::from_eb_n0_db(self.eb, eb_n0_db)?
        };
        SimSetup::new(
            ModulationConfig::new(self.n_users, self.beta)?,
            ChannelProfile::new(self.paths, self.m, self.delays.clone())?,
            self.geometry,
            EnergyPolicy::new(self.eb)?,
            noise,
        )
    }

    fn system_config(&self, eb_n0_db: f64) -> Result<SystemConfig> {
        SystemConfig::from_db(
            self.n_users,
            self.beta,
            self.m,
            self.paths,
            self.geometry,
            eb_n0_db,
        )
    }
}

/// One (grid point, system) record.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub eb_n0_db: f64,
    pub system: SystemId,
    pub ber: f64,
    pub stderr: f64,
    pub bits: u64,
    pub errors: u64,
    pub throughput: f64,
    pub wall_ms: f64,
    /// Destination errors split by user (empty for analytical rows); not
    /// part of the CSV schema.
    pub per_user_errors: Vec<u64>,
}

/// Ordered sweep records: grid-major, then systems in configured order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
}

pub const CSV_HEADER: &str = "eb_n0_db,system,ber,stderr,bits,errors,throughput,wall_ms";

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.points.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt_g10(p.eb_n0_db),
                p.system.as_str(),
                fmt_g10(p.ber),
                fmt_g10(p.stderr),
                p.bits,
                p.errors,
                fmt_g10(p.throughput),
                fmt_g10(p.wall_ms),
            );
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<SweepResult> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header '{CSV_HEADER}', got {other:?}"
                )))
            }
        }
        let mut points = Vec::new();
        for (ln, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 8 {
                return Err(Error::Parse(format!(
                    "row {}: expected 8 columns, got {}",
                    ln + 2,
                    cols.len()
                )));
            }
            let num = |i: usize| -> Result<f64> {
                cols[i]
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: column {}: {e}", ln + 2, i + 1)))
            };
            let int = |i: usize| -> Result<u64> {
                cols[i]
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("row {}: column {}: {e}", ln + 2, i + 1)))
            };
            points.push(PointResult {
                eb_n0_db: num(0)?,
                system: SystemId::parse(cols[1])?,
                ber: num(2)?,
                stderr: num(3)?,
                bits: int(4)?,
                errors: int(5)?,
                throughput: num(6)?,
                wall_ms: num(7)?,
                per_user_errors: Vec::new(),
            });
        }
        Ok(SweepResult { points })
    }

    pub fn rows_for(&self, system: SystemId) -> impl Iterator<Item = &PointResult> {
        self.points.iter().filter(move |p| p.system == system)
    }
}

/// Drops the trailing wall_ms column: the canonical form for determinism
/// comparisons (wall time is telemetry, everything else is contractually
/// reproducible).
pub fn strip_timing_column(csv: &str) -> String {
    csv.lines()
        .map(|line| match line.rfind(',') {
            Some(idx) => &line[..idx],
            None => line,
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Formats with 10 significant digits, trimming trailing zeros (C's %.10g).
pub fn fmt_g10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.9e}", x);
    let epos = sci.find('e').expect("exponent marker");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent digits");
    if (-4..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let mut s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let mut mant = sci[..epos].to_string();
        if mant.contains('.') {
            while mant.ends_with('0') {
                mant.pop();
            }
            if mant.ends_with('.') {
                mant.pop();
            }
        }
        format!("{mant}e{exp}")
    }
}

#[derive(Debug, Default, Clone)]
struct SimTally {
    bits: u64,
    errors: u64,
    per_user: Vec<u64>,
}

impl SimTally {
    fn merge(&mut self, other: &SimTally) {
        self.bits += other.bits;
        self.errors += other.errors;
        if self.per_user.is_empty() {
            self.per_user = other.per_user.clone();
        } else {
            for (a, b) in self.per_user.iter_mut().zip(&other.per_user) {
                *a += b;
            }
        }
    }
}

fn run_batch(
    setup: &SimSetup,
    system: SystemId,
    cfg: &SweepConfig,
    point_idx: u64,
    batch_idx: u64,
) -> Result<SimTally> {
    let n = cfg.n_users;
    let mut rng = stream_rng(cfg.master_seed, point_idx, system.index(), batch_idx);
    let mut tally = SimTally {
        bits: 0,
        errors: 0,
        per_user: vec![0; n],
    };
    let mut bits = vec![0u8; n];
    for _ in 0..PERIODS_PER_BATCH {
        for b in bits.iter_mut() {
            *b = u8::from(rng.gen::<bool>());
        }
        let outcome = match system {
            SystemId::CcSim => run_cc_period(setup, &bits, &mut rng)?,
            SystemId::NcSim => run_nc_period(setup, &bits, &mut rng)?,
            SystemId::CcAnalytical => unreachable!("analytical rows are not simulated"),
        };
        tally.bits += n as u64;
        for (u, (d, t)) in outcome
            .decided_bits
            .iter()
            .zip(&outcome.true_bits)
            .enumerate()
        {
            if d != t {
                tally.errors += 1;
                tally.per_user[u] += 1;
            }
        }
    }
    Ok(tally)
}

fn run_point_sim(
    cfg: &SweepConfig,
    system: SystemId,
    point_idx: usize,
    db: f64,
) -> Result<SimTally> {
    let setup = cfg.setup_for(db)?;
    let mut tally = SimTally::default();
    let mut next_batch: u64 = 0;
    loop {
        let wave_batches = if tally.bits == 0 {
            FIRST_WAVE_BATCHES
        } else {
            // Aim just past min_errors based on the running estimate; cap
            // growth so a bad early estimate cannot trigger a huge wave.
            let p = tally.errors.max(1) as f64 / tally.bits as f64;
            let deficit = cfg.min_errors.saturating_sub(tally.errors).max(1);
            let need_bits = (1.3 * deficit as f64 / p).ceil() as u64;
            let capped = need_bits
                .min(3 * tally.bits)
                .min(cfg.max_bits.saturating_sub(tally.bits))
                .max(1);
            let periods = capped.div_ceil(cfg.n_users as u64);
            periods.div_ceil(PERIODS_PER_BATCH).max(1)
        };
        let ids: Vec<u64> = (next_batch..next_batch + wave_batches).collect();
        next_batch += wave_batches;
        let results: Result<Vec<SimTally>> = ids
            .par_iter()
            .map(|&b| run_batch(&setup, system, cfg, point_idx as u64, b))
            .collect();
        for r in &results? {
            tally.merge(r);
        }
        if tally.errors >= cfg.min_errors || tally.bits >= cfg.max_bits {
            return Ok(tally);
        }
    }
}

fn sweep_inner(cfg: &SweepConfig) -> Result<SweepResult> {
    let mut points = Vec::with_capacity(cfg.grid_db.len() * cfg.systems.len());
    for (point_idx, &db) in cfg.grid_db.iter().enumerate() {
        for &system in &cfg.systems {
            let start = Instant::now();
            let point = match system {
                SystemId::CcAnalytical => {
                    let ber = analysis::system_ber_cc(&cfg.system_config(db)?).map_err(|e| {
                        Error::Numerical(format!("analytical point at {db} dB: {e}"))
                    })?;
                    PointResult {
                        eb_n0_db: db,
                        system,
                        ber,
                        stderr: 0.0,
                        bits: 0,
                        errors: 0,
                        throughput: analysis::throughput(ber, ThroughputSystem::Cc, cfg.n_users)?,
                        wall_ms: start.elapsed().as_secs_f64() * 1e3,
                        per_user_errors: Vec::new(),
                    }
                }
                SystemId::CcSim | SystemId::NcSim => {
                    let tally = run_point_sim(cfg, system, point_idx, db)?;
                    let ber = tally.errors as f64 / tally.bits as f64;
                    let stderr = (ber * (1.0 - ber) / tally.bits as f64).sqrt();
                    let kind = if system == SystemId::CcSim {
                        ThroughputSystem::Cc
                    } else {
                        ThroughputSystem::Nc
                    };
                    PointResult {
                        eb_n0_db: db,
                        system,
                        ber,
                        stderr,
                        bits: tally.bits,
                        errors: tally.errors,
                        throughput: analysis::throughput(ber, kind, cfg.n_users)?,
                        wall_ms: start.elapsed().as_secs_f64() * 1e3,
                        per_user_errors: tally.per_user,
                    }
                }
            };
            points.push(point);
        }
    }
    Ok(SweepResult { points })
}

/// Runs the sweep described by `cfg`. Results are deterministic given the
/// master seed, independent of worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    match cfg.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| sweep_inner(cfg))
        }
        None => sweep_inner(cfg),
    }
}

/// Histogram cross-validation of the sum-of-gammas density.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfValidation {
    pub samples: u64,
    pub bins: usize,
    pub range_hi: f64,
    /// Integrated absolute error between the sampled histogram and the
    /// series density.
    pub iae: f64,
    pub pass: bool,
    /// Mixture mass the truncated series left behind.
    pub residual_mass: f64,
}

pub const PDF_VALIDATION_THRESHOLD: f64 = 5e-3;
const PDF_VALIDATION_BINS: usize = 128;

/// Draws `samples` sums of independent gamma pairs and compares their
/// histogram against the series density. Requires `samples >= 1e5`.
pub fn validate_pdf(
    p2: GammaParams,
    p3: GammaParams,
    samples: u64,
    seed: u64,
) -> Result<PdfValidation> {
    if samples < 100_000 {
        return Err(Error::Config(format!(
            "need at least 1e5 samples for a meaningful histogram, got {samples}"
        )));
    }
    let pdf = SumGammaPdf::new(p2, p3)?;

    let mean = p2.mean() + p3.mean();
    let var = p2.shape() * p2.scale() * p2.scale() + p3.shape() * p3.scale() * p3.scale();
    let hi = mean + 12.0 * var.sqrt();
    let bw = hi / PDF_VALIDATION_BINS as f64;

    let mut rng = stream_rng(seed, 0, 3, 0);
    let g2 = rand_distr::Gamma::new(p2.shape(), p2.scale())
        .map_err(|e| Error::Config(format!("gamma distribution: {e}")))?;
    let g3 = rand_distr::Gamma::new(p3.shape(), p3.scale())
        .map_err(|e| Error::Config(format!("gamma distribution: {e}")))?;
    let mut counts = vec![0u64; PDF_VALIDATION_BINS];
    let mut beyond = 0u64;
    use rand_distr::Distribution;
    for _ in 0..samples {
        let s = g2.sample(&mut rng) + g3.sample(&mut rng);
        let bin = (s / bw) as usize;
        if bin < PDF_VALIDATION_BINS {
            counts[bin] += 1;
        } else {
            beyond += 1;
        }
    }

    let n = samples as f64;
    let mut iae = 0.0;
    let mut expected_mass = 0.0;
    for (i, &count) in counts.iter().enumerate() {
        let a = i as f64 * bw;
        let b = a + bw;
        // Simpson inside the bin: mean density, not midpoint density.
        let expected =
            (pdf.density(a.max(1e-300)) + 4.0 * pdf.density(0.5 * (a + b)) + pdf.density(b)) / 6.0;
        let empirical = count as f64 / (n * bw);
        iae += (empirical - expected).abs() * bw;
        expected_mass += expected * bw;
    }
    let expected_tail = (1.0 - expected_mass).max(0.0);
    iae += (beyond as f64 / n - expected_tail).abs();

    Ok(PdfValidation {
        samples,
        bins: PDF_VALIDATION_BINS,
        range_hi: hi,
        iae,
        pass: iae < PDF_VALIDATION_THRESHOLD,
        residual_mass: pdf.residual_mass(),
    })
}

/// Parses a two-column `(eb_n0_db, ber)` CSV; one optional header line.
pub fn parse_ber_curve(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(Error::Parse(format!(
                "line {}: expected 2 columns, got {}",
                i + 1,
                cols.len()
            )));
        }
        match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
            (Ok(db), Ok(ber)) => {
                if !(0.0..=1.0).contains(&ber) {
                    return Err(Error::Parse(format!(
                        "line {}: BER {ber} outside [0, 1]",
                        i + 1
                    )));
                }
                if !db.is_finite() {
                    return Err(Error::Parse(format!("line {}: non-finite Eb/N0", i + 1)));
                }
                rows.push((db, ber));
            }
            _ if i == 0 && rows.is_empty() => {} // header line
            _ => {
                return Err(Error::Parse(format!("line {}: not numeric", i + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(rows)
}

/// One throughput table row.
#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputRow {
    pub eb_n0_db: f64,
    pub eta_cc: Option<f64>,
    pub eta_nc: Option<f64>,
    pub eta_mimo: Option<f64>,
    /// True where the CC/NC ordering flips relative to the previous point.
    pub crossover: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThroughputReport {
    pub rows: Vec<ThroughputRow>,
}

impl ThroughputReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eb_n0_db,eta_cc,eta_nc,eta_mimo,cc_vs_nc_crossover\n");
        let field = |v: Option<f64>| v.map(fmt_g10).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_g10(r.eb_n0_db),
                field(r.eta_cc),
                field(r.eta_nc),
                field(r.eta_mimo),
                r.crossover,
            );
        }
        out
    }
}

/// Builds the throughput table from sweep curves; simulated CC rows are
/// preferred over analytical ones. A MIMO BER curve, when supplied, must
/// share the sweep's grid.
pub fn throughput_report(
    curves: &SweepResult,
    mimo_ber: Option<&[(f64, f64)]>,
    n_users: usize,
) -> Result<ThroughputReport> {
    let mut grid: Vec<f64> = Vec::new();
    for p in &curves.points {
        if !grid.contains(&p.eb_n0_db) {
            grid.push(p.eb_n0_db);
        }
    }
    if grid.is_empty() {
        return Err(Error::Config("empty sweep result".into()));
    }
    if let Some(mimo) = mimo_ber {
        if mimo.len() != grid.len()
            || mimo
                .iter()
                .zip(&grid)
                .any(|((db, _), g)| (db - g).abs() > 1e-9)
        {
            return Err(Error::Config(
                "MIMO BER curve grid does not match the sweep grid".into(),
            ));
        }
    }

    let find = |db: f64, system: SystemId| -> Option<&PointResult> {
        curves
            .points
            .iter()
            .find(|p| p.eb_n0_db == db && p.system == system)
    };

    let mut rows: Vec<ThroughputRow> = Vec::with_capacity(grid.len());
    let mut prev_sign: Option<bool> = None;
    for (i, &db) in grid.iter().enumerate() {
        let cc = find(db, SystemId::CcSim).or_else(|| find(db, SystemId::CcAnalytical));
        let nc = find(db, SystemId::NcSim);
        let eta_cc = cc
            .map(|p| analysis::throughput(p.ber, ThroughputSystem::Cc, n_users))
            .transpose()?;
        let eta_nc = nc
            .map(|p| analysis::throughput(p.ber, ThroughputSystem::Nc, n_users))
            .transpose()?;
        let eta_mimo = mimo_ber
            .map(|m| analysis::throughput(m[i].1, ThroughputSystem::Mimo, n_users))
            .transpose()?;
        let crossover = match (eta_cc, eta_nc) {
            (Some(c), Some(n)) if c != n => {
                let sign = c > n;
                let flipped = prev_sign.is_some_and(|p| p != sign);
                prev_sign = Some(sign);
                flipped
            }
            _ => false,
        };
        rows.push(ThroughputRow {
            eb_n0_db: db,
            eta_cc,
            eta_nc,
            eta_mimo,
            crossover,
        });
    }
    Ok(ThroughputReport { rows })
}
