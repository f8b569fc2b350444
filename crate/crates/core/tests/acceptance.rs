//! Release acceptance suite.
//!
//! One test per criterion; each prints a `[criterion N] ... PASS/FAIL`
//! line per check (visible with `--nocapture`) and asserts at the end.
//!
//! Criterion 1 compares the Monte Carlo simulator against the analytical
//! chain at its stated tolerance. The analytical destination model uses a
//! single-correlator conditional BER, while the physical blind two-frame
//! combiner carries a second noise-only correlation term and binomial
//! per-user relay subsets; that model gap grows with SNR (quantified in
//! `cross_validation.rs`), so the upper grid points are expected to exceed
//! the 3-standard-error band. The checks are asserted as stated anyway:
//! this suite reports the honest outcome rather than a widened tolerance.

use dcsk_core::analysis::{self, GammaParams, SumGammaPdf, SystemConfig};
use dcsk_core::channel::{sample_fading, sample_gamma, ChannelProfile, LinkGeometry};
use dcsk_core::chaos::Carrier;
use dcsk_core::cooperation::{run_cc_period, EnergyPolicy, NoiseConfig, SimSetup};
use dcsk_core::modem::{correlation_matrix, gml_detect, modulate, ModulationConfig};
use dcsk_core::sweep::{
    parse_ber_curve, run_sweep, strip_timing_column, throughput_report, validate_pdf, SweepConfig,
    SystemId,
};
use dcsk_core::walsh::WalshMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reference_sweep() -> SweepConfig {
    let mut cfg = SweepConfig::four_user_reference();
    cfg.master_seed = 1;
    cfg
}

#[test]
fn criterion_1_analytical_simulation_agreement() {
    let mut cfg = reference_sweep();
    cfg.systems = vec![SystemId::CcSim, SystemId::CcAnalytical];
    cfg.grid_db = vec![6.0, 8.0, 10.0, 12.0];
    cfg.min_errors = 100;
    let result = run_sweep(&cfg).unwrap();

    let mut all_ok = true;
    let mut report = String::new();
    for &db in &cfg.grid_db {
        let sim = result
            .points
            .iter()
            .find(|p| p.eb_n0_db == db && p.system == SystemId::CcSim)
            .unwrap();
        let ana = result
            .points
            .iter()
            .find(|p| p.eb_n0_db == db && p.system == SystemId::CcAnalytical)
            .unwrap();
        let diff = (sim.ber - ana.ber).abs();
        let band = 3.0 * sim.stderr;
        let ok = diff <= band && sim.errors >= 100;
        all_ok &= ok;
        let line = format!(
            "[criterion 1] {db} dB: sim={:.4e} ({} errors) ana={:.4e} |diff|={:.3e} 3se={:.3e} {}",
            sim.ber,
            sim.errors,
            ana.ber,
            diff,
            band,
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        report.push_str(&line);
        report.push('\n');
    }
    assert!(
        all_ok,
        "analytical-simulation agreement failed at one or more points \
         (the destination's two-frame combiner and per-user relay subsets \
         are absent from the single-correlator analytical model):\n{report}"
    );
}

#[test]
fn criterion_2_system_ordering() {
    // The cooperative/baseline ordering claim lives in the BER 1e-2..1e-4
    // regime (the published deep-BER gain point is not desk-scale); on
    // these curves that window is 16-18 dB. Below the ~14 dB crossover the
    // baseline is ahead, consistent with the throughput crossover the
    // curves show near 10-14 dB.
    let mut cfg = reference_sweep();
    cfg.systems = vec![SystemId::CcSim, SystemId::NcSim];
    cfg.grid_db = vec![16.0, 18.0];
    cfg.min_errors = 200;
    let result = run_sweep(&cfg).unwrap();

    let mut all_ok = true;
    for &db in &cfg.grid_db {
        let cc = result
            .points
            .iter()
            .find(|p| p.eb_n0_db == db && p.system == SystemId::CcSim)
            .unwrap();
        let nc = result
            .points
            .iter()
            .find(|p| p.eb_n0_db == db && p.system == SystemId::NcSim)
            .unwrap();
        let ok = cc.ber < nc.ber && cc.errors >= 100 && nc.errors >= 100;
        all_ok &= ok;
        println!(
            "[criterion 2] {db} dB: cc={:.4e} nc={:.4e} ({} / {} errors) {}",
            cc.ber,
            nc.ber,
            cc.errors,
            nc.errors,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    assert!(
        all_ok,
        "cooperative system must beat the baseline in the 1e-2..1e-4 regime"
    );
}

fn analytical_ber(m: f64, db: f64) -> f64 {
    let cfg = SystemConfig::from_db(4, 32, m, 2, LinkGeometry::unit(), db).unwrap();
    analysis::system_ber_cc(&cfg).unwrap()
}

/// Eb/N0 (dB) where the analytical BER crosses `target`, by bisection.
fn db_at_target(m: f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (5.0, 40.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if analytical_ber(m, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn criterion_3_fading_depth_trend() {
    // Strictly better BER with milder fading at fixed 12 dB.
    let bers: Vec<f64> = [1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|&m| analytical_ber(m, 12.0))
        .collect();
    let decreasing = bers.windows(2).all(|w| w[1] < w[0]);
    println!(
        "[criterion 3] 12 dB BER for m=1..4: {:.4e} {:.4e} {:.4e} {:.4e} {}",
        bers[0],
        bers[1],
        bers[2],
        bers[3],
        if decreasing { "PASS" } else { "FAIL" }
    );

    // Diminishing dB gains at a 1e-4 BER target.
    let dbs: Vec<f64> = [1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|&m| db_at_target(m, 1e-4))
        .collect();
    let gains: Vec<f64> = dbs.windows(2).map(|w| w[0] - w[1]).collect();
    let diminishing = gains[0] > gains[1] && gains[1] > gains[2] && gains[2] > 0.0;
    println!(
        "[criterion 3] gains at BER 1e-4: {:.3} dB > {:.3} dB > {:.3} dB {}",
        gains[0],
        gains[1],
        gains[2],
        if diminishing { "PASS" } else { "FAIL" }
    );
    assert!(decreasing && diminishing);
}

#[test]
fn criterion_4_throughput_relations() {
    let mut cfg = reference_sweep();
    cfg.systems = vec![SystemId::CcSim, SystemId::NcSim];
    cfg.grid_db = vec![12.0, 16.0];
    cfg.min_errors = 100;
    let result = run_sweep(&cfg).unwrap();

    // A monotone MIMO BER curve supplied as an external file would be.
    let mimo = parse_ber_curve("eb_n0_db,ber\n12,0.03\n16,0.002\n").unwrap();
    let report = throughput_report(&result, Some(&mimo), 4).unwrap();

    let mut all_ok = true;
    for row in &report.rows {
        let cc_ber = result
            .points
            .iter()
            .find(|p| p.eb_n0_db == row.eb_n0_db && p.system == SystemId::CcSim)
            .unwrap()
            .ber;
        let eta_cc = row.eta_cc.unwrap();
        let eta_nc = row.eta_nc.unwrap();
        let eta_mimo = row.eta_mimo.unwrap();
        let floor_ok = cc_ber >= 0.25 || eta_cc > 0.75;
        let mimo_lowest = eta_mimo < eta_cc && eta_mimo < eta_nc;
        let ok = floor_ok && mimo_lowest;
        all_ok &= ok;
        println!(
            "[criterion 4] {} dB: eta_cc={:.4} eta_nc={:.4} eta_mimo={:.4} {}",
            row.eb_n0_db,
            eta_cc,
            eta_nc,
            eta_mimo,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    assert!(all_ok);
}

#[test]
fn criterion_5_sum_density_validation() {
    // Reference-derived parameter pair at 1e7 samples.
    let p2 = GammaParams::new(4.0, 1.25).unwrap();
    let p3 = GammaParams::new(12.0, 10.0 / 24.0).unwrap();
    let v = validate_pdf(p2, p3, 10_000_000, 2).unwrap();
    println!(
        "[criterion 5] series vs sampled histogram: IAE={:.3e} (threshold 5e-3) {}",
        v.iae,
        if v.pass { "PASS" } else { "FAIL" }
    );
    assert!(v.pass);

    // Equal-scale closed-form branch.
    let pe = GammaParams::new(8.0, 0.625).unwrap();
    let ve = validate_pdf(pe, pe, 10_000_000, 3).unwrap();
    println!(
        "[criterion 5] equal-scale branch: IAE={:.3e} {}",
        ve.iae,
        if ve.pass { "PASS" } else { "FAIL" }
    );
    assert!(ve.pass);

    // Branch continuity as the scales coalesce.
    let y = 1.25f64;
    let series = SumGammaPdf::new(
        GammaParams::new(4.0, y).unwrap(),
        GammaParams::new(12.0, y * (1.0 + 1e-9)).unwrap(),
    )
    .unwrap();
    let merged = SumGammaPdf::new(
        GammaParams::new(4.0, y).unwrap(),
        GammaParams::new(12.0, y).unwrap(),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for i in 1..=200 {
        let x = i as f64 * 0.25;
        worst = worst.max((series.pdf(x).unwrap() - merged.pdf(x).unwrap()).abs());
    }
    let ok = worst < 1e-8;
    println!(
        "[criterion 5] branch continuity at coalescing scales: worst |diff|={:.2e} {}",
        worst,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

#[test]
fn criterion_6_exact_structural_invariants() {
    // Walsh orthogonality, integer-exact for orders up to 64.
    let mut walsh_ok = true;
    for n in 0..=6u32 {
        let w = WalshMatrix::generate(n);
        for i in 1..=w.order() {
            for j in 1..=w.order() {
                let d: i64 = w
                    .row(i)
                    .unwrap()
                    .iter()
                    .zip(w.row(j).unwrap())
                    .map(|(&a, &b)| i64::from(a) * i64::from(b))
                    .sum();
                let want = if i == j { w.order() as i64 } else { 0 };
                walsh_ok &= d == want;
            }
        }
    }
    println!(
        "[criterion 6] Walsh orthogonality n<=6: {}",
        if walsh_ok { "PASS" } else { "FAIL" }
    );

    // Noiseless flat-channel detection, all 16 patterns at N=4.
    let cfg = ModulationConfig::new(4, 32).unwrap();
    let walsh = WalshMatrix::generate(cfg.walsh_exponent());
    let mut patterns_ok = true;
    for pattern in 0..16u32 {
        let bits: Vec<u8> = (0..4).map(|k| ((pattern >> k) & 1) as u8).collect();
        let mut rx = vec![0.0; cfg.frame_len()];
        for user in 1..=4usize {
            let carrier =
                Carrier::generate(32, 1000 + u64::from(pattern) * 4 + user as u64).unwrap();
            let frame = modulate(&cfg, user, bits[user - 1], &carrier, &walsh, 1.0).unwrap();
            for (acc, c) in rx.iter_mut().zip(frame.chips()) {
                *acc += c;
            }
        }
        let r = correlation_matrix(&rx, &cfg).unwrap();
        for user in 1..=4usize {
            patterns_ok &= gml_detect(&r, user, &walsh).unwrap().bit == bits[user - 1];
        }
    }
    println!(
        "[criterion 6] noiseless 4-user detection, 16 patterns: {}",
        if patterns_ok { "PASS" } else { "FAIL" }
    );

    // Sweep determinism across worker counts (CSV identical up to the
    // wall-time telemetry column).
    let mut sweep_cfg = reference_sweep();
    sweep_cfg.systems = vec![SystemId::CcSim, SystemId::NcSim];
    sweep_cfg.grid_db = vec![6.0, 10.0];
    sweep_cfg.min_errors = 50;
    sweep_cfg.max_bits = 100_000;
    sweep_cfg.workers = Some(1);
    let single = run_sweep(&sweep_cfg).unwrap();
    sweep_cfg.workers = Some(8);
    let parallel = run_sweep(&sweep_cfg).unwrap();
    let deterministic =
        strip_timing_column(&single.to_csv()) == strip_timing_column(&parallel.to_csv());
    println!(
        "[criterion 6] sweep determinism 1 vs 8 workers: {}",
        if deterministic { "PASS" } else { "FAIL" }
    );

    assert!(walsh_ok && patterns_ok && deterministic);
}

#[test]
fn criterion_7_distribution_sanity() {
    // Nakagami moment checks at 1e6 draws for each m.
    let mut moments_ok = true;
    for (i, m) in [0.5, 1.0, 2.0, 4.0].into_iter().enumerate() {
        let profile = ChannelProfile::new(1, m, vec![0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40 + i as u64);
        let n = 1_000_000;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for _ in 0..n {
            let a2 = sample_fading(&profile, &mut rng).gains()[0].powi(2);
            mean += a2;
            m2 += a2 * a2;
        }
        mean /= n as f64;
        let var = m2 / n as f64 - mean * mean;
        let mean_ok = (mean - 1.0).abs() < 0.02;
        let var_ok = (var - 1.0 / m).abs() < 0.02 / m;
        moments_ok &= mean_ok && var_ok;
        println!(
            "[criterion 7] m={m}: E[a^2]={mean:.4} Var[a^2]={var:.4} {}",
            if mean_ok && var_ok { "PASS" } else { "FAIL" }
        );
    }

    // Gamma(1, theta) against the exponential law, KS at level 0.01.
    let theta = 1.3;
    let n = 1_000_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut draws: Vec<f64> = (0..n)
        .map(|_| sample_gamma(1.0, theta, &mut rng).unwrap())
        .collect();
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut d_stat: f64 = 0.0;
    for (i, x) in draws.iter().enumerate() {
        let cdf = 1.0 - (-x / theta).exp();
        d_stat = d_stat
            .max((i + 1) as f64 / n as f64 - cdf)
            .max(cdf - i as f64 / n as f64);
    }
    let critical = 1.628 / (n as f64).sqrt();
    let ks_ok = d_stat < critical;
    println!(
        "[criterion 7] KS gamma(1) vs exponential: D={d_stat:.2e} critical={critical:.2e} {}",
        if ks_ok { "PASS" } else { "FAIL" }
    );

    assert!(moments_ok && ks_ok);
}

#[test]
fn reference_setup_smoke() {
    // The pieces assembled by the sweeps also work standalone.
    let setup = SimSetup::new(
        ModulationConfig::new(4, 32).unwrap(),
        ChannelProfile::new(2, 2.0, vec![0, 1]).unwrap(),
        LinkGeometry::unit(),
        EnergyPolicy::new(1.0).unwrap(),
        NoiseConfig::from_eb_n0_db(1.0, 10.0).unwrap(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let out = run_cc_period(&setup, &[0, 1, 1, 0], &mut rng).unwrap();
    assert_eq!(out.decided_bits.len(), 4);
    assert_eq!(out.relay_decode_flags.len(), 4);
    assert!(out.relay_decode_flags.iter().all(|f| f.len() == 3));
}
