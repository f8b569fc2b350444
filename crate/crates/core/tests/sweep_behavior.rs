//! Sweep engine contracts: determinism, stopping rule, noiseless
//! diagnostics, CSV schema, throughput report, density validation.

use dcsk_core::analysis::GammaParams;
use dcsk_core::sweep::{
    parse_ber_curve, run_sweep, strip_timing_column, throughput_report, validate_pdf, SweepConfig,
    SystemId, CSV_HEADER, PDF_VALIDATION_THRESHOLD,
};
use dcsk_core::Error;

fn small_sweep(workers: Option<usize>) -> SweepConfig {
    let mut cfg = SweepConfig::four_user_reference();
    cfg.systems = vec![SystemId::CcSim, SystemId::NcSim];
    cfg.grid_db = vec![6.0, 10.0];
    cfg.min_errors = 50;
    cfg.max_bits = 200_000;
    cfg.master_seed = 99;
    cfg.workers = workers;
    cfg
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let a = run_sweep(&small_sweep(Some(1))).unwrap();
    let b = run_sweep(&small_sweep(Some(8))).unwrap();
    let c = run_sweep(&small_sweep(Some(3))).unwrap();
    // Everything except wall-time telemetry is byte-identical.
    let canon_a = strip_timing_column(&a.to_csv());
    assert_eq!(canon_a, strip_timing_column(&b.to_csv()));
    assert_eq!(canon_a, strip_timing_column(&c.to_csv()));
    // Per-user tallies agree too.
    for (pa, pb) in a.points.iter().zip(&b.points) {
        assert_eq!(pa.per_user_errors, pb.per_user_errors);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let cfg = small_sweep(Some(2));
    let a = run_sweep(&cfg).unwrap();
    let b = run_sweep(&cfg).unwrap();
    assert_eq!(
        strip_timing_column(&a.to_csv()),
        strip_timing_column(&b.to_csv())
    );
}

#[test]
fn different_seeds_differ() {
    let mut cfg = small_sweep(Some(2));
    let a = run_sweep(&cfg).unwrap();
    cfg.master_seed = 100;
    let b = run_sweep(&cfg).unwrap();
    assert_ne!(
        strip_timing_column(&a.to_csv()),
        strip_timing_column(&b.to_csv())
    );
}

#[test]
fn stopping_rule_meets_error_target_with_tight_stderr() {
    let mut cfg = small_sweep(None);
    cfg.min_errors = 100;
    cfg.grid_db = vec![8.0];
    cfg.max_bits = 10_000_000;
    let result = run_sweep(&cfg).unwrap();
    for p in &result.points {
        assert!(p.errors >= 100, "{:?} stopped early", p.system);
        // errors >= 100 forces stderr <= ber / 10.
        assert!(
            p.stderr <= p.ber / 10.0 + 1e-12,
            "stderr {} vs ber {}",
            p.stderr,
            p.ber
        );
        // The adaptive waves should not overshoot the target wildly at
        // these error rates.
        assert!(p.errors < 3_000, "gross overshoot: {} errors", p.errors);
    }
}

#[test]
fn noiseless_diagnostic_yields_zero_errors() {
    let mut cfg = small_sweep(None);
    cfg.noiseless = true;
    cfg.grid_db = vec![0.0, 10.0];
    cfg.max_bits = 20_000;
    let result = run_sweep(&cfg).unwrap();
    for p in &result.points {
        assert_eq!(p.errors, 0, "{:?} at {} dB", p.system, p.eb_n0_db);
        assert_eq!(p.ber, 0.0);
        // The bit budget stops the run, up to wave granularity.
        assert!(
            p.bits >= cfg.max_bits && p.bits < 2 * cfg.max_bits,
            "{}",
            p.bits
        );
    }
}

#[test]
fn csv_schema_and_analytical_rows() {
    let mut cfg = small_sweep(None);
    cfg.systems = vec![SystemId::CcAnalytical];
    cfg.grid_db = vec![10.0, 12.0];
    let result = run_sweep(&cfg).unwrap();
    let csv = result.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    assert_eq!(row[0], "10");
    assert_eq!(row[1], "cc_analytical");
    assert_eq!(row[4], "0"); // bits
    assert_eq!(row[5], "0"); // errors
    let ber: f64 = row[2].parse().unwrap();
    assert!((ber - 0.129_001_047_4).abs() < 1e-6);
    let throughput: f64 = row[6].parse().unwrap();
    assert!((throughput - (1.0 - ber)).abs() < 1e-12);
}

#[test]
fn throughput_report_from_sweep_and_mimo_file() {
    let mut cfg = small_sweep(None);
    cfg.grid_db = vec![12.0, 16.0];
    cfg.min_errors = 30;
    cfg.max_bits = 2_000_000;
    let result = run_sweep(&cfg).unwrap();

    let mimo_text = "eb_n0_db,ber\n12,0.03\n16,0.002\n";
    let mimo = parse_ber_curve(mimo_text).unwrap();
    let report = throughput_report(&result, Some(&mimo), 4).unwrap();
    assert_eq!(report.rows.len(), 2);
    for row in &report.rows {
        let cc = row.eta_cc.unwrap();
        let nc = row.eta_nc.unwrap();
        let mimo = row.eta_mimo.unwrap();
        assert!(mimo <= 0.75);
        assert!(cc > mimo && nc > mimo, "cc {cc} nc {nc} mimo {mimo}");
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("eb_n0_db,eta_cc,eta_nc,eta_mimo,cc_vs_nc_crossover"));
}

#[test]
fn validate_pdf_equal_scale_branch_passes() {
    let p2 = GammaParams::new(2.0, 0.8).unwrap();
    let p3 = GammaParams::new(2.0, 0.8).unwrap();
    let v = validate_pdf(p2, p3, 10_000_000, 5).unwrap();
    assert!(v.pass, "IAE {} vs {}", v.iae, PDF_VALIDATION_THRESHOLD);
    assert_eq!(v.residual_mass, 0.0);
}

#[test]
fn validate_pdf_reference_parameters_pass() {
    // Shape/scale pairs of the reference configuration at 10 dB.
    let p2 = GammaParams::new(4.0, 1.25).unwrap();
    let p3 = GammaParams::new(12.0, 10.0 / 24.0).unwrap();
    let v = validate_pdf(p2, p3, 10_000_000, 6).unwrap();
    assert!(v.pass, "IAE {}", v.iae);
    assert!(v.residual_mass < 1e-10);
}

#[test]
fn validate_pdf_wildly_separated_scales_reports_residual() {
    let p2 = GammaParams::new(4.0, 1.25).unwrap();
    let p3 = GammaParams::new(12.0, 1.25e-4).unwrap();
    match validate_pdf(p2, p3, 1_000_000, 7) {
        Ok(v) => assert!(v.pass || v.residual_mass > 0.0),
        Err(Error::SeriesNotConverged { residual, .. }) => {
            assert!(residual > 0.0 && residual < 0.1, "residual {residual}");
        }
        Err(e) => panic!("unexpected error: {e}"),
    }
}

#[test]
fn per_user_error_counts_are_symmetric() {
    // All users share the same statistics by construction; the recorded
    // per-user tallies must look like an even multinomial split.
    let mut cfg = small_sweep(None);
    cfg.grid_db = vec![8.0];
    cfg.min_errors = 400;
    cfg.max_bits = 1_000_000;
    let result = run_sweep(&cfg).unwrap();
    for p in &result.points {
        assert!(p.errors <= p.bits);
        let expected = p.errors as f64 / 4.0;
        for (user, &count) in p.per_user_errors.iter().enumerate() {
            let dev = (count as f64 - expected).abs();
            // 5 sigma of a binomial(errors, 1/4) split.
            let sigma = (p.errors as f64 * 0.25 * 0.75).sqrt();
            assert!(
                dev <= 5.0 * sigma,
                "{:?} user {}: {} errors vs expected {:.1} (sigma {:.1})",
                p.system,
                user + 1,
                count,
                expected,
                sigma
            );
        }
        assert_eq!(p.per_user_errors.iter().sum::<u64>(), p.errors);
    }
}

#[test]
fn sweep_rejects_single_user_cooperative_config() {
    let mut cfg = small_sweep(None);
    cfg.n_users = 1;
    assert!(matches!(run_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn csv_parse_rejects_malformed_input() {
    use dcsk_core::sweep::SweepResult;
    assert!(SweepResult::from_csv("not,a,header\n").is_err());
    let bad_row = format!("{CSV_HEADER}\n1,2,3\n");
    assert!(SweepResult::from_csv(&bad_row).is_err());
    let bad_system = format!("{CSV_HEADER}\n6,xx_sim,0.1,0.01,100,10,0.9,1\n");
    assert!(SweepResult::from_csv(&bad_system).is_err());
}
