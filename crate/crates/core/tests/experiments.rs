use std::path::Path;
use std::time::Duration;

use rrfilt::harness::{
    record_csv, run_experiment, snr_sweep, sweep_csv, ExperimentConfig, ExperimentRecord,
    FilterParams, SchemeKind, TrainMode, RECORD_CSV_HEADER, SWEEP_CSV_HEADER,
};

fn small(scheme: SchemeKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::reference(scheme);
    cfg.cdma.users = 4;
    cfg.cdma.chips = 16;
    cfg.cdma.paths = 5;
    cfg.cdma.snr_db = 15.0;
    cfg.cdma.doppler = 1e-3;
    cfg.n_symbols = 200;
    cfg.n_runs = 4;
    cfg.branches = 4;
    cfg
}

fn same_results(a: &ExperimentRecord, b: &ExperimentRecord) -> bool {
    let mut b = b.clone();
    b.wall_time = a.wall_time;
    *a == b
}

#[test]
fn noiseless_single_user_mmse_makes_no_errors() {
    let mut cfg = small(SchemeKind::Mmse);
    cfg.cdma.users = 1;
    cfg.cdma.snr_db = 300.0;
    let rec = run_experiment(&cfg).unwrap();
    assert_eq!(rec.final_ber, 0.0);
    assert!(rec.ber.iter().all(|&b| b == 0.0));
}

#[test]
fn frozen_full_rank_filter_errs_three_quarters_of_the_time() {
    let mut cfg = small(SchemeKind::Fullrank);
    cfg.filters = vec![FilterParams::full_rank(0.0)];
    cfg.n_symbols = 1500;
    cfg.n_runs = 20;
    let rec = run_experiment(&cfg).unwrap();
    let n = (cfg.n_symbols * cfg.n_runs) as f64;
    let sigma = (0.75 * 0.25 / n).sqrt();
    assert!(
        (rec.final_ber - 0.75).abs() <= 4.0 * sigma,
        "BER {}",
        rec.final_ber
    );
    assert!(rec.mse.iter().all(|&m| (m - 1.0).abs() < 1e-12));
}

#[test]
fn records_are_well_formed_for_every_scheme() {
    for scheme in [
        SchemeKind::Fullrank,
        SchemeKind::Clms,
        SchemeKind::Jidf,
        SchemeKind::SchemeA,
        SchemeKind::SchemeB,
        SchemeKind::Mmse,
    ] {
        let mut cfg = small(scheme);
        if scheme == SchemeKind::Clms {
            cfg.filters = vec![FilterParams::full_rank(0.01), FilterParams::full_rank(0.05)];
        }
        let rec = run_experiment(&cfg).unwrap();
        let n = cfg.n_symbols;
        assert_eq!(rec.len(), n);
        assert_eq!(rec.mse.len(), n);
        assert_eq!(rec.branch_mode.len(), n);
        assert_eq!(rec.runs_used + rec.runs_diverged, cfg.n_runs);
        assert!(rec.ber.iter().all(|b| (0.0..=1.0).contains(b)));
        // Cumulative error counts never decrease.
        let runs = rec.runs_used as f64;
        let counts: Vec<f64> = rec
            .ber
            .iter()
            .enumerate()
            .map(|(i, b)| b * (i + 1) as f64 * runs)
            .collect();
        assert!(counts.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{scheme}");
        assert_eq!(
            rec.lambda_a.is_some(),
            matches!(scheme, SchemeKind::SchemeA | SchemeKind::Clms)
        );
        assert_eq!(rec.lambda_b.is_some(), scheme == SchemeKind::SchemeA);
        assert_eq!(
            rec.lambda_c.is_some(),
            matches!(scheme, SchemeKind::SchemeA | SchemeKind::SchemeB)
        );
        let jidf = matches!(
            scheme,
            SchemeKind::Jidf | SchemeKind::SchemeA | SchemeKind::SchemeB
        );
        assert_eq!(
            rec.branch_histogram.len(),
            if jidf { cfg.branches } else { 0 }
        );
        if jidf {
            let total: u64 = rec.branch_histogram.iter().sum();
            assert_eq!(total, (n * rec.runs_used) as u64);
            assert!(rec
                .branch_mode
                .iter()
                .all(|b| b.is_some_and(|b| b < cfg.branches)));
        }
        assert_eq!(rec.complexity.is_some(), scheme != SchemeKind::Mmse);
    }
}

#[test]
fn repeated_runs_are_identical() {
    let mut cfg = small(SchemeKind::SchemeA);
    cfg.train_mode = TrainMode::Semi(50);
    let a = run_experiment(&cfg).unwrap();
    let b = run_experiment(&cfg).unwrap();
    assert!(same_results(&a, &b));
    assert_eq!(record_csv(&a), record_csv(&b));
    cfg.seed += 1;
    assert!(!same_results(&a, &run_experiment(&cfg).unwrap()));
}

#[test]
fn diverging_runs_are_excluded_and_counted() {
    let mut cfg = small(SchemeKind::Fullrank);
    cfg.filters = vec![FilterParams::full_rank(1e3)];
    assert!(run_experiment(&cfg).is_err());
    cfg.filters = vec![FilterParams::full_rank(0.02)];
    let rec = run_experiment(&cfg).unwrap();
    assert_eq!((rec.runs_used, rec.runs_diverged), (cfg.n_runs, 0));
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn record_csv_layout() {
    let mut cfg = small(SchemeKind::SchemeB);
    cfg.n_symbols = 1;
    let rec = run_experiment(&cfg).unwrap();
    let text = record_csv(&rec);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().next().unwrap(), RECORD_CSV_HEADER);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], "1");
    assert!(row[3].is_empty() && row[4].is_empty() && !row[5].is_empty());

    let empty = ExperimentRecord {
        scheme: SchemeKind::Jidf,
        snr_db: 0.0,
        ber: Vec::new(),
        mse: Vec::new(),
        lambda_a: None,
        lambda_b: None,
        lambda_c: None,
        branch_mode: Vec::new(),
        branch_histogram: Vec::new(),
        final_ber: 0.0,
        runs_used: 0,
        runs_diverged: 0,
        complexity: None,
        wall_time: Duration::ZERO,
    };
    assert_eq!(record_csv(&empty), format!("{RECORD_CSV_HEADER}\n"));
}

#[test]
fn csv_values_keep_ten_significant_digits() {
    let rec = run_experiment(&small(SchemeKind::SchemeA)).unwrap();
    let text = record_csv(&rec);
    for (parsed, exact) in csv_column(&text, 1).iter().zip(&rec.mse) {
        assert!((parsed - exact).abs() <= 5e-10 * exact.abs());
    }
    for (parsed, exact) in csv_column(&text, 5)
        .iter()
        .zip(rec.lambda_c.as_ref().unwrap())
    {
        assert!((parsed - exact).abs() <= 5e-10 * exact.abs());
    }
}

#[test]
fn sweep_points_match_single_runs() {
    let cfg = small(SchemeKind::Jidf);
    assert!(snr_sweep(&cfg, &[]).unwrap().is_empty());
    assert_eq!(sweep_csv(&[]), format!("{SWEEP_CSV_HEADER}\n"));

    let points = snr_sweep(&cfg, &[5.0, 12.0]).unwrap();
    assert_eq!(points.len(), 2);
    let mut single = cfg.clone();
    single.cdma.snr_db = 12.0;
    assert!(same_results(&points[1], &run_experiment(&single).unwrap()));
    let text = sweep_csv(&points);
    assert_eq!(text.lines().count(), 3);
    assert_eq!(csv_column(&text, 0), vec![5.0, 12.0]);
}

#[test]
fn shipped_configs_load_and_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = Vec::new();
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert_eq!(
            cfg.scheme.name(),
            path.file_stem().unwrap().to_str().unwrap()
        );
        let mut reference = ExperimentConfig::reference(cfg.scheme);
        reference.cdma.snr_db = 20.0;
        reference.cdma.doppler = 3e-3;
        assert_eq!(cfg, reference, "{}", path.display());
        seen.push(cfg.scheme);
    }
    assert_eq!(seen.len(), 6);
}
