//! Batch runners: statistics, histograms, determinism and cross-checks
//! against the per-state measures.

use densecap::analytics::*;
use densecap::experiments::*;
use densecap::measures::{dcc, negativity, ScenarioKind};
use densecap::preprocess::*;
use densecap::sampling::{derive_sample_seed, haar_mixed_factor};

fn quick() -> MeritSettings {
    MeritSettings { budget: SearchBudget { starts: 3, max_iters: 80, tol: 1e-6 }, gamma_mode: GammaMode::Free }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn histogram_frequencies_sum_to_one() {
    for kind in [ScenarioKind::OneSenderOneReceiver, ScenarioKind::TwoSendersOneReceiver, ScenarioKind::TwoSendersTwoReceivers] {
        let out = run_dcc_experiment(kind, 2, 300, &[], &quick(), 5, &Progress::silent()).unwrap();
        let h = &out.histogram;
        assert!((h.classical_fraction + h.total_frequency() - 1.0).abs() < 1e-9);
        for w in h.bins.windows(2) {
            assert!((w[0].bin_right - w[1].bin_left).abs() < 1e-12);
        }
        let rows = output::histogram_rows(2, h);
        assert_eq!(rows[0].bin_left, rows[0].bin_right);
        assert!((rows.iter().map(|r| r.normalized_frequency).sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn records_match_the_per_state_measures() {
    let kind = ScenarioKind::TwoSendersOneReceiver;
    let out = run_dcc_experiment(kind, 3, 40, &[], &quick(), 17, &Progress::silent()).unwrap();
    let scenario = kind.scenario();
    for (i, r) in out.records.iter().enumerate() {
        assert_eq!(r.sample_index, i);
        let f = haar_mixed_factor(&[2, 2, 2], 3, derive_sample_seed(17, i as u64)).unwrap();
        assert_eq!(r.dcc_before, Some(dcc(&f, &scenario).unwrap()));
        assert!((r.negativity - negativity(&f.to_density(), &[0, 1]).unwrap()).abs() < 1e-12);
    }
    let none = &out.summary[0];
    assert_eq!(none.acting_set, "none");
    assert_eq!(none.n_samples, 40);
    let befores: Vec<f64> = out.records.iter().map(|r| r.before()).collect();
    assert!((none.mean - mean(&befores)).abs() < 1e-12);
    assert!((none.sd - population_sd(&befores)).abs() < 1e-12);
}

#[test]
fn summary_invariants_hold_for_every_acting_set() {
    let acting = [ActingSet::Sender, ActingSet::Receiver, ActingSet::Both];
    let out = run_dcc_experiment(ScenarioKind::OneSenderOneReceiver, 2, 60, &acting, &quick(), 3, &Progress::silent()).unwrap();
    assert_eq!(out.summary.len(), 4);
    let none = out.row(ActingSet::None).unwrap();
    for a in acting {
        let row = out.row(a).unwrap();
        assert!(row.mean_o >= none.mean - 1e-9);
        assert!(row.mean_a2 >= none.mean - 1e-9);
        assert!(row.mean_p_o > 0.0 && row.mean_p_o <= 1.0);
        assert!(row.fraction_hidden + row.fraction_enhanced <= 1.0 + 1e-12);
        for r in &out.records {
            let m = r.merit(a).unwrap();
            assert!(m.o >= m.merit_before - 1e-9 && m.a2 >= m.merit_before - 1e-9);
            assert!(m.a2 >= m.a1 - 1e-9);
        }
    }
}

#[test]
fn experiment_output_is_independent_of_the_thread_count() {
    let run = |threads| {
        in_pool(threads, || {
            run_dcc_experiment(ScenarioKind::OneSenderOneReceiver, 3, 24, &[ActingSet::Both], &quick(), 99, &Progress::silent())
                .unwrap()
        })
    };
    assert_eq!(run(1), run(8));
}

#[test]
fn fidelity_experiment_reports_bell_correlations() {
    let out = run_tf_experiment(2, 200, &[ActingSet::Receiver], &quick(), 8, &Progress::silent()).unwrap();
    for r in &out.records {
        let f = r.tf_before.unwrap();
        let m = r.chsh_m.unwrap();
        assert!((0.5..=1.0).contains(&f));
        if m > 1.0 {
            assert!(r.nonclassical_before);
            assert_eq!(r.local_nonclassical_tf, Some(false));
        }
    }
    let none = out.row(ActingSet::None).unwrap();
    assert!(none.fraction_local_among_nonclassical.is_some());
    assert!(run_tf_experiment(5, 10, &[], &quick(), 0, &Progress::silent()).is_err());
}

#[test]
fn unsupported_ranks_are_rejected() {
    assert!(run_dcc_experiment(ScenarioKind::OneSenderOneReceiver, 5, 10, &[], &quick(), 0, &Progress::silent()).is_err());
    assert!(run_dcc_experiment(ScenarioKind::TwoSendersOneReceiver, 7, 10, &[], &quick(), 0, &Progress::silent()).is_err());
    assert!(run_dcc_experiment(ScenarioKind::OneSenderOneReceiver, 2, 0, &[], &quick(), 0, &Progress::silent()).is_err());
}

#[test]
fn envelope_scatter_contains_curves_and_clouds() {
    let report = run_envelope_scatter(EnvelopeFamily::TwoQubit, &[1, 2], 100, 11, 4, &Progress::silent()).unwrap();
    let count = |s: &str| report.points.iter().filter(|p| p.series == s).count();
    assert_eq!(count("werner"), 11);
    assert_eq!(count("pure"), 11);
    assert_eq!(count("random"), 200);
    // Pure random states sit on the pure-state curve.
    let rank1 = &report.checks[0];
    assert_eq!(rank1.rank, 1);
    assert!(rank1.worst_upper_margin < 1e-9);
    assert_eq!(rank1.lower_violations, Some(0));
    let three = run_envelope_scatter(EnvelopeFamily::ThreeQubit, &[2], 50, 5, 4, &Progress::silent()).unwrap();
    assert_eq!(three.points.iter().filter(|p| p.series == "gghz").count(), 5);
    assert!(three.checks[0].lower_violations.is_none());
}

#[test]
fn postprocessing_bound_report_is_consistent() {
    let r = run_postpovm_bound_check(EnvelopeFamily::TwoQubit, 2, 30, ActingSet::Both, &quick(), 6, &Progress::silent()).unwrap();
    assert_eq!(r.points.len(), 30);
    let lower = r.points.iter().filter(|p| p.lower_curve.unwrap() - p.a2 > 1e-9).count();
    assert_eq!(r.lower_violations, Some(lower));
    assert_eq!(r.o_above_upper, r.points.iter().filter(|p| p.o - p.upper_curve > 1e-9).count());
    for p in &r.points {
        assert!(p.o >= p.dcc_before - 1e-9);
    }
}

#[test]
fn propcheck_counts_are_consistent() {
    let r = run_propcheck(2, 40, ActingSet::Receiver, &quick(), 12, &Progress::silent()).unwrap();
    assert_eq!(r.records.len(), 40);
    assert!(r.n_applicable <= 40);
    assert!(r.n_prop2_among_enhanced <= r.n_enhanced);
    assert!(r.n_prop1_consistent <= r.n_applicable);
    let enhanced = r.records.iter().filter_map(|x| x.check.as_ref()).filter(|c| c.post_enhanced).count();
    assert_eq!(enhanced, r.n_enhanced);
}

#[test]
fn mean_capacity_table_has_one_row_per_rank() {
    let rows = mean_dcc_table(&[2, 3, 4], 500, 1).unwrap();
    assert_eq!(rows.iter().map(|r| r.rank).collect::<Vec<_>>(), vec![2, 3, 4]);
    for r in &rows {
        assert!(r.numerical.clamped >= 1.0);
        assert!(r.numerical.clamped >= r.numerical.quantum_branch - 1e-12);
    }
    let csv = mean_dcc_table_csv(&rows);
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("rank,"));
}
