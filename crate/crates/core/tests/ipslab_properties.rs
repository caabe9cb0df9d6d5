use liggett_lab::ipslab::*;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

#[test]
fn pure_death_dies_out() {
    let cfg = ContactConfig::standard(21, 0.0);
    let est = estimate_survival(&cfg, 10.0, 10_000, 11).unwrap();
    // P(survive to 10) = e^-10 for a single particle
    assert!(est.fraction < 0.01);
    assert_eq!(est.ci_low, 0.0);
}

#[test]
fn pure_death_extinction_time_is_exp1() {
    let cfg = ContactConfig::standard(1, 0.0);
    let times: Vec<f64> = (0..20_000)
        .map(|k| simulate_contact_with(&cfg, &[1], 1e6, &mut trial_rng(5, k)).unwrap().extinct_time.unwrap())
        .collect();
    let (m, v) = mean_var(&times);
    let se = (1.0 / times.len() as f64).sqrt();
    assert!((m - 1.0).abs() < 4.0 * se, "mean {m}");
    assert!((v - 1.0).abs() < 0.1, "var {v}");
}

#[test]
fn event_driven_matches_fixed_step_reference() {
    let cfg = ContactConfig::standard(5, 1.5);
    let (t, dt) = (2.0, 1e-3);
    let exact: Vec<f64> = (0..20_000)
        .map(|k| simulate_contact_with(&cfg, &[3], t, &mut trial_rng(21, k)).unwrap().occupied_at_end as f64)
        .collect();
    let reference: Vec<f64> = (0..4_000)
        .map(|k| simulate_contact_fixed_step(&cfg, &[3], t, dt, &mut trial_rng(22, k)).unwrap() as f64)
        .collect();
    let (m1, v1) = mean_var(&exact);
    let (m2, v2) = mean_var(&reference);
    let se = (v1 / exact.len() as f64 + v2 / reference.len() as f64).sqrt();
    assert!((m1 - m2).abs() <= 3.0 * se, "mean occupied {m1} vs {m2}, se {se}");
    let alive1 = exact.iter().filter(|&&x| x > 0.0).count() as f64 / exact.len() as f64;
    let alive2 = reference.iter().filter(|&&x| x > 0.0).count() as f64 / reference.len() as f64;
    let se = (alive1 * (1.0 - alive1) / exact.len() as f64 + alive2 * (1.0 - alive2) / reference.len() as f64).sqrt();
    assert!((alive1 - alive2).abs() <= 3.0 * se, "survival {alive1} vs {alive2}");
}

#[test]
fn threshold_mode_reference_agrees() {
    let cfg = ContactConfig::threshold(6, 1.0);
    let exact: Vec<f64> = (0..20_000)
        .map(|k| simulate_contact_with(&cfg, &[3], 1.5, &mut trial_rng(31, k)).unwrap().occupied_at_end as f64)
        .collect();
    let reference: Vec<f64> = (0..4_000)
        .map(|k| simulate_contact_fixed_step(&cfg, &[3], 1.5, 1e-3, &mut trial_rng(32, k)).unwrap() as f64)
        .collect();
    let (m1, v1) = mean_var(&exact);
    let (m2, v2) = mean_var(&reference);
    let se = (v1 / exact.len() as f64 + v2 / reference.len() as f64).sqrt();
    assert!((m1 - m2).abs() <= 3.0 * se, "mean occupied {m1} vs {m2}, se {se}");
}

#[test]
fn empty_configuration_is_absorbing() {
    for cfg in [ContactConfig::standard(30, 5.0), ContactConfig::threshold(30, 5.0)] {
        let tr = simulate_contact(&cfg, &[], 50.0, 2).unwrap();
        assert_eq!((tr.occupied_at_end, tr.events), (0, 0));
    }
}

#[test]
fn survival_is_monotone_in_lambda() {
    let ests: Vec<SurvivalEstimate> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&l| estimate_survival(&ContactConfig::standard(400, l), 100.0, 200, 41).unwrap())
        .collect();
    for w in ests.windows(2) {
        assert!(w[1].ci_high >= w[0].ci_low, "{:?}", ests.iter().map(|e| e.fraction).collect::<Vec<_>>());
    }
    assert!(ests[2].fraction > ests[0].fraction);
}

#[test]
fn survival_is_bit_reproducible_across_thread_counts() {
    let cfg = ContactConfig::standard(100, 2.0);
    let a = pool(1).install(|| estimate_survival(&cfg, 30.0, 64, 77).unwrap());
    let b = pool(4).install(|| estimate_survival(&cfg, 30.0, 64, 77).unwrap());
    assert_eq!(a, b);
    let cfg = ContactConfig { edge_sample_dt: Some(0.5), ..cfg };
    let x = simulate_contact(&cfg, &[50], 20.0, 8).unwrap();
    let y = simulate_contact(&cfg, &[50], 20.0, 8).unwrap();
    assert_eq!(x, y);
}

#[test]
fn right_edge_advances_when_supercritical() {
    let est = right_edge_speed(2.0, 100.0, 40, 5, 256).unwrap();
    assert!(est.slope > 3.0 * est.standard_error, "{} ± {}", est.slope, est.standard_error);
}

#[test]
fn right_edge_retreats_under_pure_death() {
    let est = right_edge_speed(0.0, 20.0, 20, 5, 128).unwrap();
    assert!(est.slope <= 0.0);
}

#[test]
fn right_edge_standard_error_scales_like_root_trials() {
    let small = right_edge_speed(2.0, 40.0, 100, 9, 128).unwrap();
    let large = right_edge_speed(2.0, 40.0, 200, 10, 128).unwrap();
    let ratio = large.standard_error / small.standard_error;
    let expected = 1.0 / 2f64.sqrt();
    assert!((ratio / expected - 1.0).abs() <= 0.3, "SE ratio {ratio}");
}

#[test]
fn voter_fraction_is_a_martingale_on_regular_graphs() {
    let g = SimpleGraph::cycle(10);
    let start = vec![1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
    let cfg = VoterConfig::new(g, start).unwrap();
    let fractions: Vec<f64> = (0..10_000)
        .map(|k| {
            let out = simulate_voter_with(&cfg, 5.0, &mut trial_rng(13, k)).unwrap();
            out.final_opinions.iter().map(|&o| o as f64).sum::<f64>() / 10.0
        })
        .collect();
    let (m, v) = mean_var(&fractions);
    let se = (v / fractions.len() as f64).sqrt();
    assert!((m - 0.3).abs() <= 3.0 * se, "mean {m} se {se}");
}

#[test]
fn unanimous_voter_state_is_absorbing() {
    let cfg = VoterConfig::new(SimpleGraph::cycle(12), vec![0; 12]).unwrap();
    let out = simulate_voter(&cfg, 100.0, 3).unwrap();
    assert_eq!(out.final_opinions, vec![0; 12]);
    assert_eq!(out.consensus_time, Some(0.0));
}

#[test]
fn single_site_duality_preserves_marginal() {
    let g = SimpleGraph::cycle(7);
    let d = duality_check(&g, &[2], 1.5, 0.3, 20_000, 4).unwrap();
    assert!((d.rhs - 0.3).abs() < 1e-12 && d.rhs_se < 1e-9);
    assert!((d.lhs - 0.3).abs() <= 4.0 * d.lhs_se);
    assert!(d.z_score.abs() <= 4.0);
}

#[test]
fn duality_on_a_star() {
    let g = SimpleGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    let d = duality_check(&g, &[1, 2, 3], 0.8, 0.6, 40_000, 6).unwrap();
    assert!(d.z_score.abs() <= 4.0, "{d:?}");
}

/// P(two walkers started adjacent on the n-cycle have not met by t), from the
/// gap chain on `1..n`: it moves ±1 at rate 1 each way and is killed at 0.
fn adjacent_walkers_apart(n: usize, t: f64) -> f64 {
    let m = n - 1;
    let q = nalgebra::DMatrix::<f64>::from_fn(m, m, |r, c| {
        if r == c {
            -2.0
        } else if r.abs_diff(c) == 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = q.symmetric_eigen();
    let exp_diag = nalgebra::DMatrix::from_diagonal(&eig.eigenvalues.map(|l: f64| (l * t).exp()));
    let p = &eig.eigenvectors * exp_diag * eig.eigenvectors.transpose();
    p.row(0).sum()
}

#[test]
fn walker_side_matches_exact_coalescence() {
    let g = SimpleGraph::cycle(10);
    let apart = adjacent_walkers_apart(10, 2.0);
    let exact = 0.25 + 0.25 * (1.0 - apart);
    let d = duality_check(&g, &[0, 1], 2.0, 0.5, 100_000, 12).unwrap();
    assert!((d.rhs - exact).abs() <= 4.0 * d.rhs_se, "rhs {} exact {exact}", d.rhs);
    assert!((d.lhs - exact).abs() <= 4.0 * d.lhs_se, "lhs {} exact {exact}", d.lhs);
}
