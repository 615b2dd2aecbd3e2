use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use spinpair::rate_model::{
    fit_rate_by_scan, read_trajectory_csv, write_trajectory_csv, FitOptions, Normalization, DEFAULT_RATIO,
};
use spinpair::{fit_rate, rate_ratios, solve_rate_equations, Error, PopulationTrajectory, RateParams};

/// `exp(G t) p` by scaling and squaring of a Taylor series.
fn expm_apply(g: [[f64; 3]; 3], t: f64, p: [f64; 3]) -> [f64; 3] {
    let norm = g.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max) * t;
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let h = t / 2f64.powi(squarings);
    let mut e = [[0.0; 3]; 3];
    let mut term = [[0.0; 3]; 3];
    for i in 0..3 {
        e[i][i] = 1.0;
        term[i][i] = 1.0;
    }
    for k in 1..30 {
        let mut next = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                next[i][j] = (0..3).map(|l| term[i][l] * g[l][j]).sum::<f64>() * h / k as f64;
            }
        }
        term = next;
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        let mut sq = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                sq[i][j] = (0..3).map(|l| e[i][l] * e[l][j]).sum();
            }
        }
        e = sq;
    }
    std::array::from_fn(|i| (0..3).map(|j| e[i][j] * p[j]).sum())
}

fn simplex() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.0f64..1.0).prop_filter("nonzero", |a| a.iter().sum::<f64>() > 1e-3).prop_map(|a| {
        let s: f64 = a.iter().sum();
        a.map(|x| x / s)
    })
}

proptest! {
    #[test]
    fn conserves_probability_and_positivity(
        g01 in 0.0f64..100.0, g12 in 0.0f64..100.0, g02 in 0.0f64..10.0,
        p in simplex(), t_max in 1e-3f64..1.0,
    ) {
        let params = RateParams::new(g01, g12).unwrap().with_gamma02(g02).unwrap();
        let times: Vec<f64> = (0..=50).map(|i| t_max * i as f64 / 50.0).collect();
        let traj = solve_rate_equations(&params, p, &times).unwrap();
        prop_assert!(traj.max_sum_error(1.0) < 1e-12);
        for i in 0..traj.len() {
            for x in traj.row(i) {
                prop_assert!(x >= -1e-12);
            }
        }
        prop_assert_eq!(traj.row(0), p);
    }

    #[test]
    fn matches_matrix_exponential(
        g01 in 0.0f64..50.0, g12 in 0.0f64..50.0, g02 in 0.0f64..5.0, p in simplex(), t in 0.0f64..0.2,
    ) {
        let params = RateParams::new(g01, g12).unwrap().with_gamma02(g02).unwrap();
        let traj = solve_rate_equations(&params, p, &[t]).unwrap();
        let reference = expm_apply(params.generator(), t, p);
        for (a, b) in traj.row(0).iter().zip(reference) {
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn scan_and_golden_section_agree(g12 in 1.0f64..200.0) {
        let params = RateParams::from_ratio(g12, DEFAULT_RATIO).unwrap();
        let times: Vec<f64> = (0..=40).map(|i| 1e-3 * i as f64).collect();
        let data = solve_rate_equations(&params, [1.0, 0.0, 0.0], &times).unwrap();
        let a = fit_rate(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap();
        let b = fit_rate_by_scan(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap();
        prop_assert!((a.gamma12 - b.gamma12).abs() <= 1e-6 * g12);
    }
}

#[test]
fn stationary_state_is_uniform() {
    for (g01, g12) in [(2.34, 1.0), (0.5, 30.0), (100.0, 0.01)] {
        let params = RateParams::new(g01, g12).unwrap();
        let t = 50.0 / f64::min(g01, g12);
        let traj = solve_rate_equations(&params, [1.0, 0.0, 0.0], &[t]).unwrap();
        for x in traj.row(0) {
            assert!((x - 1.0 / 3.0).abs() < 1e-6, "{g01} {g12}: {x}");
        }
    }
}

#[test]
fn noiseless_round_trip() {
    for g12 in [0.3, 12.0, 450.0] {
        let params = RateParams::from_ratio(g12, DEFAULT_RATIO).unwrap();
        let times: Vec<f64> = (0..=30).map(|i| 2.0 / g12 * i as f64 / 30.0).collect();
        let data = solve_rate_equations(&params, [1.0, 0.0, 0.0], &times).unwrap();
        let fit = fit_rate(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap();
        assert!((fit.gamma12 - g12).abs() <= 1e-6 * g12, "{} vs {g12}", fit.gamma12);
        assert!((fit.gamma01 - DEFAULT_RATIO * g12).abs() <= 1e-6 * DEFAULT_RATIO * g12);
        assert!(fit.residual < 1e-20);
    }
}

#[test]
fn noisy_fits_scatter_around_truth() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.02).unwrap();
    let g12 = 40.0;
    let params = RateParams::from_ratio(g12, DEFAULT_RATIO).unwrap();
    let times: Vec<f64> = (0..=40).map(|i| 1e-3 * i as f64).collect();
    let clean = solve_rate_equations(&params, [1.0, 0.0, 0.0], &times).unwrap();
    let mut estimates = Vec::new();
    for _ in 0..40 {
        let rows: Vec<[f64; 3]> = (0..clean.len())
            .map(|i| clean.row(i).map(|x| x + noise.sample(&mut rng)))
            .collect();
        let data = PopulationTrajectory::from_rows(times.clone(), &rows);
        estimates.push(fit_rate(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap().gamma12);
    }
    let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (estimates.len() - 1) as f64).sqrt();
    assert!((mean - g12).abs() < 4.0 * sd / (estimates.len() as f64).sqrt() + 1e-9, "mean {mean} sd {sd}");
    assert!(sd < 0.2 * g12);
}

#[test]
fn constant_data_fits_zero_rate() {
    let times: Vec<f64> = (0..10).map(|i| i as f64 * 1e-3).collect();
    let data = PopulationTrajectory::from_rows(times, &[[1.0, 0.0, 0.0]; 10]);
    let fit = fit_rate(&data, DEFAULT_RATIO, &FitOptions::default()).unwrap();
    assert_eq!(fit.gamma12, 0.0);
    assert!(fit.degenerate);
}

#[test]
fn csv_round_trip_is_exact() {
    let params = RateParams::from_ratio(17.0, DEFAULT_RATIO).unwrap();
    let times: Vec<f64> = (0..=20).map(|i| 1.7e-3 * i as f64).collect();
    let traj = solve_rate_equations(&params, [1.0, 0.0, 0.0], &times).unwrap();
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &traj).unwrap();
    let back = read_trajectory_csv(buf.as_slice(), Normalization::None).unwrap();
    assert_eq!(back.times, traj.times);
    assert_eq!(back.p00, traj.p00);
    assert_eq!(back.p2m2, traj.p2m2);
}

#[test]
fn malformed_csv_names_line_and_column() {
    let text = "time_s,p00,p1m1,p2m2\n0,1,0,0\n0.001,0.9,oops,0.0\n";
    match read_trajectory_csv(text.as_bytes(), Normalization::None) {
        Err(Error::Parse { line, column, .. }) => {
            assert_eq!(line, 3);
            assert_eq!(column, "p1m1");
        }
        other => panic!("expected parse error, got {other:?}"),
    }
    let missing = "time_s,p00,p1m1\n0,1,0\n";
    assert!(matches!(
        read_trajectory_csv(missing.as_bytes(), Normalization::None),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn initial_total_normalization_keeps_loss_visible() {
    let text = "time_s,p00,p1m1,p2m2\n0,200,0,0\n0.01,100,40,20\n";
    let t = read_trajectory_csv(text.as_bytes(), Normalization::InitialTotal).unwrap();
    assert_eq!(t.row(0), [1.0, 0.0, 0.0]);
    assert_eq!(t.row(1), [0.5, 0.2, 0.1]);
}

#[test]
fn rubidium_rate_ratios() {
    let lengths = spinpair::ScatteringLengths::new(-740.0, -570.0, -390.0).unwrap();
    let table = spinpair::coupling_table(&lengths, &spinpair::UnitSystem::ScatteringLength).unwrap();
    let r = rate_ratios(&table);
    assert!((r.r01_12.unwrap() - 2.34).abs() < 0.01, "{:?}", r.r01_12);
    assert!((r.r02_01.unwrap() - 0.04).abs() < 0.01, "{:?}", r.r02_01);
    assert!((r.r02_12.unwrap() - 0.09).abs() < 0.01);
}
