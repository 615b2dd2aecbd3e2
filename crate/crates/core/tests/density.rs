use num_complex::Complex64;
use proptest::prelude::*;
use spinpair::dynamics::{reduced_density_matrix, Spectrum, SpinMotionState};
use spinpair::{postselect_entangled, BackendKind, CutoffPolicy, ReducedDensityMatrix, Scenario, Sector, ThermalEnsemble};

fn check_structure(rho: &ReducedDensityMatrix) {
    assert!(rho.hermiticity_error() < 1e-12);
    assert!((rho.trace() - 1.0).abs() < 1e-9, "trace {}", rho.trace());
    assert!(rho.min_eigenvalue().unwrap() >= -1e-9);
    let e = &rho.entries;
    for [a, b] in [[1, 2], [3, 4]] {
        assert_eq!(e[a][a], e[a][b]);
        assert_eq!(e[a][a], e[b][b]);
        for c in 0..5 {
            assert_eq!(e[c][a], e[c][b]);
        }
    }
    for sector in [Sector::PlusMinusOne, Sector::PlusMinusTwo] {
        let p = postselect_entangled(rho, sector);
        if p.probability > 1e-12 {
            assert!((p.fidelity.unwrap() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn simulated_ensembles_have_valid_structure() {
    for (backend, b, micro_k) in [(BackendKind::Gaussian, 0.0, 2.0), (BackendKind::Gaussian, 8.5, 1.0), (BackendKind::Delta, 3.0, 2.0)] {
        let mut s = Scenario::rb85(micro_k * 1e-6).unwrap();
        s.cutoff = CutoffPolicy::Modes(100);
        s.backend = backend;
        let prepared = s.prepare().unwrap();
        let h = prepared.hamiltonian(b).unwrap();
        let spectrum = Spectrum::new(&h).unwrap();
        let ensemble = ThermalEnsemble::new(&spectrum, &prepared.thermal.probabilities).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| 2e-3 * i as f64).collect();
        let rhos = reduced_density_matrix(&ensemble, &times).unwrap();
        assert_eq!(rhos[0].entries[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(rhos[0].trace(), 1.0);
        let mut transferred = false;
        for rho in &rhos {
            check_structure(rho);
            transferred |= postselect_entangled(rho, Sector::PlusMinusOne).probability > 1e-3;
        }
        assert!(transferred, "{backend:?} at {b} G never populated the +-1 sector");
    }
}

fn state_strategy() -> impl Strategy<Value = SpinMotionState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 12).prop_filter_map("nonzero", |v| {
        let norm: f64 = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| {
            let c: Vec<Complex64> = v.iter().map(|(a, b)| Complex64::new(a / norm, b / norm)).collect();
            SpinMotionState::new([c[0..4].to_vec(), c[4..8].to_vec(), c[8..12].to_vec()], 0.0).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn pure_states_reduce_to_valid_matrices(state in state_strategy()) {
        let rho = ReducedDensityMatrix::from_state(&state).unwrap();
        check_structure(&rho);
        let ev = rho.eigenvalues().unwrap();
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
