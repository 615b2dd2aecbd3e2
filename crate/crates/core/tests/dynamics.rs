use faer::Mat;
use proptest::prelude::*;
use spinpair::dynamics::{assemble_hamiltonian_with, groundstate_initial, Spectrum, SpinMotionState};
use spinpair::pseudopotential::{backend_matrix, CouplingBackend};
use spinpair::{
    coupling_matrix, delta_coupling_vector, enumerate_basis, BackendKind, CouplingMatrix, CutoffPolicy,
    GaussianPotential, Scenario, SpinBlockMatrix, ThermalEnsemble, TrapFrequencies, ZeemanShifts,
};
use spinpair_oracles::ode;

fn single_mode(kappa: f64) -> (spinpair::BasisSet, CouplingMatrix, SpinBlockMatrix) {
    let trap = TrapFrequencies::isotropic(1.0).unwrap();
    let basis = enumerate_basis(&trap, 1.6).unwrap();
    assert_eq!(basis.len(), 1);
    let coupling = CouplingMatrix::from_matrix(Mat::from_fn(1, 1, |_, _| 1.0), [1.0; 3], None).unwrap();
    let spin = SpinBlockMatrix([[0.0, kappa, 0.0], [kappa, 0.0, 0.0], [0.0, 0.0, 0.0]]);
    (basis, coupling, spin)
}

#[test]
fn two_level_rabi_oscillation() {
    let kappa = 0.37;
    let (basis, coupling, spin) = single_mode(kappa);
    let h = assemble_hamiltonian_with(&basis, &coupling, &spin, 0.0, &ZeemanShifts::default()).unwrap();
    let times: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
    let r = Spectrum::new(&h)
        .unwrap()
        .evolve(&SpinMotionState::spin0_mode(1, 0), &times, false)
        .unwrap();
    for (t, p) in times.iter().zip(&r.populations) {
        let expected = (kappa * t).sin().powi(2);
        assert!((p[1] - expected).abs() < 1e-12, "t = {t}: {} vs {expected}", p[1]);
        assert!(p[2].abs() < 1e-24);
    }
}

fn small_scenario(modes: usize, backend: BackendKind) -> Scenario {
    let mut s = Scenario::rb85(2e-6).unwrap();
    s.cutoff = CutoffPolicy::Modes(modes);
    s.backend = backend;
    s
}

fn times_ms(max_ms: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| max_ms * 1e-3 * i as f64 / steps as f64).collect()
}

#[test]
fn spectral_matches_runge_kutta() {
    let prepared = small_scenario(50, BackendKind::Gaussian).prepare().unwrap();
    let h = prepared.hamiltonian(8.5).unwrap();
    let n = h.n_modes();
    let d = h.dim();
    let dense: Vec<f64> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| h.matrix()[(i, j)]).collect();
    let spectrum = Spectrum::new(&h).unwrap();
    for mode in [0, n - 1] {
        let init = SpinMotionState::spin0_mode(n, mode);
        let t = 5e-4;
        let r = spectrum.evolve(&init, &[t], true).unwrap();
        assert!(r.populations[0][0] < 1.0 - 1e-6, "member {mode} did not evolve");
        let state = &r.snapshots.unwrap()[0];
        let mut re0 = vec![0.0; d];
        re0[mode] = 1.0;
        let sol = ode::propagate(&dense, d, &re0, &vec![0.0; d], h.internal_time(t), 1e-11);
        for b in 0..3 {
            for i in 0..n {
                let z = state.blocks[b][i];
                let k = b * n + i;
                assert!((z.re - sol.re[k]).abs() < 1e-8, "mode {mode} block {b} entry {i}");
                assert!((z.im - sol.im[k]).abs() < 1e-8, "mode {mode} block {b} entry {i}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn evolution_is_unitary(
        diag in prop::array::uniform3(-3.0f64..3.0),
        off in prop::array::uniform3(-3.0f64..3.0),
        b in 0.0f64..20.0,
        mode in 0usize..30,
    ) {
        let spin = SpinBlockMatrix([
            [diag[0], off[0], off[1]],
            [off[0], diag[1], off[2]],
            [off[1], off[2], diag[2]],
        ]);
        let s = small_scenario(30, BackendKind::Gaussian);
        let basis = s.basis().unwrap();
        let coupling = backend_matrix(&basis, &s.coupling_backend().unwrap()).unwrap();
        let h = assemble_hamiltonian_with(&basis, &coupling, &spin, b, &ZeemanShifts::default()).unwrap();
        prop_assert_eq!(h.asymmetry(), 0.0);
        let times = times_ms(40.0, 80);
        let r = Spectrum::new(&h).unwrap()
            .evolve(&SpinMotionState::spin0_mode(basis.len(), mode.min(basis.len() - 1)), &times, false)
            .unwrap();
        prop_assert!(r.max_norm_error() < 1e-9);
        prop_assert_eq!(r.populations[0], [1.0, 0.0, 0.0]);
    }
}

#[test]
fn contact_interaction_freezes_mixed_parity_members() {
    let prepared = small_scenario(300, BackendKind::Delta).prepare().unwrap();
    let h = prepared.hamiltonian(8.5).unwrap();
    let spectrum = Spectrum::new(&h).unwrap();
    let ensemble = ThermalEnsemble::new(&spectrum, &prepared.thermal.probabilities).unwrap();
    let times = times_ms(40.0, 40);
    let mut frozen = 0;
    let mut coupled_moves = false;
    for (i, mode) in prepared.basis.modes().iter().enumerate() {
        let r = ensemble.member(i, &times).unwrap();
        if mode.is_mixed_parity() {
            frozen += 1;
            for p in &r.populations {
                assert!((p[0] - 1.0).abs() < 1e-12, "mode {mode}: N0 = {}", p[0]);
            }
        } else if r.populations.iter().any(|p| p[0] < 0.999) {
            coupled_moves = true;
        }
    }
    assert!(frozen > 0);
    assert!(coupled_moves);
}

#[test]
fn thermal_average_matches_direct_members() {
    let prepared = small_scenario(120, BackendKind::Gaussian).prepare().unwrap();
    let h = prepared.hamiltonian(8.5).unwrap();
    let spectrum = Spectrum::new(&h).unwrap();
    let ensemble = ThermalEnsemble::new(&spectrum, &prepared.thermal.probabilities).unwrap();
    let times = times_ms(40.0, 50);
    let fast = ensemble.populations(&times).unwrap();
    let slow = ensemble.populations_by_members(&times).unwrap();
    for i in 0..times.len() {
        let (a, b) = (fast.row(i), slow.row(i));
        for j in 0..3 {
            assert!((a[j] - b[j]).abs() < 1e-10, "t = {}: {a:?} vs {b:?}", times[i]);
        }
    }
    assert!(fast.max_sum_error(1.0) < 1e-9);
    assert_eq!(fast.row(0), [1.0, 0.0, 0.0]);
}

#[test]
fn narrow_gaussian_approaches_contact_limit() {
    let s = small_scenario(80, BackendKind::Gaussian);
    let basis = s.basis().unwrap();
    let trap = basis.trap();
    let sigma_min = trap.relative_lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    let pot = GaussianPotential::new(1e-3 * sigma_min).unwrap();
    let gauss = coupling_matrix(&basis, trap, &pot).unwrap();
    let contact = delta_coupling_vector(&basis, trap).unwrap().outer(trap.relative_lengths());
    let scale = contact.matrix()[(0, 0)].abs();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let (a, b) = (gauss.get(i, j), contact.get(i, j));
            assert!((a - b).abs() <= 1e-4 * scale, "({i}, {j}): {a} vs {b}");
        }
    }
    let direct = backend_matrix(&basis, &CouplingBackend::Delta).unwrap();
    assert_eq!(direct.get(0, 0), contact.get(0, 0));
}

#[test]
fn strong_field_suppresses_spin_changes() {
    let prepared = small_scenario(150, BackendKind::Gaussian).prepare().unwrap();
    // Zeeman offset well above every coupling element times the mode count
    let n = prepared.basis.len();
    let max_t = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| prepared.coupling.get(i, j).abs())
        .fold(0.0, f64::max);
    let max_g = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| prepared.spin.entry(i, j).abs()).fold(0.0, f64::max);
    let offset = 10.0 * max_g * max_t * n as f64;
    let omega_bar = prepared.basis.trap().omega_bar();
    let b = (offset * omega_bar / (2.0 * std::f64::consts::PI * prepared.zeeman.q1)).sqrt();
    let h = prepared.hamiltonian(b).unwrap();
    let spectrum = Spectrum::new(&h).unwrap();
    let ensemble = ThermalEnsemble::new(&spectrum, &prepared.thermal.probabilities).unwrap();
    let traj = ensemble.populations(&times_ms(40.0, 200)).unwrap();
    assert!(traj.p00.iter().all(|p| *p >= 0.99), "min P00 {}", traj.p00.iter().cloned().fold(1.0, f64::min));
}

#[test]
fn interacting_ground_state_oscillates() {
    let prepared = small_scenario(150, BackendKind::Gaussian).prepare().unwrap();
    let h = prepared.hamiltonian(0.0).unwrap();
    let init = groundstate_initial(&h).unwrap();
    assert!((init.norm_squared() - 1.0).abs() < 1e-12);
    let times = times_ms(40.0, 400);
    let r = Spectrum::new(&h).unwrap().evolve(&init, &times, false).unwrap();
    let p0: Vec<f64> = r.populations.iter().map(|p| p[0]).collect();
    let (i_min, min) = p0.iter().enumerate().fold((0, 2.0), |a, (i, &v)| if v < a.1 { (i, v) } else { a });
    let later_max = p0[i_min..].iter().cloned().fold(0.0, f64::max);
    assert!(min < 0.9, "no population transfer: min P00 {min}");
    assert!(later_max - min > 0.05, "no revival after the minimum");
}
