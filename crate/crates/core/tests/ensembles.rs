//! Ensemble checks: every bound and identity exercised over seeded random
//! states, measurements and generators across small dimensions.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qsl_core::athermality::{
    athermality, random_coupling_generator, run_athermality_experiment, AthermalityExperiment,
};
use qsl_core::correlation::{classical_quantum_state, correlation_q, local_uncertainty};
use qsl_core::kdq::{max_nonreality_exact, max_nonreality_search, uncertainty_from_kd};
use qsl_core::linalg::{
    haar_random_unitary, random_hermitian, schatten_norm, ComplexMatrix, NormOrder,
};
use qsl_core::quantum::{
    born_probabilities, evolve_trajectory, random_density_matrix, random_povm, random_pure_state,
    BipartiteState, DensityMatrix, HamiltonianSchedule, MeasurementSet,
};
use qsl_core::qubit::{l1_coherence, mub_complementarity, optimal_generator, random_qubit_basis};
use qsl_core::speedlimit::{
    entropy_measure, fisher_speed_bound, helstrom_povm, holder_bound, probability_speed_exact,
    probability_speed_fd, qsl_time_bound, quantum_uncertainty,
};

#[test]
fn hilbert_schmidt_ensemble_purity_moment() {
    // Mean purity of G G^dag / tr for a d x k complex Gaussian G is
    // (d + k) / (d k + 1); for d = k = 2 that is 4/5.
    let mut rng = ChaCha12Rng::seed_from_u64(100);
    let samples = 2000;
    let mean: f64 = (0..samples)
        .map(|_| random_density_matrix(2, 2, &mut rng).unwrap().purity())
        .sum::<f64>()
        / samples as f64;
    assert!(
        (mean - 0.8).abs() < 0.01,
        "ensemble mean purity {mean} is off the Hilbert-Schmidt moment 0.8"
    );
}

#[test]
fn haar_unitary_first_entry_moment() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    // |U_00|^2 has variance 3/80 on dimension 4, so 8000 samples put the
    // standard error near 0.002 and the 0.01 window at four sigma.
    let samples = 8000;
    let mean: f64 = (0..samples)
        .map(|_| haar_random_unitary(4, &mut rng).get(0, 0).norm_sqr())
        .sum::<f64>()
        / samples as f64;
    assert!(
        (mean - 0.25).abs() < 0.01,
        "mean |U_00|^2 = {mean}, expected 1/4 for Haar on dimension 4"
    );
}

#[test]
fn trade_off_bounds_hold_across_dimensions() {
    let mut rng = ChaCha12Rng::seed_from_u64(102);
    let orders = [
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Infinity,
    ];
    for dim in 2..=5usize {
        for _trial in 0..10 {
            let rank = rng.random_range(1..=dim);
            let rho = random_density_matrix(dim, rank, &mut rng).unwrap();
            let h = random_hermitian(dim, &mut rng);
            let povm = random_povm(dim, rng.random_range(2..=dim + 1), &mut rng).unwrap();
            for order in orders {
                let report = holder_bound(&rho, &h, &povm, order).unwrap();
                assert!(
                    report.slack >= -1e-10,
                    "dim {dim} {}: slack {}",
                    report.label,
                    report.slack
                );
            }
            let fisher = fisher_speed_bound(&rho, &h, &povm).unwrap();
            assert!(
                fisher.slack >= -1e-8,
                "dim {dim} fisher slack {}",
                fisher.slack
            );
        }
    }
}

#[test]
fn entropy_caps_the_uncertainty_for_projective_readouts() {
    let mut rng = ChaCha12Rng::seed_from_u64(103);
    for dim in 2..=5usize {
        for trial in 0..10 {
            let basis = MeasurementSet::from_basis(&haar_random_unitary(dim, &mut rng)).unwrap();
            let rank = rng.random_range(1..=dim);
            let rho = random_density_matrix(dim, rank, &mut rng).unwrap();
            let u = quantum_uncertainty(&rho, &basis, NormOrder::Finite(1.0)).unwrap();
            let s = entropy_measure(&born_probabilities(&rho, &basis).unwrap()).unwrap();
            assert!(
                u <= s + 1e-10,
                "dim {dim} trial {trial}: U {u} > entropy {s}"
            );
            if rank == 1 {
                assert!(
                    (u - s).abs() < 1e-10,
                    "pure state should saturate: U {u} vs entropy {s}"
                );
            }
        }
    }
}

#[test]
fn nonreality_identity_and_search_agree_with_the_commutator_norm() {
    let mut rng = ChaCha12Rng::seed_from_u64(104);
    for dim in 2..=4usize {
        for _trial in 0..4 {
            let rho = random_density_matrix(dim, dim, &mut rng).unwrap();
            let povm = random_povm(dim, dim, &mut rng).unwrap();

            let from_kd = uncertainty_from_kd(&rho, &povm).unwrap();
            let direct = quantum_uncertainty(&rho, &povm, NormOrder::Finite(1.0)).unwrap();
            assert!((from_kd - direct).abs() < 1e-10);

            let element = povm.element(0);
            let (exact, basis) = max_nonreality_exact(&rho, element).unwrap();
            let table = qsl_core::kdq::kd_table(&rho, &povm, &basis).unwrap();
            assert!((table.nonreality(0).unwrap() - exact).abs() < 1e-10);

            let (found, _) = max_nonreality_search(&rho, element, &mut rng, 8, 300).unwrap();
            assert!(found <= exact + 1e-12);
            assert!(
                exact - found < 1e-3,
                "dim {dim}: search {found} vs exact {exact}"
            );
        }
    }
}

#[test]
fn finite_difference_speed_tracks_the_commutator_formula_on_ramps() {
    let mut rng = ChaCha12Rng::seed_from_u64(105);
    for dim in [2usize, 3] {
        let rho0 = random_density_matrix(dim, dim, &mut rng).unwrap();
        let h0 = random_hermitian(dim, &mut rng);
        let h1 = random_hermitian(dim, &mut rng);
        let schedule = HamiltonianSchedule::linear_ramp(h0.clone(), h1.clone(), 1.0).unwrap();
        let povm = random_povm(dim, dim, &mut rng).unwrap();
        let traj = evolve_trajectory(&rho0, &schedule, 400, &povm).unwrap();
        for index in [57usize, 200, 341] {
            let t = traj.times()[index];
            let fd = probability_speed_fd(&traj, index, 1e-5).unwrap();
            let exact =
                probability_speed_exact(traj.state(index), &schedule.evaluate(t), &povm).unwrap();
            assert!(
                (fd - exact).abs() < 1e-5,
                "dim {dim} index {index}: fd {fd} vs exact {exact}"
            );
        }
    }
}

#[test]
fn minimum_time_bound_and_helstrom_saturation() {
    let mut rng = ChaCha12Rng::seed_from_u64(106);
    for dim in [2usize, 3] {
        for _trial in 0..4 {
            let rho0 = random_density_matrix(dim, dim, &mut rng).unwrap();
            let h = random_hermitian(dim, &mut rng);
            let schedule = HamiltonianSchedule::constant(h, 0.7).unwrap();
            let povm = random_povm(dim, dim, &mut rng).unwrap();
            let traj = evolve_trajectory(&rho0, &schedule, 250, &povm).unwrap();
            let report = qsl_time_bound(&traj).unwrap();
            assert!(
                report.slack >= -1e-6,
                "dim {dim}: time bound {} above duration {}",
                report.bound,
                report.duration
            );

            // The spectral-split readout achieves the trace distance between
            // the endpoints, the largest variational distance any readout has.
            let end = traj.state(traj.len() - 1);
            let povm_opt = helstrom_povm(&rho0, end).unwrap();
            let p0 = born_probabilities(&rho0, &povm_opt).unwrap();
            let p1 = born_probabilities(end, &povm_opt).unwrap();
            let achieved: f64 = p0.iter().zip(&p1).map(|(a, b)| (a - b).abs()).sum();
            let trace_distance =
                schatten_norm(&end.matrix().sub(rho0.matrix()), NormOrder::Finite(1.0)).unwrap();
            assert!((achieved - trace_distance).abs() < 1e-10);
        }
    }
}

#[test]
fn qubit_sweep_of_complementarity_and_optimal_driving() {
    let mut rng = ChaCha12Rng::seed_from_u64(107);
    for _trial in 0..200 {
        let rank = rng.random_range(1..=2);
        let rho = random_density_matrix(2, rank, &mut rng).unwrap();
        let report = mub_complementarity(&rho).unwrap();
        assert!((report.sum_of_squares - report.bloch_invariant).abs() < 1e-12);
    }
    for _trial in 0..20 {
        let rho = random_density_matrix(2, 2, &mut rng).unwrap();
        let basis = random_qubit_basis(&mut rng);
        let (_, achieved) = optimal_generator(&rho, &basis).unwrap();
        let ceiling = l1_coherence(&rho, &basis).unwrap();
        assert!((achieved - ceiling).abs() < 1e-12);
        for _competitor in 0..5 {
            let k = random_hermitian(2, &mut rng);
            let norm = schatten_norm(&k, NormOrder::Infinity).unwrap();
            let h = k.scale(Complex64::new(1.0 / norm, 0.0));
            let v = probability_speed_exact(&rho, &h, &basis.to_measurement()).unwrap();
            assert!(v <= ceiling + 1e-10);
        }
    }
}

#[test]
fn correlation_witness_across_state_families() {
    let mut rng = ChaCha12Rng::seed_from_u64(108);

    // Pure states: optimizer against the spectral closed form.
    for dims in [(2usize, 2usize), (2, 3)] {
        for _trial in 0..3 {
            let psi = random_pure_state(dims.0 * dims.1, &mut rng);
            let state = BipartiteState::from_pure(&psi, dims).unwrap();
            let report = correlation_q(&state, &mut rng, 8, 300).unwrap();
            let closed = report.closed_form.unwrap();
            assert!(
                (report.value - closed).abs() < 1e-3,
                "dims {dims:?}: optimizer {} vs closed {closed}",
                report.value
            );
        }
    }

    // Product mixed states: the witness vanishes.
    let a = random_density_matrix(2, 2, &mut rng).unwrap();
    let b = random_density_matrix(3, 2, &mut rng).unwrap();
    let product = BipartiteState::new(
        DensityMatrix::new(a.matrix().kron(b.matrix()).hermitian_part()).unwrap(),
        (2, 3),
    )
    .unwrap();
    let report = correlation_q(&product, &mut rng, 6, 300).unwrap();
    assert!(
        report.value < 1e-6,
        "product state witness {}",
        report.value
    );

    // Classical-quantum states: zero at the defining basis, near zero found.
    let blocks = vec![
        random_density_matrix(2, 2, &mut rng).unwrap(),
        random_density_matrix(2, 1, &mut rng).unwrap(),
    ];
    let cq =
        classical_quantum_state(&[0.4, 0.6], &MeasurementSet::computational(2), &blocks).unwrap();
    assert!(local_uncertainty(&cq, &MeasurementSet::computational(2)).unwrap() < 1e-12);
    let report = correlation_q(&cq, &mut rng, 6, 300).unwrap();
    assert!(report.value < 1e-6, "cq state witness {}", report.value);
}

#[test]
fn athermality_random_sweep_obeys_the_bound() {
    let mut rng = ChaCha12Rng::seed_from_u64(109);
    for _run in 0..5 {
        let hs = random_hermitian(2, &mut rng);
        let beta: f64 = rng.random_range(0.0..3.0);
        let joint = random_coupling_generator(2, &mut rng);
        let schedule = HamiltonianSchedule::constant(joint, 1.0).unwrap();
        let experiment = AthermalityExperiment::new(hs, beta, schedule, 200).unwrap();
        let report = run_athermality_experiment(&experiment).unwrap();
        assert!(
            report.athermality[0] < 1e-9,
            "run must start at equilibrium"
        );
        assert!(report.slack >= -1e-6, "slack {}", report.slack);
        // Pointwise: the distribution functional caps the uncertainty.
        for i in (0..report.times.len()).step_by(25) {
            let u = quantum_uncertainty(
                report.trajectory.state(i),
                report.trajectory.measurement(),
                NormOrder::Finite(1.0),
            )
            .unwrap();
            assert!(u <= report.entropy[i] + 1e-9);
        }
        // Self-consistency of the grid athermality values.
        let last = athermality(
            report.trajectory.probabilities(report.trajectory.len() - 1),
            &report.equilibrium_probs,
        )
        .unwrap();
        assert!((last - report.final_athermality).abs() < 1e-14);
    }
}

#[test]
fn lifted_commutator_bound_for_local_readouts() {
    // On a bipartite state, the speed of a lifted local readout under any
    // joint generator is capped by the generator norm times the local
    // uncertainty, which the correlation witness then minimizes.
    let mut rng = ChaCha12Rng::seed_from_u64(110);
    for _trial in 0..5 {
        let psi = random_pure_state(4, &mut rng);
        let state = BipartiteState::from_pure(&psi, (2, 2)).unwrap();
        let basis = MeasurementSet::from_basis(&haar_random_unitary(2, &mut rng)).unwrap();
        let lifted = basis.lift_right(2);
        let joint_h = random_hermitian(4, &mut rng);
        let v = probability_speed_exact(state.state(), &joint_h, &lifted).unwrap();
        let u_local = local_uncertainty(&state, &basis).unwrap();
        let ceiling = schatten_norm(&joint_h, NormOrder::Infinity).unwrap() * u_local;
        assert!(v <= ceiling + 1e-10, "lifted speed {v} above {ceiling}");
    }
}

#[test]
fn measured_distribution_entropy_never_exceeds_the_dimension_cap() {
    let mut rng = ChaCha12Rng::seed_from_u64(111);
    for dim in 2..=6usize {
        let rho = random_density_matrix(dim, dim, &mut rng).unwrap();
        let basis = MeasurementSet::from_basis(&haar_random_unitary(dim, &mut rng)).unwrap();
        let s = entropy_measure(&born_probabilities(&rho, &basis).unwrap()).unwrap();
        let cap = ((dim - 1) as f64).sqrt();
        assert!((0.0..=cap + 1e-12).contains(&s));
    }
}

#[test]
fn uncertainty_is_unitarily_covariant() {
    // Rotating state and measurement together leaves every Schatten order
    // of the uncertainty unchanged.
    let mut rng = ChaCha12Rng::seed_from_u64(112);
    let dim = 3;
    let rho = random_density_matrix(dim, 2, &mut rng).unwrap();
    let povm = random_povm(dim, 3, &mut rng).unwrap();
    let u = haar_random_unitary(dim, &mut rng);
    let rho_rot =
        DensityMatrix::new(u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part()).unwrap();
    let elements_rot: Vec<ComplexMatrix> = povm
        .elements()
        .iter()
        .map(|m| u.matmul(m).matmul(&u.adjoint()).hermitian_part())
        .collect();
    let povm_rot =
        MeasurementSet::new(elements_rot, qsl_core::quantum::MeasurementKind::Povm).unwrap();
    for order in [
        NormOrder::Finite(1.0),
        NormOrder::Finite(2.0),
        NormOrder::Infinity,
    ] {
        let before = quantum_uncertainty(&rho, &povm, order).unwrap();
        let after = quantum_uncertainty(&rho_rot, &povm_rot, order).unwrap();
        assert!((before - after).abs() < 1e-10);
    }
}
