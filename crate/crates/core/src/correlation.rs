//! A correlation witness from measurement speed limits: the smallest q = 1
//! uncertainty any local rank-1 readout on one subsystem can have on the
//! joint state. Product states admit a local eigenbasis that makes every
//! lifted commutator vanish, so a strictly positive infimum certifies
//! correlation between the subsystems. For pure joint states the infimum has
//! a closed form in the reduced spectrum.

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{commutator, schatten_norm, ComplexMatrix, NormOrder};
use crate::quantum::{
    eigensystem_of_state, BipartiteState, DensityMatrix, MeasurementKind, MeasurementSet,
    PureState, Subsystem,
};
use crate::search;
use crate::tolerances;

/// q = 1 uncertainty of a local rank-1 readout on the left subsystem,
/// evaluated on the joint state through the lifted elements.
pub fn local_uncertainty(state: &BipartiteState, local_basis: &MeasurementSet) -> Result<f64> {
    if local_basis.kind() != MeasurementKind::Rank1Pvm {
        return Err(Error::RequiresRank1Basis);
    }
    let (da, db) = state.dims();
    if local_basis.dim() != da {
        return Err(Error::DimensionMismatch {
            expected: da,
            got: local_basis.dim(),
        });
    }
    let lifted = local_basis.lift_right(db);
    let mut total = 0.0;
    for m in lifted.elements() {
        total += schatten_norm(
            &commutator(m, state.state().matrix())?,
            NormOrder::Finite(1.0),
        )?;
    }
    Ok(total / 2.0)
}

/// Same objective with the basis given as unitary columns and no
/// revalidation, for the optimizer's inner loop.
fn basis_objective(state: &BipartiteState, basis: &ComplexMatrix) -> f64 {
    let (da, db) = state.dims();
    let id_b = ComplexMatrix::identity(db);
    let mut total = 0.0;
    for k in 0..da {
        let col = basis.column(k);
        let lifted = ComplexMatrix::outer(&col, &col).kron(&id_b);
        let comm =
            commutator(&lifted, state.state().matrix()).expect("dimensions fixed by construction");
        total +=
            schatten_norm(&comm, NormOrder::Finite(1.0)).expect("finite entries by construction");
    }
    total / 2.0
}

/// Result of minimizing the local uncertainty over rank-1 readouts.
#[derive(Debug, Clone)]
pub struct CorrelationReport {
    /// The minimized local uncertainty.
    pub value: f64,
    /// The basis attaining it.
    pub optimal_basis: MeasurementSet,
    /// Best value found by each restart, in restart order.
    pub per_restart: Vec<f64>,
    /// Spectral closed form, available when the joint state is pure.
    pub closed_form: Option<f64>,
}

/// Minimizes the local uncertainty over rank-1 readouts of the left
/// subsystem by random-restart hill climbing. For pure joint states the
/// spectral closed form is evaluated alongside as an independent reference.
pub fn correlation_q(
    state: &BipartiteState,
    rng: &mut impl RngCore,
    restarts: usize,
    iterations: usize,
) -> Result<CorrelationReport> {
    let (da, _) = state.dims();
    // The eigenbasis of the reduced state is the exact minimizer on product,
    // classical-quantum, and pure joint states, so it seeds the search before
    // the Haar-random restarts take over the generic case.
    let reduced_eigenbasis = eigensystem_of_state(&state.reduced(Subsystem::A)?)?.eigenvectors;
    let outcome = search::refine_unitary(
        da,
        |basis| basis_objective(state, basis),
        false,
        rng,
        restarts,
        iterations,
        &[reduced_eigenbasis],
    );
    let closed_form = if state.state().purity() > 1.0 - tolerances::HERMITICITY {
        Some(reduced_spectrum_q(&state.reduced(Subsystem::A)?)?)
    } else {
        None
    };
    Ok(CorrelationReport {
        value: outcome.value,
        optimal_basis: MeasurementSet::from_basis(&outcome.basis)?,
        per_restart: outcome.per_restart,
        closed_form,
    })
}

/// Closed form of the witness for a pure joint state: `sum_i sqrt(l_i - l_i^2)`
/// over the reduced-state spectrum.
pub fn pure_state_q(psi: &PureState, dims: (usize, usize)) -> Result<f64> {
    let (da, db) = dims;
    if da * db != psi.dim() {
        return Err(Error::BadFactorization(da, db, psi.dim()));
    }
    let joint = BipartiteState::from_pure(psi, dims)?;
    reduced_spectrum_q(&joint.reduced(Subsystem::A)?)
}

fn reduced_spectrum_q(reduced: &DensityMatrix) -> Result<f64> {
    let eig = eigensystem_of_state(reduced)?;
    Ok(eig
        .eigenvalues
        .iter()
        .map(|&l| (l - l * l).max(0.0).sqrt())
        .sum())
}

/// Mixture `sum_k p_k |a_k><a_k| (x) sigma_k` of local basis states on the
/// left against arbitrary states on the right. Such states carry only
/// classical correlation in that basis and the witness vanishes on them.
pub fn classical_quantum_state(
    probabilities: &[f64],
    local_basis: &MeasurementSet,
    right_states: &[DensityMatrix],
) -> Result<BipartiteState> {
    if local_basis.kind() != MeasurementKind::Rank1Pvm {
        return Err(Error::RequiresRank1Basis);
    }
    if probabilities.len() != local_basis.len() || probabilities.len() != right_states.len() {
        return Err(Error::LengthMismatch {
            left: probabilities.len(),
            right: local_basis.len().max(right_states.len()),
        });
    }
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > tolerances::PROBABILITY_SUM || probabilities.iter().any(|&p| p < 0.0) {
        return Err(Error::NotNormalized((sum - 1.0).abs()));
    }
    let da = local_basis.dim();
    let db = right_states[0].dim();
    for sigma in right_states {
        if sigma.dim() != db {
            return Err(Error::DimensionMismatch {
                expected: db,
                got: sigma.dim(),
            });
        }
    }
    let mut joint = ComplexMatrix::zeros(da * db, da * db);
    for ((p, pi), sigma) in probabilities
        .iter()
        .zip(local_basis.elements())
        .zip(right_states)
    {
        joint = joint.add(&pi.kron(sigma.matrix()).scale(Complex64::new(*p, 0.0)));
    }
    let state = DensityMatrix::new(joint.hermitian_part())?;
    BipartiteState::new(state, (da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{random_density_matrix, random_pure_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_state() -> BipartiteState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap();
        BipartiteState::from_pure(&psi, (2, 2)).unwrap()
    }

    #[test]
    fn local_uncertainty_of_the_bell_state_in_the_computational_basis() {
        let u = local_uncertainty(&bell_state(), &MeasurementSet::computational(2)).unwrap();
        assert!((u - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_closed_form_for_partially_entangled_pairs() {
        let p: f64 = 0.9;
        let psi = PureState::new(vec![
            c(p.sqrt(), 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c((1.0 - p).sqrt(), 0.0),
        ])
        .unwrap();
        let q = pure_state_q(&psi, (2, 2)).unwrap();
        assert!((q - 0.6).abs() < 1e-12);

        let product = random_pure_state(2, &mut ChaCha12Rng::seed_from_u64(3));
        let lifted: Vec<Complex64> = product
            .amplitudes()
            .iter()
            .flat_map(|a| vec![*a, c(0.0, 0.0)])
            .collect();
        let psi_product = PureState::new(lifted).unwrap();
        assert!(pure_state_q(&psi_product, (2, 2)).unwrap() < 1e-12);
    }

    #[test]
    fn optimizer_matches_the_closed_form_on_pure_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(51);
        for dims in [(2usize, 2usize), (2, 3)] {
            let psi = random_pure_state(dims.0 * dims.1, &mut rng);
            let state = BipartiteState::from_pure(&psi, dims).unwrap();
            let report = correlation_q(&state, &mut rng, 8, 300).unwrap();
            let reference = report.closed_form.expect("pure state has a closed form");
            assert!(
                (report.value - reference).abs() < 1e-3,
                "optimizer {} vs closed form {}",
                report.value,
                reference
            );
            // The optimizer found a real basis attaining its value.
            let check = local_uncertainty(&state, &report.optimal_basis).unwrap();
            assert!((check - report.value).abs() < 1e-10);
            // Eight random restarts plus the reduced-eigenbasis seed.
            assert_eq!(report.per_restart.len(), 9);
        }
    }

    #[test]
    fn witness_vanishes_on_classical_quantum_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let blocks = vec![
            random_density_matrix(2, 2, &mut rng).unwrap(),
            random_density_matrix(2, 1, &mut rng).unwrap(),
        ];
        let cq = classical_quantum_state(&[0.3, 0.7], &MeasurementSet::computational(2), &blocks)
            .unwrap();
        // The diagonal basis annihilates every lifted commutator exactly.
        let at_diagonal = local_uncertainty(&cq, &MeasurementSet::computational(2)).unwrap();
        assert!(at_diagonal < 1e-12);
        let report = correlation_q(&cq, &mut rng, 6, 300).unwrap();
        // The reduced eigenbasis seed lands on the annihilating basis, so the
        // minimum comes out at numerical zero rather than optimizer precision.
        assert!(
            report.value < 1e-6,
            "witness on a cq state: {}",
            report.value
        );
        assert!(report.closed_form.is_none());
    }

    #[test]
    fn witness_is_invariant_under_local_unitaries() {
        let mut rng = ChaCha12Rng::seed_from_u64(90);
        let ua = crate::linalg::haar_random_unitary(2, &mut rng);
        let ub = crate::linalg::haar_random_unitary(2, &mut rng);
        let rotated_matrix = ua
            .kron(&ub)
            .matmul(bell_state().state().matrix())
            .matmul(&ua.kron(&ub).adjoint());
        let rotated = BipartiteState::new(
            DensityMatrix::new(rotated_matrix.hermitian_part()).unwrap(),
            (2, 2),
        )
        .unwrap();
        let report = correlation_q(&rotated, &mut rng, 8, 300).unwrap();
        assert!(
            (report.value - 1.0).abs() < 1e-3,
            "rotated Bell: {}",
            report.value
        );
    }

    #[test]
    fn classical_quantum_state_validation() {
        let blocks = vec![DensityMatrix::maximally_mixed(2); 2];
        assert!(matches!(
            classical_quantum_state(&[0.5, 0.6], &MeasurementSet::computational(2), &blocks),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            classical_quantum_state(&[0.5, 0.5], &MeasurementSet::computational(2), &blocks[..1]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
