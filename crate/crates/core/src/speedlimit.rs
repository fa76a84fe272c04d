//! The speed of an outcome distribution under Hamiltonian driving and the
//! upper bounds it obeys.
//!
//! The central quantity is half the summed magnitude of the outcome
//! probability derivatives, `v = (1/2) sum_k |dP_k/dt|`, the total variation
//! rate of the measured distribution. For unitary dynamics each derivative is
//! a commutator trace, which splits into a generator norm times a
//! measurement uncertainty through the trace duality inequality at conjugate
//! exponent pairs. The uncertainty itself is capped by a distribution
//! functional, giving bounds that need only the outcome statistics, and
//! integrating along a trajectory turns the instantaneous inequality into a
//! minimum-time statement.

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, hermitian_eigensystem, schatten_norm, trace_product, unitary_step, ComplexMatrix,
    NormOrder,
};
use crate::quantum::{
    born_probabilities, purify, DensityMatrix, MeasurementKind, MeasurementSet, Trajectory,
};
use crate::tolerances;

/// Outcome of checking one instantaneous speed bound.
#[derive(Debug, Clone)]
pub struct SpeedReport {
    /// Total variation rate of the outcome distribution.
    pub speed: f64,
    /// Per-outcome derivative magnitudes `|dP_k/dt|`.
    pub derivative_magnitudes: Vec<f64>,
    /// Generator norm factor entering the bound, when the bound has one.
    pub energy_cost: Option<f64>,
    /// State-measurement factor entering the bound, when the bound has one.
    pub uncertainty: Option<f64>,
    /// Distribution functional `sum_k sqrt(P_k (1 - P_k))` for projective
    /// measurements, which caps the uncertainty factor.
    pub entropy: Option<f64>,
    /// Classical Fisher information of the outcome distribution.
    pub fisher_information: Option<f64>,
    /// Outcomes skipped in the Fisher sum because their probability sits
    /// below the degeneracy floor.
    pub dropped_outcomes: usize,
    pub bound: f64,
    /// `bound - speed`; nonnegative up to roundoff when the bound holds.
    pub slack: f64,
    pub label: &'static str,
}

/// Outcome of checking a minimum-time bound along a trajectory.
#[derive(Debug, Clone)]
pub struct TimeBoundReport {
    pub duration: f64,
    /// `sum_k |P_k(end) - P_k(start)|`.
    pub variational_distance: f64,
    /// Time average of the squared generator operator norm.
    pub mean_sq_energy: f64,
    /// Time average of the squared uncertainty factor.
    pub mean_sq_uncertainty: f64,
    /// Minimum driving time implied by the averages.
    pub bound: f64,
    /// `duration - bound`; nonnegative up to integrator error.
    pub slack: f64,
    /// For relaxation-to-target runs, how far the endpoint distribution
    /// actually sits from the target.
    pub endpoint_deviation: Option<f64>,
}

/// Signed derivatives `dP_k/dt = Im tr(M_k [H, rho])` under `drho/dt = -i [H, rho]`.
pub fn probability_derivatives(
    state: &DensityMatrix,
    h: &ComplexMatrix,
    measurement: &MeasurementSet,
) -> Result<Vec<f64>> {
    h.require_hermitian(tolerances::HERMITICITY)?;
    if h.rows() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: h.rows(),
        });
    }
    if measurement.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: measurement.dim(),
        });
    }
    let comm = commutator(h, state.matrix())?;
    Ok(measurement
        .elements()
        .iter()
        .map(|m| trace_product(m, &comm).im)
        .collect())
}

/// Total variation rate `(1/2) sum_k |dP_k/dt|` from the commutator formula.
pub fn probability_speed_exact(
    state: &DensityMatrix,
    h: &ComplexMatrix,
    measurement: &MeasurementSet,
) -> Result<f64> {
    let derivatives = probability_derivatives(state, h, measurement)?;
    Ok(derivatives.iter().map(|d| d.abs()).sum::<f64>() / 2.0)
}

/// Measured probabilities a short signed offset away from a stored grid
/// point. Both probes of a central difference start from the stored state and
/// propagate only over the window `[t - epsilon, t + epsilon]`. Probing by
/// re-integration from t = 0 would difference two long evolutions whose
/// step-size bias does not cancel, and the division by 2 epsilon amplifies
/// that residue past the derivative being measured.
fn probe_probabilities(trajectory: &Trajectory, index: usize, offset: f64) -> Result<Vec<f64>> {
    let t = trajectory.times()[index];
    let schedule = trajectory.schedule();
    let substeps = 4usize;
    let dt = offset / substeps as f64;
    let mut rho = trajectory.state(index).matrix().clone();
    for i in 0..substeps {
        let mid = t + (i as f64 + 0.5) * dt;
        let step = unitary_step(&schedule.evaluate(mid), dt)?;
        rho = step.matmul(&rho).matmul(&step.adjoint());
    }
    let state = DensityMatrix::trusted(rho.hermitian_part());
    born_probabilities(&state, trajectory.measurement())
}

fn check_interior(trajectory: &Trajectory, index: usize, epsilon: f64) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    if index >= trajectory.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: trajectory.len(),
        });
    }
    let t = trajectory.times()[index];
    if !(epsilon > 0.0) || t - epsilon < 0.0 || t + epsilon > trajectory.duration() {
        return Err(Error::BoundaryPoint);
    }
    Ok(t)
}

/// Total variation rate at an interior grid point of a trajectory by central
/// finite differences of the measured probabilities around the stored state.
pub fn probability_speed_fd(trajectory: &Trajectory, index: usize, epsilon: f64) -> Result<f64> {
    check_interior(trajectory, index, epsilon)?;
    let ahead = probe_probabilities(trajectory, index, epsilon)?;
    let behind = probe_probabilities(trajectory, index, -epsilon)?;
    Ok(ahead
        .iter()
        .zip(&behind)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / (4.0 * epsilon))
}

/// The same derivative assembled through surprisal rates: half the sum of
/// |d/dt(-ln P_k)| weighted by P_k, which collapses algebraically to the
/// plain form wherever the probabilities are positive. Outcomes whose
/// probability dips below `FISHER_PROBABILITY_FLOOR` at the grid point or at
/// either probe are dropped, since their log-derivative is singular.
pub fn surprisal_speed_fd(trajectory: &Trajectory, index: usize, epsilon: f64) -> Result<f64> {
    check_interior(trajectory, index, epsilon)?;
    let ahead = probe_probabilities(trajectory, index, epsilon)?;
    let behind = probe_probabilities(trajectory, index, -epsilon)?;
    let weights = trajectory.probabilities(index);
    let mut total = 0.0;
    for ((a, b), w) in ahead.iter().zip(&behind).zip(weights) {
        if *a <= FISHER_PROBABILITY_FLOOR
            || *b <= FISHER_PROBABILITY_FLOOR
            || *w <= FISHER_PROBABILITY_FLOOR
        {
            continue;
        }
        total += (b.ln() - a.ln()).abs() / (2.0 * epsilon) * w;
    }
    Ok(total / 2.0)
}

/// Measurement uncertainty at Schatten order `q`: half the summed norms of
/// the element-state commutators.
pub fn quantum_uncertainty(
    state: &DensityMatrix,
    measurement: &MeasurementSet,
    order: NormOrder,
) -> Result<f64> {
    if measurement.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: measurement.dim(),
        });
    }
    if let NormOrder::Finite(q) = order {
        if q < 1.0 || !q.is_finite() {
            return Err(Error::InvalidNormOrder(q));
        }
    }
    let mut total = 0.0;
    for m in measurement.elements() {
        total += schatten_norm(&commutator(m, state.matrix())?, order)?;
    }
    Ok(total / 2.0)
}

/// Trade-off bound `v <= ||H||_p * U_q` at the conjugate exponent pairs
/// (1, inf), (2, 2) and (inf, 1). Other exponents are rejected.
pub fn holder_bound(
    state: &DensityMatrix,
    h: &ComplexMatrix,
    measurement: &MeasurementSet,
    energy_order: NormOrder,
) -> Result<SpeedReport> {
    let (label, uncertainty_order) = match energy_order {
        NormOrder::Finite(p) if p == 1.0 => ("holder-1", NormOrder::Infinity),
        NormOrder::Finite(p) if p == 2.0 => ("holder-2", NormOrder::Finite(2.0)),
        NormOrder::Infinity => ("holder-inf", NormOrder::Finite(1.0)),
        NormOrder::Finite(p) => return Err(Error::InvalidNormOrder(p)),
    };
    let derivatives = probability_derivatives(state, h, measurement)?;
    let magnitudes: Vec<f64> = derivatives.iter().map(|d| d.abs()).collect();
    let speed = magnitudes.iter().sum::<f64>() / 2.0;
    let energy = schatten_norm(h, energy_order)?;
    let uncertainty = quantum_uncertainty(state, measurement, uncertainty_order)?;
    let bound = energy * uncertainty;
    let entropy = if uncertainty_order == NormOrder::Finite(1.0)
        && measurement.kind() != MeasurementKind::Povm
    {
        Some(entropy_measure(&born_probabilities(state, measurement)?)?)
    } else {
        None
    };
    Ok(SpeedReport {
        speed,
        derivative_magnitudes: magnitudes,
        energy_cost: Some(energy),
        uncertainty: Some(uncertainty),
        entropy,
        fisher_information: None,
        dropped_outcomes: 0,
        bound,
        slack: bound - speed,
        label,
    })
}

/// Distribution functional `sum_k sqrt(P_k (1 - P_k))`: zero exactly on
/// deterministic distributions, and an upper cap on the q = 1 uncertainty of
/// projective measurements.
pub fn entropy_measure(probabilities: &[f64]) -> Result<f64> {
    let sum: f64 = probabilities.iter().sum();
    if (sum - 1.0).abs() > tolerances::PROBABILITY_SUM {
        return Err(Error::NotNormalized((sum - 1.0).abs()));
    }
    if probabilities
        .iter()
        .any(|&p| p < -tolerances::PROBABILITY_SUM || p > 1.0 + tolerances::PROBABILITY_SUM)
    {
        return Err(Error::NotNormalized(sum));
    }
    Ok(probabilities
        .iter()
        .map(|&p| (p * (1.0 - p)).max(0.0).sqrt())
        .sum())
}

/// Probability floor below which an outcome is excluded from the Fisher sum.
pub const FISHER_PROBABILITY_FLOOR: f64 = 1e-12;

/// Classical Fisher information bound `v <= sqrt(F) / 2` with
/// `F = sum_k (dP_k/dt)^2 / P_k` over outcomes above the probability floor.
pub fn fisher_speed_bound(
    state: &DensityMatrix,
    h: &ComplexMatrix,
    measurement: &MeasurementSet,
) -> Result<SpeedReport> {
    let derivatives = probability_derivatives(state, h, measurement)?;
    let probabilities = born_probabilities(state, measurement)?;
    let magnitudes: Vec<f64> = derivatives.iter().map(|d| d.abs()).collect();
    let speed = magnitudes.iter().sum::<f64>() / 2.0;
    let mut fisher = 0.0;
    let mut dropped = 0;
    for (d, p) in derivatives.iter().zip(&probabilities) {
        if *p >= FISHER_PROBABILITY_FLOOR {
            fisher += d * d / p;
        } else {
            dropped += 1;
        }
    }
    let bound = fisher.sqrt() / 2.0;
    Ok(SpeedReport {
        speed,
        derivative_magnitudes: magnitudes,
        energy_cost: None,
        uncertainty: None,
        entropy: None,
        fisher_information: Some(fisher),
        dropped_outcomes: dropped,
        bound,
        slack: bound - speed,
        label: "fisher",
    })
}

/// Purification-based bound: the speed of the lifted measurement on any joint
/// system-ancilla generator is capped by the generator operator norm times
/// the summed outcome standard deviations `sqrt(tr(M_k^2 rho) - tr(M_k rho)^2)`.
/// For projective measurements the deviation sum collapses to the
/// distribution functional of the outcome probabilities.
pub fn stddev_bound(
    state: &DensityMatrix,
    measurement: &MeasurementSet,
    joint_generator: &ComplexMatrix,
) -> Result<SpeedReport> {
    let dim = state.dim();
    joint_generator.require_hermitian(tolerances::HERMITICITY)?;
    if joint_generator.rows() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            got: joint_generator.rows(),
        });
    }
    if measurement.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: measurement.dim(),
        });
    }
    let psi = purify(state)?;
    let joint_state = psi.density();
    let lifted = measurement.lift_right(dim);
    let derivatives = probability_derivatives(&joint_state, joint_generator, &lifted)?;
    let magnitudes: Vec<f64> = derivatives.iter().map(|d| d.abs()).collect();
    let speed = magnitudes.iter().sum::<f64>() / 2.0;

    let mut deviation_sum = 0.0;
    for m in measurement.elements() {
        let mean = trace_product(m, state.matrix()).re;
        let second = trace_product(&m.matmul(m), state.matrix()).re;
        deviation_sum += (second - mean * mean).max(0.0).sqrt();
    }
    let energy = schatten_norm(joint_generator, NormOrder::Infinity)?;
    let bound = energy * deviation_sum;
    let entropy = if measurement.kind() != MeasurementKind::Povm {
        Some(entropy_measure(&born_probabilities(state, measurement)?)?)
    } else {
        None
    };
    Ok(SpeedReport {
        speed,
        derivative_magnitudes: magnitudes,
        energy_cost: Some(energy),
        uncertainty: Some(deviation_sum),
        entropy,
        fisher_information: None,
        dropped_outcomes: 0,
        bound,
        slack: bound - speed,
        label: "stddev",
    })
}

/// Trapezoid-rule time average of sampled values over the grid.
pub(crate) fn trapezoid_mean(times: &[f64], values: &[f64]) -> f64 {
    assert_eq!(times.len(), values.len());
    assert!(times.len() >= 2);
    let span = times[times.len() - 1] - times[0];
    let mut integral = 0.0;
    for i in 0..times.len() - 1 {
        integral += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
    }
    integral / span
}

/// Minimum-time bound along a trajectory: the endpoint variational distance
/// over twice the root product of time-averaged squared generator norm and
/// squared q = 1 uncertainty.
pub fn qsl_time_bound(trajectory: &Trajectory) -> Result<TimeBoundReport> {
    if trajectory.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    let first = trajectory.probabilities(0);
    let last = trajectory.probabilities(trajectory.len() - 1);
    let variational_distance: f64 = first.iter().zip(last).map(|(a, b)| (a - b).abs()).sum();

    let times = trajectory.times();
    let mut energies = Vec::with_capacity(times.len());
    let mut uncertainties = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let h = trajectory.schedule().evaluate(t);
        let norm = schatten_norm(&h, NormOrder::Infinity)?;
        energies.push(norm * norm);
        let u = quantum_uncertainty(
            trajectory.state(i),
            trajectory.measurement(),
            NormOrder::Finite(1.0),
        )?;
        uncertainties.push(u * u);
    }
    let mean_sq_energy = trapezoid_mean(times, &energies);
    let mean_sq_uncertainty = trapezoid_mean(times, &uncertainties);
    let denominator = 2.0 * (mean_sq_energy * mean_sq_uncertainty).sqrt();
    let bound = if denominator > 1e-150 {
        variational_distance / denominator
    } else if variational_distance <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(TimeBoundReport {
        duration: trajectory.duration(),
        variational_distance,
        mean_sq_energy,
        mean_sq_uncertainty,
        bound,
        slack: trajectory.duration() - bound,
        endpoint_deviation: None,
    })
}

/// Two-outcome projective measurement that maximizes the variational
/// distance between two states: project onto the nonnegative and negative
/// eigenspaces of their difference.
pub fn helstrom_povm(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<MeasurementSet> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            got: rho1.dim(),
        });
    }
    let dim = rho0.dim();
    let difference = rho1.matrix().sub(rho0.matrix());
    let eig = hermitian_eigensystem(&difference, tolerances::HERMITICITY)?;
    let mut positive = ComplexMatrix::zeros(dim, dim);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda >= 0.0 {
            let col = eig.eigenvectors.column(i);
            positive = positive.add(&ComplexMatrix::outer(&col, &col));
        }
    }
    let positive = positive.hermitian_part();
    let negative = ComplexMatrix::identity(dim).sub(&positive).hermitian_part();
    MeasurementSet::new(vec![positive, negative], MeasurementKind::Pvm)
}
