//! Distance from thermal equilibrium as measured in the energy basis, and
//! minimum-time bounds for system-environment runs that start from the
//! two-copy thermal purification.
//!
//! The system starts purified so that its reduced state is exactly Gibbs;
//! any joint driving that builds up a gap between the measured energy
//! populations and the Gibbs weights must run for a time bounded below by
//! that gap over the time-averaged driving strength and distribution
//! functional. The reverse direction bounds relaxation back to equilibrium
//! by the athermality the run starts with.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, ComplexMatrix};
use crate::linalg::{schatten_norm, NormOrder};
use crate::quantum::{
    evolve_trajectory, thermofield_double, HamiltonianSchedule, MeasurementSet, Trajectory,
};
use crate::speedlimit::{entropy_measure, trapezoid_mean, TimeBoundReport};
use crate::tolerances;

/// Half the total variation distance between an outcome distribution and a
/// reference equilibrium distribution.
pub fn athermality(probabilities: &[f64], equilibrium: &[f64]) -> Result<f64> {
    if probabilities.len() != equilibrium.len() {
        return Err(Error::LengthMismatch {
            left: probabilities.len(),
            right: equilibrium.len(),
        });
    }
    for dist in [probabilities, equilibrium] {
        let sum: f64 = dist.iter().sum();
        if (sum - 1.0).abs() > tolerances::PROBABILITY_SUM {
            return Err(Error::NotNormalized((sum - 1.0).abs()));
        }
    }
    Ok(probabilities
        .iter()
        .zip(equilibrium)
        .map(|(p, q)| (p - q).abs())
        .sum::<f64>()
        / 2.0)
}

/// A joint system-environment drive of a thermally purified system.
///
/// The environment copy has the same dimension as the system, the initial
/// state is the two-copy purification of the Gibbs state of the system
/// Hamiltonian, and the readout projects onto the system energy eigenbasis.
#[derive(Debug, Clone)]
pub struct AthermalityExperiment {
    system_hamiltonian: ComplexMatrix,
    beta: f64,
    schedule: HamiltonianSchedule,
    steps: usize,
}

impl AthermalityExperiment {
    pub fn new(
        system_hamiltonian: ComplexMatrix,
        beta: f64,
        schedule: HamiltonianSchedule,
        steps: usize,
    ) -> Result<Self> {
        system_hamiltonian.require_hermitian(tolerances::HERMITICITY)?;
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::NegativeBeta(beta));
        }
        if steps == 0 {
            return Err(Error::InvalidSteps);
        }
        let d = system_hamiltonian.rows();
        if schedule.dim() != d * d {
            return Err(Error::BadFactorization(d, d, schedule.dim()));
        }
        Ok(Self {
            system_hamiltonian,
            beta,
            schedule,
            steps,
        })
    }

    #[inline]
    pub fn system_dim(&self) -> usize {
        self.system_hamiltonian.rows()
    }

    #[inline]
    pub fn schedule(&self) -> &HamiltonianSchedule {
        &self.schedule
    }
}

/// Grid records and endpoint bound of one athermality run.
#[derive(Debug, Clone)]
pub struct AthermalityReport {
    pub times: Vec<f64>,
    /// Athermality of the measured energy populations at each grid point.
    pub athermality: Vec<f64>,
    /// Distribution functional of the populations at each grid point.
    pub entropy: Vec<f64>,
    /// Operator norm of the joint generator at each grid point.
    pub generator_norm: Vec<f64>,
    /// Minimum-time bound evaluated on the grid prefix ending at each point.
    pub running_bound: Vec<f64>,
    /// Gibbs weights matched to the readout ordering.
    pub equilibrium_probs: Vec<f64>,
    pub final_athermality: f64,
    pub mean_sq_generator_norm: f64,
    pub mean_sq_entropy: f64,
    /// Minimum driving time implied by the final athermality.
    pub bound: f64,
    /// Horizon minus bound; nonnegative up to integrator error.
    pub slack: f64,
    pub trajectory: Trajectory,
}

fn guarded_ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator > 1e-150 {
        numerator / denominator
    } else if numerator <= 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Runs the experiment: evolves the purification under the joint schedule,
/// tracks the energy populations against the Gibbs weights, and evaluates
/// the minimum-time bound from the time-averaged driving strength and
/// distribution functional.
pub fn run_athermality_experiment(experiment: &AthermalityExperiment) -> Result<AthermalityReport> {
    let d = experiment.system_dim();
    let eig = hermitian_eigensystem(&experiment.system_hamiltonian, tolerances::HERMITICITY)?;
    let ground = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| (-experiment.beta * (e - ground)).exp())
        .collect();
    let z: f64 = weights.iter().sum();
    let equilibrium_probs: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let readout = MeasurementSet::from_basis(&eig.eigenvectors)?.lift_right(d);
    let initial = thermofield_double(&experiment.system_hamiltonian, experiment.beta)?.density();
    let trajectory = evolve_trajectory(&initial, &experiment.schedule, experiment.steps, &readout)?;

    let times = trajectory.times().to_vec();
    let n = times.len();
    let mut athermality_grid = Vec::with_capacity(n);
    let mut entropy_grid = Vec::with_capacity(n);
    let mut norm_grid = Vec::with_capacity(n);
    for (i, &t) in times.iter().enumerate() {
        let p = trajectory.probabilities(i);
        athermality_grid.push(athermality(p, &equilibrium_probs)?);
        entropy_grid.push(entropy_measure(p)?);
        norm_grid.push(schatten_norm(
            &experiment.schedule.evaluate(t),
            NormOrder::Infinity,
        )?);
    }

    // Running trapezoid integrals of the squared grid functions give the
    // bound restricted to each prefix of the run.
    let mut running_bound = Vec::with_capacity(n);
    running_bound.push(0.0);
    let mut int_norm_sq = 0.0;
    let mut int_entropy_sq = 0.0;
    for i in 1..n {
        let dt = times[i] - times[i - 1];
        int_norm_sq +=
            0.5 * (norm_grid[i - 1] * norm_grid[i - 1] + norm_grid[i] * norm_grid[i]) * dt;
        int_entropy_sq += 0.5
            * (entropy_grid[i - 1] * entropy_grid[i - 1] + entropy_grid[i] * entropy_grid[i])
            * dt;
        let span = times[i] - times[0];
        let denominator = ((int_norm_sq / span) * (int_entropy_sq / span)).sqrt();
        running_bound.push(guarded_ratio(athermality_grid[i], denominator));
    }

    let sq = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x * x).collect() };
    let mean_sq_generator_norm = trapezoid_mean(&times, &sq(&norm_grid));
    let mean_sq_entropy = trapezoid_mean(&times, &sq(&entropy_grid));
    let final_athermality = *athermality_grid.last().expect("nonempty grid");
    let bound = guarded_ratio(
        final_athermality,
        (mean_sq_generator_norm * mean_sq_entropy).sqrt(),
    );

    Ok(AthermalityReport {
        slack: trajectory.duration() - bound,
        times,
        athermality: athermality_grid,
        entropy: entropy_grid,
        generator_norm: norm_grid,
        running_bound,
        equilibrium_probs,
        final_athermality,
        mean_sq_generator_norm,
        mean_sq_entropy,
        bound,
        trajectory,
    })
}

/// Minimum-time bound for a run that starts away from equilibrium and
/// relaxes toward it: the initial athermality over the averaged driving
/// strength and distribution functional. The endpoint's remaining distance
/// to the target is reported rather than enforced.
pub fn reverse_thermalization_bound(
    trajectory: &Trajectory,
    equilibrium: &[f64],
) -> Result<TimeBoundReport> {
    if trajectory.len() < 2 {
        return Err(Error::EmptyTrajectory);
    }
    let start = athermality(trajectory.probabilities(0), equilibrium)?;
    let end = athermality(trajectory.probabilities(trajectory.len() - 1), equilibrium)?;

    let times = trajectory.times();
    let mut norm_sq = Vec::with_capacity(times.len());
    let mut entropy_sq = Vec::with_capacity(times.len());
    for (i, &t) in times.iter().enumerate() {
        let norm = schatten_norm(&trajectory.schedule().evaluate(t), NormOrder::Infinity)?;
        norm_sq.push(norm * norm);
        let s = entropy_measure(trajectory.probabilities(i))?;
        entropy_sq.push(s * s);
    }
    let mean_sq_energy = trapezoid_mean(times, &norm_sq);
    let mean_sq_uncertainty = trapezoid_mean(times, &entropy_sq);
    let bound = guarded_ratio(start, (mean_sq_energy * mean_sq_uncertainty).sqrt());
    Ok(TimeBoundReport {
        duration: trajectory.duration(),
        variational_distance: 2.0 * start,
        mean_sq_energy,
        mean_sq_uncertainty,
        bound,
        slack: trajectory.duration() - bound,
        endpoint_deviation: Some(end),
    })
}

/// Random constant product-plus-coupling generator on system x environment:
/// local terms on each factor plus a random two-sided coupling with strength
/// drawn from `[0.5, 1.5]`.
pub fn random_coupling_generator(dim: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    use rand::Rng;
    let id = ComplexMatrix::identity(dim);
    let local_a = crate::linalg::random_hermitian(dim, rng);
    let local_b = crate::linalg::random_hermitian(dim, rng);
    let va = crate::linalg::random_hermitian(dim, rng);
    let vb = crate::linalg::random_hermitian(dim, rng);
    let strength: f64 = rng.random_range(0.5..1.5);
    local_a
        .kron(&id)
        .add(&id.kron(&local_b))
        .add(
            &va.kron(&vb)
                .scale(num_complex::Complex64::new(strength, 0.0)),
        )
        .hermitian_part()
}
