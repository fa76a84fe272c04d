//! Random-restart refinement over the unitary group, shared by the
//! quasiprobability maximizer and the correlation witness minimizer.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linalg::{self, ComplexMatrix};

pub(crate) struct SearchOutcome {
    pub value: f64,
    pub basis: ComplexMatrix,
    pub per_restart: Vec<f64>,
}

/// Hill climb on the unitary group: each restart multiplies in small
/// rotations `exp(-i sigma K)` with a random Hermitian direction `K` and a
/// step size cooled geometrically from 0.3 down to 1e-3, keeping strict
/// improvements only. Warm starts are climbed first with the same budget,
/// then `restarts` Haar-random starting points. Ties go to the earliest
/// climb, so results are reproducible for a fixed seed.
pub(crate) fn refine_unitary(
    dim: usize,
    objective: impl Fn(&ComplexMatrix) -> f64,
    maximize: bool,
    rng: &mut impl RngCore,
    restarts: usize,
    iterations: usize,
    warm_starts: &[ComplexMatrix],
) -> SearchOutcome {
    assert!(
        restarts + warm_starts.len() >= 1,
        "need at least one starting point"
    );
    let improves = |candidate: f64, current: f64| {
        if maximize {
            candidate > current
        } else {
            candidate < current
        }
    };
    let sigma_hi = 0.3f64;
    let sigma_lo = 1e-3f64;
    let climb = |start: ComplexMatrix, local: &mut ChaCha12Rng| -> (f64, ComplexMatrix) {
        let mut basis = start;
        let mut value = objective(&basis);
        for j in 0..iterations {
            let frac = if iterations > 1 {
                j as f64 / (iterations - 1) as f64
            } else {
                0.0
            };
            let sigma = sigma_hi * (sigma_lo / sigma_hi).powf(frac);
            let direction = linalg::random_hermitian(dim, local);
            let scale = direction.frobenius_norm();
            if scale < 1e-12 {
                continue;
            }
            let rotation = linalg::unitary_step(&direction, sigma / scale)
                .expect("random direction is Hermitian by construction");
            let candidate = basis.matmul(&rotation);
            let candidate_value = objective(&candidate);
            if improves(candidate_value, value) {
                basis = candidate;
                value = candidate_value;
            }
        }
        (value, basis)
    };
    let mut best_value = 0.0f64;
    let mut best_basis: Option<ComplexMatrix> = None;
    let mut per_restart = Vec::with_capacity(restarts + warm_starts.len());
    let mut starts: Vec<Option<ComplexMatrix>> = warm_starts.iter().cloned().map(Some).collect();
    starts.extend(std::iter::repeat_with(|| None).take(restarts));
    for start in starts {
        // Each climb runs on its own counter-seeded stream so the walk is
        // insensitive to how many random numbers earlier climbs consumed.
        let mut local = ChaCha12Rng::seed_from_u64(rng.next_u64());
        let begin = match start {
            Some(basis) => basis,
            None => linalg::haar_random_unitary(dim, &mut local),
        };
        let (value, basis) = climb(begin, &mut local);
        per_restart.push(value);
        if best_basis.is_none() || improves(value, best_value) {
            best_value = value;
            best_basis = Some(basis);
        }
    }
    SearchOutcome {
        value: best_value,
        basis: best_basis.expect("at least one climb ran"),
        per_restart,
    }
}
