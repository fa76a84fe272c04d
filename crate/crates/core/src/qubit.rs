//! Closed forms for two-level systems: Bloch coordinates, basis coherence,
//! the generator that drives an outcome distribution as fast as possible at
//! unit energy, and the complementarity identity tying the three mutually
//! unbiased readouts to the Bloch vector length.

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{self, dot, ComplexMatrix};
use crate::quantum::{DensityMatrix, MeasurementSet};
use crate::speedlimit::probability_speed_exact;
use crate::tolerances;

fn require_qubit(dim: usize) -> Result<()> {
    if dim == 2 {
        Ok(())
    } else {
        Err(Error::NotQubit(dim))
    }
}

/// Real coordinates of a qubit state, `r_i = tr(rho sigma_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }
}

pub fn bloch_vector(state: &DensityMatrix) -> Result<BlochVector> {
    require_qubit(state.dim())?;
    let rho = state.matrix();
    Ok(BlochVector {
        x: linalg::trace_product(&linalg::pauli_x(), rho).re,
        y: linalg::trace_product(&linalg::pauli_y(), rho).re,
        z: linalg::trace_product(&linalg::pauli_z(), rho).re,
    })
}

/// Qubit state `(I + r . sigma) / 2` for a Bloch vector inside the unit ball.
pub fn state_from_bloch(r: BlochVector) -> Result<DensityMatrix> {
    let norm = r.norm();
    if !norm.is_finite() || norm > 1.0 + tolerances::NEGATIVE_EIGENVALUE {
        return Err(Error::OutsideBall(norm));
    }
    let matrix = ComplexMatrix::new(
        2,
        2,
        vec![
            Complex64::new((1.0 + r.z) / 2.0, 0.0),
            Complex64::new(r.x / 2.0, -r.y / 2.0),
            Complex64::new(r.x / 2.0, r.y / 2.0),
            Complex64::new((1.0 - r.z) / 2.0, 0.0),
        ],
    )?;
    DensityMatrix::new(matrix)
}

/// An ordered orthonormal qubit basis `{|k0>, |k1>}`.
#[derive(Debug, Clone)]
pub struct QubitBasis {
    k0: Vec<Complex64>,
    k1: Vec<Complex64>,
}

impl QubitBasis {
    pub fn new(k0: Vec<Complex64>, k1: Vec<Complex64>) -> Result<Self> {
        if k0.len() != 2 || k1.len() != 2 {
            return Err(Error::NotQubit(k0.len().max(k1.len())));
        }
        let defect = (linalg::vector_norm(&k0) - 1.0)
            .abs()
            .max((linalg::vector_norm(&k1) - 1.0).abs())
            .max(dot(&k0, &k1).norm());
        if defect > tolerances::STATE_NORM {
            return Err(Error::NotNormalized(defect));
        }
        Ok(Self { k0, k1 })
    }

    pub fn z_basis() -> Self {
        Self {
            k0: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            k1: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn x_basis() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            k0: vec![Complex64::new(r, 0.0), Complex64::new(r, 0.0)],
            k1: vec![Complex64::new(r, 0.0), Complex64::new(-r, 0.0)],
        }
    }

    pub fn y_basis() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            k0: vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
            k1: vec![Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
        }
    }

    #[inline]
    pub fn k0(&self) -> &[Complex64] {
        &self.k0
    }

    #[inline]
    pub fn k1(&self) -> &[Complex64] {
        &self.k1
    }

    pub fn to_measurement(&self) -> MeasurementSet {
        MeasurementSet::from_basis(&ComplexMatrix::from_columns(&[
            self.k0.clone(),
            self.k1.clone(),
        ]))
        .expect("orthonormal by construction")
    }

    /// Off-diagonal matrix element `<k0| rho |k1>`.
    pub fn coherence(&self, state: &DensityMatrix) -> Result<Complex64> {
        require_qubit(state.dim())?;
        Ok(dot(&self.k0, &state.matrix().mul_vec(&self.k1)))
    }
}

/// Coherence of a qubit state in a basis: the summed magnitudes of the
/// off-diagonal matrix elements, `2 |<k0| rho |k1>|`.
pub fn l1_coherence(state: &DensityMatrix, basis: &QubitBasis) -> Result<f64> {
    Ok(2.0 * basis.coherence(state)?.norm())
}

/// The unit-norm generator maximizing the outcome speed of a qubit basis
/// measurement, together with the speed it achieves.
///
/// The optimum is the off-diagonal generator `exp(-i beta) |k0><k1| + h.c.`
/// with `beta = pi/2 - arg <k0| rho |k1>`, and the achieved speed equals the
/// basis coherence of the state, which is the ceiling for any generator of
/// unit operator norm.
pub fn optimal_generator(
    state: &DensityMatrix,
    basis: &QubitBasis,
) -> Result<(ComplexMatrix, f64)> {
    let coherence = basis.coherence(state)?;
    let beta = std::f64::consts::FRAC_PI_2 - coherence.arg();
    let phase = Complex64::from_polar(1.0, -beta);
    let off = ComplexMatrix::outer(basis.k0(), basis.k1()).scale(phase);
    let generator = off.add(&off.adjoint());
    let achieved = probability_speed_exact(state, &generator, &basis.to_measurement())?;
    Ok((generator, achieved))
}

/// Squared outcome speeds of the three mutually unbiased qubit readouts and
/// the Bloch invariant they sum to.
#[derive(Debug, Clone, Copy)]
pub struct MubComplementarity {
    pub x_speed: f64,
    pub y_speed: f64,
    pub z_speed: f64,
    /// `x^2 + y^2 + z^2` of the speeds.
    pub sum_of_squares: f64,
    /// `2 |r|^2`, which the sum of squares equals identically.
    pub bloch_invariant: f64,
}

/// Evaluates the complementarity identity: the squared maximal speeds of the
/// X, Y and Z readouts sum to twice the squared Bloch length.
pub fn mub_complementarity(state: &DensityMatrix) -> Result<MubComplementarity> {
    let x_speed = l1_coherence(state, &QubitBasis::x_basis())?;
    let y_speed = l1_coherence(state, &QubitBasis::y_basis())?;
    let z_speed = l1_coherence(state, &QubitBasis::z_basis())?;
    let r = bloch_vector(state)?;
    let sum_of_squares = x_speed * x_speed + y_speed * y_speed + z_speed * z_speed;
    Ok(MubComplementarity {
        x_speed,
        y_speed,
        z_speed,
        sum_of_squares,
        bloch_invariant: 2.0 * r.norm() * r.norm(),
    })
}

/// Random qubit basis from a Haar unitary's columns.
pub fn random_qubit_basis(rng: &mut impl RngCore) -> QubitBasis {
    let u = linalg::haar_random_unitary(2, rng);
    QubitBasis::new(u.column(0), u.column(1)).expect("Haar columns are orthonormal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random_density_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn bloch_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        for _ in 0..20 {
            let rho = random_density_matrix(2, 2, &mut rng).unwrap();
            let r = bloch_vector(&rho).unwrap();
            assert!(r.norm() <= 1.0 + 1e-12);
            let back = state_from_bloch(r).unwrap();
            assert!(back.matrix().sub(rho.matrix()).max_abs_entry() < 1e-12);
        }
        let circular = state_from_bloch(BlochVector {
            x: 0.0,
            y: 1.0,
            z: 0.0,
        })
        .unwrap();
        let r = bloch_vector(&circular).unwrap();
        assert!((r.y - 1.0).abs() < 1e-12 && r.x.abs() < 1e-12 && r.z.abs() < 1e-12);
    }

    #[test]
    fn bloch_validation() {
        assert!(matches!(
            state_from_bloch(BlochVector {
                x: 1.0,
                y: 0.5,
                z: 0.0
            }),
            Err(Error::OutsideBall(_))
        ));
        let qutrit = DensityMatrix::maximally_mixed(3);
        assert!(matches!(bloch_vector(&qutrit), Err(Error::NotQubit(3))));
    }

    #[test]
    fn coherences_from_bloch_components() {
        // In each mutually unbiased basis the coherence depends only on the
        // two transverse Bloch components.
        let r = BlochVector {
            x: 0.3,
            y: 0.4,
            z: 0.5,
        };
        let rho = state_from_bloch(r).unwrap();
        let cx = l1_coherence(&rho, &QubitBasis::x_basis()).unwrap();
        let cy = l1_coherence(&rho, &QubitBasis::y_basis()).unwrap();
        let cz = l1_coherence(&rho, &QubitBasis::z_basis()).unwrap();
        assert!((cx - (r.y * r.y + r.z * r.z).sqrt()).abs() < 1e-12);
        assert!((cy - (r.x * r.x + r.z * r.z).sqrt()).abs() < 1e-12);
        assert!((cz - (r.x * r.x + r.y * r.y).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complementarity_identity_holds_for_random_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(14);
        for rank in [1usize, 2] {
            for _ in 0..25 {
                let rho = random_density_matrix(2, rank, &mut rng).unwrap();
                let report = mub_complementarity(&rho).unwrap();
                assert!(
                    (report.sum_of_squares - report.bloch_invariant).abs() < 1e-12,
                    "identity defect {:.3e}",
                    (report.sum_of_squares - report.bloch_invariant).abs()
                );
            }
        }
    }

    #[test]
    fn optimal_generator_achieves_the_coherence_ceiling() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10 {
            let rho = random_density_matrix(2, 2, &mut rng).unwrap();
            let basis = random_qubit_basis(&mut rng);
            let ceiling = l1_coherence(&rho, &basis).unwrap();
            let (generator, achieved) = optimal_generator(&rho, &basis).unwrap();
            assert!((achieved - ceiling).abs() < 1e-12);
            let top = crate::linalg::schatten_norm(&generator, crate::linalg::NormOrder::Infinity)
                .unwrap();
            assert!((top - 1.0).abs() < 1e-12, "generator norm {top}");
            // No random unit-norm competitor beats it.
            let meas = basis.to_measurement();
            for _ in 0..8 {
                let k = crate::linalg::random_hermitian(2, &mut rng);
                let norm =
                    crate::linalg::schatten_norm(&k, crate::linalg::NormOrder::Infinity).unwrap();
                let competitor = k.scale(Complex64::new(1.0 / norm, 0.0));
                let v = probability_speed_exact(&rho, &competitor, &meas).unwrap();
                assert!(v <= achieved + 1e-10, "competitor won: {v} > {achieved}");
            }
        }
    }

    #[test]
    fn degenerate_coherence_still_returns_a_valid_generator() {
        // A state diagonal in the readout basis has zero coherence; the
        // generator is still unit norm and the achieved speed zero.
        let rho = state_from_bloch(BlochVector {
            x: 0.0,
            y: 0.0,
            z: 0.6,
        })
        .unwrap();
        let (generator, achieved) = optimal_generator(&rho, &QubitBasis::z_basis()).unwrap();
        assert!(achieved.abs() < 1e-13);
        assert!(generator.hermiticity_defect() < 1e-13);
    }
}
