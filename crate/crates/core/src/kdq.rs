//! Kirkwood-Dirac quasiprobability tables over a measurement and a reference
//! basis, and the nonreality functional that connects their imaginary parts
//! to commutator trace norms.
//!
//! For a state rho, measurement element M and rank-1 reference projectors
//! Pi_mu, the table holds `tr(Pi_mu M rho)`. Its column marginals reproduce
//! the Born probabilities and the supremum of the summed imaginary parts over
//! all rank-1 reference bases equals `||[M, rho]||_1 / 2`, attained on the
//! eigenbasis of the Hermitian part of `-i [M, rho]`. The stochastic search
//! here exists to confirm that identity from below without using it.

use num_complex::Complex64;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, dot, hermitian_eigensystem, schatten_norm, trace_product, ComplexMatrix, NormOrder,
};
use crate::quantum::{DensityMatrix, MeasurementKind, MeasurementSet};
use crate::search;
use crate::tolerances;

/// Quasiprobability table indexed by reference basis element (rows) and
/// measurement outcome (columns).
#[derive(Debug, Clone)]
pub struct KdTable {
    values: Vec<Vec<Complex64>>,
}

impl KdTable {
    #[inline]
    pub fn n_basis(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn n_outcomes(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    #[inline]
    pub fn value(&self, mu: usize, k: usize) -> Complex64 {
        self.values[mu][k]
    }

    /// Sum over basis elements for one outcome; real part is the Born
    /// probability of that outcome.
    pub fn outcome_marginal(&self, k: usize) -> Complex64 {
        self.values.iter().map(|row| row[k]).sum()
    }

    /// Sum over outcomes for one basis element; equals the population of the
    /// state on that basis vector.
    pub fn basis_marginal(&self, mu: usize) -> Complex64 {
        self.values[mu].iter().sum()
    }

    pub fn total(&self) -> Complex64 {
        self.values.iter().flatten().sum()
    }

    /// Summed magnitude of the imaginary parts down one outcome column.
    pub fn nonreality(&self, k: usize) -> Result<f64> {
        if k >= self.n_outcomes() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.n_outcomes(),
            });
        }
        Ok(self.values.iter().map(|row| row[k].im.abs()).sum())
    }

    /// Nonreality summed over all outcomes.
    pub fn total_nonreality(&self) -> f64 {
        (0..self.n_outcomes())
            .map(|k| self.values.iter().map(|row| row[k].im.abs()).sum::<f64>())
            .sum()
    }
}

/// Builds the quasiprobability table `tr(Pi_mu M_k rho)` for a rank-1
/// projective reference basis.
pub fn kd_table(
    state: &DensityMatrix,
    measurement: &MeasurementSet,
    basis: &MeasurementSet,
) -> Result<KdTable> {
    if basis.kind() != MeasurementKind::Rank1Pvm {
        return Err(Error::RequiresRank1Basis);
    }
    if state.dim() != measurement.dim() || state.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: measurement.dim().max(basis.dim()),
        });
    }
    let products: Vec<ComplexMatrix> = measurement
        .elements()
        .iter()
        .map(|m| m.matmul(state.matrix()))
        .collect();
    let values = basis
        .elements()
        .iter()
        .map(|pi| products.iter().map(|mk| trace_product(pi, mk)).collect())
        .collect();
    Ok(KdTable { values })
}

/// The largest nonreality any rank-1 reference basis can give one measurement
/// element, computed in closed form as `||[M, rho]||_1 / 2`, together with a
/// basis attaining it (the eigenbasis of the Hermitian part of the scaled
/// commutator).
pub fn max_nonreality_exact(
    state: &DensityMatrix,
    element: &ComplexMatrix,
) -> Result<(f64, MeasurementSet)> {
    element.require_hermitian(tolerances::HERMITICITY)?;
    if element.rows() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: element.rows(),
        });
    }
    let comm = commutator(element, state.matrix())?;
    let value = schatten_norm(&comm, NormOrder::Finite(1.0))? / 2.0;
    // [M, rho] is anti-Hermitian, so -i/2 times it is Hermitian; its
    // eigenbasis diagonalizes the imaginary part of M rho and therefore
    // collects the full nonreality. When the commutator vanishes any basis
    // works and the eigensolver just returns one.
    let witness = comm.scale(Complex64::new(0.0, -0.5)).hermitian_part();
    let eig = hermitian_eigensystem(&witness, tolerances::HERMITICITY)?;
    let basis = MeasurementSet::from_basis(&eig.eigenvectors)?;
    Ok((value, basis))
}

/// Stochastic lower bound on the maximal nonreality of one measurement
/// element: a hill climb over rank-1 reference bases evaluating the table
/// imaginary parts directly, never the commutator closed form.
pub fn max_nonreality_search(
    state: &DensityMatrix,
    element: &ComplexMatrix,
    rng: &mut impl RngCore,
    restarts: usize,
    iterations: usize,
) -> Result<(f64, MeasurementSet)> {
    element.require_hermitian(tolerances::HERMITICITY)?;
    if element.rows() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: element.rows(),
        });
    }
    let dim = state.dim();
    let product = element.matmul(state.matrix());
    let objective = |basis: &ComplexMatrix| -> f64 {
        (0..dim)
            .map(|mu| {
                let col = basis.column(mu);
                dot(&col, &product.mul_vec(&col)).im.abs()
            })
            .sum()
    };
    let outcome = search::refine_unitary(dim, objective, true, rng, restarts, iterations, &[]);
    let basis = MeasurementSet::from_basis(&outcome.basis)?;
    Ok((outcome.value, basis))
}

/// Measurement uncertainty assembled outcome by outcome from maximal
/// nonrealities, `sum_k sup_basis N_k`. Agrees with the commutator form of
/// the q = 1 uncertainty by construction of each term.
pub fn uncertainty_from_kd(state: &DensityMatrix, measurement: &MeasurementSet) -> Result<f64> {
    if state.dim() != measurement.dim() {
        return Err(Error::DimensionMismatch {
            expected: state.dim(),
            got: measurement.dim(),
        });
    }
    let mut total = 0.0;
    for m in measurement.elements() {
        total += max_nonreality_exact(state, m)?.0;
    }
    Ok(total)
}
